use cofinal::construction::approximation::default_xi;
use cofinal::construction::{
    build_approximation, extend_approximation, verify_approximation, Approximation,
    GoodnessConfig, SearchConfig, Window,
};
use cofinal::{Color, Error, FinSet, PairColoring, Rule};

fn prefix(n: u32) -> FinSet {
    FinSet::prefix(n)
}

fn build(rule: Rule, w: u32, depth: usize) -> (PairColoring, Window, Approximation) {
    let f = PairColoring::rule(rule, 2).unwrap();
    let win = Window::new(w, 2).unwrap();
    let a = build_approximation(&f, &win, depth, &SearchConfig::for_approximation()).unwrap();
    (f, win, a)
}

fn restricted(members: &[FinSet], ground: &FinSet) -> Vec<FinSet> {
    members.iter().filter(|x| x.is_subset(ground)).cloned().collect()
}

#[test]
fn const1_build_verifies_and_extends() {
    let (f, win, a) = build(Rule::Const1, 40, 6);
    assert_eq!(a.ground_prefix, prefix(25));
    assert_eq!(a.g_members, vec![prefix(2), prefix(4), prefix(6)]);
    assert_eq!(a.h_members, vec![prefix(3), prefix(5), prefix(7)]);
    for (i, step) in a.stages[0].steps.iter().enumerate() {
        assert_eq!(step.c, prefix(i as u32 + 2));
        assert_eq!(step.big_c, prefix(25));
    }
    let report = verify_approximation(&f, &a, &win, &GoodnessConfig::default()).unwrap();
    assert!(report.pass, "{:?}", report.first_failure());

    let xi = default_xi(&a);
    assert_eq!(xi, 25);
    let e = extend_approximation(&f, &a, xi, &win, 4, &SearchConfig::for_approximation()).unwrap();
    assert_eq!(restricted(&e.g_members, &a.ground_prefix), a.g_members);
    assert_eq!(restricted(&e.h_members, &a.ground_prefix), a.h_members);
    assert!(e.g_members.len() > a.g_members.len());
    assert!(e.ground_prefix.contains(xi));
    let report = verify_approximation(&f, &e, &win, &GoodnessConfig::default()).unwrap();
    assert!(report.pass, "{:?}", report.first_failure());
    assert!(report.end_homogeneous.pass);
}

#[test]
fn parity_build_golden() {
    let (f, win, a) = build(Rule::Parity, 60, 8);
    assert_eq!(a.ground_prefix, prefix(45));
    assert_eq!(a.g_members, vec![prefix(3), prefix(7)]);
    assert_eq!(a.h_members, vec![prefix(5), prefix(9)]);
    assert_eq!(a.stages[0].color, Color(1));
    let report = verify_approximation(&f, &a, &win, &GoodnessConfig::default()).unwrap();
    assert!(report.pass, "{:?}", report.first_failure());

    let e = extend_approximation(&f, &a, 45, &win, 4, &SearchConfig::for_approximation()).unwrap();
    assert_eq!(restricted(&e.g_members, &a.ground_prefix), a.g_members);
    assert_eq!(restricted(&e.h_members, &a.ground_prefix), a.h_members);
    let report = verify_approximation(&f, &e, &win, &GoodnessConfig::default()).unwrap();
    assert!(report.pass, "{:?}", report.first_failure());

    // a stray member breaks the certificate
    let mut bad = a.clone();
    bad.h_members.push(prefix(10));
    let report = verify_approximation(&f, &bad, &win, &GoodnessConfig::default()).unwrap();
    assert!(!report.pass);
}

#[test]
fn extension_needs_a_fresh_label() {
    let (f, win, a) = build(Rule::Const1, 40, 6);
    assert!(matches!(
        extend_approximation(&f, &a, 3, &win, 4, &SearchConfig::for_approximation()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn narrow_window_is_exhausted() {
    let f = PairColoring::rule(Rule::Const1, 2).unwrap();
    let win = Window::new(5, 1).unwrap();
    assert!(matches!(
        build_approximation(&f, &win, 6, &SearchConfig::for_approximation()),
        Err(Error::WindowExhausted(_))
    ));
}
