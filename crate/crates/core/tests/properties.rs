use cofinal::coloring::{derive_f_h_a, is_f_correct, Table};
use cofinal::construction::{
    check_lemma_result, is_good_bounded, lemma22_search, GoodnessConfig, GoodnessProfile,
    SearchConfig, Window,
};
use cofinal::laver::{laver_audit, laver_build, laver_complete, laver_verify, Family, Registry};
use cofinal::lattice::pair_le;
use cofinal::oracle::search::{check_hit, search_cofinal_homogeneous};
use cofinal::oracle::width::{char_width, LeveledPoset};
use cofinal::ramsey::{
    brute_max_homogeneous, end_homogeneous_lower_bound, extract_end_homogeneous,
    extract_homogeneous, Chain,
};
use cofinal::{AnchoredPair, Color, FinPoset, FinSet, PairColoring, PartialColoring};
use proptest::prelude::*;

fn table(width: u32, k: u8, seed: &[u8]) -> PairColoring {
    let n = Table::pair_count(width) as usize;
    let colors: Vec<u8> = (0..n).map(|i| seed[i % seed.len()] % k + 1).collect();
    PairColoring::table(k, Table::from_pair_colors(width, &colors).unwrap()).unwrap()
}

fn mask_set(m: u64) -> FinSet {
    FinSet::from_mask(m)
}

fn chain_from(perm: &[u32], cuts: &[usize]) -> Chain {
    let mut sizes: Vec<usize> = cuts.iter().map(|c| c % (perm.len() + 1)).collect();
    sizes.sort_unstable();
    sizes.dedup();
    Chain::new(
        sizes
            .into_iter()
            .map(|n| perm[..n].iter().copied().collect())
            .collect(),
    )
    .unwrap()
}

fn largest_homogeneous(f: &PairColoring, chain: &Chain) -> usize {
    let sets = chain.sets();
    let n = sets.len();
    let mut best = 0;
    for h in 0u32..1 << n {
        let idx: Vec<usize> = (0..n).filter(|&i| h >> i & 1 == 1).collect();
        let mut colors = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                colors.push(f.eval(&sets[i], &sets[j]).unwrap());
            }
        }
        if colors.windows(2).all(|w| w[0] == w[1]) {
            best = best.max(idx.len());
        }
    }
    best
}

/// Goodness straight from the definition: every `(b, B) ≥ (a, A)` in the
/// window with enough free labels has an `f`-correct proper extension.
fn good_by_definition(f: &PairColoring, p: &AnchoredPair, g: &PartialColoring, w: u32, r: u32) -> bool {
    let full = (1u64 << w) - 1;
    let a = p.part.to_mask().unwrap();
    let big_a = p.ground.to_mask().unwrap();
    let entries: Vec<(u64, Color)> = g.iter().map(|(x, c)| (x.to_mask().unwrap(), c)).collect();
    let correct = |c: u64| entries.iter().all(|&(x, col)| f.eval_mask(x, c) == col);
    let free = full & !big_a;
    let mut t = 0u64;
    loop {
        let big_b = big_a | t;
        if (full & !big_b).count_ones() >= r {
            let mut u = 0u64;
            loop {
                let b = a | u;
                let outside = full & !big_b;
                let mut s = outside;
                let mut found = false;
                while s != 0 {
                    if correct(b | s) {
                        found = true;
                        break;
                    }
                    s = (s - 1) & outside;
                }
                if !found {
                    return false;
                }
                if u == t {
                    break;
                }
                u = (u.wrapping_sub(t)) & t;
            }
        }
        if t == free {
            return true;
        }
        t = (t.wrapping_sub(free)) & free;
    }
}

fn partial_on(a: &FinSet, picks: &[u8], k: u8) -> PartialColoring {
    let subsets: Vec<FinSet> = cofinal::lattice::subsets(a).collect();
    let entries: Vec<(FinSet, Color)> = subsets
        .into_iter()
        .zip(picks.iter().cycle())
        .filter(|(_, &p)| p % (k + 1) != 0)
        .map(|(x, &p)| (x, Color(p % (k + 1))))
        .collect();
    PartialColoring::new(a.clone(), entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extraction_meets_bounds_and_oracle(
        k in 2u8..=3,
        seed in prop::collection::vec(any::<u8>(), 1..40),
        perm in Just((0u32..8).collect::<Vec<_>>()).prop_shuffle(),
        cuts in prop::collection::vec(0usize..9, 1..10),
    ) {
        let f = table(8, k, &seed);
        let chain = chain_from(&perm, &cuts);
        let eh = extract_end_homogeneous(&f, &chain).unwrap();
        prop_assert!(eh.verified);
        prop_assert!(eh.subsequence.len() >= end_homogeneous_lower_bound(chain.len(), k));
        let h = extract_homogeneous(&f, &eh).unwrap();
        prop_assert!(h.verified);
        let brute = brute_max_homogeneous(&f, &chain).unwrap();
        prop_assert!(h.members.len() <= brute.size);
        prop_assert_eq!(brute.size, largest_homogeneous(&f, &chain));
    }

    #[test]
    fn derived_coloring_exists_on_end_homogeneous_sets(
        seed in prop::collection::vec(any::<u8>(), 1..40),
        perm in Just((0u32..8).collect::<Vec<_>>()).prop_shuffle(),
        cuts in prop::collection::vec(0usize..9, 1..10),
    ) {
        let f = table(8, 2, &seed);
        let chain = chain_from(&perm, &cuts);
        let eh = extract_end_homogeneous(&f, &chain).unwrap();
        let top = eh.subsequence.last().unwrap().clone();
        let d = derive_f_h_a(&f, &eh.subsequence, &top).unwrap();
        prop_assert!(d.unwitnessed.is_empty());
        for (i, x) in eh.subsequence.iter().enumerate().take(eh.subsequence.len() - 1) {
            prop_assert_eq!(d.coloring.get(x), Some(eh.end_colors[i]));
        }
    }

    #[test]
    fn correctness_survives_restriction(
        seed in prop::collection::vec(any::<u8>(), 1..40),
        a in 0u64..16, extra in 1u64..16, picks in prop::collection::vec(0u8..3, 1..16),
        drop in 0usize..16,
    ) {
        let f = table(5, 2, &seed);
        let a = mask_set(a);
        let b = mask_set(a.to_mask().unwrap() | extra | 1 << 4);
        let g = partial_on(&a, &picks, 2);
        let fixed: Vec<(FinSet, Color)> = g.iter().map(|(x, _)| (x.clone(), f.eval(x, &b).unwrap())).collect();
        let g = PartialColoring::new(a.clone(), fixed).unwrap();
        prop_assert!(is_f_correct(&f, &g, &b).unwrap().correct);
        let domain: Vec<FinSet> = g.iter().map(|(x, _)| x.clone()).collect();
        if let Some(x) = domain.get(drop % domain.len().max(1)) {
            prop_assert!(is_f_correct(&f, &g.without(x), &b).unwrap().correct);
        }
    }

    #[test]
    fn goodness_matches_definition(
        seed in prop::collection::vec(any::<u8>(), 1..60),
        a in 0u64..32, grow in 0u64..32, r in 1u32..=2,
        picks in prop::collection::vec(0u8..3, 1..8),
    ) {
        let w = 5;
        let f = table(w, 2, &seed);
        let win = Window::new(w, r).unwrap();
        let p = AnchoredPair::new(mask_set(a), mask_set(a | grow)).unwrap();
        let g = partial_on(&p.part, &picks, 2);
        let verdict = is_good_bounded(&f, &p, &g, &win).unwrap();
        prop_assert_eq!(verdict.good, good_by_definition(&f, &p, &g, w, r));
        if let Some(cx) = &verdict.counterexample {
            prop_assert!(pair_le(&p, cx));
        }
        let profile = GoodnessProfile::prepare(&f, &p, &win).unwrap();
        prop_assert_eq!(profile.accepts(&g).unwrap(), verdict.good);
    }

    #[test]
    fn lemma_results_recheck(
        seed in prop::collection::vec(any::<u8>(), 1..60),
        b in 0u64..8, grow in 0u64..16,
    ) {
        let w = 6;
        let f = table(w, 2, &seed);
        let win = Window::new(w, 1).unwrap();
        let q = AnchoredPair::new(mask_set(b), mask_set(b | grow)).unwrap();
        if let Some(res) = lemma22_search(&f, &q, &win, &SearchConfig::default()).unwrap() {
            let check = check_lemma_result(&f, &q, None, &res, &win, &GoodnessConfig::default()).unwrap();
            prop_assert!(check.passed(), "{:?}", check);
        }
    }

    #[test]
    fn poset_search_rechecks(
        n in 1usize..8,
        rel in prop::collection::vec(any::<bool>(), 64),
        cols in prop::collection::vec(1u8..=2, 64),
        interior in 0u32..256, m in 0usize..4,
    ) {
        // upper-triangular relation, closed transitively
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| rel[i * 8 + j])
            .collect();
        let s = FinPoset::closed_from_relation((0..n as u32).collect(), &pairs).unwrap();
        let color = |i: usize, j: usize| Color(cols[i.min(j) * 8 + i.max(j)]);
        let interior: Vec<usize> = (0..n).filter(|&i| interior >> i & 1 == 1).collect();
        let hit = search_cofinal_homogeneous(&s, 2, &color, &interior, m).unwrap();
        match hit {
            Some(h) => prop_assert!(check_hit(&s, &color, &interior, m, &h).passed()),
            None => {
                // nothing qualifies: confirm over every subset and color
                for h in 0u32..1 << n {
                    let members: Vec<usize> = (0..n).filter(|&i| h >> i & 1 == 1).collect();
                    for c in 1..=2 {
                        let cand = cofinal::oracle::HomogeneousHit {
                            chain: longest_chain(&s, &members),
                            members: members.clone(),
                            color: Color(c),
                        };
                        prop_assert!(!check_hit(&s, &color, &interior, m, &cand).passed());
                    }
                }
            }
        }
    }

    #[test]
    fn exact_width_never_exceeds_greedy(
        n in 1usize..10,
        rel in prop::collection::vec(any::<bool>(), 100),
        levels in prop::collection::vec(1u32..4, 10),
    ) {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| rel[i * 10 + j])
            .collect();
        let poset = FinPoset::closed_from_relation((0..n as u32).collect(), &pairs).unwrap();
        let s = LeveledPoset {
            poset,
            levels: levels[..n].to_vec(),
            names: (0..n).map(|i| i.to_string()).collect(),
        };
        let r = char_width(&s, 0, true).unwrap();
        prop_assert!(r.exact.unwrap().max_preds <= r.greedy.max_preds);
    }

    #[test]
    fn laver_builds_are_consistent(
        size in 1u32..14,
        a_bits in prop::collection::vec(any::<u16>(), 14),
        m_bits in prop::collection::vec(any::<u16>(), 14),
        h_picks in prop::collection::vec(any::<u64>(), 14),
    ) {
        let below = |alpha: u32, bits: u16| FinSet::from_mask(u64::from(bits) & ((1u64 << alpha) - 1));
        let a: Vec<(u32, FinSet)> = (0..size).map(|al| (al, below(al, a_bits[al as usize]))).collect();
        let mh: Vec<(u32, Family)> = (0..size)
            .map(|al| {
                let m = below(al, m_bits[al as usize] & 0x3f);
                let h = cofinal::lattice::subsets(&m)
                    .enumerate()
                    .filter(|(i, _)| h_picks[al as usize] >> (i % 64) & 1 == 1)
                    .map(|(_, x)| x)
                    .collect();
                (al, Family { m, h })
            })
            .collect();
        let reg = Registry::new(size, a, mh).unwrap();
        let st = laver_build(&reg).unwrap();
        let audit = laver_audit(&st);
        prop_assert_eq!(audit.conflicts, 0);
        prop_assert!(audit.max_is_alpha && audit.positions_decrease && audit.rich_choices_succeed);
        let f = laver_complete(&st, Color(1)).unwrap();
        for beta in 0..size {
            for w in laver_verify(&st, &f, beta).unwrap() {
                prop_assert!(w.c.is_proper_subset(&w.s) && w.d.is_proper_subset(&w.s));
            }
        }
    }

    #[test]
    fn coloring_json_round_trips(seed in prop::collection::vec(any::<u8>(), 1..20), picks in prop::collection::vec(0u8..4, 1..8), a in 0u64..16) {
        let f = table(3, 3, &seed);
        let text = serde_json::to_string(&f).unwrap();
        let back: PairColoring = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &f);
        let g = partial_on(&mask_set(a), &picks, 3);
        let text = serde_json::to_string(&g).unwrap();
        let back: PartialColoring = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, g);
    }
}

fn longest_chain(s: &FinPoset, members: &[usize]) -> usize {
    fn go(s: &FinPoset, members: &[usize], top: usize) -> usize {
        1 + members
            .iter()
            .filter(|&&y| s.less(y, top))
            .map(|&y| go(s, members, y))
            .max()
            .unwrap_or(0)
    }
    members.iter().map(|&x| go(s, members, x)).max().unwrap_or(0)
}
