//! Approximations `(A, G, H)` at prefix scale: building one from scratch,
//! extending one to absorb a fresh label, and checking the four defining
//! clauses.

use serde::{Deserialize, Serialize};

use crate::coloring::{derive_f_h_a, Color, PairColoring, TotalColoring};
use crate::construction::goodness::{is_good_bounded_with, GoodnessConfig, Window};
use crate::construction::lemmas::{lemma22_search, lemma23_search, LemmaResult, SearchConfig};
use crate::error::{Error, Result};
use crate::lattice::{subsets, AnchoredPair, FinSet, Label};
use crate::ramsey::{extract_end_homogeneous, extract_homogeneous, Chain};

/// Enumeration cap used by the builders; `b` grows with the depth.
pub const APPROX_ENUM_CAP: usize = 16;

impl SearchConfig {
    pub fn for_approximation() -> Self {
        SearchConfig {
            enum_cap: APPROX_ENUM_CAP,
            ..SearchConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRecord {
    pub b: FinSet,
    pub g: TotalColoring,
    pub c: FinSet,
    #[serde(rename = "C")]
    pub big_c: FinSet,
    /// The pair the search was run above.
    pub anchor: AnchoredPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StageKind {
    Build,
    Extend { xi: Label },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub kind: StageKind,
    pub steps: Vec<StepRecord>,
    /// Positions (in `steps`) of the homogeneous subsequence that was split
    /// into the new `G` and `H` members.
    pub selection: Vec<usize>,
    pub color: Color,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Approximation {
    pub ground_prefix: FinSet,
    #[serde(rename = "G")]
    pub g_members: Vec<FinSet>,
    #[serde(rename = "H")]
    pub h_members: Vec<FinSet>,
    pub green: Color,
    pub stages: Vec<Stage>,
}

fn stuck(stage: &str, step: usize, log: &[StepRecord]) -> Error {
    Error::ConstructionStuck {
        stage: stage.to_string(),
        step,
        log: log.to_vec(),
    }
}

fn check_room(b: &FinSet, big_b: &FinSet, win: &Window) -> Result<()> {
    let used = big_b.union(b);
    let free = win.width() as usize - used.labels().iter().filter(|&&l| l < win.width()).count();
    if free <= win.reserve() as usize {
        return Err(Error::WindowExhausted(format!(
            "{free} free labels left, reserve is {}",
            win.reserve()
        )));
    }
    Ok(())
}

/// Selected step indices, their color, and the `G` and `H` members.
type Split = (Vec<usize>, Color, Vec<FinSet>, Vec<FinSet>);

/// Splits a homogeneous subsequence of `steps` into alternate `G` / `H`
/// members. An odd-length subsequence loses its first element so that the
/// top member lands in `H`.
fn split(
    coloring: &PairColoring,
    stage: &str,
    steps: &[StepRecord],
) -> Result<Split> {
    let chain = Chain::new(steps.iter().map(|s| s.c.clone()).collect())?;
    let eh = extract_end_homogeneous(coloring, &chain)?;
    let hom = extract_homogeneous(coloring, &eh)?;
    let mut selection = hom.indices.clone();
    if selection.len() % 2 == 1 {
        selection.remove(0);
    }
    if selection.len() < 2 {
        return Err(stuck(stage, steps.len(), steps));
    }
    let g = selection.iter().step_by(2).map(|&i| steps[i].c.clone()).collect();
    let h = selection.iter().skip(1).step_by(2).map(|&i| steps[i].c.clone()).collect();
    Ok((selection, hom.color, g, h))
}

fn record(b: FinSet, anchor: AnchoredPair, res: LemmaResult) -> StepRecord {
    StepRecord {
        b,
        g: res.g,
        c: res.c,
        big_c: res.big_c,
        anchor,
    }
}

/// Smallest width accepted for a build of the given depth.
pub fn required_width(depth: usize) -> usize {
    depth * (depth + 3) / 2
}

/// Builds `c₀ ⊂ c₁ ⊂ …` with `b₀ = {0}`, `(c_n, C_n)` from the unrestricted
/// search above `(b_n, b_n)`, and `b_{n+1} = c_n ∪` the first `n` elements of
/// every earlier `C_i`; then splits a homogeneous subsequence of the `c_n`.
pub fn build_approximation(
    coloring: &PairColoring,
    win: &Window,
    depth: usize,
    cfg: &SearchConfig,
) -> Result<Approximation> {
    if depth == 0 {
        return Err(Error::pre("depth must be positive"));
    }
    if (win.width() as usize) < required_width(depth) {
        return Err(Error::WindowExhausted(format!(
            "depth {depth} needs width at least {}, window has {}",
            required_width(depth),
            win.width()
        )));
    }
    let mut steps: Vec<StepRecord> = Vec::with_capacity(depth);
    let mut b = FinSet::singleton(0);
    for n in 0..depth {
        check_room(&b, &b, win)?;
        let q = AnchoredPair::tight(b.clone());
        let Some(res) = lemma22_search(coloring, &q, win, cfg)? else {
            return Err(stuck("build", n, &steps));
        };
        let mut next = res.c.clone();
        steps.push(record(b, q, res));
        for s in &steps {
            next = next.union(&s.big_c.first(n));
        }
        b = next;
    }
    let ground = steps
        .iter()
        .fold(FinSet::empty(), |acc, s| acc.union(&s.big_c));
    let (selection, color, g, h) = split(coloring, "build", &steps)?;
    Ok(Approximation {
        ground_prefix: ground,
        g_members: g,
        h_members: h,
        green: color,
        stages: vec![Stage {
            kind: StageKind::Build,
            steps,
            selection,
            color,
        }],
    })
}

/// Greedy `⊂`-increasing sequence through `G` in set order.
pub fn increasing_sequence(members: &[FinSet]) -> Vec<FinSet> {
    let mut sorted = members.to_vec();
    sorted.sort();
    let mut out: Vec<FinSet> = Vec::new();
    for m in sorted {
        if out.last().is_none_or(|top| top.is_proper_subset(&m)) {
            out.push(m);
        }
    }
    out
}

/// Default fresh label: the least label outside the built ground.
pub fn default_xi(approx: &Approximation) -> Label {
    (0..).find(|l| !approx.ground_prefix.contains(*l)).expect("labels are unbounded")
}

/// Absorbs `xi` into the ground: runs the restricted search above
/// `(b_n, A ∪ b_n)` for `f^H_{a_n}`, where `a_n` climbs an increasing
/// sequence in `G` (staying at its top once exhausted) and
/// `b_{n+1} = a_{n+1} ∪ c_n ∪` the first `n` elements of each `C_i − A`.
pub fn extend_approximation(
    coloring: &PairColoring,
    approx: &Approximation,
    xi: Label,
    win: &Window,
    depth: usize,
    cfg: &SearchConfig,
) -> Result<Approximation> {
    if approx.ground_prefix.contains(xi) {
        return Err(Error::pre(format!(
            "label {xi} already lies in the ground {}",
            approx.ground_prefix
        )));
    }
    if xi >= win.width() {
        return Err(Error::pre(format!("label {xi} is outside the window")));
    }
    if depth == 0 {
        return Err(Error::pre("depth must be positive"));
    }
    let report = verify_approximation(coloring, approx, win, &cfg.goodness)?;
    if !report.pass {
        return Err(Error::pre(format!(
            "input approximation does not verify: {}",
            report.first_failure().unwrap_or("unknown clause")
        )));
    }
    let big_a = approx.ground_prefix.clone();
    let seq = increasing_sequence(&approx.g_members);
    let a_at = |n: usize| seq[n.min(seq.len() - 1)].clone();

    let mut steps: Vec<StepRecord> = Vec::with_capacity(depth);
    let mut b = a_at(0).with(xi);
    for n in 0..depth {
        let a = a_at(n);
        let ground = big_a.union(&b);
        check_room(&b, &ground, win)?;
        let f = derive_f_h_a(coloring, &approx.h_members, &a)?.coloring;
        let p = AnchoredPair::new(a, big_a.clone())?;
        let q = AnchoredPair::new(b.clone(), ground)?;
        let Some(res) = lemma23_search(coloring, &p, &f, &q, win, cfg)? else {
            return Err(stuck("extend", n, &steps));
        };
        let mut next = a_at(n + 1).union(&res.c);
        steps.push(record(b, q, res));
        for s in &steps {
            next = next.union(&s.big_c.difference(&big_a).first(n));
        }
        b = next;
    }
    let (selection, color, d, e) = split(coloring, "extend", &steps)?;
    let ground = steps
        .iter()
        .fold(big_a, |acc, s| acc.union(&s.big_c));
    let mut stages = approx.stages.clone();
    stages.push(Stage {
        kind: StageKind::Extend { xi },
        steps,
        selection,
        color,
    });
    Ok(Approximation {
        ground_prefix: ground,
        g_members: approx.g_members.iter().chain(&d).cloned().collect(),
        h_members: approx.h_members.iter().chain(&e).cloned().collect(),
        green: approx.green,
        stages,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointClause {
    pub pass: bool,
    pub shared: Option<FinSet>,
    pub outside_ground: Option<FinSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CofinalClause {
    pub pass: bool,
    /// Longest initial segment of the ground (ascending) all of whose
    /// subsets lie under a member of `G`, resp. `H`.
    pub prefix_g: usize,
    pub prefix_h: usize,
    /// A member that is not maximal in `G ∪ H` yet has nothing above it in
    /// the other family.
    pub stranded: Option<FinSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndHomogeneousClause {
    pub pass: bool,
    pub checked_pairs: u64,
    /// `(x, y, z)` with `x ⊂ y`, `x ⊂ z` and different colors.
    pub violation: Option<(FinSet, FinSet, FinSet)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodFailure {
    pub a: FinSet,
    pub reason: String,
    pub counterexample: Option<AnchoredPair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodClause {
    pub pass: bool,
    pub checked: usize,
    pub failure: Option<GoodFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub pass: bool,
    pub disjoint: DisjointClause,
    pub cofinal: CofinalClause,
    pub end_homogeneous: EndHomogeneousClause,
    pub good: GoodClause,
}

impl ApproximationReport {
    pub fn first_failure(&self) -> Option<&'static str> {
        [
            (self.disjoint.pass, "disjointness"),
            (self.cofinal.pass, "cofinality"),
            (self.end_homogeneous.pass, "end-homogeneity"),
            (self.good.pass, "goodness"),
        ]
        .into_iter()
        .find(|(pass, _)| !pass)
        .map(|(_, name)| name)
    }
}

fn covered_prefix(members: &[FinSet], ground: &FinSet) -> usize {
    let labels = ground.labels();
    members
        .iter()
        .map(|m| labels.iter().take_while(|&&l| m.contains(l)).count())
        .max()
        .unwrap_or(0)
}

pub fn verify_approximation(
    coloring: &PairColoring,
    approx: &Approximation,
    win: &Window,
    cfg: &GoodnessConfig,
) -> Result<ApproximationReport> {
    let (g, h, ground) = (&approx.g_members, &approx.h_members, &approx.ground_prefix);

    let shared = g.iter().find(|x| h.contains(x)).cloned();
    let outside_ground = g.iter().chain(h).find(|x| !x.is_subset(ground)).cloned();
    let disjoint = DisjointClause {
        pass: shared.is_none() && outside_ground.is_none(),
        shared,
        outside_ground,
    };

    let prefix_g = covered_prefix(g, ground);
    let prefix_h = covered_prefix(h, ground);
    let all: Vec<&FinSet> = g.iter().chain(h).collect();
    let maximal = |x: &FinSet| !all.iter().any(|y| x.is_proper_subset(y));
    let stranded = g
        .iter()
        .map(|x| (x, h))
        .chain(h.iter().map(|x| (x, g)))
        .find(|(x, other)| !maximal(x) && !other.iter().any(|y| x.is_proper_subset(y)))
        .map(|(x, _)| x.clone());
    let cofinal = CofinalClause {
        pass: (ground.is_empty() || (prefix_g >= 1 && prefix_h >= 1)) && stranded.is_none(),
        prefix_g,
        prefix_h,
        stranded,
    };

    let mut checked_pairs = 0;
    let mut violation = None;
    'outer: for x in h {
        let mut first: Option<(&FinSet, Color)> = None;
        for y in h.iter().filter(|y| x.is_proper_subset(y)) {
            checked_pairs += 1;
            let c = coloring.eval(x, y)?;
            match first {
                None => first = Some((y, c)),
                Some((y0, c0)) if c0 != c => {
                    violation = Some((x.clone(), y0.clone(), y.clone()));
                    break 'outer;
                }
                _ => {}
            }
        }
    }
    let end_homogeneous = EndHomogeneousClause {
        pass: violation.is_none(),
        checked_pairs,
        violation,
    };

    let mut good = GoodClause {
        pass: true,
        checked: 0,
        failure: None,
    };
    for a in g {
        good.checked += 1;
        let failure = match check_member(coloring, a, h, ground, win, cfg) {
            Ok(None) => continue,
            Ok(Some(cx)) => GoodFailure {
                a: a.clone(),
                reason: "not good".into(),
                counterexample: Some(cx),
            },
            Err(e) => GoodFailure {
                a: a.clone(),
                reason: e.to_string(),
                counterexample: None,
            },
        };
        good.pass = false;
        good.failure = Some(failure);
        break;
    }

    Ok(ApproximationReport {
        pass: disjoint.pass && cofinal.pass && end_homogeneous.pass && good.pass,
        disjoint,
        cofinal,
        end_homogeneous,
        good,
    })
}

fn check_member(
    coloring: &PairColoring,
    a: &FinSet,
    h: &[FinSet],
    ground: &FinSet,
    win: &Window,
    cfg: &GoodnessConfig,
) -> Result<Option<AnchoredPair>> {
    let f = derive_f_h_a(coloring, h, a)?.coloring;
    let p = AnchoredPair::new(a.clone(), ground.clone())?;
    let v = is_good_bounded_with(coloring, &p, &f, win, cfg)?;
    Ok(if v.good { None } else { v.counterexample })
}

/// Every subset of the first `m` ground labels lies under some member.
pub fn dominates_prefix(members: &[FinSet], ground: &FinSet, m: usize) -> bool {
    let prefix = ground.first(m);
    subsets(&prefix).all(|x| members.iter().any(|y| x.is_subset(y)))
}
