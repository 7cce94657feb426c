//! Searches for a total coloring `g` of `b` and a pair `(c, C) ≥ (b, B)` that
//! is good for `g`, with `c` a `g`-correct proper `B`-extension of `b`.
//!
//! For a candidate `c` the only total coloring of `b` that `c` is correct for
//! is the induced one, `g(x) = F(x, c)`, so the search runs over `c` and
//! derives `g`. Candidate grounds are `C_t = B ∪ c ∪ {0..t−1}`; goodness is
//! monotone in `C`, so the largest feasible `C_t` is tried first and the
//! smallest good one is then found by bisection.

use serde::{Deserialize, Serialize};

use crate::coloring::{induced_total_coloring, is_f_correct, PairColoring, PartialColoring, TotalColoring};
use crate::construction::goodness::{
    combinations, is_good_bounded_with, low_mask, maximal_pair_count, GoodnessConfig, Window,
};
use crate::error::{Error, Result};
use crate::lattice::{is_a_extension, pair_le, AnchoredPair, FinSet};

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    /// Largest `|b|` accepted; total colorings of `b` have `2^|b|` entries.
    pub enum_cap: usize,
    /// Largest number of labels added to `b` to form `c`.
    pub max_extension: usize,
    pub goodness: GoodnessConfig,
}

pub const DEFAULT_ENUM_CAP: usize = 4;

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            enum_cap: DEFAULT_ENUM_CAP,
            max_extension: 3,
            goodness: GoodnessConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaResult {
    pub g: TotalColoring,
    pub c: FinSet,
    #[serde(rename = "C")]
    pub big_c: FinSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedCandidate {
    pub c: FinSet,
    pub reason: String,
}

/// A search result together with every rejected candidate, in search order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub result: Option<LemmaResult>,
    pub failures: Vec<FailedCandidate>,
}

pub fn lemma22_search(
    coloring: &PairColoring,
    q: &AnchoredPair,
    win: &Window,
    cfg: &SearchConfig,
) -> Result<Option<LemmaResult>> {
    Ok(search(coloring, None, q, win, cfg, false)?.result)
}

pub fn lemma22_trace(
    coloring: &PairColoring,
    q: &AnchoredPair,
    win: &Window,
    cfg: &SearchConfig,
) -> Result<SearchTrace> {
    search(coloring, None, q, win, cfg, true)
}

/// As [`lemma22_search`], restricted to `g ⊇ f`. Requires `p ≤ q` and `p`
/// good for `f`.
pub fn lemma23_search(
    coloring: &PairColoring,
    p: &AnchoredPair,
    f: &PartialColoring,
    q: &AnchoredPair,
    win: &Window,
    cfg: &SearchConfig,
) -> Result<Option<LemmaResult>> {
    Ok(lemma23_trace_inner(coloring, p, f, q, win, cfg, false)?.result)
}

pub fn lemma23_trace(
    coloring: &PairColoring,
    p: &AnchoredPair,
    f: &PartialColoring,
    q: &AnchoredPair,
    win: &Window,
    cfg: &SearchConfig,
) -> Result<SearchTrace> {
    lemma23_trace_inner(coloring, p, f, q, win, cfg, true)
}

fn lemma23_trace_inner(
    coloring: &PairColoring,
    p: &AnchoredPair,
    f: &PartialColoring,
    q: &AnchoredPair,
    win: &Window,
    cfg: &SearchConfig,
    trace: bool,
) -> Result<SearchTrace> {
    if !pair_le(p, q) {
        return Err(Error::pre(format!("{p} is not below {q}")));
    }
    let verdict = is_good_bounded_with(coloring, p, f, win, &cfg.goodness)?;
    if !verdict.good {
        return Err(Error::pre(format!(
            "{p} is not good for the given coloring (counterexample {})",
            verdict.counterexample.expect("not good has a counterexample")
        )));
    }
    search(coloring, Some(f), q, win, cfg, trace)
}

fn search(
    coloring: &PairColoring,
    f: Option<&PartialColoring>,
    q: &AnchoredPair,
    win: &Window,
    cfg: &SearchConfig,
    trace: bool,
) -> Result<SearchTrace> {
    if q.part.len() > cfg.enum_cap {
        return Err(Error::cap(
            format!("total colorings of a {}-element set", q.part.len()),
            q.part.len() as u128,
            cfg.enum_cap as u128,
        ));
    }
    let b = win.mask_of(&q.part, "part")?;
    let big_b = win.mask_of(&q.ground, "ground")?;
    let free = win.mask() & !big_b;
    let room = free.count_ones().saturating_sub(win.reserve()) as usize;
    let mut failures = Vec::new();
    let mut fail = |c: &FinSet, reason: String| {
        if trace {
            failures.push(FailedCandidate {
                c: c.clone(),
                reason,
            });
        }
    };

    for size in 1..=room.min(cfg.max_extension) {
        for s in combinations(free, size) {
            let c_mask = b | s;
            let c = FinSet::from_mask(c_mask);
            if let Some(f) = f {
                if !is_f_correct(coloring, f, &c)?.correct {
                    fail(&c, "not correct for the given coloring".into());
                    continue;
                }
            }
            let g = induced_total_coloring(coloring, &q.part, &c)?;

            // distinct feasible grounds, smallest first
            let mut grounds: Vec<u64> = Vec::new();
            for t in 0..=win.width() {
                let big_c = big_b | c_mask | low_mask(t);
                let left = (win.mask() & !big_c).count_ones();
                if left < win.reserve() {
                    break;
                }
                if maximal_pair_count(left, win.reserve()) > cfg.goodness.pair_cap {
                    continue;
                }
                if grounds.last() != Some(&big_c) {
                    grounds.push(big_c);
                }
            }
            let Some(&largest) = grounds.last() else {
                fail(&c, "no ground within the pair cap".into());
                continue;
            };
            let good_at = |big_c: u64| -> Result<bool> {
                let pair = AnchoredPair {
                    part: c.clone(),
                    ground: FinSet::from_mask(big_c),
                };
                Ok(is_good_bounded_with(coloring, &pair, g.as_partial(), win, &cfg.goodness)?.good)
            };
            if !good_at(largest)? {
                fail(&c, format!("not good even over {}", FinSet::from_mask(largest)));
                continue;
            }
            // invariant: grounds[hi] is good
            let (mut lo, mut hi) = (0usize, grounds.len() - 1);
            if good_at(grounds[0])? {
                hi = 0;
            } else {
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if good_at(grounds[mid])? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
            }
            return Ok(SearchTrace {
                result: Some(LemmaResult {
                    g,
                    c,
                    big_c: FinSet::from_mask(grounds[hi]),
                }),
                failures,
            });
        }
    }
    Ok(SearchTrace {
        result: None,
        failures,
    })
}

/// Independent re-check of a search result against `q` (and `f` for the
/// restricted search).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub above_q: bool,
    pub proper_extension: bool,
    pub g_correct: bool,
    pub extends_f: bool,
    pub good: bool,
}

impl LemmaCheck {
    pub fn passed(&self) -> bool {
        self.above_q && self.proper_extension && self.g_correct && self.extends_f && self.good
    }
}

pub fn check_lemma_result(
    coloring: &PairColoring,
    q: &AnchoredPair,
    f: Option<&PartialColoring>,
    res: &LemmaResult,
    win: &Window,
    cfg: &GoodnessConfig,
) -> Result<LemmaCheck> {
    let candidate = AnchoredPair::new(res.c.clone(), res.big_c.clone());
    let above_q = candidate.as_ref().is_ok_and(|cc| pair_le(q, cc));
    let proper_extension = is_a_extension(&q.part, &q.ground, &res.c, true)?;
    let g_correct = res.g.base() == &q.part
        && q.part.is_proper_subset(&res.c)
        && is_f_correct(coloring, res.g.as_partial(), &res.c)?.correct;
    let extends_f = f.is_none_or(|f| res.g.extends(f));
    let good = match candidate {
        Ok(cc) => is_good_bounded_with(coloring, &cc, res.g.as_partial(), win, cfg)?.good,
        Err(_) => false,
    };
    Ok(LemmaCheck {
        above_q,
        proper_extension,
        g_correct,
        extends_f,
        good,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{Color, Rule};

    fn s(v: &[u32]) -> FinSet {
        FinSet::from_sorted(v.to_vec()).unwrap()
    }

    #[test]
    fn const1_lemma22() {
        let f = PairColoring::rule(Rule::Const1, 2).unwrap();
        let win = Window::new(4, 1).unwrap();
        let q = AnchoredPair::tight(FinSet::empty());
        let r = lemma22_search(&f, &q, &win, &SearchConfig::default())
            .unwrap()
            .unwrap();
        assert_eq!(r.c, s(&[0]));
        assert_eq!(r.big_c, s(&[0]));
        assert_eq!(r.g.get(&FinSet::empty()), Some(Color(1)));
        let check =
            check_lemma_result(&f, &q, None, &r, &win, &GoodnessConfig::default()).unwrap();
        assert!(check.passed());
    }

    #[test]
    fn enumeration_cap() {
        let f = PairColoring::rule(Rule::Parity, 2).unwrap();
        let win = Window::new(8, 1).unwrap();
        let q = AnchoredPair::tight(FinSet::prefix(5));
        assert!(matches!(
            lemma22_search(&f, &q, &win, &SearchConfig::default()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn const1_lemma23() {
        let f = PairColoring::rule(Rule::Const1, 2).unwrap();
        let win = Window::new(4, 1).unwrap();
        let p = AnchoredPair::tight(FinSet::empty());
        let q = AnchoredPair::new(FinSet::empty(), s(&[0])).unwrap();
        let one = PartialColoring::new(FinSet::empty(), [(FinSet::empty(), Color(1))]).unwrap();
        let r = lemma23_search(&f, &p, &one, &q, &win, &SearchConfig::default())
            .unwrap()
            .unwrap();
        assert_eq!(r.g.get(&FinSet::empty()), Some(Color(1)));
        let check =
            check_lemma_result(&f, &q, Some(&one), &r, &win, &GoodnessConfig::default()).unwrap();
        assert!(check.passed());

        let two = PartialColoring::new(FinSet::empty(), [(FinSet::empty(), Color(2))]).unwrap();
        assert!(matches!(
            lemma23_search(&f, &p, &two, &q, &win, &SearchConfig::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn parity_results_recheck() {
        let f = PairColoring::rule(Rule::Parity, 2).unwrap();
        let win = Window::new(4, 1).unwrap();
        let q = AnchoredPair::tight(FinSet::empty());
        let trace = lemma22_trace(&f, &q, &win, &SearchConfig::default()).unwrap();
        if let Some(r) = &trace.result {
            let check =
                check_lemma_result(&f, &q, None, r, &win, &GoodnessConfig::default()).unwrap();
            assert!(check.passed());
        } else {
            assert!(!trace.failures.is_empty());
        }
    }
}
