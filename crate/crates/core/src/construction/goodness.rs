//! Bounded goodness: `(a, A)` is good for `f` inside a window when every
//! `(b, B) ≥ (a, A)` leaving at least `reserve` labels free has an `f`-correct
//! proper `B`-extension.
//!
//! A witness for `(b', B') ≥ (b, B)` is also a witness for `(b, B)`, so only
//! the maximal quantified pairs need a search: `B' = A ∪ (free ∖ R)` with
//! `|R| = reserve` and `b' = a ∪ U` for `U ⊆ free ∖ R`. Their witnesses are
//! `b' ∪ s` with `∅ ≠ s ⊆ R`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, PairColoring, PartialColoring};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{AnchoredPair, FinSet, MaskBits};

/// The ground segment `{0, …, width−1}` plus the number of labels every
/// quantified `B` must leave free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WindowRepr")]
pub struct Window {
    width: u32,
    reserve: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowRepr {
    width: u32,
    reserve: u32,
}

impl TryFrom<WindowRepr> for Window {
    type Error = Error;

    fn try_from(r: WindowRepr) -> Result<Window> {
        Window::new(r.width, r.reserve)
    }
}

impl Window {
    pub const MAX_WIDTH: u32 = 64;

    pub fn new(width: u32, reserve: u32) -> Result<Self> {
        if width == 0 || width > Self::MAX_WIDTH {
            return Err(Error::invalid(format!(
                "window width {width} outside 1..={}",
                Self::MAX_WIDTH
            )));
        }
        if reserve == 0 || reserve >= width {
            return Err(Error::invalid(format!(
                "reserve {reserve} must satisfy 1 ≤ reserve < width = {width}"
            )));
        }
        Ok(Window { width, reserve })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn reserve(&self) -> u32 {
        self.reserve
    }

    pub fn mask(&self) -> u64 {
        low_mask(self.width)
    }

    /// Mask of a set that must lie inside the window.
    pub fn mask_of(&self, set: &FinSet, what: &str) -> Result<u64> {
        match set.to_mask() {
            Some(m) if m & !self.mask() == 0 => Ok(m),
            _ => Err(Error::pre(format!(
                "{what} {set} is not inside the window of width {}",
                self.width
            ))),
        }
    }
}

pub(crate) fn low_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Set order (cardinality, then lexicographic) on masks.
pub(crate) fn mask_cmp(x: u64, y: u64) -> Ordering {
    x.count_ones().cmp(&y.count_ones()).then_with(|| {
        let d = x ^ y;
        if d == 0 {
            Ordering::Equal
        } else if x & d & d.wrapping_neg() != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    })
}

/// All submasks of `mask`, in set order.
pub(crate) fn submasks_ordered(mask: u64) -> Vec<u64> {
    let mut out = submasks(mask);
    out.sort_by(|&a, &b| mask_cmp(a, b));
    out
}

/// All submasks of `mask`, ascending numerically.
pub(crate) fn submasks(mask: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(1usize << mask.count_ones().min(30));
    let mut s = 0u64;
    loop {
        out.push(s);
        if s == mask {
            break;
        }
        s = s.wrapping_sub(mask) & mask;
    }
    out
}

/// `k`-element submasks of `mask` in lexicographic order.
pub(crate) fn combinations(mask: u64, k: usize) -> Vec<u64> {
    let bits: Vec<u32> = MaskBits(mask).collect();
    let n = bits.len();
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut picks: Vec<usize> = (0..k).collect();
    loop {
        out.push(picks.iter().fold(0u64, |m, &i| m | 1 << bits[i]));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if picks[i] < n - (k - i) {
                picks[i] += 1;
                for j in i + 1..k {
                    picks[j] = picks[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Number of maximal quantified pairs above a pair with `free` unclaimed
/// labels.
pub fn maximal_pair_count(free: u32, reserve: u32) -> u128 {
    if free < reserve {
        return 0;
    }
    binomial(free, reserve).saturating_mul(1u128 << (free - reserve).min(127))
}

/// Number of all quantified pairs above a pair with `free` unclaimed labels.
pub fn quantified_pair_count(free: u32, reserve: u32) -> u128 {
    if free < reserve {
        return 0;
    }
    (0..=free - reserve)
        .map(|j| binomial(free, j).saturating_mul(1u128 << j.min(127)))
        .fold(0u128, u128::saturating_add)
}

pub const DEFAULT_PAIR_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub struct GoodnessConfig {
    /// Largest number of maximal pairs a single check may scan.
    pub pair_cap: u128,
    /// Record a witness for every maximal pair of a good verdict.
    pub retain_witnesses: bool,
    pub exec: Exec,
}

impl Default for GoodnessConfig {
    fn default() -> Self {
        GoodnessConfig {
            pair_cap: DEFAULT_PAIR_CAP,
            retain_witnesses: false,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleScope {
    /// Least among all quantified pairs.
    All,
    /// Least among the maximal pairs; the full scan was over the cap.
    Maximal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub b: FinSet,
    #[serde(rename = "B")]
    pub big_b: FinSet,
    pub c: FinSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessVerdict {
    pub good: bool,
    /// No pair is quantified: fewer than `reserve` labels are free.
    pub vacuous: bool,
    pub counterexample: Option<AnchoredPair>,
    pub counterexample_scope: Option<CounterexampleScope>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub extension_map: Option<Vec<Extension>>,
    pub maximal_pairs: u64,
}

struct Prepared {
    a: u64,
    big_a: u64,
    free: u64,
    entries: Vec<(u64, Color)>,
}

fn prepare(
    coloring: &PairColoring,
    p: &AnchoredPair,
    f: &PartialColoring,
    win: &Window,
) -> Result<Prepared> {
    if coloring.mask_width() < win.width() {
        return Err(Error::pre(format!(
            "coloring table covers width {}, window needs {}",
            coloring.mask_width(),
            win.width()
        )));
    }
    let big_a = win.mask_of(&p.ground, "ground")?;
    let a = win.mask_of(&p.part, "part")?;
    if !f.base().is_subset(&p.part) {
        return Err(Error::pre(format!(
            "coloring base {} is not a subset of {}",
            f.base(),
            p.part
        )));
    }
    let entries = f
        .mask_entries()
        .ok_or_else(|| Error::pre("coloring domain outside the window"))?;
    Ok(Prepared {
        a,
        big_a,
        free: win.mask() & !big_a,
        entries,
    })
}

#[inline]
fn correct(coloring: &PairColoring, entries: &[(u64, Color)], c: u64) -> bool {
    entries.iter().all(|&(x, col)| coloring.eval_mask(x, c) == col)
}

pub fn is_good_bounded(
    coloring: &PairColoring,
    p: &AnchoredPair,
    f: &PartialColoring,
    win: &Window,
) -> Result<GoodnessVerdict> {
    is_good_bounded_with(coloring, p, f, win, &GoodnessConfig::default())
}

pub fn is_good_bounded_with(
    coloring: &PairColoring,
    p: &AnchoredPair,
    f: &PartialColoring,
    win: &Window,
    cfg: &GoodnessConfig,
) -> Result<GoodnessVerdict> {
    let prep = prepare(coloring, p, f, win)?;
    let n = prep.free.count_ones();
    let r = win.reserve();
    let count = maximal_pair_count(n, r);
    if count > cfg.pair_cap {
        return Err(Error::cap("maximal quantified pairs", count, cfg.pair_cap));
    }
    let mut verdict = GoodnessVerdict {
        good: true,
        vacuous: n < r,
        counterexample: None,
        counterexample_scope: None,
        extension_map: None,
        maximal_pairs: count as u64,
    };
    if verdict.vacuous {
        if cfg.retain_witnesses {
            verdict.extension_map = Some(Vec::new());
        }
        return Ok(verdict);
    }

    // maximal grounds in set order
    let mut reserved: Vec<u64> = combinations(prep.free, r as usize);
    reserved.sort_by(|&x, &y| mask_cmp(prep.big_a | (prep.free & !x), prep.big_a | (prep.free & !y)));
    let entries = &prep.entries;
    let witness_for = |b: u64, exts: &[u64]| -> Option<u64> {
        exts.iter().map(|&s| b | s).find(|&c| correct(coloring, entries, c))
    };
    let failing = cfg.exec.find_first(0..reserved.len() as u64, |i| {
        let rmask = reserved[i as usize];
        let open = prep.free & !rmask;
        let exts: Vec<u64> = submasks_ordered(rmask).into_iter().skip(1).collect();
        let mut least: Option<u64> = None;
        for u in submasks(open) {
            let b = prep.a | u;
            if witness_for(b, &exts).is_none() {
                let drop = open & !u;
                if least.is_none_or(|d| mask_cmp(drop, d) == Ordering::Less) {
                    least = Some(drop);
                }
            }
        }
        least.map(|drop| (prep.a | (open & !drop), prep.big_a | open))
    });

    if let Some((b, big_b)) = failing {
        verdict.good = false;
        let full = quantified_pair_count(n, r);
        let (pair, scope) = if n <= 16 && full <= cfg.pair_cap {
            let least = least_counterexample(coloring, &prep, r, cfg.exec)
                .expect("a maximal counterexample implies a least one");
            (least, CounterexampleScope::All)
        } else {
            ((b, big_b), CounterexampleScope::Maximal)
        };
        verdict.counterexample = Some(AnchoredPair {
            part: FinSet::from_mask(pair.0),
            ground: FinSet::from_mask(pair.1),
        });
        verdict.counterexample_scope = Some(scope);
        return Ok(verdict);
    }

    if cfg.retain_witnesses {
        let per_ground = cfg.exec.map_slice(&reserved, |&rmask| {
            let open = prep.free & !rmask;
            let big_b = prep.big_a | open;
            let exts: Vec<u64> = submasks_ordered(rmask).into_iter().skip(1).collect();
            let drops = submasks_ordered(open);
            let mut out = Vec::with_capacity(drops.len());
            for drop in drops {
                let b = prep.a | (open & !drop);
                let c = witness_for(b, &exts).expect("verdict is good");
                out.push(Extension {
                    b: FinSet::from_mask(b),
                    big_b: FinSet::from_mask(big_b),
                    c: FinSet::from_mask(c),
                });
            }
            out
        });
        verdict.extension_map = Some(per_ground.into_iter().flatten().collect());
    }
    Ok(verdict)
}

/// Least quantified `(b, B)` in enumeration order (grounds in set order,
/// then parts by the set order of what they leave out of `B ∖ A`) without a
/// correct proper extension.
fn least_counterexample(
    coloring: &PairColoring,
    prep: &Prepared,
    reserve: u32,
    exec: Exec,
) -> Option<(u64, u64)> {
    let n = prep.free.count_ones() as usize;
    let mut grounds = Vec::new();
    for j in 0..=n - reserve as usize {
        grounds.extend(combinations(prep.free, j));
    }
    exec.find_first(0..grounds.len() as u64, |i| {
        let t = grounds[i as usize];
        let outside = prep.free & !t;
        let exts: Vec<u64> = submasks_ordered(outside).into_iter().skip(1).collect();
        submasks_ordered(t).into_iter().find_map(|drop| {
            let b = prep.a | (t & !drop);
            let ok = exts
                .iter()
                .any(|&s| correct(coloring, &prep.entries, b | s));
            (!ok).then_some((b, prep.big_a | t))
        })
    })
}

/// Direct search for an `f`-correct proper `B`-extension of `b` inside the
/// window; the least one in set order.
pub fn find_extension(
    coloring: &PairColoring,
    f: &PartialColoring,
    b: &FinSet,
    big_b: &FinSet,
    win: &Window,
) -> Result<Option<FinSet>> {
    let bm = win.mask_of(b, "part")?;
    let big = win.mask_of(big_b, "ground")?;
    let entries = f
        .mask_entries()
        .ok_or_else(|| Error::pre("coloring domain outside the window"))?;
    let outside = win.mask() & !big;
    Ok(submasks_ordered(outside)
        .into_iter()
        .skip(1)
        .map(|s| bm | s)
        .find(|&c| correct(coloring, &entries, c))
        .map(FinSet::from_mask))
}

/// Precomputed candidate profiles for one anchored pair, so that goodness
/// can be decided for many partial colorings of `a` at once.
///
/// Each maximal pair contributes a group of candidate extensions; a
/// candidate's profile holds, per color, the bitset of subsets `x ⊆ a`
/// (indexed by rank inside `a`) with `F(x, c)` of that color. A coloring `f`
/// is accepted when every group has a candidate whose profile contains `f`.
#[derive(Clone, Debug)]
pub struct GoodnessProfile {
    part: u64,
    k: usize,
    vacuous: bool,
    groups: Vec<Vec<u64>>,
}

impl GoodnessProfile {
    pub const MAX_PART: u32 = 6;

    pub fn prepare(coloring: &PairColoring, p: &AnchoredPair, win: &Window) -> Result<Self> {
        Self::prepare_with(coloring, p, win, &GoodnessConfig::default())
    }

    pub fn prepare_with(
        coloring: &PairColoring,
        p: &AnchoredPair,
        win: &Window,
        cfg: &GoodnessConfig,
    ) -> Result<Self> {
        if p.part.len() > Self::MAX_PART as usize {
            return Err(Error::SizeLimit {
                what: "profiled part".into(),
                size: p.part.len(),
                limit: Self::MAX_PART as usize,
            });
        }
        let empty = PartialColoring::empty(FinSet::empty());
        let prep = prepare(coloring, p, &empty, win)?;
        let n = prep.free.count_ones();
        let r = win.reserve();
        let count = maximal_pair_count(n, r);
        if count > cfg.pair_cap {
            return Err(Error::cap("maximal quantified pairs", count, cfg.pair_cap));
        }
        let k = coloring.k() as usize;
        let xs = submasks(prep.a);
        let mut groups = Vec::new();
        if n >= r {
            for rmask in combinations(prep.free, r as usize) {
                let open = prep.free & !rmask;
                let exts = submasks(rmask);
                for u in submasks(open) {
                    let b = prep.a | u;
                    let mut group: Vec<u64> = Vec::with_capacity(k * (exts.len() - 1));
                    for &s in &exts[1..] {
                        let c = b | s;
                        let start = group.len();
                        group.resize(start + k, 0);
                        for (rank, &x) in xs.iter().enumerate() {
                            let col = coloring.eval_mask(x, c).0 as usize;
                            group[start + col - 1] |= 1 << rank;
                        }
                    }
                    let mut cands: Vec<&[u64]> = group.chunks(k).collect();
                    cands.sort_unstable();
                    cands.dedup();
                    groups.push(cands.concat());
                }
            }
        }
        groups.sort_unstable();
        groups.dedup();
        Ok(GoodnessProfile {
            part: prep.a,
            k,
            vacuous: n < r,
            groups,
        })
    }

    pub fn is_vacuous(&self) -> bool {
        self.vacuous
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Rank of `x ⊆ a` among the submasks of `a` (ascending numerically).
    pub fn rank(&self, x: u64) -> u32 {
        let mut rank = 0;
        for (i, bit) in MaskBits(self.part).enumerate() {
            if x >> bit & 1 == 1 {
                rank |= 1 << i;
            }
        }
        rank
    }

    /// `f_bits[col − 1]` is the set of ranks `x` with `f(x) = col`.
    pub fn accepts_bits(&self, f_bits: &[u64]) -> bool {
        let k = self.k;
        self.groups.iter().all(|g| {
            g.chunks_exact(k)
                .any(|cand| cand.iter().zip(f_bits).all(|(&c, &f)| f & !c == 0))
        })
    }

    pub fn accepts(&self, f: &PartialColoring) -> Result<bool> {
        let mut bits = vec![0u64; self.k];
        for (x, col) in f.iter() {
            let m = x.to_mask().filter(|m| m & !self.part == 0).ok_or_else(|| {
                Error::pre(format!("domain point {x} is not inside the profiled part"))
            })?;
            if col.0 as usize > self.k {
                return Err(Error::invalid(format!("color {col} exceeds k = {}", self.k)));
            }
            bits[col.0 as usize - 1] |= 1 << self.rank(m);
        }
        Ok(self.accepts_bits(&bits))
    }
}
