//! Finite sets of labels and the orders built on them.
//!
//! [`FinSet`] is the element type of `[A]^{<ω}`: a canonical (strictly
//! increasing) list of labels. Sets are ordered by cardinality first and then
//! lexicographically, which is the enumeration order used everywhere in the
//! crate (subset streams, choice rules, least counterexamples).
//!
//! [`AnchoredPair`] is a pair `(a, A)` with `a ⊆ A`, where the finite `A`
//! stands in for an at most countable ground set. [`pair_le`] is the order
//! `(a, A) ≤ (b, B)`: `A ⊆ B` and `b` is an `A`-extension of `a`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A ground-set element. Labels are plain naturals; no bound is imposed.
pub type Label = u32;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FinSet(Vec<Label>);

impl FinSet {
    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    /// Builds a set from labels that are already strictly increasing.
    pub fn from_sorted(labels: Vec<Label>) -> Result<Self> {
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "set {labels:?} is not strictly increasing"
            )));
        }
        Ok(FinSet(labels))
    }

    /// `{0, 1, …, n−1}`.
    pub fn prefix(n: u32) -> Self {
        FinSet((0..n).collect())
    }

    pub fn singleton(label: Label) -> Self {
        FinSet(vec![label])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Label> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.0.binary_search(&label).is_ok()
    }

    pub fn max(&self) -> Option<Label> {
        self.0.last().copied()
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for x in &self.0 {
            for y in it.by_ref() {
                match y.cmp(x) {
                    Ordering::Less => continue,
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn is_proper_subset(&self, other: &FinSet) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    pub fn is_disjoint(&self, other: &FinSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn union(&self, other: &FinSet) -> FinSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        FinSet(out)
    }

    pub fn intersection(&self, other: &FinSet) -> FinSet {
        FinSet(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &FinSet) -> FinSet {
        FinSet(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn with(&self, label: Label) -> FinSet {
        self.union(&FinSet::singleton(label))
    }

    /// The set as a bitmask, if every label is below 64.
    pub fn to_mask(&self) -> Option<u64> {
        self.iter()
            .try_fold(0u64, |m, x| (x < 64).then(|| m | (1u64 << x)))
    }

    pub fn from_mask(mask: u64) -> FinSet {
        FinSet(MaskBits(mask).collect())
    }

    /// The first `n` labels of the set in ascending order.
    pub fn first(&self, n: usize) -> FinSet {
        FinSet(self.0[..n.min(self.len())].to_vec())
    }
}

/// Cardinality first, then lexicographic on the sorted labels.
impl Ord for FinSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for FinSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for FinSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<Label>::deserialize(d)?;
        FinSet::from_sorted(labels).map_err(serde::de::Error::custom)
    }
}

impl FromIterator<Label> for FinSet {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        canonicalize(iter.into_iter().collect())
    }
}

/// Iterates the set bits of a mask, lowest first.
#[derive(Clone, Copy, Debug)]
pub struct MaskBits(pub u64);

impl Iterator for MaskBits {
    type Item = Label;

    fn next(&mut self) -> Option<Label> {
        if self.0 == 0 {
            return None;
        }
        let bit = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(bit)
    }
}

/// Sorts and deduplicates.
pub fn canonicalize(mut labels: Vec<Label>) -> FinSet {
    labels.sort_unstable();
    labels.dedup();
    FinSet(labels)
}

pub fn is_proper_subset(x: &FinSet, y: &FinSet) -> bool {
    x.is_proper_subset(y)
}

/// `b` is an `A`-extension of `a`: `a ⊆ b` and `b ∩ A = a`; with `proper`
/// additionally `a ⊂ b`.
pub fn is_a_extension(a: &FinSet, big_a: &FinSet, b: &FinSet, proper: bool) -> Result<bool> {
    if !a.is_subset(big_a) {
        return Err(Error::invalid(format!("{a} is not a subset of {big_a}")));
    }
    Ok(extends(a, big_a, b) && (!proper || a.len() < b.len()))
}

fn extends(a: &FinSet, big_a: &FinSet, b: &FinSet) -> bool {
    a.is_subset(b) && b.intersection(big_a) == *a
}

/// A finite part together with the (finite surrogate of the) countable set it
/// lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AnchoredPair {
    pub part: FinSet,
    pub ground: FinSet,
}

impl AnchoredPair {
    pub fn new(part: FinSet, ground: FinSet) -> Result<Self> {
        if !part.is_subset(&ground) {
            return Err(Error::invalid(format!(
                "anchored pair part {part} is not a subset of its ground {ground}"
            )));
        }
        Ok(AnchoredPair { part, ground })
    }

    /// `(a, a)`.
    pub fn tight(part: FinSet) -> Self {
        AnchoredPair {
            ground: part.clone(),
            part,
        }
    }
}

impl fmt::Display for AnchoredPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.part, self.ground)
    }
}

impl<'de> Deserialize<'de> for AnchoredPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            part: FinSet,
            ground: FinSet,
        }
        let raw = Raw::deserialize(d)?;
        AnchoredPair::new(raw.part, raw.ground).map_err(serde::de::Error::custom)
    }
}

/// `(a, A) ≤ (b, B)`: `A ⊆ B` and `b` is an `A`-extension of `a`.
pub fn pair_le(p: &AnchoredPair, q: &AnchoredPair) -> bool {
    p.ground.is_subset(&q.ground) && extends(&p.part, &p.ground, &q.part)
}

/// Outcome of a dominance check: either every target has a superset in the
/// family, or some target has none.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CofinalityReport {
    pub cofinal: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_map: Option<Vec<(FinSet, FinSet)>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<FinSet>,
}

/// Checks that every target is a subset of some member of `family`. The
/// witness for each target is the first dominating member in family order.
pub fn dominates(family: &[FinSet], targets: &[FinSet]) -> CofinalityReport {
    let mut witnesses = Vec::with_capacity(targets.len());
    for x in targets {
        match family.iter().find(|y| x.is_subset(y)) {
            Some(y) => witnesses.push((x.clone(), y.clone())),
            None => {
                return CofinalityReport {
                    cofinal: false,
                    witness_map: None,
                    counterexample: Some(x.clone()),
                }
            }
        }
    }
    CofinalityReport {
        cofinal: true,
        witness_map: Some(witnesses),
        counterexample: None,
    }
}

/// All subsets of `set` in (cardinality, lexicographic) order.
pub fn subsets(set: &FinSet) -> Subsets<'_> {
    Subsets {
        base: set.labels(),
        picks: Vec::new(),
        done: false,
    }
}

pub struct Subsets<'a> {
    base: &'a [Label],
    picks: Vec<usize>,
    done: bool,
}

impl Iterator for Subsets<'_> {
    type Item = FinSet;

    fn next(&mut self) -> Option<FinSet> {
        if self.done {
            return None;
        }
        let out = FinSet(self.picks.iter().map(|&i| self.base[i]).collect());
        let n = self.base.len();
        let k = self.picks.len();
        // advance to the next combination of the same size, else grow
        let mut i = k;
        loop {
            if i == 0 {
                if k == n {
                    self.done = true;
                } else {
                    self.picks = (0..k + 1).collect();
                }
                break;
            }
            i -= 1;
            if self.picks[i] < n - (k - i) {
                self.picks[i] += 1;
                for j in i + 1..k {
                    self.picks[j] = self.picks[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Row-major bit matrix used for the strict order of a [`FinPoset`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn or_row_into(&mut self, src: usize, dst: usize) {
        let w = self.words;
        for k in 0..w {
            let v = self.bits[src * w + k];
            self.bits[dst * w + k] |= v;
        }
    }

    fn ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(k, &w)| {
            MaskBits(w).map(move |b| k * 64 + b as usize)
        })
    }
}

/// A finite strict partial order over opaque node identifiers. The relation
/// is stored transitively closed, so comparability queries are O(1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinPoset {
    ids: Vec<u32>,
    lt: BitMatrix,
}

impl FinPoset {
    /// Builds the poset from a generating set of strict relations `(i, j)`,
    /// meaning `i < j`, given by node identifier. The closure must stay
    /// irreflexive.
    pub fn from_generators(ids: Vec<u32>, generators: &[(u32, u32)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, &id) in ids.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(Error::invalid(format!("duplicate poset element {id}")));
            }
        }
        let n = ids.len();
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in generators {
            let ia = *index
                .get(&a)
                .ok_or_else(|| Error::invalid(format!("unknown poset element {a}")))?;
            let ib = *index
                .get(&b)
                .ok_or_else(|| Error::invalid(format!("unknown poset element {b}")))?;
            succ[ia].push(ib);
        }
        let mut lt = BitMatrix::new(n);
        for start in 0..n {
            let mut stack: Vec<usize> = succ[start].clone();
            while let Some(v) = stack.pop() {
                if !lt.get(start, v) {
                    lt.set(start, v);
                    stack.extend(succ[v].iter().copied());
                }
            }
            if lt.get(start, start) {
                return Err(Error::invalid(format!(
                    "relation has a cycle through element {}",
                    ids[start]
                )));
            }
        }
        Ok(FinPoset { ids, lt })
    }

    /// Builds the poset on nodes `0..n` from an order predicate that is
    /// already a strict partial order (trusted; checked in debug builds).
    pub fn from_order_fn(n: usize, less: impl Fn(usize, usize) -> bool) -> Self {
        let mut lt = BitMatrix::new(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && less(i, j) {
                    lt.set(i, j);
                }
            }
        }
        let poset = FinPoset {
            ids: (0..n as u32).collect(),
            lt,
        };
        debug_assert!(n > 128 || poset.is_transitive());
        poset
    }

    /// Transitive closure by row propagation; used when the generator count
    /// is large relative to `n`.
    pub fn closed_from_relation(ids: Vec<u32>, rel: &[(usize, usize)]) -> Result<Self> {
        let n = ids.len();
        let mut lt = BitMatrix::new(n);
        for &(i, j) in rel {
            lt.set(i, j);
        }
        // Warshall on bit rows
        for k in 0..n {
            for i in 0..n {
                if lt.get(i, k) {
                    lt.or_row_into(k, i);
                }
            }
        }
        if (0..n).any(|i| lt.get(i, i)) {
            return Err(Error::invalid("relation has a cycle"));
        }
        Ok(FinPoset { ids, lt })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> u32 {
        self.ids[i]
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// Strict order by node index.
    #[inline]
    pub fn less(&self, i: usize, j: usize) -> bool {
        self.lt.get(i, j)
    }

    #[inline]
    pub fn le(&self, i: usize, j: usize) -> bool {
        i == j || self.lt.get(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.less(i, j) || self.less(j, i)
    }

    /// Indices strictly above `i`.
    pub fn above(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.lt.ones(i)
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.lt.row(i).iter().all(|&w| w == 0))
            .collect()
    }

    /// Every two elements have a common upper bound.
    pub fn is_directed(&self) -> bool {
        (0..self.len()).all(|i| {
            (0..self.len()).all(|j| (0..self.len()).any(|u| self.le(i, u) && self.le(j, u)))
        })
    }

    fn is_transitive(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| !self.less(i, j) || (0..n).all(|k| !self.less(j, k) || self.less(i, k)))
        })
    }

    /// All strict relations `(i, j)` by identifier.
    pub fn relation(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in self.above(i) {
                out.push((self.ids[i], self.ids[j]));
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetRepr {
    elements: Vec<u32>,
    lt: Vec<(u32, u32)>,
}

impl Serialize for FinPoset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PosetRepr {
            elements: self.ids.clone(),
            lt: self.relation(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinPoset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PosetRepr::deserialize(d)?;
        FinPoset::from_generators(repr.elements, &repr.lt).map_err(serde::de::Error::custom)
    }
}
