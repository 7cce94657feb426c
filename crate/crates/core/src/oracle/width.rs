//! Finite-character diagnostics: a cofinal subset in which every member has
//! few predecessors.
//!
//! Generated posets come with levels, and a subset counts as cofinal only if
//! it is cofinal in every level prefix; a plain [`FinPoset`] is one level.
//! Any subset cofinal in a finite prefix contains that prefix's maximal
//! elements, so the union of the prefix maxima is the least cofinal subset and
//! the exact search can only confirm it. Every finite poset passes for a
//! large enough bound; the interesting output is how `max_preds` grows with
//! depth.

use serde::{Deserialize, Serialize};

use crate::construction::goodness::combinations;
use crate::error::{Error, Result};
use crate::lattice::{FinPoset, FinSet};

pub const PREFIX_LIMIT: usize = 1 << 14;
pub const EXACT_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Generator {
    /// Finite subsets of the naturals; `x` sits at level `max(x) + 1`, `∅` at 1.
    SubsetLattice,
    /// `0 < 1 < … < ω₀ < ω₁ < …`; `i` and `ωᵢ` sit at level `i + 1`.
    OrdinalSum,
    /// Componentwise order; level is the larger component level.
    Product(Box<Generator>, Box<Generator>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratedPoset {
    pub generator: Generator,
    pub depth: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Set(u64),
    Nat(u32),
    Omega(u32),
    Pair(Box<Node>, Box<Node>),
}

impl Node {
    fn name(&self) -> String {
        match self {
            Node::Set(m) => FinSet::from_mask(*m).to_string(),
            Node::Nat(i) => i.to_string(),
            Node::Omega(i) => format!("w{i}"),
            Node::Pair(a, b) => format!("({},{})", a.name(), b.name()),
        }
    }

    fn level(&self) -> u32 {
        match self {
            Node::Set(m) => 64 - m.leading_zeros().min(63),
            Node::Nat(i) | Node::Omega(i) => i + 1,
            Node::Pair(a, b) => a.level().max(b.level()),
        }
    }

    fn le(&self, other: &Node) -> bool {
        match (self, other) {
            (Node::Set(x), Node::Set(y)) => x & y == *x,
            (Node::Nat(i), Node::Nat(j)) | (Node::Omega(i), Node::Omega(j)) => i <= j,
            (Node::Nat(_), Node::Omega(_)) => true,
            (Node::Omega(_), Node::Nat(_)) => false,
            (Node::Pair(a, b), Node::Pair(c, d)) => a.le(c) && b.le(d),
            _ => false,
        }
    }
}

fn prefix(generator: &Generator, depth: u32) -> Result<Vec<Node>> {
    let too_big = |size: usize| Error::SizeLimit {
        what: format!("depth-{depth} prefix"),
        size,
        limit: PREFIX_LIMIT,
    };
    match generator {
        Generator::SubsetLattice => {
            if depth > 14 {
                return Err(too_big(1usize << depth.min(40)));
            }
            Ok((0..1u64 << depth).map(Node::Set).collect())
        }
        Generator::OrdinalSum => {
            if 2 * depth as usize > PREFIX_LIMIT {
                return Err(too_big(2 * depth as usize));
            }
            Ok((0..depth)
                .map(Node::Nat)
                .chain((0..depth).map(Node::Omega))
                .collect())
        }
        Generator::Product(l, r) => {
            let left = prefix(l, depth)?;
            let right = prefix(r, depth)?;
            let size = left.len().saturating_mul(right.len());
            if size > PREFIX_LIMIT {
                return Err(too_big(size));
            }
            let mut out = Vec::with_capacity(size);
            for a in &left {
                for b in &right {
                    out.push(Node::Pair(Box::new(a.clone()), Box::new(b.clone())));
                }
            }
            Ok(out)
        }
    }
}

/// A finite poset whose elements carry levels and display names.
#[derive(Clone, Debug)]
pub struct LeveledPoset {
    pub poset: FinPoset,
    pub levels: Vec<u32>,
    pub names: Vec<String>,
}

impl LeveledPoset {
    pub fn flat(poset: FinPoset) -> Result<Self> {
        if poset.len() > PREFIX_LIMIT {
            return Err(Error::SizeLimit {
                what: "poset".into(),
                size: poset.len(),
                limit: PREFIX_LIMIT,
            });
        }
        let names = poset.ids().iter().map(|id| id.to_string()).collect();
        Ok(LeveledPoset {
            levels: vec![1; poset.len()],
            names,
            poset,
        })
    }

    pub fn generate(g: &GeneratedPoset) -> Result<Self> {
        let nodes = prefix(&g.generator, g.depth)?;
        let poset = FinPoset::from_order_fn(nodes.len(), |i, j| i != j && nodes[i].le(&nodes[j]));
        Ok(LeveledPoset {
            poset,
            levels: nodes.iter().map(Node::level).collect(),
            names: nodes.iter().map(Node::name).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    fn distinct_levels(&self) -> Vec<u32> {
        let mut l = self.levels.clone();
        l.sort_unstable();
        l.dedup();
        l
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CofinalChoice {
    pub members: Vec<usize>,
    pub names: Vec<String>,
    pub max_preds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthReport {
    pub size: usize,
    pub levels: usize,
    pub bound: usize,
    pub greedy: CofinalChoice,
    pub exact: Option<CofinalChoice>,
    pub pass: bool,
}

fn max_preds(s: &FinPoset, members: &[usize]) -> usize {
    members
        .iter()
        .map(|&x| members.iter().filter(|&&y| s.less(y, x)).count())
        .max()
        .unwrap_or(0)
}

fn choice(s: &LeveledPoset, members: Vec<usize>) -> CofinalChoice {
    CofinalChoice {
        names: members.iter().map(|&i| s.names[i].clone()).collect(),
        max_preds: max_preds(&s.poset, &members),
        members,
    }
}

/// Union over levels `t` of the maximal elements of the level-`≤ t` prefix.
pub fn greedy_cofinal(s: &LeveledPoset) -> Vec<usize> {
    let mut keep = vec![false; s.len()];
    for t in s.distinct_levels() {
        for (i, kept) in keep.iter_mut().enumerate() {
            if s.levels[i] <= t && !*kept && s.poset.above(i).all(|j| s.levels[j] > t) {
                *kept = true;
            }
        }
    }
    (0..s.len()).filter(|&i| keep[i]).collect()
}

/// Exhaustive minimum of `max_preds` over levelwise-cofinal subsets; ties go
/// to the smaller, then lexicographically first, subset.
pub fn exact_cofinal(s: &LeveledPoset) -> Result<Vec<usize>> {
    let n = s.len();
    if n > EXACT_LIMIT {
        return Err(Error::SizeLimit {
            what: "exact cofinal search".into(),
            size: n,
            limit: EXACT_LIMIT,
        });
    }
    let mut down = vec![0u32; n];
    let mut below = vec![0u32; n];
    for i in 0..n {
        down[i] |= 1 << i;
        for j in s.poset.above(i) {
            down[j] |= 1 << i;
            below[j] |= 1 << i;
        }
    }
    let levels = s.distinct_levels();
    let prefix: Vec<u32> = levels
        .iter()
        .map(|&t| (0..n).filter(|&i| s.levels[i] <= t).fold(0, |m, i| m | 1 << i))
        .collect();
    let all = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let mut best: Option<(usize, u32)> = None;
    for size in 0..=n {
        for h in combinations(all, size) {
            let h = h as u32;
            let cofinal = prefix.iter().all(|&p| {
                let mut cover = 0u32;
                let mut rest = h & p;
                while rest != 0 {
                    cover |= down[rest.trailing_zeros() as usize];
                    rest &= rest - 1;
                }
                p & !cover == 0
            });
            if !cofinal {
                continue;
            }
            let mut worst = 0usize;
            let mut rest = h;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                worst = worst.max((below[i] & h).count_ones() as usize);
                rest &= rest - 1;
            }
            if best.is_none_or(|(b, _)| worst < b) {
                best = Some((worst, h));
            }
        }
    }
    let (_, h) = best.expect("the whole poset is cofinal");
    Ok((0..n).filter(|&i| h >> i & 1 == 1).collect())
}

pub fn char_width(s: &LeveledPoset, bound: usize, exact: bool) -> Result<WidthReport> {
    let greedy = choice(s, greedy_cofinal(s));
    let exact = if exact {
        Some(choice(s, exact_cofinal(s)?))
    } else {
        None
    };
    let best = exact.as_ref().map_or(greedy.max_preds, |e| e.max_preds);
    Ok(WidthReport {
        size: s.len(),
        levels: s.distinct_levels().len(),
        bound,
        pass: best <= bound,
        greedy,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_lattice_of_two_flat() {
        let s = LeveledPoset::flat(FinPoset::from_order_fn(4, |i, j| i != j && i & j == i)).unwrap();
        let r = char_width(&s, 0, true).unwrap();
        assert_eq!(r.greedy.members, vec![3]);
        assert_eq!(r.greedy.max_preds, 0);
        assert_eq!(r.exact.unwrap().members, vec![3]);
        assert!(r.pass);
    }

    #[test]
    fn antichain_over_bottom() {
        let s = LeveledPoset::flat(FinPoset::from_order_fn(6, |i, j| i == 0 && j > 0)).unwrap();
        let r = char_width(&s, 0, true).unwrap();
        assert_eq!(r.greedy.members, vec![1, 2, 3, 4, 5]);
        assert_eq!(r.greedy.max_preds, 0);
    }

    #[test]
    fn subset_lattice_levels_form_a_chain() {
        let g = GeneratedPoset {
            generator: Generator::SubsetLattice,
            depth: 4,
        };
        let s = LeveledPoset::generate(&g).unwrap();
        let r = char_width(&s, 2, true).unwrap();
        assert_eq!(r.greedy.names, vec!["{0}", "{0,1}", "{0,1,2}", "{0,1,2,3}"]);
        assert_eq!(r.greedy.max_preds, 3);
        assert_eq!(r.exact.unwrap().max_preds, 3);
        assert!(!r.pass);
    }

    #[test]
    fn generator_json() {
        let g: GeneratedPoset =
            serde_json::from_str(r#"{"generator":{"PRODUCT":["SUBSET_LATTICE","ORDINAL_SUM"]},"depth":2}"#)
                .unwrap();
        let s = LeveledPoset::generate(&g).unwrap();
        assert_eq!(s.len(), 16);
        let big = GeneratedPoset {
            generator: Generator::SubsetLattice,
            depth: 15,
        };
        assert!(matches!(LeveledPoset::generate(&big), Err(Error::SizeLimit { .. })));
    }
}
