//! Least cofinal-homogeneous subset of a small poset.
//!
//! Candidates are visited by size, then color, then lexicographically by
//! element index, so the returned set is the first hit in that order.

use serde::{Deserialize, Serialize};

use crate::coloring::Color;
use crate::construction::goodness::combinations;
use crate::error::{Error, Result};
use crate::lattice::FinPoset;

pub const SEARCH_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousHit {
    /// Element indices, ascending.
    pub members: Vec<usize>,
    pub color: Color,
    /// Longest `<`-chain inside `members`.
    pub chain: usize,
}

/// A poset with a coloring of its comparable pairs, flattened into masks.
struct Prepared {
    n: usize,
    /// `down[i]`: elements `≤ i`.
    down: Vec<u32>,
    /// `below[i]`: elements `< i`.
    below: Vec<u32>,
    /// `off[c][i]`: elements comparable to `i` whose pair color is not `c`.
    off: Vec<Vec<u32>>,
    topo: Vec<usize>,
}

impl Prepared {
    fn new(s: &FinPoset, k: u8, color: &dyn Fn(usize, usize) -> Color) -> Prepared {
        let n = s.len();
        let mut down = vec![0u32; n];
        let mut below = vec![0u32; n];
        let mut off = vec![vec![0u32; n]; k as usize];
        for i in 0..n {
            down[i] |= 1 << i;
            for j in s.above(i) {
                down[j] |= 1 << i;
                below[j] |= 1 << i;
                let c = color(i, j);
                for (ci, row) in off.iter_mut().enumerate() {
                    if c.0 as usize != ci + 1 {
                        row[i] |= 1 << j;
                        row[j] |= 1 << i;
                    }
                }
            }
        }
        let mut topo: Vec<usize> = (0..n).collect();
        topo.sort_by_key(|&i| below[i].count_ones());
        Prepared {
            n,
            down,
            below,
            off,
            topo,
        }
    }

    fn chain(&self, h: u32) -> usize {
        let mut len = vec![0usize; self.n];
        let mut best = 0;
        // predecessors have strictly fewer elements below, so come first
        for &i in &self.topo {
            if h >> i & 1 == 0 {
                continue;
            }
            let mut preds = self.below[i] & h;
            let mut l = 0;
            while preds != 0 {
                let j = preds.trailing_zeros() as usize;
                l = l.max(len[j]);
                preds &= preds - 1;
            }
            len[i] = l + 1;
            best = best.max(len[i]);
        }
        best
    }
}

pub fn search_cofinal_homogeneous(
    s: &FinPoset,
    k: u8,
    color: &dyn Fn(usize, usize) -> Color,
    interior: &[usize],
    min_chain: usize,
) -> Result<Option<HomogeneousHit>> {
    let n = s.len();
    if n > SEARCH_LIMIT {
        return Err(Error::SizeLimit {
            what: "searched poset".into(),
            size: n,
            limit: SEARCH_LIMIT,
        });
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut need = 0u32;
    for &i in interior {
        if i >= n {
            return Err(Error::invalid(format!("interior element {i} outside the poset")));
        }
        need |= 1 << i;
    }
    let p = Prepared::new(s, k, color);
    let all = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    for size in 0..=n {
        let subsets = combinations(all, size);
        for c in 1..=k {
            let off = &p.off[c as usize - 1];
            for &h in &subsets {
                let h = h as u32;
                let mut covered = 0u32;
                let mut homogeneous = true;
                let mut rest = h;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    covered |= p.down[i];
                    if off[i] & h != 0 {
                        homogeneous = false;
                        break;
                    }
                    rest &= rest - 1;
                }
                if !homogeneous || need & !covered != 0 {
                    continue;
                }
                let chain = p.chain(h);
                if chain >= min_chain {
                    return Ok(Some(HomogeneousHit {
                        members: (0..n).filter(|&i| h >> i & 1 == 1).collect(),
                        color: Color(c),
                        chain,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitCheck {
    pub dominates: bool,
    pub homogeneous: bool,
    pub chain: bool,
}

impl HitCheck {
    pub fn passed(&self) -> bool {
        self.dominates && self.homogeneous && self.chain
    }
}

/// Re-checks the three clauses straight from the order relation.
pub fn check_hit(
    s: &FinPoset,
    color: &dyn Fn(usize, usize) -> Color,
    interior: &[usize],
    min_chain: usize,
    hit: &HomogeneousHit,
) -> HitCheck {
    let h = &hit.members;
    let dominates = interior.iter().all(|&x| h.iter().any(|&y| s.le(x, y)));
    let homogeneous = h.iter().all(|&x| {
        h.iter()
            .all(|&y| !s.less(x, y) || color(x, y) == hit.color)
    });
    // longest chain by repeated relaxation; |h| ≤ 24
    let mut len = vec![1usize; h.len()];
    for _ in 0..h.len() {
        for (a, &x) in h.iter().enumerate() {
            for (b, &y) in h.iter().enumerate() {
                if s.less(y, x) {
                    len[a] = len[a].max(len[b] + 1);
                }
            }
        }
    }
    let longest = len.into_iter().max().unwrap_or(0);
    HitCheck {
        dominates,
        homogeneous,
        chain: longest >= min_chain && longest == hit.chain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> FinPoset {
        FinPoset::from_order_fn(3, |i, j| i < j)
    }

    #[test]
    fn maximum_dominates_vacuously() {
        let s = chain3();
        let hit = search_cofinal_homogeneous(&s, 2, &|_, _| Color(2), &[0, 1, 2], 1)
            .unwrap()
            .unwrap();
        assert_eq!(hit.members, vec![2]);
        assert_eq!(hit.color, Color(1));
        assert_eq!(hit.chain, 1);
    }

    #[test]
    fn chain_of_two_in_color_one() {
        let s = chain3();
        let f = |i: usize, j: usize| if (i, j) == (0, 2) { Color(2) } else { Color(1) };
        let hit = search_cofinal_homogeneous(&s, 2, &f, &[0, 1, 2], 2)
            .unwrap()
            .unwrap();
        assert_eq!(hit.members, vec![1, 2]);
        assert_eq!(hit.color, Color(1));
        assert_eq!(hit.chain, 2);
        assert!(check_hit(&s, &f, &[0, 1, 2], 2, &hit).passed());
    }

    #[test]
    fn antichain_has_no_long_chain() {
        let s = FinPoset::from_order_fn(2, |_, _| false);
        assert_eq!(
            search_cofinal_homogeneous(&s, 2, &|_, _| Color(1), &[0, 1], 2).unwrap(),
            None
        );
    }

    #[test]
    fn size_limit() {
        let s = FinPoset::from_order_fn(25, |i, j| i < j);
        assert!(matches!(
            search_cofinal_homogeneous(&s, 2, &|_, _| Color(1), &[], 1),
            Err(Error::SizeLimit { .. })
        ));
    }
}
