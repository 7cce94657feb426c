//! Sweeps over colorings of the inclusion pairs of `P({0..w−1})`.
//!
//! Every finite directed poset has a maximum, which alone is cofinal and
//! vacuously homogeneous, so the arrow is trivial on a finite window. The
//! knobs make the search informative: `interior` chooses which elements must
//! be dominated and `min_chain` demands a chain of that length inside the
//! homogeneous set. Reports describe search outcomes under those knobs only.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::{Color, Table};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::FinPoset;
use crate::oracle::search::{search_cofinal_homogeneous, HomogeneousHit, SEARCH_LIMIT};
use crate::SCHEMA_VERSION;

/// Largest coloring count swept exhaustively, and largest sample size.
pub const SWEEP_LIMIT: u128 = 1 << 20;
pub const SWEEP_GENERATOR: &str = "ChaCha8Rng/stream-per-sample";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepMode {
    Exhaustive,
    Sampled { seed: u64, samples: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interior {
    #[default]
    All,
    /// Elements with at most this many labels.
    MaxSize(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepKnobs {
    pub interior: Interior,
    pub min_chain: usize,
}

impl Default for SweepKnobs {
    fn default() -> Self {
        SweepKnobs {
            interior: Interior::All,
            min_chain: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCount {
    /// Size of the least hit, `None` when no set qualifies.
    pub size: Option<usize>,
    pub color: Option<Color>,
    pub chain: Option<usize>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub window: u32,
    pub k: u8,
    pub pair_count: u64,
    pub mode: SweepMode,
    pub generator: Option<String>,
    pub knobs: SweepKnobs,
    pub coloring_count: u64,
    pub outcomes: Vec<OutcomeCount>,
    pub semantics: String,
}

type Key = (Option<usize>, Option<u8>, Option<usize>);

fn key(hit: &Option<HomogeneousHit>) -> Key {
    match hit {
        Some(h) => (Some(h.members.len()), Some(h.color.0), Some(h.chain)),
        None => (None, None, None),
    }
}

fn merge(mut a: BTreeMap<Key, u64>, b: BTreeMap<Key, u64>) -> BTreeMap<Key, u64> {
    for (k, n) in b {
        *a.entry(k).or_default() += n;
    }
    a
}

/// The window poset: element `i` is the set with mask `i`.
pub fn window_poset(width: u32) -> FinPoset {
    FinPoset::from_order_fn(1 << width, |i, j| i != j && i & j == i)
}

pub fn sweep_colorings(
    width: u32,
    k: u8,
    mode: SweepMode,
    knobs: SweepKnobs,
    exec: Exec,
) -> Result<SweepReport> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    let n = 1usize << width.min(31);
    if width > 4 || n > SEARCH_LIMIT {
        return Err(Error::SizeLimit {
            what: format!("P({{0..{}}})", width as i64 - 1),
            size: n,
            limit: SEARCH_LIMIT,
        });
    }
    let pairs = Table::pairs(width);
    let p = pairs.len();
    let mut index = vec![usize::MAX; n * n];
    for (i, &(x, y)) in pairs.iter().enumerate() {
        index[x as usize * n + y as usize] = i;
    }
    let poset = window_poset(width);
    let interior: Vec<usize> = (0..n)
        .filter(|&i| match knobs.interior {
            Interior::All => true,
            Interior::MaxSize(j) => (i as u32).count_ones() <= j,
        })
        .collect();
    let run = |digits: &[u8]| -> Result<Option<HomogeneousHit>> {
        let color = |i: usize, j: usize| Color(digits[index[i * n + j]]);
        search_cofinal_homogeneous(&poset, k, &color, &interior, knobs.min_chain)
    };

    let (count, generator, hist) = match mode {
        SweepMode::Exhaustive => {
            let total = (k as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
            if total > SWEEP_LIMIT {
                return Err(Error::cap(
                    format!("colorings of {p} pairs with {k} colors"),
                    total,
                    SWEEP_LIMIT,
                ));
            }
            let hist = exec.fold(
                0..total as u64,
                || Ok(BTreeMap::new()),
                |acc: Result<BTreeMap<Key, u64>>, idx| {
                    let mut acc = acc?;
                    // first pair is the most significant digit
                    let mut digits = vec![0u8; p];
                    let mut rest = idx;
                    for d in digits.iter_mut().rev() {
                        *d = (rest % k as u64) as u8 + 1;
                        rest /= k as u64;
                    }
                    *acc.entry(key(&run(&digits)?)).or_default() += 1;
                    Ok(acc)
                },
                |a, b| Ok(merge(a?, b?)),
            )?;
            (total as u64, None, hist)
        }
        SweepMode::Sampled { seed, samples } => {
            if samples as u128 > SWEEP_LIMIT {
                return Err(Error::cap("sample count", samples as u128, SWEEP_LIMIT));
            }
            let hist = exec.fold(
                0..samples,
                || Ok(BTreeMap::new()),
                |acc: Result<BTreeMap<Key, u64>>, idx| {
                    let mut acc = acc?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(idx);
                    let digits: Vec<u8> = (0..p).map(|_| rng.random_range(1..=k)).collect();
                    *acc.entry(key(&run(&digits)?)).or_default() += 1;
                    Ok(acc)
                },
                |a, b| Ok(merge(a?, b?)),
            )?;
            (samples, Some(SWEEP_GENERATOR.to_string()), hist)
        }
    };

    Ok(SweepReport {
        schema: SCHEMA_VERSION.to_string(),
        window: width,
        k,
        pair_count: p as u64,
        mode,
        generator,
        knobs,
        coloring_count: count,
        outcomes: hist
            .into_iter()
            .map(|((size, color, chain), count)| OutcomeCount {
                size,
                color: color.map(Color),
                chain,
                count,
            })
            .collect(),
        semantics: "least subset (by size, color, index order) of the window poset that \
                    dominates the interior, is homogeneous on comparable pairs, and holds a \
                    chain of at least min_chain elements; a finite search outcome, not a \
                    partition-relation check"
            .to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_one() {
        let r = sweep_colorings(1, 2, SweepMode::Exhaustive, SweepKnobs::default(), Exec::Sequential)
            .unwrap();
        assert_eq!(r.coloring_count, 2);
        assert_eq!(
            r.outcomes,
            vec![OutcomeCount {
                size: Some(1),
                color: Some(Color(1)),
                chain: Some(1),
                count: 2
            }]
        );
    }

    #[test]
    fn explosion_guard() {
        assert!(matches!(
            sweep_colorings(4, 2, SweepMode::Exhaustive, SweepKnobs::default(), Exec::Sequential),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            sweep_colorings(5, 2, SweepMode::Exhaustive, SweepKnobs::default(), Exec::Sequential),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn sampled_is_reproducible() {
        let mode = SweepMode::Sampled {
            seed: 7,
            samples: 200,
        };
        let knobs = SweepKnobs {
            interior: Interior::All,
            min_chain: 3,
        };
        let a = sweep_colorings(3, 2, mode, knobs, Exec::Sequential).unwrap();
        let b = sweep_colorings(3, 2, mode, knobs, Exec::Parallel).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.outcomes.iter().map(|o| o.count).sum::<u64>(), 200);
    }
}
