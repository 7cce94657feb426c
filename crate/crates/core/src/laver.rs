//! The adversarial construction: sets `s_α` with `max s_α = α` and a
//! constrained two-coloring under which no registered family `H_β` is
//! homogeneous below the sets it was diagonalized against.
//!
//! For each `α`, `b₀ = a_α ∪ {α}` and positions walk down through `b`: at
//! position `α_i` two fresh members `c_i, d_i` of `H_{α_i}` (least and second
//! least in set order, distinct from every earlier choice for this `α`) are
//! added to `b`, and the next position is the largest label of `b` below
//! `α_i`. Finally `F(c_i, s_α) = 1` and `F(d_i, s_α) = 2`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, PairColoring};
use crate::error::{Error, Result};
use crate::lattice::{FinSet, Label};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    #[serde(rename = "M")]
    pub m: FinSet,
    #[serde(rename = "H")]
    pub h: Vec<FinSet>,
}

/// Enumerations `α ↦ a_α` and `α ↦ (M_α, H_α)` over labels `0..ground_size`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RegistryRepr")]
pub struct Registry {
    pub ground_size: u32,
    pub a: Vec<(Label, FinSet)>,
    pub mh: Vec<(Label, Family)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryRepr {
    ground_size: u32,
    #[serde(default)]
    a: Vec<(Label, FinSet)>,
    #[serde(default)]
    mh: Vec<(Label, Family)>,
}

impl TryFrom<RegistryRepr> for Registry {
    type Error = Error;

    fn try_from(r: RegistryRepr) -> Result<Registry> {
        Registry::new(r.ground_size, r.a, r.mh)
    }
}

impl Registry {
    pub fn new(
        ground_size: u32,
        mut a: Vec<(Label, FinSet)>,
        mut mh: Vec<(Label, Family)>,
    ) -> Result<Self> {
        a.sort_by_key(|(alpha, _)| *alpha);
        mh.sort_by_key(|(alpha, _)| *alpha);
        for (i, (alpha, set)) in a.iter().enumerate() {
            if *alpha >= ground_size {
                return Err(Error::invalid(format!("a[{i}]: label {alpha} ≥ ground_size")));
            }
            if i > 0 && a[i - 1].0 == *alpha {
                return Err(Error::invalid(format!("a: label {alpha} listed twice")));
            }
            if FinSet::max(set).is_some_and(|m| m >= *alpha) {
                return Err(Error::invalid(format!("a[{alpha}] = {set} is not below {alpha}")));
            }
        }
        for (i, (alpha, fam)) in mh.iter_mut().enumerate() {
            if *alpha >= ground_size {
                return Err(Error::invalid(format!("mh[{i}]: label {alpha} ≥ ground_size")));
            }
            if FinSet::max(&fam.m).is_some_and(|m| m >= *alpha) {
                return Err(Error::invalid(format!("M[{alpha}] = {} is not below {alpha}", fam.m)));
            }
            if let Some(x) = fam.h.iter().find(|x| !x.is_subset(&fam.m)) {
                return Err(Error::invalid(format!("H[{alpha}] member {x} is not inside M")));
            }
            let before = fam.h.len();
            fam.h.sort();
            fam.h.dedup();
            if fam.h.len() != before {
                return Err(Error::invalid(format!("H[{alpha}] has repeated members")));
            }
        }
        if let Some(w) = mh.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid(format!("mh: label {} listed twice", w[0].0)));
        }
        Ok(Registry { ground_size, a, mh })
    }

    pub fn a_of(&self, alpha: Label) -> FinSet {
        self.a
            .binary_search_by_key(&alpha, |(l, _)| *l)
            .map(|i| self.a[i].1.clone())
            .unwrap_or_default()
    }

    pub fn family(&self, alpha: Label) -> Option<&Family> {
        self.mh
            .binary_search_by_key(&alpha, |(l, _)| *l)
            .ok()
            .map(|i| &self.mh[i].1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiceRecord {
    pub step: usize,
    pub position: Label,
    /// `|H_position|`.
    pub family: usize,
    /// Members of `H_position` not chosen earlier for this `α`.
    pub available: usize,
    pub c: Option<FinSet>,
    pub d: Option<FinSet>,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaverState {
    pub registry: Registry,
    pub built: Vec<(Label, FinSet)>,
    pub constraints: Vec<(FinSet, FinSet, Color)>,
    pub choice_log: Vec<(Label, Vec<ChoiceRecord>)>,
}

pub fn laver_build(registry: &Registry) -> Result<LaverState> {
    let mut built = Vec::with_capacity(registry.ground_size as usize);
    let mut constraints: HashMap<(FinSet, FinSet), Color> = HashMap::new();
    let mut log = Vec::with_capacity(registry.ground_size as usize);
    for alpha in 0..registry.ground_size {
        let mut b: BTreeSet<Label> = registry.a_of(alpha).iter().collect();
        b.insert(alpha);
        let mut chosen: BTreeSet<FinSet> = BTreeSet::new();
        let mut records = Vec::new();
        let mut picks: Vec<(FinSet, Color)> = Vec::new();
        let mut position = Some(alpha);
        let mut step = 0;
        while let Some(pos) = position {
            let family: &[FinSet] = registry.family(pos).map_or(&[], |f| &f.h);
            // family members are kept in set order
            let mut fresh = family.iter().filter(|x| !chosen.contains(*x));
            let available = family.iter().filter(|x| !chosen.contains(*x)).count();
            let (c, d) = (fresh.next().cloned(), fresh.next().cloned());
            let success = c.is_some() && d.is_some();
            if let (true, Some(c), Some(d)) = (success, &c, &d) {
                b.extend(c.iter());
                b.extend(d.iter());
                chosen.insert(c.clone());
                chosen.insert(d.clone());
                picks.push((c.clone(), Color::ONE));
                picks.push((d.clone(), Color::TWO));
            }
            records.push(ChoiceRecord {
                step,
                position: pos,
                family: family.len(),
                available,
                c: c.filter(|_| success),
                d: d.filter(|_| success),
                success,
            });
            position = b.range(..pos).next_back().copied();
            step += 1;
        }
        let s: FinSet = b.into_iter().collect();
        for (x, color) in picks {
            if let Some(prev) = constraints.insert((x.clone(), s.clone()), color) {
                return Err(Error::ConstraintConflict {
                    x,
                    y: s,
                    c1: prev.0,
                    c2: color.0,
                });
            }
        }
        built.push((alpha, s));
        log.push((alpha, records));
    }
    let mut constraints: Vec<(FinSet, FinSet, Color)> = constraints
        .into_iter()
        .map(|((x, y), c)| (x, y, c))
        .collect();
    constraints.sort();
    Ok(LaverState {
        registry: registry.clone(),
        built,
        constraints,
        choice_log: log,
    })
}

/// The constrained coloring; pairs without a constraint get `default`.
pub fn laver_complete(state: &LaverState, default: Color) -> Result<PairColoring> {
    PairColoring::constraints(2, state.constraints.iter().cloned(), default)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonHomogeneityWitness {
    pub beta: Label,
    pub alpha: Label,
    pub s: FinSet,
    pub c: FinSet,
    pub d: FinSet,
    pub colors: (Color, Color),
}

/// Witnesses against `H_β` from every build whose choice at position `β`
/// succeeded, each re-checked under `coloring`.
pub fn laver_verify(
    state: &LaverState,
    coloring: &PairColoring,
    beta: Label,
) -> Result<Vec<NonHomogeneityWitness>> {
    let family = state
        .registry
        .family(beta)
        .ok_or_else(|| Error::pre(format!("label {beta} has no registered family")))?;
    let mut out = Vec::new();
    for ((alpha, s), (alpha2, records)) in state.built.iter().zip(&state.choice_log) {
        if alpha != alpha2 {
            return Err(Error::VerificationFailure(format!(
                "built set for {alpha} is logged under {alpha2}"
            )));
        }
        if !s.contains(beta) {
            continue;
        }
        for r in records.iter().filter(|r| r.position == beta && r.success) {
            let (Some(c), Some(d)) = (&r.c, &r.d) else {
                return Err(Error::VerificationFailure(format!(
                    "successful choice at {beta} for {alpha} has no sets"
                )));
            };
            let colors = (coloring.eval(c, s)?, coloring.eval(d, s)?);
            let members = family.h.contains(c) && family.h.contains(d);
            if !members || colors != (Color::ONE, Color::TWO) || c == d {
                return Err(Error::VerificationFailure(format!(
                    "witness ({c}, {d}) against {beta} in s_{alpha} = {s} does not re-verify"
                )));
            }
            out.push(NonHomogeneityWitness {
                beta,
                alpha: *alpha,
                s: s.clone(),
                c: c.clone(),
                d: d.clone(),
                colors,
            });
        }
    }
    Ok(out)
}

/// Structural facts about a finished build.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaverAudit {
    /// Pairs constrained twice (with any colors).
    pub conflicts: usize,
    /// Every `s_α` has maximum `α`.
    pub max_is_alpha: bool,
    /// Positions strictly decrease within every build.
    pub positions_decrease: bool,
    /// A position whose family has at least `2(i+1)` members never fails at
    /// step `i`.
    pub rich_choices_succeed: bool,
}

pub fn laver_audit(state: &LaverState) -> LaverAudit {
    let mut seen: BTreeMap<(&FinSet, &FinSet), usize> = BTreeMap::new();
    for (x, y, _) in &state.constraints {
        *seen.entry((x, y)).or_default() += 1;
    }
    LaverAudit {
        conflicts: seen.values().filter(|&&n| n > 1).count(),
        max_is_alpha: state.built.iter().all(|(a, s)| FinSet::max(s) == Some(*a)),
        positions_decrease: state
            .choice_log
            .iter()
            .all(|(_, r)| r.windows(2).all(|w| w[1].position < w[0].position)),
        rich_choices_succeed: state.choice_log.iter().all(|(_, rs)| {
            rs.iter()
                .all(|r| r.success || r.family < 2 * (r.step + 1))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> FinSet {
        FinSet::from_sorted(v.to_vec()).unwrap()
    }

    fn example() -> Registry {
        Registry::new(
            4,
            vec![(3, s(&[0]))],
            vec![
                (
                    3,
                    Family {
                        m: s(&[1, 2]),
                        h: vec![s(&[1]), s(&[2])],
                    },
                ),
                (
                    2,
                    Family {
                        m: s(&[]),
                        h: vec![],
                    },
                ),
            ],
        )
        .unwrap()
    }

    #[test]
    fn four_label_example() {
        let st = laver_build(&example()).unwrap();
        assert_eq!(st.built[3], (3, s(&[0, 1, 2, 3])));
        assert_eq!(
            st.constraints,
            vec![
                (s(&[1]), s(&[0, 1, 2, 3]), Color(1)),
                (s(&[2]), s(&[0, 1, 2, 3]), Color(2)),
            ]
        );
        let log = &st.choice_log[3].1;
        assert!(log[0].success);
        assert_eq!(log[1].position, 2);
        assert!(!log[1].success);

        let f = laver_complete(&st, Color(1)).unwrap();
        assert_eq!(f.eval(&s(&[1]), &s(&[0, 1, 2, 3])).unwrap(), Color(1));
        assert_eq!(f.eval(&s(&[2]), &s(&[0, 1, 2, 3])).unwrap(), Color(2));
        assert_eq!(f.eval(&s(&[]), &s(&[0, 3])).unwrap(), Color(1));

        let w = laver_verify(&st, &f, 3).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!((w[0].c.clone(), w[0].d.clone()), (s(&[1]), s(&[2])));
        assert!(laver_verify(&st, &f, 2).unwrap().is_empty());
        assert!(matches!(laver_verify(&st, &f, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn empty_families_give_plain_sets() {
        let reg = Registry::new(5, vec![(4, s(&[1, 2]))], vec![]).unwrap();
        let st = laver_build(&reg).unwrap();
        assert_eq!(st.built[4].1, s(&[1, 2, 4]));
        assert!(st.constraints.is_empty());
        let reg = Registry::new(3, vec![], vec![]).unwrap();
        let st = laver_build(&reg).unwrap();
        assert!(st.built.iter().all(|(a, s)| *s == FinSet::singleton(*a)));
        let f = laver_complete(&st, Color(2)).unwrap();
        assert_eq!(f.eval(&s(&[]), &s(&[1])).unwrap(), Color(2));
    }

    #[test]
    fn registry_invariants() {
        assert!(Registry::new(4, vec![(2, s(&[2]))], vec![]).is_err());
        assert!(Registry::new(4, vec![(5, s(&[]))], vec![]).is_err());
        let bad = Family {
            m: s(&[0]),
            h: vec![s(&[1])],
        };
        assert!(Registry::new(4, vec![], vec![(3, bad)]).is_err());
        let json = r#"{"ground_size":4,"a":[[3,[0]]],"mh":[[3,{"M":[1,2],"H":[[1],[2]]}]]}"#;
        let reg: Registry = serde_json::from_str(json).unwrap();
        assert_eq!(reg.a_of(3), s(&[0]));
    }

    #[test]
    fn injected_conflict_is_caught() {
        let mut st = laver_build(&example()).unwrap();
        let (x, y, _) = st.constraints[0].clone();
        st.constraints.push((x, y, Color(2)));
        assert!(matches!(
            laver_complete(&st, Color(1)),
            Err(Error::ConstraintConflict { .. })
        ));
        assert_eq!(laver_audit(&st).conflicts, 1);
    }
}
