//! Pair colorings `F` on inclusion pairs `x ⊂ y`, and partial / total
//! colorings of a single finite set.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{subsets, FinSet};

/// A color index, `1 ≤ index ≤ k`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Color(pub u8);

impl Color {
    pub const ONE: Color = Color(1);
    pub const TWO: Color = Color(2);

    pub fn index(self) -> u8 {
        self.0
    }

    fn check(self, k: u8) -> Result<Color> {
        if self.0 == 0 || self.0 > k {
            return Err(Error::invalid(format!("color {} outside 1..={k}", self.0)));
        }
        Ok(self)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Built-in deterministic colorings. With `k` colors each rule reduces its
/// statistic modulo `k`; for `k = 2` color 1 means "even".
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Rule {
    /// Always color 1.
    Const1,
    /// `|y ∖ x|`.
    Parity,
    /// `|y|`.
    TopSize,
    /// `max(y) − max(x ∪ {−1})`.
    MaxGap,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::Const1, Rule::Parity, Rule::TopSize, Rule::MaxGap];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Const1 => "CONST1",
            Rule::Parity => "PARITY",
            Rule::TopSize => "TOPSIZE",
            Rule::MaxGap => "MAXGAP",
        }
    }

    pub fn from_name(name: &str) -> Result<Rule> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == name)
            .ok_or_else(|| Error::UnknownRule(name.to_string()))
    }

    #[inline]
    fn apply(self, k: u8, x_len: u32, x_max: i64, y_len: u32, y_max: i64) -> Color {
        let stat: u64 = match self {
            Rule::Const1 => 0,
            Rule::Parity => u64::from(y_len - x_len),
            Rule::TopSize => u64::from(y_len),
            Rule::MaxGap => (y_max - x_max) as u64,
        };
        Color(1 + (stat % u64::from(k)) as u8)
    }
}

/// Explicit coloring of every inclusion pair inside `P({0..width−1})`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Table {
    width: u32,
    /// Indexed by `(x_mask << width) | y_mask`; 0 marks a non-pair.
    colors: Vec<u8>,
}

impl Table {
    pub const MAX_WIDTH: u32 = 10;

    /// Number of inclusion pairs `x ⊂ y` inside a window: `3^w − 2^w`.
    pub fn pair_count(width: u32) -> u64 {
        3u64.pow(width) - 2u64.pow(width)
    }

    /// All inclusion pairs `x ⊂ y` of the window as masks, ordered by `y`
    /// then `x`.
    pub fn pairs(width: u32) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(Self::pair_count(width) as usize);
        for y in 0..1u64 << width {
            // proper submasks of y, ascending
            let mut x = 0u64;
            loop {
                if x != y {
                    out.push((x, y));
                }
                if x == y {
                    break;
                }
                x = (x.wrapping_sub(y)) & y;
            }
        }
        out
    }

    /// Table whose `i`-th pair (in [`Table::pairs`] order) gets `colors[i]`.
    pub fn from_pair_colors(width: u32, colors: &[u8]) -> Result<Table> {
        if width > Self::MAX_WIDTH {
            return Err(Error::invalid(format!(
                "table window {width} exceeds {}",
                Self::MAX_WIDTH
            )));
        }
        let pairs = Self::pairs(width);
        if pairs.len() != colors.len() {
            return Err(Error::invalid(format!(
                "table for width {width} needs {} colors, got {}",
                pairs.len(),
                colors.len()
            )));
        }
        let mut table = vec![0u8; 1usize << (2 * width)];
        for (&(x, y), &c) in pairs.iter().zip(colors) {
            table[((x << width) | y) as usize] = c;
        }
        Ok(Table {
            width,
            colors: table,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    fn get(&self, x: u64, y: u64) -> u8 {
        self.colors[((x << self.width) | y) as usize]
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Backing {
    Rule(Rule),
    Table(Table),
    /// Explicit colors on some pairs, `default` everywhere else.
    Constraints {
        map: HashMap<(FinSet, FinSet), Color>,
        default: Color,
    },
}

/// A total, deterministic `k`-coloring of inclusion pairs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairColoring {
    k: u8,
    backing: Backing,
}

impl PairColoring {
    pub fn rule(rule: Rule, k: u8) -> Result<Self> {
        check_k(k)?;
        Ok(PairColoring {
            k,
            backing: Backing::Rule(rule),
        })
    }

    pub fn table(k: u8, table: Table) -> Result<Self> {
        check_k(k)?;
        if let Some(&c) = table.colors.iter().find(|&&c| c > k) {
            return Err(Error::invalid(format!("table color {c} outside 1..={k}")));
        }
        Ok(PairColoring {
            k,
            backing: Backing::Table(table),
        })
    }

    /// Constraint map plus default; duplicate keys are a conflict.
    pub fn constraints(
        k: u8,
        entries: impl IntoIterator<Item = (FinSet, FinSet, Color)>,
        default: Color,
    ) -> Result<Self> {
        check_k(k)?;
        default.check(k)?;
        let mut map = HashMap::new();
        for (x, y, c) in entries {
            c.check(k)?;
            if !x.is_proper_subset(&y) {
                return Err(Error::NotProperSubset { x, y });
            }
            if let Some(prev) = map.insert((x.clone(), y.clone()), c) {
                return Err(Error::ConstraintConflict {
                    x,
                    y,
                    c1: prev.0,
                    c2: c.0,
                });
            }
        }
        Ok(PairColoring {
            k,
            backing: Backing::Constraints { map, default },
        })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn backing(&self) -> &Backing {
        &self.backing
    }

    /// Largest window (labels `0..w`) on which [`PairColoring::eval_mask`]
    /// is defined.
    pub fn mask_width(&self) -> u32 {
        match &self.backing {
            Backing::Table(t) => t.width,
            _ => 64,
        }
    }

    /// The color of `(x, y)`; requires `x ⊂ y`.
    pub fn eval(&self, x: &FinSet, y: &FinSet) -> Result<Color> {
        if !x.is_proper_subset(y) {
            return Err(Error::NotProperSubset {
                x: x.clone(),
                y: y.clone(),
            });
        }
        Ok(match &self.backing {
            Backing::Rule(rule) => rule.apply(
                self.k,
                x.len() as u32,
                x.max().map_or(-1, i64::from),
                y.len() as u32,
                y.max().map_or(-1, i64::from),
            ),
            Backing::Table(t) => match (x.to_mask(), y.to_mask()) {
                (Some(xm), Some(ym)) if ym >> t.width == 0 => Color(t.get(xm, ym)),
                _ => {
                    return Err(Error::OutOfDomain {
                        x: x.clone(),
                        y: y.clone(),
                        width: t.width,
                    })
                }
            },
            Backing::Constraints { map, default } => {
                // avoid cloning the key on the hot path
                map.get(&(x.clone(), y.clone())).copied().unwrap_or(*default)
            }
        })
    }

    /// Unchecked evaluation on bitmasks: the caller guarantees `x ⊂ y` and
    /// that `y` lies inside [`PairColoring::mask_width`].
    #[inline]
    pub fn eval_mask(&self, x: u64, y: u64) -> Color {
        debug_assert!(x & !y == 0 && x != y);
        match &self.backing {
            Backing::Rule(rule) => rule.apply(
                self.k,
                x.count_ones(),
                mask_max(x),
                y.count_ones(),
                mask_max(y),
            ),
            Backing::Table(t) => Color(t.get(x, y)),
            Backing::Constraints { map, default } => map
                .get(&(FinSet::from_mask(x), FinSet::from_mask(y)))
                .copied()
                .unwrap_or(*default),
        }
    }
}

#[inline]
fn mask_max(m: u64) -> i64 {
    if m == 0 {
        -1
    } else {
        63 - i64::from(m.leading_zeros())
    }
}

fn check_k(k: u8) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("a coloring needs at least one color"));
    }
    Ok(())
}

type PairEntry = (FinSet, FinSet, Color);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairColoringRepr {
    k: u8,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    table: Option<Vec<PairEntry>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    window: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    constraints: Option<Vec<PairEntry>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    default: Option<Color>,
}

impl PairColoringRepr {
    fn into_coloring(self) -> Result<PairColoring> {
        match (self.rule, self.table, self.constraints) {
            (Some(rule), None, None) => {
                if self.window.is_some() || self.default.is_some() {
                    return Err(Error::invalid("rule colorings take no window or default"));
                }
                PairColoring::rule(Rule::from_name(&rule)?, self.k)
            }
            (None, Some(entries), None) => {
                let width = self
                    .window
                    .ok_or_else(|| Error::invalid("table coloring needs \"window\""))?;
                if width > Table::MAX_WIDTH {
                    return Err(Error::invalid(format!(
                        "window: {width} exceeds {}",
                        Table::MAX_WIDTH
                    )));
                }
                let mut colors = vec![0u8; 1usize << (2 * width)];
                for (i, (x, y, c)) in entries.into_iter().enumerate() {
                    c.check(self.k)
                        .map_err(|e| Error::invalid(format!("table[{i}]: {e}")))?;
                    if !x.is_proper_subset(&y) {
                        return Err(Error::invalid(format!(
                            "table[{i}]: {x} is not a proper subset of {y}"
                        )));
                    }
                    let (Some(xm), Some(ym)) = (x.to_mask(), y.to_mask()) else {
                        return Err(Error::invalid(format!("table[{i}]: outside window")));
                    };
                    if ym >> width != 0 {
                        return Err(Error::invalid(format!(
                            "table[{i}]: {y} outside window {width}"
                        )));
                    }
                    let slot = &mut colors[((xm << width) | ym) as usize];
                    if *slot != 0 {
                        return Err(Error::invalid(format!("table[{i}]: duplicate pair")));
                    }
                    *slot = c.0;
                }
                let missing = Table::pairs(width)
                    .into_iter()
                    .find(|&(x, y)| colors[((x << width) | y) as usize] == 0);
                if let Some((x, y)) = missing {
                    return Err(Error::invalid(format!(
                        "table: pair ({}, {}) is not colored",
                        FinSet::from_mask(x),
                        FinSet::from_mask(y)
                    )));
                }
                PairColoring::table(self.k, Table { width, colors })
            }
            (None, None, Some(entries)) => {
                let default = self.default.unwrap_or(Color::ONE);
                if self.window.is_some() {
                    return Err(Error::invalid("constraint colorings take no window"));
                }
                PairColoring::constraints(self.k, entries, default)
            }
            _ => Err(Error::invalid(
                "a pair coloring needs exactly one of \"rule\", \"table\", \"constraints\"",
            )),
        }
    }
}

impl Serialize for PairColoring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut repr = PairColoringRepr {
            k: self.k,
            rule: None,
            table: None,
            window: None,
            constraints: None,
            default: None,
        };
        match &self.backing {
            Backing::Rule(rule) => repr.rule = Some(rule.name().to_string()),
            Backing::Table(t) => {
                repr.window = Some(t.width);
                repr.table = Some(
                    Table::pairs(t.width)
                        .into_iter()
                        .map(|(x, y)| {
                            (FinSet::from_mask(x), FinSet::from_mask(y), Color(t.get(x, y)))
                        })
                        .collect(),
                );
            }
            Backing::Constraints { map, default } => {
                let mut entries: Vec<PairEntry> = map
                    .iter()
                    .map(|((x, y), c)| (x.clone(), y.clone(), *c))
                    .collect();
                entries.sort();
                repr.constraints = Some(entries);
                repr.default = Some(*default);
            }
        }
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PairColoring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PairColoringRepr::deserialize(d)?
            .into_coloring()
            .map_err(serde::de::Error::custom)
    }
}

/// A function from some subsets of `base` to colors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartialColoring {
    base: FinSet,
    map: BTreeMap<FinSet, Color>,
}

impl PartialColoring {
    pub fn empty(base: FinSet) -> Self {
        PartialColoring {
            base,
            map: BTreeMap::new(),
        }
    }

    pub fn new(base: FinSet, entries: impl IntoIterator<Item = (FinSet, Color)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, c) in entries {
            if c.0 == 0 {
                return Err(Error::invalid("color 0 is not a color"));
            }
            if !x.is_subset(&base) {
                return Err(Error::invalid(format!(
                    "domain point {x} is not a subset of base {base}"
                )));
            }
            if map.insert(x.clone(), c).is_some() {
                return Err(Error::invalid(format!("domain point {x} listed twice")));
            }
        }
        Ok(PartialColoring { base, map })
    }

    pub fn base(&self) -> &FinSet {
        &self.base
    }

    pub fn get(&self, x: &FinSet) -> Option<Color> {
        self.map.get(x).copied()
    }

    /// Entries in set order.
    pub fn iter(&self) -> impl Iterator<Item = (&FinSet, Color)> {
        self.map.iter().map(|(x, &c)| (x, c))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn max_color(&self) -> u8 {
        self.map.values().map(|c| c.0).max().unwrap_or(0)
    }

    /// Every entry of `self` appears in `other` with the same color.
    pub fn is_submap_of(&self, other: &PartialColoring) -> bool {
        self.map.iter().all(|(x, c)| other.map.get(x) == Some(c))
    }

    /// Same entries viewed as a coloring of a larger base.
    pub fn rebase(&self, base: FinSet) -> Result<PartialColoring> {
        PartialColoring::new(base, self.iter().map(|(x, c)| (x.clone(), c)))
    }

    pub fn without(&self, x: &FinSet) -> PartialColoring {
        let mut out = self.clone();
        out.map.remove(x);
        out
    }

    pub fn with(&self, x: FinSet, c: Color) -> Result<PartialColoring> {
        let mut entries: Vec<(FinSet, Color)> = self
            .iter()
            .filter(|(y, _)| **y != x)
            .map(|(y, c)| (y.clone(), c))
            .collect();
        entries.push((x, c));
        PartialColoring::new(self.base.clone(), entries)
    }

    /// Entries as `(mask, color)` when every label is below 64.
    pub fn mask_entries(&self) -> Option<Vec<(u64, Color)>> {
        self.iter().map(|(x, c)| Some((x.to_mask()?, c))).collect()
    }
}

type ColoringEntry = (FinSet, Color);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialRepr {
    base: FinSet,
    map: Vec<ColoringEntry>,
}

impl Serialize for PartialColoring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PartialRepr {
            base: self.base.clone(),
            map: self.iter().map(|(x, c)| (x.clone(), c)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialColoring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PartialRepr::deserialize(d)?;
        PartialColoring::new(repr.base, repr.map).map_err(serde::de::Error::custom)
    }
}

/// A partial coloring defined on every subset of its base.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(transparent)]
pub struct TotalColoring(PartialColoring);

impl TotalColoring {
    pub fn new(coloring: PartialColoring) -> Result<Self> {
        let n = coloring.base.len();
        if n >= 64 || coloring.len() as u64 != 1u64 << n {
            return Err(Error::invalid(format!(
                "total coloring of {} must cover all {} subsets, covers {}",
                coloring.base,
                if n < 64 { 1u64 << n } else { u64::MAX },
                coloring.len()
            )));
        }
        Ok(TotalColoring(coloring))
    }

    pub fn as_partial(&self) -> &PartialColoring {
        &self.0
    }

    pub fn into_partial(self) -> PartialColoring {
        self.0
    }

    pub fn base(&self) -> &FinSet {
        &self.0.base
    }

    /// Total, so every subset of the base has a color.
    pub fn get(&self, x: &FinSet) -> Option<Color> {
        self.0.get(x)
    }

    pub fn extends(&self, f: &PartialColoring) -> bool {
        f.is_submap_of(&self.0)
    }
}

impl<'de> Deserialize<'de> for TotalColoring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let partial = PartialColoring::deserialize(d)?;
        TotalColoring::new(partial).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Correctness {
    pub correct: bool,
    /// Least domain point whose pair with `b` has the wrong color.
    pub violation: Option<FinSet>,
}

/// `b` is `f`-correct: `F(x, b) = f(x)` for every `x ∈ dom(f)`.
pub fn is_f_correct(coloring: &PairColoring, f: &PartialColoring, b: &FinSet) -> Result<Correctness> {
    if !f.base().is_proper_subset(b) {
        return Err(Error::pre(format!(
            "coloring base {} is not a proper subset of {b}",
            f.base()
        )));
    }
    for (x, c) in f.iter() {
        if coloring.eval(x, b)? != c {
            return Ok(Correctness {
                correct: false,
                violation: Some(x.clone()),
            });
        }
    }
    Ok(Correctness {
        correct: true,
        violation: None,
    })
}

/// `g(x) = F(x, c)` for every `x ⊆ b`; requires `b ⊂ c`.
pub fn induced_total_coloring(
    coloring: &PairColoring,
    b: &FinSet,
    c: &FinSet,
) -> Result<TotalColoring> {
    if !b.is_proper_subset(c) {
        return Err(Error::pre(format!("{b} is not a proper subset of {c}")));
    }
    if b.len() >= 32 {
        return Err(Error::cap("total coloring size", 1u128 << b.len(), 1 << 31));
    }
    let entries = subsets(b)
        .map(|x| {
            let col = coloring.eval(&x, c)?;
            Ok((x, col))
        })
        .collect::<Result<Vec<_>>>()?;
    TotalColoring::new(PartialColoring::new(b.clone(), entries)?)
}

/// Default bound on `|b|` for [`enumerate_total_colorings`].
pub const DEFAULT_ENUMERATION_CAP: usize = 4;

/// Streams all `k^(2^|b|)` total colorings of `b`. Subsets are ordered by
/// (size, elements) and colorings lexicographically with the first subset
/// most significant.
pub fn enumerate_total_colorings(b: &FinSet, k: u8, cap: usize) -> Result<TotalColorings> {
    if b.len() > cap {
        return Err(Error::cap(
            format!("total colorings of a {}-element set", b.len()),
            b.len() as u128,
            cap as u128,
        ));
    }
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let domain: Vec<FinSet> = subsets(b).collect();
    Ok(TotalColorings {
        base: b.clone(),
        digits: vec![0; domain.len()],
        domain,
        k,
        done: false,
    })
}

pub struct TotalColorings {
    base: FinSet,
    domain: Vec<FinSet>,
    digits: Vec<u8>,
    k: u8,
    done: bool,
}

impl Iterator for TotalColorings {
    type Item = TotalColoring;

    fn next(&mut self) -> Option<TotalColoring> {
        if self.done {
            return None;
        }
        let map = self
            .domain
            .iter()
            .zip(&self.digits)
            .map(|(x, &d)| (x.clone(), Color(d + 1)))
            .collect();
        let out = TotalColoring(PartialColoring {
            base: self.base.clone(),
            map,
        });
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.k {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

/// `f^H_a` on a finite family `H`, plus the domain points left out because no
/// member of `H` lies above them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedColoring {
    pub coloring: PartialColoring,
    pub unwitnessed: Vec<FinSet>,
}

/// `f^H_a(x)` = the color of `(x, y)` for any `y ∈ H` above `x`, for each
/// `x ∈ H` with `x ⊂ a`. Disagreeing witnesses are an error.
pub fn derive_f_h_a(
    coloring: &PairColoring,
    family: &[FinSet],
    a: &FinSet,
) -> Result<DerivedColoring> {
    let mut sorted: Vec<&FinSet> = family.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut entries = Vec::new();
    let mut unwitnessed = Vec::new();
    for x in sorted.iter().filter(|x| x.is_proper_subset(a)) {
        let mut first: Option<(&FinSet, Color)> = None;
        for y in sorted.iter().filter(|y| x.is_proper_subset(y)) {
            let c = coloring.eval(x, y)?;
            match first {
                None => first = Some((y, c)),
                Some((y1, c1)) if c1 != c => {
                    return Err(Error::WitnessDisagreement {
                        x: (*x).clone(),
                        y1: y1.clone(),
                        c1: c1.0,
                        y2: (*y).clone(),
                        c2: c.0,
                    })
                }
                _ => {}
            }
        }
        match first {
            Some((_, c)) => entries.push(((*x).clone(), c)),
            None => unwitnessed.push((*x).clone()),
        }
    }
    Ok(DerivedColoring {
        coloring: PartialColoring::new(a.clone(), entries)?,
        unwitnessed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Label;

    fn s(v: &[Label]) -> FinSet {
        FinSet::from_sorted(v.to_vec()).unwrap()
    }

    fn parity() -> PairColoring {
        PairColoring::rule(Rule::Parity, 2).unwrap()
    }

    fn const1() -> PairColoring {
        PairColoring::rule(Rule::Const1, 2).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = parity();
        assert_eq!(f.eval(&s(&[]), &s(&[1, 2])).unwrap(), Color(1));
        assert_eq!(f.eval(&s(&[1]), &s(&[1, 2])).unwrap(), Color(2));
        assert!(matches!(
            f.eval(&s(&[1]), &s(&[1])),
            Err(Error::NotProperSubset { .. })
        ));
    }

    #[test]
    fn rules_match_their_definitions() {
        let top = PairColoring::rule(Rule::TopSize, 2).unwrap();
        assert_eq!(top.eval(&s(&[]), &s(&[4, 5])).unwrap(), Color(1));
        assert_eq!(top.eval(&s(&[4]), &s(&[4, 5, 6])).unwrap(), Color(2));
        let gap = PairColoring::rule(Rule::MaxGap, 2).unwrap();
        // max({}) counts as -1
        assert_eq!(gap.eval(&s(&[]), &s(&[0])).unwrap(), Color(2));
        assert_eq!(gap.eval(&s(&[]), &s(&[1])).unwrap(), Color(1));
        assert_eq!(gap.eval(&s(&[2]), &s(&[2, 4])).unwrap(), Color(1));
        assert_eq!(gap.eval(&s(&[1]), &s(&[1, 4])).unwrap(), Color(2));
        assert_eq!(gap.eval(&s(&[0]), &s(&[0, 2, 7])).unwrap(), Color(2));
        let gap3 = PairColoring::rule(Rule::MaxGap, 3).unwrap();
        assert_eq!(gap3.eval(&s(&[0]), &s(&[0, 2, 7])).unwrap(), Color(2));
    }

    #[test]
    fn mask_eval_agrees_with_set_eval() {
        for rule in Rule::ALL {
            for k in [2u8, 3] {
                let f = PairColoring::rule(rule, k).unwrap();
                for (x, y) in Table::pairs(4) {
                    let (xs, ys) = (FinSet::from_mask(x), FinSet::from_mask(y));
                    assert_eq!(f.eval_mask(x, y), f.eval(&xs, &ys).unwrap());
                }
            }
        }
    }

    #[test]
    fn table_rejects_out_of_window() {
        let n = Table::pair_count(2) as usize;
        let t = Table::from_pair_colors(2, &vec![1; n]).unwrap();
        let f = PairColoring::table(2, t).unwrap();
        assert_eq!(f.eval(&s(&[]), &s(&[0, 1])).unwrap(), Color(1));
        assert!(matches!(
            f.eval(&s(&[]), &s(&[2])),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn pair_coloring_json_forms() {
        let f: PairColoring = serde_json::from_str(r#"{"k":2,"rule":"PARITY"}"#).unwrap();
        assert_eq!(f, parity());
        let err = serde_json::from_str::<PairColoring>(r#"{"k":2,"rule":"NOPE"}"#).unwrap_err();
        assert!(err.to_string().contains("unknown rule"));

        let table = r#"{"k":2,"window":1,"table":[[[],[0],2]]}"#;
        let f: PairColoring = serde_json::from_str(table).unwrap();
        assert_eq!(f.eval(&s(&[]), &s(&[0])).unwrap(), Color(2));
        let again: PairColoring =
            serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(again, f);
        // missing pair
        assert!(serde_json::from_str::<PairColoring>(r#"{"k":2,"window":1,"table":[]}"#).is_err());

        let cons = r#"{"k":2,"constraints":[[[1],[0,1,2,3],1],[[2],[0,1,2,3],2]],"default":1}"#;
        let f: PairColoring = serde_json::from_str(cons).unwrap();
        assert_eq!(f.eval(&s(&[2]), &s(&[0, 1, 2, 3])).unwrap(), Color(2));
        assert_eq!(f.eval(&s(&[]), &s(&[0, 3])).unwrap(), Color(1));
        let dup = r#"{"k":2,"constraints":[[[1],[1,2],1],[[1],[1,2],2]]}"#;
        let err = serde_json::from_str::<PairColoring>(dup).unwrap_err();
        assert!(err.to_string().contains("conflicting"));
    }

    #[test]
    fn partial_coloring_json_requires_canonical_base() {
        let err = serde_json::from_str::<PartialColoring>(r#"{"base":[2,1],"map":[[[1],2]]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("strictly increasing"));
        let ok: PartialColoring =
            serde_json::from_str(r#"{"base":[1,2],"map":[[[1],2]]}"#).unwrap();
        assert_eq!(ok.get(&s(&[1])), Some(Color(2)));
        assert!(serde_json::from_str::<PartialColoring>(r#"{"base":[1],"map":[[[3],2]]}"#).is_err());
    }

    #[test]
    fn f_correct_examples() {
        let f = PartialColoring::new(s(&[1]), [(s(&[1]), Color(2))]).unwrap();
        let ok = is_f_correct(&parity(), &f, &s(&[1, 2])).unwrap();
        assert!(ok.correct);
        let bad = is_f_correct(&parity(), &f, &s(&[1, 2, 3])).unwrap();
        assert!(!bad.correct);
        assert_eq!(bad.violation, Some(s(&[1])));
        let empty = PartialColoring::empty(s(&[1]));
        assert!(is_f_correct(&parity(), &empty, &s(&[1, 5])).unwrap().correct);
        assert!(is_f_correct(&parity(), &empty, &s(&[1])).is_err());
    }

    #[test]
    fn induced_coloring_examples() {
        let g = induced_total_coloring(&parity(), &s(&[1]), &s(&[1, 2])).unwrap();
        assert_eq!(g.get(&s(&[])), Some(Color(1)));
        assert_eq!(g.get(&s(&[1])), Some(Color(2)));
        let g = induced_total_coloring(&const1(), &s(&[0, 2]), &s(&[0, 1, 2])).unwrap();
        assert!(g.as_partial().iter().all(|(_, c)| c == Color(1)));
        let g = induced_total_coloring(&parity(), &s(&[]), &s(&[7])).unwrap();
        assert_eq!(g.get(&s(&[])), Some(Color(2)));
        assert!(induced_total_coloring(&parity(), &s(&[1]), &s(&[1])).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let all: Vec<_> = enumerate_total_colorings(&s(&[]), 2, 4).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].get(&s(&[])), Some(Color(1)));
        assert_eq!(all[1].get(&s(&[])), Some(Color(2)));
        assert_eq!(enumerate_total_colorings(&s(&[5]), 2, 4).unwrap().count(), 4);
        assert!(matches!(
            enumerate_total_colorings(&s(&[0, 1, 2, 3, 4]), 2, 4),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_counts_and_distinct() {
        for (b, k) in [(s(&[]), 3u8), (s(&[0]), 3), (s(&[0, 1]), 2), (s(&[3, 4]), 3)] {
            let all: Vec<_> = enumerate_total_colorings(&b, k, 4).unwrap().collect();
            let expect = (k as usize).pow(1 << b.len());
            assert_eq!(all.len(), expect);
            let mut uniq = all.iter().map(|g| format!("{:?}", g)).collect::<Vec<_>>();
            uniq.sort();
            uniq.dedup();
            assert_eq!(uniq.len(), expect);
        }
    }

    #[test]
    fn induced_coloring_is_correct_for_its_top() {
        // exhaustive over b ⊂ c inside {0..3}
        for rule in Rule::ALL {
            let f = PairColoring::rule(rule, 2).unwrap();
            for (bm, cm) in Table::pairs(4) {
                let (b, c) = (FinSet::from_mask(bm), FinSet::from_mask(cm));
                let g = induced_total_coloring(&f, &b, &c).unwrap();
                assert!(is_f_correct(&f, g.as_partial(), &c).unwrap().correct);
            }
        }
    }

    #[test]
    fn correctness_restricts_to_submaps() {
        let f = parity();
        let b = s(&[0, 1]);
        let c = s(&[0, 1, 3]);
        let g = induced_total_coloring(&f, &b, &c).unwrap();
        for x in subsets(&b) {
            let sub = g.as_partial().without(&x);
            assert!(sub.is_submap_of(g.as_partial()));
            assert!(is_f_correct(&f, &sub, &c).unwrap().correct);
        }
    }

    #[test]
    fn derive_examples() {
        let d = derive_f_h_a(&const1(), &[s(&[0]), s(&[0, 1])], &s(&[0, 2])).unwrap();
        assert_eq!(d.coloring.len(), 1);
        assert_eq!(d.coloring.get(&s(&[0])), Some(Color(1)));

        let d = derive_f_h_a(&parity(), &[], &s(&[4])).unwrap();
        assert!(d.coloring.is_empty());

        // both witnesses above {0} leave an odd remainder
        let d = derive_f_h_a(&parity(), &[s(&[0]), s(&[0, 1]), s(&[0, 1, 2, 3])], &s(&[0, 9]))
            .unwrap();
        assert_eq!(d.coloring.get(&s(&[0])), Some(Color(2)));

        let err = derive_f_h_a(&parity(), &[s(&[0]), s(&[0, 1]), s(&[0, 1, 2])], &s(&[0, 9]))
            .unwrap_err();
        assert_eq!(
            err,
            Error::WitnessDisagreement {
                x: s(&[0]),
                y1: s(&[0, 1]),
                c1: 2,
                y2: s(&[0, 1, 2]),
                c2: 1
            }
        );

        let d = derive_f_h_a(&parity(), &[s(&[0]), s(&[5])], &s(&[0, 2])).unwrap();
        assert!(d.coloring.is_empty());
        assert_eq!(d.unwitnessed, vec![s(&[0])]);
    }
}
