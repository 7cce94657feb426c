//! End-homogeneous and homogeneous subsequences of ⊂-chains.

use serde::{Deserialize, Deserializer, Serialize};

use crate::coloring::{Color, PairColoring};
use crate::error::{Error, Result};
use crate::lattice::{dominates, subsets, FinSet, Label};

/// A strictly increasing sequence `c₀ ⊂ c₁ ⊂ …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Chain(Vec<FinSet>);

impl Chain {
    pub fn new(sets: Vec<FinSet>) -> Result<Self> {
        if let Some(i) = (1..sets.len()).find(|&i| !sets[i - 1].is_proper_subset(&sets[i])) {
            return Err(Error::invalid(format!(
                "chain[{i}]: {} is not a proper superset of {}",
                sets[i],
                sets[i - 1]
            )));
        }
        Ok(Chain(sets))
    }

    /// `c_i = {0, …, i}` for `i < n`.
    pub fn prefix(n: usize) -> Self {
        Chain((1..=n as u32).map(FinSet::prefix).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sets(&self) -> &[FinSet] {
        &self.0
    }
}

impl<'de> Deserialize<'de> for Chain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Chain::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndHomogeneousCertificate {
    pub subsequence: Vec<FinSet>,
    /// Position of each member in the input chain.
    pub indices: Vec<usize>,
    /// Outgoing color of every member except the last.
    pub end_colors: Vec<Color>,
    /// Pairs `(i, j)` of subsequence positions whose color disagrees with
    /// `end_colors[i]`.
    pub violations: Vec<(usize, usize)>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogeneousCertificate {
    pub members: Vec<FinSet>,
    pub indices: Vec<usize>,
    pub color: Color,
    pub checked_pairs: u64,
    pub verified: bool,
}

/// Greedy splitting: keep the first remaining element, then recurse into the
/// largest color class of its pairs with the rest (ties go to the smaller
/// color).
pub fn extract_end_homogeneous(
    coloring: &PairColoring,
    chain: &Chain,
) -> Result<EndHomogeneousCertificate> {
    let k = coloring.k();
    if k < 2 {
        return Err(Error::pre("end-homogeneous extraction needs k ≥ 2"));
    }
    let sets = chain.sets();
    let mut remaining: Vec<usize> = (0..sets.len()).collect();
    let mut indices = Vec::new();
    let mut end_colors = Vec::new();
    while let Some((&head, rest)) = remaining.split_first() {
        indices.push(head);
        if rest.is_empty() {
            break;
        }
        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); k as usize];
        for &j in rest {
            let c = coloring.eval(&sets[head], &sets[j])?;
            classes[c.0 as usize - 1].push(j);
        }
        let (best, _) = classes
            .iter()
            .enumerate()
            .fold((0, 0), |(bi, bl), (i, cl)| {
                if cl.len() > bl {
                    (i, cl.len())
                } else {
                    (bi, bl)
                }
            });
        end_colors.push(Color(best as u8 + 1));
        remaining = std::mem::take(&mut classes[best]);
    }
    let mut cert = EndHomogeneousCertificate {
        subsequence: indices.iter().map(|&i| sets[i].clone()).collect(),
        indices,
        end_colors,
        violations: Vec::new(),
        verified: false,
    };
    cert.violations = end_homogeneity_violations(coloring, &cert)?;
    cert.verified = cert.violations.is_empty();
    Ok(cert)
}

/// All `(i, j)`, `i < j`, with `F(s_i, s_j) ≠ end_colors[i]`. Structural
/// corruption (length mismatch, non-chain) is an error.
pub fn end_homogeneity_violations(
    coloring: &PairColoring,
    cert: &EndHomogeneousCertificate,
) -> Result<Vec<(usize, usize)>> {
    let s = &cert.subsequence;
    if cert.end_colors.len() != s.len().saturating_sub(1) {
        return Err(Error::VerificationFailure(format!(
            "{} members but {} end colors",
            s.len(),
            cert.end_colors.len()
        )));
    }
    if let Some(i) = (1..s.len()).find(|&i| !s[i - 1].is_proper_subset(&s[i])) {
        return Err(Error::VerificationFailure(format!(
            "subsequence[{i}] does not extend its predecessor"
        )));
    }
    let mut out = Vec::new();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if coloring.eval(&s[i], &s[j])? != cert.end_colors[i] {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

/// The most frequent end color's members plus the final element.
pub fn extract_homogeneous(
    coloring: &PairColoring,
    eh: &EndHomogeneousCertificate,
) -> Result<HomogeneousCertificate> {
    let violations = end_homogeneity_violations(coloring, eh)?;
    if !violations.is_empty() {
        let (i, j) = violations[0];
        return Err(Error::VerificationFailure(format!(
            "end-homogeneous certificate is corrupt: pair ({i}, {j}) disagrees with its end color"
        )));
    }
    if eh.indices.len() != eh.subsequence.len() {
        return Err(Error::VerificationFailure(
            "indices and subsequence differ in length".into(),
        ));
    }
    let mut counts = vec![0usize; coloring.k() as usize + 1];
    for c in &eh.end_colors {
        counts[c.0 as usize] += 1;
    }
    let mut color = 1;
    for c in 2..counts.len() {
        if counts[c] > counts[color] {
            color = c;
        }
    }
    let color = Color(color as u8);
    let n = eh.subsequence.len();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| i + 1 == n || eh.end_colors[i] == color)
        .collect();
    let mut cert = HomogeneousCertificate {
        members: keep.iter().map(|&i| eh.subsequence[i].clone()).collect(),
        indices: keep.iter().map(|&i| eh.indices[i]).collect(),
        color,
        checked_pairs: 0,
        verified: false,
    };
    let (checked, bad) = check_homogeneous(coloring, &cert.members, color)?;
    cert.checked_pairs = checked;
    cert.verified = bad.is_none();
    Ok(cert)
}

/// Scans every comparable pair; returns the number checked and the first
/// pair with the wrong color.
pub fn check_homogeneous(
    coloring: &PairColoring,
    members: &[FinSet],
    color: Color,
) -> Result<(u64, Option<(FinSet, FinSet)>)> {
    let mut checked = 0;
    for x in members {
        for y in members {
            if x.is_proper_subset(y) {
                checked += 1;
                if coloring.eval(x, y)? != color {
                    return Ok((checked, Some((x.clone(), y.clone()))));
                }
            }
        }
    }
    Ok((checked, None))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountableHomogeneous {
    pub labels: Vec<Label>,
    pub end_homogeneous: EndHomogeneousCertificate,
    pub homogeneous: HomogeneousCertificate,
    /// Largest `m` with every subset of the first `m` labels under some
    /// member.
    pub coverage: usize,
}

/// Runs both extractions on the chain of initial segments of `ground`.
pub fn countable_cofinal_homogeneous(
    coloring: &PairColoring,
    ground: impl IntoIterator<Item = Label>,
    steps: usize,
) -> Result<CountableHomogeneous> {
    if steps == 0 {
        return Err(Error::pre("at least one step is required"));
    }
    let labels: Vec<Label> = ground.into_iter().take(steps).collect();
    if labels.len() < steps {
        return Err(Error::pre(format!(
            "ground enumeration ended after {} labels",
            labels.len()
        )));
    }
    let mut sets = Vec::with_capacity(steps);
    for i in 0..steps {
        let c: FinSet = labels[..=i].iter().copied().collect();
        if c.len() != i + 1 {
            return Err(Error::pre(format!("label {} repeats", labels[i])));
        }
        sets.push(c);
    }
    let chain = Chain::new(sets)?;
    let eh = extract_end_homogeneous(coloring, &chain)?;
    let homogeneous = extract_homogeneous(coloring, &eh)?;
    let coverage = homogeneous
        .members
        .iter()
        .map(|m| labels.iter().take_while(|&&l| m.contains(l)).count())
        .max()
        .unwrap_or(0);
    Ok(CountableHomogeneous {
        labels,
        end_homogeneous: eh,
        homogeneous,
        coverage,
    })
}

/// Dominance of the first `m` labels by `members`, checked subset by subset.
pub fn covers_prefix(members: &[FinSet], labels: &[Label], m: usize) -> bool {
    let prefix: FinSet = labels[..m].iter().copied().collect();
    let targets: Vec<FinSet> = subsets(&prefix).collect();
    dominates(members, &targets).cofinal
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BruteHomogeneous {
    pub size: usize,
    pub indices: Vec<usize>,
    pub members: Vec<FinSet>,
    pub color: Color,
}

pub const BRUTE_CHAIN_LIMIT: usize = 20;

/// Largest homogeneous subset of a chain by exhaustive search. Ties: smaller
/// color, then lexicographically least positions.
pub fn brute_max_homogeneous(coloring: &PairColoring, chain: &Chain) -> Result<BruteHomogeneous> {
    let n = chain.len();
    if n > BRUTE_CHAIN_LIMIT {
        return Err(Error::SizeLimit {
            what: "chain".into(),
            size: n,
            limit: BRUTE_CHAIN_LIMIT,
        });
    }
    let sets = chain.sets();
    let mut colors = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            colors[i][j] = coloring.eval(&sets[i], &sets[j])?.0;
        }
    }
    let mut best: (usize, u32, Color) = (0, 0, Color::ONE);
    for c in 1..=coloring.k() {
        // adjacency restricted to later positions
        let adj: Vec<u32> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && colors[i.min(j)][i.max(j)] == c)
                    .fold(0u32, |m, j| m | 1 << j)
            })
            .collect();
        let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut found = (0usize, 0u32);
        clique(&adj, 0, all, &mut found);
        if found.0 > best.0 {
            best = (found.0, found.1, Color(c));
        }
    }
    let indices: Vec<usize> = (0..n).filter(|&i| best.1 >> i & 1 == 1).collect();
    Ok(BruteHomogeneous {
        size: best.0,
        members: indices.iter().map(|&i| sets[i].clone()).collect(),
        indices,
        color: best.2,
    })
}

// Include-first branching visits equal-size cliques in lexicographic order,
// so only strict improvements replace the incumbent.
fn clique(adj: &[u32], current: u32, candidates: u32, best: &mut (usize, u32)) {
    let size = current.count_ones() as usize;
    if size + candidates.count_ones() as usize <= best.0 {
        return;
    }
    if candidates == 0 {
        *best = (size, current);
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << v);
    clique(adj, current | 1 << v, rest & adj[v], best);
    clique(adj, current, rest, best);
}

/// Largest `L` with `k^L ≤ N(k−1)+1`, i.e. `⌊log_k(N(k−1)+1)⌋` in integers.
pub fn end_homogeneous_lower_bound(n: usize, k: u8) -> usize {
    let target = n as u128 * (u128::from(k) - 1) + 1;
    let mut l = 0;
    let mut pow = 1u128;
    while pow * u128::from(k) <= target {
        pow *= u128::from(k);
        l += 1;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::Rule;

    fn rule(r: Rule, k: u8) -> PairColoring {
        PairColoring::rule(r, k).unwrap()
    }

    #[test]
    fn parity_prefix_chain_of_eight() {
        let f = rule(Rule::Parity, 2);
        let eh = extract_end_homogeneous(&f, &Chain::prefix(8)).unwrap();
        assert_eq!(eh.indices, vec![0, 1, 3, 5, 7]);
        assert_eq!(eh.end_colors, vec![Color(2), Color(1), Color(1), Color(1)]);
        assert!(eh.verified);
        let h = extract_homogeneous(&f, &eh).unwrap();
        assert_eq!(h.indices, vec![1, 3, 5, 7]);
        assert_eq!(h.color, Color(1));
        assert_eq!(h.checked_pairs, 6);
        assert!(h.verified);
    }

    #[test]
    fn trivial_chains() {
        let f = rule(Rule::Parity, 2);
        let eh = extract_end_homogeneous(&f, &Chain::prefix(1)).unwrap();
        assert_eq!(eh.indices, vec![0]);
        assert!(eh.end_colors.is_empty());
        let h = extract_homogeneous(&f, &eh).unwrap();
        assert_eq!(h.color, Color(1));
        assert_eq!(h.members.len(), 1);

        let eh = extract_end_homogeneous(&f, &Chain::prefix(0)).unwrap();
        assert!(eh.subsequence.is_empty());

        let c = rule(Rule::Const1, 2);
        let eh = extract_end_homogeneous(&c, &Chain::prefix(6)).unwrap();
        assert_eq!(eh.indices.len(), 6);
        assert!(eh.end_colors.iter().all(|&x| x == Color(1)));
        assert_eq!(extract_homogeneous(&c, &eh).unwrap().members.len(), 6);
    }

    #[test]
    fn corrupt_certificate_is_rejected() {
        let f = rule(Rule::Parity, 2);
        let mut eh = extract_end_homogeneous(&f, &Chain::prefix(8)).unwrap();
        eh.end_colors[1] = Color(2);
        assert!(matches!(
            extract_homogeneous(&f, &eh),
            Err(Error::VerificationFailure(_))
        ));
    }

    #[test]
    fn countable_examples() {
        let c = rule(Rule::Const1, 2);
        let r = countable_cofinal_homogeneous(&c, 0.., 5).unwrap();
        assert_eq!(r.homogeneous.members.len(), 5);
        assert_eq!(r.coverage, 5);

        let p = rule(Rule::Parity, 2);
        let r = countable_cofinal_homogeneous(&p, 0.., 8).unwrap();
        assert_eq!(r.homogeneous.indices, vec![1, 3, 5, 7]);
        assert_eq!(r.coverage, 8);
        assert!(covers_prefix(&r.homogeneous.members, &r.labels, 8));

        let r = countable_cofinal_homogeneous(&p, 0.., 1).unwrap();
        assert_eq!(r.homogeneous.members.len(), 1);
        assert!(r.coverage >= 1);
    }

    #[test]
    fn brute_examples() {
        let p = rule(Rule::Parity, 2);
        let b = brute_max_homogeneous(&p, &Chain::prefix(4)).unwrap();
        assert_eq!(b.size, 2);
        assert_eq!(b.indices, vec![0, 2]);
        let c = rule(Rule::Const1, 2);
        assert_eq!(brute_max_homogeneous(&c, &Chain::prefix(5)).unwrap().size, 5);
        assert!(matches!(
            brute_max_homogeneous(&c, &Chain::prefix(21)),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(end_homogeneous_lower_bound(1, 2), 1);
        assert_eq!(end_homogeneous_lower_bound(3, 2), 2);
        assert_eq!(end_homogeneous_lower_bound(7, 2), 3);
        assert_eq!(end_homogeneous_lower_bound(8, 2), 3);
        assert_eq!(end_homogeneous_lower_bound(4, 3), 2);
        assert_eq!(end_homogeneous_lower_bound(0, 3), 0);
    }

    #[test]
    fn chain_validation() {
        let s = |v: &[u32]| FinSet::from_sorted(v.to_vec()).unwrap();
        assert!(Chain::new(vec![s(&[0]), s(&[0])]).is_err());
        assert!(Chain::new(vec![s(&[0]), s(&[1, 2])]).is_err());
        let c: Chain = serde_json::from_str("[[0],[0,3]]").unwrap();
        assert_eq!(c.len(), 2);
        assert!(serde_json::from_str::<Chain>("[[0,3],[0]]").is_err());
    }
}
