//! Lexicographic shellability of `P_n` under the good-pair labeling.
//!
//! Label words are always read bottom-up: entry `i` labels the `i`-th cover
//! above the bottom of the chain.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpm::{greedy_pairing, GoodPairLabel};
use crate::perm::{Perm, PermPair};
use crate::poset::QuotientPoset;

/// A saturated chain `x_0 ⋖ x_1 ⋖ ... ⋖ x_k` with its label word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledChain {
    pub elements: Vec<usize>,
    pub labels: Vec<GoodPairLabel>,
}

/// Linear extension of the product order used for lexicographic
/// comparison of label words.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Linearization {
    /// Compare `ℓ`, then `u`.
    #[default]
    LowerFirst,
    /// Compare `u`, then `ℓ`.
    UpperFirst,
}

impl Linearization {
    pub fn cmp_labels(self, a: &GoodPairLabel, b: &GoodPairLabel) -> Ordering {
        match self {
            Linearization::LowerFirst => a.cmp(b),
            Linearization::UpperFirst => a.cmp_upper_first(b),
        }
    }

    pub fn cmp_words(self, a: &[GoodPairLabel], b: &[GoodPairLabel]) -> Ordering {
        for (x, y) in a.iter().zip(b) {
            match self.cmp_labels(x, y) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        a.len().cmp(&b.len())
    }
}

/// Renders a label word as `(ℓ,u)(ℓ,u)...`.
pub fn word_string(labels: &[GoodPairLabel]) -> String {
    labels.iter().map(|l| l.to_string()).collect()
}

impl LabeledChain {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn bottom(&self) -> usize {
        self.elements[0]
    }

    pub fn top(&self) -> usize {
        *self.elements.last().expect("chains are nonempty")
    }

    /// Every consecutive pair of labels is weakly increasing in the product
    /// order (and hence, by transitivity, every pair).
    pub fn is_weakly_increasing(&self) -> bool {
        self.labels.windows(2).all(|w| w[0].product_le(&w[1]))
    }

    /// No consecutive pair of labels is strictly increasing.
    pub fn is_falling(&self) -> bool {
        self.labels.windows(2).all(|w| !w[0].product_lt(&w[1]))
    }

    pub fn word(&self) -> String {
        word_string(&self.labels)
    }

    /// Reads a maximal chain of `P_n` as `(σ, τ)` with `σ(i) = ℓ_i` and
    /// `τ(i) = u_i`.
    pub fn to_perm_pair(&self) -> Result<PermPair> {
        let sigma = Perm::new(self.labels.iter().map(|l| l.lower as usize).collect())?;
        let tau = Perm::new(self.labels.iter().map(|l| l.upper as usize).collect())?;
        PermPair::new(sigma, tau)
    }
}

fn check_comparable(p: &QuotientPoset, x: usize, y: usize) -> Result<()> {
    if x >= p.len() || y >= p.len() || !p.leq(x, y) {
        return Err(Error::Incomparable(x, y));
    }
    Ok(())
}

fn collect_chains(
    p: &QuotientPoset,
    x: usize,
    y: usize,
    falling_only: bool,
) -> Result<Vec<LabeledChain>> {
    check_comparable(p, x, y)?;
    let below_y = &p.order().downsets()[y];
    let mut out = Vec::new();
    let mut elements = vec![x];
    let mut labels = Vec::new();

    fn rec(
        p: &QuotientPoset,
        y: usize,
        below_y: &fixedbitset::FixedBitSet,
        falling_only: bool,
        elements: &mut Vec<usize>,
        labels: &mut Vec<GoodPairLabel>,
        out: &mut Vec<LabeledChain>,
    ) {
        let here = *elements.last().unwrap();
        if here == y {
            out.push(LabeledChain {
                elements: elements.clone(),
                labels: labels.clone(),
            });
            return;
        }
        for c in p.up_covers(here) {
            if !below_y.contains(c.hi) {
                continue;
            }
            if falling_only {
                if let Some(prev) = labels.last() {
                    if prev.product_lt(&c.label) {
                        continue;
                    }
                }
            }
            elements.push(c.hi);
            labels.push(c.label);
            rec(p, y, below_y, falling_only, elements, labels, out);
            elements.pop();
            labels.pop();
        }
    }

    rec(
        p,
        y,
        below_y,
        falling_only,
        &mut elements,
        &mut labels,
        &mut out,
    );
    Ok(out)
}

/// All maximal chains of `[x, y]`, in lexicographic order of label words
/// (`ℓ` first).
pub fn maximal_chains(p: &QuotientPoset, x: usize, y: usize) -> Result<Vec<LabeledChain>> {
    collect_chains(p, x, y, false)
}

/// Maximal chains of `[x, y]` with no strictly increasing consecutive
/// labels.
pub fn falling_chains(p: &QuotientPoset, x: usize, y: usize) -> Result<Vec<LabeledChain>> {
    collect_chains(p, x, y, true)
}

/// `μ(x, y) = (-1)^{rank y - rank x} · #falling chains of [x, y]`.
pub fn mobius_via_falling(p: &QuotientPoset, x: usize, y: usize) -> Result<i64> {
    let count = falling_chains(p, x, y)?.len() as i64;
    let length = p.rank(y) - p.rank(x);
    Ok(if length.is_multiple_of(2) {
        count
    } else {
        -count
    })
}

/// Sorts chains by their label words under `lin`.
pub fn lex_order(mut chains: Vec<LabeledChain>, lin: Linearization) -> Vec<LabeledChain> {
    chains.sort_by(|a, b| lin.cmp_words(&a.labels, &b.labels));
    chains
}

/// Facets of the order complex `Δ(P)` (maximal chains as vertex lists),
/// in lexicographic order of their label words.
pub fn order_complex_facets(p: &QuotientPoset, lin: Linearization) -> Vec<Vec<usize>> {
    let chains = maximal_chains(p, p.bottom(), p.top()).expect("bottom <= top");
    lex_order(chains, lin)
        .into_iter()
        .map(|c| c.elements)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShellingOutcome {
    Shelling,
    Failure(ShellingFailure),
}

/// Facet `facet` meets the earlier facet `earlier` in `shared`, which lies
/// in no codimension-one face that `facet` shares with its predecessors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellingFailure {
    pub facet: usize,
    pub earlier: usize,
    pub shared: Vec<usize>,
}

impl ShellingOutcome {
    pub fn is_shelling(&self) -> bool {
        matches!(self, ShellingOutcome::Shelling)
    }
}

pub fn shelling_check(facets: &[Vec<usize>]) -> Result<ShellingOutcome> {
    shelling_check_with(facets, crate::Limits::default().shelling_max_facets)
}

/// Checks that each facet meets the union of its predecessors in a pure
/// subcomplex of codimension one: every intersection with an earlier facet
/// must extend to an intersection of size `d - 1`.
pub fn shelling_check_with(facets: &[Vec<usize>], max_facets: usize) -> Result<ShellingOutcome> {
    if facets.len() > max_facets {
        return Err(Error::BudgetExceeded {
            what: "facet count",
            size: facets.len(),
            budget: max_facets,
        });
    }
    let Some(first) = facets.first() else {
        return Ok(ShellingOutcome::Shelling);
    };
    let d = first.len();
    if d > 128 {
        return Err(Error::BudgetExceeded {
            what: "facet size",
            size: d,
            budget: 128,
        });
    }
    let mut sorted: Vec<Vec<usize>> = Vec::with_capacity(facets.len());
    for (index, f) in facets.iter().enumerate() {
        let mut s = f.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != d {
            return Err(Error::NotPure {
                index,
                found: s.len(),
                expected: d,
            });
        }
        sorted.push(s);
    }

    // positions of `other ∩ facet` inside `facet`, as a bit mask
    let shared_mask = |facet: &[usize], other: &[usize]| -> u128 {
        let (mut i, mut j, mut mask) = (0, 0, 0u128);
        while i < facet.len() && j < other.len() {
            match facet[i].cmp(&other[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    mask |= 1 << i;
                    i += 1;
                    j += 1;
                }
            }
        }
        mask
    };

    for j in 1..sorted.len() {
        let facet = &sorted[j];
        let masks: Vec<u128> = sorted[..j].iter().map(|e| shared_mask(facet, e)).collect();
        let mut ridges: Vec<u128> = masks
            .iter()
            .copied()
            .filter(|m| m.count_ones() as usize + 1 == d)
            .collect();
        ridges.sort_unstable();
        ridges.dedup();
        for (i, &m) in masks.iter().enumerate() {
            if !ridges.iter().any(|&r| m & !r == 0) {
                let shared = (0..d)
                    .filter(|b| m >> b & 1 == 1)
                    .map(|b| facet[b])
                    .collect();
                return Ok(ShellingOutcome::Failure(ShellingFailure {
                    facet: j,
                    earlier: i,
                    shared,
                }));
            }
        }
    }
    Ok(ShellingOutcome::Shelling)
}

/// Reduced Euler characteristic of the order complex of the open interval
/// `(x, y)`, counting its faces explicitly. Requires `x < y`.
pub fn reduced_euler_characteristic(p: &QuotientPoset, x: usize, y: usize) -> Result<i64> {
    if x == y {
        return Err(Error::Incomparable(x, y));
    }
    let interior: Vec<usize> = p
        .order()
        .interval(x, y)?
        .into_iter()
        .filter(|&z| z != x && z != y)
        .collect();
    let upsets = p.order().upsets();
    // faces by vertex count; the empty face contributes -1
    let mut chi: i64 = -1;
    let mut stack: Vec<(usize, usize)> = (0..interior.len()).map(|i| (i, 1)).collect();
    while let Some((i, size)) = stack.pop() {
        chi += if size % 2 == 1 { 1 } else { -1 };
        let z = interior[i];
        for (k, &w) in interior.iter().enumerate().skip(i + 1) {
            if w != z && upsets[z].contains(w) {
                stack.push((k, size + 1));
            }
        }
    }
    Ok(chi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalFinding {
    pub interval: [usize; 2],
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
}

/// Per-interval findings of a verification pass, sorted by interval.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub findings: Vec<IntervalFinding>,
}

impl Report {
    pub fn from_findings(mut findings: Vec<IntervalFinding>) -> Self {
        findings.sort_by_key(|f| f.interval);
        Report { findings }
    }

    pub fn violations(&self) -> impl Iterator<Item = &IntervalFinding> {
        self.findings.iter().filter(|f| f.status == Status::Fail)
    }

    pub fn is_ok(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn len(&self) -> usize {
        self.findings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.findings).expect("report serialises");
        out.push('\n');
        out
    }
}

/// Checks the EL conditions on one interval: a unique weakly increasing
/// maximal chain, equal to the greedy pairing read upwards, and strictly
/// lexicographically first under `lin`.
pub fn check_el_interval(
    p: &QuotientPoset,
    x: usize,
    y: usize,
    lin: Linearization,
) -> Result<IntervalFinding> {
    let chains = maximal_chains(p, x, y)?;
    let increasing: Vec<&LabeledChain> =
        chains.iter().filter(|c| c.is_weakly_increasing()).collect();
    let finding = |ok: bool, detail: String| IntervalFinding {
        interval: [x, y],
        status: if ok { Status::Ok } else { Status::Fail },
        detail,
    };
    if increasing.len() != 1 {
        return Ok(finding(
            false,
            format!("{} weakly increasing maximal chains", increasing.len()),
        ));
    }
    let inc = increasing[0];
    let greedy = greedy_pairing(p.element(y), p.element(x))?;
    if inc.labels != greedy {
        return Ok(finding(
            false,
            format!(
                "increasing chain {} differs from greedy pairing {}",
                inc.word(),
                word_string(&greedy)
            ),
        ));
    }
    if let Some(other) = chains
        .iter()
        .filter(|c| *c != inc)
        .find(|c| lin.cmp_words(&inc.labels, &c.labels) != Ordering::Less)
    {
        return Ok(finding(
            false,
            format!(
                "increasing chain {} is not lexicographically below {}",
                inc.word(),
                other.word()
            ),
        ));
    }
    Ok(finding(
        true,
        format!("{} maximal chains; increasing {}", chains.len(), inc.word()),
    ))
}

/// EL verification on the given intervals.
pub fn verify_el_on(
    p: &QuotientPoset,
    intervals: &[(usize, usize)],
    lin: Linearization,
) -> Result<Report> {
    let findings = intervals
        .par_iter()
        .map(|&(x, y)| check_el_interval(p, x, y, lin))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::from_findings(findings))
}

/// EL verification on every interval of `p`.
pub fn verify_el(p: &QuotientPoset, lin: Linearization) -> Report {
    verify_el_on(p, &p.comparable_pairs(), lin).expect("comparable pairs")
}

/// EL verification on the intervals `[0̂, y]`.
pub fn verify_el_rooted(p: &QuotientPoset, lin: Linearization) -> Report {
    let b = p.bottom();
    let pairs: Vec<(usize, usize)> = (0..p.len()).map(|y| (b, y)).collect();
    verify_el_on(p, &pairs, lin).expect("bottom is below everything")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::build_poset;

    fn lab(l: usize, u: usize) -> GoodPairLabel {
        GoodPairLabel::new(l, u)
    }

    #[test]
    fn p3_falling_chains() {
        let p = build_poset(3).unwrap();
        let falling = falling_chains(&p, p.bottom(), p.top()).unwrap();
        assert_eq!(falling.len(), 6);
        assert!(falling
            .iter()
            .any(|c| c.labels == vec![lab(3, 2), lab(2, 1), lab(1, 3)]));
        assert_eq!(mobius_via_falling(&p, p.bottom(), p.top()).unwrap(), -6);
    }

    #[test]
    fn p4_exceptional_chain() {
        let p = build_poset(4).unwrap();
        let falling = falling_chains(&p, p.bottom(), p.top()).unwrap();
        assert_eq!(falling.len(), 25);
        let exceptional = vec![lab(4, 1), lab(2, 3), lab(3, 2), lab(1, 4)];
        assert!(falling.iter().any(|c| c.labels == exceptional));
    }

    #[test]
    fn covers_have_one_falling_chain() {
        let p = build_poset(3).unwrap();
        for c in p.covers() {
            assert_eq!(falling_chains(&p, c.lo, c.hi).unwrap().len(), 1);
            assert_eq!(mobius_via_falling(&p, c.lo, c.hi).unwrap(), -1);
            let f = check_el_interval(&p, c.lo, c.hi, Linearization::LowerFirst).unwrap();
            assert_eq!(f.status, Status::Ok);
        }
    }

    #[test]
    fn incomparable_endpoints_rejected() {
        let p = build_poset(3).unwrap();
        assert!(matches!(
            falling_chains(&p, p.top(), p.bottom()),
            Err(Error::Incomparable(_, _))
        ));
        assert!(mobius_via_falling(&p, p.top(), p.bottom()).is_err());
    }

    #[test]
    fn p3_el_and_increasing_chain() {
        let p = build_poset(3).unwrap();
        let report = verify_el(&p, Linearization::LowerFirst);
        assert!(report.is_ok());
        let chains = lex_order(
            maximal_chains(&p, p.bottom(), p.top()).unwrap(),
            Linearization::LowerFirst,
        );
        assert_eq!(chains.len(), 17);
        assert_eq!(chains[0].labels, vec![lab(1, 1), lab(2, 2), lab(3, 3)]);
        assert!(chains[0].is_weakly_increasing());
        for w in chains.windows(2) {
            assert_eq!(
                Linearization::LowerFirst.cmp_words(&w[0].labels, &w[1].labels),
                Ordering::Less
            );
        }
    }

    #[test]
    fn single_chain_lex_order() {
        let c = LabeledChain {
            elements: vec![0, 1],
            labels: vec![lab(1, 1)],
        };
        assert_eq!(
            lex_order(vec![c.clone()], Linearization::LowerFirst),
            vec![c]
        );
    }

    #[test]
    fn shelling_small_cases() {
        assert!(shelling_check(&[vec![1, 2, 3]]).unwrap().is_shelling());
        assert!(shelling_check(&[]).unwrap().is_shelling());
        // two triangles sharing an edge, then one sharing only a vertex
        let ok = vec![vec![1, 2, 3], vec![2, 3, 4]];
        assert!(shelling_check(&ok).unwrap().is_shelling());
        let bad = vec![vec![1, 2, 3], vec![3, 4, 5], vec![2, 3, 4]];
        assert_eq!(
            shelling_check(&bad).unwrap(),
            ShellingOutcome::Failure(ShellingFailure {
                facet: 1,
                earlier: 0,
                shared: vec![3]
            })
        );
        // reordered, the same complex shells
        let good = vec![vec![1, 2, 3], vec![2, 3, 4], vec![3, 4, 5]];
        assert!(shelling_check(&good).unwrap().is_shelling());
        assert!(matches!(
            shelling_check(&[vec![1, 2], vec![1, 2, 3]]),
            Err(Error::NotPure { index: 1, .. })
        ));
        assert!(matches!(
            shelling_check_with(&[vec![1], vec![2]], 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn p3_lex_order_shells() {
        let p = build_poset(3).unwrap();
        let facets = order_complex_facets(&p, Linearization::LowerFirst);
        assert_eq!(facets.len(), 17);
        assert!(shelling_check(&facets).unwrap().is_shelling());
    }

    #[test]
    fn euler_characteristic_matches_mobius_on_p3() {
        let p = build_poset(3).unwrap();
        for (x, y) in p.comparable_pairs() {
            if x != y {
                assert_eq!(
                    reduced_euler_characteristic(&p, x, y).unwrap(),
                    p.mobius(x, y).unwrap()
                );
            }
        }
    }

    #[test]
    fn perm_pair_of_chain() {
        let p = build_poset(3).unwrap();
        for c in maximal_chains(&p, p.bottom(), p.top()).unwrap() {
            let pair = c.to_perm_pair().unwrap();
            assert_eq!(pair.sigma.len(), 3);
        }
    }

    #[test]
    fn report_json_shape() {
        let p = build_poset(1).unwrap();
        let json = verify_el(&p, Linearization::LowerFirst).to_json();
        assert!(json.contains("\"interval\": ["));
        assert!(json.contains("\"status\": \"ok\""));
    }
}
