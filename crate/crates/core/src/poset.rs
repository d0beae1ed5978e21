//! The quotient poset `P_n` of all lattice path matroids on `[n]`.
//!
//! Covers are generated from good pairs: for every LPM `M` and good pair
//! `(ℓ, u)` of `M`, the matroid `M[U ∖ {u}, L ∖ {ℓ}]` sits one rank below
//! and the cover is labelled `(ℓ, u)`. For `n <= 5` the construction is
//! checked against the transitive reduction of the quotient relation.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::GradedPoset;
use crate::limits::Limits;
use crate::lpm::{is_quotient, GoodPairLabel, Lpm};
use crate::polynomial::IntPolynomial;

/// Largest `n` for which `build` cross-checks covers against `<=_q`.
const COVER_CHECK_MAX_N: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cover {
    pub lo: usize,
    pub hi: usize,
    pub label: GoodPairLabel,
}

/// `P_n`, or an interval of it, with a good-pair labelled Hasse diagram.
///
/// Elements are indexed canonically (rank, then `U`, then `L`), so ids and
/// exports are stable across runs.
#[derive(Clone, Debug)]
pub struct QuotientPoset {
    n: usize,
    elements: Vec<Lpm>,
    index: HashMap<Lpm, usize>,
    covers: Vec<Cover>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    order: GradedPoset,
}

#[derive(Serialize, Deserialize)]
struct PosetJson {
    n: usize,
    elements: Vec<ElementJson>,
    covers: Vec<CoverJson>,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    id: usize,
    #[serde(rename = "U")]
    upper: Vec<usize>,
    #[serde(rename = "L")]
    lower: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CoverJson {
    lo: usize,
    hi: usize,
    label: [usize; 2],
}

/// `M_{k,1} = M[[n] ∖ {k}, [n] ∖ {1}]`, the coatom below `U_{n,n}` reached
/// by the label `(1, k)`.
pub fn m_k1(n: usize, k: usize) -> Result<Lpm> {
    Limits::check("k", k, 1, n)?;
    let upper: Vec<usize> = (1..=n).filter(|&e| e != k).collect();
    let lower: Vec<usize> = (2..=n).collect();
    Lpm::new(n, &upper, &lower)
}

/// Builds `P_n` with the default limits.
pub fn build_poset(n: usize) -> Result<QuotientPoset> {
    QuotientPoset::build_with(n, &Limits::default())
}

impl QuotientPoset {
    pub fn build(n: usize) -> Result<Self> {
        Self::build_with(n, &Limits::default())
    }

    pub fn build_with(n: usize, limits: &Limits) -> Result<Self> {
        Limits::check(
            "n",
            n,
            1,
            limits.poset_max_n.min(crate::lpm::MAX_GROUND_SET),
        )?;
        let elements = Lpm::all(n);
        let index: HashMap<Lpm, usize> =
            elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut covers: Vec<Cover> = elements
            .par_iter()
            .enumerate()
            .flat_map_iter(|(hi, m)| {
                let index = &index;
                m.good_pairs().into_iter().filter_map(move |label| {
                    let lower = m.remove_pair(label)?;
                    Some(Cover {
                        lo: index[&lower],
                        hi,
                        label,
                    })
                })
            })
            .collect();
        covers.sort_by_key(|c| (c.lo, c.hi));
        let poset = Self::assemble(n, elements, index, covers)?;
        if n <= COVER_CHECK_MAX_N {
            poset.verify_covers()?;
        }
        Ok(poset)
    }

    fn assemble(
        n: usize,
        elements: Vec<Lpm>,
        index: HashMap<Lpm, usize>,
        covers: Vec<Cover>,
    ) -> Result<Self> {
        let ranks: Vec<usize> = elements.iter().map(Lpm::rank).collect();
        let pairs: Vec<(usize, usize)> = covers.iter().map(|c| (c.lo, c.hi)).collect();
        let order = GradedPoset::new(ranks, &pairs)?;
        let mut up = vec![Vec::new(); elements.len()];
        let mut down = vec![Vec::new(); elements.len()];
        for (i, c) in covers.iter().enumerate() {
            up[c.lo].push(i);
            down[c.hi].push(i);
        }
        for list in &mut up {
            list.sort_by_key(|&i| covers[i].label);
        }
        for list in &mut down {
            list.sort_by_key(|&i| covers[i].label);
        }
        Ok(QuotientPoset {
            n,
            elements,
            index,
            covers,
            up,
            down,
            order,
        })
    }

    /// Assembles a poset from explicit elements and labelled covers,
    /// validating that elements are canonically ordered LPMs on `[n]` and
    /// that every cover is a good-pair step carrying its own label.
    pub fn from_parts(n: usize, elements: Vec<Lpm>, covers: Vec<Cover>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::MalformedPoset("no elements".into()));
        }
        if let Some(m) = elements.iter().find(|m| m.ground_size() != n) {
            return Err(Error::GroundSetMismatch(n, m.ground_size()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedPoset(
                "elements are not in canonical order".into(),
            ));
        }
        for c in &covers {
            let (lo, hi) = match (elements.get(c.lo), elements.get(c.hi)) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => {
                    return Err(Error::MalformedPoset(format!(
                        "cover ({}, {}) refers to a missing element",
                        c.lo, c.hi
                    )))
                }
            };
            if hi.remove_pair(c.label) != Some(*lo)
                || !hi.is_good_pair(c.label.lower as usize, c.label.upper as usize)?
            {
                return Err(Error::MalformedPoset(format!(
                    "{lo} -> {hi} is not a good-pair step labelled {}",
                    c.label
                )));
            }
        }
        let index = elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut covers = covers;
        covers.sort_by_key(|c| (c.lo, c.hi));
        Self::assemble(n, elements, index, covers)
    }

    /// Checks that the Hasse diagram is exactly the transitive reduction of
    /// the quotient relation, and that its order is `<=_q` itself.
    pub fn verify_covers(&self) -> Result<()> {
        let len = self.len();
        let mut rel = vec![false; len * len];
        for a in 0..len {
            for b in 0..len {
                rel[a * len + b] = is_quotient(&self.elements[a], &self.elements[b])?;
            }
        }
        for a in 0..len {
            for b in 0..len {
                if rel[a * len + b] != self.order.leq(a, b) {
                    return Err(Error::CoverMismatch(format!(
                        "{} <=_q {} is {} but the Hasse diagram says {}",
                        self.elements[a],
                        self.elements[b],
                        rel[a * len + b],
                        self.order.leq(a, b)
                    )));
                }
                let is_cover = a != b
                    && rel[a * len + b]
                    && !(0..len).any(|c| c != a && c != b && rel[a * len + c] && rel[c * len + b]);
                let has_edge = self.cover_between(a, b).is_some();
                if is_cover != has_edge {
                    return Err(Error::CoverMismatch(format!(
                        "{} -> {}: reduction says {is_cover}, diagram says {has_edge}",
                        self.elements[a], self.elements[b]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Lpm] {
        &self.elements
    }

    pub fn element(&self, x: usize) -> &Lpm {
        &self.elements[x]
    }

    pub fn index_of(&self, m: &Lpm) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    /// Covers above `x`, sorted by label.
    pub fn up_covers(&self, x: usize) -> impl Iterator<Item = &Cover> {
        self.up[x].iter().map(|&i| &self.covers[i])
    }

    /// Covers below `x`, sorted by label.
    pub fn down_covers(&self, x: usize) -> impl Iterator<Item = &Cover> {
        self.down[x].iter().map(|&i| &self.covers[i])
    }

    pub fn cover_between(&self, lo: usize, hi: usize) -> Option<&Cover> {
        self.up_covers(lo).find(|c| c.hi == hi)
    }

    pub fn order(&self) -> &GradedPoset {
        &self.order
    }

    pub fn rank(&self, x: usize) -> usize {
        self.order.rank(x)
    }

    pub fn bottom(&self) -> usize {
        self.order.bottom().expect("quotient posets are bounded")
    }

    pub fn top(&self) -> usize {
        self.order.top().expect("quotient posets are bounded")
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.order.leq(x, y)
    }

    /// Comparable pairs `(x, y)` with `x <= y`, in index order.
    pub fn comparable_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|x| self.order.upsets()[x].ones().map(move |y| (x, y)))
            .collect()
    }

    pub fn mobius(&self, x: usize, y: usize) -> Result<i64> {
        self.order.mobius(x, y)
    }

    pub fn mobius_hall(&self, x: usize, y: usize) -> Result<i64> {
        self.order
            .mobius_hall(x, y, Limits::default().hall_max_elements)
    }

    pub fn rank_polynomial(&self) -> IntPolynomial {
        self.order.rank_polynomial()
    }

    pub fn characteristic_polynomial(&self) -> IntPolynomial {
        self.order
            .characteristic_polynomial()
            .expect("quotient posets have a minimum")
    }

    pub fn count_maximal_chains(&self) -> u128 {
        self.order
            .count_maximal_chains()
            .expect("quotient posets are bounded")
    }

    /// The closed interval `[x, y]` as a poset in its own right, with
    /// inherited labels and canonical re-indexing.
    pub fn interval(&self, x: usize, y: usize) -> Result<QuotientPoset> {
        let members = self.order.interval(x, y)?;
        let mut renumber = HashMap::with_capacity(members.len());
        for (new, &old) in members.iter().enumerate() {
            renumber.insert(old, new);
        }
        let elements: Vec<Lpm> = members.iter().map(|&i| self.elements[i]).collect();
        let covers: Vec<Cover> = self
            .covers
            .iter()
            .filter_map(|c| {
                Some(Cover {
                    lo: *renumber.get(&c.lo)?,
                    hi: *renumber.get(&c.hi)?,
                    label: c.label,
                })
            })
            .collect();
        let index = elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Self::assemble(self.n, elements, index, covers)
    }

    pub fn to_json(&self) -> String {
        let doc = PosetJson {
            n: self.n,
            elements: self
                .elements
                .iter()
                .enumerate()
                .map(|(id, m)| ElementJson {
                    id,
                    upper: m.upper(),
                    lower: m.lower(),
                })
                .collect(),
            covers: self
                .covers
                .iter()
                .map(|c| CoverJson {
                    lo: c.lo,
                    hi: c.hi,
                    label: [c.label.lower as usize, c.label.upper as usize],
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("poset serialises");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PosetJson = serde_json::from_str(text)?;
        let mut elements = Vec::with_capacity(doc.elements.len());
        for (i, e) in doc.elements.iter().enumerate() {
            if e.id != i {
                return Err(Error::MalformedPoset(format!(
                    "element ids must be 0..len in order, found {} at {i}",
                    e.id
                )));
            }
            elements.push(Lpm::new(doc.n, &e.upper, &e.lower)?);
        }
        let covers = doc
            .covers
            .iter()
            .map(|c| Cover {
                lo: c.lo,
                hi: c.hi,
                label: GoodPairLabel::new(c.label[0], c.label[1]),
            })
            .collect();
        Self::from_parts(doc.n, elements, covers)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph P{} {{", self.n);
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
        for (id, m) in self.elements.iter().enumerate() {
            let _ = writeln!(out, "  n{id} [label=\"{m}\"];");
        }
        for c in &self.covers {
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{},{}\"];",
                c.lo, c.hi, c.label.lower, c.label.upper
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Structural equality: same ground set, elements and labelled covers.
impl PartialEq for QuotientPoset {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.elements == other.elements && self.covers == other.covers
    }
}

impl Eq for QuotientPoset {}
