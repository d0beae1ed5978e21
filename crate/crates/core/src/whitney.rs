//! Whitney duals of `P_n` from its good-pair labeling.
//!
//! The 0̂-rooted saturated chains form a tree under one-step extension
//! (`ChainPoset`). Two chains are switch-related when one has an ascent
//! `λ_i < λ_{i+1}` and the other replaces the middle element of that rank-two
//! step so that the two labels appear in the opposite order. Classes of the
//! generated equivalence, ordered by one-step extension of members, form a
//! Whitney dual of `P_n`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::GradedPoset;
use crate::limits::Limits;
use crate::lpm::GoodPairLabel;
use crate::polynomial::IntPolynomial;
use crate::poset::QuotientPoset;
use crate::shelling::{
    maximal_chains, verify_el, word_string, IntervalFinding, LabeledChain, Linearization, Report,
    Status,
};

/// A saturated chain starting at 0̂.
pub type SaturatedChain = LabeledChain;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ChainNode {
    parent: Option<usize>,
    element: usize,
    label: Option<GoodPairLabel>,
    length: usize,
}

/// All 0̂-rooted saturated chains of a poset, stored as a trie. Node `0` is
/// the one-element chain `(0̂)`; the parent of a chain drops its top.
/// Nodes are numbered breadth-first, children by label.
#[derive(Clone, Debug)]
pub struct ChainPoset {
    nodes: Vec<ChainNode>,
    children: Vec<Vec<usize>>,
    top: usize,
}

impl ChainPoset {
    pub fn build(p: &QuotientPoset) -> Result<Self> {
        Self::build_with(p, &Limits::default())
    }

    pub fn build_with(p: &QuotientPoset, limits: &Limits) -> Result<Self> {
        Limits::check("n", p.n(), 1, limits.chain_poset_max_n)?;
        let mut nodes = vec![ChainNode {
            parent: None,
            element: p.bottom(),
            label: None,
            length: 0,
        }];
        let mut children = vec![Vec::new()];
        let mut next = 0;
        while next < nodes.len() {
            let here = nodes[next];
            for c in p.up_covers(here.element) {
                let id = nodes.len();
                nodes.push(ChainNode {
                    parent: Some(next),
                    element: c.hi,
                    label: Some(c.label),
                    length: here.length + 1,
                });
                children.push(Vec::new());
                children[next].push(id);
            }
            next += 1;
        }
        Ok(ChainPoset {
            nodes,
            children,
            top: p.top(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of covers in the chain.
    pub fn length(&self, c: usize) -> usize {
        self.nodes[c].length
    }

    pub fn top_element(&self, c: usize) -> usize {
        self.nodes[c].element
    }

    pub fn parent(&self, c: usize) -> Option<usize> {
        self.nodes[c].parent
    }

    pub fn children(&self, c: usize) -> &[usize] {
        &self.children[c]
    }

    /// Chains reaching `1̂`, the maximal elements.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| self.nodes[c].element == self.top)
            .collect()
    }

    pub fn elements(&self, c: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes[c].length + 1);
        let mut at = Some(c);
        while let Some(i) = at {
            out.push(self.nodes[i].element);
            at = self.nodes[i].parent;
        }
        out.reverse();
        out
    }

    pub fn labels(&self, c: usize) -> Vec<GoodPairLabel> {
        let mut out = Vec::with_capacity(self.nodes[c].length);
        let mut at = c;
        while let Some(l) = self.nodes[at].label {
            out.push(l);
            at = self.nodes[at].parent.expect("labelled nodes have parents");
        }
        out.reverse();
        out
    }

    pub fn chain(&self, c: usize) -> SaturatedChain {
        LabeledChain {
            elements: self.elements(c),
            labels: self.labels(c),
        }
    }

    fn child_at(&self, c: usize, element: usize) -> Option<usize> {
        self.children[c]
            .iter()
            .copied()
            .find(|&d| self.nodes[d].element == element)
    }

    /// The node for a 0̂-rooted element sequence.
    pub fn find(&self, elements: &[usize]) -> Option<usize> {
        let (&first, rest) = elements.split_first()?;
        if first != self.nodes[0].element {
            return None;
        }
        rest.iter().try_fold(0, |c, &e| self.child_at(c, e))
    }

    fn ancestor(&self, mut c: usize, length: usize) -> usize {
        while self.nodes[c].length > length {
            c = self.nodes[c].parent.expect("ancestor within the chain");
        }
        c
    }
}

/// Builds the chain poset with the default size cap.
pub fn chain_poset(p: &QuotientPoset) -> Result<ChainPoset> {
    ChainPoset::build(p)
}

/// The rank-two switch partner of `c` at its ascent in positions
/// `(i, i + 1)`, or an error if the witness is missing or ambiguous.
fn switch_partner(p: &QuotientPoset, chains: &ChainPoset, c: usize, i: usize) -> Result<usize> {
    let elements = chains.elements(c);
    let labels = chains.labels(c);
    let (a, b) = (labels[i - 1], labels[i]);
    let (below, above) = (elements[i - 1], elements[i + 1]);
    let witnesses: Vec<usize> = p
        .up_covers(below)
        .filter(|cv| cv.label == b)
        .filter(|cv| p.cover_between(cv.hi, above).map(|d| d.label) == Some(a))
        .map(|cv| cv.hi)
        .collect();
    if witnesses.len() != 1 {
        return Err(Error::MalformedPoset(format!(
            "{} switch witnesses for {} at position {i}",
            witnesses.len(),
            word_string(&labels)
        )));
    }
    let mut swapped = elements.clone();
    swapped[i] = witnesses[0];
    let partner = chains
        .find(&swapped)
        .ok_or_else(|| Error::MalformedPoset("switched chain is not saturated".into()))?;
    let mut expected = labels.clone();
    expected.swap(i - 1, i);
    if chains.labels(partner) != expected || chains.top_element(partner) != chains.top_element(c) {
        return Err(Error::MalformedPoset(format!(
            "switch of {} does not exchange two labels",
            word_string(&labels)
        )));
    }
    debug_assert_eq!(chains.ancestor(partner, i - 1), chains.ancestor(c, i - 1));
    Ok(partner)
}

/// Ascent positions `i` (1-based, `λ_i < λ_{i+1}` in the product order).
fn ascents(labels: &[GoodPairLabel]) -> Vec<usize> {
    (1..labels.len())
        .filter(|&i| labels[i - 1].product_lt(&labels[i]))
        .collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// An equivalence class of 0̂-rooted saturated chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainClass {
    /// Chain ids in the chain poset, sorted by label word.
    pub members: Vec<usize>,
    /// The member with the lexicographically least word.
    pub canonical: usize,
    pub rank: usize,
    /// Common top element in `P_n`.
    pub top: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCover {
    pub lo: usize,
    pub hi: usize,
    /// Labels of the extending covers, sorted.
    pub labels: Vec<GoodPairLabel>,
}

/// `Q_λ(P_n)`: classes of chains ordered by one-step extension.
#[derive(Clone, Debug)]
pub struct WhitneyDual {
    n: usize,
    chains: ChainPoset,
    classes: Vec<ChainClass>,
    class_of: Vec<usize>,
    switches: Vec<(usize, usize)>,
    covers: Vec<DualCover>,
    order: GradedPoset,
}

#[derive(Serialize)]
struct DualJson {
    n: usize,
    elements: Vec<DualElementJson>,
    covers: Vec<DualCoverJson>,
}

#[derive(Serialize)]
struct DualElementJson {
    id: usize,
    rank: usize,
    word: String,
    size: usize,
}

#[derive(Serialize)]
struct DualCoverJson {
    lo: usize,
    hi: usize,
    labels: Vec<[usize; 2]>,
}

const DOT_STYLES: [&str; 3] = ["solid", "dashed", "dotted"];
const DOT_COLORS: [&str; 6] = ["black", "red", "blue", "darkgreen", "orange", "purple"];

impl WhitneyDual {
    pub fn build(p: &QuotientPoset) -> Result<Self> {
        Self::build_with(p, &Limits::default())
    }

    pub fn build_with(p: &QuotientPoset, limits: &Limits) -> Result<Self> {
        let chains = ChainPoset::build_with(p, limits)?;
        let per_chain: Vec<Vec<(usize, usize)>> = (0..chains.len())
            .into_par_iter()
            .map(|c| {
                ascents(&chains.labels(c))
                    .into_iter()
                    .map(|i| switch_partner(p, &chains, c, i).map(|d| (c, d)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let switches: Vec<(usize, usize)> = per_chain.into_iter().flatten().collect();

        let mut uf = UnionFind::new(chains.len());
        for &(a, b) in &switches {
            uf.union(a, b);
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for c in 0..chains.len() {
            groups.entry(uf.find(c)).or_default().push(c);
        }
        let lin = Linearization::LowerFirst;
        let mut classes: Vec<(Vec<GoodPairLabel>, ChainClass)> = groups
            .into_values()
            .map(|members| {
                let mut keyed: Vec<(Vec<GoodPairLabel>, usize)> =
                    members.iter().map(|&c| (chains.labels(c), c)).collect();
                keyed.sort_by(|x, y| lin.cmp_words(&x.0, &y.0));
                let first = keyed[0].1;
                let class = ChainClass {
                    members: keyed.iter().map(|k| k.1).collect(),
                    canonical: first,
                    rank: chains.length(first),
                    top: chains.top_element(first),
                };
                (keyed[0].0.clone(), class)
            })
            .collect();
        for (_, class) in &classes {
            if class
                .members
                .iter()
                .any(|&c| chains.length(c) != class.rank || chains.top_element(c) != class.top)
            {
                return Err(Error::MalformedPoset(
                    "a class mixes chain lengths or endpoints".into(),
                ));
            }
        }
        classes.sort_by(|x, y| {
            x.1.rank
                .cmp(&y.1.rank)
                .then_with(|| lin.cmp_words(&x.0, &y.0))
        });
        let classes: Vec<ChainClass> = classes.into_iter().map(|(_, c)| c).collect();

        let mut class_of = vec![0; chains.len()];
        for (k, class) in classes.iter().enumerate() {
            for &c in &class.members {
                class_of[c] = k;
            }
        }
        let mut cover_labels: HashMap<(usize, usize), BTreeSet<GoodPairLabel>> = HashMap::new();
        for c in 1..chains.len() {
            let parent = chains.parent(c).expect("non-root chains have parents");
            let label = chains.nodes[c].label.expect("non-root chains have labels");
            cover_labels
                .entry((class_of[parent], class_of[c]))
                .or_default()
                .insert(label);
        }
        let mut covers: Vec<DualCover> = cover_labels
            .into_iter()
            .map(|((lo, hi), labels)| DualCover {
                lo,
                hi,
                labels: labels.into_iter().collect(),
            })
            .collect();
        covers.sort_by_key(|c| (c.lo, c.hi));
        let pairs: Vec<(usize, usize)> = covers.iter().map(|c| (c.lo, c.hi)).collect();
        let order = GradedPoset::new(classes.iter().map(|c| c.rank).collect(), &pairs)?;
        Ok(WhitneyDual {
            n: p.n(),
            chains,
            classes,
            class_of,
            switches,
            covers,
            order,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn chains(&self) -> &ChainPoset {
        &self.chains
    }

    pub fn classes(&self) -> &[ChainClass] {
        &self.classes
    }

    pub fn class(&self, k: usize) -> &ChainClass {
        &self.classes[k]
    }

    /// Class containing chain `c` of the chain poset.
    pub fn class_of(&self, c: usize) -> usize {
        self.class_of[c]
    }

    /// Switch edges `(c, c')`, directed from the chain with the ascent to
    /// the chain with the two labels exchanged.
    pub fn switches(&self) -> &[(usize, usize)] {
        &self.switches
    }

    pub fn covers(&self) -> &[DualCover] {
        &self.covers
    }

    pub fn order(&self) -> &GradedPoset {
        &self.order
    }

    /// Canonical label word of class `k`, e.g. `(2,2)(1,1)`.
    pub fn word(&self, k: usize) -> String {
        word_string(&self.chains.labels(self.classes[k].canonical))
    }

    pub fn rank_polynomial(&self) -> IntPolynomial {
        self.order.rank_polynomial()
    }

    pub fn characteristic_polynomial(&self) -> IntPolynomial {
        self.order
            .characteristic_polynomial()
            .expect("the empty chain class is the minimum")
    }

    /// Members of class `k` with no outgoing switch edge.
    pub fn sinks(&self, k: usize) -> Vec<usize> {
        let sources: HashSet<usize> = self.switches.iter().map(|e| e.0).collect();
        self.classes[k]
            .members
            .iter()
            .copied()
            .filter(|c| !sources.contains(c))
            .collect()
    }

    /// Classes of maximal chains of `P_n`.
    pub fn top_classes(&self) -> Vec<usize> {
        let top = self.chains.top;
        (0..self.len())
            .filter(|&k| self.classes[k].top == top)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let doc = DualJson {
            n: self.n,
            elements: (0..self.len())
                .map(|k| DualElementJson {
                    id: k,
                    rank: self.classes[k].rank,
                    word: self.word(k),
                    size: self.classes[k].members.len(),
                })
                .collect(),
            covers: self
                .covers
                .iter()
                .map(|c| DualCoverJson {
                    lo: c.lo,
                    hi: c.hi,
                    labels: c
                        .labels
                        .iter()
                        .map(|l| [l.lower as usize, l.upper as usize])
                        .collect(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("dual serialises");
        out.push('\n');
        out
    }

    /// Graphviz rendering; edges carrying the same label share a style.
    pub fn to_dot(&self) -> String {
        let all_labels: BTreeSet<GoodPairLabel> = self
            .covers
            .iter()
            .flat_map(|c| c.labels.iter().copied())
            .collect();
        let style_of: HashMap<GoodPairLabel, usize> = all_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (*l, i))
            .collect();
        let mut out = String::new();
        let _ = writeln!(out, "digraph Q{} {{", self.n);
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
        for k in 0..self.len() {
            let word = self.word(k);
            let shown = if word.is_empty() {
                "0̂".to_string()
            } else {
                word
            };
            let _ = writeln!(out, "  q{k} [label=\"{shown}\"];");
        }
        for c in &self.covers {
            for l in &c.labels {
                let s = style_of[l];
                let _ = writeln!(
                    out,
                    "  q{} -> q{} [label=\"{},{}\", style={}, color={}];",
                    c.lo,
                    c.hi,
                    l.lower,
                    l.upper,
                    DOT_STYLES[s % DOT_STYLES.len()],
                    DOT_COLORS[s % DOT_COLORS.len()]
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Builds `Q_λ(P_n)` with the default size cap.
pub fn whitney_dual(p: &QuotientPoset) -> Result<WhitneyDual> {
    WhitneyDual::build(p)
}

/// Rank numbers of `q` are the absolute first-kind Whitney numbers of `p`,
/// and vice versa.
pub fn verify_whitney_duality(p: &QuotientPoset, q: &WhitneyDual) -> bool {
    q.rank_polynomial() == p.characteristic_polynomial().abs()
        && q.characteristic_polynomial().abs() == p.rank_polynomial()
}

/// Every class has exactly one member without an ascent, and that member
/// is the only sink of the switch graph restricted to the class.
pub fn unique_sinks(q: &WhitneyDual) -> bool {
    (0..q.len()).all(|k| {
        let sinks = q.sinks(k);
        sinks.len() == 1 && ascents(&q.chains.labels(sinks[0])).is_empty()
    })
}

/// EW checks: the ER property on every interval, the rank-two switching
/// property at every ascent, and distinct label words for distinct 0̂-rooted
/// saturated chains.
pub fn verify_ew(p: &QuotientPoset) -> Report {
    let mut findings = verify_el(p, Linearization::LowerFirst).findings;
    for f in &mut findings {
        f.detail = format!("ER: {}", f.detail);
    }

    for x in 0..p.len() {
        for c1 in p.up_covers(x) {
            for c2 in p.up_covers(c1.hi) {
                if !c1.label.product_lt(&c2.label) {
                    continue;
                }
                let witnesses: Vec<usize> = p
                    .up_covers(x)
                    .filter(|d| d.label == c2.label)
                    .filter(|d| p.cover_between(d.hi, c2.hi).map(|e| e.label) == Some(c1.label))
                    .map(|d| d.hi)
                    .collect();
                let ok = witnesses.len() == 1 && witnesses[0] != c1.hi;
                findings.push(IntervalFinding {
                    interval: [x, c2.hi],
                    status: if ok { Status::Ok } else { Status::Fail },
                    detail: format!(
                        "switch: {}{} has {} partners",
                        c1.label,
                        c2.label,
                        witnesses.len()
                    ),
                });
            }
        }
    }

    let bottom = p.bottom();
    let mut seen: HashSet<Vec<GoodPairLabel>> = HashSet::new();
    for y in 0..p.len() {
        let chains = maximal_chains(p, bottom, y).expect("bottom is below everything");
        let total = chains.len();
        let fresh = chains
            .into_iter()
            .filter(|c| seen.insert(c.labels.clone()))
            .count();
        findings.push(IntervalFinding {
            interval: [bottom, y],
            status: if fresh == total {
                Status::Ok
            } else {
                Status::Fail
            },
            detail: format!("words: {fresh} of {total} chain words are new"),
        });
    }
    Report::from_findings(findings)
}
