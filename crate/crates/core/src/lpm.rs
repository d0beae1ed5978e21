//! Lattice path matroids on `[n]`, their good pairs and the quotient test.
//!
//! An LPM `M[U, L]` is stored as two bit masks over `[n]` (bit `e` set when
//! element `e` is a north step of the path). Everything the quotient order
//! needs is index arithmetic on the sorted north-step sets, so the path
//! picture is never materialised.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest ground set an [`Lpm`] can be built on.
pub const MAX_GROUND_SET: usize = 31;

/// Default bound for the `3^n` rank-difference oracle.
pub const DEFAULT_ORACLE_MAX_N: usize = 8;

/// A lattice path matroid `M[U, L]` on `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lpm {
    n: u8,
    upper: u32,
    lower: u32,
}

/// Label of a cover relation: the lower-path element `ℓ` and the upper-path
/// element `u` removed together.
///
/// The label poset is the product order on `(ℓ, u)`. The derived `Ord` is
/// the lexicographic order (ℓ first), which is a linear extension of it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GoodPairLabel {
    pub lower: u8,
    pub upper: u8,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MatroidClass {
    Uniform,
    Schubert,
    Generic,
}

#[inline]
fn mask_of(n: usize) -> u32 {
    (((1u64 << (n + 1)) - 1) as u32) & !1
}

#[inline]
fn elements(mask: u32) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let e = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(e)
        }
    })
}

/// 1-based position of `e` inside the sorted set `mask`.
#[inline]
fn position(mask: u32, e: usize) -> usize {
    (mask & ((1u32 << e) - 1)).count_ones() as usize + 1
}

/// `u_i <= ℓ_i` for every `i`, phrased as prefix counts.
fn noncrossing(n: usize, upper: u32, lower: u32) -> bool {
    let mut seen_upper = 0;
    let mut seen_lower = 0;
    for t in 1..=n {
        seen_upper += (upper >> t) & 1;
        seen_lower += (lower >> t) & 1;
        if seen_lower > seen_upper {
            return false;
        }
    }
    true
}

fn elements_to_mask(n: usize, items: &[usize], which: &str) -> Result<u32> {
    let mut mask = 0u32;
    for &e in items {
        if e == 0 || e > n {
            return Err(Error::InvalidLpm(format!(
                "{which} element {e} is outside 1..={n}"
            )));
        }
        if mask & (1 << e) != 0 {
            return Err(Error::InvalidLpm(format!("{which} repeats element {e}")));
        }
        mask |= 1 << e;
    }
    Ok(mask)
}

impl GoodPairLabel {
    pub fn new(lower: usize, upper: usize) -> Self {
        GoodPairLabel {
            lower: lower as u8,
            upper: upper as u8,
        }
    }

    /// `self <= other` in the product order.
    pub fn product_le(&self, other: &GoodPairLabel) -> bool {
        self.lower <= other.lower && self.upper <= other.upper
    }

    /// Strict part of the product order.
    pub fn product_lt(&self, other: &GoodPairLabel) -> bool {
        self.product_le(other) && self != other
    }

    /// Lexicographic comparison with the upper element first, the other
    /// natural linear extension of the product order.
    pub fn cmp_upper_first(&self, other: &GoodPairLabel) -> Ordering {
        (self.upper, self.lower).cmp(&(other.upper, other.lower))
    }
}

impl fmt::Display for GoodPairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lower, self.upper)
    }
}

impl Lpm {
    /// Builds `M[U, L]` on `[n]`. Input sequences may be unsorted; they are
    /// normalised to increasing order.
    pub fn new(n: usize, upper: &[usize], lower: &[usize]) -> Result<Lpm> {
        if n > MAX_GROUND_SET {
            return Err(Error::OutOfRange {
                what: "n",
                value: n,
                min: 0,
                max: MAX_GROUND_SET,
            });
        }
        if upper.len() != lower.len() {
            return Err(Error::InvalidLpm(format!(
                "|U| = {} but |L| = {}",
                upper.len(),
                lower.len()
            )));
        }
        let u = elements_to_mask(n, upper, "U")?;
        let l = elements_to_mask(n, lower, "L")?;
        Self::from_masks(n, u, l)
    }

    pub(crate) fn from_masks(n: usize, upper: u32, lower: u32) -> Result<Lpm> {
        if upper & !mask_of(n) != 0 || lower & !mask_of(n) != 0 {
            return Err(Error::InvalidLpm("element outside the ground set".into()));
        }
        if upper.count_ones() != lower.count_ones() {
            return Err(Error::InvalidLpm("|U| != |L|".into()));
        }
        if !noncrossing(n, upper, lower) {
            return Err(Error::InvalidLpm(format!(
                "paths cross: U = {:?}, L = {:?}",
                elements(upper).collect::<Vec<_>>(),
                elements(lower).collect::<Vec<_>>()
            )));
        }
        Ok(Lpm {
            n: n as u8,
            upper,
            lower,
        })
    }

    /// The rank-0 matroid `U_{0,n}`.
    pub fn zero(n: usize) -> Lpm {
        Lpm {
            n: n as u8,
            upper: 0,
            lower: 0,
        }
    }

    /// The free matroid `U_{n,n}`.
    pub fn free(n: usize) -> Lpm {
        Lpm {
            n: n as u8,
            upper: mask_of(n),
            lower: mask_of(n),
        }
    }

    /// Every LPM on `[n]`, in canonical order.
    pub fn all(n: usize) -> Vec<Lpm> {
        let mut by_rank: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        for s in 0..(1u32 << n) {
            by_rank[s.count_ones() as usize].push(s << 1);
        }
        let mut out = Vec::new();
        for subsets in &by_rank {
            for &u in subsets {
                for &l in subsets {
                    if noncrossing(n, u, l) {
                        out.push(Lpm {
                            n: n as u8,
                            upper: u,
                            lower: l,
                        });
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn ground_size(&self) -> usize {
        self.n as usize
    }

    pub fn rank(&self) -> usize {
        self.upper.count_ones() as usize
    }

    pub fn upper(&self) -> Vec<usize> {
        elements(self.upper).collect()
    }

    pub fn lower(&self) -> Vec<usize> {
        elements(self.lower).collect()
    }

    pub(crate) fn ground_mask(&self) -> u32 {
        mask_of(self.n as usize)
    }

    /// All bases, each sorted, in lexicographic order.
    pub fn bases(&self) -> Vec<Vec<usize>> {
        self.basis_masks()
            .into_iter()
            .map(|b| elements(b).collect())
            .collect()
    }

    pub(crate) fn basis_masks(&self) -> Vec<u32> {
        let u = self.upper();
        let l = self.lower();
        let mut out = Vec::new();
        fn rec(i: usize, prev: usize, acc: u32, u: &[usize], l: &[usize], out: &mut Vec<u32>) {
            if i == u.len() {
                out.push(acc);
                return;
            }
            for b in u[i].max(prev + 1)..=l[i] {
                rec(i + 1, b, acc | (1 << b), u, l, out);
            }
        }
        rec(0, 0, 0, &u, &l, &mut out);
        out
    }

    /// Matroid rank of `a`: the largest intersection with a basis.
    pub fn rank_of_subset(&self, a: &[usize]) -> Result<usize> {
        let mut mask = 0u32;
        for &e in a {
            if e == 0 || e > self.ground_size() {
                return Err(Error::NotAMember {
                    element: e,
                    which: "the ground set",
                });
            }
            mask |= 1 << e;
        }
        Ok(self.rank_of_mask(mask))
    }

    pub(crate) fn rank_of_mask(&self, mask: u32) -> usize {
        self.basis_masks()
            .into_iter()
            .map(|b| (b & mask).count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Whether `(ℓ, u)` is a good pair: with `ℓ = ℓ_i` and `u = u_j`,
    /// `i <= j` and `u_j - ℓ_i <= j - i`.
    pub fn is_good_pair(&self, lower: usize, upper: usize) -> Result<bool> {
        if lower == 0 || lower > self.ground_size() || self.lower & (1 << lower) == 0 {
            return Err(Error::NotAMember {
                element: lower,
                which: "L",
            });
        }
        if upper == 0 || upper > self.ground_size() || self.upper & (1 << upper) == 0 {
            return Err(Error::NotAMember {
                element: upper,
                which: "U",
            });
        }
        Ok(self.good_unchecked(lower, upper))
    }

    #[inline]
    fn good_unchecked(&self, lower: usize, upper: usize) -> bool {
        let i = position(self.lower, lower) as i64;
        let j = position(self.upper, upper) as i64;
        i <= j && (upper as i64 - lower as i64) <= j - i
    }

    /// All good pairs of the matroid, sorted.
    pub fn good_pairs(&self) -> Vec<GoodPairLabel> {
        let mut out = Vec::new();
        for l in elements(self.lower) {
            for u in elements(self.upper) {
                if self.good_unchecked(l, u) {
                    out.push(GoodPairLabel::new(l, u));
                }
            }
        }
        out
    }

    /// `M[U ∖ {u}, L ∖ {ℓ}]`, when both elements are present and the
    /// resulting paths do not cross.
    pub fn remove_pair(&self, label: GoodPairLabel) -> Option<Lpm> {
        let (l, u) = (1u32 << label.lower, 1u32 << label.upper);
        if self.lower & l == 0 || self.upper & u == 0 {
            return None;
        }
        Self::from_masks(self.ground_size(), self.upper & !u, self.lower & !l).ok()
    }

    /// `M[U ∪ {u}, L ∪ {ℓ}]`, when both elements are new and the result is
    /// a valid LPM.
    pub fn add_pair(&self, label: GoodPairLabel) -> Option<Lpm> {
        if label.lower == 0 || label.upper == 0 {
            return None;
        }
        let (l, u) = (1u32 << label.lower, 1u32 << label.upper);
        if self.lower & l != 0 || self.upper & u != 0 {
            return None;
        }
        Self::from_masks(self.ground_size(), self.upper | u, self.lower | l).ok()
    }

    pub fn classify(&self) -> MatroidClass {
        let k = self.rank();
        let initial = mask_of(k);
        let terminal = mask_of(self.ground_size()) & !mask_of(self.ground_size() - k);
        match (self.upper == initial, self.lower == terminal) {
            (true, true) => MatroidClass::Uniform,
            (true, false) => MatroidClass::Schubert,
            _ => MatroidClass::Generic,
        }
    }

    /// Parses the textual form `M[U;L]` (comma-separated, `-` for empty).
    pub fn parse(n: usize, text: &str) -> Result<Lpm> {
        let body = text
            .trim()
            .strip_prefix("M[")
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected M[U;L], got {text:?}")))?;
        let (u, l) = body
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing ';' in {text:?}")))?;
        let side = |s: &str| -> Result<Vec<usize>> {
            let s = s.trim();
            if s == "-" || s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad element {t:?} in {text:?}")))
                })
                .collect()
        };
        Lpm::new(n, &side(u)?, &side(l)?)
    }
}

impl PartialOrd for Lpm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: ground set size, rank, then `U` and `L` compared as
/// increasing sequences.
impl Ord for Lpm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.rank().cmp(&other.rank()))
            .then_with(|| elements(self.upper).cmp(elements(other.upper)))
            .then_with(|| elements(self.lower).cmp(elements(other.lower)))
    }
}

impl fmt::Display for Lpm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |mask: u32| {
            if mask == 0 {
                "-".to_string()
            } else {
                elements(mask)
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            }
        };
        write!(f, "M[{};{}]", side(self.upper), side(self.lower))
    }
}

impl fmt::Debug for Lpm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Same as [`Lpm::new`].
pub fn make_lpm(n: usize, upper: &[usize], lower: &[usize]) -> Result<Lpm> {
    Lpm::new(n, upper, lower)
}

fn check_ground(a: &Lpm, b: &Lpm) -> Result<()> {
    if a.n != b.n {
        return Err(Error::GroundSetMismatch(a.ground_size(), b.ground_size()));
    }
    Ok(())
}

/// The greedy pairing of `(L ∖ L', U ∖ U')`: both differences sorted
/// increasingly and matched position by position.
pub fn greedy_pairing(m: &Lpm, sub: &Lpm) -> Result<Vec<GoodPairLabel>> {
    check_ground(m, sub)?;
    if sub.upper & !m.upper != 0 || sub.lower & !m.lower != 0 {
        return Err(Error::NotNested);
    }
    let du = m.upper & !sub.upper;
    let dl = m.lower & !sub.lower;
    if du.count_ones() != dl.count_ones() {
        return Err(Error::NotNested);
    }
    Ok(elements(dl)
        .zip(elements(du))
        .map(|(l, u)| GoodPairLabel::new(l, u))
        .collect())
}

/// `sub <=_q m`: nested path sets and a good greedy pairing, where each pair
/// is checked in the matroid left after removing the earlier pairs.
pub fn is_quotient(sub: &Lpm, m: &Lpm) -> Result<bool> {
    check_ground(sub, m)?;
    if sub.upper & !m.upper != 0 || sub.lower & !m.lower != 0 {
        return Ok(false);
    }
    let pairing = greedy_pairing(m, sub)?;
    let mut current = *m;
    for label in pairing {
        if !current.good_unchecked(label.lower as usize, label.upper as usize) {
            return Ok(false);
        }
        current = match current.remove_pair(label) {
            Some(next) => next,
            None => return Ok(false),
        };
    }
    Ok(true)
}

/// Ranks of every subset of `[n]`, indexed by bit mask.
pub(crate) fn rank_table(m: &Lpm) -> Vec<u8> {
    let bases = m.basis_masks();
    let full = m.ground_mask();
    let mut table = vec![0u8; (full as usize) + 1];
    // iterate submasks of `full`
    let mut a = full;
    loop {
        table[a as usize] = bases
            .iter()
            .map(|b| (b & a).count_ones() as u8)
            .max()
            .unwrap_or(0);
        if a == 0 {
            break;
        }
        a = (a - 1) & full;
    }
    table
}

/// Quotient test by the rank-difference characterisation:
/// `r_M(B) - r_M(A) >= r_{M'}(B) - r_{M'}(A)` for all `A ⊆ B ⊆ [n]`.
pub fn is_quotient_oracle(sub: &Lpm, m: &Lpm) -> Result<bool> {
    is_quotient_oracle_bounded(sub, m, DEFAULT_ORACLE_MAX_N)
}

pub fn is_quotient_oracle_bounded(sub: &Lpm, m: &Lpm, max_n: usize) -> Result<bool> {
    check_ground(sub, m)?;
    if m.ground_size() > max_n {
        return Err(Error::OutOfRange {
            what: "oracle n",
            value: m.ground_size(),
            min: 0,
            max: max_n,
        });
    }
    Ok(quotient_by_tables(
        &rank_table(sub),
        &rank_table(m),
        m.ground_mask(),
    ))
}

pub(crate) fn quotient_by_tables(sub: &[u8], m: &[u8], full: u32) -> bool {
    let mut b = full;
    loop {
        let mut a = b;
        loop {
            let lhs = m[b as usize] as i32 - m[a as usize] as i32;
            let rhs = sub[b as usize] as i32 - sub[a as usize] as i32;
            if lhs < rhs {
                return false;
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
        if b == 0 {
            break;
        }
        b = (b - 1) & full;
    }
    true
}
