//! Maximal chains of `P_n` as pairs of permutations.
//!
//! A maximal chain read bottom-up has labels `(σ(1), τ(1)), ..., (σ(n),
//! τ(n))` with `σ, τ ∈ S_n`. The pair is a chain exactly when the Lehmer
//! code inequalities hold, and it is falling exactly when the ascent sets of
//! `σ` and `τ` are disjoint.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::lpm::GoodPairLabel;
use crate::poset::{m_k1, QuotientPoset};
use crate::shelling::falling_chains;

/// Largest `n` a permutation may have (values are stored as `u8` and used
/// as bit positions of a `u32`).
pub const MAX_PERM_N: usize = 31;

/// A permutation in one-line notation, `w(1) ... w(n)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

/// Lehmer code `L_j(w) = #{k > j : w(k) < w(j)}` and cocode `L'(w) = L(w⁻¹)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LehmerCode {
    pub code: Vec<usize>,
    pub cocode: Vec<usize>,
}

/// `(σ, τ)`: lower-path and upper-path labels of a maximal chain, bottom-up.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermPair {
    pub sigma: Perm,
    pub tau: Perm,
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl Perm {
    pub fn new(values: Vec<usize>) -> Result<Perm> {
        let n = values.len();
        if n > MAX_PERM_N {
            return Err(Error::InvalidPermutation(format!(
                "size {n} exceeds {MAX_PERM_N}"
            )));
        }
        let mut seen = 0u32;
        for &v in &values {
            if v == 0 || v > n || seen & (1 << v) != 0 {
                return Err(Error::InvalidPermutation(format!("{values:?}")));
            }
            seen |= 1 << v;
        }
        Ok(Perm(values.into_iter().map(|v| v as u8).collect()))
    }

    pub fn identity(n: usize) -> Perm {
        Perm((1..=n as u8).collect())
    }

    /// The longest element `w_0 = n (n-1) ... 1`.
    pub fn longest(n: usize) -> Perm {
        Perm((1..=n as u8).rev().collect())
    }

    /// The adjacent transposition `s_i = (i i+1)`, `1 <= i < n`.
    pub fn simple(n: usize, i: usize) -> Result<Perm> {
        Limits::check("i", i, 1, n.saturating_sub(1))?;
        let mut p = Self::identity(n);
        p.0.swap(i - 1, i);
        Ok(p)
    }

    /// All of `S_n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut v: Vec<u8> = (1..=n as u8).collect();
        let mut out = vec![Perm(v.clone())];
        while next_permutation(&mut v) {
            out.push(Perm(v.clone()));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w(j)` for 1-based `j`.
    pub fn at(&self, j: usize) -> usize {
        self.0[j - 1] as usize
    }

    pub fn values(&self) -> Vec<usize> {
        self.0.iter().map(|&v| v as usize).collect()
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.len()];
        for (j, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = j as u8 + 1;
        }
        Perm(inv)
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch(self.len(), other.len()));
        }
        Ok(Perm(
            other.0.iter().map(|&v| self.0[v as usize - 1]).collect(),
        ))
    }

    /// `w_0 w w_0`, i.e. `j ↦ n + 1 - w(n + 1 - j)`.
    pub fn conjugate_by_longest(&self) -> Perm {
        let n = self.len() as u8;
        Perm(self.0.iter().rev().map(|&v| n + 1 - v).collect())
    }

    /// Coxeter length: number of inversions.
    pub fn length(&self) -> usize {
        lehmer(self).code.iter().sum()
    }

    /// Ascent positions `i` with `w(i) < w(i+1)`, 1-based.
    pub fn ascents(&self) -> Vec<usize> {
        (1..self.len())
            .filter(|&i| self.0[i - 1] < self.0[i])
            .collect()
    }

    fn ascent_mask(&self) -> u64 {
        self.ascents().iter().fold(0, |m, &i| m | 1 << i)
    }

    /// Position pairs `(i, j)`, `i < j`, with `w(i) > w(j)`.
    pub fn inversions(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.0[i] > self.0[j] {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    /// If `self = s_i w_0` for some `i`, returns `i`.
    pub fn as_siw0(&self) -> Option<usize> {
        let n = self.len();
        (1..n).find(|&i| siw0(n, i).as_ref() == Ok(self))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.len() <= 9 { "" } else { "," };
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// One-line notation: a digit string such as `4231`, or a comma list.
impl FromStr for Perm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Perm> {
        let s = s.trim();
        let values: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("bad permutation {s:?}")))?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Parse(format!("bad permutation {s:?}")))?
        };
        if values.is_empty() {
            return Err(Error::Parse("empty permutation".into()));
        }
        Perm::new(values)
    }
}

pub fn lehmer(w: &Perm) -> LehmerCode {
    fn code_of(v: &[u8]) -> Vec<usize> {
        (0..v.len())
            .map(|j| v[j + 1..].iter().filter(|&&x| x < v[j]).count())
            .collect()
    }
    LehmerCode {
        code: code_of(&w.0),
        cocode: code_of(&w.inverse().0),
    }
}

fn same_size(a: &Perm, b: &Perm) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// `(σ, τ) ∈ GP(n)`: `L_j(σ) >= L_j(τ)` and `L'_{σ(j)}(σ) >= L'_{τ(j)}(τ)`
/// for every `j`.
pub fn is_gp(sigma: &Perm, tau: &Perm) -> Result<bool> {
    same_size(sigma, tau)?;
    let ls = lehmer(sigma);
    let lt = lehmer(tau);
    Ok((1..=sigma.len()).all(|j| {
        ls.code[j - 1] >= lt.code[j - 1] && ls.cocode[sigma.at(j) - 1] >= lt.cocode[tau.at(j) - 1]
    }))
}

/// `(σ, τ) ∈ GP(n)` with `A(σ) ∩ A(τ) = ∅`.
pub fn is_falling_pair(sigma: &Perm, tau: &Perm) -> Result<bool> {
    Ok(is_gp(sigma, tau)? && sigma.ascent_mask() & tau.ascent_mask() == 0)
}

impl PermPair {
    pub fn new(sigma: Perm, tau: Perm) -> Result<PermPair> {
        same_size(&sigma, &tau)?;
        Ok(PermPair { sigma, tau })
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// The label word `((σ(1), τ(1)), ..., (σ(n), τ(n)))`.
    pub fn word(&self) -> Vec<GoodPairLabel> {
        self.sigma
            .0
            .iter()
            .zip(&self.tau.0)
            .map(|(&l, &u)| GoodPairLabel::new(l as usize, u as usize))
            .collect()
    }

    pub fn is_gp(&self) -> bool {
        is_gp(&self.sigma, &self.tau).expect("sizes agree")
    }

    pub fn is_falling(&self) -> bool {
        is_falling_pair(&self.sigma, &self.tau).expect("sizes agree")
    }
}

impl fmt::Display for PermPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.sigma, self.tau)
    }
}

/// The reversed and complemented chain `(w_0 σ w_0, w_0 τ w_0)`.
pub fn dual_chain(p: &PermPair) -> PermPair {
    PermPair {
        sigma: p.sigma.conjugate_by_longest(),
        tau: p.tau.conjugate_by_longest(),
    }
}

/// Depth-first search over prefixes of `τ` for a fixed `σ`.
///
/// At position `j` the chain condition only involves prefixes: with
/// `a = #{k < j : σ(k) < σ(j)}` and `b = #{k < j : τ(k) < τ(j)}` it reads
/// `a <= b` and `τ(j) - b <= σ(j) - a`, which is the Lehmer form rewritten
/// through `#{k < j : w(k) < w(j)} = w(j) - 1 - L_j(w)`.
struct TauSearch<'a> {
    sigma: &'a [u8],
    smaller_before: Vec<u8>,
    rising: Vec<bool>,
    last_tau: Option<u8>,
}

impl<'a> TauSearch<'a> {
    fn new(sigma: &'a [u8], last_tau: Option<u8>) -> Self {
        let smaller_before = (0..sigma.len())
            .map(|j| sigma[..j].iter().filter(|&&x| x < sigma[j]).count() as u8)
            .collect();
        let rising = (0..sigma.len())
            .map(|j| j > 0 && sigma[j - 1] < sigma[j])
            .collect();
        TauSearch {
            sigma,
            smaller_before,
            rising,
            last_tau,
        }
    }

    fn run(&self, visit: &mut dyn FnMut(&[u8])) {
        let n = self.sigma.len();
        let mut tau = vec![0u8; n];
        self.step(0, 0, &mut tau, visit);
    }

    fn step(&self, j: usize, used: u32, tau: &mut [u8], visit: &mut dyn FnMut(&[u8])) {
        let n = self.sigma.len();
        if j == n {
            visit(tau);
            return;
        }
        let a = self.smaller_before[j] as i32;
        let s = self.sigma[j] as i32;
        let cap = if self.rising[j] {
            tau[j - 1]
        } else {
            n as u8 + 1
        };
        for v in 1..cap.min(n as u8 + 1) {
            if used & (1 << v) != 0 {
                continue;
            }
            if let Some(last) = self.last_tau {
                if (v == last) != (j == n - 1) {
                    continue;
                }
            }
            let b = (used & ((1u32 << v) - 1)).count_ones() as i32;
            if a > b || v as i32 - b > s - a {
                continue;
            }
            tau[j] = v;
            self.step(j + 1, used | (1 << v), tau, visit);
        }
    }
}

/// `σ` with `σ(1) = n` and `σ(n) = 1`, in lexicographic order; every falling
/// chain has this shape.
fn falling_sigma_candidates(n: usize) -> Vec<Vec<u8>> {
    if n == 1 {
        return vec![vec![1]];
    }
    let mut middle: Vec<u8> = (2..n as u8).collect();
    let mut out = Vec::new();
    loop {
        let mut s = Vec::with_capacity(n);
        s.push(n as u8);
        s.extend_from_slice(&middle);
        s.push(1);
        out.push(s);
        if !next_permutation(&mut middle) {
            break;
        }
    }
    out
}

/// `|F_n|`, the number of falling maximal chains of `P_n`.
pub fn count_falling(n: usize) -> Result<u64> {
    count_falling_with(n, &Limits::default())
}

pub fn count_falling_with(n: usize, limits: &Limits) -> Result<u64> {
    Limits::check("n", n, 1, limits.falling_max_n.min(MAX_PERM_N))?;
    Ok(falling_sigma_candidates(n)
        .par_iter()
        .map(|sigma| {
            let mut count = 0u64;
            TauSearch::new(sigma, None).run(&mut |_| count += 1);
            count
        })
        .sum())
}

/// All falling pairs of `P_n`, sorted by `(σ, τ)`.
pub fn list_falling(n: usize) -> Result<Vec<PermPair>> {
    list_falling_with(n, &Limits::default())
}

pub fn list_falling_with(n: usize, limits: &Limits) -> Result<Vec<PermPair>> {
    Limits::check("n", n, 1, limits.falling_max_n.min(MAX_PERM_N))?;
    let per_sigma: Vec<Vec<PermPair>> = falling_sigma_candidates(n)
        .par_iter()
        .map(|sigma| {
            let mut found = Vec::new();
            TauSearch::new(sigma, None).run(&mut |tau| {
                found.push(PermPair {
                    sigma: Perm(sigma.clone()),
                    tau: Perm(tau.to_vec()),
                })
            });
            found
        })
        .collect();
    Ok(per_sigma.into_iter().flatten().collect())
}

/// `τ` with `(σ, τ)` falling, in lexicographic order.
pub fn list_c_sigma(sigma: &Perm) -> Vec<Perm> {
    let mut out = Vec::new();
    TauSearch::new(&sigma.0, None).run(&mut |tau| out.push(Perm(tau.to_vec())));
    out
}

/// `|C_σ|`: number of `τ` making `(σ, τ)` a falling chain.
pub fn count_c_sigma(sigma: &Perm) -> u64 {
    let mut count = 0u64;
    TauSearch::new(&sigma.0, None).run(&mut |_| count += 1);
    count
}

/// `s_i w_0`: `w_0` with the values `i` and `i + 1` exchanged.
pub fn siw0(n: usize, i: usize) -> Result<Perm> {
    Perm::simple(n, i)?.compose(&Perm::longest(n))
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// Closed form for `|C_{s_i w_0}|`, `2 <= i <= n - 1`:
///
/// `n!/((n-i)(n-i+1)) + n!/(i(i+1)) + n!/(i(n-i)) + n!/2 - n!/i - n!/(n-i)
///  - (i-1)!(n-1-i)!`
pub fn closed_form_siw0(n: usize, i: usize) -> Result<i128> {
    Limits::check("n", n, 3, 30)?;
    Limits::check("i", i, 2, n - 1)?;
    let f = factorial(n);
    let (ni, ii) = ((n - i) as i128, i as i128);
    let div = |den: i128| -> i128 {
        debug_assert_eq!(f % den, 0, "{n}! / {den}");
        f / den
    };
    Ok(
        div(ni * (ni + 1)) + div(ii * (ii + 1)) + div(ii * ni) + div(2)
            - div(ii)
            - div(ni)
            - factorial(i - 1) * factorial(n - 1 - i),
    )
}

/// `|FC_k|`: falling chains of `[U_{0,n}, M_{k,1}]`. Computed on the poset
/// for `n <= 6` and through permutation pairs with `τ(n) = k` beyond.
pub fn fc_k(n: usize, k: usize) -> Result<u64> {
    Limits::check("k", k, 1, n)?;
    if n <= 6 {
        fc_k_poset(&QuotientPoset::build(n)?, k)
    } else {
        fc_k_perm(n, k)
    }
}

pub fn fc_k_poset(p: &QuotientPoset, k: usize) -> Result<u64> {
    let n = p.n();
    Limits::check("k", k, 1, n)?;
    let top = p
        .index_of(&m_k1(n, k)?)
        .ok_or_else(|| Error::MalformedPoset("M_{k,1} is not an element".into()))?;
    Ok(falling_chains(p, p.bottom(), top)?.len() as u64)
}

pub fn fc_k_perm(n: usize, k: usize) -> Result<u64> {
    Limits::check("n", n, 1, Limits::default().falling_max_n)?;
    Limits::check("k", k, 1, n)?;
    Ok(falling_sigma_candidates(n)
        .par_iter()
        .map(|sigma| {
            let mut count = 0u64;
            TauSearch::new(sigma, Some(k as u8)).run(&mut |_| count += 1);
            count
        })
        .sum())
}

/// `u ⪯_L w` in the left weak order: `w = s_{i_1} ... s_{i_k} u` with
/// lengths adding up. Left multiplication by `s_i` exchanges the values `i`
/// and `i + 1`, so this is containment of position inversion sets.
pub fn left_weak_leq(u: &Perm, w: &Perm) -> Result<bool> {
    same_size(u, w)?;
    Ok(u.inversions().iter().all(|&(a, b)| w.0[a - 1] > w.0[b - 1]))
}

/// Upper covers of `w` in the left weak order: `s_i w` with `i` before
/// `i + 1` in `w`.
pub fn left_weak_upper_covers(w: &Perm) -> Vec<Perm> {
    let n = w.len();
    (1..n)
        .filter_map(|i| {
            let s = Perm::simple(n, i).ok()?.compose(w).ok()?;
            (s.length() == w.length() + 1).then_some(s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Perm {
        s.parse().unwrap()
    }

    #[test]
    fn lehmer_examples() {
        let w = p("31542");
        let l = lehmer(&w);
        assert_eq!(l.code, vec![2, 0, 2, 1, 0]);
        assert_eq!(l.cocode, vec![1, 3, 0, 1, 0]);
        assert_eq!(w.inverse(), p("25143"));
        let id = lehmer(&Perm::identity(4));
        assert_eq!(id.code, vec![0; 4]);
        assert_eq!(id.cocode, vec![0; 4]);
        assert_eq!(lehmer(&Perm::longest(4)).code, vec![3, 2, 1, 0]);
    }

    #[test]
    fn gp_examples() {
        for s in Perm::all(4) {
            assert!(is_gp(&s, &s).unwrap());
        }
        for n in 1..=5 {
            let w0 = Perm::longest(n);
            for tau in Perm::all(n) {
                assert!(is_gp(&w0, &tau).unwrap());
                assert!(is_falling_pair(&w0, &tau).unwrap());
            }
        }
        assert!(!is_gp(&Perm::identity(3), &Perm::simple(3, 1).unwrap()).unwrap());
        assert!(is_gp(&p("12"), &p("123")).is_err());
    }

    #[test]
    fn falling_pair_examples() {
        for n in 2..=5 {
            let id = Perm::identity(n);
            assert!(!is_falling_pair(&id, &id).unwrap());
        }
        assert!(is_falling_pair(&p("4231"), &p("1324")).unwrap());
    }

    #[test]
    fn small_falling_counts() {
        assert_eq!(count_falling(1).unwrap(), 1);
        assert_eq!(count_falling(2).unwrap(), 2);
        assert_eq!(count_falling(3).unwrap(), 6);
        assert_eq!(count_falling(4).unwrap(), 25);
        assert!(count_falling(0).is_err());
        assert!(count_falling(10).is_err());
        assert_eq!(list_falling(1).unwrap()[0].to_string(), "1|1");
    }

    #[test]
    fn duality() {
        let pair = PermPair::new(p("4231"), p("1324")).unwrap();
        let d = dual_chain(&pair);
        assert!(d.is_falling());
        assert_eq!(dual_chain(&d), pair);
        let w0 = Perm::longest(4);
        let pair = PermPair::new(w0.clone(), p("2143")).unwrap();
        assert_eq!(dual_chain(&pair).sigma, w0);
        assert_eq!(dual_chain(&pair).tau, p("2143").conjugate_by_longest());
        assert_eq!(
            p("2143").conjugate_by_longest(),
            w0.compose(&p("2143")).unwrap().compose(&w0).unwrap()
        );
    }

    #[test]
    fn c_sigma_examples() {
        for n in 1..=5 {
            assert_eq!(count_c_sigma(&Perm::longest(n)), factorial(n) as u64);
        }
        assert_eq!(siw0(4, 2).unwrap(), p("4231"));
        assert_eq!(count_c_sigma(&p("4231")), 1);
        assert_eq!(list_c_sigma(&p("4231")), vec![p("1324")]);
        for n in 2..=5 {
            assert_eq!(count_c_sigma(&Perm::identity(n)), 0);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_siw0(4, 2).unwrap(), 1);
        assert_eq!(closed_form_siw0(5, 2).unwrap(), 8);
        assert_eq!(closed_form_siw0(5, 3).unwrap(), 8);
        assert!(closed_form_siw0(5, 1).is_err());
        assert!(closed_form_siw0(5, 5).is_err());
        assert_eq!(p("4231").as_siw0(), Some(2));
        assert_eq!(p("4321").as_siw0(), None);
    }

    #[test]
    fn left_weak_examples() {
        let id = Perm::identity(3);
        let w0 = Perm::longest(3);
        for w in Perm::all(3) {
            assert!(left_weak_leq(&id, &w).unwrap());
            assert!(left_weak_leq(&w, &w0).unwrap());
        }
        let s1 = Perm::simple(3, 1).unwrap();
        let s2 = Perm::simple(3, 2).unwrap();
        assert!(!left_weak_leq(&s1, &s2).unwrap());
        assert!(!left_weak_leq(&s2, &s1).unwrap());
        // s_1 · 132 = 231
        assert!(left_weak_leq(&p("132"), &p("231")).unwrap());
        assert!(!left_weak_leq(&p("132"), &p("312")).unwrap());
        assert_eq!(left_weak_upper_covers(&p("132")), vec![p("231")]);
    }

    #[test]
    fn fc_k_examples() {
        assert_eq!(fc_k(5, 1).unwrap(), 25);
        assert_eq!(fc_k_perm(5, 1).unwrap(), 25);
        let total: u64 = (1..=5).map(|k| fc_k(5, k).unwrap()).sum();
        assert_eq!(total, 140);
        assert!(fc_k(5, 0).is_err());
        assert!(fc_k(5, 6).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("4231").values(), vec![4, 2, 3, 1]);
        let big: Perm = "10,9,8,7,6,5,4,3,2,1".parse().unwrap();
        assert_eq!(big, Perm::longest(10));
        assert_eq!(big.to_string(), "10,9,8,7,6,5,4,3,2,1");
        assert!("4421".parse::<Perm>().is_err());
        assert!("".parse::<Perm>().is_err());
        assert!("4a".parse::<Perm>().is_err());
    }

    #[test]
    fn ascents_and_length() {
        let w = p("31542");
        assert_eq!(w.ascents(), vec![2]);
        assert_eq!(w.length(), 5);
        assert_eq!(Perm::longest(5).length(), 10);
        assert_eq!(Perm::all(4).len(), 24);
    }
}
