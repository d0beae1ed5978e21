//! Finite graded posets given by their Hasse diagram.
//!
//! Elements are `0..len`, numbered so that ranks never decrease with the
//! index; every cover raises the rank by exactly one. Order ideals and
//! Möbius rows are computed on first use and then frozen.

use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::polynomial::IntPolynomial;

#[derive(Clone, Debug)]
pub struct GradedPoset {
    ranks: Vec<usize>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    upsets: OnceLock<Vec<FixedBitSet>>,
    downsets: OnceLock<Vec<FixedBitSet>>,
    mobius_rows: Vec<OnceLock<Vec<i64>>>,
}

impl GradedPoset {
    pub fn new(ranks: Vec<usize>, covers: &[(usize, usize)]) -> Result<Self> {
        let len = ranks.len();
        if ranks.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::MalformedPoset(
                "element indices must be sorted by rank".into(),
            ));
        }
        let mut up = vec![Vec::new(); len];
        let mut down = vec![Vec::new(); len];
        for &(lo, hi) in covers {
            if lo >= len || hi >= len {
                return Err(Error::MalformedPoset(format!(
                    "cover ({lo}, {hi}) refers to a missing element"
                )));
            }
            if ranks[hi] != ranks[lo] + 1 {
                return Err(Error::MalformedPoset(format!(
                    "cover ({lo}, {hi}) does not raise the rank by one"
                )));
            }
            up[lo].push(hi);
            down[hi].push(lo);
        }
        for list in up.iter_mut().chain(down.iter_mut()) {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedPoset("repeated cover".into()));
            }
        }
        Ok(GradedPoset {
            ranks,
            up,
            down,
            upsets: OnceLock::new(),
            downsets: OnceLock::new(),
            mobius_rows: (0..len).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank(&self, x: usize) -> usize {
        self.ranks[x]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.last().copied().unwrap_or(0)
    }

    pub fn up_covers(&self, x: usize) -> &[usize] {
        &self.up[x]
    }

    pub fn down_covers(&self, x: usize) -> &[usize] {
        &self.down[x]
    }

    pub fn cover_count(&self) -> usize {
        self.up.iter().map(Vec::len).sum()
    }

    /// The unique minimal element, if there is exactly one.
    pub fn bottom(&self) -> Option<usize> {
        let mut minimal = (0..self.len()).filter(|&x| self.down[x].is_empty());
        match (minimal.next(), minimal.next()) {
            (Some(x), None) => Some(x),
            _ => None,
        }
    }

    /// The unique maximal element, if there is exactly one.
    pub fn top(&self) -> Option<usize> {
        let mut maximal = (0..self.len()).filter(|&x| self.up[x].is_empty());
        match (maximal.next(), maximal.next()) {
            (Some(x), None) => Some(x),
            _ => None,
        }
    }

    fn bottom_or_err(&self) -> Result<usize> {
        self.bottom()
            .ok_or_else(|| Error::MalformedPoset("no unique minimum".into()))
    }

    pub fn upsets(&self) -> &[FixedBitSet] {
        self.upsets.get_or_init(|| {
            let len = self.len();
            let mut sets = vec![FixedBitSet::with_capacity(len); len];
            for x in (0..len).rev() {
                let mut set = FixedBitSet::with_capacity(len);
                set.insert(x);
                for &y in &self.up[x] {
                    set.union_with(&sets[y]);
                }
                sets[x] = set;
            }
            sets
        })
    }

    pub fn downsets(&self) -> &[FixedBitSet] {
        self.downsets.get_or_init(|| {
            let len = self.len();
            let mut sets = vec![FixedBitSet::with_capacity(len); len];
            for y in 0..len {
                let mut set = FixedBitSet::with_capacity(len);
                set.insert(y);
                for &x in &self.down[y] {
                    set.union_with(&sets[x]);
                }
                sets[y] = set;
            }
            sets
        })
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        x == y || (self.ranks[x] < self.ranks[y] && self.upsets()[x].contains(y))
    }

    /// Elements of `[x, y]` in increasing index order.
    pub fn interval(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        if !self.leq(x, y) {
            return Err(Error::Incomparable(x, y));
        }
        Ok(self.upsets()[x].intersection(&self.downsets()[y]).collect())
    }

    /// `μ(x, z)` for every `z`; zero where `z` is not above `x`.
    pub fn mobius_row(&self, x: usize) -> &[i64] {
        self.mobius_rows[x].get_or_init(|| {
            let upset = &self.upsets()[x];
            let downsets = self.downsets();
            let mut row = vec![0i64; self.len()];
            row[x] = 1;
            for z in upset.ones().filter(|&z| z != x) {
                let sum: i64 = upset
                    .intersection(&downsets[z])
                    .filter(|&w| w != z)
                    .map(|w| row[w])
                    .sum();
                row[z] = -sum;
            }
            row
        })
    }

    /// Möbius function by the defining recursion
    /// `μ(x, y) = -Σ_{x <= z < y} μ(x, z)`.
    pub fn mobius(&self, x: usize, y: usize) -> Result<i64> {
        if !self.leq(x, y) {
            return Err(Error::Incomparable(x, y));
        }
        Ok(self.mobius_row(x)[y])
    }

    /// Möbius function by Philip Hall's theorem: the alternating count of
    /// chains `x = z_0 < z_1 < ... < z_k = y`.
    pub fn mobius_hall(&self, x: usize, y: usize, max_elements: usize) -> Result<i64> {
        let elems = self.interval(x, y)?;
        if elems.len() > max_elements {
            return Err(Error::BudgetExceeded {
                what: "interval size for chain counting",
                size: elems.len(),
                budget: max_elements,
            });
        }
        let depth = self.ranks[y] - self.ranks[x];
        // chains[i][k]: chains of length k from x ending at elems[i]
        let mut chains = vec![vec![0u128; depth + 1]; elems.len()];
        chains[0][0] = 1;
        for i in 1..elems.len() {
            let z = elems[i];
            for j in 0..i {
                let w = elems[j];
                if self.ranks[w] < self.ranks[z] && self.upsets()[w].contains(z) {
                    for k in 1..=depth {
                        chains[i][k] += chains[j][k - 1];
                    }
                }
            }
        }
        let last = &chains[elems.len() - 1];
        let total: i128 = last
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i128 } else { -(c as i128) })
            .sum();
        Ok(total as i64)
    }

    /// `a_i`: number of elements of rank `i`.
    pub fn rank_polynomial(&self) -> IntPolynomial {
        let mut coeffs = vec![0i64; self.max_rank() + 1];
        for &r in &self.ranks {
            coeffs[r] += 1;
        }
        IntPolynomial::new(coeffs)
    }

    /// `b_i = Σ_{rank x = i} μ(0̂, x)`.
    pub fn characteristic_polynomial(&self) -> Result<IntPolynomial> {
        let bottom = self.bottom_or_err()?;
        let row = self.mobius_row(bottom);
        let mut coeffs = vec![0i64; self.max_rank() + 1];
        for (x, &mu) in row.iter().enumerate() {
            coeffs[self.ranks[x]] += mu;
        }
        Ok(IntPolynomial::new(coeffs))
    }

    /// Number of maximal chains from the minimum to the maximum, by path
    /// counting over the Hasse diagram.
    pub fn count_maximal_chains(&self) -> Result<u128> {
        let bottom = self.bottom_or_err()?;
        let top = self
            .top()
            .ok_or_else(|| Error::MalformedPoset("no unique maximum".into()))?;
        let mut paths = vec![0u128; self.len()];
        paths[bottom] = 1;
        for x in 0..self.len() {
            let p = paths[x];
            if p == 0 {
                continue;
            }
            for &y in &self.up[x] {
                paths[y] += p;
            }
        }
        Ok(paths[top])
    }

    /// Whether every maximal chain has the same length (unique bottom and
    /// top, and no element other than those is extremal).
    pub fn is_bounded_graded(&self) -> bool {
        match (self.bottom(), self.top()) {
            (Some(b), Some(t)) => self.ranks[b] == 0 && self.leq(b, t),
            _ => false,
        }
    }
}
