/// Size guards for the super-exponential computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for which `P_n` is built.
    pub poset_max_n: usize,
    /// Largest `n` for the `3^n` rank-difference oracle.
    pub oracle_max_n: usize,
    /// Largest `n` for falling-chain enumeration over permutation pairs.
    pub falling_max_n: usize,
    /// Largest number of facets handed to the shelling checker.
    pub shelling_max_facets: usize,
    /// Largest `n` for the chain poset and the Whitney dual.
    pub chain_poset_max_n: usize,
    /// Largest interval (in elements) for chain counting in Hall's formula.
    pub hall_max_elements: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            poset_max_n: 9,
            oracle_max_n: crate::lpm::DEFAULT_ORACLE_MAX_N,
            falling_max_n: 9,
            shelling_max_facets: 5000,
            chain_poset_max_n: 4,
            hall_max_elements: 2000,
        }
    }
}

impl Limits {
    pub(crate) fn check(
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    ) -> crate::Result<()> {
        if value < min || value > max {
            return Err(crate::Error::OutOfRange {
                what,
                value,
                min,
                max,
            });
        }
        Ok(())
    }
}
