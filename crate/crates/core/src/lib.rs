//! The quotient order `P_n` on lattice path matroids.
//!
//! * [`lpm`]: lattice path matroids, good pairs and the quotient test.
//! * [`poset`]: `P_n` with its good-pair labelled Hasse diagram, Möbius
//!   functions and Whitney numbers.
//! * [`shelling`]: EL-labeling verification, falling chains, lexicographic
//!   shellings of the order complex.
//! * [`perm`]: maximal chains as pairs of permutations, Lehmer codes and the
//!   pruned enumeration of falling chains.
//! * [`whitney`]: EW-labeling verification and the Whitney dual built from
//!   0̂-rooted saturated chains.

pub mod error;
pub mod graded;
pub mod limits;
pub mod lpm;
pub mod perm;
pub mod polynomial;
pub mod poset;
pub mod shelling;
pub mod whitney;

pub use error::{Error, Result};
pub use graded::GradedPoset;
pub use limits::Limits;
pub use lpm::{GoodPairLabel, Lpm, MatroidClass};
pub use perm::{LehmerCode, Perm, PermPair};
pub use polynomial::IntPolynomial;
pub use poset::{Cover, QuotientPoset};
pub use shelling::LabeledChain;
pub use whitney::{ChainPoset, WhitneyDual};
