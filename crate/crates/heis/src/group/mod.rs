//! Models of the rank-2 Heisenberg group and its 3-dimensional subgroup.
//!
//! Two models are used throughout the crate:
//!
//! * the *polarized* integer model: `Z^5` with the product
//!   `(a,b,c,d,e) * (a',b',c',d',e') = (a+a', b+b', c+c', d+d', e+e'+a c'+b d')`,
//!   which restricts to the integer lattice and drives all word-metric
//!   computations;
//! * the *symmetric* real model, where the correction term is the averaged
//!   commutator form and the group is closed under the anisotropic scaling
//!   `(x1,x2,y1,y2,z) -> (t x1, t x2, t y1, t y2, t^2 z)`.
//!
//! [`polarized_to_symmetric`] is the group isomorphism between the two; it is
//! exact on integer points (all values are integers or half-integers).

mod continuous;
mod discrete;
#[cfg(test)]
mod tests;
mod word;

pub use continuous::{polarized_to_symmetric, ContinuousPoint};
pub use discrete::{DiscretePoint, DiscretePoint3, KeyBuildHasher, LatticePoint};
pub use word::{growth_exponent, word_ball, word_dist, Ball, WordBand};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    /// A coordinate left the range representable by the packed 64-bit key.
    #[error("coordinate out of packable range: {0}")]
    Unpackable(String),
    /// A search exceeded its node budget before finishing.
    #[error("node budget {budget} exhausted (explored {explored}, radius reached {radius})")]
    NodeBudget {
        budget: usize,
        explored: usize,
        radius: u32,
    },
    /// A continuous-model input had a NaN or infinite coordinate.
    #[error("non-finite coordinate in continuous point")]
    NonFinite,
}
