//! Exact polymorphisms of finite atomic measure spaces.
//!
//! - [`rx`]: the convolution semiring of finite measures on `ℝ×`.
//! - [`space`]: finite measure spaces, partitions, quotients, Bernoulli cubes.
//! - [`poly`]: polymorphisms, composition, the involution, conditional
//!   expectations and the weak-convergence distance.
//! - [`mellin`]: the Mellin–Markov transform and its norm bounds.
//! - [`train`]: double cosets of `S_∞` by point stabilizers and their product.
//! - [`bernoulli`]: the action of `S_∞` on the Bernoulli space, compressed
//!   operators and the polymorphism-valued functor on double cosets.
//! - [`polinf`]: triples with escaping and arriving mass on σ-finite spaces.
//! - [`gen`], [`laws`]: seeded random generators and randomized law batteries.

pub mod bernoulli;
pub mod dbl;
pub mod error;
pub mod gen;
pub mod laws;
pub mod mellin;
pub mod polinf;
pub mod poly;
pub mod rational;
pub mod rx;
pub mod space;
pub mod train;

pub use bernoulli::{act, closure_experiment, BernoulliLab, ClosureReport, CompressedOp, CylFunction};
pub use error::{Error, Result};
pub use mellin::{
    bilinear_form, functoriality_defect, mellin_distinguishes, operator_norm, transform, MellinMatrix,
    NormExponent, SymbolicTransform,
};
pub use polinf::{distance_inf, embed_bijection_inf, PolyInfTriple};
pub use poly::{cond_exp_poly, distance, CondExp, Polymorphism, Violation};
pub use rational::{format_q, parse_q, Q};
pub use rx::RxMeasure;
pub use space::{bernoulli_cube, quotient, FinSpace, Flavor, Partition, Quotient};
pub use train::{dcoset_of, mult, theta, DCoset, FinPerm};
