//! Numerics for wave equations on noncompact symmetric spaces: root-system
//! geometry, the barycentric Weyl-chamber partition of unity, the Plancherel
//! density, oscillatory wave/Poisson kernel evaluation with decay-rate fitting,
//! the Hadamard parametrix recursion, and Strichartz/GWP exponent calculators.
//!
//! All values are immutable after construction and all operations are pure, so
//! everything here is safe to share across threads.

// Frozen reference constants keep every digit of their high-precision source;
// trimming them to f64's shortest form would hide where they came from.
#![allow(clippy::excessive_precision)]
// Validation guards use `!(x > 0.0)` deliberately: unlike `x <= 0.0` it also
// rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geom;
pub mod rootsys;

pub mod chamber;
pub mod plancherel;
pub mod quad;
pub mod sampling;

pub mod kernels;
pub mod parametrix;
pub mod strichartz;
