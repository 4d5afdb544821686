//! Möbius operator algebra on Boolean subset lattices, the multivariate
//! information measures it generates, and a mechanical verifier for the
//! algebraic identities the operators are supposed to satisfy.
//!
//! The building blocks:
//!
//! * [`mask`]: subsets as bitmasks, the Möbius function, geodesic intervals.
//! * [`function`]: dense real-valued functions on all `2^n` subsets, and the
//!   sign conventions of the signed convolutions.
//! * [`transform`]: the brute-force interval convolution and the `O(n 2^n)`
//!   in-place transforms it certifies.
//! * [`operators`]: the six-operator algebra, exact integer matrices, the
//!   multiplication-table verifier, and the convention search.
//! * [`decompose`]: axis splits of the hypercube convolution and the
//!   associated counting formulas.
//! * [`distribution`] / [`measures`]: discrete joint distributions, entropy
//!   lattices, interaction information, deltas, multi-information, and
//!   conditional log-likelihoods.
//! * [`predict`]: conditional-entropy predictor search over a dataset.
//! * [`ingest`]: CSV/TSV loading, discretization, categorical encoding.
//! * [`claims`]: the registry of asserted identities and the report
//!   generator that classifies each one as exact, sign-flipped,
//!   parity-dependent, or mismatched.

pub mod claims;
pub mod decompose;
pub mod distribution;
pub mod function;
pub mod ingest;
pub mod mask;
pub mod measures;
pub mod operators;
pub mod predict;
pub mod transform;

pub use function::{LatticeFunction, LogBase, SignConvention, DEFAULT_N_CAP};
pub use mask::{
    cardinality, complement, full_mask, geodesic_interval, mobius_mu, LatticeError, Mask,
};
pub use operators::{
    compare_matrices, convention_search, s3_representation_check, to_matrix, verify_group_table,
    MobiusOperator, OperatorKind, OperatorMatrix, Verdict,
};
pub use transform::{fast_signed_transform, interval_transform, naive_convolve, Direction};
