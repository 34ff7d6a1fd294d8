//! Numerical radius of block-shift matrices: norm and minimum-modulus
//! compressions, the bounds they give, witness vectors for the lower bound,
//! and certificates for when either bound is attained.

pub mod blockshift;
pub mod bounds;
pub mod cli;
pub mod fixtures;
pub mod linalg;
pub mod radius;
pub mod random;

pub use blockshift::{BlockShift, BlockShiftError, ScalarShift};
pub use bounds::{
    bounds_report, certify_lower_equality, certify_upper_equality, lower_witness, perturb_nonzero_chain, BoundsError,
    BoundsReport, CertificateStatus, EqualityCertificate, Tolerances, WitnessVector,
};
pub use linalg::{ComplexMatrix, LinalgError, C64};
pub use radius::{jordan_radius, numerical_radius_blockshift, numerical_radius_general};
