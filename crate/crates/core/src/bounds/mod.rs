//! Upper and lower bounds for the numerical radius of a block shift.
//!
//! With A′, A″, A‴ the scalar shifts built from ‖A_j‖, m(A_j) and γ(A_j):
//!
//! * w(A″) ≤ w(A) ≤ w(A′) always;
//! * m·cos(π/(k+1)) ≤ w(A″) and w(A′) ≤ M·cos(π/(k+1)) with
//!   M = max ‖A_j‖, m = min m(A_j);
//! * w(A‴) ≤ w(A) when k = 2, or k = 3 and rank A_1 + rank A_2 > n_2.
//!
//! The witness and certificate submodules make the two inequalities
//! constructive.

mod certify;
mod witness;

pub use certify::{
    certify_lower_equality, certify_upper_equality, kernel_intersection_trivial, CertificateStatus,
    EqualityCertificate, Residuals, MAX_ATTEMPTS,
};
pub use witness::{
    chain_is_nonzero, default_epsilon, lower_witness, perron_vector, perturb_nonzero_chain, WitnessVector,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blockshift::{BlockShift, BlockShiftError};
use crate::linalg::{numerical_rank, singular_values, LinalgError, DEFAULT_TOL_EIG, DEFAULT_TOL_RANK};
use crate::radius::{jordan_radius, numerical_radius_blockshift, numerical_radius_scalar, DEFAULT_TOL_RADIUS};

/// Default certification tolerance, absolute after scaling A to unit norm.
pub const DEFAULT_TOL_CERT: f64 = 1e-8;

/// Slack, relative to max(1, ‖A‖), allowed by the ordering check in
/// [`bounds_report`].
pub const ORDER_SLACK: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Shape(#[from] BlockShiftError),
    #[error("a witness needs k >= 2 segments (k = {k})")]
    NoWitness { k: usize },
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("witness attains {attained}, below its guaranteed floor {floor}")]
    WitnessBelowFloor { attained: f64, floor: f64 },
    #[error(
        "bound ordering violated: coarse_lower {coarse_lower}, w(A″) {w_lower}, w(A) {w_a}, w(A′) {w_upper}, coarse_upper {coarse_upper}"
    )]
    OrderingViolation {
        coarse_lower: f64,
        w_lower: f64,
        w_a: f64,
        w_upper: f64,
        coarse_upper: f64,
    },
}

/// Tolerances used across the bounds, witnesses and certificates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermitian check in the eigensolver.
    pub eig: f64,
    /// Relative cutoff for numerical rank and nonzero chains.
    pub rank: f64,
    /// Radius sweep accuracy.
    pub radius: f64,
    /// Equality detection and certificate residuals.
    pub cert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig: DEFAULT_TOL_EIG,
            rank: DEFAULT_TOL_RANK,
            radius: DEFAULT_TOL_RADIUS,
            cert: DEFAULT_TOL_CERT,
        }
    }
}

/// w(A′).
pub fn upper_bound(bs: &BlockShift) -> Result<f64, BoundsError> {
    Ok(numerical_radius_scalar(&bs.norm_compression())?.value)
}

/// w(A″).
pub fn lower_bound(bs: &BlockShift) -> Result<f64, BoundsError> {
    Ok(numerical_radius_scalar(&bs.min_modulus_compression())?.value)
}

/// M·cos(π/(k+1)).
pub fn coarse_upper(bs: &BlockShift) -> f64 {
    bs.norm_compression().max_weight() * jordan_radius(bs.k())
}

/// m·cos(π/(k+1)).
pub fn coarse_lower(bs: &BlockShift) -> f64 {
    bs.min_modulus_compression().min_weight() * jordan_radius(bs.k())
}

/// Outcome of the reduced-minimum-modulus bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaBound {
    pub applicable: bool,
    /// w(A‴), present whenever it was computed (also when not applicable).
    pub value: Option<f64>,
    pub reason: String,
    /// (rank A_1, rank A_2) for k = 3.
    pub ranks: Option<(usize, usize)>,
    /// k = 2 only: whether every nonzero singular value of A_1 equals γ(A_1),
    /// which is when w(A) = w(A‴).
    pub equality_structure: Option<bool>,
}

/// The γ lower bound, applicable for k = 2 and for k = 3 under
/// rank A_1 + rank A_2 > n_2.
pub fn gamma_lower(bs: &BlockShift, tol: &Tolerances) -> Result<GammaBound, BoundsError> {
    let k = bs.k();
    match k {
        2 => {
            let gamma = bs.gamma_compression_with(tol.rank);
            let value = numerical_radius_scalar(&gamma)?.value;
            let sv = singular_values(&bs.blocks()[0]);
            let g = gamma.weights()[0];
            let cutoff = tol.rank * sv[0];
            let equal = sv
                .iter()
                .filter(|&&s| s > cutoff)
                .all(|&s| (s - g).abs() <= tol.cert * sv[0].max(1.0));
            Ok(GammaBound {
                applicable: true,
                value: Some(value),
                reason: "k = 2: w(A) ≥ γ(A_1)/2 holds unconditionally".into(),
                ranks: None,
                equality_structure: Some(equal),
            })
        }
        3 => {
            let value = numerical_radius_scalar(&bs.gamma_compression_with(tol.rank))?.value;
            let r1 = numerical_rank(&bs.blocks()[0], tol.rank);
            let r2 = numerical_rank(&bs.blocks()[1], tol.rank);
            let n2 = bs.dims()[1];
            let applicable = r1 + r2 > n2;
            let reason = if applicable {
                format!("k = 3: rank A_1 + rank A_2 = {r1} + {r2} > n_2 = {n2}")
            } else {
                format!("k = 3: rank A_1 + rank A_2 = {r1} + {r2} ≤ n_2 = {n2}, rank condition fails")
            };
            Ok(GammaBound {
                applicable,
                value: Some(value),
                reason,
                ranks: Some((r1, r2)),
                equality_structure: None,
            })
        }
        _ => Ok(GammaBound {
            applicable: false,
            value: None,
            reason: format!("k = {k}: the γ bound is only available for k = 2 and k = 3"),
            ranks: None,
            equality_structure: None,
        }),
    }
}

/// Every quantity of the bound chain for one block shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub k: usize,
    pub dims: Vec<usize>,
    #[serde(rename = "w_A")]
    pub w_a: f64,
    pub w_upper: f64,
    pub w_lower: f64,
    pub coarse_upper: f64,
    pub coarse_lower: f64,
    /// max_j ‖A_j‖.
    #[serde(rename = "M")]
    pub max_norm: f64,
    /// min_j m(A_j).
    #[serde(rename = "m_min")]
    pub min_modulus: f64,
    pub upper_weights: Vec<f64>,
    pub lower_weights: Vec<f64>,
    pub gamma_weights: Vec<f64>,
    pub gamma_bound: Option<f64>,
    pub gamma_applicable: bool,
    pub gamma_reason: String,
}

/// Evaluates all bounds and checks
/// coarse_lower ≤ w(A″) ≤ w(A) ≤ w(A′) ≤ coarse_upper.
///
/// A violation beyond [`ORDER_SLACK`] is reported as
/// [`BoundsError::OrderingViolation`]; it indicates a numerical bug rather
/// than bad input.
pub fn bounds_report(bs: &BlockShift, tol: &Tolerances) -> Result<BoundsReport, BoundsError> {
    let upper = bs.norm_compression();
    let lower = bs.min_modulus_compression();
    let gamma = bs.gamma_compression_with(tol.rank);
    let w_a = numerical_radius_blockshift(bs)?.value;
    let w_upper = numerical_radius_scalar(&upper)?.value;
    let w_lower = numerical_radius_scalar(&lower)?.value;
    let jk = jordan_radius(bs.k());
    let coarse_upper = upper.max_weight() * jk;
    let coarse_lower = lower.min_weight() * jk;
    let g = gamma_lower(bs, tol)?;

    let slack = ORDER_SLACK * upper.max_weight().max(1.0);
    let ordered = coarse_lower <= w_lower + slack
        && w_lower <= w_a + slack
        && w_a <= w_upper + slack
        && w_upper <= coarse_upper + slack;
    if !ordered {
        return Err(BoundsError::OrderingViolation {
            coarse_lower,
            w_lower,
            w_a,
            w_upper,
            coarse_upper,
        });
    }

    Ok(BoundsReport {
        k: bs.k(),
        dims: bs.dims().to_vec(),
        w_a,
        w_upper,
        w_lower,
        coarse_upper,
        coarse_lower,
        max_norm: upper.max_weight(),
        min_modulus: lower.min_weight(),
        upper_weights: upper.weights().to_vec(),
        lower_weights: lower.weights().to_vec(),
        gamma_weights: gamma.weights().to_vec(),
        gamma_bound: if g.applicable { g.value } else { None },
        gamma_applicable: g.applicable,
        gamma_reason: g.reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockshift::ScalarShift;
    use crate::fixtures;
    use crate::linalg::{operator_norm, ComplexMatrix};
    use crate::random::{random_blockshift, random_matrix};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn upper_bound_examples() {
        assert_abs_diff_eq!(upper_bound(&fixtures::example23()).unwrap(), R, epsilon = 1e-14);
        assert_eq!(upper_bound(&BlockShift::zero(3).unwrap()).unwrap(), 0.0);
        // weights (√2, √2): √2·cos(π/4) = 1
        assert_abs_diff_eq!(upper_bound(&fixtures::example35()).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn lower_bound_examples() {
        assert_abs_diff_eq!(lower_bound(&fixtures::example35()).unwrap(), R, epsilon = 1e-14);
        let wide = BlockShift::new(vec![
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0]]).unwrap(),
            ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0]]).unwrap(),
        ])
        .unwrap();
        assert_eq!(lower_bound(&wide).unwrap(), 0.0);
        for k in 1..=6 {
            let j = ScalarShift::jordan(k).to_blockshift();
            assert_abs_diff_eq!(lower_bound(&j).unwrap(), jordan_radius(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn coarse_examples() {
        let e23 = fixtures::example23();
        // √2·cos(π/6) = √6/2
        assert_abs_diff_eq!(coarse_upper(&e23), 6f64.sqrt() / 2.0, epsilon = 1e-14);
        assert!(coarse_upper(&e23) > upper_bound(&e23).unwrap());

        let c = 0.7;
        let eq = ScalarShift::new(vec![c; 4]).unwrap().to_blockshift();
        assert_abs_diff_eq!(coarse_upper(&eq), upper_bound(&eq).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(coarse_upper(&eq), c * jordan_radius(5), epsilon = 1e-12);

        assert_eq!(coarse_lower(&fixtures::example35()), 0.0);
        assert_eq!(coarse_upper(&BlockShift::zero(2).unwrap()), 0.0);
    }

    #[test]
    fn gamma_examples() {
        let tol = Tolerances::default();
        let g = gamma_lower(&fixtures::example35(), &tol).unwrap();
        assert!(!g.applicable);
        assert_eq!(g.ranks, Some((1, 1)));
        // w(A‴) = 1 exceeds w(A) = √2/2: the rank hypothesis matters.
        assert_abs_diff_eq!(g.value.unwrap(), 1.0, epsilon = 1e-14);

        let row = BlockShift::new(vec![ComplexMatrix::from_real_rows(&[&[1.0, 1.0]]).unwrap()]).unwrap();
        let g = gamma_lower(&row, &tol).unwrap();
        assert!(g.applicable);
        assert_abs_diff_eq!(g.value.unwrap(), R, epsilon = 1e-14);
        assert_abs_diff_eq!(numerical_radius_blockshift(&row).unwrap().value, R, epsilon = 1e-14);
        assert_eq!(g.equality_structure, Some(true));

        let zero = BlockShift::new(vec![ComplexMatrix::zeros(2, 2)]).unwrap();
        assert_eq!(gamma_lower(&zero, &tol).unwrap().value, Some(0.0));

        let spread = BlockShift::new(vec![ComplexMatrix::diag_real(&[1.0, 3.0])]).unwrap();
        assert_eq!(gamma_lower(&spread, &tol).unwrap().equality_structure, Some(false));

        let long = ScalarShift::jordan(4).to_blockshift();
        let g = gamma_lower(&long, &tol).unwrap();
        assert!(!g.applicable && g.value.is_none());
    }

    #[test]
    fn gamma_bound_holds_when_applicable() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut seen = 0;
        for _ in 0..200 {
            let k = rng.random_range(2..=3);
            // low-rank blocks so that γ differs from m
            let dims: Vec<usize> = (0..k).map(|_| rng.random_range(1..=4)).collect();
            let blocks = dims
                .windows(2)
                .map(|w| {
                    let r = rng.random_range(1..=w[0].min(w[1]));
                    random_matrix(&mut rng, w[0], r)
                        .matmul(&random_matrix(&mut rng, r, w[1]))
                        .unwrap()
                })
                .collect();
            let bs = BlockShift::with_dims(dims, blocks).unwrap();
            let g = gamma_lower(&bs, &tol).unwrap();
            if g.applicable {
                seen += 1;
                let w = numerical_radius_blockshift(&bs).unwrap().value;
                assert!(g.value.unwrap() <= w + 1e-9, "{} > {}", g.value.unwrap(), w);
            }
        }
        assert!(seen > 50);
    }

    #[test]
    fn report_examples() {
        let tol = Tolerances::default();
        let r = bounds_report(&fixtures::example23(), &tol).unwrap();
        assert_abs_diff_eq!(r.w_a, R, epsilon = 1e-14);
        assert_abs_diff_eq!(r.w_upper, R, epsilon = 1e-14);
        // A″ weights (√2, 0, 0, 1)
        assert_abs_diff_eq!(r.lower_weights[0], 2f64.sqrt(), epsilon = 1e-14);
        assert_eq!(&r.lower_weights[1..3], &[0.0, 0.0]);
        assert_abs_diff_eq!(r.lower_weights[3], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.w_lower, R, epsilon = 1e-14);
        assert!(!r.gamma_applicable && r.gamma_bound.is_none());

        let j5 = bounds_report(&ScalarShift::jordan(5).to_blockshift(), &tol).unwrap();
        let want = 3f64.sqrt() / 2.0;
        for v in [j5.w_a, j5.w_upper, j5.w_lower, j5.coarse_upper, j5.coarse_lower] {
            assert_abs_diff_eq!(v, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn sandwich_on_random_shifts() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..200 {
            let k = rng.random_range(1..=5);
            let bs = random_blockshift(&mut rng, k, 4);
            let r = bounds_report(&bs, &tol).unwrap();
            assert!(r.w_lower <= r.w_a + 1e-7 && r.w_a <= r.w_upper + 1e-7);
            assert!(r.coarse_lower <= r.w_lower + 1e-9 && r.w_upper <= r.coarse_upper + 1e-9);
            assert_abs_diff_eq!(
                r.max_norm,
                operator_norm(&bs.assemble()),
                epsilon = 1e-10 * (1.0 + r.max_norm)
            );
        }
    }

    #[test]
    fn lower_bound_is_lipschitz_in_the_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let k = rng.random_range(2..=4);
            let a = random_blockshift(&mut rng, k, 3);
            let scale: f64 = rng.random_range(0.01..0.5);
            let b = BlockShift::with_dims(
                a.dims().to_vec(),
                a.blocks()
                    .iter()
                    .map(|x| {
                        x.add(&random_matrix(&mut rng, x.rows(), x.cols()).scale_real(scale))
                            .unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            let gap = a
                .blocks()
                .iter()
                .zip(b.blocks())
                .map(|(x, y)| operator_norm(&x.sub(y).unwrap()))
                .fold(0.0, f64::max);
            let diff = (lower_bound(&a).unwrap() - lower_bound(&b).unwrap()).abs();
            assert!(diff <= gap + 1e-12);
        }
    }
}
