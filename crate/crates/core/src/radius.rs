//! Numerical radius w(M) = max{|⟨Mx, x⟩| : ‖x‖ = 1}.
//!
//! For a general square matrix w(M) = max_θ λ_max(Re(e^{−iθ}M)). A block
//! shift is unitarily similar to every rotation e^{iθ}A of itself, so its
//! numerical range is a disk about the origin and θ = 0 already attains the
//! maximum.

use rayon::prelude::*;

use crate::blockshift::{BlockShift, ScalarShift};
use crate::linalg::{hermitian_eigen, ComplexMatrix, LinalgError, C64, DEFAULT_TOL_EIG};

/// Uniform θ samples before refinement.
pub const SWEEP_GRID: usize = 720;

/// Bracket width at which golden-section refinement stops.
pub const REFINE_WIDTH: f64 = 1e-12;

pub const DEFAULT_TOL_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusResult {
    pub value: f64,
    /// Unit vector x with Re(e^{−iθ}⟨Mx, x⟩) = value.
    pub maximizer: Vec<C64>,
    pub theta: f64,
}

/// λ_max(Re(e^{−iθ}M)), the support function of W(M) in direction θ.
pub fn support_value(m: &ComplexMatrix, theta: f64) -> Result<f64, LinalgError> {
    Ok(support_eigen(m, theta)?.0)
}

fn support_eigen(m: &ComplexMatrix, theta: f64) -> Result<(f64, Vec<C64>), LinalgError> {
    let rotated = m.scale(C64::from_polar(1.0, -theta));
    let eig = hermitian_eigen(&rotated.hermitian_part()?, DEFAULT_TOL_EIG)?;
    Ok((eig.max_eigenvalue(), eig.top_vector()))
}

/// Numerical radius of an arbitrary square matrix by a rotation sweep.
///
/// The support function is sampled on [`SWEEP_GRID`] angles; the best cell is
/// then refined by golden-section search until the bracket is narrower than
/// [`REFINE_WIDTH`] or ‖M‖_F·width drops below `tol_radius` (the support
/// function is ‖M‖-Lipschitz in θ, and ‖M‖ ≤ ‖M‖_F). Grid evaluation runs
/// in parallel; the reduction picks the lowest index among equal maxima so
/// the result does not depend on scheduling.
pub fn numerical_radius_general(m: &ComplexMatrix, tol_radius: f64) -> Result<RadiusResult, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let step = std::f64::consts::TAU / SWEEP_GRID as f64;
    let grid: Vec<f64> = (0..SWEEP_GRID)
        .into_par_iter()
        .map(|i| support_value(m, i as f64 * step))
        .collect::<Result<_, _>>()?;

    let mut best = 0;
    for (i, &v) in grid.iter().enumerate() {
        if v > grid[best] {
            best = i;
        }
    }

    let lipschitz = m.frobenius_norm();
    let center = best as f64 * step;
    let (mut lo, mut hi) = (center - step, center + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = support_value(m, x1)?;
    let mut f2 = support_value(m, x2)?;
    while hi - lo > REFINE_WIDTH && lipschitz * (hi - lo) > tol_radius {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = support_value(m, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = support_value(m, x2)?;
        }
    }

    let refined = if f1 >= f2 { x1 } else { x2 };
    let theta = if f1.max(f2) >= grid[best] {
        refined.rem_euclid(std::f64::consts::TAU)
    } else {
        center
    };
    let (value, maximizer) = support_eigen(m, theta)?;
    Ok(RadiusResult {
        value: value.max(0.0),
        maximizer,
        theta,
    })
}

/// Numerical radius of a block shift: λ_max((A + A*)/2), attained at θ = 0.
pub fn numerical_radius_blockshift(bs: &BlockShift) -> Result<RadiusResult, LinalgError> {
    let (value, maximizer) = support_eigen(&bs.assemble(), 0.0)?;
    Ok(RadiusResult {
        value: value.max(0.0),
        maximizer,
        theta: 0.0,
    })
}

/// Numerical radius of a scalar shift.
pub fn numerical_radius_scalar(ss: &ScalarShift) -> Result<RadiusResult, LinalgError> {
    numerical_radius_blockshift(&ss.to_blockshift())
}

/// w(J_k) = cos(π/(k+1)).
pub fn jordan_radius(k: usize) -> f64 {
    assert!(k >= 1, "J_k needs k >= 1");
    (std::f64::consts::PI / (k as f64 + 1.0)).cos()
}
