//! Constructive side of w(A) ≥ w(A″): the witness vector
//! v = (y_1x_1, …, y_kx_k) and the perturbation that makes the chain
//! A_1·…·A_{k−1} nonzero when it vanishes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BoundsError, Tolerances};
use crate::blockshift::{suffix_product, BlockShift, BlockShiftError, ScalarShift};
use crate::linalg::{hermitian_eigen, operator_norm, quadratic_form, vec_norm, ComplexMatrix, C64};
use crate::radius::numerical_radius_scalar;
use crate::random::random_unit_vector;

/// Unit vector v with ⟨Av, v⟩ ≥ w(A″), and everything used to build it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessVector {
    pub v: Vec<C64>,
    /// Re⟨Av, v⟩ for the original A.
    pub attained: f64,
    /// w(A″) of the original A.
    pub lower_bound: f64,
    /// Guaranteed floor: w(A″) minus slack, and minus (k−1)·ε when perturbed.
    pub floor: f64,
    /// Nonnegative unit Perron vector of the compression the witness was built from.
    pub perron_y: Vec<f64>,
    /// Unit vectors x_1..x_k.
    pub chain_x: Vec<Vec<C64>>,
    pub u: Vec<C64>,
    pub perturbed: bool,
    /// ε used for the perturbation, if any.
    pub epsilon: Option<f64>,
}

/// Default perturbation size 1e−6·(1 + max_j ‖A_j‖).
pub fn default_epsilon(bs: &BlockShift) -> f64 {
    1e-6 * (1.0 + bs.max_block_norm())
}

/// Nonnegative unit y with ⟨Sy, y⟩ = w(S) for a scalar shift S.
///
/// For an entrywise nonnegative matrix the absolute values of a top
/// eigenvector of the real part are again a top eigenvector.
pub fn perron_vector(ss: &ScalarShift) -> Result<Vec<f64>, BoundsError> {
    let r = numerical_radius_scalar(ss)?;
    let y: Vec<f64> = r.maximizer.iter().map(|z| z.norm()).collect();
    let norm = y.iter().map(|t| t * t).sum::<f64>().sqrt();
    Ok(y.into_iter().map(|t| t / norm).collect())
}

/// Whether ‖A_1·…·A_{k−1}‖_F > `tol_rank`·∏‖A_j‖_F.
pub fn chain_is_nonzero(blocks: &[ComplexMatrix], tol_rank: f64) -> bool {
    match suffix_product(blocks, 0) {
        Some(p) => {
            let scale: f64 = blocks.iter().map(ComplexMatrix::frobenius_norm).product();
            scale > 0.0 && p.frobenius_norm() > tol_rank * scale
        }
        None => false,
    }
}

fn product_is_nonzero(p: &ComplexMatrix, left: &ComplexMatrix, right: &ComplexMatrix, tol_rank: f64) -> bool {
    let scale = left.frobenius_norm() * right.frobenius_norm();
    scale > 0.0 && p.frobenius_norm() > tol_rank * scale
}

fn argmax_entry(m: &ComplexMatrix) -> (usize, usize) {
    let mut best = (0, 0);
    let mut mag = -1.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m[(i, j)].norm();
            if v > mag {
                mag = v;
                best = (i, j);
            }
        }
    }
    best
}

/// Returns B with ‖B − A‖ = ε/2 and P·B ≠ 0, given P ≠ 0 with P·A = 0.
fn repair_step(p: &ComplexMatrix, a: &ComplexMatrix, eps: f64) -> ComplexMatrix {
    let half = eps / 2.0;
    if a.is_zero() {
        // A = 0: put ε/2 at (l, 1) where p_il is the largest entry of P.
        let (_, l) = argmax_entry(p);
        let mut b = ComplexMatrix::zeros(a.rows(), a.cols());
        b.set(l, 0, C64::new(half, 0.0));
        return b;
    }
    // A ≠ 0: bend column c of A toward row i of P so that (P·B)_ic ≠ 0.
    let i = (0..p.rows())
        .max_by(|&x, &y| vec_norm(&p.row_vec(x)).total_cmp(&vec_norm(&p.row_vec(y))))
        .expect("nonempty");
    let c = (0..a.cols())
        .max_by(|&x, &y| vec_norm(&a.col_vec(x)).total_cmp(&vec_norm(&a.col_vec(y))))
        .expect("nonempty");
    let row = p.row_vec(i);
    let (l, pil) = row
        .iter()
        .copied()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("nonempty");
    let current: C64 = row.iter().zip(a.col_vec(c)).map(|(x, y)| x * y).sum();
    let align = if current.norm() > 0.0 {
        current / current.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let dir = pil.conj() / pil.norm() * align;
    let mut b = a.clone();
    b.set(l, c, a[(l, c)] + dir * half);
    b
}

/// Blocks B_j with ‖B_j − A_j‖ < ε and B_1·…·B_{k−1} ≠ 0.
///
/// Blocks whose chain is already nonzero (at `tol_rank`) come back
/// unchanged. Otherwise the chain is rebuilt left to right: a zero leading
/// block gets ε/2 in the entry feeding the largest entry of the remaining
/// product (its (1,1) entry if that product vanishes too), and the first block
/// that kills the running product P is repaired by a single ε/2 entry: at the
/// index of P's largest entry when the block is zero, or added to its
/// dominant column along the dominant row of P otherwise.
pub fn perturb_nonzero_chain(
    blocks: &[ComplexMatrix],
    eps: f64,
    tol_rank: f64,
) -> Result<Vec<ComplexMatrix>, BoundsError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(BoundsError::InvalidEpsilon(eps));
    }
    if blocks.is_empty() {
        return Err(BlockShiftError::NoChain { k: 1 }.into());
    }
    for w in blocks.windows(2) {
        if w[0].cols() != w[1].rows() {
            return Err(crate::linalg::LinalgError::DimensionMismatch {
                op: "perturb_nonzero_chain",
                left: w[0].shape(),
                right: w[1].shape(),
            }
            .into());
        }
    }
    if chain_is_nonzero(blocks, tol_rank) {
        return Ok(blocks.to_vec());
    }

    let mut out = blocks.to_vec();
    if out[0].is_zero() {
        let col = match suffix_product(&out, 1) {
            Some(q) if chain_is_nonzero(&out[1..], tol_rank) => argmax_entry(&q).0,
            _ => 0,
        };
        let mut b = ComplexMatrix::zeros(out[0].rows(), out[0].cols());
        b.set(0, col, C64::new(eps / 2.0, 0.0));
        out[0] = b;
    }
    let mut running = out[0].clone();
    for block in out.iter_mut().skip(1) {
        let next = running.matmul(block)?;
        if product_is_nonzero(&next, &running, block, tol_rank) {
            running = next;
            continue;
        }
        *block = repair_step(&running, block, eps);
        running = running.matmul(block)?;
    }
    Ok(out)
}

/// x_k = u, x_j = A_j·x_{j+1}/‖A_j·x_{j+1}‖; None when some step collapses.
fn chain_vectors(blocks: &[ComplexMatrix], u: &[C64], tol_rank: f64) -> Option<Vec<Vec<C64>>> {
    let mut xs = vec![u.to_vec()];
    for a in blocks.iter().rev() {
        let y = a.apply(xs.last().expect("nonempty")).ok()?;
        let norm = vec_norm(&y);
        if !norm.is_finite() || norm <= tol_rank * operator_norm(a) {
            return None;
        }
        xs.push(y.into_iter().map(|z| z / norm).collect());
    }
    xs.reverse();
    Some(xs)
}

/// Candidate u vectors: top right singular vector of the chain product,
/// followed by seeded random unit vectors.
fn witness_chain(
    blocks: &[ComplexMatrix],
    seed: u64,
    tol: &Tolerances,
) -> Result<(Vec<C64>, Vec<Vec<C64>>), BoundsError> {
    let p = suffix_product(blocks, 0).ok_or(BlockShiftError::NoChain { k: 1 })?;
    let gram = p.adjoint().matmul(&p)?;
    let top = hermitian_eigen(&gram, tol.eig)?.top_vector();
    if let Some(xs) = chain_vectors(blocks, &top, tol.rank) {
        return Ok((top, xs));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..super::MAX_ATTEMPTS {
        let u = random_unit_vector(&mut rng, p.cols());
        if let Some(xs) = chain_vectors(blocks, &u, tol.rank) {
            return Ok((u, xs));
        }
    }
    Err(BlockShiftError::NoChain { k: blocks.len() + 1 }.into())
}

/// Builds the witness vector for w(A) ≥ w(A″).
///
/// With a nonzero chain the witness is exact: ⟨Av, v⟩ ≥ w(A″). With a zero
/// chain the blocks are first moved by ε (default [`default_epsilon`]) with
/// [`perturb_nonzero_chain`]; the witness of the perturbed shift, measured
/// against the original A, then attains at least w(A″) − (k−1)·ε.
pub fn lower_witness(
    bs: &BlockShift,
    seed: u64,
    eps: Option<f64>,
    tol: &Tolerances,
) -> Result<WitnessVector, BoundsError> {
    let k = bs.k();
    if k < 2 {
        return Err(BoundsError::NoWitness { k });
    }
    let a = bs.assemble();
    let lower = bs.min_modulus_compression();
    let w_lower = numerical_radius_scalar(&lower)?.value;
    let slack = tol.cert * bs.max_block_norm().max(1.0);

    let (source, perturbed, epsilon) = if chain_is_nonzero(bs.blocks(), tol.rank) {
        (bs.clone(), false, None)
    } else {
        let eps = eps.unwrap_or_else(|| default_epsilon(bs));
        let blocks = perturb_nonzero_chain(bs.blocks(), eps, tol.rank)?;
        (BlockShift::with_dims(bs.dims().to_vec(), blocks)?, true, Some(eps))
    };

    let (u, chain_x) = witness_chain(source.blocks(), seed, tol)?;
    let y = perron_vector(&source.min_modulus_compression())?;
    let v: Vec<C64> = chain_x
        .iter()
        .zip(&y)
        .flat_map(|(x, &yj)| x.iter().map(move |z| z * yj))
        .collect();
    let attained = quadratic_form(&a, &v)?.re;
    let floor = w_lower - slack - epsilon.map_or(0.0, |e| (k - 1) as f64 * e);
    if attained < floor {
        return Err(BoundsError::WitnessBelowFloor { attained, floor });
    }
    Ok(WitnessVector {
        v,
        attained,
        lower_bound: w_lower,
        floor,
        perron_y: y,
        chain_x,
        u,
        perturbed,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::random::{random_blockshift, random_matrix};
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn witness_for_jordan_three() {
        let j3 = ScalarShift::jordan(3).to_blockshift();
        let w = lower_witness(&j3, 0, None, &Tolerances::default()).unwrap();
        assert!(!w.perturbed);
        for (got, want) in w.perron_y.iter().zip([0.5, R, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        for x in &w.chain_x {
            assert_abs_diff_eq!(x[0].norm(), 1.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(w.attained, R, epsilon = 1e-14);
        assert_abs_diff_eq!(vec_norm(&w.v), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn witness_for_example35_goes_through_perturbation() {
        let bs = fixtures::example35();
        let eps = 1e-3;
        let w = lower_witness(&bs, 0, Some(eps), &Tolerances::default()).unwrap();
        assert!(w.perturbed);
        assert_eq!(w.epsilon, Some(eps));
        assert!(w.attained >= R - 2.0 * eps - 1e-8, "{}", w.attained);
        assert_abs_diff_eq!(vec_norm(&w.v), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn witness_degenerate_floor() {
        // m(A_j) = 0 everywhere and a zero chain
        let bs = BlockShift::new(vec![
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0]]).unwrap(),
            ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]]).unwrap(),
        ])
        .unwrap();
        let w = lower_witness(&bs, 5, None, &Tolerances::default()).unwrap();
        assert!(w.perturbed);
        assert!(w.attained >= -1e-8);
    }

    #[test]
    fn witness_requires_two_segments() {
        assert!(matches!(
            lower_witness(&BlockShift::zero(2).unwrap(), 0, None, &Tolerances::default()),
            Err(BoundsError::NoWitness { k: 1 })
        ));
    }

    #[test]
    fn witness_segments_are_scaled_chain_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let k = rng.random_range(2..=5);
            let bs = random_blockshift(&mut rng, k, 4);
            let w = lower_witness(&bs, 1, None, &Tolerances::default()).unwrap();
            assert!(!w.perturbed);
            assert!(w.attained >= w.lower_bound - 1e-8);
            assert_abs_diff_eq!(vec_norm(&w.v), 1.0, epsilon = 1e-12);
            for ((seg, x), y) in bs.segments(&w.v).iter().zip(&w.chain_x).zip(&w.perron_y) {
                for (a, b) in seg.iter().zip(x) {
                    assert_abs_diff_eq!((a - b * y).norm(), 0.0, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn witness_is_seed_reproducible() {
        let bs = fixtures::example35();
        let tol = Tolerances::default();
        assert_eq!(
            lower_witness(&bs, 9, None, &tol).unwrap(),
            lower_witness(&bs, 9, None, &tol).unwrap()
        );
    }

    #[test]
    fn perturb_example35() {
        let bs = fixtures::example35();
        let eps = 1e-3;
        let out = perturb_nonzero_chain(bs.blocks(), eps, 1e-10).unwrap();
        for (a, b) in bs.blocks().iter().zip(&out) {
            assert!(operator_norm(&a.sub(b).unwrap()) < eps);
        }
        let p = out[0].matmul(&out[1]).unwrap();
        assert!(p.frobenius_norm() > 0.0);
        assert!(chain_is_nonzero(&out, 1e-10));
    }

    #[test]
    fn perturb_leaves_nonzero_chains_alone() {
        let blocks = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)];
        assert_eq!(perturb_nonzero_chain(&blocks, 0.1, 1e-10).unwrap(), blocks);
    }

    #[test]
    fn perturb_all_zero_three_segments() {
        let blocks = vec![ComplexMatrix::zeros(2, 3), ComplexMatrix::zeros(3, 2)];
        let out = perturb_nonzero_chain(&blocks, 0.2, 1e-10).unwrap();
        let p = out[0].matmul(&out[1]).unwrap();
        assert_abs_diff_eq!(p.frobenius_norm(), 0.01, epsilon = 1e-17);
        assert_abs_diff_eq!(p[(0, 0)].re, 0.01, epsilon = 1e-17);
    }

    #[test]
    fn perturb_zero_first_block_uses_suffix() {
        // A_1 = 0, A_2 has only its second row nonzero: the ε/2 entry of B_1
        // must land in column 2 so that A_2 stays untouched.
        let a2 = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 3.0]]).unwrap();
        let blocks = vec![ComplexMatrix::zeros(1, 2), a2.clone()];
        let out = perturb_nonzero_chain(&blocks, 0.1, 1e-10).unwrap();
        assert_eq!(out[1], a2);
        assert_eq!(out[0][(0, 1)], C64::new(0.05, 0.0));
    }

    #[test]
    fn perturb_rejects_bad_epsilon() {
        let blocks = vec![ComplexMatrix::zeros(1, 1)];
        assert!(matches!(
            perturb_nonzero_chain(&blocks, 0.0, 1e-10),
            Err(BoundsError::InvalidEpsilon(_))
        ));
        assert!(perturb_nonzero_chain(&blocks, -1.0, 1e-10).is_err());
        assert!(perturb_nonzero_chain(&[], 1.0, 1e-10).is_err());
    }

    #[test]
    fn perturb_forced_zero_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for eps in [1e-2, 1e-4, 1e-6] {
            for _ in 0..40 {
                let k = rng.random_range(2..=5);
                let mut bs = random_blockshift(&mut rng, k, 4).blocks().to_vec();
                let z = rng.random_range(0..bs.len());
                bs[z] = ComplexMatrix::zeros(bs[z].rows(), bs[z].cols());
                if rng.random_bool(0.3) {
                    let y = rng.random_range(0..bs.len());
                    bs[y] = ComplexMatrix::zeros(bs[y].rows(), bs[y].cols());
                }
                assert!(!chain_is_nonzero(&bs, 1e-10));
                let out = perturb_nonzero_chain(&bs, eps, 1e-10).unwrap();
                for (a, b) in bs.iter().zip(&out) {
                    assert!(operator_norm(&a.sub(b).unwrap()) < eps);
                }
                assert!(suffix_product(&out, 0).unwrap().frobenius_norm() > 0.0);
                assert!(chain_is_nonzero(&out, 1e-10));
            }
        }
        let _ = random_matrix(&mut rng, 1, 1);
    }
}
