//! Seeded random instances: complex Gaussian matrices, unitaries and block
//! shifts. Used by the property suites and by the seeded search steps of the
//! certificates.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::blockshift::BlockShift;
use crate::linalg::{vec_inner, vec_norm, ComplexMatrix, C64};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(rng, n, n).hermitian_part().expect("square")
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Orthonormal columns spanning a random `cols`-dimensional subspace of C^rows.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(cols <= rows, "an isometry cannot have more columns than rows");
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gaussian(rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let proj = vec_inner(&v, b).expect("same length");
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| basis[j][i])
}

/// Haar-like random unitary.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_isometry(rng, n, n)
}

/// Random block shift with `k` segments of dimension `1..=max_dim` and
/// Gaussian blocks.
pub fn random_blockshift<R: Rng + ?Sized>(rng: &mut R, k: usize, max_dim: usize) -> BlockShift {
    let dims: Vec<usize> = (0..k).map(|_| rng.random_range(1..=max_dim)).collect();
    random_blockshift_with_dims(rng, &dims)
}

pub fn random_blockshift_with_dims<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> BlockShift {
    let blocks = dims.windows(2).map(|w| random_matrix(rng, w[0], w[1])).collect();
    BlockShift::with_dims(dims.to_vec(), blocks).expect("consistent shapes")
}

/// Conjugates every block by a random block-diagonal unitary:
/// A_j ↦ U_j·A_j·U_{j+1}*.
pub fn scramble<R: Rng + ?Sized>(rng: &mut R, bs: &BlockShift) -> BlockShift {
    let us: Vec<ComplexMatrix> = bs.dims().iter().map(|&d| random_unitary(rng, d)).collect();
    let blocks = bs
        .blocks()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            us[j]
                .matmul(a)
                .and_then(|m| m.matmul(&us[j + 1].adjoint()))
                .expect("block shapes")
        })
        .collect();
    BlockShift::with_dims(bs.dims().to_vec(), blocks).expect("shapes preserved")
}
