//! Test-only oracles and instance builders, independent of the library's
//! eigensolver where possible.

#![allow(dead_code)]

use blockshift::random::{gaussian, random_isometry, random_matrix, scramble};
use blockshift::{BlockShift, ComplexMatrix, C64};
use rand::Rng;

/// Largest eigenvalue of the real symmetric tridiagonal matrix with zero
/// diagonal and off-diagonal w_j/2, i.e. w of the scalar shift with
/// weights w, by Sturm-sequence bisection.
pub fn scalar_radius_oracle(weights: &[f64]) -> f64 {
    let b: Vec<f64> = weights.iter().map(|w| w.abs() / 2.0).collect();
    let n = b.len() + 1;
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = -x;
        if d < 0.0 {
            count += 1;
        }
        for bj in &b {
            let prev = if d == 0.0 { f64::MIN_POSITIVE } else { d };
            d = -x - bj * bj / prev;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut lo = 0.0;
    let mut hi = b.iter().fold(0.0f64, |m, &x| m.max(2.0 * x)) + 1e-300;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Re⟨Mv, v⟩ by explicit summation.
pub fn quadratic_form_oracle(m: &ComplexMatrix, v: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            acc += v[i].conj() * m[(i, j)] * v[j];
        }
    }
    acc
}

/// Largest singular value by power iteration on M*M.
pub fn operator_norm_oracle(m: &ComplexMatrix) -> f64 {
    let mut x: Vec<C64> = (0..m.cols())
        .map(|i| C64::new(1.0 + i as f64 * 0.37, 0.11 * i as f64))
        .collect();
    let mut value = 0.0;
    for _ in 0..2000 {
        let y = m.apply(&x).unwrap();
        let z = m.adjoint().apply(&y).unwrap();
        let nz = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if nz == 0.0 {
            return 0.0;
        }
        value = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        x = z.into_iter().map(|c| c / nz).collect();
    }
    value
}

fn embed(corner: f64, inner: Option<&ComplexMatrix>, rows: usize, cols: usize) -> ComplexMatrix {
    let mut data = vec![C64::new(0.0, 0.0); rows * cols];
    data[0] = C64::new(corner, 0.0);
    if let Some(g) = inner {
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                data[(i + 1) * cols + j + 1] = g[(i, j)];
            }
        }
    }
    ComplexMatrix::new(rows, cols, data).unwrap()
}

fn blocks_from(weights: &[f64], extra: &[usize], inner: impl Fn(usize) -> Option<ComplexMatrix>) -> BlockShift {
    let dims: Vec<usize> = extra.iter().map(|b| b + 1).collect();
    let blocks = (0..weights.len())
        .map(|j| embed(weights[j], inner(j).as_ref(), dims[j], dims[j + 1]))
        .collect();
    BlockShift::with_dims(dims, blocks).unwrap()
}

/// A ≅ A′ ⊕ B with ‖B_j‖ ≤ 0.9·‖A_j‖ and w(B) < w(A′), scrambled by a
/// block-diagonal unitary. Returns the instance and the weights of A′.
pub fn upper_equality_instance<R: Rng>(rng: &mut R) -> (BlockShift, Vec<f64>) {
    let k = rng.random_range(2..=5);
    let weights: Vec<f64> = (0..k - 1).map(|_| rng.random_range(0.5..2.0)).collect();
    let extra: Vec<usize> = (0..k).map(|_| rng.random_range(0..=2)).collect();
    let inners: Vec<Option<ComplexMatrix>> = (0..k - 1)
        .map(|j| {
            if extra[j] == 0 || extra[j + 1] == 0 {
                return None;
            }
            let g = random_matrix(rng, extra[j], extra[j + 1]);
            let target = 0.9 * weights[j] * rng.random_range(0.1..1.0);
            let norm = blockshift::linalg::operator_norm(&g);
            Some(g.scale_real(target / norm))
        })
        .collect();
    let bs = blocks_from(&weights, &extra, |j| inners[j].clone());
    (scramble(rng, &bs), weights)
}

/// A ≅ A″ ⊕ C where C lives on the first q − 1 segments with
/// C_j = w_j·(isometry), nonincreasing extra dimensions and one-dimensional
/// segments from q on, so m(A_j) = w_j and w(C) < w(A″). Returns the
/// scrambled instance and the weights of A″.
pub fn lower_equality_instance<R: Rng>(rng: &mut R) -> (BlockShift, Vec<f64>) {
    let k = rng.random_range(2..=5);
    let q = rng.random_range(2..=k);
    let weights: Vec<f64> = (0..k - 1).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut extra = vec![0usize; k];
    let mut cap = 3;
    for e in extra.iter_mut().take(q - 1) {
        let c = rng.random_range(1..=cap);
        *e = c;
        cap = c;
    }
    let inners: Vec<Option<ComplexMatrix>> = (0..k - 1)
        .map(|j| {
            if extra[j] == 0 || extra[j + 1] == 0 {
                return None;
            }
            Some(random_isometry(rng, extra[j], extra[j + 1]).scale_real(weights[j]))
        })
        .collect();
    let bs = blocks_from(&weights, &extra, |j| inners[j].clone());
    (scramble(rng, &bs), weights)
}

/// Random block shift whose chain A_1·…·A_{k−1} vanishes, by zeroing blocks
/// or by routing A_{j+1} into the kernel of A_j.
pub fn forced_zero_chain_instance<R: Rng>(rng: &mut R) -> BlockShift {
    let k = rng.random_range(2..=5);
    let mut dims: Vec<usize> = (0..k).map(|_| rng.random_range(1..=4)).collect();
    let kernel_route = k >= 3 && rng.random_bool(0.5);
    let mut blocks: Vec<ComplexMatrix> = dims.windows(2).map(|w| random_matrix(rng, w[0], w[1])).collect();
    if kernel_route {
        let j = rng.random_range(0..k - 2);
        if dims[j + 1] < 2 {
            dims[j + 1] = 2;
        }
        let n = dims[j + 1];
        let r = rng.random_range(1..n);
        let v = random_isometry(rng, n, r);
        let projector = ComplexMatrix::identity(n)
            .sub(&v.matmul(&v.adjoint()).unwrap())
            .unwrap();
        blocks[j] = random_matrix(rng, dims[j], n).matmul(&projector).unwrap();
        blocks[j + 1] = v.matmul(&random_matrix(rng, r, dims[j + 2])).unwrap();
    } else {
        let zeros = rng.random_range(1..=k - 1);
        for _ in 0..zeros {
            let j = rng.random_range(0..k - 1);
            blocks[j] = ComplexMatrix::zeros(dims[j], dims[j + 1]);
        }
    }
    for (j, b) in blocks.iter_mut().enumerate() {
        if b.shape() != (dims[j], dims[j + 1]) {
            *b = random_matrix(rng, dims[j], dims[j + 1]);
        }
    }
    BlockShift::with_dims(dims, blocks).unwrap()
}

/// Random complex scalar of modulus one.
pub fn random_phase<R: Rng>(rng: &mut R) -> C64 {
    let z = gaussian(rng);
    z / z.norm()
}
