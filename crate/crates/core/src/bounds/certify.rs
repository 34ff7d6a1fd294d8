//! Equality certificates: when w(A) = w(A′) (all A_j ≠ 0) or w(A) = w(A″)
//! (A_1·…·A_{k−1} ≠ 0), A splits as the compression plus a block shift.
//!
//! The certificate is the decomposition itself. An extremal vector x with
//! segments x_j yields unit vectors e_j = x̂_j/‖x_j‖, one per segment;
//! K = span{e_j} must be invariant under both A and A*, and the compression of
//! A to K must be unitarily similar (by a diagonal unitary) to the scalar
//! shift. The orthogonal complement is assembled segment by segment, so the
//! remaining block C = A|K⊥ is again block-shift shaped.

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::witness::chain_is_nonzero;
use super::{BoundsError, Tolerances};
use crate::blockshift::{BlockShift, BlockShiftError, ScalarShift};
use crate::linalg::{hermitian_eigen, minimum_modulus, operator_norm, vec_norm, ComplexMatrix, C64};
use crate::radius::{numerical_radius_blockshift, numerical_radius_scalar};
use crate::random::random_unit_vector;

/// Upper limit on candidate extremal vectors tried per certificate.
pub const MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    EqualityWithSummand,
    EqualityHypothesisViolated,
    NoEquality,
}

impl CertificateStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::EqualityWithSummand => "equality-with-summand",
            Self::EqualityHypothesisViolated => "equality-hypothesis-violated",
            Self::NoEquality => "no-equality",
        }
    }
}

/// Residual norms (Frobenius) of a decomposition, measured after scaling A
/// to unit operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// ‖A·K − K·S‖
    pub invariance: f64,
    /// ‖A*·K − K·S*‖
    pub adjoint_invariance: f64,
    /// ‖S − compression‖
    pub similarity: f64,
    /// ‖[K W]·(S ⊕ C)·[K W]* − A‖
    pub reconstruction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualityCertificate {
    pub status: CertificateStatus,
    pub reason: String,
    /// w(A).
    pub w_a: f64,
    /// w(A′) or w(A″).
    pub w_bound: f64,
    /// Orthonormal n×k basis of K.
    pub k_basis: Option<ComplexMatrix>,
    /// k×k matrix of A on K in that basis.
    pub summand: Option<ComplexMatrix>,
    /// Orthonormal basis of K⊥, ordered by segment; None when K⊥ = {0}.
    pub complement_basis: Option<ComplexMatrix>,
    /// A on K⊥ in that basis.
    pub complement: Option<ComplexMatrix>,
    pub complement_radius: Option<f64>,
    pub residuals: Option<Residuals>,
    /// One line per candidate vector and any intermediate scalars.
    pub attempts: Vec<String>,
}

impl EqualityCertificate {
    fn verdict(status: CertificateStatus, reason: String, w_a: f64, w_bound: f64, attempts: Vec<String>) -> Self {
        Self {
            status,
            reason,
            w_a,
            w_bound,
            k_basis: None,
            summand: None,
            complement_basis: None,
            complement: None,
            complement_radius: None,
            residuals: None,
            attempts,
        }
    }

    /// K·S·K* + W·C·W*.
    pub fn reassemble(&self) -> Option<ComplexMatrix> {
        let k = self.k_basis.as_ref()?;
        let s = self.summand.as_ref()?;
        let mut out = k.matmul(s).ok()?.matmul(&k.adjoint()).ok()?;
        if let (Some(w), Some(c)) = (&self.complement_basis, &self.complement) {
            out = out.add(&w.matmul(c).ok()?.matmul(&w.adjoint()).ok()?).ok()?;
        }
        Some(out)
    }
}

/// True iff ker M ∩ ker M* = {0}, i.e. the smallest singular value of
/// [M; M*] exceeds `tol_rank`·‖M‖. Such an M has no 1×1 zero direct summand.
pub fn kernel_intersection_trivial(m: &ComplexMatrix, tol_rank: f64) -> Result<bool, BoundsError> {
    if !m.is_square() {
        return Err(crate::linalg::LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    let norm = operator_norm(m);
    if norm == 0.0 {
        return Ok(false);
    }
    let stacked = m.vstack(&m.adjoint())?;
    Ok(minimum_modulus(&stacked) > tol_rank * norm)
}

/// Orthonormal basis of C^{n_j} ⊖ span{x_j} for every segment, embedded in
/// C^n and concatenated in segment order.
fn complement_basis(
    bs: &BlockShift,
    units: &[Vec<C64>],
    tol: &Tolerances,
) -> Result<Option<ComplexMatrix>, BoundsError> {
    let n = bs.dimension();
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for ((&offset, &dim), x) in bs.offsets().iter().zip(bs.dims()).zip(units) {
        if dim == 1 {
            continue;
        }
        // eigenvectors of I − x·x* for eigenvalue 1
        let proj = ComplexMatrix::from_fn(dim, dim, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            C64::new(id, 0.0) - x[i] * x[j].conj()
        });
        let eig = hermitian_eigen(&proj, tol.eig)?;
        for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > 0.5 {
                let mut col = vec![C64::new(0.0, 0.0); n];
                for (r, z) in eig.eigenvectors.col_vec(idx).into_iter().enumerate() {
                    col[offset + r] = z;
                }
                cols.push(col);
            }
        }
    }
    if cols.is_empty() {
        return Ok(None);
    }
    Ok(Some(ComplexMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])))
}

/// Diagonal unitary D with D*·S·D having nonnegative superdiagonal.
fn superdiagonal_phases(s: &ComplexMatrix) -> ComplexMatrix {
    let k = s.rows();
    let mut d = vec![C64::new(1.0, 0.0); k];
    for j in 0..k - 1 {
        let z = s[(j, j + 1)];
        d[j + 1] = if z.norm() > 0.0 {
            d[j] * z.conj() / z.norm()
        } else {
            d[j]
        };
    }
    let mut out = ComplexMatrix::zeros(k, k);
    for (j, z) in d.into_iter().enumerate() {
        out.set(j, j, z);
    }
    out
}

struct Decomposition {
    k_basis: ComplexMatrix,
    summand: ComplexMatrix,
    complement_basis: Option<ComplexMatrix>,
    complement: Option<ComplexMatrix>,
    complement_radius: Option<f64>,
    residuals: Residuals,
}

/// Tests whether the unit segment vectors span a reducing subspace on which
/// A acts as `target`. `a` must already be normalized.
fn try_decomposition(
    bs: &BlockShift,
    a: &ComplexMatrix,
    units: &[Vec<C64>],
    target: &ScalarShift,
    w_target: f64,
    tol: &Tolerances,
) -> Result<Result<Decomposition, String>, BoundsError> {
    let n = bs.dimension();
    let k = bs.k();
    let offsets = bs.offsets();
    let q = ComplexMatrix::from_fn(n, k, |i, j| {
        let start = offsets[j];
        if i >= start && i < start + bs.dims()[j] {
            units[j][i - start]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let s = q.adjoint().matmul(a)?.matmul(&q)?;
    let invariance = a.matmul(&q)?.sub(&q.matmul(&s)?)?.frobenius_norm();
    let adjoint_invariance = a.adjoint().matmul(&q)?.sub(&q.matmul(&s.adjoint())?)?.frobenius_norm();
    if invariance > tol.cert {
        return Ok(Err(format!("A·K ⊄ K (residual {invariance:.3e})")));
    }
    if adjoint_invariance > tol.cert {
        return Ok(Err(format!("A*·K ⊄ K (residual {adjoint_invariance:.3e})")));
    }

    let d = superdiagonal_phases(&s);
    let k_basis = q.matmul(&d)?;
    let summand = d.adjoint().matmul(&s)?.matmul(&d)?;
    let similarity = summand.sub(&target.to_matrix())?.frobenius_norm();
    if similarity > tol.cert {
        return Ok(Err(format!(
            "A|K differs from the compression (residual {similarity:.3e})"
        )));
    }

    let w_basis = complement_basis(bs, units, tol)?;
    let (complement, complement_radius) = match &w_basis {
        Some(w) => {
            let c = w.adjoint().matmul(a)?.matmul(w)?;
            // segment-ordered basis: C is block-shift shaped, so θ = 0 is optimal
            let (lam, _) = crate::linalg::max_real_part_eigen(&c, tol.eig)?;
            (Some(c), Some(lam.max(0.0)))
        }
        None => (None, None),
    };
    if let Some(wc) = complement_radius {
        if wc > w_target + tol.cert {
            return Ok(Err(format!("w(complement) = {wc:.12} exceeds {w_target:.12}")));
        }
    }

    let mut rebuilt = k_basis.matmul(&summand)?.matmul(&k_basis.adjoint())?;
    if let (Some(w), Some(c)) = (&w_basis, &complement) {
        rebuilt = rebuilt.add(&w.matmul(c)?.matmul(&w.adjoint())?)?;
    }
    let reconstruction = rebuilt.sub(a)?.frobenius_norm();
    if reconstruction > tol.cert {
        return Ok(Err(format!("reassembly residual {reconstruction:.3e}")));
    }

    Ok(Ok(Decomposition {
        k_basis,
        summand,
        complement_basis: w_basis,
        complement,
        complement_radius,
        residuals: Residuals {
            invariance,
            adjoint_invariance,
            similarity,
            reconstruction,
        },
    }))
}

fn finish(
    status_ok: Decomposition,
    w_a: f64,
    w_bound: f64,
    norm: f64,
    reason: String,
    attempts: Vec<String>,
) -> EqualityCertificate {
    EqualityCertificate {
        status: CertificateStatus::EqualityWithSummand,
        reason,
        w_a: w_a * norm,
        w_bound: w_bound * norm,
        k_basis: Some(status_ok.k_basis),
        summand: Some(status_ok.summand.scale_real(norm)),
        complement_basis: status_ok.complement_basis,
        complement: status_ok.complement.map(|c| c.scale_real(norm)),
        complement_radius: status_ok.complement_radius.map(|w| w * norm),
        residuals: Some(status_ok.residuals),
        attempts,
    }
}

/// Unit vectors spanning the top eigenspace of `h` (eigenvalues within `gap`
/// of the maximum), then seeded random unit combinations of them, at most
/// [`MAX_ATTEMPTS`] in total.
fn extremal_candidates(h: &ComplexMatrix, gap: f64, seed: u64, tol: &Tolerances) -> Result<Vec<Vec<C64>>, BoundsError> {
    let eig = hermitian_eigen(h, tol.eig)?;
    let top = eig.max_eigenvalue();
    let basis: Vec<Vec<C64>> = (0..eig.eigenvalues.len())
        .rev()
        .filter(|&i| eig.eigenvalues[i] >= top - gap)
        .map(|i| eig.eigenvectors.col_vec(i))
        .collect();
    let mut out = basis.clone();
    if basis.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while out.len() < MAX_ATTEMPTS {
            let coeffs = random_unit_vector(&mut rng, basis.len());
            let mut x = vec![C64::new(0.0, 0.0); h.rows()];
            for (c, b) in coeffs.iter().zip(&basis) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
            let norm = vec_norm(&x);
            out.push(x.into_iter().map(|z| z / norm).collect());
        }
    }
    out.truncate(MAX_ATTEMPTS);
    Ok(out)
}

fn require_chain(bs: &BlockShift) -> Result<(), BoundsError> {
    if bs.k() < 2 {
        return Err(BlockShiftError::NoChain { k: bs.k() }.into());
    }
    Ok(())
}

/// Decides whether w(A) = w(A′), and if so exhibits A ≅ A′ ⊕ B.
///
/// Works on A/‖A‖. Equality is detected at `tol.cert`; a zero block makes
/// the hypothesis fail, in which case the decomposition is only attempted
/// for the log. Otherwise each candidate maximizer x of ⟨Re(A)x, x⟩ is
/// tested in turn.
pub fn certify_upper_equality(
    bs: &BlockShift,
    tol: &Tolerances,
    seed: u64,
) -> Result<EqualityCertificate, BoundsError> {
    require_chain(bs)?;
    let norm = bs.max_block_norm();
    if norm == 0.0 {
        return Ok(EqualityCertificate::verdict(
            CertificateStatus::EqualityHypothesisViolated,
            "all blocks are zero".into(),
            0.0,
            0.0,
            Vec::new(),
        ));
    }
    let unit = bs.scaled(1.0 / norm);
    let a = unit.assemble();
    let upper = unit.norm_compression();
    let w_a = numerical_radius_blockshift(&unit)?.value;
    let w_upper = numerical_radius_scalar(&upper)?.value;
    if (w_a - w_upper).abs() > tol.cert {
        return Ok(EqualityCertificate::verdict(
            CertificateStatus::NoEquality,
            format!("w(A) = {:.12} < w(A′) = {:.12}", w_a * norm, w_upper * norm),
            w_a * norm,
            w_upper * norm,
            Vec::new(),
        ));
    }

    let zero_block = upper.weights().iter().position(|&w| w <= tol.cert);
    let mut attempts = Vec::new();
    let candidates = extremal_candidates(&a.hermitian_part()?, tol.cert, seed, tol)?;
    let mut found = None;
    for (idx, x) in candidates.iter().enumerate() {
        let segs = unit.segments(x);
        let norms: Vec<f64> = segs.iter().map(|s| vec_norm(s)).collect();
        if let Some(j) = norms.iter().position(|&t| t <= tol.cert.sqrt()) {
            attempts.push(format!(
                "candidate {idx}: segment x_{} vanishes (‖x_j‖ = {:.3e})",
                j + 1,
                norms[j]
            ));
            continue;
        }
        let units: Vec<Vec<C64>> = segs
            .iter()
            .zip(&norms)
            .map(|(s, &t)| s.iter().map(|z| z / t).collect())
            .collect();
        // A_j·x_{j+1} = a_j·x_j: report the scalars a_j
        let a_scalars: Vec<C64> = unit
            .blocks()
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let y = b.apply(segs[j + 1]).expect("shape");
                let t = norms[j] * norms[j];
                segs[j].iter().zip(&y).map(|(xj, yj)| xj.conj() * yj).sum::<C64>() / t
            })
            .collect();
        match try_decomposition(&unit, &a, &units, &upper, w_upper, tol)? {
            Ok(dec) => {
                attempts.push(format!("candidate {idx}: invariant K found, a_j = {a_scalars:?}"));
                found = Some(dec);
                break;
            }
            Err(why) => attempts.push(format!("candidate {idx}: {why}")),
        }
    }
    for line in &attempts {
        debug!("certify upper: {line}");
    }

    if let Some(j) = zero_block {
        let best_effort = if found.is_some() { "succeeded" } else { "failed" };
        return Ok(EqualityCertificate::verdict(
            CertificateStatus::EqualityHypothesisViolated,
            format!(
                "w(A) = w(A′) but block A_{} is zero, so the summand theorem does not apply (best-effort decomposition {best_effort})",
                j + 1
            ),
            w_a * norm,
            w_upper * norm,
            attempts,
        ));
    }
    match found {
        Some(dec) => Ok(finish(
            dec,
            w_a,
            w_upper,
            norm,
            "A is unitarily similar to A′ ⊕ B with w(B) ≤ w(A′)".into(),
            attempts,
        )),
        None => Ok(EqualityCertificate::verdict(
            CertificateStatus::NoEquality,
            "no extremal vector yielded an invariant K".into(),
            w_a * norm,
            w_upper * norm,
            attempts,
        )),
    }
}

/// Decides whether w(A) = w(A″), and if so exhibits A ≅ A″ ⊕ C.
///
/// Needs A_1·…·A_{k−1} ≠ 0. The subspace comes from the chain
/// x_j ∝ A_j·…·A_{k−1}·u; at equality ‖A_j x_{j+1}‖ = m(A_j) and
/// A_j*A_j x_{j+1} = m(A_j)² x_{j+1} for every j, both checked explicitly.
pub fn certify_lower_equality(
    bs: &BlockShift,
    tol: &Tolerances,
    seed: u64,
) -> Result<EqualityCertificate, BoundsError> {
    require_chain(bs)?;
    let norm = bs.max_block_norm();
    if norm == 0.0 || !chain_is_nonzero(bs.blocks(), tol.cert) {
        let (w_a, w_lower) = if norm == 0.0 {
            (0.0, 0.0)
        } else {
            (
                numerical_radius_blockshift(bs)?.value,
                numerical_radius_scalar(&bs.min_modulus_compression())?.value,
            )
        };
        let eq = (w_a - w_lower).abs() <= tol.cert * norm.max(1.0);
        let reason = if eq {
            "chain product A_1…A_{k−1} is zero".to_string()
        } else {
            format!("chain product A_1…A_{{k−1}} is zero; w(A) = {w_a:.12} > w(A″) = {w_lower:.12}")
        };
        let status = if eq {
            CertificateStatus::EqualityHypothesisViolated
        } else {
            CertificateStatus::NoEquality
        };
        return Ok(EqualityCertificate::verdict(status, reason, w_a, w_lower, Vec::new()));
    }

    let unit = bs.scaled(1.0 / norm);
    let a = unit.assemble();
    let lower = unit.min_modulus_compression();
    let w_a = numerical_radius_blockshift(&unit)?.value;
    let w_lower = numerical_radius_scalar(&lower)?.value;
    if (w_a - w_lower).abs() > tol.cert {
        return Ok(EqualityCertificate::verdict(
            CertificateStatus::NoEquality,
            format!("w(A) = {:.12} > w(A″) = {:.12}", w_a * norm, w_lower * norm),
            w_a * norm,
            w_lower * norm,
            Vec::new(),
        ));
    }

    // u ranges over right singular vectors of the chain product, then random
    // unit vectors.
    let p = unit.product_chain()?;
    let gram = p.adjoint().matmul(&p)?;
    let eig = hermitian_eigen(&gram, tol.eig)?;
    let top = eig.max_eigenvalue();
    let mut candidates: Vec<Vec<C64>> = (0..eig.eigenvalues.len())
        .rev()
        .filter(|&i| eig.eigenvalues[i] > tol.cert * tol.cert * top)
        .map(|i| eig.eigenvectors.col_vec(i))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while candidates.len() < MAX_ATTEMPTS {
        candidates.push(random_unit_vector(&mut rng, p.cols()));
    }

    let mut attempts = Vec::new();
    let mut found = None;
    'outer: for (idx, u) in candidates.iter().enumerate() {
        let mut xs = vec![u.clone()];
        let mut ratios = Vec::new();
        for b in unit.blocks().iter().rev() {
            let y = b.apply(xs.last().expect("nonempty"))?;
            let r = vec_norm(&y);
            if r <= tol.cert {
                attempts.push(format!("candidate {idx}: chain collapses"));
                continue 'outer;
            }
            ratios.push(r);
            xs.push(y.into_iter().map(|z| z / r).collect());
        }
        xs.reverse();
        ratios.reverse();
        for (j, (&r, &m)) in ratios.iter().zip(lower.weights()).enumerate() {
            if (r - m).abs() > tol.cert {
                attempts.push(format!(
                    "candidate {idx}: ‖A_{0}x_{1}‖ = {r:.12} differs from m(A_{0}) = {m:.12}",
                    j + 1,
                    j + 2
                ));
                continue 'outer;
            }
            let b = &unit.blocks()[j];
            let x = &xs[j + 1];
            let bb = b.adjoint().apply(&b.apply(x)?)?;
            let res: Vec<C64> = bb.iter().zip(x).map(|(p, q)| p - q * (m * m)).collect();
            let res = vec_norm(&res);
            if res > tol.cert {
                attempts.push(format!(
                    "candidate {idx}: A_{0}*A_{0}x_{1} ≠ m(A_{0})²x_{1} (residual {res:.3e})",
                    j + 1,
                    j + 2
                ));
                continue 'outer;
            }
        }
        match try_decomposition(&unit, &a, &xs, &lower, w_lower, tol)? {
            Ok(dec) => {
                attempts.push(format!("candidate {idx}: invariant K found, ratios = {ratios:?}"));
                found = Some(dec);
                break;
            }
            Err(why) => attempts.push(format!("candidate {idx}: {why}")),
        }
    }
    for line in &attempts {
        debug!("certify lower: {line}");
    }

    match found {
        Some(dec) => Ok(finish(
            dec,
            w_a,
            w_lower,
            norm,
            "A is unitarily similar to A″ ⊕ C with w(C) ≤ w(A″)".into(),
            attempts,
        )),
        None => Ok(EqualityCertificate::verdict(
            CertificateStatus::NoEquality,
            "no chain vector yielded an invariant K".into(),
            w_a * norm,
            w_lower * norm,
            attempts,
        )),
    }
}
