//! Block shifts: block matrices whose only nonzero blocks sit on the first
//! block superdiagonal, and their k×k scalar compressions.

use thiserror::Error;

use crate::linalg::{
    minimum_modulus, operator_norm, reduced_minimum_modulus_with, ComplexMatrix, C64, DEFAULT_TOL_RANK,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlockShiftError {
    #[error("a block shift needs at least one block, or explicit dims for the k = 1 case")]
    NoBlocks,
    #[error("{got} dims given for {blocks} blocks (need blocks + 1)")]
    DimsLength { got: usize, blocks: usize },
    #[error("segment {index} has dimension 0")]
    ZeroDimension { index: usize },
    #[error("block {index} is {got:?}, expected {expected:?}")]
    ShapeMismatch {
        index: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("the product chain needs at least two segments (k = {k})")]
    NoChain { k: usize },
    #[error("weight {index} is {value}, weights must be finite and nonnegative")]
    InvalidWeight { index: usize, value: f64 },
}

/// The block shift with blocks A_1..A_{k-1} acting on C^{n_1} ⊕ … ⊕ C^{n_k},
/// A_j being n_j × n_{j+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockShift {
    dims: Vec<usize>,
    blocks: Vec<ComplexMatrix>,
}

impl BlockShift {
    /// Builds a shift from its blocks, inferring the dims.
    pub fn new(blocks: Vec<ComplexMatrix>) -> Result<Self, BlockShiftError> {
        let first = blocks.first().ok_or(BlockShiftError::NoBlocks)?;
        let mut dims = vec![first.rows()];
        dims.extend(blocks.iter().map(ComplexMatrix::cols));
        Self::with_dims(dims, blocks)
    }

    pub fn with_dims(dims: Vec<usize>, blocks: Vec<ComplexMatrix>) -> Result<Self, BlockShiftError> {
        if dims.len() != blocks.len() + 1 {
            return Err(BlockShiftError::DimsLength {
                got: dims.len(),
                blocks: blocks.len(),
            });
        }
        if let Some(index) = dims.iter().position(|&d| d == 0) {
            return Err(BlockShiftError::ZeroDimension { index });
        }
        for (index, b) in blocks.iter().enumerate() {
            let expected = (dims[index], dims[index + 1]);
            if b.shape() != expected {
                return Err(BlockShiftError::ShapeMismatch {
                    index,
                    expected,
                    got: b.shape(),
                });
            }
        }
        Ok(Self { dims, blocks })
    }

    /// The k = 1 shift: the n×n zero matrix.
    pub fn zero(n: usize) -> Result<Self, BlockShiftError> {
        Self::with_dims(vec![n], Vec::new())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// Number of segments.
    pub fn k(&self) -> usize {
        self.dims.len()
    }

    /// Total dimension n = n_1 + … + n_k.
    pub fn dimension(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Starting row of every segment.
    pub fn offsets(&self) -> Vec<usize> {
        self.dims
            .iter()
            .scan(0, |acc, &d| {
                let start = *acc;
                *acc += d;
                Some(start)
            })
            .collect()
    }

    /// Splits a vector of C^n into its k segments.
    pub fn segments<'a>(&self, x: &'a [C64]) -> Vec<&'a [C64]> {
        assert_eq!(x.len(), self.dimension(), "vector length");
        self.offsets()
            .iter()
            .zip(&self.dims)
            .map(|(&o, &d)| &x[o..o + d])
            .collect()
    }

    /// Full n×n matrix.
    pub fn assemble(&self) -> ComplexMatrix {
        let n = self.dimension();
        let offsets = self.offsets();
        let mut out = ComplexMatrix::zeros(n, n);
        for (j, b) in self.blocks.iter().enumerate() {
            out.set_block(offsets[j], offsets[j + 1], b);
        }
        out
    }

    /// A′: weights ‖A_j‖.
    pub fn norm_compression(&self) -> ScalarShift {
        ScalarShift::from_trusted(self.blocks.iter().map(operator_norm).collect())
    }

    /// A″: weights m(A_j).
    pub fn min_modulus_compression(&self) -> ScalarShift {
        ScalarShift::from_trusted(self.blocks.iter().map(minimum_modulus).collect())
    }

    /// A‴: weights γ(A_j).
    pub fn gamma_compression(&self) -> ScalarShift {
        self.gamma_compression_with(DEFAULT_TOL_RANK)
    }

    pub fn gamma_compression_with(&self, tol_rank: f64) -> ScalarShift {
        ScalarShift::from_trusted(
            self.blocks
                .iter()
                .map(|b| reduced_minimum_modulus_with(b, tol_rank))
                .collect(),
        )
    }

    /// A_1·A_2·…·A_{k−1}, an n_1 × n_k matrix.
    pub fn product_chain(&self) -> Result<ComplexMatrix, BlockShiftError> {
        suffix_product(&self.blocks, 0).ok_or(BlockShiftError::NoChain { k: self.k() })
    }

    /// Block-diagonal unitary D scaling segment j by e^{i·j·θ}, so that
    /// D*·A·D = e^{iθ}·A.
    pub fn rotation_unitary(&self, theta: f64) -> ComplexMatrix {
        let n = self.dimension();
        let mut d = ComplexMatrix::zeros(n, n);
        for (j, (&o, &len)) in self.offsets().iter().zip(&self.dims).enumerate() {
            let phase = C64::from_polar(1.0, j as f64 * theta);
            for i in o..o + len {
                d.set(i, i, phase);
            }
        }
        d
    }

    /// Same shift with every block multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            blocks: self.blocks.iter().map(|b| b.scale_real(c)).collect(),
        }
    }

    /// Largest block norm, max_j ‖A_j‖ (0 when k = 1). Equals ‖A‖.
    pub fn max_block_norm(&self) -> f64 {
        self.blocks.iter().map(operator_norm).fold(0.0, f64::max)
    }
}

/// A_start·…·A_last, or None for an empty range.
pub(crate) fn suffix_product(blocks: &[ComplexMatrix], start: usize) -> Option<ComplexMatrix> {
    let mut iter = blocks[start.min(blocks.len())..].iter();
    let first = iter.next()?.clone();
    Some(iter.fold(first, |acc, b| acc.matmul(b).expect("chained shapes")))
}

/// k×k matrix with nonnegative weights on the superdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarShift {
    weights: Vec<f64>,
}

impl ScalarShift {
    pub fn new(weights: Vec<f64>) -> Result<Self, BlockShiftError> {
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(BlockShiftError::InvalidWeight { index, value });
        }
        Ok(Self { weights })
    }

    fn from_trusted(weights: Vec<f64>) -> Self {
        debug_assert!(weights.iter().all(|w| w.is_finite() && *w >= 0.0));
        Self { weights }
    }

    /// The k×k Jordan block J_k.
    pub fn jordan(k: usize) -> Self {
        assert!(k >= 1, "J_k needs k >= 1");
        Self::from_trusted(vec![1.0; k - 1])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k(&self) -> usize {
        self.weights.len() + 1
    }

    /// max_j w_j, 0 for k = 1.
    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// min_j w_j, 0 for k = 1.
    pub fn min_weight(&self) -> f64 {
        if self.weights.is_empty() {
            0.0
        } else {
            self.weights.iter().copied().fold(f64::INFINITY, f64::min)
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let k = self.k();
        ComplexMatrix::from_fn(k, k, |i, j| {
            if j == i + 1 {
                C64::new(self.weights[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// The same matrix viewed as a block shift with 1×1 blocks.
    pub fn to_blockshift(&self) -> BlockShift {
        let blocks = self
            .weights
            .iter()
            .map(|&w| ComplexMatrix::from_fn(1, 1, |_, _| C64::new(w, 0.0)))
            .collect();
        BlockShift::with_dims(vec![1; self.k()], blocks).expect("1x1 blocks")
    }
}
