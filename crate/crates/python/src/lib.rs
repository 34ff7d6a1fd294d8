//! Python bindings: the `BlockShift` class plus the radius and
//! singular-value helpers. Reports cross the boundary as plain dicts built
//! from the same JSON the command-line tool emits.

use blockshift::bounds::{self, BoundsError, Tolerances};
use blockshift::cli::{BlockShiftDocument, CertificateSummary, DocumentError, Which};
use blockshift::{linalg, radius, ComplexMatrix, C64};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn bounds_error(e: BoundsError) -> PyErr {
    match e {
        BoundsError::NoWitness { .. } | BoundsError::InvalidEpsilon(_) | BoundsError::Shape(_) => value_error(e),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn document_error(e: DocumentError) -> PyErr {
    value_error(e)
}

fn matrix_from_rows(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(value_error)
}

fn json_to_python<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn tolerances(tol: Option<f64>, tol_rank: Option<f64>, tol_radius: Option<f64>) -> PyResult<Tolerances> {
    let mut t = Tolerances::default();
    for (name, given, slot) in [
        ("tol", tol, &mut t.cert),
        ("tol_rank", tol_rank, &mut t.rank),
        ("tol_radius", tol_radius, &mut t.radius),
    ] {
        if let Some(v) = given {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PyValueError::new_err(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
            *slot = v;
        }
    }
    Ok(t)
}

/// Block shift with blocks A_1, ..., A_{k-1} on the first block superdiagonal.
///
/// Each block is a list of rows of (complex) numbers.
#[pyclass(name = "BlockShift", module = "pyblockshift", frozen)]
pub struct PyBlockShift {
    inner: blockshift::BlockShift,
}

#[pymethods]
impl PyBlockShift {
    #[new]
    #[pyo3(signature = (blocks, dims = None))]
    fn new(blocks: Vec<Vec<Vec<C64>>>, dims: Option<Vec<usize>>) -> PyResult<Self> {
        let blocks = blocks.into_iter().map(matrix_from_rows).collect::<PyResult<Vec<_>>>()?;
        let inner = match dims {
            Some(d) => blockshift::BlockShift::with_dims(d, blocks),
            None => blockshift::BlockShift::new(blocks),
        }
        .map_err(value_error)?;
        Ok(Self { inner })
    }

    /// The zero shift on C^n with a single segment.
    #[staticmethod]
    fn zero(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: blockshift::BlockShift::zero(n).map_err(value_error)?,
        })
    }

    /// The scalar shift with the given nonnegative weights.
    #[staticmethod]
    fn scalar(weights: Vec<f64>) -> PyResult<Self> {
        let ss = blockshift::ScalarShift::new(weights).map_err(value_error)?;
        Ok(Self {
            inner: ss.to_blockshift(),
        })
    }

    /// The k x k Jordan block.
    #[staticmethod]
    fn jordan(k: usize) -> PyResult<Self> {
        if k == 0 {
            return Err(PyValueError::new_err("k must be at least 1"));
        }
        Ok(Self {
            inner: blockshift::ScalarShift::jordan(k).to_blockshift(),
        })
    }

    /// Parses the JSON document format used by the command-line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = BlockShiftDocument::parse_str(text).map_err(document_error)?;
        Ok(Self {
            inner: doc.to_blockshift().map_err(document_error)?,
        })
    }

    #[pyo3(signature = (name = None))]
    fn to_json(&self, name: Option<String>) -> String {
        BlockShiftDocument::from_blockshift(&self.inner, name).to_json()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn blocks(&self) -> Vec<Vec<Vec<C64>>> {
        self.inner.blocks().iter().map(ComplexMatrix::to_rows).collect()
    }

    /// The full n x n matrix as a list of rows.
    fn assemble(&self) -> Vec<Vec<C64>> {
        self.inner.assemble().to_rows()
    }

    /// w(A) = largest eigenvalue of (A + A*)/2.
    fn numerical_radius(&self) -> PyResult<f64> {
        Ok(radius::numerical_radius_blockshift(&self.inner)
            .map_err(value_error)?
            .value)
    }

    /// w(A'), from the block norms.
    fn upper_bound(&self) -> PyResult<f64> {
        bounds::upper_bound(&self.inner).map_err(bounds_error)
    }

    /// w(A''), from the block minimum moduli.
    fn lower_bound(&self) -> PyResult<f64> {
        bounds::lower_bound(&self.inner).map_err(bounds_error)
    }

    fn norm_weights(&self) -> Vec<f64> {
        self.inner.norm_compression().weights().to_vec()
    }

    fn min_modulus_weights(&self) -> Vec<f64> {
        self.inner.min_modulus_compression().weights().to_vec()
    }

    /// Every bound as a dict.
    #[pyo3(signature = (tol = None, tol_rank = None, tol_radius = None))]
    fn bounds_report<'py>(
        &self,
        py: Python<'py>,
        tol: Option<f64>,
        tol_rank: Option<f64>,
        tol_radius: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let t = tolerances(tol, tol_rank, tol_radius)?;
        let report = bounds::bounds_report(&self.inner, &t).map_err(bounds_error)?;
        json_to_python(py, &report)
    }

    /// Certificate for w(A) = w(A') ("upper") or w(A) = w(A'') ("lower").
    #[pyo3(signature = (which, seed = 0, tol = None, tol_rank = None))]
    fn certify<'py>(
        &self,
        py: Python<'py>,
        which: &str,
        seed: u64,
        tol: Option<f64>,
        tol_rank: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let t = tolerances(tol, tol_rank, None)?;
        let (which, cert) = match which {
            "upper" => (Which::Upper, bounds::certify_upper_equality(&self.inner, &t, seed)),
            "lower" => (Which::Lower, bounds::certify_lower_equality(&self.inner, &t, seed)),
            other => {
                return Err(PyValueError::new_err(format!(
                    "which must be 'upper' or 'lower', got {other:?}"
                )))
            }
        };
        let cert = cert.map_err(bounds_error)?;
        let trivial = bounds::kernel_intersection_trivial(&self.inner.assemble(), t.rank).map_err(bounds_error)?;
        json_to_python(py, &CertificateSummary::new(which, &cert, trivial))
    }

    /// Unit vector v with <Av, v> at least w(A'') (minus the perturbation
    /// allowance when the chain product vanishes).
    #[pyo3(signature = (seed = 0, eps = None, tol = None))]
    fn witness<'py>(
        &self,
        py: Python<'py>,
        seed: u64,
        eps: Option<f64>,
        tol: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let t = tolerances(tol, None, None)?;
        let w = bounds::lower_witness(&self.inner, seed, eps, &t).map_err(bounds_error)?;
        json_to_python(py, &w)
    }

    /// A nearby block shift, each block within eps, whose chain product is nonzero.
    #[pyo3(signature = (eps = None))]
    fn perturb(&self, eps: Option<f64>) -> PyResult<Self> {
        let eps = eps.unwrap_or_else(|| bounds::default_epsilon(&self.inner));
        let blocks =
            bounds::perturb_nonzero_chain(self.inner.blocks(), eps, linalg::DEFAULT_TOL_RANK).map_err(bounds_error)?;
        Ok(Self {
            inner: blockshift::BlockShift::with_dims(self.inner.dims().to_vec(), blocks).map_err(value_error)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("BlockShift(k={}, dims={:?})", self.inner.k(), self.inner.dims())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// w(J_k) = cos(pi/(k+1)).
#[pyfunction]
fn jordan_radius(k: usize) -> PyResult<f64> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be at least 1"));
    }
    Ok(radius::jordan_radius(k))
}

/// Numerical radius of an arbitrary square matrix by rotation sweep.
#[pyfunction]
#[pyo3(signature = (matrix, tol = radius::DEFAULT_TOL_RADIUS))]
fn numerical_radius(matrix: Vec<Vec<C64>>, tol: f64) -> PyResult<f64> {
    let m = matrix_from_rows(matrix)?;
    Ok(radius::numerical_radius_general(&m, tol).map_err(value_error)?.value)
}

/// Singular values in descending order.
#[pyfunction]
fn singular_values(matrix: Vec<Vec<C64>>) -> PyResult<Vec<f64>> {
    Ok(linalg::singular_values(&matrix_from_rows(matrix)?))
}

/// Reads a block-shift JSON document from disk.
#[pyfunction]
fn load(path: std::path::PathBuf) -> PyResult<PyBlockShift> {
    Ok(PyBlockShift {
        inner: blockshift::cli::parse_blockshift(&path).map_err(document_error)?,
    })
}

#[pymodule]
fn pyblockshift(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBlockShift>()?;
    m.add_function(wrap_pyfunction!(jordan_radius, m)?)?;
    m.add_function(wrap_pyfunction!(numerical_radius, m)?)?;
    m.add_function(wrap_pyfunction!(singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(load, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
