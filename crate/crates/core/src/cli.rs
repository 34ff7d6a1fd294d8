//! Command-line front end: JSON block-shift documents in, human-readable or
//! JSON reports out.
//!
//! Exit codes: 0 success (for `certify`, equality with summand), 1 usage, I/O
//! or parse errors, 2 numerical failures, 3 `certify` found no equality, 4
//! `certify` found equality without the hypothesis of the summand theorem.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blockshift::{BlockShift, BlockShiftError};
use crate::bounds::{
    bounds_report, certify_lower_equality, certify_upper_equality, chain_is_nonzero, default_epsilon,
    kernel_intersection_trivial, lower_witness, perturb_nonzero_chain, BoundsError, BoundsReport, CertificateStatus,
    EqualityCertificate, Residuals, Tolerances, WitnessVector,
};
use crate::linalg::{operator_norm, ComplexMatrix, C64};
use crate::radius::jordan_radius;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_NO_EQUALITY: i32 = 3;
pub const EXIT_HYPOTHESIS_VIOLATED: i32 = 4;

/// Version of the report format, tracking the crate version.
pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("block {block}: {message}")]
    InvalidBlock { block: usize, message: String },
    #[error("invalid document: {0}")]
    Invalid(String),
}

/// One matrix as nested rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Vec<f64>>>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .to_rows()
                .into_iter()
                .map(|row| row.into_iter().map(|z| vec![z.re, z.im]).collect())
                .collect(),
        }
    }

    /// Validates shape and entries; `block` is the 1-based index used in errors.
    pub fn to_matrix(&self, block: usize) -> Result<ComplexMatrix, DocumentError> {
        let bad = |message: String| DocumentError::InvalidBlock { block, message };
        if self.rows == 0 || self.cols == 0 {
            return Err(bad(format!(
                "declared shape {}x{} has a zero dimension",
                self.rows, self.cols
            )));
        }
        if self.entries.len() != self.rows {
            return Err(bad(format!(
                "declares {} rows but lists {}",
                self.rows,
                self.entries.len()
            )));
        }
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(bad(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    self.cols
                )));
            }
            for (j, pair) in row.iter().enumerate() {
                if pair.len() != 2 {
                    return Err(bad(format!(
                        "entry ({}, {}) must be a [re, im] pair, got {} numbers",
                        i + 1,
                        j + 1,
                        pair.len()
                    )));
                }
                if !pair[0].is_finite() || !pair[1].is_finite() {
                    return Err(bad(format!("entry ({}, {}) is not finite", i + 1, j + 1)));
                }
                data.push(C64::new(pair[0], pair[1]));
            }
        }
        ComplexMatrix::new(self.rows, self.cols, data).map_err(|e| bad(e.to_string()))
    }
}

/// On-disk form of a block shift. `dims` is required when there are no
/// blocks and otherwise must agree with the block shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockShiftDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub blocks: Vec<MatrixDocument>,
}

impl BlockShiftDocument {
    pub fn from_blockshift(bs: &BlockShift, name: Option<String>) -> Self {
        Self {
            name,
            dims: if bs.k() == 1 { Some(bs.dims().to_vec()) } else { None },
            blocks: bs.blocks().iter().map(MatrixDocument::from_matrix).collect(),
        }
    }

    pub fn parse_str(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn to_blockshift(&self) -> Result<BlockShift, DocumentError> {
        if self.blocks.is_empty() {
            return match self.dims.as_deref() {
                Some(&[n]) if n > 0 => Ok(BlockShift::zero(n).expect("n > 0")),
                Some(d) => Err(DocumentError::Invalid(format!(
                    "a document without blocks needs \"dims\": [n] with n > 0, got {d:?}"
                ))),
                None => Err(DocumentError::Invalid(
                    "a document without blocks must declare \"dims\": [n]".into(),
                )),
            };
        }
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(j, b)| b.to_matrix(j + 1))
            .collect::<Result<Vec<_>, _>>()?;
        for (j, w) in blocks.windows(2).enumerate() {
            if w[0].cols() != w[1].rows() {
                return Err(DocumentError::InvalidBlock {
                    block: j + 2,
                    message: format!(
                        "has {} rows but block {} has {} columns",
                        w[1].rows(),
                        j + 1,
                        w[0].cols()
                    ),
                });
            }
        }
        let bs = BlockShift::new(blocks).map_err(|e| DocumentError::Invalid(e.to_string()))?;
        if let Some(d) = &self.dims {
            if d.as_slice() != bs.dims() {
                return Err(DocumentError::Invalid(format!(
                    "declared dims {d:?} disagree with block shapes {:?}",
                    bs.dims()
                )));
            }
        }
        Ok(bs)
    }
}

/// Reads and validates a block-shift document.
pub fn parse_blockshift(path: &Path) -> Result<BlockShift, DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    BlockShiftDocument::parse_str(&text)?.to_blockshift()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub which: Which,
    pub status: CertificateStatus,
    pub reason: String,
    pub w_a: f64,
    pub w_bound: f64,
    pub kernel_intersection_trivial: bool,
    pub k_basis: Option<MatrixDocument>,
    pub summand: Option<MatrixDocument>,
    pub complement_basis: Option<MatrixDocument>,
    pub complement: Option<MatrixDocument>,
    pub complement_radius: Option<f64>,
    pub residuals: Option<Residuals>,
    pub attempts: Vec<String>,
}

impl CertificateSummary {
    pub fn new(which: Which, cert: &EqualityCertificate, kernel_trivial: bool) -> Self {
        let doc = |m: &Option<ComplexMatrix>| m.as_ref().map(MatrixDocument::from_matrix);
        Self {
            which,
            status: cert.status,
            reason: cert.reason.clone(),
            w_a: cert.w_a,
            w_bound: cert.w_bound,
            kernel_intersection_trivial: kernel_trivial,
            k_basis: doc(&cert.k_basis),
            summand: doc(&cert.summand),
            complement_basis: doc(&cert.complement_basis),
            complement: doc(&cert.complement),
            complement_radius: cert.complement_radius,
            residuals: cert.residuals,
            attempts: cert.attempts.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSummary {
    pub epsilon: f64,
    pub changed: bool,
    /// ‖B_j − A_j‖ per block.
    pub block_changes: Vec<f64>,
    pub chain_norm_before: f64,
    pub chain_norm_after: f64,
    pub perturbed: BlockShiftDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanSummary {
    pub k: usize,
    pub radius: f64,
}

/// Machine-readable output of every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub command: String,
    #[serde(default)]
    pub input: Option<String>,
    pub seed: u64,
    pub tolerances: Tolerances,
    #[serde(default)]
    pub report: Option<BoundsReport>,
    #[serde(default)]
    pub certificate: Option<CertificateSummary>,
    #[serde(default)]
    pub witness: Option<WitnessVector>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSummary>,
    #[serde(default)]
    pub jordan: Option<JordanSummary>,
}

impl ReportDocument {
    fn new(command: &str, input: Option<&Path>, seed: u64, tolerances: Tolerances) -> Self {
        Self {
            version: REPORT_VERSION.to_string(),
            command: command.to_string(),
            input: input.map(|p| p.display().to_string()),
            seed,
            tolerances,
            report: None,
            certificate: None,
            witness: None,
            perturbation: None,
            jordan: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Process exit status implied by the report.
    pub fn exit_code(&self) -> i32 {
        match self.certificate.as_ref().map(|c| c.status) {
            Some(CertificateStatus::NoEquality) => EXIT_NO_EQUALITY,
            Some(CertificateStatus::EqualityHypothesisViolated) => EXIT_HYPOTHESIS_VIOLATED,
            _ => EXIT_OK,
        }
    }

    /// Plain `key = value` lines.
    pub fn to_human(&self) -> String {
        let mut out = Vec::<String>::new();
        let mut line = |key: &str, value: String| out.push(format!("{key} = {value}"));
        if let Some(j) = &self.jordan {
            return format!("{}\n", fmt_num(j.radius));
        }
        if let Some(r) = &self.report {
            line("k", r.k.to_string());
            line("dims", fmt_usizes(&r.dims));
            line("w(A)", fmt_num(r.w_a));
            line("w(A″)", fmt_num(r.w_lower));
            line("w(A′)", fmt_num(r.w_upper));
            line("m·cos(π/(k+1))", fmt_num(r.coarse_lower));
            line("M·cos(π/(k+1))", fmt_num(r.coarse_upper));
            line("M", fmt_num(r.max_norm));
            line("m", fmt_num(r.min_modulus));
            line("A′ weights", fmt_reals(&r.upper_weights));
            line("A″ weights", fmt_reals(&r.lower_weights));
            line("A‴ weights", fmt_reals(&r.gamma_weights));
            line(
                "w(A‴)",
                match r.gamma_bound {
                    Some(g) => fmt_num(g),
                    None => "not applicable".into(),
                },
            );
            line("γ bound", r.gamma_reason.clone());
        }
        if let Some(c) = &self.certificate {
            let bound = match c.which {
                Which::Upper => "w(A′)",
                Which::Lower => "w(A″)",
            };
            line("status", c.status.as_str().into());
            line("reason", c.reason.clone());
            line("w(A)", fmt_num(c.w_a));
            line(bound, fmt_num(c.w_bound));
            line("trivial ker A ∩ ker A*", c.kernel_intersection_trivial.to_string());
            if let Some(s) = &c.summand {
                let weights: Vec<f64> = (0..s.rows.saturating_sub(1))
                    .map(|j| s.entries[j][j + 1][0].hypot(s.entries[j][j + 1][1]))
                    .collect();
                line("summand weights", fmt_reals(&weights));
            }
            if let Some(w) = c.complement_radius {
                line("w(complement)", fmt_num(w));
            }
            if let Some(res) = &c.residuals {
                line("invariance residual", fmt_num(res.invariance));
                line("adjoint invariance residual", fmt_num(res.adjoint_invariance));
                line("similarity residual", fmt_num(res.similarity));
                line("reconstruction residual", fmt_num(res.reconstruction));
            }
            line("attempts", c.attempts.len().to_string());
        }
        if let Some(w) = &self.witness {
            line("w(A″)", fmt_num(w.lower_bound));
            line("⟨Av, v⟩", fmt_num(w.attained));
            line("guaranteed floor", fmt_num(w.floor));
            line("perturbed", w.perturbed.to_string());
            if let Some(e) = w.epsilon {
                line("ε", fmt_num(e));
            }
            line("y", fmt_reals(&w.perron_y));
            line("u", fmt_complexes(&w.u));
            line("v", fmt_complexes(&w.v));
        }
        if let Some(p) = &self.perturbation {
            line("ε", fmt_num(p.epsilon));
            line("changed", p.changed.to_string());
            line("‖B_j − A_j‖", fmt_reals(&p.block_changes));
            line("‖A_1⋯A_{k−1}‖ before", fmt_num(p.chain_norm_before));
            line("‖B_1⋯B_{k−1}‖ after", fmt_num(p.chain_norm_after));
        }
        line("seed", self.seed.to_string());
        line("tol_cert", fmt_num(self.tolerances.cert));
        line("tol_rank", fmt_num(self.tolerances.rank));
        line("tol_radius", fmt_num(self.tolerances.radius));
        line("tol_eig", fmt_num(self.tolerances.eig));
        let mut text = out.join("\n");
        text.push('\n');
        text
    }
}

/// Twelve significant digits, trailing zeros dropped but at least one
/// fractional digit kept; scientific notation outside [1e−5, 1e15).
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_fraction(&format!("{:.*}", decimals, x))
}

fn trim_fraction(s: &str) -> String {
    if !s.contains('.') {
        return format!("{s}.0");
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

fn fmt_complex(z: C64) -> String {
    if z.im == 0.0 {
        return fmt_num(z.re);
    }
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", fmt_num(z.re), fmt_num(z.im.abs()))
}

fn fmt_reals(xs: &[f64]) -> String {
    format!("({})", xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(", "))
}

fn fmt_usizes(xs: &[usize]) -> String {
    format!("({})", xs.iter().map(usize::to_string).collect::<Vec<_>>().join(", "))
}

fn fmt_complexes(xs: &[C64]) -> String {
    format!(
        "({})",
        xs.iter().map(|&z| fmt_complex(z)).collect::<Vec<_>>().join(", ")
    )
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Document(_) | Self::Usage(_) | Self::Write { .. } => EXIT_INPUT,
            Self::Bounds(BoundsError::NoWitness { .. })
            | Self::Bounds(BoundsError::InvalidEpsilon(_))
            | Self::Bounds(BoundsError::Shape(BlockShiftError::NoChain { .. })) => EXIT_INPUT,
            Self::Bounds(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "blockshift",
    version,
    about = "Numerical radius bounds, witnesses and equality certificates for block shifts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit the JSON report instead of key = value lines.
    #[arg(long, global = true)]
    pub json: bool,
    /// Certification tolerance (absolute, after scaling A to unit norm).
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tol: Option<f64>,
    /// Relative singular-value cutoff for ranks and nonzero chains.
    #[arg(long = "tol-rank", global = true, value_name = "FLOAT")]
    pub tol_rank: Option<f64>,
    /// Accuracy of the rotation sweep.
    #[arg(long = "tol-radius", global = true, value_name = "FLOAT")]
    pub tol_radius: Option<f64>,
    /// Hermitian check tolerance of the eigensolver.
    #[arg(long = "tol-eig", global = true, value_name = "FLOAT")]
    pub tol_eig: Option<f64>,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Perturbation size for zero chains (default 1e-6·(1 + max‖A_j‖)).
    #[arg(long, global = true, value_name = "FLOAT")]
    pub eps: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// w(A) with the upper, lower, coarse and γ bounds.
    Bounds { file: PathBuf },
    /// Decide whether w(A) equals w(A′) (upper) or w(A″) (lower) and exhibit the summand.
    Certify {
        #[arg(value_enum)]
        which: Which,
        file: PathBuf,
    },
    /// Unit vector v with ⟨Av, v⟩ ≥ w(A″).
    Witness { file: PathBuf },
    /// Move the blocks by less than ε so that A_1⋯A_{k−1} ≠ 0.
    Perturb {
        file: PathBuf,
        /// Write the perturbed block shift to this file.
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// w(J_k) = cos(π/(k+1)).
    Jordan { k: usize },
}

impl Cli {
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        let mut tol = Tolerances::default();
        for (name, given, slot) in [
            ("--tol", self.tol, &mut tol.cert),
            ("--tol-rank", self.tol_rank, &mut tol.rank),
            ("--tol-radius", self.tol_radius, &mut tol.radius),
            ("--tol-eig", self.tol_eig, &mut tol.eig),
        ] {
            if let Some(t) = given {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(CliError::Usage(format!("{name} must be positive and finite, got {t}")));
                }
                *slot = t;
            }
        }
        Ok(tol)
    }
}

/// Runs one parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<ReportDocument, CliError> {
    let tol = cli.tolerances()?;
    match &cli.command {
        Command::Bounds { file } => {
            let bs = parse_blockshift(file)?;
            let mut doc = ReportDocument::new("bounds", Some(file), cli.seed, tol);
            doc.report = Some(bounds_report(&bs, &tol)?);
            Ok(doc)
        }
        Command::Certify { which, file } => {
            let bs = parse_blockshift(file)?;
            let cert = match which {
                Which::Upper => certify_upper_equality(&bs, &tol, cli.seed)?,
                Which::Lower => certify_lower_equality(&bs, &tol, cli.seed)?,
            };
            info!(
                "certify {:?}: {} after {} attempts",
                which,
                cert.status.as_str(),
                cert.attempts.len()
            );
            let trivial = kernel_intersection_trivial(&bs.assemble(), tol.rank)?;
            let name = match which {
                Which::Upper => "certify upper",
                Which::Lower => "certify lower",
            };
            let mut doc = ReportDocument::new(name, Some(file), cli.seed, tol);
            doc.certificate = Some(CertificateSummary::new(*which, &cert, trivial));
            Ok(doc)
        }
        Command::Witness { file } => {
            let bs = parse_blockshift(file)?;
            let w = lower_witness(&bs, cli.seed, cli.eps, &tol)?;
            let mut doc = ReportDocument::new("witness", Some(file), cli.seed, tol);
            doc.witness = Some(w);
            Ok(doc)
        }
        Command::Perturb { file, output } => {
            let bs = parse_blockshift(file)?;
            if bs.k() < 2 {
                return Err(BoundsError::Shape(BlockShiftError::NoChain { k: bs.k() }).into());
            }
            let eps = cli.eps.unwrap_or_else(|| default_epsilon(&bs));
            let blocks = perturb_nonzero_chain(bs.blocks(), eps, tol.rank)?;
            let chain_norm = |b: &[ComplexMatrix]| -> Result<f64, CliError> {
                let p = BlockShift::with_dims(bs.dims().to_vec(), b.to_vec())
                    .map_err(BoundsError::from)?
                    .product_chain()
                    .map_err(BoundsError::from)?;
                Ok(operator_norm(&p))
            };
            let block_changes = blocks
                .iter()
                .zip(bs.blocks())
                .map(|(b, a)| b.sub(a).map(|d| operator_norm(&d)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(BoundsError::from)?;
            let perturbed_bs = BlockShift::with_dims(bs.dims().to_vec(), blocks.clone()).map_err(BoundsError::from)?;
            let perturbed =
                BlockShiftDocument::from_blockshift(&perturbed_bs, Some(format!("perturbed {}", file.display())));
            if let Some(out) = output {
                std::fs::write(out, perturbed.to_json() + "\n").map_err(|source| CliError::Write {
                    path: out.clone(),
                    source,
                })?;
            }
            let mut doc = ReportDocument::new("perturb", Some(file), cli.seed, tol);
            doc.perturbation = Some(PerturbationSummary {
                epsilon: eps,
                changed: block_changes.iter().any(|&d| d > 0.0),
                block_changes,
                chain_norm_before: chain_norm(bs.blocks())?,
                chain_norm_after: chain_norm(&blocks)?,
                perturbed,
            });
            debug_assert!(chain_is_nonzero(&blocks, tol.rank));
            Ok(doc)
        }
        Command::Jordan { k } => {
            if *k == 0 {
                return Err(CliError::Usage("jordan needs k >= 1".into()));
            }
            let mut doc = ReportDocument::new("jordan", None, cli.seed, tol);
            doc.jordan = Some(JordanSummary {
                k: *k,
                radius: jordan_radius(*k),
            });
            Ok(doc)
        }
    }
}

/// Parses `args` (including the program name), runs the command, writes the
/// report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    match execute(&cli) {
        Ok(doc) => {
            let text = if cli.json { doc.to_json() + "\n" } else { doc.to_human() };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            doc.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Log level from `BLOCKSHIFT_LOG` ∈ {quiet, info, debug}; unset means
/// warnings only.
pub fn log_level(value: Option<&str>) -> Result<LevelFilter, String> {
    match value.map(str::trim) {
        None | Some("") => Ok(LevelFilter::Warn),
        Some(v) if v.eq_ignore_ascii_case("quiet") => Ok(LevelFilter::Off),
        Some(v) if v.eq_ignore_ascii_case("info") => Ok(LevelFilter::Info),
        Some(v) if v.eq_ignore_ascii_case("debug") => Ok(LevelFilter::Debug),
        Some(v) => Err(format!("BLOCKSHIFT_LOG must be quiet, info or debug, got {v:?}")),
    }
}

/// Installs a stderr logger configured from `BLOCKSHIFT_LOG`.
pub fn init_logging() {
    let value = std::env::var("BLOCKSHIFT_LOG").ok();
    let (level, problem) = match log_level(value.as_deref()) {
        Ok(level) => (level, None),
        Err(msg) => (LevelFilter::Warn, Some(msg)),
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
    if let Some(msg) = problem {
        log::warn!("{msg}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(std::f64::consts::FRAC_1_SQRT_2), "0.707106781187");
        assert_eq!(fmt_num(1.0), "1.0");
        assert_eq!(fmt_num(0.9999999999999998), "1.0");
        assert_eq!(fmt_num(0.0), "0.0");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(1e-8), "1.0e-8");
        assert_eq!(fmt_num(123456.7890123456), "123456.789012");
        assert_eq!(fmt_num(1.224_744_871_391_589), "1.22474487139");
        assert_eq!(fmt_num(3e20), "3.0e20");
    }

    #[test]
    fn complex_format() {
        assert_eq!(fmt_complex(C64::new(0.5, -0.25)), "0.5-0.25i");
        assert_eq!(fmt_complex(C64::new(1.0, 0.0)), "1.0");
    }

    #[test]
    fn document_round_trip() {
        for bs in [
            fixtures::example23(),
            fixtures::example35(),
            BlockShift::zero(3).unwrap(),
        ] {
            let doc = BlockShiftDocument::from_blockshift(&bs, Some("x".into()));
            let again = BlockShiftDocument::parse_str(&doc.to_json()).unwrap();
            assert_eq!(doc, again);
            assert_eq!(again.to_blockshift().unwrap(), bs);
        }
    }

    #[test]
    fn document_errors_name_the_block() {
        let text = r#"{"blocks": [
            {"rows": 1, "cols": 2, "entries": [[[1, 0], [1, 0]]]},
            {"rows": 3, "cols": 1, "entries": [[[1, 0]], [[0, 0]], [[0, 0]]]}
        ]}"#;
        match BlockShiftDocument::parse_str(text).unwrap().to_blockshift() {
            Err(DocumentError::InvalidBlock { block: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let text = r#"{"blocks": [{"rows": 1, "cols": 1, "entries": [[[1, 0, 2]]]}]}"#;
        assert!(matches!(
            BlockShiftDocument::parse_str(text).unwrap().to_blockshift(),
            Err(DocumentError::InvalidBlock { block: 1, .. })
        ));
        match BlockShiftDocument::parse_str("{\"blocks\": [\n  {\"rows\": 1,,}]}") {
            Err(DocumentError::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let text = r#"{"blocks": []}"#;
        assert!(BlockShiftDocument::parse_str(text).unwrap().to_blockshift().is_err());
        let text = r#"{"blocks": [], "dims": [4]}"#;
        let bs = BlockShiftDocument::parse_str(text).unwrap().to_blockshift().unwrap();
        assert_eq!((bs.k(), bs.dimension()), (1, 4));
    }

    #[test]
    fn log_levels() {
        assert_eq!(log_level(None).unwrap(), LevelFilter::Warn);
        assert_eq!(log_level(Some("quiet")).unwrap(), LevelFilter::Off);
        assert_eq!(log_level(Some("DEBUG")).unwrap(), LevelFilter::Debug);
        assert!(log_level(Some("loud")).is_err());
    }

    #[test]
    fn jordan_command() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(["blockshift", "jordan", "3"], &mut out, &mut err);
        assert_eq!(code, 0);
        assert_eq!(String::from_utf8(out).unwrap(), "0.707106781187\n");
        let code = run(["blockshift", "jordan", "0"], &mut Vec::new(), &mut err);
        assert_eq!(code, EXIT_INPUT);
        let code = run(["blockshift", "frobnicate"], &mut Vec::new(), &mut Vec::new());
        assert_eq!(code, EXIT_INPUT);
        let code = run(
            ["blockshift", "--tol", "-1", "jordan", "2"],
            &mut Vec::new(),
            &mut Vec::new(),
        );
        assert_eq!(code, EXIT_INPUT);
    }
}
