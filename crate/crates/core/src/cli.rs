//! Command-line front end: JSON problem specifications, the
//! solve/classify/enumerate/check commands, and machine- and
//! human-readable reports.
//!
//! A problem specification is a single JSON document. Matrices are
//! row-major nested arrays or the shorthand `{"diag": [...]}`; the
//! problem family decides which names are required:
//!
//! ```json
//! {
//!   "problem": "brockett",
//!   "matrices": { "A": {"diag": [1, 2, 3, 4]}, "N": {"diag": [1, 2]} },
//!   "initial_point": { "random": { "seed": 7 } },
//!   "solver": { "grad_tol": 1e-10 },
//!   "output": { "trace": false, "classify": true }
//! }
//! ```
//!
//! Reports are JSON on stdout with every floating-point value rendered
//! with 17 significant digits, which round-trips f64 exactly; identical
//! spec and seed produce byte-identical reports apart from the `timing`
//! field. `--pretty` switches to a human rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::costs::{
    brockett_model, custom_model, penrose_model, procrustes_model, BrockettData, CostModel,
    PenroseData, ProcrustesData,
};
use crate::error::{Error, Result};
use crate::frame::build_frame_auto;
use crate::newton::{
    enumerate_brockett_critical_points, newton_solve, IterationRecord, NewtonOptions, SolveStatus,
};
use crate::optimality::{
    classify_critical_point, is_critical, Classification, CriticalPointKind, CriticalityReport,
    TOL_CRIT_DEFAULT, TOL_EIG_DEFAULT,
};
use crate::oracle::{audit_frame, fd_gradient, fd_hessian_quadform, OracleReport};
use crate::stiefel::StiefelPoint;

/// Hard cap on matrix dimensions accepted from a specification file.
pub const DIMENSION_CAP: usize = 2000;

/// Default eigenvalue-gap tolerance for `enumerate`.
pub const SPECTRUM_GAP_TOL_DEFAULT: f64 = 1e-8;

/// Problem family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// minimize 1/2 ||A U - B||^2; matrices A (m x n), B (m x p).
    Procrustes,
    /// minimize 1/2 ||A U C - B||^2; matrices A (m x n), B (m x q), C (p x q).
    Penrose,
    /// minimize tr(U^T A U N); matrices A (n x n symmetric), N (diagonal).
    Brockett,
    /// minimize tr(U^T C2 U C1^T); matrices C1 (p x p), C2 (n x n).
    CustomExpression,
}

/// A matrix literal: row-major nested arrays or a diagonal shorthand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Diag { diag: Vec<f64> },
    Rows(Vec<Vec<f64>>),
}

impl MatrixSpec {
    fn to_matrix(&self, name: &str) -> Result<DMatrix<f64>> {
        let m = match self {
            MatrixSpec::Diag { diag } => {
                if diag.is_empty() {
                    return Err(Error::Parse(format!("matrix {name}: empty diagonal")));
                }
                DMatrix::from_fn(
                    diag.len(),
                    diag.len(),
                    |i, j| {
                        if i == j {
                            diag[i]
                        } else {
                            0.0
                        }
                    },
                )
            }
            MatrixSpec::Rows(rows) => {
                if rows.is_empty() || rows[0].is_empty() {
                    return Err(Error::Parse(format!("matrix {name}: empty")));
                }
                let cols = rows[0].len();
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != cols {
                        return Err(Error::Parse(format!(
                            "matrix {name}: row {i} has {} entries, expected {cols}",
                            row.len()
                        )));
                    }
                }
                DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
            }
        };
        if m.nrows() > DIMENSION_CAP || m.ncols() > DIMENSION_CAP {
            return Err(Error::Dimension(format!(
                "matrix {name} is {}x{}, cap is {DIMENSION_CAP}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m)
    }
}

/// Starting point selector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialPointSpec {
    /// Seeded random feasible point.
    Random { seed: u64 },
    /// Explicit matrix; must satisfy the orthonormality constraint.
    Matrix(Vec<Vec<f64>>),
    /// Entry of the deterministic Brockett census (brockett only).
    CensusIndex(usize),
}

impl Default for InitialPointSpec {
    fn default() -> Self {
        InitialPointSpec::Random { seed: 0 }
    }
}

/// Report verbosity controls.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    /// Include the per-iteration trace in solve reports.
    pub trace: bool,
    /// Attach the second-order classification to solve reports.
    pub classify: bool,
}

/// A parsed and validated problem specification with all defaults
/// materialized; serializing it back records the resolved configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub problem: ProblemKind,
    pub matrices: BTreeMap<String, MatrixSpec>,
    #[serde(default)]
    pub initial_point: InitialPointSpec,
    #[serde(default)]
    pub solver: NewtonOptions,
    #[serde(default)]
    pub output: OutputOptions,
}

/// Reads and validates a specification file: JSON syntax, required
/// matrix names, shape consistency, and model-level constraints
/// (symmetry, weight ordering).
pub fn parse_problem_spec(path: &Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)?;
    let spec: ProblemSpec = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{} (line {}, column {})", e, e.line(), e.column())))?;
    build_model(&spec)?;
    Ok(spec)
}

/// Command selector for [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Classify,
    Enumerate,
    Check,
}

/// Command-line overrides applied on top of the specification.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Flags {
    pub pretty: bool,
    pub trace: bool,
    /// Replaces the seed of a random initial point.
    pub seed: Option<u64>,
    /// Command-scoped tolerance: gradient tolerance for solve,
    /// criticality tolerance for classify, eigenvalue-gap tolerance for
    /// enumerate.
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    /// Disables the gradient fallback, reproducing the raw Newton
    /// iteration.
    pub pure_newton: bool,
}

fn apply_flags(spec: &ProblemSpec, flags: &Flags) -> ProblemSpec {
    let mut resolved = spec.clone();
    if let Some(seed) = flags.seed {
        if let InitialPointSpec::Random { .. } = resolved.initial_point {
            resolved.initial_point = InitialPointSpec::Random { seed };
        }
    }
    if let Some(tol) = flags.tol {
        resolved.solver.grad_tol = tol;
    }
    if let Some(max_iters) = flags.max_iters {
        resolved.solver.max_iters = max_iters;
    }
    if flags.pure_newton {
        resolved.solver.fallback = false;
    }
    if flags.trace {
        resolved.output.trace = true;
    }
    resolved
}

struct ResolvedProblem {
    model: Box<dyn CostModel>,
    brockett: Option<BrockettData>,
}

fn require_matrix(spec: &ProblemSpec, name: &str) -> Result<DMatrix<f64>> {
    spec.matrices
        .get(name)
        .ok_or_else(|| {
            Error::Dimension(format!(
                "problem {:?} requires matrix \"{name}\", which is missing",
                spec.problem
            ))
        })?
        .to_matrix(name)
}

fn reject_unknown_matrices(spec: &ProblemSpec, allowed: &[&str]) -> Result<()> {
    for key in spec.matrices.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Parse(format!(
                "matrix \"{key}\" is not used by problem {:?} (expected names: {allowed:?})",
                spec.problem
            )));
        }
    }
    Ok(())
}

fn build_model(spec: &ProblemSpec) -> Result<ResolvedProblem> {
    match spec.problem {
        ProblemKind::Procrustes => {
            reject_unknown_matrices(spec, &["A", "B"])?;
            let a = require_matrix(spec, "A")?;
            let b = require_matrix(spec, "B")?;
            let model = procrustes_model(ProcrustesData { a, b })?;
            Ok(ResolvedProblem {
                model: Box::new(model),
                brockett: None,
            })
        }
        ProblemKind::Penrose => {
            reject_unknown_matrices(spec, &["A", "B", "C"])?;
            let a = require_matrix(spec, "A")?;
            let b = require_matrix(spec, "B")?;
            let c = require_matrix(spec, "C")?;
            let model = penrose_model(PenroseData { a, b, c })?;
            Ok(ResolvedProblem {
                model: Box::new(model),
                brockett: None,
            })
        }
        ProblemKind::Brockett => {
            reject_unknown_matrices(spec, &["A", "N"])?;
            let a = require_matrix(spec, "A")?;
            let n = require_matrix(spec, "N")?;
            if n.nrows() != n.ncols() {
                return Err(Error::Dimension(format!(
                    "matrix N must be square diagonal, got {}x{}",
                    n.nrows(),
                    n.ncols()
                )));
            }
            for i in 0..n.nrows() {
                for j in 0..n.ncols() {
                    if i != j && n[(i, j)] != 0.0 {
                        return Err(Error::Parse(format!(
                            "matrix N must be diagonal; entry ({i},{j}) is {}",
                            n[(i, j)]
                        )));
                    }
                }
            }
            let weights: Vec<f64> = (0..n.nrows()).map(|i| n[(i, i)]).collect();
            let data = BrockettData { a, weights };
            let model = brockett_model(data.clone())?;
            Ok(ResolvedProblem {
                model: Box::new(model),
                brockett: Some(data),
            })
        }
        ProblemKind::CustomExpression => {
            reject_unknown_matrices(spec, &["C1", "C2"])?;
            let c1 = require_matrix(spec, "C1")?;
            let c2 = require_matrix(spec, "C2")?;
            if c1.nrows() != c1.ncols() || c2.nrows() != c2.ncols() {
                return Err(Error::Dimension(format!(
                    "custom-expression requires square C1 and C2, got {}x{} and {}x{}",
                    c1.nrows(),
                    c1.ncols(),
                    c2.nrows(),
                    c2.ncols()
                )));
            }
            let (n, p) = (c2.nrows(), c1.nrows());
            let (c1v, c2v) = (c1.clone(), c2.clone());
            let model = custom_model(
                n,
                p,
                "tr(U^T C2 U C1^T)",
                Box::new(move |u| (u.tr_mul(&(&c2 * u * c1.transpose()))).trace()),
                Box::new(move |u| &c2v * u * c1v.transpose() + c2v.transpose() * u * &c1v),
                None,
            )?;
            Ok(ResolvedProblem {
                model: Box::new(model),
                brockett: None,
            })
        }
    }
}

fn resolve_initial_point(spec: &ProblemSpec, problem: &ResolvedProblem) -> Result<StiefelPoint> {
    let (n, p) = problem.model.dims();
    match &spec.initial_point {
        InitialPointSpec::Random { seed } => StiefelPoint::random(n, p, *seed),
        InitialPointSpec::Matrix(rows) => {
            let m = MatrixSpec::Rows(rows.clone()).to_matrix("initial_point")?;
            if m.nrows() != n || m.ncols() != p {
                return Err(Error::Dimension(format!(
                    "initial point is {}x{}, problem needs {n}x{p}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            StiefelPoint::from_matrix(m)
        }
        InitialPointSpec::CensusIndex(index) => {
            let data = problem.brockett.as_ref().ok_or_else(|| {
                Error::Parse("census-index initial points require the brockett problem".into())
            })?;
            let census = enumerate_brockett_critical_points(data, SPECTRUM_GAP_TOL_DEFAULT)?;
            census.get(*index).map(|e| e.point.clone()).ok_or_else(|| {
                Error::Parse(format!(
                    "census index {index} out of range (census has {} points)",
                    census.len()
                ))
            })
        }
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Result payload of `solve`.
#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_value: f64,
    pub final_point: Vec<Vec<f64>>,
    pub criticality: CriticalityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<IterationRecord>>,
}

/// Result payload of `classify`.
#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub point: Vec<Vec<f64>>,
    pub value: f64,
    pub tol_crit: f64,
    pub tol_eig: f64,
    pub criticality: CriticalityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
}

/// One row of the `enumerate` table.
#[derive(Debug, Serialize)]
pub struct CensusRow {
    pub index: usize,
    pub value: f64,
    pub kind: CriticalPointKind,
    pub eigen_indices: Vec<usize>,
    pub signs: Vec<i8>,
    pub point: Vec<Vec<f64>>,
}

/// Result payload of `enumerate`.
#[derive(Debug, Serialize)]
pub struct EnumerateReport {
    pub spectrum_gap_tol: f64,
    pub count: usize,
    pub rows: Vec<CensusRow>,
}

/// Result payload of `check`.
#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub all_pass: bool,
    pub reports: Vec<OracleReport>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandResult {
    Solve(SolveReport),
    Classify(ClassifyReport),
    Enumerate(EnumerateReport),
    Check(CheckReport),
}

/// Full report of one command invocation. The echoed spec carries every
/// resolved default, so a run is reproducible from its report alone.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Command,
    pub descriptor: String,
    pub spec: ProblemSpec,
    pub result: CommandResult,
    /// Wall-clock seconds; the only nondeterministic field.
    pub timing_seconds: f64,
}

/// Executes a command against a specification. Returns the process exit
/// code (0 success, 1 non-convergence or failed checks, 2 input errors
/// are raised as `Err` before this returns) and the report.
pub fn run(command: Command, spec: &ProblemSpec, flags: &Flags) -> Result<(i32, RunReport)> {
    let started = Instant::now();
    let resolved = apply_flags(spec, flags);
    let problem = build_model(&resolved)?;

    let (exit, result) = match command {
        Command::Solve => {
            let start = resolve_initial_point(&resolved, &problem)?;
            let outcome = newton_solve(&*problem.model, &start, &resolved.solver);
            let exit = match outcome.status {
                SolveStatus::Converged => 0,
                _ => 1,
            };
            let report = SolveReport {
                status: outcome.status,
                iterations: outcome.trace.len(),
                final_value: problem.model.value(outcome.point.matrix()),
                final_point: matrix_rows(outcome.point.matrix()),
                criticality: outcome.criticality,
                classification: if resolved.output.classify {
                    outcome.classification
                } else {
                    None
                },
                trace: resolved.output.trace.then_some(outcome.trace),
            };
            (exit, CommandResult::Solve(report))
        }
        Command::Classify => {
            let point = resolve_initial_point(&resolved, &problem)?;
            let tol_crit = flags.tol.unwrap_or(TOL_CRIT_DEFAULT);
            let tol_eig = TOL_EIG_DEFAULT;
            let criticality = is_critical(&*problem.model, &point, tol_crit);
            let classification = if criticality.is_critical {
                Some(classify_critical_point(
                    &*problem.model,
                    &point,
                    tol_crit,
                    tol_eig,
                )?)
            } else {
                None
            };
            let exit = if criticality.is_critical { 0 } else { 1 };
            let report = ClassifyReport {
                value: problem.model.value(point.matrix()),
                point: matrix_rows(point.matrix()),
                tol_crit,
                tol_eig,
                criticality,
                classification,
            };
            (exit, CommandResult::Classify(report))
        }
        Command::Enumerate => {
            let data = problem
                .brockett
                .as_ref()
                .ok_or_else(|| Error::Parse("enumerate requires the brockett problem".into()))?;
            let gap_tol = flags.tol.unwrap_or(SPECTRUM_GAP_TOL_DEFAULT);
            let census = enumerate_brockett_critical_points(data, gap_tol)?;
            let rows: Vec<CensusRow> = census
                .iter()
                .enumerate()
                .map(|(index, e)| CensusRow {
                    index,
                    value: e.value,
                    kind: e.classification.kind,
                    eigen_indices: e.eigen_indices.clone(),
                    signs: e.signs.clone(),
                    point: matrix_rows(e.point.matrix()),
                })
                .collect();
            let report = EnumerateReport {
                spectrum_gap_tol: gap_tol,
                count: rows.len(),
                rows,
            };
            (0, CommandResult::Enumerate(report))
        }
        Command::Check => {
            let reports = oracle_suite(&resolved, &problem)?;
            let all_pass = reports.iter().all(|r| r.pass);
            let exit = if all_pass { 0 } else { 1 };
            (
                exit,
                CommandResult::Check(CheckReport { all_pass, reports }),
            )
        }
    };

    let report = RunReport {
        command,
        descriptor: problem.model.descriptor(),
        spec: resolved,
        result,
        timing_seconds: started.elapsed().as_secs_f64(),
    };
    Ok((exit, report))
}

/// The full oracle suite for `check`: finite-difference gradient and
/// Hessian validation on seeded probes plus a frame audit at the
/// initial point.
fn oracle_suite(spec: &ProblemSpec, problem: &ResolvedProblem) -> Result<Vec<OracleReport>> {
    use rand::SeedableRng;
    use rand_distr::Distribution;

    let model = &*problem.model;
    let (n, p) = model.dims();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0DAC1E);
    let mut gaussian = |n: usize, p: usize| -> DMatrix<f64> {
        DMatrix::from_fn(n, p, |_, _| rand_distr::StandardNormal.sample(&mut rng))
    };

    let mut reports = Vec::new();
    for k in 0..3 {
        let u = gaussian(n, p);
        let v = gaussian(n, p);
        let w = gaussian(n, p);

        let fd = fd_gradient(model, &u, crate::oracle::DEFAULT_FD_STEP);
        let formula = model.gradient(&u);
        let rel = (&formula - &fd).norm() / fd.norm().max(1.0);
        reports.push(OracleReport::new(
            format!("gradient vs central differences (probe {k})"),
            rel,
            0.0,
            1e-6,
        ));

        let h_vv = model.hess_bilinear(&u, &v, &v);
        let fd_vv = fd_hessian_quadform(model, &u, &v, crate::oracle::DEFAULT_FD2_STEP);
        reports.push(OracleReport::new(
            format!("hessian quadratic form vs second differences (probe {k})"),
            h_vv,
            fd_vv,
            1e-5,
        ));

        let h_vw = model.hess_bilinear(&u, &v, &w);
        let h_wv = model.hess_bilinear(&u, &w, &v);
        reports.push(OracleReport::new(
            format!("hessian symmetry (probe {k})"),
            h_vw,
            h_wv,
            1e-10,
        ));
    }

    let point = resolve_initial_point(spec, problem)?;
    let frame = build_frame_auto(&point)?;
    reports.extend(audit_frame(&frame));
    Ok(reports)
}

struct SigFig17Formatter;

impl serde_json::ser::Formatter for SigFig17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes a report (or any value) to JSON with floats at 17
/// significant digits.
pub fn to_json(value: &impl Serialize) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFig17Formatter);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    String::from_utf8(out).expect("reports are valid utf8")
}

/// Human rendering of a report for `--pretty`.
pub fn render_pretty(report: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "command:    {:?}", report.command);
    let _ = writeln!(s, "model:      {}", report.descriptor);
    match &report.result {
        CommandResult::Solve(r) => {
            let _ = writeln!(
                s,
                "status:     {:?} in {} iterations",
                r.status, r.iterations
            );
            let _ = writeln!(s, "value:      {:.12e}", r.final_value);
            let _ = writeln!(
                s,
                "gradient:   |dG| = {:.3e} (critical: {})",
                r.criticality.embedded_grad_norm, r.criticality.is_critical
            );
            if let Some(c) = &r.classification {
                let _ = writeln!(s, "kind:       {:?}", c.kind);
                let _ = writeln!(s, "eigenvalues: {:?}", c.eigenvalues);
            }
            let _ = writeln!(s, "final point:");
            for row in &r.final_point {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:>13.6e}")).collect();
                let _ = writeln!(s, "  [{}]", cells.join(", "));
            }
            if let Some(trace) = &r.trace {
                let _ = writeln!(s, "trace:");
                for rec in trace {
                    let _ = writeln!(
                        s,
                        "  k={:<3} {:?}  value={:.6e}  |dG|={:.3e}  backtracks={}",
                        rec.k, rec.step_type, rec.value, rec.grad_norm, rec.backtracks
                    );
                }
            }
        }
        CommandResult::Classify(r) => {
            let _ = writeln!(s, "value:      {:.12e}", r.value);
            let _ = writeln!(
                s,
                "residuals:  sym {:.3e}, range {:.3e} (tol {:.1e})",
                r.criticality.sym_residual, r.criticality.range_residual, r.tol_crit
            );
            match &r.classification {
                Some(c) => {
                    let _ = writeln!(s, "kind:       {:?}", c.kind);
                    let _ = writeln!(s, "eigenvalues: {:?}", c.eigenvalues);
                }
                None => {
                    let _ = writeln!(
                        s,
                        "kind:       not critical at tolerance {:.1e}",
                        r.tol_crit
                    );
                }
            }
        }
        CommandResult::Enumerate(r) => {
            let _ = writeln!(s, "critical points: {}", r.count);
            let _ = writeln!(
                s,
                "index          value           kind  eigenvectors   signs"
            );
            for row in &r.rows {
                let _ = writeln!(
                    s,
                    "{:>5} {:>14.6} {:>14}  {:<14} {:?}",
                    row.index,
                    row.value,
                    format!("{:?}", row.kind),
                    format!("{:?}", row.eigen_indices),
                    row.signs
                );
            }
        }
        CommandResult::Check(r) => {
            for rep in &r.reports {
                let _ = writeln!(
                    s,
                    "[{}] {:<55} formula {:>13.6e}  oracle {:>13.6e}  rel {:.3e}",
                    if rep.pass { "PASS" } else { "FAIL" },
                    rep.quantity,
                    rep.formula,
                    rep.oracle,
                    rep.rel_error
                );
            }
            let _ = writeln!(s, "overall: {}", if r.all_pass { "PASS" } else { "FAIL" });
        }
    }
    let _ = writeln!(s, "elapsed:    {:.3}s", report.timing_seconds);
    s
}

/// A hint appended to error output when the mistake has a usual fix.
pub fn remediation(error: &Error) -> Option<&'static str> {
    match error {
        Error::ConstraintViolation { .. } => Some(
            "the initial point must have orthonormal columns; generate one with \
             {\"random\": {\"seed\": ...}} or retract your matrix first",
        ),
        Error::BadWeights(_) => Some("brockett weights must satisfy 0 <= mu_1 <= ... <= mu_p"),
        Error::NotSymmetric { .. } => Some("symmetrize A as (A + A^T)/2 before writing the spec"),
        Error::DegenerateSpectrum { .. } => Some(
            "enumeration needs simple eigenvalues; perturb A or lower --tol if the gap is real",
        ),
        Error::NotCritical { .. } => Some(
            "classification is only meaningful at critical points; run solve first and classify \
             its endpoint",
        ),
        Error::Parse(_) => Some("see README.md for the specification schema"),
        _ => None,
    }
}
