//! Newton iteration on St(n,p) over the explicit local frame, plus
//! exhaustive critical-point enumeration for diagonal Brockett instances.
//!
//! Each iteration rebuilds the pivot set and frame at the current point,
//! assembles the coordinate gradient and the frame Hessian, solves
//!
//! ```text
//! H v = -g
//! ```
//!
//! for the step coordinates, assembles the ambient step vector, and
//! retracts with qf. The raw algorithm takes unit Newton steps with no
//! globalization; the default safeguard replaces non-descent directions
//! (and failed solves) with an Armijo-backtracked step along the negative
//! embedded gradient. Disabling the fallback reproduces the raw iteration,
//! which converges to whatever critical point the Newton map attracts to.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::costs::{brockett_model, BrockettData, CostModel};
use crate::error::{Error, Result};
use crate::frame::build_frame_auto;
use crate::optimality::{
    assemble_frame_hessian, classify_critical_point, embedded_gradient, frame_gradient_coords,
    is_critical, Classification, CriticalityReport, TOL_CRIT_DEFAULT, TOL_EIG_DEFAULT,
};
use crate::stiefel::{project_tangent, retract_qf, StiefelPoint, TangentVector};

/// Shift policy for a Newton system whose factorization breaks down:
/// H + mu * Gram with mu starting at `initial_scale * max(1, ||H||)` and
/// doubling for at most `max_attempts` tries. Gram-scaled shifts keep the
/// modified system consistent with the non-orthonormal frame metric.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularizationPolicy {
    pub initial_scale: f64,
    pub max_attempts: u32,
}

impl Default for RegularizationPolicy {
    fn default() -> Self {
        Self {
            initial_scale: 1e-10,
            max_attempts: 40,
        }
    }
}

/// Backtracking parameters for the fallback gradient step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArmijoParams {
    pub c: f64,
    pub shrink: f64,
    pub max_backtracks: u32,
}

impl Default for ArmijoParams {
    fn default() -> Self {
        Self {
            c: 1e-4,
            shrink: 0.5,
            max_backtracks: 30,
        }
    }
}

/// Solver options. Termination is `||dG||_F <= grad_tol` or `max_iters`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub regularization: RegularizationPolicy,
    /// When true (default), non-descent Newton directions and failed
    /// solves fall back to an Armijo gradient step, giving minimization
    /// semantics. When false the raw Newton iteration runs unguarded.
    pub fallback: bool,
    pub armijo: ArmijoParams,
    /// Reserved for randomized tie-breaking; the current implementation
    /// is fully deterministic and does not consume it.
    pub seed: u64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iters: 100,
            grad_tol: 1e-10,
            regularization: RegularizationPolicy::default(),
            fallback: true,
            armijo: ArmijoParams::default(),
            seed: 0,
        }
    }
}

/// Kind of step taken in one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepType {
    Newton,
    FallbackGradient,
}

/// One row of the solve trace.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub value: f64,
    pub grad_norm: f64,
    pub step_type: StepType,
    /// Relative residual ||H v + g|| / ||g|| of the linear solve; absent
    /// on fallback steps.
    pub solve_residual: Option<f64>,
    pub backtracks: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    SolveFailure,
}

/// Outcome of [`newton_solve`].
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub point: StiefelPoint,
    pub trace: Vec<IterationRecord>,
    pub status: SolveStatus,
    pub criticality: CriticalityReport,
    /// Second-order verdict at the final point; present when the run
    /// converged and the point passes the criticality gate at the default
    /// classification tolerances.
    pub classification: Option<Classification>,
}

/// Diagnostics of a single Newton linear solve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepDiagnostics {
    pub solve_residual: f64,
    /// Shift applied to the system; zero when the unmodified solve
    /// succeeded.
    pub regularization: f64,
    /// Dimension of the frame system.
    pub dimension: usize,
}

/// Computes one Newton direction at `point`: builds the pivot set, frame,
/// coordinate gradient, and frame Hessian, solves H v = -g, and assembles
/// the ambient line-search vector from the frame coordinates.
pub fn newton_step(
    model: &dyn CostModel,
    point: &StiefelPoint,
) -> Result<(TangentVector, StepDiagnostics)> {
    let frame = build_frame_auto(point)?;
    let g = frame_gradient_coords(model, point, &frame);
    let d = frame.dimension();
    if g.amax() == 0.0 {
        return Ok((
            TangentVector::zero(point),
            StepDiagnostics {
                solve_residual: 0.0,
                regularization: 0.0,
                dimension: d,
            },
        ));
    }
    let fh = assemble_frame_hessian(model, point, &frame);
    let rhs = -&g;
    let (coords, solve_residual, regularization) =
        solve_symmetric_system(&fh.h, &fh.gram, &rhs, &RegularizationPolicy::default())?;
    let mut step = DMatrix::zeros(point.n(), point.p());
    for (c, v) in coords.iter().zip(frame.vectors()) {
        step += v * *c;
    }
    // The assembled step is tangent up to roundoff; projecting cleans the
    // accumulated error without changing the direction.
    let v = project_tangent(point, &step);
    Ok((
        v,
        StepDiagnostics {
            solve_residual,
            regularization,
            dimension: d,
        },
    ))
}

/// Solves the symmetric (possibly indefinite) system through a spectral
/// factorization, shifting by the Gram matrix per the policy when the
/// factorization is numerically singular. Returns the solution, the
/// relative residual against the unshifted system, and the shift used.
fn solve_symmetric_system(
    h: &DMatrix<f64>,
    gram: &DMatrix<f64>,
    rhs: &DVector<f64>,
    policy: &RegularizationPolicy,
) -> Result<(DVector<f64>, f64, f64)> {
    let scale = h.norm().max(1.0);
    let rhs_norm = rhs.norm();
    let mut mu = 0.0;
    for attempt in 0..=policy.max_attempts {
        let shifted = if mu == 0.0 { h.clone() } else { h + gram * mu };
        let sym = (&shifted + shifted.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let max_abs = eig.eigenvalues.amax();
        let floor = 1e-14 * max_abs.max(1.0);
        if eig.eigenvalues.iter().all(|l| l.abs() > floor) {
            let qt_rhs = eig.eigenvectors.tr_mul(rhs);
            let scaled = DVector::from_fn(qt_rhs.len(), |i, _| qt_rhs[i] / eig.eigenvalues[i]);
            let solution = &eig.eigenvectors * scaled;
            let residual = (h * &solution - rhs).norm() / rhs_norm.max(f64::MIN_POSITIVE);
            return Ok((solution, residual, mu));
        }
        mu = if attempt == 0 {
            policy.initial_scale * scale
        } else {
            mu * 2.0
        };
    }
    Err(Error::SolveFailure(format!(
        "frame Hessian system remained singular after {} regularization attempts",
        policy.max_attempts
    )))
}

/// Runs the Newton iteration from `start` until `||dG||_F <= grad_tol` or
/// the iteration budget is exhausted. Failures are encoded in the status,
/// never panics.
pub fn newton_solve(
    model: &dyn CostModel,
    start: &StiefelPoint,
    opts: &NewtonOptions,
) -> OptimizationResult {
    let mut point = start.clone();
    let mut trace = Vec::new();
    let status;
    let mut k = 0;
    loop {
        let eg = embedded_gradient(model, &point);
        let grad_norm = eg.norm();
        if grad_norm <= opts.grad_tol {
            status = SolveStatus::Converged;
            break;
        }
        if k >= opts.max_iters {
            status = SolveStatus::MaxIters;
            break;
        }
        let value = model.value(point.matrix());

        let mut next = None;
        let mut step_type = StepType::Newton;
        let mut solve_residual = None;
        let mut backtracks = 0;

        match newton_step(model, &point) {
            Ok((v, diag)) => {
                solve_residual = Some(diag.solve_residual);
                let descent = eg.matrix().dot(v.matrix()) < -1e-12 * grad_norm * v.norm();
                if descent || !opts.fallback {
                    if let Ok(q) = retract_qf(&point, &v) {
                        next = Some(q);
                    }
                }
            }
            Err(_) if opts.fallback => {}
            Err(e) => {
                trace.push(IterationRecord {
                    k,
                    value,
                    grad_norm,
                    step_type: StepType::Newton,
                    solve_residual: None,
                    backtracks: 0,
                });
                let _ = e;
                status = SolveStatus::SolveFailure;
                break;
            }
        }

        if next.is_none() {
            if !opts.fallback {
                status = SolveStatus::SolveFailure;
                break;
            }
            step_type = StepType::FallbackGradient;
            solve_residual = None;
            let mut t = 1.0;
            for _ in 0..opts.armijo.max_backtracks {
                if let Ok(trial) = retract_qf(&point, &eg.scaled(-t)) {
                    let trial_value = model.value(trial.matrix());
                    if trial_value <= value - opts.armijo.c * t * grad_norm * grad_norm {
                        next = Some(trial);
                        break;
                    }
                }
                t *= opts.armijo.shrink;
                backtracks += 1;
            }
            if next.is_none() {
                status = SolveStatus::SolveFailure;
                break;
            }
        }

        trace.push(IterationRecord {
            k,
            value,
            grad_norm,
            step_type,
            solve_residual,
            backtracks,
        });
        point = next.expect("step accepted");
        k += 1;
    }

    let criticality = is_critical(model, &point, opts.grad_tol * 10.0);
    let classification = if status == SolveStatus::Converged {
        classify_critical_point(model, &point, TOL_CRIT_DEFAULT, TOL_EIG_DEFAULT).ok()
    } else {
        None
    };
    OptimizationResult {
        point,
        trace,
        status,
        criticality,
        classification,
    }
}

/// One critical point of a diagonal-spectrum Brockett instance: columns
/// are signed eigenvectors of A.
#[derive(Debug, Clone)]
pub struct CensusEntry {
    pub point: StiefelPoint,
    pub value: f64,
    pub classification: Classification,
    /// Positions (0-based) of the chosen eigenvectors in the ascending
    /// eigenvalue order.
    pub eigen_indices: Vec<usize>,
    /// Column signs, entries +1 or -1.
    pub signs: Vec<i8>,
}

/// Largest number of candidate points [`enumerate_brockett_critical_points`]
/// is willing to generate.
pub const MAX_ENUMERATION: usize = 1_000_000;

/// Enumerates every critical point of the Brockett cost on St(n,p) when A
/// has simple spectrum: all ordered selections of p distinct eigenvectors
/// with all 2^p sign patterns. Each candidate is verified against the
/// first-order conditions and classified. Output order is deterministic:
/// ascending value, then eigenvector indices, then signs.
///
/// Fails with [`Error::DegenerateSpectrum`] when two eigenvalues of A are
/// closer than `tol`; the critical set is not finite there and a list
/// would mislead.
pub fn enumerate_brockett_critical_points(
    data: &BrockettData,
    tol: f64,
) -> Result<Vec<CensusEntry>> {
    let model = brockett_model(data.clone())?;
    let (n, p) = model.dims();

    let eig = data.a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    for (idx, pair) in eigenvalues.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if gap <= tol {
            return Err(Error::DegenerateSpectrum {
                gap,
                index: idx,
                tol,
            });
        }
    }
    // Deterministic eigenvector signs: largest-magnitude entry positive.
    let mut basis = Vec::with_capacity(n);
    for &i in &order {
        let mut v = eig.eigenvectors.column(i).clone_owned();
        let lead = v.iter().enumerate().fold((0usize, 0.0f64), |acc, (k, x)| {
            if x.abs() > acc.1 {
                (k, x.abs())
            } else {
                acc
            }
        });
        if v[lead.0] < 0.0 {
            v = -v;
        }
        basis.push(v);
    }

    let arrangements = (0..p).try_fold(1usize, |acc, k| {
        acc.checked_mul(n - k).filter(|v| *v <= MAX_ENUMERATION)
    });
    let total = arrangements
        .and_then(|a| a.checked_shl(p as u32).filter(|v| *v <= MAX_ENUMERATION))
        .ok_or_else(|| {
            Error::Dimension(format!(
                "enumeration of St({n},{p}) exceeds {MAX_ENUMERATION} candidates"
            ))
        })?;

    let mut entries = Vec::with_capacity(total);
    let mut indices = Vec::with_capacity(p);
    let mut used = vec![false; n];
    enumerate_arrangements(&mut indices, &mut used, n, p, &mut |selection| {
        for mask in 0..(1u32 << p) {
            let signs: Vec<i8> = (0..p)
                .map(|c| if mask & (1 << c) != 0 { -1 } else { 1 })
                .collect();
            let mut m = DMatrix::zeros(n, p);
            for (c, (&idx, &s)) in selection.iter().zip(&signs).enumerate() {
                m.set_column(c, &(&basis[idx] * f64::from(s)));
            }
            let point = StiefelPoint::new(m, 1e-10)?;
            let report = is_critical(&model, &point, 1e-10);
            if !report.is_critical {
                return Err(Error::ValidationFailure(format!(
                    "enumerated candidate {selection:?} signs {signs:?} failed the \
                     criticality check (residual {:.3e})",
                    report.sym_residual.max(report.range_residual)
                )));
            }
            let classification =
                classify_critical_point(&model, &point, TOL_CRIT_DEFAULT, TOL_EIG_DEFAULT)?;
            entries.push(CensusEntry {
                value: model.value(point.matrix()),
                point,
                classification,
                eigen_indices: selection.to_vec(),
                signs,
            });
        }
        Ok(())
    })?;

    entries.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.eigen_indices.cmp(&b.eigen_indices))
            .then_with(|| a.signs.cmp(&b.signs))
    });
    Ok(entries)
}

fn enumerate_arrangements(
    current: &mut Vec<usize>,
    used: &mut [bool],
    n: usize,
    p: usize,
    visit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if current.len() == p {
        return visit(current);
    }
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        current.push(i);
        enumerate_arrangements(current, used, n, p, visit)?;
        current.pop();
        used[i] = false;
    }
    Ok(())
}
