//! Independent verification oracles.
//!
//! Finite-difference gradients and Hessian quadratic forms built from
//! `CostModel::value` alone (never the formula paths they validate),
//! retraction-curve second differences for the Riemannian Hessian at
//! critical points, and a frame auditor that re-derives every structural
//! property of a local frame from raw matrix arithmetic. Used by the test
//! suite and the `check` command.

use nalgebra::DMatrix;

use crate::costs::CostModel;
use crate::error::{Error, Result};
use crate::frame::{frame_dimension, FrameLabel, LocalFrame};
use crate::optimality::is_critical;
use crate::stiefel::{qf, StiefelPoint, TangentVector};

/// Default step for first differences.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Default step for second differences.
pub const DEFAULT_FD2_STEP: f64 = 1e-4;

/// Criticality tolerance required by [`fd_riemannian_quadform`].
pub const RIEMANNIAN_FD_CRIT_TOL: f64 = 1e-8;

/// One verified quantity: formula value against oracle value.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OracleReport {
    pub quantity: String,
    pub formula: f64,
    pub oracle: f64,
    pub abs_error: f64,
    /// |formula - oracle| / max(1, |oracle|).
    pub rel_error: f64,
    pub tol: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, formula: f64, oracle: f64, tol: f64) -> Self {
        let abs_error = (formula - oracle).abs();
        let rel_error = abs_error / oracle.abs().max(1.0);
        Self {
            quantity: quantity.into(),
            formula,
            oracle,
            abs_error,
            rel_error,
            tol,
            pass: rel_error <= tol,
        }
    }
}

/// Entry-wise central differences of the value:
/// (G(U + h E_ij) - G(U - h E_ij)) / 2h.
pub fn fd_gradient(model: &dyn CostModel, u: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(u.nrows(), u.ncols());
    let mut probe = u.clone();
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            probe[(i, j)] = u[(i, j)] + h;
            let plus = model.value(&probe);
            probe[(i, j)] = u[(i, j)] - h;
            let minus = model.value(&probe);
            probe[(i, j)] = u[(i, j)];
            g[(i, j)] = (plus - minus) / (2.0 * h);
        }
    }
    g
}

/// Second difference of the value along a fixed direction:
/// (G(U + hV) - 2 G(U) + G(U - hV)) / h^2.
pub fn fd_hessian_quadform(
    model: &dyn CostModel,
    u: &DMatrix<f64>,
    v: &DMatrix<f64>,
    h: f64,
) -> f64 {
    let plus = model.value(&(u + v * h));
    let center = model.value(u);
    let minus = model.value(&(u - v * h));
    (plus - 2.0 * center + minus) / (h * h)
}

/// Second difference of the restricted cost along the retraction curve
/// t -> qf(U + tV):
///
/// ```text
/// (G(qf(U + hV)) - 2 G(U) + G(qf(U - hV))) / h^2.
/// ```
///
/// For a first-order retraction this equals the Riemannian Hessian form
/// only where the differential of the cost vanishes, so the base point is
/// required to be critical at [`RIEMANNIAN_FD_CRIT_TOL`].
pub fn fd_riemannian_quadform(
    model: &dyn CostModel,
    point: &StiefelPoint,
    v: &TangentVector,
    h: f64,
) -> Result<f64> {
    let report = is_critical(model, point, RIEMANNIAN_FD_CRIT_TOL);
    if !report.is_critical {
        return Err(Error::NotCritical {
            residual: report.sym_residual.max(report.range_residual),
            tol: RIEMANNIAN_FD_CRIT_TOL,
        });
    }
    let plus = qf(&(point.matrix() + v.matrix() * h))?;
    let minus = qf(&(point.matrix() - v.matrix() * h))?;
    let center = model.value(point.matrix());
    Ok((model.value(&plus) - 2.0 * center + model.value(&minus)) / (h * h))
}

/// Audits every structural property of a frame from raw matrix
/// arithmetic: vector count against the dimension formula, tangency of
/// each member, the three orthogonality families, agreement of the
/// second-family Gram entries with Z = I - U U^T, and nonsingularity of
/// the full Gram matrix.
pub fn audit_frame(frame: &LocalFrame) -> Vec<OracleReport> {
    let mut reports = Vec::new();
    let point = frame.base();
    let u = point.matrix();
    let (n, p) = (point.n(), point.p());
    let z = point.normal_projector();
    let vectors = frame.vectors();
    let labels = frame.labels();

    let expected_dim = frame_dimension(n, p).unwrap_or(0) as f64;
    reports.push(OracleReport::new(
        "vector count vs np - p(p+1)/2",
        frame.dimension() as f64,
        expected_dim,
        0.0,
    ));

    let mut worst_tangency = 0.0f64;
    for v in vectors {
        let utv = u.tr_mul(v);
        worst_tangency = worst_tangency.max((&utv + utv.transpose()).amax());
    }
    reports.push(OracleReport::new(
        "max tangency residual",
        worst_tangency,
        0.0,
        1e-12,
    ));

    let mut prime_prime = 0.0f64;
    let mut prime_second = 0.0f64;
    let mut cross_group = 0.0f64;
    let mut gram_vs_z = 0.0f64;
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate() {
            let inner = vi.dot(vj);
            match (labels[i], labels[j]) {
                (FrameLabel::Prime { a: a1, b: b1 }, FrameLabel::Prime { a: a2, b: b2 }) => {
                    if (a1, b1) != (a2, b2) {
                        prime_prime = prime_prime.max(inner.abs());
                    }
                }
                (FrameLabel::Prime { .. }, FrameLabel::Second { .. })
                | (FrameLabel::Second { .. }, FrameLabel::Prime { .. }) => {
                    prime_second = prime_second.max(inner.abs());
                }
                (
                    FrameLabel::Second { row: r1, col: c1 },
                    FrameLabel::Second { row: r2, col: c2 },
                ) => {
                    if c1 != c2 {
                        cross_group = cross_group.max(inner.abs());
                    } else if !frame.is_orthonormalized() {
                        gram_vs_z = gram_vs_z.max((inner - z[(r1, r2)]).abs());
                    }
                }
            }
        }
    }
    reports.push(OracleReport::new(
        "prime family pairwise orthogonality",
        prime_prime,
        0.0,
        1e-12,
    ));
    reports.push(OracleReport::new(
        "prime vs second orthogonality",
        prime_second,
        0.0,
        1e-12,
    ));
    reports.push(OracleReport::new(
        "second family cross-group orthogonality",
        cross_group,
        0.0,
        1e-12,
    ));
    if !frame.is_orthonormalized() {
        reports.push(OracleReport::new(
            "second family Gram entries vs Z entries",
            gram_vs_z,
            0.0,
            1e-12,
        ));
    }

    let gram = frame.gram();
    let min_eig = gram
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, e| acc.min(*e));
    let mut gram_report = OracleReport::new("frame Gram minimum eigenvalue", min_eig, min_eig, 0.0);
    gram_report.pass = min_eig > 1e-8;
    gram_report.tol = 1e-8;
    reports.push(gram_report);

    reports
}
