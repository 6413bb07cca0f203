//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines; every tolerance is pinned in code.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use stiefel_newton::costs::{
    brockett_model, penrose_model, procrustes_model, BrockettData, CostModel, PenroseData,
    ProcrustesData,
};
use stiefel_newton::frame::{build_frame_auto, frame_dimension, FrameLabel};
use stiefel_newton::newton::{
    enumerate_brockett_critical_points, newton_solve, NewtonOptions, SolveStatus,
};
use stiefel_newton::optimality::{
    assemble_frame_hessian, constraint_hess_cross_form, constraint_hess_diag_form,
    embedded_gradient, is_critical, sigma_kron_bilinear, sigma_matrix, CriticalPointKind,
    SigmaMatrix,
};
use stiefel_newton::oracle::{fd_gradient, fd_hessian_quadform, fd_riemannian_quadform};
use stiefel_newton::stiefel::{StiefelPoint, TangentVector};

fn random_dense(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng))
}

fn random_sym(n: usize, seed: u64) -> DMatrix<f64> {
    let g = random_dense(n, n, seed);
    (&g + g.transpose()) * 0.5
}

fn st42_data() -> BrockettData {
    BrockettData {
        a: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0])),
        weights: vec![1.0, 2.0],
    }
}

fn report(criterion: usize, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => {
            println!("acceptance {criterion} ({name}): PASS {detail}");
        }
        Err(reason) => {
            println!("acceptance {criterion} ({name}): FAIL {reason}");
            panic!("acceptance criterion {criterion} failed: {reason}");
        }
    }
}

#[test]
fn criterion_01_brockett_census() {
    let outcome = (|| {
        let started = Instant::now();
        let census =
            enumerate_brockett_critical_points(&st42_data(), 1e-8).map_err(|e| e.to_string())?;
        let elapsed = started.elapsed();

        if census.len() != 48 {
            return Err(format!(
                "expected 48 critical points, found {}",
                census.len()
            ));
        }

        let mut histogram: BTreeMap<i64, usize> = BTreeMap::new();
        for e in &census {
            let nearest = e.value.round();
            if (e.value - nearest).abs() > 1e-8 {
                return Err(format!("value {} is not integral within 1e-8", e.value));
            }
            *histogram.entry(nearest as i64).or_default() += 1;
        }
        let expected: BTreeMap<i64, usize> = [
            (4, 4),
            (5, 8),
            (6, 4),
            (7, 8),
            (8, 8),
            (9, 4),
            (10, 8),
            (11, 4),
        ]
        .into_iter()
        .collect();
        if histogram != expected {
            return Err(format!("value multiset {histogram:?} != {expected:?}"));
        }

        for e in &census {
            let expected_kind = if (e.value - 4.0).abs() <= 1e-8 {
                CriticalPointKind::LocalMinimum
            } else if (e.value - 11.0).abs() <= 1e-8 {
                CriticalPointKind::LocalMaximum
            } else {
                CriticalPointKind::Saddle
            };
            if e.classification.kind != expected_kind {
                return Err(format!(
                    "value {} classified {:?}, expected {:?}",
                    e.value, e.classification.kind, expected_kind
                ));
            }
        }

        if elapsed.as_secs_f64() >= 1.0 {
            return Err(format!("enumeration took {elapsed:?}, budget is 1 s"));
        }
        Ok(format!(
            "(48 points, multiset and kinds verified, {elapsed:?})"
        ))
    })();
    report(1, "brockett census", outcome);
}

enum AnyModel {
    Procrustes(stiefel_newton::costs::ProcrustesModel),
    Penrose(stiefel_newton::costs::PenroseModel),
    Brockett(stiefel_newton::costs::BrockettModel),
}

impl AnyModel {
    fn as_dyn(&self) -> &dyn CostModel {
        match self {
            AnyModel::Procrustes(m) => m,
            AnyModel::Penrose(m) => m,
            AnyModel::Brockett(m) => m,
        }
    }

    fn seeded(k: u64) -> AnyModel {
        match k % 3 {
            0 => AnyModel::Procrustes(
                procrustes_model(ProcrustesData {
                    a: random_dense(6, 5, 1000 + k),
                    b: random_dense(6, 2, 2000 + k),
                })
                .expect("valid data"),
            ),
            1 => AnyModel::Penrose(
                penrose_model(PenroseData {
                    a: random_dense(6, 5, 1000 + k),
                    b: random_dense(6, 3, 2000 + k),
                    c: random_dense(2, 3, 3000 + k),
                })
                .expect("valid data"),
            ),
            _ => AnyModel::Brockett(
                brockett_model(BrockettData {
                    a: random_sym(5, 1000 + k),
                    weights: vec![0.5, 1.0],
                })
                .expect("valid data"),
            ),
        }
    }
}

#[test]
fn criterion_02_criticality_equivalence() {
    let outcome = (|| {
        let tol = 1e-8;
        let mut disagreements = 0;
        for k in 0..200u64 {
            let model = AnyModel::seeded(k);
            let (n, p) = model.as_dyn().dims();
            let point = StiefelPoint::random(n, p, 5000 + k).map_err(|e| e.to_string())?;
            let report = is_critical(model.as_dyn(), &point, tol);
            let by_norm = report.embedded_grad_norm <= tol;
            if report.is_critical != by_norm {
                disagreements += 1;
            }
        }
        if disagreements != 0 {
            return Err(format!("{disagreements} disagreements out of 200 pairs"));
        }
        Ok("(200 pairs, zero disagreements)".into())
    })();
    report(2, "criticality equivalence", outcome);
}

#[test]
fn criterion_03_gradient_formulas() {
    let outcome = (|| {
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for k in 0..60u64 {
            // 20 probes per model family.
            let model = AnyModel::seeded(k);
            let model = model.as_dyn();
            let (n, p) = model.dims();
            let u = random_dense(n, p, 7000 + k);
            let fd = fd_gradient(model, &u, h);
            let formula = model.gradient(&u);
            let rel = (&formula - &fd).norm() / fd.norm().max(1.0);
            worst = worst.max(rel);
            if rel > 1e-6 {
                return Err(format!(
                    "probe {k} on {}: relative error {rel:.3e} > 1e-6",
                    model.descriptor()
                ));
            }
        }
        Ok(format!(
            "(20 probes per model, worst relative error {worst:.3e})"
        ))
    })();
    report(3, "gradient formulas vs finite differences", outcome);
}

#[test]
fn criterion_04_ambient_hessian() {
    let outcome = (|| {
        // All three model families are quadratic in U, so the second
        // difference has zero truncation error; a larger step only
        // shrinks the floating-point cancellation (~eps |G| / h^2).
        let h = 1e-2;
        let mut worst: f64 = 0.0;
        for k in 0..60u64 {
            let model = AnyModel::seeded(k);
            let model = model.as_dyn();
            let (n, p) = model.dims();
            let u = random_dense(n, p, 8000 + k);
            let v = random_dense(n, p, 9000 + k);
            let fd = fd_hessian_quadform(model, &u, &v, h);
            let formula = model.hess_bilinear(&u, &v, &v);
            let rel = (formula - fd).abs() / fd.abs().max(1.0);
            worst = worst.max(rel);
            if rel > 1e-7 {
                return Err(format!(
                    "probe {k} on {}: relative error {rel:.3e} > 1e-7",
                    model.descriptor()
                ));
            }
        }
        Ok(format!(
            "(20 probes per model, worst relative error {worst:.3e})"
        ))
    })();
    report(4, "ambient hessian vs second differences", outcome);
}

#[test]
fn criterion_05_riemannian_hessian_at_critical_points() {
    let outcome = (|| {
        let data = st42_data();
        let model = brockett_model(data.clone()).map_err(|e| e.to_string())?;
        let census = enumerate_brockett_critical_points(&data, 1e-8).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for entry in census.iter().take(6) {
            let point = &entry.point;
            let frame = build_frame_auto(point).map_err(|e| e.to_string())?;
            let fh = assemble_frame_hessian(&model, point, &frame);
            if frame.dimension() != 5 {
                return Err(format!("frame dimension {} != 5", frame.dimension()));
            }
            for (i, vec) in frame.vectors().iter().enumerate() {
                let v = TangentVector::from_delta(point, vec.clone()).map_err(|e| e.to_string())?;
                let oracle =
                    fd_riemannian_quadform(&model, point, &v, 1e-4).map_err(|e| e.to_string())?;
                let formula = fh.h[(i, i)];
                let rel = (formula - oracle).abs() / oracle.abs().max(1.0);
                worst = worst.max(rel);
                if rel > 1e-4 {
                    return Err(format!(
                        "census value {} direction {i}: formula {formula:.6e} vs \
                         retraction-curve FD {oracle:.6e} (rel {rel:.3e})",
                        entry.value
                    ));
                }
            }
        }
        Ok(format!(
            "(6 census points x 5 directions, worst relative error {worst:.3e})"
        ))
    })();
    report(5, "riemannian hessian vs retraction-curve FD", outcome);
}

#[test]
fn criterion_06_frame_properties() {
    let outcome = (|| {
        let shapes = [(4usize, 2usize), (5, 3), (8, 2)];
        let mut checked = 0;
        for seed in 0..50u64 {
            let (n, p) = shapes[(seed % 3) as usize];
            let point = StiefelPoint::random(n, p, 11000 + seed).map_err(|e| e.to_string())?;
            let frame = build_frame_auto(&point).map_err(|e| e.to_string())?;
            let d = frame_dimension(n, p).map_err(|e| e.to_string())?;
            if frame.dimension() != d {
                return Err(format!(
                    "St({n},{p}): {} frame vectors, dimension formula gives {d}",
                    frame.dimension()
                ));
            }
            let z = point.normal_projector();
            let labels = frame.labels();
            for (i, vi) in frame.vectors().iter().enumerate() {
                for (j, vj) in frame.vectors().iter().enumerate() {
                    let inner = vi.dot(vj);
                    match (labels[i], labels[j]) {
                        (
                            FrameLabel::Prime { a: a1, b: b1 },
                            FrameLabel::Prime { a: a2, b: b2 },
                        ) => {
                            if (a1, b1) != (a2, b2) && inner.abs() > 1e-12 {
                                return Err(format!("prime pair not orthogonal: {inner:.3e}"));
                            }
                        }
                        (FrameLabel::Prime { .. }, FrameLabel::Second { .. })
                        | (FrameLabel::Second { .. }, FrameLabel::Prime { .. }) => {
                            if inner.abs() > 1e-12 {
                                return Err(format!("prime/second not orthogonal: {inner:.3e}"));
                            }
                        }
                        (
                            FrameLabel::Second { row: r1, col: c1 },
                            FrameLabel::Second { row: r2, col: c2 },
                        ) => {
                            let expected = if c1 == c2 { z[(r1, r2)] } else { 0.0 };
                            if (inner - expected).abs() > 1e-12 {
                                return Err(format!(
                                    "second Gram entry {inner:.6e} != Z entry {expected:.6e}"
                                ));
                            }
                        }
                    }
                }
            }
            let min_eig = frame
                .gram()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |acc, e| acc.min(*e));
            if min_eig <= 1e-8 {
                return Err(format!("Gram min eigenvalue {min_eig:.3e} <= 1e-8"));
            }
            checked += 1;
        }
        Ok(format!(
            "({checked} frames across St(4,2), St(5,3), St(8,2))"
        ))
    })();
    report(6, "frame structure", outcome);
}

/// Closed form of (Sigma (x) I_n) on prime/prime frame pairs, written
/// from the published delta/sigma combination (independent of the library
/// implementation).
fn closed_prime_prime(sigma: &SigmaMatrix, a1: usize, b1: usize, a2: usize, b2: usize) -> f64 {
    let sign = if (a1 + b1 + a2 + b2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    sign * (d(a1, a2) * sigma.entry(b1, b2) + d(b1, b2) * sigma.entry(a1, a2)
        - d(a2, b1) * sigma.entry(a1, b2)
        - d(a1, b2) * sigma.entry(a2, b1))
}

#[test]
fn criterion_07_sigma_term_closed_forms() {
    let outcome = (|| {
        let mut worst: f64 = 0.0;
        for k in 0..10u64 {
            let model = brockett_model(BrockettData {
                a: random_sym(5, 12000 + k),
                weights: vec![0.5, 1.0, 2.0],
            })
            .map_err(|e| e.to_string())?;
            let point = StiefelPoint::random(5, 3, 13000 + k).map_err(|e| e.to_string())?;
            let sigma = sigma_matrix(&model, &point);
            let z = point.normal_projector();
            let frame = build_frame_auto(&point).map_err(|e| e.to_string())?;
            for (i, li) in frame.labels().iter().enumerate() {
                for (j, lj) in frame.labels().iter().enumerate() {
                    let v1 = TangentVector::from_delta(&point, frame.vectors()[i].clone())
                        .map_err(|e| e.to_string())?;
                    let v2 = TangentVector::from_delta(&point, frame.vectors()[j].clone())
                        .map_err(|e| e.to_string())?;
                    let general =
                        sigma_kron_bilinear(&sigma, &z, &v1, &v2).map_err(|e| e.to_string())?;
                    let closed = match (*li, *lj) {
                        (
                            FrameLabel::Prime { a: a1, b: b1 },
                            FrameLabel::Prime { a: a2, b: b2 },
                        ) => closed_prime_prime(&sigma, a1, b1, a2, b2),
                        (
                            FrameLabel::Second { row: r1, col: c1 },
                            FrameLabel::Second { row: r2, col: c2 },
                        ) => z[(r1, r2)] * sigma.entry(c1, c2),
                        _ => 0.0,
                    };
                    let err = (general - closed).abs();
                    worst = worst.max(err);
                    if err > 1e-12 {
                        return Err(format!(
                            "instance {k} pair ({i},{j}): general {general:.6e} vs closed \
                             {closed:.6e}"
                        ));
                    }
                }
            }
        }
        Ok(format!(
            "(10 instances, all frame pairs, worst deviation {worst:.3e})"
        ))
    })();
    report(7, "sigma kron closed forms", outcome);
}

/// Expected prime/prime value of the diagonal constraint Hessian from its
/// case table.
fn table_diag(a: usize, (a1, b1): (usize, usize), (a2, b2): (usize, usize)) -> f64 {
    if (a1, b1) == (a2, b2) && (a == a1 || a == b1) {
        1.0
    } else {
        0.0
    }
}

/// Expected prime/prime value of the off-diagonal constraint Hessian from
/// the delta expansion of (V1^T V2)_{bc} + (V1^T V2)_{cb}.
fn table_cross(b: usize, c: usize, (a1, b1): (usize, usize), (a2, b2): (usize, usize)) -> f64 {
    let sign = if (a1 + b1 + a2 + b2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    sign * (d(a1, b) * d(a2, c) * d(b1, b2) - d(a1, b) * d(b2, c) * d(b1, a2)
        + d(a1, c) * d(a2, b) * d(b1, b2)
        + d(b1, b) * d(b2, c) * d(a1, a2)
        - d(b1, c) * d(a2, b) * d(a1, b2)
        + d(b1, c) * d(b2, b) * d(a1, a2)
        - d(a1, b2) * d(b1, b) * d(a2, c)
        - d(b1, a2) * d(a1, c) * d(b2, b))
}

#[test]
fn criterion_08_constraint_hessian_tables() {
    let outcome = (|| {
        for k in 0..10u64 {
            let point = StiefelPoint::random(5, 3, 14000 + k).map_err(|e| e.to_string())?;
            let frame = build_frame_auto(&point).map_err(|e| e.to_string())?;
            let labels = frame.labels();
            for (i, vi) in frame.vectors().iter().enumerate() {
                for (j, vj) in frame.vectors().iter().enumerate() {
                    match (labels[i], labels[j]) {
                        (
                            FrameLabel::Prime { a: a1, b: b1 },
                            FrameLabel::Prime { a: a2, b: b2 },
                        ) => {
                            for a in 0..3 {
                                let numeric = constraint_hess_diag_form(a, vi, vj);
                                let expected = table_diag(a, (a1, b1), (a2, b2));
                                if (numeric - expected).abs() > 1e-12 {
                                    return Err(format!(
                                        "diag table: got {numeric:.6e}, expected {expected}"
                                    ));
                                }
                            }
                            for b in 0..3 {
                                for c in (b + 1)..3 {
                                    let numeric = constraint_hess_cross_form(b, c, vi, vj);
                                    let expected = table_cross(b, c, (a1, b1), (a2, b2));
                                    if ![-1.0, 0.0, 1.0].contains(&expected) {
                                        return Err(format!(
                                            "table value {expected} outside {{0, +-1}}"
                                        ));
                                    }
                                    if (numeric - expected).abs() > 1e-12 {
                                        return Err(format!(
                                            "cross table: got {numeric:.6e}, expected {expected}"
                                        ));
                                    }
                                }
                            }
                        }
                        (FrameLabel::Prime { .. }, FrameLabel::Second { .. })
                        | (FrameLabel::Second { .. }, FrameLabel::Prime { .. }) => {
                            for a in 0..3 {
                                if constraint_hess_diag_form(a, vi, vj).abs() > 1e-12 {
                                    return Err("mixed diag pair not zero".into());
                                }
                            }
                            for b in 0..3 {
                                for c in (b + 1)..3 {
                                    if constraint_hess_cross_form(b, c, vi, vj).abs() > 1e-12 {
                                        return Err("mixed cross pair not zero".into());
                                    }
                                }
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok("(10 instances, prime/prime in {0, +-1}, mixed pairs zero)".into())
    })();
    report(8, "constraint hessian case tables", outcome);
}

#[test]
fn criterion_09_newton_convergence_on_procrustes() {
    let outcome = (|| {
        let (n, p) = (8, 3);
        let u_star = StiefelPoint::random(n, p, 7).map_err(|e| e.to_string())?;
        let a = DMatrix::identity(n, n) + random_dense(n, n, 4242) * 0.1;
        let b = &a * u_star.matrix() + random_dense(n, p, 4243) * 0.01;
        let model = procrustes_model(ProcrustesData {
            a: a.clone(),
            b: b.clone(),
        })
        .map_err(|e| e.to_string())?;

        let mut worst_iters = 0;
        let mut contraction_report = String::new();
        for seed in 0..10u64 {
            let start = StiefelPoint::random(n, p, 100 + seed).map_err(|e| e.to_string())?;
            let t0 = Instant::now();
            let result = newton_solve(&model, &start, &NewtonOptions::default());
            let elapsed = t0.elapsed();
            if elapsed.as_secs_f64() >= 1.0 {
                return Err(format!(
                    "seed {seed}: solve took {elapsed:?}, budget is 1 s"
                ));
            }
            if result.status != SolveStatus::Converged {
                return Err(format!("seed {seed}: status {:?}", result.status));
            }
            if result.trace.len() > 20 {
                return Err(format!(
                    "seed {seed}: {} iterations > 20",
                    result.trace.len()
                ));
            }
            worst_iters = worst_iters.max(result.trace.len());
            if result.criticality.embedded_grad_norm > 1e-10 {
                return Err(format!(
                    "seed {seed}: final gradient norm {:.3e} > 1e-10",
                    result.criticality.embedded_grad_norm
                ));
            }
            let btau = b.tr_mul(&(&a * result.point.matrix()));
            let sym_residual = (&btau - btau.transpose()).amax();
            if sym_residual > 1e-8 {
                return Err(format!(
                    "seed {seed}: B^T A U symmetry residual {sym_residual:.3e} > 1e-8"
                ));
            }

            // Quadratic tail: fit C on the last Newton steps and require
            // C * e_k < 1 at the final accepted step.
            let mut norms: Vec<f64> = result.trace.iter().map(|r| r.grad_norm).collect();
            norms.push(result.criticality.embedded_grad_norm);
            if norms.len() < 3 {
                return Err(format!("seed {seed}: trace too short to fit contraction"));
            }
            let tail = &norms[norms.len() - 3..];
            let c1 = tail[1] / (tail[0] * tail[0]);
            let c2 = tail[2] / (tail[1] * tail[1]);
            let c = c1.max(c2);
            if c * tail[1] >= 1.0 {
                return Err(format!(
                    "seed {seed}: no quadratic contraction, C = {c:.3e}, e = {:.3e}",
                    tail[1]
                ));
            }
            if seed == 0 {
                contraction_report = format!("fitted C = [{c1:.2e}, {c2:.2e}] on tail {tail:?}");
            }
        }
        Ok(format!(
            "(10 starts, <= {worst_iters} iterations, {contraction_report})"
        ))
    })();
    report(9, "newton convergence on procrustes", outcome);
}

#[test]
fn criterion_10_newton_to_census_consistency() {
    let outcome = (|| {
        let data = st42_data();
        let model = brockett_model(data.clone()).map_err(|e| e.to_string())?;
        let census = enumerate_brockett_critical_points(&data, 1e-8).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for seed in 0..100u64 {
            let start = StiefelPoint::random(4, 2, 20000 + seed).map_err(|e| e.to_string())?;
            let result = newton_solve(&model, &start, &NewtonOptions::default());
            if result.status != SolveStatus::Converged {
                return Err(format!("seed {seed}: status {:?}", result.status));
            }
            let nearest = census
                .iter()
                .map(|e| (e.point.matrix() - result.point.matrix()).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
            if nearest > 1e-6 {
                return Err(format!(
                    "seed {seed}: endpoint {nearest:.3e} from the nearest census point"
                ));
            }
        }
        Ok(format!("(100 solves, worst census distance {worst:.3e})"))
    })();
    report(10, "newton endpoints match census", outcome);
}

#[test]
fn criterion_11_sphere_specialization() {
    let outcome = (|| {
        for seed in 0..20u64 {
            let point = StiefelPoint::random(5, 1, 30000 + seed).map_err(|e| e.to_string())?;
            let x = point.matrix().column(0).clone_owned();
            let frame = build_frame_auto(&point).map_err(|e| e.to_string())?;
            if !frame.prime().is_empty() {
                return Err("sphere frame must have no prime vectors".into());
            }
            for (v, label) in frame.vectors().iter().zip(frame.labels()) {
                let FrameLabel::Second { row, col } = *label else {
                    return Err("unexpected label kind".into());
                };
                if col != 0 {
                    return Err("sphere frame labels must have column 0".into());
                }
                let mut expected = &x * -x[row];
                expected[row] += 1.0;
                let dev = (v.column(0) - expected).amax();
                if dev > 1e-15 {
                    return Err(format!(
                        "seed {seed} row {row}: deviation {dev:.3e} > 1e-15"
                    ));
                }
            }
        }
        Ok("(20 points on S^4, frame vectors equal e_i - x_i x)".into())
    })();
    report(11, "sphere frame specialization", outcome);
}

#[test]
fn embedded_gradient_norm_equals_zero_exactly_on_census() {
    // Supporting check used by several criteria: enumerated points are
    // critical to machine precision, not merely within tolerance.
    let data = st42_data();
    let model = brockett_model(data.clone()).unwrap();
    let census = enumerate_brockett_critical_points(&data, 1e-8).unwrap();
    for e in &census {
        assert!(embedded_gradient(&model, &e.point).norm() <= 1e-13);
    }
}
