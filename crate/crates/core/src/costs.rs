//! Cost models: value, ambient gradient, and ambient Hessian bilinear form
//! of a smooth extension G of the cost to the full matrix space.
//!
//! Three built-in families are provided,
//!
//! - Procrustes: G(U) = 1/2 ||A U - B||^2,
//! - Penrose regression: G(U) = 1/2 ||A U C - B||^2,
//! - Brockett: G(U) = tr(U^T A U N) with A symmetric and N diagonal with
//!   nondecreasing nonnegative weights,
//!
//! together with [`custom_model`] for user-supplied callables. The Hessian
//! is exposed as a bilinear form rather than a stored np x np matrix: all
//! three built-in families have Kronecker structure M (x) S whose action
//! on a pair (V1, V2) is tr(V1^T S V2 M), so nothing larger than the
//! problem data is ever materialized.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Default step for the finite-difference checks run at model
/// construction and for the fallback Hessian of [`custom_model`].
pub const FD_STEP: f64 = 1e-5;

/// A smooth extension of a cost on St(n,p) to all n x p matrices.
///
/// `value` and `gradient` must accept arbitrary n x p inputs, not only
/// feasible points; the optimality machinery evaluates them on and the
/// finite-difference oracles around the manifold. `hess_bilinear` is the
/// second derivative of `value` at `u` applied to a pair of directions
/// and must be symmetric in them. Implementations are immutable and
/// evaluation is pure, so models may be shared across threads; custom
/// callables must themselves be reentrant.
pub trait CostModel: Send + Sync {
    /// Expected input shape (n, p).
    fn dims(&self) -> (usize, usize);

    fn value(&self, u: &DMatrix<f64>) -> f64;

    fn gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64>;

    fn hess_bilinear(&self, u: &DMatrix<f64>, v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> f64;

    /// Human-readable name with the model parameters.
    fn descriptor(&self) -> String;
}

/// Data of the Procrustes problem: minimize ||A U - B||^2 over St(n,p).
#[derive(Debug, Clone)]
pub struct ProcrustesData {
    /// m x n.
    pub a: DMatrix<f64>,
    /// m x p.
    pub b: DMatrix<f64>,
}

/// Procrustes cost with cached A^T A and A^T B.
#[derive(Debug, Clone)]
pub struct ProcrustesModel {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    ata: DMatrix<f64>,
    atb: DMatrix<f64>,
}

/// G(U) = 1/2 ||A U - B||^2 with gradient A^T A U - A^T B and Hessian
/// I_p (x) A^T A.
pub fn procrustes_model(data: ProcrustesData) -> Result<ProcrustesModel> {
    if data.a.nrows() != data.b.nrows() {
        return Err(Error::Dimension(format!(
            "procrustes: A has {} rows but B has {}",
            data.a.nrows(),
            data.b.nrows()
        )));
    }
    let ata = data.a.tr_mul(&data.a);
    let atb = data.a.tr_mul(&data.b);
    Ok(ProcrustesModel {
        a: data.a,
        b: data.b,
        ata,
        atb,
    })
}

impl CostModel for ProcrustesModel {
    fn dims(&self) -> (usize, usize) {
        (self.a.ncols(), self.b.ncols())
    }

    fn value(&self, u: &DMatrix<f64>) -> f64 {
        0.5 * (&self.a * u - &self.b).norm_squared()
    }

    fn gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        &self.ata * u - &self.atb
    }

    fn hess_bilinear(&self, _u: &DMatrix<f64>, v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> f64 {
        v1.dot(&(&self.ata * v2))
    }

    fn descriptor(&self) -> String {
        format!(
            "procrustes(m={}, n={}, p={})",
            self.a.nrows(),
            self.a.ncols(),
            self.b.ncols()
        )
    }
}

/// Data of the Penrose regression problem: minimize ||A U C - B||^2.
#[derive(Debug, Clone)]
pub struct PenroseData {
    /// m x n.
    pub a: DMatrix<f64>,
    /// m x q.
    pub b: DMatrix<f64>,
    /// p x q.
    pub c: DMatrix<f64>,
}

/// Penrose regression cost with cached A^T A, C C^T and A^T B C^T.
#[derive(Debug, Clone)]
pub struct PenroseModel {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    ata: DMatrix<f64>,
    cct: DMatrix<f64>,
    atbct: DMatrix<f64>,
}

/// G(U) = 1/2 ||A U C - B||^2 with gradient A^T (A U C - B) C^T and
/// Hessian (C C^T) (x) (A^T A).
pub fn penrose_model(data: PenroseData) -> Result<PenroseModel> {
    if data.a.nrows() != data.b.nrows() {
        return Err(Error::Dimension(format!(
            "penrose: A has {} rows but B has {}",
            data.a.nrows(),
            data.b.nrows()
        )));
    }
    if data.c.ncols() != data.b.ncols() {
        return Err(Error::Dimension(format!(
            "penrose: C has {} columns but B has {}",
            data.c.ncols(),
            data.b.ncols()
        )));
    }
    let ata = data.a.tr_mul(&data.a);
    let cct = &data.c * data.c.transpose();
    let atbct = data.a.tr_mul(&data.b) * data.c.transpose();
    Ok(PenroseModel {
        a: data.a,
        b: data.b,
        c: data.c,
        ata,
        cct,
        atbct,
    })
}

impl CostModel for PenroseModel {
    fn dims(&self) -> (usize, usize) {
        (self.a.ncols(), self.c.nrows())
    }

    fn value(&self, u: &DMatrix<f64>) -> f64 {
        0.5 * (&self.a * u * &self.c - &self.b).norm_squared()
    }

    fn gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        &self.ata * u * &self.cct - &self.atbct
    }

    fn hess_bilinear(&self, _u: &DMatrix<f64>, v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> f64 {
        v1.dot(&(&self.ata * v2 * &self.cct))
    }

    fn descriptor(&self) -> String {
        format!(
            "penrose(m={}, n={}, p={}, q={})",
            self.a.nrows(),
            self.a.ncols(),
            self.c.nrows(),
            self.c.ncols()
        )
    }
}

/// Data of the Brockett problem: minimize tr(U^T A U N) with A symmetric
/// n x n and N = diag(weights), 0 <= mu_1 <= ... <= mu_p.
#[derive(Debug, Clone)]
pub struct BrockettData {
    pub a: DMatrix<f64>,
    pub weights: Vec<f64>,
}

/// Brockett cost tr(U^T A U N).
#[derive(Debug, Clone)]
pub struct BrockettModel {
    a: DMatrix<f64>,
    weights: Vec<f64>,
}

/// Maximum asymmetry tolerated in the Brockett matrix A.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Builds the Brockett model, enforcing symmetry of A and the weight
/// ordering 0 <= mu_1 <= ... <= mu_p.
pub fn brockett_model(data: BrockettData) -> Result<BrockettModel> {
    brockett_model_with(data, false)
}

/// Like [`brockett_model`]; `allow_unordered` bypasses the ordering check
/// (never the nonnegativity check) for experimentation.
pub fn brockett_model_with(data: BrockettData, allow_unordered: bool) -> Result<BrockettModel> {
    if data.a.nrows() != data.a.ncols() {
        return Err(Error::Dimension(format!(
            "brockett: A must be square, got {}x{}",
            data.a.nrows(),
            data.a.ncols()
        )));
    }
    let asym = (&data.a - data.a.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            name: "A".into(),
            deviation: asym,
        });
    }
    if data.weights.is_empty() || data.weights.len() > data.a.nrows() {
        return Err(Error::Dimension(format!(
            "brockett: need 1 <= p <= n weights, got p={}, n={}",
            data.weights.len(),
            data.a.nrows()
        )));
    }
    if let Some(&w) = data.weights.iter().find(|w| **w < 0.0) {
        return Err(Error::BadWeights(format!("negative weight {w}")));
    }
    if !allow_unordered && data.weights.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::BadWeights(format!(
            "weights must be nondecreasing, got {:?}",
            data.weights
        )));
    }
    Ok(BrockettModel {
        a: data.a,
        weights: data.weights,
    })
}

impl BrockettModel {
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl CostModel for BrockettModel {
    fn dims(&self) -> (usize, usize) {
        (self.a.nrows(), self.weights.len())
    }

    fn value(&self, u: &DMatrix<f64>) -> f64 {
        let au = &self.a * u;
        self.weights
            .iter()
            .enumerate()
            .map(|(c, w)| w * u.column(c).dot(&au.column(c)))
            .sum()
    }

    fn gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        let mut g = &self.a * u;
        for (c, w) in self.weights.iter().enumerate() {
            let mut col = g.column_mut(c);
            col *= 2.0 * w;
        }
        g
    }

    fn hess_bilinear(&self, _u: &DMatrix<f64>, v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> f64 {
        let av2 = &self.a * v2;
        2.0 * self
            .weights
            .iter()
            .enumerate()
            .map(|(c, w)| w * v1.column(c).dot(&av2.column(c)))
            .sum::<f64>()
    }

    fn descriptor(&self) -> String {
        format!("brockett(n={}, weights={:?})", self.a.nrows(), self.weights)
    }
}

pub type ValueFn = dyn Fn(&DMatrix<f64>) -> f64 + Send + Sync;
pub type GradientFn = dyn Fn(&DMatrix<f64>) -> DMatrix<f64> + Send + Sync;
pub type HessBilinearFn = dyn Fn(&DMatrix<f64>, &DMatrix<f64>, &DMatrix<f64>) -> f64 + Send + Sync;

/// A user-supplied cost model. See [`custom_model`].
pub struct CustomModel {
    n: usize,
    p: usize,
    name: String,
    value_fn: Box<ValueFn>,
    gradient_fn: Box<GradientFn>,
    hess_fn: Option<Box<HessBilinearFn>>,
}

/// Wraps caller-provided callables into a [`CostModel`].
///
/// When `hess_fn` is absent the Hessian form is computed by central
/// finite differences of `gradient_fn` with step [`FD_STEP`]. At
/// construction the gradient is checked against finite differences of the
/// value on three seeded random probes; disagreement beyond 1e-4 relative
/// is a [`Error::ValidationFailure`]. A supplied Hessian is additionally
/// checked for symmetry and agreement with differenced gradients.
pub fn custom_model(
    n: usize,
    p: usize,
    name: impl Into<String>,
    value_fn: Box<ValueFn>,
    gradient_fn: Box<GradientFn>,
    hess_fn: Option<Box<HessBilinearFn>>,
) -> Result<CustomModel> {
    if p < 1 || p > n {
        return Err(Error::Dimension(format!(
            "custom model requires n >= p >= 1, got n={n}, p={p}"
        )));
    }
    let model = CustomModel {
        n,
        p,
        name: name.into(),
        value_fn,
        gradient_fn,
        hess_fn,
    };
    model.self_validate()?;
    Ok(model)
}

impl CustomModel {
    fn self_validate(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC057_u64);
        for probe in 0..3 {
            let u = DMatrix::from_fn(self.n, self.p, |_, _| StandardNormal.sample(&mut rng));
            let g = (self.gradient_fn)(&u);
            if g.nrows() != self.n || g.ncols() != self.p {
                return Err(Error::ValidationFailure(format!(
                    "gradient returned {}x{}, expected {}x{}",
                    g.nrows(),
                    g.ncols(),
                    self.n,
                    self.p
                )));
            }
            let fd = fd_gradient_of(&*self.value_fn, &u, FD_STEP);
            let rel = (&g - &fd).norm() / fd.norm().max(1.0);
            if rel > 1e-4 {
                return Err(Error::ValidationFailure(format!(
                    "gradient disagrees with finite differences of the value \
                     (relative error {rel:.3e} on probe {probe})"
                )));
            }
            if let Some(hess) = &self.hess_fn {
                let v1 = DMatrix::from_fn(self.n, self.p, |_, _| StandardNormal.sample(&mut rng));
                let v2 = DMatrix::from_fn(self.n, self.p, |_, _| StandardNormal.sample(&mut rng));
                let h12 = hess(&u, &v1, &v2);
                let h21 = hess(&u, &v2, &v1);
                if (h12 - h21).abs() > 1e-8 * h12.abs().max(1.0) {
                    return Err(Error::ValidationFailure(format!(
                        "Hessian form is not symmetric: {h12:.6e} vs {h21:.6e}"
                    )));
                }
                let fd_h = self.fd_hess_bilinear(&u, &v1, &v2);
                if (h12 - fd_h).abs() > 1e-3 * fd_h.abs().max(1.0) {
                    return Err(Error::ValidationFailure(format!(
                        "Hessian form disagrees with differenced gradients: \
                         {h12:.6e} vs {fd_h:.6e}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn fd_hess_bilinear(&self, u: &DMatrix<f64>, v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> f64 {
        let plus = (self.gradient_fn)(&(u + v2 * FD_STEP));
        let minus = (self.gradient_fn)(&(u - v2 * FD_STEP));
        v1.dot(&((plus - minus) / (2.0 * FD_STEP)))
    }
}

impl CostModel for CustomModel {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.p)
    }

    fn value(&self, u: &DMatrix<f64>) -> f64 {
        (self.value_fn)(u)
    }

    fn gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        (self.gradient_fn)(u)
    }

    fn hess_bilinear(&self, u: &DMatrix<f64>, v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> f64 {
        match &self.hess_fn {
            Some(hess) => hess(u, v1, v2),
            None => self.fd_hess_bilinear(u, v1, v2),
        }
    }

    fn descriptor(&self) -> String {
        format!("custom({}, n={}, p={})", self.name, self.n, self.p)
    }
}

fn fd_gradient_of<F>(f: &F, u: &DMatrix<f64>, h: f64) -> DMatrix<f64>
where
    F: Fn(&DMatrix<f64>) -> f64 + ?Sized,
{
    let mut g = DMatrix::zeros(u.nrows(), u.ncols());
    let mut probe = u.clone();
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            probe[(i, j)] = u[(i, j)] + h;
            let plus = f(&probe);
            probe[(i, j)] = u[(i, j)] - h;
            let minus = f(&probe);
            probe[(i, j)] = u[(i, j)];
            g[(i, j)] = (plus - minus) / (2.0 * h);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stiefel::StiefelPoint;
    use approx::assert_relative_eq;

    fn random_dense(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng))
    }

    fn st42_brockett() -> BrockettModel {
        brockett_model(BrockettData {
            a: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0])),
            weights: vec![1.0, 2.0],
        })
        .unwrap()
    }

    fn axis_point(n: usize, cols: &[usize]) -> StiefelPoint {
        let m = DMatrix::from_fn(n, cols.len(), |i, j| if i == cols[j] { 1.0 } else { 0.0 });
        StiefelPoint::from_matrix(m).unwrap()
    }

    #[test]
    fn procrustes_exact_fit_has_zero_value_and_gradient() {
        let u0 = StiefelPoint::random(4, 2, 0).unwrap();
        let m = procrustes_model(ProcrustesData {
            a: DMatrix::identity(4, 4),
            b: u0.matrix().clone(),
        })
        .unwrap();
        assert_relative_eq!(m.value(u0.matrix()), 0.0, epsilon = 1e-15);
        assert!(m.gradient(u0.matrix()).amax() <= 1e-15);
    }

    #[test]
    fn procrustes_direct_arithmetic_example() {
        // A = diag(1,2), B = (1,0)^T, U = (0,1)^T: residual (0,2)-(1,0).
        let m = procrustes_model(ProcrustesData {
            a: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0])),
            b: DMatrix::from_column_slice(2, 1, &[1.0, 0.0]),
        })
        .unwrap();
        let u = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        assert_relative_eq!(m.value(&u), 2.5, epsilon = 1e-15);
    }

    #[test]
    fn procrustes_rejects_row_mismatch() {
        let r = procrustes_model(ProcrustesData {
            a: DMatrix::zeros(3, 4),
            b: DMatrix::zeros(2, 2),
        });
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn penrose_with_identity_c_matches_procrustes() {
        let a = random_dense(5, 4, 1);
        let b = random_dense(5, 2, 2);
        let pro = procrustes_model(ProcrustesData {
            a: a.clone(),
            b: b.clone(),
        })
        .unwrap();
        let pen = penrose_model(PenroseData {
            a,
            b,
            c: DMatrix::identity(2, 2),
        })
        .unwrap();
        for k in 0..10 {
            let u = random_dense(4, 2, 100 + k);
            let v1 = random_dense(4, 2, 200 + k);
            let v2 = random_dense(4, 2, 300 + k);
            assert_relative_eq!(pro.value(&u), pen.value(&u), epsilon = 1e-12);
            assert!((pro.gradient(&u) - pen.gradient(&u)).amax() <= 1e-12);
            assert_relative_eq!(
                pro.hess_bilinear(&u, &v1, &v2),
                pen.hess_bilinear(&u, &v1, &v2),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn penrose_exact_fit_is_critical() {
        let a = random_dense(5, 4, 3);
        let c = random_dense(2, 3, 4);
        let u0 = StiefelPoint::random(4, 2, 5).unwrap();
        let b = &a * u0.matrix() * &c;
        let m = penrose_model(PenroseData { a, b, c }).unwrap();
        assert_relative_eq!(m.value(u0.matrix()), 0.0, epsilon = 1e-20);
        assert!(m.gradient(u0.matrix()).amax() <= 1e-13);
    }

    #[test]
    fn penrose_rejects_shape_mismatches() {
        assert!(penrose_model(PenroseData {
            a: DMatrix::zeros(5, 4),
            b: DMatrix::zeros(4, 3),
            c: DMatrix::zeros(2, 3),
        })
        .is_err());
        assert!(penrose_model(PenroseData {
            a: DMatrix::zeros(5, 4),
            b: DMatrix::zeros(5, 3),
            c: DMatrix::zeros(2, 2),
        })
        .is_err());
    }

    #[test]
    fn brockett_census_values() {
        let m = st42_brockett();
        assert_relative_eq!(
            m.value(axis_point(4, &[2, 3]).matrix()),
            11.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            m.value(axis_point(4, &[1, 0]).matrix()),
            4.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn brockett_zero_weights_zero_cost() {
        let m = brockett_model(BrockettData {
            a: random_sym(4, 6),
            weights: vec![0.0, 0.0],
        })
        .unwrap();
        let u = StiefelPoint::random(4, 2, 7).unwrap();
        assert_eq!(m.value(u.matrix()), 0.0);
        assert_eq!(m.gradient(u.matrix()).amax(), 0.0);
    }

    fn random_sym(n: usize, seed: u64) -> DMatrix<f64> {
        let g = random_dense(n, n, seed);
        (&g + g.transpose()) * 0.5
    }

    #[test]
    fn brockett_rejects_asymmetric_a() {
        let mut a = random_sym(3, 8);
        a[(0, 1)] += 1e-6;
        let r = brockett_model(BrockettData {
            a,
            weights: vec![1.0],
        });
        assert!(matches!(r, Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn brockett_rejects_bad_weights() {
        let a = random_sym(3, 9);
        assert!(matches!(
            brockett_model(BrockettData {
                a: a.clone(),
                weights: vec![2.0, 1.0],
            }),
            Err(Error::BadWeights(_))
        ));
        assert!(matches!(
            brockett_model(BrockettData {
                a: a.clone(),
                weights: vec![-1.0, 1.0],
            }),
            Err(Error::BadWeights(_))
        ));
        // The experimentation flag bypasses ordering but not positivity.
        assert!(brockett_model_with(
            BrockettData {
                a: a.clone(),
                weights: vec![2.0, 1.0],
            },
            true
        )
        .is_ok());
        assert!(brockett_model_with(
            BrockettData {
                a,
                weights: vec![-1.0, 1.0],
            },
            true
        )
        .is_err());
    }

    #[test]
    fn brockett_value_invariant_under_column_sign_flips() {
        let m = brockett_model(BrockettData {
            a: random_sym(5, 10),
            weights: vec![0.5, 1.0, 3.0],
        })
        .unwrap();
        let u = StiefelPoint::random(5, 3, 11).unwrap();
        let base = m.value(u.matrix());
        for mask in 1..8u32 {
            let mut flipped = u.matrix().clone();
            for c in 0..3 {
                if mask & (1 << c) != 0 {
                    let mut col = flipped.column_mut(c);
                    col *= -1.0;
                }
            }
            assert!((m.value(&flipped) - base).abs() <= 1e-12 * base.abs().max(1.0));
        }
    }

    #[test]
    fn brockett_value_changes_under_column_permutation() {
        let m = st42_brockett();
        let v1 = m.value(axis_point(4, &[0, 1]).matrix());
        let v2 = m.value(axis_point(4, &[1, 0]).matrix());
        assert_relative_eq!(v1, 5.0, epsilon = 1e-14);
        assert_relative_eq!(v2, 4.0, epsilon = 1e-14);
    }

    fn fd_check(model: &dyn CostModel, probes: u64) {
        let (n, p) = model.dims();
        for k in 0..probes {
            let u = random_dense(n, p, 1000 + k);
            let v1 = random_dense(n, p, 2000 + k);
            let v2 = random_dense(n, p, 3000 + k);

            // Hessian form is symmetric.
            let h12 = model.hess_bilinear(&u, &v1, &v2);
            let h21 = model.hess_bilinear(&u, &v2, &v1);
            assert!((h12 - h21).abs() <= 1e-12 * h12.abs().max(1.0));

            // Gradient against central differences of the value.
            let fd = fd_gradient_of(&|m: &DMatrix<f64>| model.value(m), &u, FD_STEP);
            let g = model.gradient(&u);
            let rel = (&g - &fd).norm() / fd.norm().max(1.0);
            assert!(
                rel <= 1e-6,
                "gradient FD error {rel} for {}",
                model.descriptor()
            );

            // Hessian against central differences of the gradient.
            let gp = model.gradient(&(&u + &v2 * FD_STEP));
            let gm = model.gradient(&(&u - &v2 * FD_STEP));
            let fd_h = v1.dot(&((gp - gm) / (2.0 * FD_STEP)));
            let rel = (h12 - fd_h).abs() / fd_h.abs().max(1.0);
            assert!(
                rel <= 1e-5,
                "hessian FD error {rel} for {}",
                model.descriptor()
            );
        }
    }

    #[test]
    fn builtin_models_pass_fd_invariants() {
        let pro = procrustes_model(ProcrustesData {
            a: random_dense(6, 5, 20),
            b: random_dense(6, 2, 21),
        })
        .unwrap();
        fd_check(&pro, 10);

        let pen = penrose_model(PenroseData {
            a: random_dense(6, 5, 22),
            b: random_dense(6, 3, 23),
            c: random_dense(2, 3, 24),
        })
        .unwrap();
        fd_check(&pen, 10);

        let bro = brockett_model(BrockettData {
            a: random_sym(5, 25),
            weights: vec![1.0, 1.5],
        })
        .unwrap();
        fd_check(&bro, 10);
    }

    #[test]
    fn custom_model_reproduces_brockett() {
        let reference = st42_brockett();
        let a = reference.a().clone();
        let weights = reference.weights().to_vec();
        let a2 = a.clone();
        let weights2 = weights.clone();
        let wrapped = custom_model(
            4,
            2,
            "brockett-by-hand",
            Box::new(move |u| {
                let au = &a * u;
                weights
                    .iter()
                    .enumerate()
                    .map(|(c, w)| w * u.column(c).dot(&au.column(c)))
                    .sum()
            }),
            Box::new(move |u| {
                let mut g = &a2 * u;
                for (c, w) in weights2.iter().enumerate() {
                    let mut col = g.column_mut(c);
                    col *= 2.0 * w;
                }
                g
            }),
            None,
        )
        .unwrap();
        for k in 0..5 {
            let u = random_dense(4, 2, 400 + k);
            let v1 = random_dense(4, 2, 500 + k);
            let v2 = random_dense(4, 2, 600 + k);
            assert_relative_eq!(wrapped.value(&u), reference.value(&u), epsilon = 1e-12);
            assert!((wrapped.gradient(&u) - reference.gradient(&u)).amax() <= 1e-12);
            // FD-backed Hessian of the wrapper against the exact form.
            let exact = reference.hess_bilinear(&u, &v1, &v2);
            let rel = (wrapped.hess_bilinear(&u, &v1, &v2) - exact).abs() / exact.abs().max(1.0);
            assert!(rel <= 1e-7);
        }
    }

    #[test]
    fn custom_model_accepts_quadratic_trace_cost() {
        // G(U) = tr(U^T C2 U C1^T), gradient C2 U C1^T + C2^T U C1.
        let c1 = random_dense(2, 2, 30);
        let c2 = random_dense(3, 3, 31);
        let (c1g, c2g) = (c1.clone(), c2.clone());
        let model = custom_model(
            3,
            2,
            "quadratic-trace",
            Box::new(move |u| (u.tr_mul(&(&c2 * u * c1.transpose()))).trace()),
            Box::new(move |u| &c2g * u * c1g.transpose() + c2g.transpose() * u * &c1g),
            None,
        );
        assert!(model.is_ok());
    }

    #[test]
    fn custom_model_rejects_wrong_gradient() {
        let r = custom_model(
            3,
            2,
            "broken",
            Box::new(|u| 0.5 * u.norm_squared()),
            Box::new(|u| u * 1.1),
            None,
        );
        assert!(matches!(r, Err(Error::ValidationFailure(_))));
    }

    #[test]
    fn custom_model_rejects_asymmetric_hessian() {
        let r = custom_model(
            3,
            2,
            "asym-hess",
            Box::new(|u| 0.5 * u.norm_squared()),
            Box::new(|u| u.clone()),
            Some(Box::new(|_, v1, v2| v1.dot(v2) + v1[(0, 0)] * v2[(1, 0)])),
        );
        assert!(matches!(r, Err(Error::ValidationFailure(_))));
    }
}
