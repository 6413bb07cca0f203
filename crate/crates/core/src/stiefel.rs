//! Core manifold representation for the orthogonal Stiefel manifold
//! St(n,p) = {U in R^{n x p} | U^T U = I_p}.
//!
//! Points, constraint values, tangent vectors, the tangent decomposition
//! Delta = U A + (I - U U^T) C, orthogonal projection onto the tangent
//! space, and the qf (thin-QR) retraction.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Default tolerance for validating the orthonormality constraint on
/// construction. Accumulated drift during Newton iterations stays well
/// below this for double precision at desk scale.
pub const DEFAULT_POINT_TOL: f64 = 1e-10;

/// Default tolerance for validating tangency (skew-symmetry of U^T Delta).
pub const DEFAULT_TANGENT_TOL: f64 = 1e-10;

/// Smallest admissible diagonal entry of R in the qf retraction; below
/// this the sign convention is undefined.
pub const QR_DIAG_TOL: f64 = 1e-14;

/// A point on St(n,p): an n x p matrix with orthonormal columns.
///
/// Construction validates the constraint and never re-orthonormalizes the
/// input; silent repair would mask caller bugs. Feasible points come from
/// [`StiefelPoint::random`] or a retraction.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint {
    u: DMatrix<f64>,
}

impl StiefelPoint {
    /// Validates and wraps an n x p matrix with `||M^T M - I_p||_max <= tol`.
    pub fn new(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        let (n, p) = (m.nrows(), m.ncols());
        if p < 1 || p > n {
            return Err(Error::Dimension(format!(
                "Stiefel point requires n >= p >= 1, got n={n}, p={p}"
            )));
        }
        let deviation = orthonormality_deviation(&m);
        if deviation > tol {
            return Err(Error::ConstraintViolation { deviation, tol });
        }
        Ok(Self { u: m })
    }

    /// Same as [`StiefelPoint::new`] with the default tolerance.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m, DEFAULT_POINT_TOL)
    }

    /// Deterministic random point: the positive-diagonal Q factor of an
    /// n x p matrix with seeded standard Gaussian entries.
    pub fn random(n: usize, p: usize, seed: u64) -> Result<Self> {
        if p < 1 || p > n {
            return Err(Error::Dimension(format!(
                "Stiefel point requires n >= p >= 1, got n={n}, p={p}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng));
        let q = qf(&g)?;
        // Gaussian matrices are full rank almost surely and the Q factor is
        // orthonormal to machine precision.
        Self::new(q, 1e-12)
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn p(&self) -> usize {
        self.u.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.u
    }

    /// The normal projector Z = I_n - U U^T.
    pub fn normal_projector(&self) -> DMatrix<f64> {
        DMatrix::identity(self.n(), self.n()) - &self.u * self.u.transpose()
    }

    /// Constraint values of this point; on the manifold these are
    /// (1/2, ..., 1/2 | 0, ..., 0) up to the construction tolerance.
    pub fn constraint_values(&self) -> ConstraintVector {
        constraint_values(&self.u)
    }
}

fn orthonormality_deviation(m: &DMatrix<f64>) -> f64 {
    let p = m.ncols();
    (m.tr_mul(m) - DMatrix::identity(p, p)).amax()
}

/// Values of the constraint functions that carve St(n,p) out of the matrix
/// space: the diagonal family (half squared column norms) and the
/// off-diagonal family (pairwise column inner products).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintVector {
    /// `diag[a]` = 1/2 ||u_a||^2.
    pub diag: DVector<f64>,
    /// `offdiag[(b,c)]` = <u_b, u_c> for b < c, ordered lexicographically.
    pub offdiag: DVector<f64>,
}

/// Evaluates the constraint functions on an arbitrary n x p matrix.
pub fn constraint_values(m: &DMatrix<f64>) -> ConstraintVector {
    let p = m.ncols();
    let gram = m.tr_mul(m);
    let diag = DVector::from_fn(p, |a, _| 0.5 * gram[(a, a)]);
    let mut offdiag = Vec::with_capacity(p * (p - 1) / 2);
    for b in 0..p {
        for c in (b + 1)..p {
            offdiag.push(gram[(b, c)]);
        }
    }
    ConstraintVector {
        diag,
        offdiag: DVector::from_vec(offdiag),
    }
}

/// A tangent vector at a base point: an n x p matrix Delta with U^T Delta
/// skew-symmetric. Ambient representation; the (A, C) decomposition is
/// recovered by [`TangentVector::components`].
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: StiefelPoint,
    delta: DMatrix<f64>,
}

impl TangentVector {
    /// Validates tangency: `||U^T D + D^T U||_max <= tol`.
    pub fn new(base: &StiefelPoint, delta: DMatrix<f64>, tol: f64) -> Result<Self> {
        if delta.nrows() != base.n() || delta.ncols() != base.p() {
            return Err(Error::Dimension(format!(
                "tangent vector must be {}x{}, got {}x{}",
                base.n(),
                base.p(),
                delta.nrows(),
                delta.ncols()
            )));
        }
        let utd = base.matrix().tr_mul(&delta);
        let deviation = (&utd + utd.transpose()).amax();
        if deviation > tol {
            return Err(Error::TangencyViolation { deviation, tol });
        }
        Ok(Self {
            base: base.clone(),
            delta,
        })
    }

    /// Same as [`TangentVector::new`] with the default tolerance.
    pub fn from_delta(base: &StiefelPoint, delta: DMatrix<f64>) -> Result<Self> {
        Self::new(base, delta, DEFAULT_TANGENT_TOL)
    }

    /// Assembles U A + (I - U U^T) C from a skew-symmetric A and an
    /// arbitrary C.
    pub fn from_components(
        base: &StiefelPoint,
        a: &DMatrix<f64>,
        c: &DMatrix<f64>,
    ) -> Result<Self> {
        let p = base.p();
        if a.nrows() != p || a.ncols() != p {
            return Err(Error::Dimension(format!(
                "skew factor must be {p}x{p}, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let skewness = (a + a.transpose()).amax();
        if skewness > DEFAULT_TANGENT_TOL {
            return Err(Error::TangencyViolation {
                deviation: skewness,
                tol: DEFAULT_TANGENT_TOL,
            });
        }
        let u = base.matrix();
        let delta = u * a + base.normal_projector() * c;
        Self::from_delta(base, delta)
    }

    pub fn zero(base: &StiefelPoint) -> Self {
        Self {
            base: base.clone(),
            delta: DMatrix::zeros(base.n(), base.p()),
        }
    }

    /// Skips the tangency check; the caller guarantees tangency
    /// analytically. Validation would scale poorly here: the roundoff of
    /// U^T Delta grows with the magnitude of Delta, while the absolute
    /// tolerance does not.
    pub(crate) fn new_unchecked(base: &StiefelPoint, delta: DMatrix<f64>) -> Self {
        debug_assert_eq!((delta.nrows(), delta.ncols()), (base.n(), base.p()));
        Self {
            base: base.clone(),
            delta,
        }
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.delta
    }

    pub fn norm(&self) -> f64 {
        self.delta.norm()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            base: self.base.clone(),
            delta: &self.delta * t,
        }
    }

    /// Splits Delta into (A, C_perp) with A = U^T Delta skew and
    /// C_perp = (I - U U^T) Delta, so that Delta = U A + C_perp and
    /// U^T C_perp = 0.
    pub fn components(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let u = self.base.matrix();
        let a = u.tr_mul(&self.delta);
        let c_perp = &self.delta - u * &a;
        (a, c_perp)
    }

    /// True when both vectors live at the same base point (bitwise-equal
    /// base matrices).
    pub fn same_base(&self, other: &TangentVector) -> bool {
        self.base.matrix() == other.base.matrix()
    }
}

/// Orthogonal projection of an arbitrary n x p matrix onto T_U St(n,p):
/// U skew(U^T W) + (I - U U^T) W with skew(M) = (M - M^T)/2. Idempotent,
/// and the result is the closest tangent vector to W in Frobenius norm.
pub fn project_tangent(point: &StiefelPoint, w: &DMatrix<f64>) -> TangentVector {
    let u = point.matrix();
    let utw = u.tr_mul(w);
    let skew = (&utw - utw.transpose()) * 0.5;
    let delta = w - u * (&utw - &skew);
    TangentVector {
        base: point.clone(),
        delta,
    }
}

/// The qf retraction: the Q factor of the thin QR factorization of
/// U + Delta, with the sign convention that R has strictly positive
/// diagonal entries (which makes the factorization unique).
pub fn retract_qf(point: &StiefelPoint, v: &TangentVector) -> Result<StiefelPoint> {
    let q = qf(&(point.matrix() + v.matrix()))?;
    StiefelPoint::new(q, DEFAULT_POINT_TOL)
}

/// Positive-diagonal thin-QR Q factor of an n x p matrix with full column
/// rank. Fails with [`Error::RankDeficient`] when a diagonal entry of R is
/// too small to fix the sign.
pub fn qf(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = m.ncols();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..p {
        let d = r[(j, j)];
        if d.abs() < QR_DIAG_TOL {
            return Err(Error::RankDeficient {
                index: j,
                value: d.abs(),
                tol: QR_DIAG_TOL,
            });
        }
        if d < 0.0 {
            for i in 0..q.nrows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}
