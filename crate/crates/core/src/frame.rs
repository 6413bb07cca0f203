//! Explicit local basis of the tangent space T_U St(n,p).
//!
//! The basis splits into two families. The prime family applies the
//! standard skew-symmetric generators to U:
//!
//! ```text
//! D'_ab = U A_ab,   A_ab = (-1)^(a+b) (f_a f_b^T - f_b f_a^T),   a < b,
//! ```
//!
//! and the second family projects coordinate matrices supported on
//! non-pivot rows through Z = I - U U^T:
//!
//! ```text
//! D''_ic = Z (e_i f_c^T) = z_i f_c^T,   i outside the pivot set.
//! ```
//!
//! The construction depends on a choice of p rows of U forming an
//! invertible submatrix (the pivot set). Prime vectors are pairwise
//! orthogonal with squared norm 2, prime is orthogonal to second, and
//! second vectors with distinct column labels are orthogonal; within one
//! column group the Gram matrix reproduces the entries of Z.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::stiefel::StiefelPoint;

/// Smallest pivot magnitude accepted during pivot-row selection.
pub const PIVOT_TOL: f64 = 1e-10;

/// Smallest Gram-Schmidt residual norm accepted during orthonormalization.
pub const GRAM_SCHMIDT_TOL: f64 = 1e-12;

/// Dimension of St(n,p): np - p(p+1)/2, split as p(p-1)/2 prime vectors
/// plus (n-p)p second vectors.
pub fn frame_dimension(n: usize, p: usize) -> Result<usize> {
    if p < 1 || p > n {
        return Err(Error::Dimension(format!(
            "frame dimension requires n >= p >= 1, got n={n}, p={p}"
        )));
    }
    Ok(n * p - p * (p + 1) / 2)
}

/// Row indices (0-based, strictly increasing) of an invertible p x p
/// submatrix of U.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotSet {
    indices: Vec<usize>,
}

impl PivotSet {
    /// Validates an explicit pivot choice: strictly increasing row indices
    /// whose submatrix of U has |det| above [`PIVOT_TOL`].
    pub fn new(indices: Vec<usize>, point: &StiefelPoint) -> Result<Self> {
        let p = point.p();
        if indices.len() != p {
            return Err(Error::Dimension(format!(
                "pivot set must have {p} rows, got {}",
                indices.len()
            )));
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Dimension(
                "pivot rows must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = indices.last() {
            if last >= point.n() {
                return Err(Error::Dimension(format!(
                    "pivot row {last} out of range for n={}",
                    point.n()
                )));
            }
        }
        let set = Self { indices };
        let det = set.submatrix(point).determinant().abs();
        if det < PIVOT_TOL {
            return Err(Error::PivotFailure {
                col: 0,
                best: det,
                tol: PIVOT_TOL,
            });
        }
        Ok(set)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, row: usize) -> bool {
        self.indices.binary_search(&row).is_ok()
    }

    /// Rows of U outside the pivot set, ascending.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|i| !self.contains(*i)).collect()
    }

    /// The p x p submatrix of U on the pivot rows.
    pub fn submatrix(&self, point: &StiefelPoint) -> DMatrix<f64> {
        let p = point.p();
        DMatrix::from_fn(p, p, |r, c| point.matrix()[(self.indices[r], c)])
    }
}

/// Chooses pivot rows by greedy row-pivoted elimination applied to U:
/// column by column, the remaining row with the largest eliminated entry
/// becomes a pivot (ties break to the smallest row index). Returned
/// indices are sorted ascending.
pub fn select_pivot_rows(point: &StiefelPoint) -> Result<PivotSet> {
    let (n, p) = (point.n(), point.p());
    let mut work = point.matrix().clone();
    let mut used = vec![false; n];
    let mut pivots = Vec::with_capacity(p);
    for col in 0..p {
        let mut best_row = None;
        let mut best_val = 0.0;
        for row in 0..n {
            if used[row] {
                continue;
            }
            let v = work[(row, col)].abs();
            if v > best_val {
                best_val = v;
                best_row = Some(row);
            }
        }
        let row = match best_row {
            Some(r) if best_val >= PIVOT_TOL => r,
            _ => {
                return Err(Error::PivotFailure {
                    col,
                    best: best_val,
                    tol: PIVOT_TOL,
                })
            }
        };
        used[row] = true;
        pivots.push(row);
        let pivot = work[(row, col)];
        for other in 0..n {
            if used[other] || work[(other, col)] == 0.0 {
                continue;
            }
            let factor = work[(other, col)] / pivot;
            for c in col..p {
                work[(other, c)] -= factor * work[(row, c)];
            }
        }
    }
    pivots.sort_unstable();
    PivotSet::new(pivots, point)
}

/// Index of a basis vector: either a prime generator (a, b) with a < b, or
/// a second-family vector (row, col) with `row` outside the pivot set.
/// All indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameLabel {
    Prime { a: usize, b: usize },
    Second { row: usize, col: usize },
}

/// An ordered basis of T_U St(n,p): all prime vectors in lexicographic
/// (a, b) order, then the second family grouped by column label and
/// ascending row within each group.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    base: StiefelPoint,
    pivots: PivotSet,
    vectors: Vec<DMatrix<f64>>,
    labels: Vec<FrameLabel>,
    prime_len: usize,
    orthonormalized: bool,
}

impl LocalFrame {
    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    pub fn pivots(&self) -> &PivotSet {
        &self.pivots
    }

    /// Number of basis vectors, equal to dim St(n,p).
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[DMatrix<f64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[FrameLabel] {
        &self.labels
    }

    pub fn prime(&self) -> &[DMatrix<f64>] {
        &self.vectors[..self.prime_len]
    }

    pub fn second(&self) -> &[DMatrix<f64>] {
        &self.vectors[self.prime_len..]
    }

    pub fn prime_len(&self) -> usize {
        self.prime_len
    }

    /// Whether the raw basis was replaced by its orthonormalization.
    pub fn is_orthonormalized(&self) -> bool {
        self.orthonormalized
    }

    /// Pairwise Frobenius inner products of the basis vectors.
    pub fn gram(&self) -> DMatrix<f64> {
        let d = self.dimension();
        let mut g = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = self.vectors[i].dot(&self.vectors[j]);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    /// Coefficients of a tangent matrix in this basis, via the Gram system.
    pub fn coordinates_of(&self, tangent: &DMatrix<f64>) -> Result<Vec<f64>> {
        let d = self.dimension();
        let rhs = nalgebra::DVector::from_fn(d, |i, _| self.vectors[i].dot(tangent));
        let chol = self.gram().cholesky().ok_or_else(|| {
            Error::SolveFailure("frame Gram matrix is not positive definite".into())
        })?;
        Ok(chol.solve(&rhs).iter().copied().collect())
    }

    #[cfg(test)]
    pub(crate) fn replace_vector_for_test(&mut self, index: usize, v: DMatrix<f64>) {
        self.vectors[index] = v;
    }
}

/// Builds the raw frame at `point` for the given pivot set.
pub fn build_frame(point: &StiefelPoint, pivots: &PivotSet) -> Result<LocalFrame> {
    let (n, p) = (point.n(), point.p());
    let u = point.matrix();
    let z = point.normal_projector();
    let d = frame_dimension(n, p)?;
    let mut vectors = Vec::with_capacity(d);
    let mut labels = Vec::with_capacity(d);

    for a in 0..p {
        for b in (a + 1)..p {
            // Sign depends only on the parity of a+b, so 0-based indices
            // give the same generator as 1-based ones.
            let sign = if (a + b).is_multiple_of(2) { 1.0 } else { -1.0 };
            let mut delta = DMatrix::zeros(n, p);
            delta.set_column(b, &(u.column(a) * sign));
            delta.set_column(a, &(u.column(b) * -sign));
            vectors.push(delta);
            labels.push(FrameLabel::Prime { a, b });
        }
    }
    let prime_len = vectors.len();

    let free_rows = pivots.complement(n);
    for col in 0..p {
        for &row in &free_rows {
            // D''_ic has the i-th column of Z in column c and zeros
            // elsewhere; copying the column keeps the entries bit-exact.
            let mut delta = DMatrix::zeros(n, p);
            delta.set_column(col, &z.column(row));
            vectors.push(delta);
            labels.push(FrameLabel::Second { row, col });
        }
    }

    Ok(LocalFrame {
        base: point.clone(),
        pivots: pivots.clone(),
        vectors,
        labels,
        prime_len,
        orthonormalized: false,
    })
}

/// Convenience: greedy pivot selection followed by [`build_frame`].
pub fn build_frame_auto(point: &StiefelPoint) -> Result<LocalFrame> {
    let pivots = select_pivot_rows(point)?;
    build_frame(point, &pivots)
}

/// Returns an orthonormal basis spanning the same tangent space: prime
/// vectors are rescaled to unit norm, and modified Gram-Schmidt runs
/// within each second-family column group. Cross-group orthogonality is
/// already exact and is preserved.
pub fn orthonormalize_frame(frame: &LocalFrame) -> Result<LocalFrame> {
    let mut vectors = frame.vectors.to_vec();
    for v in vectors.iter_mut().take(frame.prime_len) {
        let norm = v.norm();
        if norm < GRAM_SCHMIDT_TOL {
            return Err(Error::DegenerateFrame {
                norm,
                tol: GRAM_SCHMIDT_TOL,
            });
        }
        *v /= norm;
    }

    let p = frame.base.p();
    let group_len = frame.base.n() - p;
    for group in 0..p {
        let start = frame.prime_len + group * group_len;
        for k in 0..group_len {
            for j in 0..k {
                let coeff = vectors[start + j].dot(&vectors[start + k]);
                let prev = vectors[start + j].clone();
                vectors[start + k] -= prev * coeff;
            }
            let norm = vectors[start + k].norm();
            if norm < GRAM_SCHMIDT_TOL {
                return Err(Error::DegenerateFrame {
                    norm,
                    tol: GRAM_SCHMIDT_TOL,
                });
            }
            vectors[start + k] /= norm;
        }
    }

    Ok(LocalFrame {
        base: frame.base.clone(),
        pivots: frame.pivots.clone(),
        vectors,
        labels: frame.labels.clone(),
        prime_len: frame.prime_len,
        orthonormalized: true,
    })
}
