//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Relative pivot threshold below which a Gram matrix is treated as singular.
const PIVOT_RTOL: f64 = 1e-12;

/// Cholesky factor of an active-set Gram matrix that grows one column at a time.
#[derive(Debug, Clone)]
pub(crate) struct GrowingCholesky {
    l: DMatrix<f64>,
}

impl GrowingCholesky {
    pub fn empty() -> Self {
        GrowingCholesky { l: DMatrix::zeros(0, 0) }
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Appends a column with cross products `cross` against the current
    /// columns and squared norm `diag`. Returns false, leaving the factor
    /// unchanged, when the new column is numerically dependent.
    pub fn push(&mut self, cross: &[f64], diag: f64) -> bool {
        let k = self.dim();
        debug_assert_eq!(cross.len(), k);
        let mut row = DVector::from_column_slice(cross);
        if k > 0 && !self.l.solve_lower_triangular_mut(&mut row) {
            return false;
        }
        // squared distance of the new column from the span of the others,
        // relative to its own squared norm
        let pivot_sq = diag - row.norm_squared();
        if !(diag > 0.0 && pivot_sq > PIVOT_RTOL * diag) {
            return false;
        }
        let mut l = DMatrix::zeros(k + 1, k + 1);
        l.view_mut((0, 0), (k, k)).copy_from(&self.l);
        for c in 0..k {
            l[(k, c)] = row[c];
        }
        l[(k, k)] = pivot_sq.sqrt();
        self.l = l;
        true
    }

    /// Solves `(L Lᵀ) x = b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = b.clone();
        self.l.solve_lower_triangular_mut(&mut x);
        self.l.tr_solve_lower_triangular_mut(&mut x);
        x
    }

    /// Factorizes a full symmetric matrix column by column.
    pub fn factor(a: &DMatrix<f64>) -> Option<Self> {
        let mut chol = GrowingCholesky::empty();
        for j in 0..a.nrows() {
            let cross: Vec<f64> = (0..j).map(|i| a[(i, j)]).collect();
            if !chol.push(&cross, a[(j, j)]) {
                return None;
            }
        }
        Some(chol)
    }
}

/// Solves a symmetric positive definite system, or `None` when singular.
pub(crate) fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    if a.nrows() == 0 {
        return Some(DVector::zeros(0));
    }
    GrowingCholesky::factor(a).map(|c| c.solve(b))
}

/// Least squares `argmin ‖y − Xb‖` via Householder QR.
///
/// On rank deficiency returns the positions (columns of `x`) whose diagonal
/// entry of `R` collapses, i.e. columns dependent on earlier ones.
pub(crate) fn qr_least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>, Vec<usize>> {
    let q_cols = x.ncols();
    if q_cols == 0 {
        return Ok(DVector::zeros(0));
    }
    let col_norms: Vec<f64> = (0..q_cols).map(|j| x.column(j).norm()).collect();
    let qr = x.clone().qr();
    let r = qr.r();
    let dependent: Vec<usize> = (0..q_cols)
        .filter(|&j| r[(j, j)].abs() <= 1e-10 * col_norms[j].max(f64::MIN_POSITIVE))
        .collect();
    if !dependent.is_empty() {
        return Err(dependent);
    }
    let mut rhs = qr.q().transpose() * y;
    if !r.solve_upper_triangular_mut(&mut rhs) {
        return Err((0..q_cols).collect());
    }
    Ok(rhs)
}

/// Symmetric square root of a positive semidefinite matrix.
pub(crate) fn sym_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = a.clone().symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose()
}
