//! Schur multiplier norms of finite complex matrices.
//!
//! `‖A‖_S = min { max_i ‖x_i‖ · max_j ‖y_j‖ : A_ij = ⟨x_i, y_j⟩ }`, computed
//! by semidefinite programming with a certified bracket on every answer.

mod io;
mod ipm;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg::{hermitian_defect, hermitian_eigenvalues, CMatrix, CVector, C64};

pub use io::{format_complex, parse_complex, read_binary, read_csv, write_binary, write_csv};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 500;

#[derive(Debug, Error)]
pub enum SchurError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("matrix has a non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("malformed matrix data: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A Schur-norm instance.
#[derive(Clone, Debug)]
pub struct SchurProblem {
    pub a: CMatrix,
    pub tol: f64,
    pub max_iter: usize,
}

impl SchurProblem {
    pub fn new(a: CMatrix) -> Self {
        SchurProblem { a, tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn validate(&self) -> Result<(), SchurError> {
        if self.a.nrows() == 0 || self.a.ncols() == 0 {
            return Err(SchurError::Empty);
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SchurError::BadTolerance(self.tol));
        }
        for j in 0..self.a.ncols() {
            for i in 0..self.a.nrows() {
                let x = self.a[(i, j)];
                if !(x.re.is_finite() && x.im.is_finite()) {
                    return Err(SchurError::NonFinite(i, j));
                }
            }
        }
        Ok(())
    }
}

/// Output of [`schur_norm`].
#[derive(Clone, Debug)]
pub struct SchurSolution {
    /// Reported norm; equals `upper`, the value of a feasible factorization.
    pub value: f64,
    /// Certified lower bound from the dual weights.
    pub lower: f64,
    /// Certified upper bound `sqrt(max diag P · max diag Q)` of the primal iterate.
    pub upper: f64,
    /// Witness vectors with `A_ij ≈ ⟨x_i, y_j⟩`.
    pub xs: Vec<CVector>,
    pub ys: Vec<CVector>,
    /// Dual weights on rows and columns (nonnegative, total mass 1).
    pub row_weights: Vec<f64>,
    pub col_weights: Vec<f64>,
    /// `max |A_ij − ⟨x_i, y_j⟩|` of the reported witness.
    pub witness_residual: f64,
    /// `max ‖x_i‖ · max ‖y_j‖` of the reported witness.
    pub witness_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SchurSolution {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn witness_dim(&self) -> usize {
        self.xs.first().or(self.ys.first()).map_or(0, |v| v.len())
    }
}

/// Certified lower bound `2‖D_r^{1/2} A D_c^{1/2}‖₁` for arbitrary
/// nonnegative weights (normalized internally to total mass one).
pub fn dual_lower_bound(a: &CMatrix, row_weights: &[f64], col_weights: &[f64]) -> Result<f64, SchurError> {
    if row_weights.len() != a.nrows() || col_weights.len() != a.ncols() {
        return Err(SchurError::Shape("weight lengths must match matrix shape".into()));
    }
    if row_weights.iter().chain(col_weights).any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(SchurError::Shape("weights must be finite and nonnegative".into()));
    }
    let total: f64 = row_weights.iter().chain(col_weights).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let d1: Vec<f64> = row_weights.iter().map(|w| w / total).collect();
    let d2: Vec<f64> = col_weights.iter().map(|w| w / total).collect();
    Ok(ipm::dual_value(a, &d1, &d2))
}

fn to_c64<T: ipm::Scalar>(x: T) -> C64 {
    C64::new(x.real(), x.imaginary())
}

/// Gram factor of a positive definite `Z`: columns of `diag(√e) U*`,
/// truncated at `eps·λ_max` unless that costs more than `eps` in residual.
fn witness_from_gram(z: &CMatrix, m: usize, a: &CMatrix, eps: f64) -> (Vec<CVector>, Vec<CVector>, f64) {
    let eig = z.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let build = |cut: f64| {
        let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] > cut).collect();
        let factor = DMatrix::from_fn(keep.len(), z.nrows(), |r, c| {
            let k = keep[r];
            eig.eigenvectors[(c, k)].conj() * eig.eigenvalues[k].sqrt()
        });
        let xs: Vec<CVector> = (0..m).map(|i| factor.column(i).into_owned()).collect();
        let ys: Vec<CVector> = (m..z.nrows()).map(|j| factor.column(j).into_owned()).collect();
        let (res, _) = verify_witness(a, &xs, &ys).expect("shapes agree by construction");
        (xs, ys, res)
    };
    let truncated = build(eps * lmax);
    if truncated.2 <= eps {
        truncated
    } else {
        build(0.0)
    }
}

/// Computes the Schur multiplier norm with a certified bracket and witness.
///
/// A non-converged run is not an error: it returns the best certified bracket
/// with `converged == false`.
pub fn schur_norm(problem: &SchurProblem) -> Result<SchurSolution, SchurError> {
    problem.validate()?;
    let a = &problem.a;
    let (m, n) = a.shape();
    let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(SchurSolution {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            xs: vec![CVector::zeros(1); m],
            ys: vec![CVector::zeros(1); n],
            row_weights: vec![0.5 / m as f64; m],
            col_weights: vec![0.5 / n as f64; n],
            witness_residual: 0.0,
            witness_bound: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    // the Stein factorization works on the column block; keep it the smaller one
    let transposed = n > m;
    let work: CMatrix = if transposed { a.adjoint() } else { a.clone() } / C64::new(scale, 0.0);
    let tol = problem.tol / scale;
    let real = work.iter().all(|x| x.im == 0.0);
    let (z, upper, lower, (w1, w2), iterations, converged) = if real {
        let re = work.map(|x| x.re);
        let out = ipm::solve(&re, tol, problem.max_iter);
        (out.z.map(|x| C64::new(x, 0.0)), out.upper, out.lower, out.weights, out.iterations, out.converged)
    } else {
        let out = ipm::solve(&work, tol, problem.max_iter);
        (out.z.map(to_c64), out.upper, out.lower, out.weights, out.iterations, out.converged)
    };
    let (wm, _) = work.shape();
    let sqrt_scale = scale.sqrt();
    let (mut xs, mut ys, _) = witness_from_gram(&z, wm, &work, tol);
    for v in xs.iter_mut().chain(ys.iter_mut()) {
        *v *= C64::new(sqrt_scale, 0.0);
    }
    let (xs, ys, row_weights, col_weights) = if transposed {
        // A*_ji = ⟨x'_j, y'_i⟩ gives A_ij = ⟨y'_i, x'_j⟩
        (ys, xs, w2, w1)
    } else {
        (xs, ys, w1, w2)
    };
    let (witness_residual, witness_bound) = verify_witness(a, &xs, &ys)?;
    Ok(SchurSolution {
        value: upper * scale,
        lower: lower * scale,
        upper: upper * scale,
        xs,
        ys,
        row_weights,
        col_weights,
        witness_residual,
        witness_bound,
        iterations,
        converged,
    })
}

/// Residual `max |A_ij − ⟨x_i, y_j⟩|` and bound `max‖x_i‖·max‖y_j‖`.
///
/// With zero residual the bound is an upper bound on `‖A‖_S`, independent of
/// any solver.
pub fn verify_witness(a: &CMatrix, xs: &[CVector], ys: &[CVector]) -> Result<(f64, f64), SchurError> {
    if xs.len() != a.nrows() || ys.len() != a.ncols() {
        return Err(SchurError::Shape(format!(
            "{}x{} matrix with {} row and {} column vectors",
            a.nrows(),
            a.ncols(),
            xs.len(),
            ys.len()
        )));
    }
    let dim = xs.first().or(ys.first()).map_or(0, |v| v.len());
    if xs.iter().chain(ys).any(|v| v.len() != dim) {
        return Err(SchurError::Shape("witness vectors differ in dimension".into()));
    }
    let mut residual: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            residual = residual.max((a[(i, j)] - x.dotc(y)).norm());
        }
    }
    let mx = xs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let my = ys.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok((residual, mx * my))
}

/// Positive semidefiniteness test: `(λ_min ≥ −tol, λ_min)`.
pub fn psd_check(m: &CMatrix, tol: f64) -> Result<(bool, f64), SchurError> {
    if m.nrows() != m.ncols() {
        return Err(SchurError::Shape("matrix must be square".into()));
    }
    if m.is_empty() {
        return Ok((true, f64::INFINITY));
    }
    let scale = m.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let defect = hermitian_defect(m);
    if defect > tol.max(1e-12 * scale) {
        return Err(SchurError::NotHermitian(defect));
    }
    let lmin = hermitian_eigenvalues(m)[0];
    Ok((lmin >= -tol, lmin))
}

/// Witness for a positive semidefinite `A`: `x_i = y_i = ` column `i` of `A^{1/2}`.
pub fn psd_witness(a: &CMatrix) -> Result<Vec<CVector>, SchurError> {
    psd_check(a, 1e-9)?;
    let eig = ((a + a.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigen();
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&DVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)),
        ))
        * eig.eigenvectors.adjoint();
    Ok((0..a.ncols()).map(|i| root.column(i).into_owned()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complexify;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        complexify(&DMatrix::from_row_slice(rows, cols, data))
    }

    #[test]
    fn ones_matrix_has_norm_one() {
        let sol = schur_norm(&SchurProblem::new(real(2, 2, &[1.0; 4]))).unwrap();
        assert!(sol.converged);
        assert!((sol.value - 1.0).abs() < 1e-6, "{}", sol.value);
        assert!(sol.lower <= sol.upper + 1e-12);
    }

    #[test]
    fn hadamard_two_by_two() {
        let sol = schur_norm(&SchurProblem::new(real(2, 2, &[1.0, 1.0, 1.0, -1.0]))).unwrap();
        assert!((sol.value - 2f64.sqrt()).abs() < 1e-6, "{}", sol.value);
        assert!(sol.witness_residual <= 1e-6);
        assert!(sol.witness_bound <= sol.value + 1e-6);
    }

    #[test]
    fn rectangular_and_scaled() {
        let a = real(2, 3, &[1.0, 0.0, 2.0, -1.0, 3.0, 0.5]);
        let s = schur_norm(&SchurProblem::new(a.clone())).unwrap();
        let t = schur_norm(&SchurProblem::new(a.transpose())).unwrap();
        assert!((s.value - t.value).abs() < 2e-6);
        let c = C64::new(0.0, -2.5);
        let u = schur_norm(&SchurProblem::new(&a * c)).unwrap();
        assert!((u.value - 2.5 * s.value).abs() < 4e-6);
        assert!(u.witness_residual <= 1e-6 * 2.5);
        // a row or column norm bound always holds
        assert!(s.value >= 3.0 - 1e-6);
    }

    #[test]
    fn zero_matrix() {
        let sol = schur_norm(&SchurProblem::new(CMatrix::zeros(3, 2))).unwrap();
        assert_eq!(sol.value, 0.0);
        assert_eq!(sol.witness_residual, 0.0);
    }

    #[test]
    fn invalid_problems() {
        assert!(matches!(schur_norm(&SchurProblem::new(CMatrix::zeros(0, 2))), Err(SchurError::Empty)));
        let mut a = CMatrix::zeros(2, 2);
        a[(1, 0)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(schur_norm(&SchurProblem::new(a)), Err(SchurError::NonFinite(1, 0))));
        let p = SchurProblem::new(CMatrix::identity(2, 2)).with_tol(0.0);
        assert!(matches!(schur_norm(&p), Err(SchurError::BadTolerance(_))));
    }

    #[test]
    fn iteration_cap_reports_bracket() {
        let a = real(3, 3, &[1.0, 2.0, -1.0, 0.5, 1.0, 1.0, -2.0, 1.0, 0.3]);
        let sol = schur_norm(&SchurProblem::new(a).with_max_iter(2)).unwrap();
        assert!(!sol.converged);
        assert!(sol.lower <= sol.upper);
    }

    #[test]
    fn witness_examples() {
        let ones = real(1, 1, &[1.0]);
        let one = vec![CVector::from_element(1, C64::new(1.0, 0.0))];
        assert_eq!(verify_witness(&ones, &one, &one).unwrap(), (0.0, 1.0));
        let h = real(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let v = |a: f64, b: f64| CVector::from_vec(vec![C64::new(a, 0.0), C64::new(b, 0.0)]);
        let (res, bound) = verify_witness(&h, &[v(1.0, 0.0), v(0.0, 1.0)], &[v(1.0, 1.0), v(1.0, -1.0)]).unwrap();
        assert_eq!(res, 0.0);
        assert!((bound - 2f64.sqrt()).abs() < 1e-15);
        assert!(verify_witness(&h, &[v(1.0, 0.0)], &[v(1.0, 1.0), v(1.0, -1.0)]).is_err());
    }

    #[test]
    fn psd_examples() {
        assert_eq!(psd_check(&CMatrix::identity(3, 3), 1e-12).unwrap().0, true);
        let (ok, l) = psd_check(&real(2, 2, &[1.0, 2.0, 2.0, 1.0]), 1e-12).unwrap();
        assert!(!ok && (l + 1.0).abs() < 1e-12);
        let toeplitz = complexify(&DMatrix::from_fn(10, 10, |i, j| 0.9f64.powi((i as i32 - j as i32).abs())));
        assert!(psd_check(&toeplitz, 1e-12).unwrap().0);
        assert!(matches!(psd_check(&real(2, 2, &[1.0, 2.0, 0.0, 1.0]), 1e-9), Err(SchurError::NotHermitian(_))));
    }
}
