//! Dense complex matrix primitives: operator norms, spectra, Hermitian
//! square roots, numerical kernels, and Stein-equation solvers.

use ndarray::{Array1, Array2};
use ndarray_linalg::{EigVals, Eigh, Inverse, Solve, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = Array2<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square with all entries finite.
pub fn validate(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidInput(format!(
            "expected nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite entry".into()));
    }
    Ok(())
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

/// (m + m*)/2, removing round-off drift before eigendecompositions.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + &adjoint(m)).mapv(|z| 0.5 * z)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    let d = m - &adjoint(m);
    d.iter().map(|z| z.norm()).fold(0.0, f64::max) <= tol
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    validate(m)?;
    let (_, s, _) = m
        .svd(false, false)
        .map_err(|e| Error::NumericalFailure(format!("svd: {e}")))?;
    Ok(s.iter().copied().fold(0.0, f64::max))
}

pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    validate(m)?;
    let ev = m
        .eigvals()
        .map_err(|e| Error::NumericalFailure(format!("eig: {e}")))?;
    Ok(ev.to_vec())
}

/// Maximum modulus over the spectrum.
pub fn spec_radius(m: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Condition number sigma_max / sigma_min (infinite when singular).
pub fn cond(m: &CMatrix) -> Result<f64> {
    validate(m)?;
    let (_, s, _) = m
        .svd(false, false)
        .map_err(|e| Error::NumericalFailure(format!("svd: {e}")))?;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
    if smin <= 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(smax / smin)
    }
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    validate(m)?;
    m.inv()
        .map_err(|e| Error::SingularSimilarity(format!("inverse: {e}")))
}

/// s x s^{-1}
pub fn conjugate(s: &CMatrix, x: &CMatrix) -> Result<CMatrix> {
    let si = inverse(s)?;
    Ok(s.dot(x).dot(&si))
}

pub fn identity(dim: usize) -> CMatrix {
    Array2::eye(dim)
}

/// Principal square root of a Hermitian PSD matrix, via spectral decomposition.
pub fn herm_sqrt(m: &CMatrix) -> Result<CMatrix> {
    Ok(herm_sqrt_with_inverse(m)?.0)
}

/// Returns (m^{1/2}, m^{-1/2}) from one eigendecomposition.
pub fn herm_sqrt_with_inverse(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    validate(m)?;
    let h = hermitize(m);
    let (vals, vecs) = h
        .eigh(UPLO::Lower)
        .map_err(|e| Error::NumericalFailure(format!("eigh: {e}")))?;
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-12 * scale.max(1.0) {
        return Err(Error::NotPsd { min_eig });
    }
    let sq: Array1<f64> = vals.mapv(|v| v.max(0.0).sqrt());
    // LAPACK zheev via ndarray-linalg hands back conjugated columns for
    // row-major storage; undo that before reconstructing.
    let vecs = vecs.mapv(|z| z.conj());
    let vh = adjoint(&vecs);
    let mut root = vecs.clone();
    let mut root_inv = vecs.clone();
    for (j, s) in sq.iter().enumerate() {
        let inv = if *s > 0.0 { 1.0 / s } else { 0.0 };
        for i in 0..root.nrows() {
            root[(i, j)] *= Complex64::from(*s);
            root_inv[(i, j)] *= Complex64::from(inv);
        }
    }
    if sq.iter().any(|s| *s == 0.0) {
        return Err(Error::SingularSimilarity(
            "square root is singular, inverse unavailable".into(),
        ));
    }
    Ok((hermitize(&root.dot(&vh)), hermitize(&root_inv.dot(&vh))))
}

/// Orthonormal basis (as columns) of the numerical kernel: right singular
/// vectors whose singular values fall below tol * sigma_max. The zero matrix
/// is treated as all-kernel.
pub fn kernel_basis(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    validate(m)?;
    if tol <= 0.0 {
        return Err(Error::InvalidInput("kernel tolerance must be positive".into()));
    }
    let dim = m.nrows();
    let (_, s, vt) = m
        .svd(false, true)
        .map_err(|e| Error::NumericalFailure(format!("svd: {e}")))?;
    let vt = vt.expect("requested right singular vectors");
    let smax = s.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(identity(dim));
    }
    let cols: Vec<usize> = (0..dim).filter(|&i| s[i] < tol * smax).collect();
    let mut basis = Array2::zeros((dim, cols.len()));
    for (k, &i) in cols.iter().enumerate() {
        for j in 0..dim {
            basis[(j, k)] = vt[(i, j)].conj();
        }
    }
    Ok(basis)
}

pub const KERNEL_TOL_DEFAULT: f64 = 1e-9;

/// Margin below 1 required of the spectral radius before a Stein solve.
pub const STEIN_RADIUS_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteinMethod {
    DirectVectorized,
    SmithSquaring,
    TruncatedSeries,
}

#[derive(Debug, Clone)]
pub struct SteinSolution {
    pub z: CMatrix,
    pub residual: f64,
    pub method: SteinMethod,
    pub iterations: usize,
}

/// Solves X = q + a* X a, the closed form of the series sum_k (a*)^k q a^k.
/// Requires r(a) < 1 (with margin) and q Hermitian.
pub fn stein_solve(a: &CMatrix, q: &CMatrix, method: SteinMethod) -> Result<SteinSolution> {
    validate(a)?;
    validate(q)?;
    if a.nrows() != q.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "a is {}x{} but q is {}x{}",
            a.nrows(),
            a.ncols(),
            q.nrows(),
            q.ncols()
        )));
    }
    let qscale = op_norm(q)?;
    if !is_hermitian(q, 1e-12 * (1.0 + qscale)) {
        return Err(Error::PreconditionViolation("q must be Hermitian".into()));
    }
    let r = spec_radius(a)?;
    if r > 1.0 - STEIN_RADIUS_MARGIN {
        return Err(Error::SpectralRadiusViolation {
            radius: r,
            limit: 1.0 - STEIN_RADIUS_MARGIN,
        });
    }
    let q = hermitize(q);
    let (x, iterations) = match method {
        SteinMethod::DirectVectorized => (stein_direct(a, &q)?, 0),
        SteinMethod::SmithSquaring => stein_smith(a, &q)?,
        SteinMethod::TruncatedSeries => stein_series(a, &q)?,
    };
    let x = hermitize(&x);
    let ah = adjoint(a);
    let residual = op_norm(&(&x - &q - &ah.dot(&x).dot(a)))?;
    Ok(SteinSolution {
        z: x,
        residual,
        method,
        iterations,
    })
}

/// Direct solve for dim <= 16, Smith squaring above.
pub fn stein_solve_auto(a: &CMatrix, q: &CMatrix) -> Result<SteinSolution> {
    let method = if a.nrows() <= 16 {
        SteinMethod::DirectVectorized
    } else {
        SteinMethod::SmithSquaring
    };
    stein_solve(a, q, method)
}

// Solve the dim^2 linear system from the identity-minus-conjugation map:
// X_{ij} - sum_{k,l} conj(a_{ki}) X_{kl} a_{lj} = q_{ij}.
fn stein_direct(a: &CMatrix, q: &CMatrix) -> Result<CMatrix> {
    let d = a.nrows();
    let n = d * d;
    let mut sys: Array2<Complex64> = Array2::zeros((n, n));
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            sys[(row, row)] += Complex64::from(1.0);
            for k in 0..d {
                for l in 0..d {
                    sys[(row, k * d + l)] -= a[(k, i)].conj() * a[(l, j)];
                }
            }
        }
    }
    let rhs: Array1<Complex64> =
        Array1::from_iter((0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| q[(i, j)]));
    let sol = sys
        .solve(&rhs)
        .map_err(|e| Error::NumericalFailure(format!("stein direct solve: {e}")))?;
    let mut x: CMatrix = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            x[(i, j)] = sol[i * d + j];
        }
    }
    Ok(x)
}

const STEIN_STOP: f64 = 1e-14;
const STEIN_MAX_ITER: usize = 200;

// X_{k+1} = X_k + a_k* X_k a_k, a_{k+1} = a_k^2.
fn stein_smith(a: &CMatrix, q: &CMatrix) -> Result<(CMatrix, usize)> {
    let mut x = q.clone();
    let mut ak = a.clone();
    for iter in 0..STEIN_MAX_ITER {
        let na = op_norm(&ak)?;
        let nx = op_norm(&x)?;
        if na * na * nx < STEIN_STOP {
            return Ok((x, iter));
        }
        x = &x + &adjoint(&ak).dot(&x).dot(&ak);
        ak = ak.dot(&ak);
    }
    Err(Error::NumericalFailure(
        "smith squaring iteration cap exceeded".into(),
    ))
}

const SERIES_MAX_TERMS: usize = 100_000;

// Plain summation of sum_k (a*)^k q a^k; kept as a slow cross-check path.
fn stein_series(a: &CMatrix, q: &CMatrix) -> Result<(CMatrix, usize)> {
    let mut x = q.clone();
    let mut term = q.clone();
    let ah = adjoint(a);
    let mut pw = identity(a.nrows());
    for k in 1..SERIES_MAX_TERMS {
        pw = pw.dot(a);
        let npw = op_norm(&pw)?;
        if npw * npw < STEIN_STOP {
            return Ok((x, k));
        }
        term = ah.dot(&term).dot(a);
        x = &x + &term;
    }
    Err(Error::NumericalFailure(
        "truncated series term cap exceeded".into(),
    ))
}

/// Operator norms of m^1 .. m^n.
pub fn power_norms(m: &CMatrix, n: usize) -> Result<Vec<f64>> {
    validate(m)?;
    let mut out = Vec::with_capacity(n);
    let mut p = m.clone();
    for _ in 0..n {
        out.push(op_norm(&p)?);
        p = p.dot(m);
    }
    Ok(out)
}
