//! Dense complex linear algebra on Hermitian operators.
//!
//! Bipartite operators use the composite index `a * d_b + b`, so subsystem A
//! is the slow index and block `(i, j)` of a `d_a*d_b` square matrix is the
//! operator `<i|M|j>` acting on B.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Eigenvalues with magnitude at or below this are treated as exact zeros
/// before fractional powers are taken.
pub const DEFAULT_EIG_CLIP: f64 = 1e-12;

/// Relative hermiticity tolerance accepted by [`herm_eig`].
pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Spectral decomposition `M = V diag(eigenvalues) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: DVector<f64>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(lambda)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for k in 0..n {
            let w = f(self.eigenvalues[k]);
            scaled.column_mut(k).scale_mut(w);
        }
        let mut out = scaled * self.eigenvectors.adjoint();
        hermitize_in_place(&mut out);
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_spectrum(|l| l)
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `‖M − M†‖_F`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    frobenius_norm(&(m - m.adjoint()))
}

/// Replaces `M` by `(M + M†) / 2`.
pub fn hermitize_in_place(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

fn require_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn require_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let deviation = hermiticity_deviation(m);
    if deviation > tol * (1.0 + frobenius_norm(m)) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(m: &CMatrix, hermiticity_tol: f64) -> Result<HermitianEigen> {
    require_square(m, "matrix")?;
    require_hermitian(m, hermiticity_tol)?;
    let mut sym = m.clone();
    hermitize_in_place(&mut sym);
    Ok(sorted_eigen(sym))
}

fn sorted_eigen(sym: CMatrix) -> HermitianEigen {
    let n = sym.nrows();
    if n == 0 {
        return HermitianEigen {
            eigenvalues: DVector::zeros(0),
            eigenvectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// Ascending eigenvalues of a matrix assumed Hermitian. No checks; used on
/// hot paths whose inputs are Hermitian by construction.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut sym = m.clone();
    hermitize_in_place(&mut sym);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `lambda^t` restricted to the support: eigenvalues at or below `eig_clip`
/// count as zero and contribute zero for every exponent.
pub fn clipped_power(lambda: f64, t: f64, eig_clip: f64) -> f64 {
    if lambda <= eig_clip {
        0.0
    } else if t == 1.0 {
        lambda
    } else {
        lambda.powf(t)
    }
}

/// Fractional power `V diag(max(lambda, 0)^t) V†` of a Hermitian PSD matrix.
pub fn mat_pow(m: &CMatrix, t: f64, eig_clip: f64) -> Result<CMatrix> {
    let eig = herm_eig(m, DEFAULT_HERMITICITY_TOL)?;
    Ok(eig.map_spectrum(|l| clipped_power(l, t, eig_clip)))
}

/// `exp(iH)` for Hermitian `H`.
pub fn unitary_exp(h: &CMatrix) -> CMatrix {
    let mut sym = h.clone();
    hermitize_in_place(&mut sym);
    let eig = sorted_eigen(sym);
    let n = eig.dim();
    let mut scaled = eig.eigenvectors.clone();
    for k in 0..n {
        let phase = C64::from_polar(1.0, eig.eigenvalues[k]);
        for r in 0..n {
            scaled[(r, k)] *= phase;
        }
    }
    scaled * eig.eigenvectors.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn check_bipartite(m: &CMatrix, d_a: usize, d_b: usize) -> Result<()> {
    require_square(m, "bipartite operator")?;
    if d_a == 0 || d_b == 0 || d_a * d_b != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} does not factor as {d_a} x {d_b}",
            m.nrows()
        )));
    }
    Ok(())
}

/// The `d_b x d_b` block `<i|M|j>` on subsystem B.
pub fn partial_block(m: &CMatrix, d_a: usize, d_b: usize, i: usize, j: usize) -> Result<CMatrix> {
    check_bipartite(m, d_a, d_b)?;
    if i >= d_a || j >= d_a {
        return Err(Error::DimensionMismatch(format!(
            "block index ({i}, {j}) out of range for d_a = {d_a}"
        )));
    }
    Ok(m.view((i * d_b, j * d_b), (d_b, d_b)).into_owned())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced operator on `keep`, tracing out the other factor.
pub fn partial_trace(m: &CMatrix, d_a: usize, d_b: usize, keep: Subsystem) -> Result<CMatrix> {
    check_bipartite(m, d_a, d_b)?;
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(d_a, d_a, |i, j| {
            (0..d_b).map(|b| m[(i * d_b + b, j * d_b + b)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(d_b, d_b, |k, l| {
            (0..d_a).map(|a| m[(a * d_b + k, a * d_b + l)]).sum()
        }),
    };
    Ok(out)
}

/// `‖U†U − I‖_F`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    frobenius_norm(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn require_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    let deviation = unitarity_deviation(u);
    if deviation > tol {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// `|v><v|` for a column vector.
pub fn outer(v: &DVector<C64>) -> CMatrix {
    v * v.adjoint()
}

/// Matrix from row-major real and imaginary parts.
pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<CMatrix> {
    let n = re.len();
    if im.len() != n || re.iter().chain(im.iter()).any(|row| row.len() != n) {
        return Err(Error::Parse(format!(
            "re/im must both be {n}x{n} row-major arrays"
        )));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| C64::new(re[i][j], im[i][j])))
}

/// Row-major real and imaginary parts.
pub fn to_parts(m: &CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
        .collect();
    let im = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
        .collect();
    (re, im)
}

pub fn real_diagonal(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| C64::new(v, 0.0)),
    ))
}
