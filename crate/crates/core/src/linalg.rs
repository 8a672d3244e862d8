//! Shared numerical helpers: Gauss–Legendre nodes and a fast complex GEMM.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Gauss–Legendre nodes and weights on [-1, 1] via Golub–Welsch
/// (eigendecomposition of the symmetric tridiagonal Jacobi matrix).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be at least 1");
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let off = kf / (4.0 * kf * kf - 1.0).sqrt();
        jac[(k - 1, k)] = off;
        jac[(k, k - 1)] = off;
    }
    let eig = nalgebra::SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], 2.0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Column-major real/imaginary split of a complex matrix. Kept split so the
/// products below can run through real GEMM kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SplitMatrix {
    pub fn from_complex(m: &DMatrix<C64>) -> Self {
        let (nrows, ncols) = m.shape();
        let mut re = Vec::with_capacity(nrows * ncols);
        let mut im = Vec::with_capacity(nrows * ncols);
        for v in m.iter() {
            re.push(v.re);
            im.push(v.im);
        }
        Self { nrows, ncols, re, im }
    }

    pub fn to_complex(&self) -> DMatrix<C64> {
        DMatrix::from_iterator(
            self.nrows,
            self.ncols,
            self.re.iter().zip(&self.im).map(|(r, i)| C64::new(*r, *i)),
        )
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, re: vec![0.0; nrows * ncols], im: vec![0.0; nrows * ncols] }
    }
}

fn dgemm(alpha: f64, a: &[f64], b: &[f64], beta: f64, c: &mut [f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            1,
            k as isize,
            beta,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
}

/// out = alpha * a·b + beta * out for split complex matrices
/// (four real GEMMs). `conj_a` conjugates the entries of the left factor on
/// the fly — no transpose; for the symmetric displacement matrices used by
/// the Lindblad solver this coincides with the adjoint.
pub fn cgemm(alpha: f64, a: &SplitMatrix, conj_a: bool, b: &SplitMatrix, beta: f64, out: &mut SplitMatrix) {
    assert_eq!(a.ncols, b.nrows);
    assert_eq!(out.nrows, a.nrows);
    assert_eq!(out.ncols, b.ncols);
    let (m, k, n) = (a.nrows, a.ncols, b.ncols);
    let ai_sign = if conj_a { -alpha } else { alpha };
    // Re: a_re b_re - a_im b_im (sign flip on a_im if conjugated)
    dgemm(alpha, &a.re, &b.re, beta, &mut out.re, m, k, n);
    dgemm(-ai_sign, &a.im, &b.im, 1.0, &mut out.re, m, k, n);
    // Im: a_re b_im + a_im b_re
    dgemm(alpha, &a.re, &b.im, beta, &mut out.im, m, k, n);
    dgemm(ai_sign, &a.im, &b.re, 1.0, &mut out.im, m, k, n);
}

/// out = alpha * a·bᴴ + beta * out (Hermitian transpose of the right factor).
pub fn cgemm_bh(alpha: f64, a: &SplitMatrix, b: &SplitMatrix, beta: f64, out: &mut SplitMatrix) {
    assert_eq!(a.ncols, b.ncols);
    assert_eq!(out.nrows, a.nrows);
    assert_eq!(out.ncols, b.nrows);
    let (m, k, n) = (a.nrows, a.ncols, b.nrows);
    // bᴴ in column-major is b with swapped strides and negated imaginary part.
    let gemm_t = |alpha: f64, x: &[f64], y: &[f64], beta: f64, c: &mut [f64]| unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            x.as_ptr(),
            1,
            m as isize,
            y.as_ptr(),
            n as isize,
            1,
            beta,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    };
    gemm_t(alpha, &a.re, &b.re, beta, &mut out.re);
    gemm_t(alpha, &a.im, &b.im, 1.0, &mut out.re);
    gemm_t(-alpha, &a.re, &b.im, beta, &mut out.im);
    gemm_t(alpha, &a.im, &b.re, 1.0, &mut out.im);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_low_orders() {
        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(w[0], 1.0, max_relative = 1e-14);
        let (x, w) = gauss_legendre(5);
        assert_relative_eq!(x[2], 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_high_degree_polynomials_exactly() {
        // n nodes are exact through degree 2n-1.
        let (x, w) = gauss_legendre(16);
        for deg in [0usize, 7, 18, 31] {
            let num: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert_relative_eq!(num, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn cgemm_matches_nalgebra() {
        let n = 17;
        let a = DMatrix::<C64>::from_fn(n, n, |i, j| C64::new((i * 3 + j) as f64 * 0.01, (i as f64 - j as f64) * 0.02));
        let b = DMatrix::<C64>::from_fn(n, n, |i, j| C64::new((j * 5 + i) as f64 * 0.015, 0.3 - i as f64 * 0.01 * j as f64));
        let sa = SplitMatrix::from_complex(&a);
        let sb = SplitMatrix::from_complex(&b);
        let mut out = SplitMatrix::zeros(n, n);
        cgemm(1.0, &sa, false, &sb, 0.0, &mut out);
        let want = &a * &b;
        assert_relative_eq!((out.to_complex() - &want).norm(), 0.0, epsilon = 1e-10);
        cgemm(2.0, &sa, true, &sb, 1.0, &mut out);
        let want2 = want + a.map(|v| v.conj()) * &b * C64::new(2.0, 0.0);
        assert_relative_eq!((out.to_complex() - &want2).norm(), 0.0, epsilon = 1e-10);
        let mut out_bh = SplitMatrix::zeros(n, n);
        cgemm_bh(1.0, &sa, &sb, 0.0, &mut out_bh);
        let want3 = &a * b.adjoint();
        assert_relative_eq!((out_bh.to_complex() - want3).norm(), 0.0, epsilon = 1e-10);
    }
}
