//! Row-by-row Cholesky factorization of small Hermitian positive definite
//! matrices.
//!
//! Rows are appended one at a time, so the factor of a leading principal
//! submatrix is a prefix of the factor of the whole matrix. Exhaustive ray
//! search relies on this to share work between subsets with a common prefix.

use num_complex::Complex64;

use crate::error::{RaaError, Result};

/// Lower-triangular `L` with `L·Lᴴ = A`, stored row-major in a `cap × cap` buffer.
#[derive(Debug, Clone)]
pub(crate) struct RowCholesky {
    cap: usize,
    len: usize,
    l: Vec<Complex64>,
}

impl RowCholesky {
    pub fn with_capacity(cap: usize) -> Self {
        Self {
            cap,
            len: 0,
            l: vec![Complex64::new(0.0, 0.0); cap * cap],
        }
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn truncate(&mut self, len: usize) {
        self.len = self.len.min(len);
    }

    fn at(&self, r: usize, c: usize) -> Complex64 {
        self.l[r * self.cap + c]
    }

    /// Appends the row `A[p, 0..=p]` where `p = len()`; `entry(c)` returns `A[p, c]`.
    pub fn push_row(&mut self, entry: impl Fn(usize) -> Complex64) -> Result<()> {
        let p = self.len;
        assert!(p < self.cap, "cholesky capacity exceeded");
        let row = p * self.cap;
        for c in 0..p {
            let mut acc = entry(c);
            for t in 0..c {
                acc -= self.l[row + t] * self.at(c, t).conj();
            }
            self.l[row + c] = acc / self.at(c, c).re;
        }
        let mut diag = entry(p).re;
        for t in 0..p {
            diag -= self.l[row + t].norm_sqr();
        }
        if !diag.is_finite() || diag <= 0.0 {
            return Err(RaaError::SingularMatrix);
        }
        self.l[row + p] = Complex64::new(diag.sqrt(), 0.0);
        self.len = p + 1;
        Ok(())
    }

    /// Forward substitution for the newest row: given `y[0..p]` solving the
    /// leading block of `L·y = b`, returns `y[p]` for right-hand side entry `b_p`.
    pub fn forward_step(&self, y: &[Complex64], b_p: Complex64) -> Complex64 {
        let p = self.len - 1;
        let row = p * self.cap;
        let mut acc = b_p;
        for (lt, yt) in self.l[row..row + p].iter().zip(y) {
            acc -= lt * yt;
        }
        acc / self.l[row + p].re
    }

    /// Solves `A·x = b` with the current factor.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.len;
        debug_assert_eq!(b.len(), n);
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for p in 0..n {
            let mut acc = b[p];
            for (t, yt) in y[..p].iter().enumerate() {
                acc -= self.at(p, t) * yt;
            }
            y[p] = acc / self.at(p, p).re;
        }
        for p in (0..n).rev() {
            let mut acc = y[p];
            for (t, yt) in y.iter().enumerate().skip(p + 1) {
                acc -= self.at(t, p).conj() * yt;
            }
            y[p] = acc / self.at(p, p).re;
        }
        y
    }

    /// Factors a full Hermitian matrix given as rows.
    pub fn factor(a: &[Vec<Complex64>]) -> Result<Self> {
        let mut chol = Self::with_capacity(a.len());
        for row in a {
            chol.push_row(|c| row[c])?;
        }
        Ok(chol)
    }
}
