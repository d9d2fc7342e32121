//! Small dense Hermitian kernels: Gram forms, Cholesky, log-det, inverse.
//!
//! Receive-side dimensions are tiny (a handful of antennas), so everything
//! here is plain row-major loops over `Vec<Complex64>`.

use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        SquareMatrix { n, data }
    }

    pub fn from_vec(n: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), n * n);
        SquareMatrix { n, data }
    }

    /// `I + rho * H H^†` for an `n x m` matrix `H` (result is `n x n`).
    pub fn regularized_gram(h: &ChannelMatrix, rho: f64) -> Self {
        let (n, m) = (h.rows(), h.cols());
        let mut g = Self::identity(n);
        let e = h.entries();
        for i in 0..n {
            for j in 0..=i {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..m {
                    acc += e[i * m + k] * e[j * m + k].conj();
                }
                g.data[i * n + j] += acc * rho;
                if i != j {
                    g.data[j * n + i] = g.data[i * n + j].conj();
                }
            }
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Real part of `x^† A x`; exact for Hermitian `A` up to rounding.
    pub fn quad_form(&self, x: &[Complex64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, row) in self.data.chunks_exact(self.n).enumerate() {
            let ax: Complex64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            acc += x[i].conj() * ax;
        }
        acc.re
    }

    /// `A <- A - t t^†`.
    pub fn sub_outer(&mut self, t: &[Complex64]) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                self.data[i * n + j] -= t[i] * t[j].conj();
            }
        }
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_distance(&self, other: &SquareMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Lower Cholesky factor of a Hermitian positive-definite matrix.
    pub fn cholesky(&self) -> Result<Cholesky> {
        let n = self.n;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.data[j * n + j].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d.is_nan() || d <= 0.0 || !d.is_finite() {
                return Err(Error::Numerical(format!(
                    "matrix is not positive definite (pivot {j} = {d})"
                )));
            }
            let djj = d.sqrt();
            l[j * n + j] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = self.data[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Cholesky { n, l })
    }
}

/// `A = L L^†` with `L` lower triangular and real positive diagonal.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    l: Vec<Complex64>,
}

impl Cholesky {
    /// `log2 det A = 2 * sum log2 L_ii`.
    pub fn log2_det(&self) -> f64 {
        2.0 * (0..self.n)
            .map(|i| self.l[i * self.n + i].re.log2())
            .sum::<f64>()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i].re;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i].conj() * y[k];
            }
            y[i] = s / self.l[i * n + i].re;
        }
        y
    }

    /// `A^{-1}`, symmetrized so the result is exactly Hermitian.
    pub fn inverse(&self) -> SquareMatrix {
        let n = self.n;
        let mut inv = vec![Complex64::new(0.0, 0.0); n * n];
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            for i in 0..n {
                inv[i * n + j] = col[i];
            }
        }
        for i in 0..n {
            inv[i * n + i].im = 0.0;
            for j in 0..i {
                let avg = (inv[i * n + j] + inv[j * n + i].conj()) * 0.5;
                inv[i * n + j] = avg;
                inv[j * n + i] = avg.conj();
            }
        }
        SquareMatrix { n, data: inv }
    }
}

/// `(I + rho H H^†)^{-1}`.
pub fn regularized_gram_inverse(h: &ChannelMatrix, rho: f64) -> Result<SquareMatrix> {
    Ok(SquareMatrix::regularized_gram(h, rho).cholesky()?.inverse())
}
