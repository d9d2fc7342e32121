//! Independent reference computations built on nalgebra.

#![allow(dead_code)]

use mimome_tas::channel::ChannelMatrix;
use mimome_tas::linalg::SquareMatrix;
use nalgebra::{Complex, DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type C64 = Complex<f64>;

pub fn to_dmatrix(h: &ChannelMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(h.rows(), h.cols(), h.entries())
}

pub fn square_to_dmatrix(t: &SquareMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(t.dim(), t.dim(), t.data())
}

pub fn column(h: &ChannelMatrix, k: usize) -> DVector<C64> {
    DVector::from_vec(h.column(k - 1))
}

/// Columns `indices` (1-based) of `h`.
pub fn columns(h: &ChannelMatrix, indices: &[usize]) -> DMatrix<C64> {
    let full = to_dmatrix(h);
    DMatrix::from_fn(h.rows(), indices.len(), |r, c| full[(r, indices[c] - 1)])
}

/// `sum log2(1 + rho * lambda_i)` over the eigenvalues of `H H^H`.
pub fn eigen_capacity(h: &DMatrix<C64>, rho: f64) -> f64 {
    if h.ncols() == 0 {
        return 0.0;
    }
    let gram = h * h.adjoint();
    gram.symmetric_eigenvalues()
        .iter()
        .map(|&l| (1.0 + rho * l.max(0.0)).log2())
        .sum()
}

/// `(I + rho H H^H)^{-1}` by a general LU inverse.
pub fn direct_inverse(h: &DMatrix<C64>, rho: f64) -> DMatrix<C64> {
    let n = h.nrows();
    let a = DMatrix::<C64>::identity(n, n) + (h * h.adjoint()).scale(rho);
    a.try_inverse().expect("regularized Gram is invertible")
}

/// `Re(x^H A x)`.
pub fn quad(a: &DMatrix<C64>, x: &DVector<C64>) -> f64 {
    (x.adjoint() * a * x)[(0, 0)].re
}

pub fn frobenius_relative(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// `|a - b| <= tol * max(1, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Small deterministic generator for picking test parameters.
pub struct Picker(ChaCha8Rng);

impl Picker {
    pub fn new(seed: u64) -> Self {
        Picker(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn choose<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.below(items.len())]
    }

    pub fn seed(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniformly random `l`-subset of `1..=n`, ascending.
    pub fn subset(&mut self, n: usize, l: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (1..=n).collect();
        for i in 0..l {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        let mut out = pool[..l].to_vec();
        out.sort_unstable();
        out
    }
}
