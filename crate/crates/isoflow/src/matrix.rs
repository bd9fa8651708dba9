//! Dense square matrices over f64 and the small combinatorial types that
//! label charts: permutations, sign diagonals, and simple real spectra.
//!
//! Everything here is desk scale (n rarely above 8, never above a few dozen),
//! so storage is a flat row-major `Vec<f64>` and products are plain loops.

use crate::error::{Error, Result};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Relative gap below which two eigenvalues count as coincident.
pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-8;

/// Square matrix with real entries, row-major storage.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be at least 1");
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows, checking squareness and finiteness.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for &x in row {
                if !x.is_finite() {
                    return Err(Error::NonFinite);
                }
                data.push(x);
            }
        }
        Ok(Matrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0f64, f64::max)
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        (0..self.n).map(|j| self[(i, j)] * self[(i, j)]).sum::<f64>().sqrt()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in 0..i {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// A B - B A.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self * other - other * self
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.n && j < self.n);
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.n && j < self.n);
        &mut self.data[i * self.n + j]
    }
}

macro_rules! entrywise {
    ($lhs:expr, $rhs:expr, $op:tt) => {{
        let (a, b) = ($lhs, $rhs);
        assert_eq!(a.n, b.n, "matrix dimensions differ");
        Matrix {
            n: a.n,
            data: a.data.iter().zip(&b.data).map(|(x, y)| x $op y).collect(),
        }
    }};
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        entrywise!(self, rhs, +)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        entrywise!(self, rhs, -)
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        &self + &rhs
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        &self - &rhs
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions differ");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

impl Mul<&Matrix> for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        &self * rhs
    }
}

impl Mul<Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        self * &rhs
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                write!(f, "{:>13.6e} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Permutation of {1, .., n}. Stored zero-based: `images[i]` is pi(i+1) - 1.
///
/// The matrix convention is P e_i = e_{pi(i)}, so P has a 1 in row pi(i),
/// column i.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// From one-based images, e.g. `[1, 3, 2]` swaps the last two points.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in images {
            if v < 1 || v > n || seen[v - 1] {
                return Err(Error::DimensionMismatch { expected: n, found: v });
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images: images.iter().map(|v| v - 1).collect() })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Zero-based image of zero-based `i`.
    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn one_based_images(&self) -> Vec<usize> {
        self.images.iter().map(|v| v + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    pub fn matrix(&self) -> Matrix {
        let n = self.n();
        let mut p = Matrix::zeros(n);
        for i in 0..n {
            p[(self.images[i], i)] = 1.0;
        }
        p
    }

    /// All n! permutations in lexicographic order of their image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut images = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, images: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if images.len() == n {
                out.push(Permutation { images: images.clone() });
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    images.push(v);
                    rec(n, images, used, out);
                    images.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, &mut images, &mut used, &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi{}", self)
    }
}

/// Diagonal matrix with entries +-1.
#[derive(Clone, PartialEq)]
pub struct SignDiagonal {
    signs: Vec<f64>,
}

impl SignDiagonal {
    pub fn identity(n: usize) -> Self {
        SignDiagonal { signs: vec![1.0; n] }
    }

    pub fn from_signs(signs: &[f64]) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for &s in signs {
            if s != 1.0 && s != -1.0 {
                return Err(Error::NonFinite);
            }
        }
        Ok(SignDiagonal { signs: signs.to_vec() })
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        self.signs[i]
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::diagonal(&self.signs)
    }

    pub fn is_identity(&self) -> bool {
        self.signs.iter().all(|&s| s == 1.0)
    }

    /// Flips row i of `m` wherever sign i is negative (computes E M).
    pub fn apply_rows(&self, m: &Matrix) -> Matrix {
        Matrix::from_fn(m.n(), |i, j| self.signs[i] * m[(i, j)])
    }

    /// All 2^n sign patterns, identity first, in binary order (last index fastest).
    pub fn all(n: usize) -> Vec<SignDiagonal> {
        (0..1usize << n)
            .map(|mask| SignDiagonal {
                signs: (0..n)
                    .map(|i| if mask >> (n - 1 - i) & 1 == 1 { -1.0 } else { 1.0 })
                    .collect(),
            })
            .collect()
    }
}

impl fmt::Debug for SignDiagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> =
            self.signs.iter().map(|&s| if s > 0.0 { "+" } else { "-" }).collect();
        write!(f, "diag({})", parts.join(""))
    }
}

/// Strictly decreasing list of simple real eigenvalues.
///
/// The gap tolerance is relative: consecutive values must differ by more than
/// `gap_tolerance * max(1, |lambda_k|)`.
#[derive(Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    gap_tolerance: f64,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Spectrum::with_gap_tolerance(values, DEFAULT_GAP_TOLERANCE)
    }

    pub fn with_gap_tolerance(values: Vec<f64>, gap_tolerance: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        for k in 0..values.len() - 1 {
            let gap = values[k] - values[k + 1];
            if gap <= gap_tolerance * values[k].abs().max(1.0) {
                return Err(Error::DegenerateSpectrum { index: k + 1, gap });
            }
        }
        Ok(Spectrum { values, gap_tolerance })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gap_tolerance(&self) -> f64 {
        self.gap_tolerance
    }

    pub fn all_positive(&self) -> bool {
        // values are decreasing, so the last one decides
        *self.values.last().unwrap() > 0.0
    }
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Spectrum{:?}", self.values)
    }
}
