//! Charts on the space of matrices with a fixed simple real spectrum.
//!
//! A matrix M with simple spectrum and a permutation pi determine (when the
//! leading minors of the pi-ordered left eigenvector frame are nonzero) a
//! unique factorization M = Q^T (Y + D) Q, Q orthogonal with positive leading
//! minors, D the spectrum placed along the diagonal in pi order, Y strictly
//! lower triangular. Splitting Q = L U further gives Z + D = L^{-1} (Y + D) L
//! with Z strictly lower: the (Y, Z) pair is the chart coordinate in which
//! the flows of the Toda hierarchy act diagonally.

use crate::error::{Error, Result};
use crate::linalg::{
    invert_upper, leading_minors, lq_pos, lu_unit, project_strict_lower, qr_pos, real_eigen,
    solve_lower, solve_unit_lower, symmetrize,
};
use crate::matrix::{Matrix, Permutation, Spectrum};

/// A leading minor of the eigenvector frame counts as zero below this times
/// the product of the (unit-normalized) row norms.
const CHART_MINOR_TOL: f64 = 1e-10;

/// Detection threshold for the Jacobi predicate, relative to coordinate size.
const JACOBI_TOL: f64 = 1e-9;

/// Chart coordinates of a matrix: permutation, spectrum, and the two strictly
/// lower triangular coordinate matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    pi: Permutation,
    spectrum: Spectrum,
    y: Matrix,
    z: Matrix,
}

impl ChartPoint {
    pub fn new(pi: Permutation, spectrum: Spectrum, y: Matrix, z: Matrix) -> Result<Self> {
        let n = spectrum.n();
        for found in [pi.n(), y.n(), z.n()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        for m in [&y, &z] {
            if !m.is_finite() {
                return Err(Error::NonFinite);
            }
            for i in 0..n {
                for j in i..n {
                    if m[(i, j)] != 0.0 {
                        return Err(Error::NotStrictlyLower);
                    }
                }
            }
        }
        Ok(ChartPoint { pi, spectrum, y, z })
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    pub fn z(&self) -> &Matrix {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    /// Spectrum entry sitting at diagonal position i of the chart.
    pub fn lambda(&self, i: usize) -> f64 {
        self.spectrum.values()[self.pi.image(i)]
    }

    /// The diagonal matrix D with the spectrum in chart order.
    pub fn d_pi(&self) -> Matrix {
        Matrix::from_fn(self.n(), |i, j| if i == j { self.lambda(i) } else { 0.0 })
    }

    pub fn y_plus_d(&self) -> Matrix {
        &self.y + &self.d_pi()
    }

    pub fn z_plus_d(&self) -> Matrix {
        &self.z + &self.d_pi()
    }

    /// Same chart label (pi, spectrum) with new coordinates.
    pub fn with_coordinates(&self, y: Matrix, z: Matrix) -> Result<ChartPoint> {
        ChartPoint::new(self.pi.clone(), self.spectrum.clone(), y, z)
    }
}

/// The three frames attached to a chart point: M = Q^T (Y + D) Q, Q = L U.
#[derive(Clone, Debug)]
pub struct ChartFrames {
    pub q: Matrix,
    pub l: Matrix,
    pub u: Matrix,
}

/// Chart coordinates of M in the chart labeled by pi.
pub fn chart_decompose(m: &Matrix, pi: &Permutation) -> Result<ChartPoint> {
    Ok(chart_decompose_with_frame(m, pi)?.0)
}

/// Like `chart_decompose`, also returning the orthogonal frame Q.
pub(crate) fn chart_decompose_with_frame(
    m: &Matrix,
    pi: &Permutation,
) -> Result<(ChartPoint, Matrix)> {
    let n = m.n();
    if pi.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: pi.n() });
    }
    let symmetric = m.is_symmetric(1e-12 * m.max_abs().max(1.0));
    let (spectrum, x) = real_eigen(m)?;
    let xp = Matrix::from_fn(n, |i, j| x[(pi.image(i), j)]);
    let xpos = sign_fix_for_chart(&xp, pi)?;
    let d = Matrix::from_fn(n, |i, j| if i == j { spectrum.values()[pi.image(i)] } else { 0.0 });

    let (q, y) = if symmetric {
        // orthonormal eigenrows make the LQ step trivial: Y vanishes exactly
        (xpos, Matrix::zeros(n))
    } else {
        let (ltilde, q) = lq_pos(&xpos)?;
        let b = solve_lower(&ltilde, &(&d * &ltilde))?;
        (q, project_strict_lower(&b))
    };

    let (l, _u) = lu_unit(&q).map_err(|e| match e {
        Error::ZeroMinor(k) => Error::NotInChart { pi: pi.clone(), minor: k },
        other => other,
    })?;
    let b = solve_unit_lower(&l, &(&(&y + &d) * &l));
    let z = project_strict_lower(&b);
    let point = ChartPoint { pi: pi.clone(), spectrum, y, z };
    Ok((point, q))
}

/// Greedy row sign fix against the chart membership tolerance.
fn sign_fix_for_chart(xp: &Matrix, pi: &Permutation) -> Result<Matrix> {
    let n = xp.n();
    let minors = leading_minors(xp);
    let mut signs = vec![1.0; n];
    let mut sigma = 1.0;
    let mut hadamard = 1.0;
    for k in 0..n {
        hadamard *= xp.row_norm(k);
        if minors[k].abs() <= CHART_MINOR_TOL * hadamard {
            return Err(Error::NotInChart { pi: pi.clone(), minor: k + 1 });
        }
        if sigma * minors[k] < 0.0 {
            signs[k] = -1.0;
            sigma = -sigma;
        }
    }
    Ok(Matrix::from_fn(n, |i, j| signs[i] * xp[(i, j)]))
}

/// The unique unit lower triangular L with L (Z + D) = (Y + D) L.
///
/// Entries are determined subdiagonal by subdiagonal; the divisor for entry
/// (i, j) is lambda_{pi(j)} - lambda_{pi(i)}, nonzero by simplicity.
pub fn solve_conjugator(point: &ChartPoint) -> Matrix {
    let n = point.n();
    let a = point.z_plus_d();
    let b = point.y_plus_d();
    let mut l = Matrix::identity(n);
    for s in 1..n {
        for i in s..n {
            let j = i - s;
            let mut acc = b[(i, j)] - a[(i, j)];
            for k in j + 1..i {
                acc += b[(i, k)] * l[(k, j)] - l[(i, k)] * a[(k, j)];
            }
            l[(i, j)] = acc / (point.lambda(j) - point.lambda(i));
        }
    }
    l
}

/// The matrix with the given chart coordinates: Q^T (Y + D) Q for the
/// orthogonal factor Q of the conjugator.
pub fn chart_reconstruct(point: &ChartPoint) -> Result<Matrix> {
    let l = solve_conjugator(point);
    let (q, _r) = qr_pos(&l)?;
    Ok(&q.transpose() * &(&point.y_plus_d() * &q))
}

/// Frames Q, L, U of the point: M = Q^T (Y + D) Q = U^{-1} (Z + D) U, Q = L U.
pub fn chart_frames(point: &ChartPoint) -> Result<ChartFrames> {
    let l = solve_conjugator(point);
    let (q, r) = qr_pos(&l)?;
    let u = invert_upper(&r)?;
    Ok(ChartFrames { q, l, u })
}

/// All permutations whose chart contains M, in lexicographic order.
pub fn charts_containing(m: &Matrix) -> Result<Vec<Permutation>> {
    let n = m.n();
    let (_, x) = real_eigen(m)?;
    let mut out = Vec::new();
    'next: for pi in Permutation::all(n) {
        let xp = Matrix::from_fn(n, |i, j| x[(pi.image(i), j)]);
        let minors = leading_minors(&xp);
        let mut hadamard = 1.0;
        for k in 0..n {
            hadamard *= xp.row_norm(k);
            if minors[k].abs() <= CHART_MINOR_TOL * hadamard {
                continue 'next;
            }
        }
        out.push(pi);
    }
    Ok(out)
}

/// The three components of a tangent vector at a chart point:
/// Mdot = Q^T (diag(d_dot) + y_dot) Q + [M, a] with a skew-symmetric.
#[derive(Clone, Debug)]
pub struct TangentSplit {
    pub d_dot: Vec<f64>,
    pub y_dot: Matrix,
    pub a: Matrix,
}

/// Splits a tangent vector into spectrum motion, Y motion, and an
/// infinitesimal isospectral rotation.
///
/// Conjugating by Q reduces the problem to N = diag + lower + [Y + D, B]
/// with B skew; the strictly upper part of N pins B one superdiagonal at a
/// time, outermost first.
pub fn split_tangent(point: &ChartPoint, mdot: &Matrix) -> Result<TangentSplit> {
    let n = point.n();
    if mdot.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mdot.n() });
    }
    let frames = chart_frames(point)?;
    let q = &frames.q;
    let nmat = &(q * mdot) * &q.transpose();
    let t = point.y_plus_d();
    let mut b = Matrix::zeros(n);
    for s in (1..n).rev() {
        for i in 0..n - s {
            let j = i + s;
            let mut acc = nmat[(i, j)];
            for k in 0..i {
                acc -= t[(i, k)] * b[(k, j)];
            }
            for k in j + 1..n {
                acc += b[(i, k)] * t[(k, j)];
            }
            let v = acc / (point.lambda(i) - point.lambda(j));
            b[(i, j)] = v;
            b[(j, i)] = -v;
        }
    }
    let rest = &nmat - &t.commutator(&b);
    let a = &q.transpose() * &(&b * q);
    Ok(TangentSplit { d_dot: rest.diag(), y_dot: project_strict_lower(&rest), a })
}

/// Up-right-closed support pattern for lower triangular coordinates.
///
/// Row i allows columns j >= min_col[i]; min_col is nondecreasing and never
/// exceeds the diagonal. Indices are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    min_col: Vec<usize>,
}

impl Profile {
    /// Smallest up-right-closed profile containing the seed pairs (i, j),
    /// i >= j, plus the diagonal.
    pub fn generate(n: usize, seed: &[(usize, usize)]) -> Result<Profile> {
        for &(i, j) in seed {
            if i >= n || j > i {
                return Err(Error::DimensionMismatch { expected: n, found: i.max(j) });
            }
        }
        let mut min_col = vec![0usize; n];
        let mut best = usize::MAX;
        for i in (0..n).rev() {
            best = best.min(i); // the diagonal pair (i, i)
            for &(si, sj) in seed {
                if si == i {
                    best = best.min(sj);
                }
            }
            min_col[i] = best;
        }
        Ok(Profile { min_col })
    }

    /// The profile of tridiagonal matrices.
    pub fn tridiagonal(n: usize) -> Profile {
        let seed: Vec<(usize, usize)> = (1..n).map(|i| (i, i - 1)).collect();
        Profile::generate(n, &seed).expect("hessenberg seed is valid")
    }

    /// The unrestricted profile.
    pub fn full(n: usize) -> Profile {
        Profile { min_col: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.min_col.len()
    }

    pub fn min_col(&self) -> &[usize] {
        &self.min_col
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        j >= self.min_col[i]
    }

    /// Largest absolute entry of m outside the profile.
    pub fn violation(&self, m: &Matrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n() {
            for j in 0..self.min_col[i] {
                worst = worst.max(m[(i, j)].abs());
            }
        }
        worst
    }

    /// All entries outside the profile vanish to within tol.
    pub fn member(&self, m: &Matrix, tol: f64) -> bool {
        self.violation(m) <= tol
    }

    /// Copy of m with off-profile entries forced to zero.
    pub fn zero_outside(&self, m: &Matrix) -> Matrix {
        Matrix::from_fn(m.n(), |i, j| if j < self.min_col[i] { 0.0 } else { m[(i, j)] })
    }
}

/// True when the point is a Jacobi matrix in chart coordinates: Y = 0, Z
/// supported on the first subdiagonal with positive entries.
pub fn jacobi_detect(point: &ChartPoint) -> bool {
    let n = point.n();
    let tol = JACOBI_TOL * point.z().max_abs().max(1.0);
    if point.y().max_abs() > tol {
        return false;
    }
    let z = point.z();
    for i in 0..n {
        for j in 0..i {
            if j + 1 == i {
                if z[(i, j)] <= tol {
                    return false;
                }
            } else if z[(i, j)].abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Spectral data of a Jacobi matrix: eigenvalues plus the positive first
/// coordinates of its normalized eigenvectors.
#[derive(Clone, Debug)]
pub struct MoserData {
    spectrum: Spectrum,
    weights: Vec<f64>,
}

impl MoserData {
    /// Weights are normalized to unit 2-norm; they must be strictly positive.
    pub fn new(spectrum: Spectrum, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != spectrum.n() {
            return Err(Error::DimensionMismatch { expected: spectrum.n(), found: weights.len() });
        }
        if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(Error::NonpositiveWeight);
        }
        let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        let weights = weights.iter().map(|w| w / norm).collect();
        Ok(MoserData { spectrum, weights })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// The unique Jacobi matrix with the given spectral data.
///
/// Orthogonalizing the Krylov frame (c, Dc, D^2 c, ...) gives V = Q R; then
/// J = Q^T D Q is symmetric tridiagonal with positive subdiagonal, and the
/// first column of Q is c itself.
pub fn jacobi_from_moser(data: &MoserData) -> Result<Matrix> {
    let n = data.spectrum.n();
    let lam = data.spectrum.values();
    let v = Matrix::from_fn(n, |i, j| data.weights[i] * lam[i].powi(j as i32));
    let (q, _r) = qr_pos(&v)?;
    let j = &q.transpose() * &(&Matrix::diagonal(lam) * &q);
    Ok(symmetrize(&j))
}
