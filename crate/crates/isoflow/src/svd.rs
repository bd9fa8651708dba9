//! Singular value flows, linearized through the two symmetric squares.
//!
//! A matrix M with distinct positive singular values carries two symmetric
//! companions, M M^T and M^T M, sharing the spectrum sigma^2. Putting each
//! in a chart (permutations pi and rho) determines M up to one extra sign
//! diagonal E:
//!
//!   M = Q_pi^T P_pi^T  Sigma E  P_rho Q_rho
//!
//! with Sigma the singular values in natural (decreasing) order and P the
//! permutation matrices. Under the flow
//!
//!   Mdot = M pi_o(p(M^T M)) - pi_o(q(M M^T)) M
//!
//! the left square runs the q-Toda flow and the right square the p-Toda
//! flow, so both Z coordinates move by explicit exponentials while sigma
//! and E stand still.

use crate::charts::{chart_decompose_with_frame, chart_frames, charts_containing, ChartPoint};
use crate::error::{Error, Result};
use crate::linalg::{project_skew, real_eigen, symmetrize};
use crate::matrix::{Matrix, Permutation, SignDiagonal, Spectrum, DEFAULT_GAP_TOLERANCE};
use crate::toda::{integrate_piecewise, toda_exact, ScalarFunction, Trajectory};

/// Relative residual allowed between the extracted middle factor and
/// Sigma E before the pair of charts is declared inconsistent.
const MIDDLE_TOL: f64 = 1e-8;

/// Chart enumeration walks (n!)^2 pairs; past this size it refuses.
pub const MAX_SVD_ENUMERATION: usize = 4;

/// Chart coordinates of a matrix with distinct positive singular values:
/// two permutations, the singular values, a sign diagonal, and the Z
/// coordinates of the two symmetric squares (whose Y coordinates vanish).
#[derive(Clone, Debug)]
pub struct SvdChartPoint {
    pi: Permutation,
    rho: Permutation,
    sigma: Vec<f64>,
    e: SignDiagonal,
    z_left: Matrix,
    z_right: Matrix,
}

impl SvdChartPoint {
    pub fn new(
        pi: Permutation,
        rho: Permutation,
        sigma: Vec<f64>,
        e: SignDiagonal,
        z_left: Matrix,
        z_right: Matrix,
    ) -> Result<Self> {
        let n = sigma.len();
        for found in [pi.n(), rho.n(), e.n(), z_left.n(), z_right.n()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        check_sigma(&sigma)?;
        for m in [&z_left, &z_right] {
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
        Ok(SvdChartPoint { pi, rho, sigma, e, z_left, z_right })
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn rho(&self) -> &Permutation {
        &self.rho
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn e(&self) -> &SignDiagonal {
        &self.e
    }

    pub fn z_left(&self) -> &Matrix {
        &self.z_left
    }

    pub fn z_right(&self) -> &Matrix {
        &self.z_right
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    /// Eigenvalues sigma^2 shared by the two symmetric squares.
    pub fn mu(&self) -> Vec<f64> {
        self.sigma.iter().map(|s| s * s).collect()
    }

    /// The chart point of M M^T in the chart of pi.
    pub fn left_point(&self) -> Result<ChartPoint> {
        let n = self.n();
        ChartPoint::new(
            self.pi.clone(),
            Spectrum::new(self.mu())?,
            Matrix::zeros(n),
            self.z_left.clone(),
        )
    }

    /// The chart point of M^T M in the chart of rho.
    pub fn right_point(&self) -> Result<ChartPoint> {
        let n = self.n();
        ChartPoint::new(
            self.rho.clone(),
            Spectrum::new(self.mu())?,
            Matrix::zeros(n),
            self.z_right.clone(),
        )
    }
}

fn check_sigma(sigma: &[f64]) -> Result<()> {
    for &s in sigma {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::NonpositiveSpectrum { value: s });
        }
    }
    for k in 0..sigma.len().saturating_sub(1) {
        let gap = sigma[k] - sigma[k + 1];
        if gap <= DEFAULT_GAP_TOLERANCE * sigma[k].abs().max(1.0) {
            return Err(Error::DegenerateSingularValues { index: k + 1, gap });
        }
    }
    Ok(())
}

fn sigma_from_mu(mu: &[f64]) -> Result<Vec<f64>> {
    for &v in mu {
        if v <= 0.0 {
            return Err(Error::SingularInput);
        }
    }
    let sigma: Vec<f64> = mu.iter().map(|v| v.sqrt()).collect();
    check_sigma(&sigma)?;
    Ok(sigma)
}

/// Sigma E as a matrix, the asymptotic shape of the flow when both charts
/// are the identity.
pub fn middle_factor(point: &SvdChartPoint) -> Matrix {
    Matrix::from_fn(point.n(), |i, j| if i == j { point.sigma[i] * point.e.sign(i) } else { 0.0 })
}

/// Coordinates of M in the pair of charts (pi, rho).
pub fn svd_chart_decompose(
    m: &Matrix,
    pi: &Permutation,
    rho: &Permutation,
) -> Result<SvdChartPoint> {
    let n = m.n();
    if pi.n() != n || rho.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: pi.n().max(rho.n()) });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let not_in = || Error::NotInSvdChart { pi: pi.clone(), rho: rho.clone() };
    let remap = |e: Error| match e {
        Error::NotInChart { .. } => not_in(),
        other => other,
    };
    let w_left = symmetrize(&(m * &m.transpose()));
    let w_right = symmetrize(&(&m.transpose() * m));
    let (left, q_pi) = chart_decompose_with_frame(&w_left, pi).map_err(remap)?;
    let (right, q_rho) = chart_decompose_with_frame(&w_right, rho).map_err(remap)?;
    let sigma = sigma_from_mu(left.spectrum().values())?;

    let p_pi = pi.matrix();
    let p_rho = rho.matrix();
    let mid = &(&(&p_pi * &q_pi) * m) * &(&q_rho.transpose() * &p_rho.transpose());
    let signs: Vec<f64> = (0..n).map(|i| if mid[(i, i)] < 0.0 { -1.0 } else { 1.0 }).collect();
    let e = SignDiagonal::from_signs(&signs)?;
    let expected = Matrix::from_fn(n, |i, j| if i == j { sigma[i] * signs[i] } else { 0.0 });
    if (&mid - &expected).max_abs() > MIDDLE_TOL * sigma[0].max(1.0) {
        return Err(not_in());
    }
    Ok(SvdChartPoint {
        pi: pi.clone(),
        rho: rho.clone(),
        sigma,
        e,
        z_left: left.z().clone(),
        z_right: right.z().clone(),
    })
}

/// The matrix with the given coordinates.
pub fn svd_chart_reconstruct(point: &SvdChartPoint) -> Result<Matrix> {
    let q_pi = chart_frames(&point.left_point()?)?.q;
    let q_rho = chart_frames(&point.right_point()?)?.q;
    let p_pi = point.pi.matrix();
    let p_rho = point.rho.matrix();
    let left = &q_pi.transpose() * &p_pi.transpose();
    let right = &(&middle_factor(point) * &p_rho) * &q_rho;
    Ok(&left * &right)
}

/// All chart pairs containing M. The two squares admit charts independently,
/// so the answer is the product of the two lists.
pub fn svd_charts_containing(m: &Matrix) -> Result<Vec<(Permutation, Permutation)>> {
    let n = m.n();
    if n > MAX_SVD_ENUMERATION {
        return Err(Error::UnsupportedDimension { n, max: MAX_SVD_ENUMERATION });
    }
    let w_left = symmetrize(&(m * &m.transpose()));
    let w_right = symmetrize(&(&m.transpose() * m));
    let (mu, _) = real_eigen(&w_left)?;
    sigma_from_mu(mu.values())?;
    let lefts = charts_containing(&w_left)?;
    let rights = charts_containing(&w_right)?;
    let mut out = Vec::with_capacity(lefts.len() * rights.len());
    for pi in &lefts {
        for rho in &rights {
            out.push((pi.clone(), rho.clone()));
        }
    }
    Ok(out)
}

/// Right hand side of the singular value flow at time s.
pub fn svd_rhs(m: &Matrix, p: &ScalarFunction, q: &ScalarFunction, s: f64) -> Result<Matrix> {
    let w_left = symmetrize(&(m * &m.transpose()));
    let w_right = symmetrize(&(&m.transpose() * m));
    let a = m * &project_skew(&p.of_matrix_at(&w_right, s)?);
    let b = &project_skew(&q.of_matrix_at(&w_left, s)?) * m;
    Ok(&a - &b)
}

/// Runge-Kutta integration of the singular value flow, the numerical referee
/// for `svd_exact`.
pub fn svd_lax_integrate(
    m0: &Matrix,
    p: &ScalarFunction,
    q: &ScalarFunction,
    t: f64,
    h: f64,
) -> Result<Trajectory> {
    integrate_piecewise(m0, &[p, q], t, h, |m, fns| svd_rhs(m, &fns[0], &fns[1], 0.0))
}

/// Exact evolution in chart coordinates: the left square follows the q-Toda
/// flow, the right square the p-Toda flow, both on the spectrum sigma^2;
/// sigma and E do not move.
pub fn svd_exact(
    point: &SvdChartPoint,
    p: &ScalarFunction,
    q: &ScalarFunction,
    t: f64,
) -> Result<SvdChartPoint> {
    let left = toda_exact(&point.left_point()?, q, t)?;
    let right = toda_exact(&point.right_point()?, p, t)?;
    Ok(SvdChartPoint {
        pi: point.pi.clone(),
        rho: point.rho.clone(),
        sigma: point.sigma.clone(),
        e: point.e.clone(),
        z_left: left.z().clone(),
        z_right: right.z().clone(),
    })
}
