//! Real eigendecomposition with left eigenvectors.
//!
//! Symmetric inputs go through Householder tridiagonalization and implicit
//! Wilkinson-shift QL, which yields an orthonormal eigenvector frame. General
//! inputs are reduced to Hessenberg form and run through implicit
//! double-shift QR (the shift pair is the trailing 2x2's spectrum); left
//! eigenvectors are then recovered by two steps of inverse iteration on the
//! shifted transpose with a Rayleigh-quotient update in between.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Spectrum, DEFAULT_GAP_TOLERANCE};

/// Eigendecomposition of a matrix with real simple spectrum.
///
/// Returns the spectrum in strictly decreasing order together with the frame
/// X of unit-norm left eigenvector rows: X M = D X. Row signs are fixed so
/// the largest-magnitude entry of each row is positive.
pub fn real_eigen(m: &Matrix) -> Result<(Spectrum, Matrix)> {
    real_eigen_with_tolerance(m, DEFAULT_GAP_TOLERANCE)
}

/// `real_eigen` with a caller-chosen relative gap tolerance.
pub fn real_eigen_with_tolerance(m: &Matrix, gap_tolerance: f64) -> Result<(Spectrum, Matrix)> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = m.max_abs().max(1.0);
    if m.is_symmetric(1e-12 * scale) {
        let (vals, x) = sym_eigen(m)?;
        let spectrum = Spectrum::with_gap_tolerance(vals, gap_tolerance)?;
        return Ok((spectrum, x));
    }
    let h = hessenberg(m);
    let eigvals = hessenberg_eigenvalues(&h)?;
    let imag_tol = 1e-8 * m.norm_fro().max(1.0);
    for &(_, im) in &eigvals {
        if im.abs() > imag_tol {
            return Err(Error::ComplexSpectrum { imag: im });
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> =
        eigvals.iter().enumerate().map(|(k, &(re, _))| left_eigenvector(m, re, k)).collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let spectrum = Spectrum::with_gap_tolerance(values, gap_tolerance)?;
    let n = m.n();
    let mut x = Matrix::zeros(n);
    for (i, (_, v)) in pairs.iter().enumerate() {
        for j in 0..n {
            x[(i, j)] = v[j];
        }
    }
    canonicalize_row_signs(&mut x);
    Ok((spectrum, x))
}

/// Spectral decomposition of a symmetric matrix, repeated eigenvalues
/// allowed. Returns eigenvalues in decreasing order and an orthogonal frame
/// of unit eigenvector rows with M = X^T D X (equivalently X M = D X).
pub fn sym_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = m.n();
    if n == 1 {
        return Ok((vec![m[(0, 0)]], Matrix::identity(1)));
    }
    let (mut z, mut d, mut e) = tridiagonalize(m);
    tql_implicit(&mut d, &mut e, &mut z)?;
    // sort eigenpairs by eigenvalue, largest first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut x = Matrix::zeros(n);
    for (row, &col) in order.iter().enumerate() {
        for k in 0..n {
            x[(row, k)] = z[(k, col)];
        }
    }
    canonicalize_row_signs(&mut x);
    Ok((values, x))
}

/// Makes the largest-magnitude entry of every row positive (first index wins
/// ties), and scales rows to unit norm. Keeps eigenframes deterministic.
fn canonicalize_row_signs(x: &mut Matrix) {
    let n = x.n();
    for i in 0..n {
        let norm = x.row_norm(i);
        let mut lead = 0;
        for j in 1..n {
            if x[(i, j)].abs() > x[(i, lead)].abs() {
                lead = j;
            }
        }
        let s = if x[(i, lead)] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            x[(i, j)] *= s / norm;
        }
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// accumulating the transform: M = Z T Z^T. Returns (Z, diag, subdiag);
/// subdiag[i] couples rows i-1 and i, subdiag[0] is unused.
fn tridiagonalize(m: &Matrix) -> (Matrix, Vec<f64>, Vec<f64>) {
    let n = m.n();
    let mut t = m.clone();
    let mut z = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| t[(i, k)] * t[(i, k)]).sum();
        if tail == 0.0 {
            continue; // column already in tridiagonal shape
        }
        let norm = (t[(k + 1, k)] * t[(k + 1, k)] + tail).sqrt();
        let mut v = vec![0.0; n];
        for i in k + 1..n {
            v[i] = t[(i, k)];
        }
        v[k + 1] += if v[k + 1] >= 0.0 { norm } else { -norm };
        let vn2: f64 = v.iter().map(|x| x * x).sum();
        house_left(&mut t, &v, vn2);
        house_right(&mut t, &v, vn2);
        house_right(&mut z, &v, vn2);
        for i in k + 2..n {
            t[(i, k)] = 0.0;
            t[(k, i)] = 0.0;
        }
    }
    let d: Vec<f64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut e = vec![0.0; n];
    for i in 1..n {
        e[i] = t[(i, i - 1)];
    }
    (z, d, e)
}

fn house_left(m: &mut Matrix, v: &[f64], vn2: f64) {
    let n = m.n();
    for j in 0..n {
        let mut dot = 0.0;
        for i in 0..n {
            dot += v[i] * m[(i, j)];
        }
        let f = 2.0 * dot / vn2;
        if f == 0.0 {
            continue;
        }
        for i in 0..n {
            if v[i] != 0.0 {
                m[(i, j)] -= f * v[i];
            }
        }
    }
}

fn house_right(m: &mut Matrix, v: &[f64], vn2: f64) {
    let n = m.n();
    for i in 0..n {
        let mut dot = 0.0;
        for j in 0..n {
            dot += m[(i, j)] * v[j];
        }
        let f = 2.0 * dot / vn2;
        if f == 0.0 {
            continue;
        }
        for j in 0..n {
            if v[j] != 0.0 {
                m[(i, j)] -= f * v[j];
            }
        }
    }
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix,
/// rotating the columns of `z` along. On return `d` holds eigenvalues and
/// column j of `z` is the eigenvector for d[j].
fn tql_implicit(d: &mut [f64], e: &mut [f64], z: &mut Matrix) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::IterationLimit { op: "symmetric QL" });
            }
            // Wilkinson shift from the leading 2x2 of the active block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut early = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Householder reduction to upper Hessenberg form (transform not kept).
fn hessenberg(m: &Matrix) -> Matrix {
    let n = m.n();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| h[(i, k)] * h[(i, k)]).sum();
        if tail == 0.0 {
            continue;
        }
        let norm = (h[(k + 1, k)] * h[(k + 1, k)] + tail).sqrt();
        let mut v = vec![0.0; n];
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] += if v[k + 1] >= 0.0 { norm } else { -norm };
        let vn2: f64 = v.iter().map(|x| x * x).sum();
        house_left(&mut h, &v, vn2);
        house_right(&mut h, &v, vn2);
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    h
}

/// Eigenvalues of an upper Hessenberg matrix by implicit double-shift QR.
/// Returns (re, im) pairs in deflation order.
fn hessenberg_eigenvalues(h0: &Matrix) -> Result<Vec<(f64, f64)>> {
    let nn = h0.n();
    let mut h = h0.clone();
    if nn == 1 {
        return Ok(vec![(h[(0, 0)], 0.0)]);
    }
    let scale = h.norm_fro().max(f64::MIN_POSITIVE);
    let mut vals: Vec<(f64, f64)> = Vec::with_capacity(nn);
    let mut hi = nn - 1;
    let mut iter_block = 0usize;
    'outer: loop {
        // scan upward for a negligible subdiagonal bounding the active block
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].abs() + h[(lo, lo)].abs();
            let s = if s == 0.0 { scale } else { s };
            if h[(lo, lo - 1)].abs() <= f64::EPSILON * s {
                h[(lo, lo - 1)] = 0.0;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            vals.push((h[(hi, hi)], 0.0));
            if hi == 0 {
                break 'outer;
            }
            hi -= 1;
            iter_block = 0;
            continue;
        }
        if lo + 1 == hi {
            let (a, b) = (h[(lo, lo)], h[(lo, hi)]);
            let (c, d) = (h[(hi, lo)], h[(hi, hi)]);
            let half_tr = 0.5 * (a + d);
            let det = a * d - b * c;
            let disc = half_tr * half_tr - det;
            if disc >= 0.0 {
                let r = disc.sqrt();
                let l1 = if half_tr >= 0.0 { half_tr + r } else { half_tr - r };
                let l2 = if l1 != 0.0 { det / l1 } else { 0.0 };
                vals.push((l1, 0.0));
                vals.push((l2, 0.0));
            } else {
                let im = (-disc).sqrt();
                vals.push((half_tr, im));
                vals.push((half_tr, -im));
            }
            if lo == 0 {
                break 'outer;
            }
            hi = lo - 1;
            iter_block = 0;
            continue;
        }

        iter_block += 1;
        if iter_block > 60 {
            return Err(Error::IterationLimit { op: "shifted QR iteration" });
        }
        let m1 = hi - 1;
        // shift pair: spectrum of the trailing 2x2, with an occasional
        // exceptional shift to break rare cycles
        let (s_tr, s_det) = if iter_block.is_multiple_of(11) {
            let aux = h[(hi, m1)].abs() + h[(m1, m1 - 1)].abs();
            (1.5 * aux, aux * aux)
        } else {
            (h[(m1, m1)] + h[(hi, hi)], h[(m1, m1)] * h[(hi, hi)] - h[(m1, hi)] * h[(hi, m1)])
        };
        // first column of (H - aI)(H - bI) on the active block
        let mut p = h[(lo, lo)] * h[(lo, lo)] + h[(lo, lo + 1)] * h[(lo + 1, lo)]
            - s_tr * h[(lo, lo)]
            + s_det;
        let mut q = h[(lo + 1, lo)] * (h[(lo, lo)] + h[(lo + 1, lo + 1)] - s_tr);
        let mut r = h[(lo + 2, lo + 1)] * h[(lo + 1, lo)];
        let bulge_scale = p.abs() + q.abs() + r.abs();
        if bulge_scale != 0.0 {
            p /= bulge_scale;
            q /= bulge_scale;
            r /= bulge_scale;
        }
        for k in lo..hi {
            let notlast = k != hi - 1;
            let xs;
            if k != lo {
                p = h[(k, k - 1)];
                q = h[(k + 1, k - 1)];
                r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                xs = p.abs() + q.abs() + r.abs();
                if xs == 0.0 {
                    continue;
                }
                p /= xs;
                q /= xs;
                r /= xs;
            } else {
                xs = 1.0;
            }
            let mut s = (p * p + q * q + r * r).sqrt();
            if p < 0.0 {
                s = -s;
            }
            if s == 0.0 {
                continue;
            }
            if k != lo {
                h[(k, k - 1)] = -s * xs;
                h[(k + 1, k - 1)] = 0.0;
                if notlast {
                    h[(k + 2, k - 1)] = 0.0;
                }
            }
            p += s;
            let x = p / s;
            let y = q / s;
            let z = r / s;
            let q2 = q / p;
            let r2 = r / p;
            for j in k..nn {
                let mut pp = h[(k, j)] + q2 * h[(k + 1, j)];
                if notlast {
                    pp += r2 * h[(k + 2, j)];
                    h[(k + 2, j)] -= pp * z;
                }
                h[(k, j)] -= pp * x;
                h[(k + 1, j)] -= pp * y;
            }
            let imax = hi.min(k + 3);
            for i in 0..=imax {
                let mut pp = x * h[(i, k)] + y * h[(i, k + 1)];
                if notlast {
                    pp += z * h[(i, k + 2)];
                    h[(i, k + 2)] -= pp * r2;
                }
                h[(i, k)] -= pp;
                h[(i, k + 1)] -= pp * q2;
            }
        }
    }
    Ok(vals)
}

/// Left eigenvector for an isolated real eigenvalue: two inverse-iteration
/// solves on (M - lambda I)^T with a Rayleigh-quotient update in between,
/// plus a few extra solves if the residual has not settled.
fn left_eigenvector(m: &Matrix, lambda0: f64, k: usize) -> (f64, Vec<f64>) {
    let n = m.n();
    let mt = m.transpose();
    let scale = m.norm_fro().max(1.0);
    let floor = f64::EPSILON * scale;
    let shifted = |lam: f64| {
        let mut a = mt.clone();
        for i in 0..n {
            a[(i, i)] -= lam;
        }
        a
    };
    // deterministic start with irrational strides: effectively never lies in
    // a proper invariant subspace
    let mut v: Vec<f64> = (0..n)
        .map(|j| 0.5 + ((j + 1) as f64 * 0.754877666 + (k + 1) as f64 * 0.569840291).fract())
        .collect();
    normalize(&mut v);

    v = crate::linalg::solve_floored(&shifted(lambda0), &v, floor);
    normalize(&mut v);
    let mut lam = rayleigh_left(&mt, &v);
    v = crate::linalg::solve_floored(&shifted(lam), &v, floor);
    normalize(&mut v);
    lam = rayleigh_left(&mt, &v);

    let mut best = (residual_left(&mt, lam, &v), lam, v.clone());
    for _ in 0..3 {
        if best.0 <= 1e-11 * scale {
            break;
        }
        v = crate::linalg::solve_floored(&shifted(lam), &v, floor);
        normalize(&mut v);
        lam = rayleigh_left(&mt, &v);
        let res = residual_left(&mt, lam, &v);
        if res < best.0 {
            best = (res, lam, v.clone());
        }
    }
    (best.1, best.2)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Rayleigh quotient v^T M^T v for a unit left-eigenvector candidate v.
fn rayleigh_left(mt: &Matrix, v: &[f64]) -> f64 {
    let n = mt.n();
    let mut acc = 0.0;
    for i in 0..n {
        let mut wi = 0.0;
        for j in 0..n {
            wi += mt[(i, j)] * v[j];
        }
        acc += v[i] * wi;
    }
    acc
}

/// || M^T v - lambda v ||_2 for unit v.
fn residual_left(mt: &Matrix, lambda: f64, v: &[f64]) -> f64 {
    let n = mt.n();
    let mut acc = 0.0;
    for i in 0..n {
        let mut wi = -lambda * v[i];
        for j in 0..n {
            wi += mt[(i, j)] * v[j];
        }
        acc += wi * wi;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve;

    fn residual(m: &Matrix, spectrum: &Spectrum, x: &Matrix) -> f64 {
        let d = Matrix::diagonal(spectrum.values());
        (&(x * m) - &(&d * x)).max_abs()
    }

    #[test]
    fn diagonal_matrix_is_its_own_frame() {
        let m = Matrix::diagonal(&[7.0, 5.0, 4.0]);
        let (spectrum, x) = real_eigen(&m).unwrap();
        assert_eq!(spectrum.values(), &[7.0, 5.0, 4.0]);
        assert!((&x - &Matrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn unordered_diagonal_gets_sorted() {
        let m = Matrix::diagonal(&[4.0, 7.0, 5.0]);
        let (spectrum, x) = real_eigen(&m).unwrap();
        assert_eq!(spectrum.values(), &[7.0, 5.0, 4.0]);
        // rows are the eigenvectors in spectral order: e2, e3, e1
        assert_eq!(x[(0, 1)], 1.0);
        assert_eq!(x[(1, 2)], 1.0);
        assert_eq!(x[(2, 0)], 1.0);
    }

    #[test]
    fn symmetric_2x2_hand_values() {
        let m = Matrix::from_rows(&[vec![5.0, 1.0], vec![1.0, 5.0]]).unwrap();
        let (spectrum, x) = real_eigen(&m).unwrap();
        assert!((spectrum.values()[0] - 6.0).abs() < 1e-12);
        assert!((spectrum.values()[1] - 4.0).abs() < 1e-12);
        let s = 1.0 / 2.0f64.sqrt();
        // eigenvector rows: (1,1)/sqrt2 for 6, (1,-1)/sqrt2 for 4 up to sign
        assert!((x[(0, 0)] - s).abs() < 1e-12 && (x[(0, 1)] - s).abs() < 1e-12);
        assert!((x[(1, 0)] - s).abs() < 1e-12 && (x[(1, 1)] + s).abs() < 1e-12);
        assert!(residual(&m, &spectrum, &x) < 1e-13);
    }

    #[test]
    fn symmetric_frame_is_orthogonal() {
        let m = Matrix::from_rows(&[
            vec![4.0, 1.0, -0.5, 0.2],
            vec![1.0, 2.0, 0.3, -0.1],
            vec![-0.5, 0.3, -1.0, 0.6],
            vec![0.2, -0.1, 0.6, -3.0],
        ])
        .unwrap();
        let (spectrum, x) = real_eigen(&m).unwrap();
        assert!((&(&x * &x.transpose()) - &Matrix::identity(4)).max_abs() < 1e-13);
        assert!(residual(&m, &spectrum, &x) < 1e-12);
    }

    #[test]
    fn general_3x3_with_known_spectrum() {
        // similarity of diag(3,1,-2) by a unit lower triangular matrix
        let l =
            Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![2.0, 1.0, 0.0], vec![-1.0, 0.5, 1.0]])
                .unwrap();
        let d = Matrix::diagonal(&[3.0, 1.0, -2.0]);
        let m = solve(&l, &(&d * &l)).unwrap(); // L^{-1} D L
        let (spectrum, x) = real_eigen(&m).unwrap();
        assert!((spectrum.values()[0] - 3.0).abs() < 1e-10);
        assert!((spectrum.values()[1] - 1.0).abs() < 1e-10);
        assert!((spectrum.values()[2] + 2.0).abs() < 1e-10);
        assert!(residual(&m, &spectrum, &x) < 1e-11);
    }

    #[test]
    fn reconstruction_through_left_frame() {
        let m = Matrix::from_rows(&[
            vec![1.0, 2.0, 0.4, -0.3],
            vec![0.1, -2.0, 1.0, 0.8],
            vec![0.0, 0.5, 4.0, -1.2],
            vec![0.2, 0.0, 0.3, -4.5],
        ])
        .unwrap();
        let (spectrum, x) = real_eigen(&m).unwrap();
        // X M = D X  =>  M = X^{-1} (D X)
        let rebuilt = solve(&x, &(&Matrix::diagonal(spectrum.values()) * &x)).unwrap();
        let rel = (&rebuilt - &m).max_abs() / m.max_abs();
        assert!(rel < 1e-9, "relative reconstruction error {rel:.3e}");
    }

    #[test]
    fn rotation_has_complex_spectrum() {
        let (c, s) = (0.6, 0.8);
        let m = Matrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap();
        assert!(matches!(real_eigen(&m), Err(Error::ComplexSpectrum { .. })));
    }

    #[test]
    fn rotation_block_inside_larger_matrix_is_detected() {
        let m =
            Matrix::from_rows(&[vec![3.0, 1.0, 0.5], vec![0.0, 0.6, -0.8], vec![0.0, 0.8, 0.6]])
                .unwrap();
        assert!(matches!(real_eigen(&m), Err(Error::ComplexSpectrum { .. })));
    }

    #[test]
    fn repeated_eigenvalue_is_degenerate() {
        let m = Matrix::diagonal(&[2.0, 2.0, 1.0]);
        assert!(matches!(real_eigen(&m), Err(Error::DegenerateSpectrum { index: 1, .. })));
    }

    #[test]
    fn gap_tolerance_is_configurable() {
        let m = Matrix::diagonal(&[1.0 + 2e-7, 1.0]);
        assert!(real_eigen(&m).is_ok());
        assert!(matches!(
            real_eigen_with_tolerance(&m, 1e-3),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn jacobi_matrix_spectrum_is_simple_and_real() {
        // positive subdiagonal tridiagonal matrices always have simple spectrum
        let m = Matrix::from_rows(&[
            vec![1.0, 0.7, 0.0, 0.0],
            vec![0.7, 2.0, 0.4, 0.0],
            vec![0.0, 0.4, 3.0, 0.9],
            vec![0.0, 0.0, 0.9, 4.0],
        ])
        .unwrap();
        let (spectrum, x) = real_eigen(&m).unwrap();
        assert_eq!(spectrum.n(), 4);
        assert!(residual(&m, &spectrum, &x) < 1e-12);
    }

    #[test]
    fn sym_eigen_handles_repeated_eigenvalues() {
        let (vals, x) = sym_eigen(&Matrix::identity(3)).unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
        assert!((&(&x * &x.transpose()) - &Matrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn upper_triangular_left_frame_is_upper_triangular() {
        // left eigenvectors of an upper triangular matrix with decreasing
        // diagonal form an upper triangular frame (this is what makes such
        // matrices land in the identity chart with Z = 0)
        let m =
            Matrix::from_rows(&[vec![5.0, 1.0, 2.0], vec![0.0, 3.0, -1.0], vec![0.0, 0.0, 1.0]])
                .unwrap();
        let (spectrum, x) = real_eigen(&m).unwrap();
        assert!((spectrum.values()[0] - 5.0).abs() < 1e-10);
        assert!((spectrum.values()[2] - 1.0).abs() < 1e-10);
        assert!(x[(1, 0)].abs() < 1e-11);
        assert!(x[(2, 0)].abs() < 1e-11 && x[(2, 1)].abs() < 1e-11);
    }
}
