//! Factorizations and projections used by the chart machinery.
//!
//! All factorizations here are canonical: the orthogonal/triangular factors
//! carry a fixed sign convention (positive diagonals), which makes every
//! decomposition unique and reruns bitwise reproducible.

mod eigen;
mod expm;

pub use eigen::{real_eigen, real_eigen_with_tolerance, sym_eigen};
pub use expm::mat_exp;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Permutation, SignDiagonal};

/// Relative threshold below which a QR or PLU pivot counts as singular.
const SINGULAR_TOL: f64 = 1e-12;

/// Relative threshold below which a leading principal minor counts as zero,
/// measured against the product of the row norms involved (Hadamard bound).
const MINOR_TOL: f64 = 1e-12;

/// QR decomposition X = Q R with Q orthogonal and R upper triangular with
/// positive diagonal. Householder reflections followed by a sign fix.
pub fn qr_pos(x: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = x.n();
    let mut r = x.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n {
        // reflect column k so its below-diagonal part vanishes
        let mut norm2 = 0.0;
        for i in k..n {
            norm2 += r[(i, k)] * r[(i, k)];
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue; // zero column tail; the singularity check below catches it
        }
        let mut v = vec![0.0; n - k];
        for i in k..n {
            v[i - k] = r[(i, k)];
        }
        let alpha = if v[0] >= 0.0 { norm } else { -norm };
        v[0] += alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // r <- H r, q <- q H with H = I - 2 v v^T / (v^T v)
        for j in 0..n {
            let mut dot = 0.0;
            for i in k..n {
                dot += v[i - k] * r[(i, j)];
            }
            let f = 2.0 * dot / vnorm2;
            for i in k..n {
                r[(i, j)] -= f * v[i - k];
            }
        }
        for i in 0..n {
            let mut dot = 0.0;
            for j in k..n {
                dot += q[(i, j)] * v[j - k];
            }
            let f = 2.0 * dot / vnorm2;
            for j in k..n {
                q[(i, j)] -= f * v[j - k];
            }
        }
    }
    let tol = SINGULAR_TOL * x.norm_fro();
    for k in 0..n {
        if r[(k, k)].abs() <= tol {
            return Err(Error::SingularInput);
        }
        if r[(k, k)] < 0.0 {
            for j in 0..n {
                r[(k, j)] = -r[(k, j)];
                q[(j, k)] = -q[(j, k)];
            }
        }
        // entries below the diagonal are eliminated exactly
        for i in k + 1..n {
            r[(i, k)] = 0.0;
        }
    }
    Ok((q, r))
}

/// LQ decomposition X = L Q with L lower triangular with positive diagonal
/// and Q orthogonal. This is the row-wise Gram-Schmidt frame of X.
pub fn lq_pos(x: &Matrix) -> Result<(Matrix, Matrix)> {
    let (q, r) = qr_pos(&x.transpose())?;
    Ok((r.transpose(), q.transpose()))
}

/// Doolittle LU without pivoting: X = L U, L unit lower triangular,
/// U upper triangular. Exists exactly when all leading minors are nonzero;
/// the k-th minor equals the product of the first k pivots.
pub fn lu_unit(x: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = x.n();
    let mut u = x.clone();
    let mut l = Matrix::identity(n);
    let mut minor = 1.0;
    let mut hadamard = 1.0;
    for k in 0..n {
        hadamard *= x.row_norm(k);
        let pivot = u[(k, k)];
        minor *= pivot;
        if minor.abs() <= MINOR_TOL * hadamard {
            return Err(Error::ZeroMinor(k + 1));
        }
        for i in k + 1..n {
            let f = u[(i, k)] / pivot;
            l[(i, k)] = f;
            u[(i, k)] = 0.0;
            for j in k + 1..n {
                u[(i, j)] -= f * u[(k, j)];
            }
        }
    }
    Ok((l, u))
}

/// LU with partial pivoting: X = P L U with P a permutation matrix
/// (column convention P e_i = e_{pi(i)}), L unit lower triangular, U upper
/// triangular.
pub fn plu(x: &Matrix) -> Result<(Permutation, Matrix, Matrix)> {
    let n = x.n();
    let tol = SINGULAR_TOL * x.norm_fro();
    let mut u = x.clone();
    let mut l = Matrix::zeros(n);
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut best = k;
        for i in k + 1..n {
            if u[(i, k)].abs() > u[(best, k)].abs() {
                best = i;
            }
        }
        if u[(best, k)].abs() <= tol {
            return Err(Error::SingularInput);
        }
        if best != k {
            for j in 0..n {
                let tmp = u[(k, j)];
                u[(k, j)] = u[(best, j)];
                u[(best, j)] = tmp;
                let tmp = l[(k, j)];
                l[(k, j)] = l[(best, j)];
                l[(best, j)] = tmp;
            }
            order.swap(k, best);
        }
        l[(k, k)] = 1.0;
        let pivot = u[(k, k)];
        for i in k + 1..n {
            let f = u[(i, k)] / pivot;
            l[(i, k)] = f;
            u[(i, k)] = 0.0;
            for j in k + 1..n {
                u[(i, j)] -= f * u[(k, j)];
            }
        }
    }
    // row `order[k]` of X landed in position k, so pi(k) = order[k] gives
    // X = P_pi L U with the column convention above.
    let images: Vec<usize> = order.iter().map(|v| v + 1).collect();
    let pi = Permutation::from_one_based(&images).expect("row order is a bijection");
    Ok((pi, l, u))
}

/// Polar decomposition M = P Q with P symmetric positive definite and Q
/// orthogonal. P is the spectral square root of M M^T.
pub fn polar(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = m.n();
    let g = symmetrize(&(m * &m.transpose()));
    let (vals, x) = sym_eigen(&g)?;
    let sigma_max = vals[0].max(0.0).sqrt();
    let mut sig = vec![0.0; n];
    for i in 0..n {
        sig[i] = vals[i].max(0.0).sqrt();
        if sig[i] <= 1e-13 * sigma_max.max(1.0) {
            return Err(Error::SingularInput);
        }
    }
    let xt = x.transpose();
    let mut q =
        &xt * &(Matrix::diagonal(&sig.iter().map(|s| 1.0 / s).collect::<Vec<_>>()) * &(&x * m));
    // the spectral route loses orthogonality like cond(M)^2; averaging with
    // the inverse transpose converges quadratically to the orthogonal factor
    for _ in 0..2 {
        let qinv_t = solve(&q, &Matrix::identity(n))?.transpose();
        q = (&q + &qinv_t).scale(0.5);
    }
    let p = symmetrize(&(m * &q.transpose()));
    Ok((p, q))
}

/// Determinants of the leading principal blocks, in order 1..=n.
pub fn leading_minors(x: &Matrix) -> Vec<f64> {
    (1..=x.n()).map(|k| det_leading(x, k)).collect()
}

/// Determinant of the leading k x k block, by Gaussian elimination with
/// partial pivoting on a copy.
fn det_leading(x: &Matrix, k: usize) -> f64 {
    let mut a: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| x[(i, j)]).collect()).collect();
    let mut det = 1.0;
    for c in 0..k {
        let mut best = c;
        for r in c + 1..k {
            if a[r][c].abs() > a[best][c].abs() {
                best = r;
            }
        }
        if a[best][c] == 0.0 {
            return 0.0;
        }
        if best != c {
            a.swap(c, best);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..k {
            let f = a[r][c] / a[c][c];
            for j in c + 1..k {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    det
}

/// Chooses row signs so that E X has all leading principal minors positive.
///
/// Flipping row k flips the sign of minors k..=n and leaves earlier ones
/// alone, so a single greedy pass settles every sign.
pub fn sign_normalize_rows(x: &Matrix) -> Result<(SignDiagonal, Matrix)> {
    let n = x.n();
    let minors = leading_minors(x);
    let mut signs = vec![1.0; n];
    let mut sigma = 1.0;
    let mut hadamard = 1.0;
    for k in 0..n {
        hadamard *= x.row_norm(k);
        if minors[k].abs() <= MINOR_TOL * hadamard {
            return Err(Error::ZeroMinor(k + 1));
        }
        if sigma * minors[k] < 0.0 {
            signs[k] = -1.0;
            sigma = -sigma;
        }
    }
    let e = SignDiagonal::from_signs(&signs).expect("signs are unit");
    let normalized = e.apply_rows(x);
    Ok((e, normalized))
}

/// Projection onto skew-symmetric matrices along the upper triangulars:
/// strictly lower part minus its transpose.
pub fn project_skew(m: &Matrix) -> Matrix {
    let n = m.n();
    Matrix::from_fn(n, |i, j| {
        if i > j {
            m[(i, j)]
        } else if i < j {
            -m[(j, i)]
        } else {
            0.0
        }
    })
}

/// Complementary projection: M minus its skew part, always upper triangular.
pub fn project_upper(m: &Matrix) -> Matrix {
    m - &project_skew(m)
}

/// Strictly lower triangular part.
pub fn project_strict_lower(m: &Matrix) -> Matrix {
    Matrix::from_fn(m.n(), |i, j| if i > j { m[(i, j)] } else { 0.0 })
}

/// Diagonal part.
pub fn project_diag(m: &Matrix) -> Matrix {
    Matrix::from_fn(m.n(), |i, j| if i == j { m[(i, j)] } else { 0.0 })
}

/// (M + M^T) / 2, used to clean round-off off symmetric products.
pub fn symmetrize(m: &Matrix) -> Matrix {
    Matrix::from_fn(m.n(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// Solves L X = B for lower triangular L by forward substitution.
pub fn solve_lower(l: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = l.n();
    let tol = SINGULAR_TOL * l.norm_fro();
    let mut x = b.clone();
    for j in 0..n {
        for i in 0..n {
            let mut s = x[(i, j)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, j)];
            }
            if l[(i, i)].abs() <= tol {
                return Err(Error::SingularInput);
            }
            x[(i, j)] = s / l[(i, i)];
        }
    }
    Ok(x)
}

/// Forward substitution specialized to unit lower triangular L: no divisions,
/// so triangular structure in the result is preserved exactly.
pub fn solve_unit_lower(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.n();
    let mut x = b.clone();
    for j in 0..n {
        for i in 0..n {
            let mut s = x[(i, j)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s;
        }
    }
    x
}

/// Checks that m is unit lower triangular up to tol (relative to its largest
/// entry) and returns the exactly triangular copy; the cleaned structure keeps
/// later substitutions from leaking round-off into upper entries.
pub(crate) fn force_unit_lower(m: &Matrix, tol: f64) -> Result<Matrix> {
    let n = m.n();
    let scale = m.max_abs().max(1.0);
    let mut deviation = 0.0f64;
    for i in 0..n {
        deviation = deviation.max((m[(i, i)] - 1.0).abs());
        for j in i + 1..n {
            deviation = deviation.max(m[(i, j)].abs());
        }
    }
    // negated so that a NaN deviation also lands in the error branch
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(deviation <= tol * scale) {
        return Err(Error::NonUnitConjugator { deviation });
    }
    Ok(Matrix::from_fn(n, |i, j| {
        if i == j {
            1.0
        } else if i > j {
            m[(i, j)]
        } else {
            0.0
        }
    }))
}

/// Solves U X = B for upper triangular U by back substitution.
pub fn solve_upper(u: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = u.n();
    let tol = SINGULAR_TOL * u.norm_fro();
    let mut x = b.clone();
    for j in 0..n {
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for k in i + 1..n {
                s -= u[(i, k)] * x[(k, j)];
            }
            if u[(i, i)].abs() <= tol {
                return Err(Error::SingularInput);
            }
            x[(i, j)] = s / u[(i, i)];
        }
    }
    Ok(x)
}

/// Inverse of an upper triangular matrix.
pub fn invert_upper(u: &Matrix) -> Result<Matrix> {
    solve_upper(u, &Matrix::identity(u.n()))
}

/// Solves A X = B through PLU.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let (pi, l, u) = plu(a)?;
    // A X = B  =>  L U X = P^T B, and row k of P^T B is row pi(k) of B
    let n = a.n();
    let pb = Matrix::from_fn(n, |i, j| b[(pi.image(i), j)]);
    let y = solve_unit_lower(&l, &pb);
    solve_upper(&u, &y)
}

/// Like `solve`, but floors tiny pivots instead of failing. Intended for
/// inverse iteration where the system is singular by design.
pub(crate) fn solve_floored(a: &Matrix, b: &[f64], floor: f64) -> Vec<f64> {
    let n = a.n();
    let mut m: Vec<Vec<f64>> = a.rows();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let mut best = k;
        for i in k + 1..n {
            if m[i][k].abs() > m[best][k].abs() {
                best = i;
            }
        }
        m.swap(k, best);
        rhs.swap(k, best);
        if m[k][k].abs() < floor {
            m[k][k] = if m[k][k] >= 0.0 { floor } else { -floor };
        }
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            rhs[i] -= f * rhs[k];
        }
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= m[i][j] * rhs[j];
        }
        rhs[i] = s / m[i][i];
    }
    rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn assert_close(a: &Matrix, b: &Matrix, tol: f64) {
        let d = (a - b).max_abs();
        assert!(d <= tol, "matrices differ by {d:.3e} (tol {tol:.1e})\n{a:?}\n{b:?}");
    }

    #[test]
    fn qr_pos_identity_is_fixed() {
        let (q, r) = qr_pos(&Matrix::identity(3)).unwrap();
        assert_eq!(q, Matrix::identity(3));
        assert_eq!(r, Matrix::identity(3));
    }

    #[test]
    fn qr_pos_hand_worked_2x2() {
        // X = [[1,0],[-1,1]]: Gram-Schmidt gives Q = (1/sqrt2)[[1,1],[-1,1]],
        // R = [[sqrt2, -1/sqrt2],[0, 1/sqrt2]]
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 1.0]]).unwrap();
        let (q, r) = qr_pos(&x).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        let q_exp = Matrix::from_rows(&[vec![s, s], vec![-s, s]]).unwrap();
        let r_exp = Matrix::from_rows(&[vec![2.0f64.sqrt(), -s], vec![0.0, s]]).unwrap();
        assert_close(&q, &q_exp, 1e-12);
        assert_close(&r, &r_exp, 1e-12);
    }

    #[test]
    fn qr_pos_scaled_identity() {
        let (q, r) = qr_pos(&Matrix::identity(2).scale(2.0)).unwrap();
        assert_close(&q, &Matrix::identity(2), 1e-15);
        assert_close(&r, &Matrix::identity(2).scale(2.0), 1e-15);
    }

    #[test]
    fn qr_pos_rejects_singular() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(qr_pos(&x).unwrap_err(), Error::SingularInput);
    }

    #[test]
    fn qr_pos_multiply_back_and_orthogonality() {
        let x =
            Matrix::from_rows(&[vec![2.0, -1.0, 0.5], vec![0.3, 1.7, -2.1], vec![-1.1, 0.4, 0.9]])
                .unwrap();
        let (q, r) = qr_pos(&x).unwrap();
        assert_close(&(&q * &r), &x, 1e-13);
        assert_close(&(&q.transpose() * &q), &Matrix::identity(3), 1e-13);
        for k in 0..3 {
            assert!(r[(k, k)] > 0.0);
        }
    }

    #[test]
    fn qr_pos_bitwise_reproducible() {
        let x = Matrix::from_rows(&[vec![0.3, -2.0], vec![1.4, 0.8]]).unwrap();
        let (q1, r1) = qr_pos(&x).unwrap();
        let (q2, r2) = qr_pos(&x).unwrap();
        assert_eq!(q1, q2);
        assert_eq!(r1, r2);
    }

    #[test]
    fn lq_pos_identity_and_hand_value() {
        let (l, q) = lq_pos(&Matrix::identity(4)).unwrap();
        assert_eq!(l, Matrix::identity(4));
        assert_eq!(q, Matrix::identity(4));

        // rows of X are (0,1) and (2,0): first Gram-Schmidt row is (0,1)
        let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let (l, q) = lq_pos(&x).unwrap();
        assert_close(&(&l * &q), &x, 1e-13);
        assert!(l[(0, 0)] > 0.0 && l[(1, 1)] > 0.0);
        assert_eq!(l[(0, 1)], 0.0);
    }

    #[test]
    fn lu_unit_hand_worked() {
        // (1/sqrt2)[[1,1],[-1,1]] = [[1,0],[-1,1]] * (1/sqrt2)[[1,1],[0,2]]
        let s = 1.0 / 2.0f64.sqrt();
        let x = Matrix::from_rows(&[vec![s, s], vec![-s, s]]).unwrap();
        let (l, u) = lu_unit(&x).unwrap();
        let l_exp = Matrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 1.0]]).unwrap();
        let u_exp = Matrix::from_rows(&[vec![s, s], vec![0.0, 2.0 * s]]).unwrap();
        assert_close(&l, &l_exp, 1e-12);
        assert_close(&u, &u_exp, 1e-12);
    }

    #[test]
    fn lu_unit_zero_minor() {
        let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(lu_unit(&x).unwrap_err(), Error::ZeroMinor(1));
    }

    #[test]
    fn plu_antidiagonal() {
        let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (pi, l, u) = plu(&x).unwrap();
        assert_eq!(l, Matrix::identity(2));
        assert_eq!(u, Matrix::identity(2));
        assert_eq!(pi.one_based_images(), vec![2, 1]);
        assert_close(&(&pi.matrix() * &(&l * &u)), &x, 1e-15);
    }

    #[test]
    fn plu_multiply_back() {
        let x =
            Matrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, -1.0, 3.0], vec![2.0, 0.5, -0.7]])
                .unwrap();
        let (pi, l, u) = plu(&x).unwrap();
        assert_close(&(&pi.matrix() * &(&l * &u)), &x, 1e-13);
        for i in 0..3 {
            assert_eq!(l[(i, i)], 1.0);
            for j in i + 1..3 {
                assert_eq!(l[(i, j)], 0.0);
                assert_eq!(u[(j, i)], 0.0);
            }
        }
    }

    #[test]
    fn polar_of_orthogonal_is_identity_times_itself() {
        let s = 1.0 / 2.0f64.sqrt();
        let q0 = Matrix::from_rows(&[vec![s, -s], vec![s, s]]).unwrap();
        let (p, q) = polar(&q0).unwrap();
        assert_close(&p, &Matrix::identity(2), 1e-12);
        assert_close(&q, &q0, 1e-12);
    }

    #[test]
    fn polar_of_spd_has_trivial_rotation() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let (p, q) = polar(&m).unwrap();
        assert_close(&q, &Matrix::identity(2), 1e-12);
        assert_close(&p, &m, 1e-12);
    }

    #[test]
    fn polar_splits_signs_into_rotation() {
        let m = Matrix::diagonal(&[2.0, -3.0]);
        let (p, q) = polar(&m).unwrap();
        assert_close(&p, &Matrix::diagonal(&[2.0, 3.0]), 1e-12);
        assert_close(&q, &Matrix::diagonal(&[1.0, -1.0]), 1e-12);
    }

    #[test]
    fn polar_rejects_singular() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(polar(&m).unwrap_err(), Error::SingularInput);
    }

    #[test]
    fn leading_minors_hand_values() {
        assert_eq!(leading_minors(&Matrix::identity(3)), vec![1.0, 1.0, 1.0]);
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let m = leading_minors(&x);
        assert!((m[0] - 1.0).abs() < 1e-15);
        assert!((m[1] + 2.0).abs() < 1e-12);
        let d = Matrix::diagonal(&[2.0, 3.0, -1.0]);
        assert_eq!(leading_minors(&d), vec![2.0, 6.0, -6.0]);
    }

    #[test]
    fn sign_normalize_rows_examples() {
        // already positive: identity signs
        let x = Matrix::from_rows(&[vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let (e, xn) = sign_normalize_rows(&x).unwrap();
        assert!(e.is_identity());
        assert_eq!(xn, x);

        // second minor negative: flip the second row
        let x = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let (e, xn) = sign_normalize_rows(&x).unwrap();
        assert_eq!(e.signs(), &[1.0, -1.0]);
        let minors = leading_minors(&xn);
        assert!(minors.iter().all(|&m| m > 0.0));

        // flipping the first row flips both minors at once, so the second
        // row is left alone
        let x = Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (e, xn) = sign_normalize_rows(&x).unwrap();
        assert_eq!(e.signs(), &[-1.0, 1.0]);
        assert!(leading_minors(&xn).iter().all(|&m| m > 0.0));
    }

    #[test]
    fn sign_normalize_rows_zero_minor() {
        let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(sign_normalize_rows(&x).unwrap_err(), Error::ZeroMinor(1));
    }

    #[test]
    fn projections_hand_values() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let sk = project_skew(&m);
        assert_eq!(sk.rows(), vec![vec![0.0, -3.0], vec![3.0, 0.0]]);
        let up = project_upper(&m);
        assert_eq!(up.rows(), vec![vec![1.0, 5.0], vec![0.0, 4.0]]);
        assert_eq!(&sk + &up, m.clone());
        assert_eq!(project_strict_lower(&m).rows(), vec![vec![0.0, 0.0], vec![3.0, 0.0]]);
        assert_eq!(project_diag(&m), Matrix::diagonal(&[1.0, 4.0]));
    }

    #[test]
    fn projection_of_symmetric_skew_part_is_its_generator() {
        // for symmetric M the skew projection recovers the commutator generator
        // used by the sorting flows: lower minus its transpose
        let m = Matrix::from_rows(&[vec![5.0, 1.0], vec![1.0, 5.0]]).unwrap();
        let a = project_skew(&m);
        assert_eq!(a.rows(), vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn triangular_solves_roundtrip() {
        let l = Matrix::from_rows(&[vec![2.0, 0.0], vec![1.0, 3.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![4.0, 2.0], vec![5.0, 1.0]]).unwrap();
        let x = solve_lower(&l, &b).unwrap();
        assert_close(&(&l * &x), &b, 1e-13);

        let u = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 4.0]]).unwrap();
        let x = solve_upper(&u, &b).unwrap();
        assert_close(&(&u * &x), &b, 1e-13);
        let ui = invert_upper(&u).unwrap();
        assert_close(&(&u * &ui), &Matrix::identity(2), 1e-14);
    }

    #[test]
    fn general_solve_matches_hand_inverse() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 1.0]]).unwrap();
        let b = Matrix::identity(2);
        let x = solve(&a, &b).unwrap();
        // inverse of [[0,1],[2,1]] is [[-1/2, 1/2],[1, 0]]
        let exp = Matrix::from_rows(&[vec![-0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        assert_close(&x, &exp, 1e-14);
    }
}
