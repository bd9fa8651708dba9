//! Matrix exponential by scaling and squaring with a degree-6 diagonal Pade
//! approximant. The scaling step brings the norm under 1/2, inside the
//! backward-stable region for this degree, and the squarings restore it.

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::matrix::Matrix;

// coefficients of the degree-6 Pade numerator for exp; the denominator is
// the same polynomial at -x
const PADE6: [f64; 7] =
    [1.0, 1.0 / 2.0, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15_840.0, 1.0 / 665_280.0];

pub fn mat_exp(a: &Matrix) -> Result<Matrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.n();
    let norm = a.norm_inf();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil().max(0.0) as i32 } else { 0 };
    let b = a.scale(0.5f64.powi(s));
    let b2 = &b * &b;
    let b4 = &b2 * &b2;
    let b6 = &b2 * &b4;
    let ident = Matrix::identity(n);
    let u = &b * &(&(&ident.scale(PADE6[1]) + &b2.scale(PADE6[3])) + &b4.scale(PADE6[5]));
    let v = &(&(&ident.scale(PADE6[0]) + &b2.scale(PADE6[2])) + &b4.scale(PADE6[4]))
        + &b6.scale(PADE6[6]);
    let num = &v + &u;
    let den = &v - &u;
    let mut x = solve(&den, &num)?;
    for _ in 0..s {
        x = &x * &x;
    }
    if !x.is_finite() {
        return Err(Error::Overflow { exponent: norm });
    }
    Ok(x)
}
