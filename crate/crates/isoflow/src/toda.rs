//! The Toda hierarchy and its exact solution in chart coordinates.
//!
//! For a function p the flow is Mdot = [M, pi_o(p(M))] with pi_o the
//! skew projection. In a chart the motion is trivial: the spectrum, the
//! permutation, and Y are constant, and each coordinate z_ij moves by
//!
//!   z_ij(t) = z_ij(0) * exp( int_0^t p(lambda_i; s) - p(lambda_j; s) ds )
//!
//! with lambda in chart order. Everything else in this module is either a
//! repackaging of that formula (asymptotics, straight-line coordinates,
//! conjugator transport) or the independent Runge-Kutta integration of the
//! Lax equation used to cross-check it.

use std::str::FromStr;

use crate::charts::{chart_reconstruct, solve_conjugator, ChartPoint};
use crate::error::{Error, Result};
use crate::linalg::{
    force_unit_lower, mat_exp, project_skew, project_strict_lower, real_eigen, solve,
    solve_unit_lower,
};
use crate::matrix::{Matrix, Permutation, Spectrum};

/// Exponents beyond this leave the range of f64; the flow reports overflow
/// instead of silently saturating.
pub const EXP_LIMIT: f64 = 700.0;

/// One piece of a time-scheduled function: a polynomial active for a fixed
/// duration. The last segment extends past the end of the schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub coeffs: Vec<f64>,
}

/// The function p driving a flow of the hierarchy.
///
/// `Polynomial` coefficients are listed from the constant term up.
/// `Scheduled` switches between polynomials at fixed times; before time zero
/// the first segment applies, after the schedule runs out the last one does.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFunction {
    Identity,
    Polynomial(Vec<f64>),
    Log,
    Exp,
    Scheduled(Vec<Segment>),
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn matrix_polynomial(coeffs: &[f64], m: &Matrix) -> Matrix {
    let n = m.n();
    let mut iter = coeffs.iter().rev();
    let mut acc = match iter.next() {
        Some(&c) => Matrix::identity(n).scale(c),
        None => return Matrix::zeros(n),
    };
    for &c in iter {
        acc = &(&acc * m) + &Matrix::identity(n).scale(c);
    }
    acc
}

fn segment_at(segments: &[Segment], s: f64) -> Result<&Segment> {
    if segments.is_empty() {
        return Err(Error::InvalidSchedule);
    }
    let mut end = 0.0;
    for seg in segments {
        end += seg.duration;
        if s < end {
            return Ok(seg);
        }
    }
    Ok(segments.last().unwrap())
}

impl ScalarFunction {
    /// Validated schedule constructor.
    pub fn scheduled(segments: Vec<Segment>) -> Result<ScalarFunction> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule);
        }
        for seg in &segments {
            let duration_ok = seg.duration.is_finite() && seg.duration > 0.0;
            let coeffs_ok = !seg.coeffs.is_empty() && seg.coeffs.iter().all(|c| c.is_finite());
            if !duration_ok || !coeffs_ok {
                return Err(Error::InvalidSchedule);
            }
        }
        Ok(ScalarFunction::Scheduled(segments))
    }

    /// Value at x for time-independent functions.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            ScalarFunction::Identity => Ok(x),
            ScalarFunction::Polynomial(c) => Ok(poly_eval(c, x)),
            ScalarFunction::Log => {
                if x > 0.0 {
                    Ok(x.ln())
                } else {
                    Err(Error::NonpositiveSpectrum { value: x })
                }
            }
            ScalarFunction::Exp => Ok(x.exp()),
            ScalarFunction::Scheduled(_) => Err(Error::ScheduledUnsupported),
        }
    }

    /// Value at x at time s; static functions ignore s.
    pub fn eval_at(&self, x: f64, s: f64) -> Result<f64> {
        match self {
            ScalarFunction::Scheduled(segments) => {
                Ok(poly_eval(&segment_at(segments, s)?.coeffs, x))
            }
            _ => self.eval(x),
        }
    }

    /// int_0^t p(x; s) ds. Static functions give t * p(x); schedules are
    /// integrated segment by segment, exactly.
    pub fn integral(&self, x: f64, t: f64) -> Result<f64> {
        match self {
            ScalarFunction::Scheduled(segments) => {
                if segments.is_empty() {
                    return Err(Error::InvalidSchedule);
                }
                if t <= 0.0 {
                    return Ok(t * poly_eval(&segments[0].coeffs, x));
                }
                let mut acc = 0.0;
                let mut remaining = t;
                for (k, seg) in segments.iter().enumerate() {
                    let dur = if k + 1 == segments.len() {
                        remaining
                    } else {
                        seg.duration.min(remaining)
                    };
                    acc += dur * poly_eval(&seg.coeffs, x);
                    remaining -= dur;
                    if remaining <= 0.0 {
                        break;
                    }
                }
                Ok(acc)
            }
            _ => Ok(t * self.eval(x)?),
        }
    }

    /// p applied to a matrix with simple real spectrum.
    pub fn of_matrix(&self, m: &Matrix) -> Result<Matrix> {
        match self {
            ScalarFunction::Identity => Ok(m.clone()),
            ScalarFunction::Polynomial(c) => Ok(matrix_polynomial(c, m)),
            ScalarFunction::Exp => mat_exp(m),
            ScalarFunction::Log => {
                let (spectrum, x) = real_eigen(m)?;
                for &v in spectrum.values() {
                    if v <= 0.0 {
                        return Err(Error::NonpositiveSpectrum { value: v });
                    }
                }
                let logs: Vec<f64> = spectrum.values().iter().map(|v| v.ln()).collect();
                // rows of x are left eigenvectors: X M = D X, so log M = X^{-1} log(D) X
                solve(&x, &(&Matrix::diagonal(&logs) * &x))
            }
            ScalarFunction::Scheduled(_) => Err(Error::ScheduledUnsupported),
        }
    }

    /// p(M; s), the matrix version of `eval_at`.
    pub fn of_matrix_at(&self, m: &Matrix, s: f64) -> Result<Matrix> {
        match self {
            ScalarFunction::Scheduled(segments) => {
                Ok(matrix_polynomial(&segment_at(segments, s)?.coeffs, m))
            }
            _ => self.of_matrix(m),
        }
    }

    /// int_0^t p(A; s) ds as a matrix. All segments are polynomials in the
    /// same A, so the pieces commute and the integral is a plain sum.
    pub fn matrix_integral(&self, a: &Matrix, t: f64) -> Result<Matrix> {
        match self {
            ScalarFunction::Scheduled(segments) => {
                if segments.is_empty() {
                    return Err(Error::InvalidSchedule);
                }
                if t <= 0.0 {
                    return Ok(matrix_polynomial(&segments[0].coeffs, a).scale(t));
                }
                let mut acc = Matrix::zeros(a.n());
                let mut remaining = t;
                for (k, seg) in segments.iter().enumerate() {
                    let dur = if k + 1 == segments.len() {
                        remaining
                    } else {
                        seg.duration.min(remaining)
                    };
                    acc = &acc + &matrix_polynomial(&seg.coeffs, a).scale(dur);
                    remaining -= dur;
                    if remaining <= 0.0 {
                        break;
                    }
                }
                Ok(acc)
            }
            _ => Ok(self.of_matrix(a)?.scale(t)),
        }
    }
}

/// Text form: `id`, `log`, `exp`, `poly:c0,c1,...`, or a schedule
/// `(dur)poly:...;(dur)poly:...`.
impl FromStr for ScalarFunction {
    type Err = Error;

    fn from_str(spec: &str) -> Result<ScalarFunction> {
        let bad = || Error::InvalidFunctionSpec { spec: spec.to_string() };
        let s = spec.trim();
        match s {
            "id" => return Ok(ScalarFunction::Identity),
            "log" => return Ok(ScalarFunction::Log),
            "exp" => return Ok(ScalarFunction::Exp),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            return Ok(ScalarFunction::Polynomial(parse_coeffs(rest).ok_or_else(bad)?));
        }
        if s.starts_with('(') {
            let mut segments = Vec::new();
            for piece in s.split(';') {
                let piece = piece.trim();
                let rest = piece.strip_prefix('(').ok_or_else(bad)?;
                let close = rest.find(')').ok_or_else(bad)?;
                let duration: f64 = rest[..close].trim().parse().map_err(|_| bad())?;
                let body = rest[close + 1..].strip_prefix("poly:").ok_or_else(bad)?;
                let coeffs = parse_coeffs(body).ok_or_else(bad)?;
                segments.push(Segment { duration, coeffs });
            }
            return ScalarFunction::scheduled(segments);
        }
        Err(bad())
    }
}

fn parse_coeffs(body: &str) -> Option<Vec<f64>> {
    let coeffs: Option<Vec<f64>> = body
        .split(',')
        .map(|tok| tok.trim().parse::<f64>().ok().filter(|c| c.is_finite()))
        .collect();
    coeffs.filter(|c| !c.is_empty())
}

/// States of a numerically integrated flow, in integration order. For
/// negative horizons the times decrease from zero.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Matrix>,
}

impl Trajectory {
    fn initial(m0: Matrix) -> Trajectory {
        Trajectory { times: vec![0.0], states: vec![m0] }
    }

    pub fn final_state(&self) -> &Matrix {
        self.states.last().expect("a trajectory holds at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("a trajectory holds at least the initial state")
    }
}

/// Classical fixed-step fourth order Runge-Kutta from time 0 to t. The step
/// is h except for a shortened final step landing exactly on t.
pub(crate) fn rk4<F>(m0: &Matrix, t: f64, h: f64, f: F) -> Result<Trajectory>
where
    F: FnMut(&Matrix, f64) -> Result<Matrix>,
{
    let mut traj = Trajectory::initial(m0.clone());
    rk4_extend(&mut traj, t, h, f)?;
    Ok(traj)
}

/// Appends fixed steps to a trajectory until it reaches the target time
/// (which may lie before the current end). The last step is shortened so the
/// trajectory lands on the target exactly.
fn rk4_extend<F>(traj: &mut Trajectory, target: f64, h: f64, mut f: F) -> Result<()>
where
    F: FnMut(&Matrix, f64) -> Result<Matrix>,
{
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidStep);
    }
    if !target.is_finite() {
        return Err(Error::NonFinite);
    }
    let t0 = traj.final_time();
    let span = target - t0;
    if span == 0.0 {
        return Ok(());
    }
    let dir = span.signum();
    let full_steps = (span.abs() / h + 1e-12).floor() as usize;
    let tail = span.abs() - full_steps as f64 * h;
    let mut m = traj.final_state().clone();

    let mut advance = |m: &Matrix, s: f64, dt: f64| -> Result<Matrix> {
        let k1 = f(m, s)?;
        let k2 = f(&(m + &k1.scale(dt / 2.0)), s + dt / 2.0)?;
        let k3 = f(&(m + &k2.scale(dt / 2.0)), s + dt / 2.0)?;
        let k4 = f(&(m + &k3.scale(dt)), s + dt)?;
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale(2.0);
        let next = m + &incr.scale(dt / 6.0);
        if !next.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(next)
    };

    for k in 0..full_steps {
        let s = t0 + dir * h * k as f64;
        m = advance(&m, s, dir * h)?;
        traj.times.push(t0 + dir * h * (k + 1) as f64);
        traj.states.push(m.clone());
    }
    if tail > 1e-12 * h.max(1.0) {
        m = advance(&m, t0 + dir * h * full_steps as f64, dir * tail)?;
        traj.times.push(target);
        traj.states.push(m);
    }
    Ok(())
}

/// p frozen to its shape at time s: schedules collapse to the active
/// segment, everything else is itself.
fn frozen_at(p: &ScalarFunction, s: f64) -> Result<ScalarFunction> {
    match p {
        ScalarFunction::Scheduled(segments) => {
            Ok(ScalarFunction::Polynomial(segment_at(segments, s)?.coeffs.clone()))
        }
        other => Ok(other.clone()),
    }
}

/// Times in (0, t) at which any of the given schedules switches segments.
/// Negative horizons have none: before time zero the first segment rules.
fn switch_times(fns: &[&ScalarFunction], t: f64) -> Vec<f64> {
    let mut cuts = Vec::new();
    if t > 0.0 {
        for f in fns {
            if let ScalarFunction::Scheduled(segments) = f {
                let mut end = 0.0;
                for seg in segments {
                    end += seg.duration;
                    if end < t {
                        cuts.push(end);
                    } else {
                        break;
                    }
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// Integrates span by span between schedule switches, freezing every driving
/// function to its active segment inside each span. Runge-Kutta stages then
/// never sample across a discontinuity, which would cost the method its
/// order at every switch.
pub(crate) fn integrate_piecewise<F>(
    m0: &Matrix,
    fns: &[&ScalarFunction],
    t: f64,
    h: f64,
    rhs: F,
) -> Result<Trajectory>
where
    F: Fn(&Matrix, &[ScalarFunction]) -> Result<Matrix>,
{
    if !m0.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut boundaries = switch_times(fns, t);
    boundaries.push(t);
    let mut traj = Trajectory::initial(m0.clone());
    for end in boundaries {
        let mid = 0.5 * (traj.final_time() + end);
        let frozen: Vec<ScalarFunction> =
            fns.iter().map(|f| frozen_at(f, mid)).collect::<Result<_>>()?;
        rk4_extend(&mut traj, end, h, |m, _| rhs(m, &frozen))?;
    }
    Ok(traj)
}

/// Right hand side of the Lax equation at time s: [M, pi_o(p(M; s))].
pub fn lax_rhs(m: &Matrix, p: &ScalarFunction, s: f64) -> Result<Matrix> {
    Ok(m.commutator(&project_skew(&p.of_matrix_at(m, s)?)))
}

/// Integrates the Lax equation numerically. This never touches the chart
/// formulas, which is exactly what makes it a useful referee for them.
pub fn lax_integrate(m0: &Matrix, p: &ScalarFunction, t: f64, h: f64) -> Result<Trajectory> {
    integrate_piecewise(m0, &[p], t, h, |m, fns| lax_rhs(m, &fns[0], 0.0))
}

/// The exact flow in chart coordinates: Y and the spectrum stay put, every
/// z entry moves by an exponential factor. Zero entries stay exactly zero,
/// so support profiles are preserved without round-off.
pub fn toda_exact(point: &ChartPoint, p: &ScalarFunction, t: f64) -> Result<ChartPoint> {
    let n = point.n();
    let mut z = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            let z0 = point.z()[(i, j)];
            if z0 == 0.0 {
                continue;
            }
            let e = p.integral(point.lambda(i), t)? - p.integral(point.lambda(j), t)?;
            if e.abs() > EXP_LIMIT {
                return Err(Error::Overflow { exponent: e });
            }
            z[(i, j)] = z0 * e.exp();
        }
    }
    point.with_coordinates(point.y().clone(), z)
}

/// Transports the conjugator instead of the coordinates:
/// L(t) = exp(G) L(0) exp(-G_D) with G = int_0^t p(Y + D; s) ds and G_D its
/// diagonal counterpart, then reads Z(t) off L(t)^{-1} (Y + D) L(t).
///
/// Heavier and stiffer than `toda_exact` (it exponentiates full matrices);
/// it exists as an algebraically independent route to the same point.
pub fn evolve_via_conjugator(point: &ChartPoint, p: &ScalarFunction, t: f64) -> Result<ChartPoint> {
    let n = point.n();
    let a = point.y_plus_d();
    let g = p.matrix_integral(&a, t)?;
    let mut lt = &mat_exp(&g)? * &solve_conjugator(point);
    for j in 0..n {
        let e = -p.integral(point.lambda(j), t)?;
        if e.abs() > EXP_LIMIT {
            return Err(Error::Overflow { exponent: e });
        }
        let c = e.exp();
        for i in 0..n {
            lt[(i, j)] *= c;
        }
    }
    let lt = force_unit_lower(&lt, 1e-8)?;
    let b = solve_unit_lower(&lt, &(&a * &lt));
    point.with_coordinates(point.y().clone(), project_strict_lower(&b))
}

/// Forward-time limit of the p-flow through the point. All z coordinates
/// must decay, which pins the limit at the same (Y, D) with Z = 0; that
/// needs p strictly decreasing along the chart diagonal (for schedules, in
/// the regime of the final segment).
pub fn asymptotic_limit(point: &ChartPoint, p: &ScalarFunction) -> Result<Matrix> {
    let n = point.n();
    for i in 0..n.saturating_sub(1) {
        let a = p.eval_at(point.lambda(i), f64::INFINITY)?;
        let b = p.eval_at(point.lambda(i + 1), f64::INFINITY)?;
        // negated so that NaN values also land in the error branch
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(a > b) {
            return Err(Error::OrderMismatch);
        }
    }
    chart_reconstruct(&point.with_coordinates(point.y().clone(), Matrix::zeros(n))?)
}

/// Chart coordinates straightened out for one particular flow: under the
/// p-flow the anchor coordinate advances at unit speed and every other
/// number here is a constant of motion.
#[derive(Clone, Debug)]
pub struct StraightlinePoint {
    pi: Permutation,
    spectrum: Spectrum,
    y: Matrix,
    anchor: (usize, usize),
    sigma: f64,
    w: Matrix,
}

impl StraightlinePoint {
    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    /// Zero-based (row, column) of the anchor coordinate.
    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    /// Sign of the anchor coordinate, frozen by the flow.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn w(&self) -> &Matrix {
        &self.w
    }

    pub fn n(&self) -> usize {
        self.spectrum.n()
    }
}

fn delta(point: &ChartPoint, p: &ScalarFunction, i: usize, j: usize) -> Result<f64> {
    Ok(p.eval(point.lambda(i))? - p.eval(point.lambda(j))?)
}

fn check_monotone(spectrum: &Spectrum, p: &ScalarFunction) -> Result<()> {
    let vals = spectrum.values();
    let mut direction = 0.0f64;
    for k in 0..vals.len().saturating_sub(1) {
        let d = p.eval(vals[k])? - p.eval(vals[k + 1])?;
        if d == 0.0 || (direction != 0.0 && d.signum() != direction) {
            return Err(Error::NonmonotonicFunction);
        }
        direction = d.signum();
    }
    Ok(())
}

/// Rewrites a chart point in the coordinates straightening the p-flow with
/// the given anchor: w_anchor = log|z_anchor| / delta_anchor and every other
/// w_ij = z_ij / |z_anchor|^(delta_ij / delta_anchor), where delta_ij is the
/// p-gap between chart diagonal entries i and j.
pub fn to_straightline(
    point: &ChartPoint,
    p: &ScalarFunction,
    anchor: (usize, usize),
) -> Result<StraightlinePoint> {
    let n = point.n();
    let (i0, j0) = anchor;
    if i0 >= n || j0 >= n {
        return Err(Error::DimensionMismatch { expected: n, found: i0.max(j0) + 1 });
    }
    if j0 >= i0 {
        return Err(Error::NotStrictlyLower);
    }
    check_monotone(point.spectrum(), p)?;
    let z0 = point.z()[(i0, j0)];
    if z0 == 0.0 {
        return Err(Error::ZeroAnchor);
    }
    let d0 = delta(point, p, i0, j0)?;
    let log_z0 = z0.abs().ln();
    let mut w = Matrix::zeros(n);
    w[(i0, j0)] = log_z0 / d0;
    for i in 0..n {
        for j in 0..i {
            if (i, j) == (i0, j0) || point.z()[(i, j)] == 0.0 {
                continue;
            }
            let e = -delta(point, p, i, j)? / d0 * log_z0;
            if e.abs() > EXP_LIMIT {
                return Err(Error::Overflow { exponent: e });
            }
            w[(i, j)] = point.z()[(i, j)] * e.exp();
        }
    }
    Ok(StraightlinePoint {
        pi: point.pi().clone(),
        spectrum: point.spectrum().clone(),
        y: point.y().clone(),
        anchor,
        sigma: z0.signum(),
        w,
    })
}

/// Inverse of `to_straightline` for the same p.
pub fn from_straightline(sl: &StraightlinePoint, p: &ScalarFunction) -> Result<ChartPoint> {
    let n = sl.n();
    let probe =
        ChartPoint::new(sl.pi.clone(), sl.spectrum.clone(), sl.y.clone(), Matrix::zeros(n))?;
    let (i0, j0) = sl.anchor;
    let d0 = delta(&probe, p, i0, j0)?;
    let log_z0 = d0 * sl.w[(i0, j0)];
    let mut z = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            if (i, j) == (i0, j0) {
                if log_z0.abs() > EXP_LIMIT {
                    return Err(Error::Overflow { exponent: log_z0 });
                }
                z[(i, j)] = sl.sigma * log_z0.exp();
            } else if sl.w[(i, j)] != 0.0 {
                let e = delta(&probe, p, i, j)? / d0 * log_z0;
                if e.abs() > EXP_LIMIT {
                    return Err(Error::Overflow { exponent: e });
                }
                z[(i, j)] = sl.w[(i, j)] * e.exp();
            }
        }
    }
    probe.with_coordinates(sl.y.clone(), z)
}

/// The p-flow in straight-line coordinates: the anchor advances by t, full
/// stop. No tolerance enters because nothing else moves.
pub fn straightline_evolve(sl: &StraightlinePoint, t: f64) -> StraightlinePoint {
    let mut out = sl.clone();
    let (i0, j0) = sl.anchor;
    out.w[(i0, j0)] += t;
    out
}

/// Every coordinate the p-flow leaves alone: the spectrum, all of Y, and all
/// w entries except the anchor. For an n x n point that is n^2 - 1 numbers.
pub fn conserved_quantities(sl: &StraightlinePoint) -> Vec<f64> {
    let n = sl.n();
    let mut out = sl.spectrum.values().to_vec();
    for i in 0..n {
        for j in 0..i {
            out.push(sl.y[(i, j)]);
        }
    }
    for i in 0..n {
        for j in 0..i {
            if (i, j) != sl.anchor {
                out.push(sl.w[(i, j)]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::chart_decompose;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    fn point(
        images: &[usize],
        values: &[f64],
        y_entries: &[(usize, usize, f64)],
        z_entries: &[(usize, usize, f64)],
    ) -> ChartPoint {
        let n = values.len();
        let mut y = Matrix::zeros(n);
        for &(i, j, v) in y_entries {
            y[(i, j)] = v;
        }
        let mut z = Matrix::zeros(n);
        for &(i, j, v) in z_entries {
            z[(i, j)] = v;
        }
        ChartPoint::new(
            Permutation::from_one_based(images).unwrap(),
            Spectrum::new(values.to_vec()).unwrap(),
            y,
            z,
        )
        .unwrap()
    }

    #[test]
    fn parse_named_functions() {
        assert_eq!("id".parse::<ScalarFunction>().unwrap(), ScalarFunction::Identity);
        assert_eq!("log".parse::<ScalarFunction>().unwrap(), ScalarFunction::Log);
        assert_eq!(" exp ".parse::<ScalarFunction>().unwrap(), ScalarFunction::Exp);
        assert_eq!(
            "poly:1,0,2".parse::<ScalarFunction>().unwrap(),
            ScalarFunction::Polynomial(vec![1.0, 0.0, 2.0])
        );
    }

    #[test]
    fn parse_schedule() {
        let f = "(1)poly:0,1;(2.5)poly:1".parse::<ScalarFunction>().unwrap();
        assert_eq!(
            f,
            ScalarFunction::Scheduled(vec![
                Segment { duration: 1.0, coeffs: vec![0.0, 1.0] },
                Segment { duration: 2.5, coeffs: vec![1.0] },
            ])
        );
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["quux", "poly:", "poly:1,zap", "(0)poly:1", "(1)exp", "(-2)poly:1"] {
            assert!(bad.parse::<ScalarFunction>().is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn polynomial_eval_and_integral() {
        let p = ScalarFunction::Polynomial(vec![-2.0, 0.0, 1.0]); // x^2 - 2
        assert_eq!(p.eval(3.0).unwrap(), 7.0);
        assert_eq!(p.integral(3.0, 2.0).unwrap(), 14.0);
        assert_eq!(ScalarFunction::Identity.eval(5.0).unwrap(), 5.0);
        assert!(ScalarFunction::Log.eval(-1.0).is_err());
    }

    #[test]
    fn scheduled_integral_segment_arithmetic() {
        // p(x) = x for one unit of time, then p(x) = 1
        let p = "(1)poly:0,1;(5)poly:1".parse::<ScalarFunction>().unwrap();
        assert_eq!(p.integral(3.0, 0.5).unwrap(), 1.5);
        assert_eq!(p.integral(3.0, 2.0).unwrap(), 4.0);
        // beyond the schedule the last segment keeps going
        assert_eq!(p.integral(3.0, 10.0).unwrap(), 12.0);
        // before time zero the first segment rules
        assert_eq!(p.integral(3.0, -2.0).unwrap(), -6.0);
        // pointwise evaluation picks the active segment
        assert_eq!(p.eval_at(3.0, 0.25).unwrap(), 3.0);
        assert_eq!(p.eval_at(3.0, 1.25).unwrap(), 1.0);
        assert_eq!(p.eval_at(3.0, 100.0).unwrap(), 1.0);
        assert_eq!(p.eval_at(3.0, -7.0).unwrap(), 3.0);
        assert!(p.eval(3.0).is_err());
    }

    #[test]
    fn matrix_polynomial_by_horner() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = ScalarFunction::Polynomial(vec![-2.0, 0.0, 1.0]);
        let expected = Matrix::identity(2).scale(-1.0);
        assert!(close(&p.of_matrix(&m).unwrap(), &expected, 1e-15));
    }

    #[test]
    fn log_of_matrix_via_left_frame() {
        let m = Matrix::from_rows(&[vec![4.0, 0.0], vec![3.0, 1.0]]).unwrap();
        let lm = ScalarFunction::Log.of_matrix(&m).unwrap();
        let l4 = 4.0f64.ln();
        let expected = Matrix::from_rows(&[vec![l4, 0.0], vec![l4, 0.0]]).unwrap();
        assert!(close(&lm, &expected, 1e-10));
        let bad = Matrix::diagonal(&[1.0, -2.0]);
        assert!(matches!(
            ScalarFunction::Log.of_matrix(&bad),
            Err(Error::NonpositiveSpectrum { .. })
        ));
    }

    #[test]
    fn lax_rhs_keeps_jacobi_shape() {
        let j =
            Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 0.0, 0.5], vec![0.0, 0.5, -1.0]])
                .unwrap();
        let rhs = lax_rhs(&j, &ScalarFunction::Identity, 0.0).unwrap();
        assert!(close(&rhs, &rhs.transpose(), 1e-14));
        assert!(rhs[(2, 0)].abs() < 1e-14);
    }

    #[test]
    fn rk4_step_count_and_tail() {
        let m0 = Matrix::diagonal(&[1.0]);
        let traj = rk4(&m0, 1.0, 0.3, |_, _| Ok(Matrix::zeros(1))).unwrap();
        assert_eq!(traj.times.len(), 5); // 0, .3, .6, .9, 1.0
        assert_eq!(traj.final_time(), 1.0);
        let exact = rk4(&m0, 1.0, 0.25, |_, _| Ok(Matrix::zeros(1))).unwrap();
        assert_eq!(exact.times.len(), 5); // no spurious tail step
        assert!(rk4(&m0, 1.0, 0.0, |_, _| Ok(Matrix::zeros(1))).is_err());
    }

    #[test]
    fn rk4_matches_scalar_exponential() {
        // mdot = m has solution e^t; classical RK4 at h = 0.1 lands within
        // ~2e-6 of it over a unit horizon
        let m0 = Matrix::diagonal(&[1.0]);
        let traj = rk4(&m0, 1.0, 0.1, |m, _| Ok(m.clone())).unwrap();
        assert!((traj.final_state()[(0, 0)] - 1.0f64.exp()).abs() < 1e-5);
        // and backwards
        let back = rk4(&m0, -1.0, 0.1, |m, _| Ok(m.clone())).unwrap();
        assert!((back.final_state()[(0, 0)] - (-1.0f64).exp()).abs() < 1e-5);
        assert_eq!(back.final_time(), -1.0);
        // halving the step divides the error by ~16
        let coarse = (traj.final_state()[(0, 0)] - 1.0f64.exp()).abs();
        let fine = rk4(&m0, 1.0, 0.05, |m, _| Ok(m.clone())).unwrap();
        let ratio = coarse / (fine.final_state()[(0, 0)] - 1.0f64.exp()).abs();
        assert!(ratio > 12.0 && ratio < 20.0, "order ratio {ratio}");
    }

    #[test]
    fn exact_flow_hand_exponent() {
        let p0 = point(&[1, 2], &[6.0, 4.0], &[], &[(1, 0, 2.0)]);
        let evolved = toda_exact(&p0, &ScalarFunction::Identity, 0.5).unwrap();
        // exponent t (lambda_2 - lambda_1) = 0.5 * (4 - 6) = -1
        assert!((evolved.z()[(1, 0)] - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(evolved.y().max_abs(), 0.0);
    }

    #[test]
    fn exact_flow_preserves_exact_zeros() {
        let p0 = point(&[1, 2, 3], &[3.0, 1.0, -2.0], &[], &[(1, 0, 1.0), (2, 1, 0.5)]);
        let evolved = toda_exact(&p0, &ScalarFunction::Identity, 2.0).unwrap();
        assert_eq!(evolved.z()[(2, 0)], 0.0);
        assert!(evolved.z()[(1, 0)] != 0.0 && evolved.z()[(2, 1)] != 0.0);
    }

    #[test]
    fn exact_flow_overflow_reporting() {
        let p0 = point(&[1, 2], &[400.0, -400.0], &[], &[(1, 0, 1.0)]);
        // exponent t (p(l2) - p(l1)) = -800 t: out of range both ways, since
        // an underflowed coordinate would silently leave the chart fiber
        match toda_exact(&p0, &ScalarFunction::Identity, -1.0) {
            Err(Error::Overflow { exponent }) => assert!((exponent - 800.0).abs() < 1e-9),
            other => panic!("expected overflow, got {other:?}"),
        }
        match toda_exact(&p0, &ScalarFunction::Identity, 1.0) {
            Err(Error::Overflow { exponent }) => assert!((exponent + 800.0).abs() < 1e-9),
            other => panic!("expected overflow, got {other:?}"),
        }
        // moderate horizons stay representable
        assert!(toda_exact(&p0, &ScalarFunction::Identity, 0.5).is_ok());
        // a zero coordinate cannot overflow: nothing is exponentiated
        let sparse = point(&[1, 2], &[400.0, -400.0], &[], &[]);
        let ev = toda_exact(&sparse, &ScalarFunction::Identity, -1.0).unwrap();
        assert_eq!(ev.z().max_abs(), 0.0);
    }

    #[test]
    fn exact_flow_agrees_with_lax_integration() {
        let m0 = Matrix::from_rows(&[vec![5.0, 1.0], vec![1.0, 5.0]]).unwrap();
        let pi = Permutation::identity(2);
        let p0 = chart_decompose(&m0, &pi).unwrap();
        for p in [ScalarFunction::Identity, ScalarFunction::Polynomial(vec![0.0, -2.0, 0.0, 1.0])] {
            let exact = chart_reconstruct(&toda_exact(&p0, &p, 0.5).unwrap()).unwrap();
            let oracle = lax_integrate(&m0, &p, 0.5, 1e-3).unwrap();
            // the cubic drives a transient decaying like exp(-148 t), which
            // costs the integrator a few digits of its nominal accuracy
            assert!(
                close(&exact, oracle.final_state(), 1e-6),
                "closed form drifted from the integrator for {p:?}"
            );
        }
    }

    #[test]
    fn scheduled_flow_agrees_with_time_dependent_integration() {
        let m0 =
            Matrix::from_rows(&[vec![3.0, 1.0, 0.0], vec![1.0, 0.0, 0.4], vec![0.0, 0.4, -2.0]])
                .unwrap();
        let p = "(0.4)poly:0,1;(0.3)poly:0,0,1;(1)poly:0,-1".parse::<ScalarFunction>().unwrap();
        let pi = Permutation::identity(3);
        let p0 = chart_decompose(&m0, &pi).unwrap();
        let exact = chart_reconstruct(&toda_exact(&p0, &p, 1.0).unwrap()).unwrap();
        let oracle = lax_integrate(&m0, &p, 1.0, 1e-3).unwrap();
        assert!(close(&exact, oracle.final_state(), 1e-7));
    }

    #[test]
    fn conjugator_transport_matches_exact_flow() {
        let p0 = point(
            &[1, 2, 3],
            &[3.0, 1.0, -2.0],
            &[(1, 0, 0.5), (2, 1, -0.4)],
            &[(1, 0, 1.5), (2, 0, 0.8), (2, 1, -0.2)],
        );
        let p = ScalarFunction::Polynomial(vec![0.0, -2.0, 1.0]); // x^2 - 2x
        let a = toda_exact(&p0, &p, 0.7).unwrap();
        let b = evolve_via_conjugator(&p0, &p, 0.7).unwrap();
        assert!(close(a.z(), b.z(), 1e-9));
        assert!(close(a.y(), b.y(), 0.0));
    }

    #[test]
    fn asymptotics_reach_the_diagonal() {
        let p0 = point(&[1, 2], &[6.0, 4.0], &[], &[(1, 0, 2.0)]);
        let limit = asymptotic_limit(&p0, &ScalarFunction::Identity).unwrap();
        assert!(close(&limit, &Matrix::diagonal(&[6.0, 4.0]), 1e-12));
        // the flow actually gets there
        let late =
            chart_reconstruct(&toda_exact(&p0, &ScalarFunction::Identity, 30.0).unwrap()).unwrap();
        assert!(close(&late, &limit, 1e-9));
        // reversing p reverses the ordering requirement
        assert!(matches!(
            asymptotic_limit(&p0, &ScalarFunction::Polynomial(vec![0.0, -1.0])),
            Err(Error::OrderMismatch)
        ));
    }

    #[test]
    fn straightline_anchor_value_from_hand_computation() {
        let p0 = point(&[1, 2], &[6.0, 4.0], &[], &[(1, 0, 2.0)]);
        let sl = to_straightline(&p0, &ScalarFunction::Identity, (1, 0)).unwrap();
        // w = log 2 / (4 - 6)
        assert!((sl.w()[(1, 0)] + 0.5 * 2.0f64.ln()).abs() < 1e-15);
        assert_eq!(sl.sigma(), 1.0);
        let back = from_straightline(&sl, &ScalarFunction::Identity).unwrap();
        assert!((back.z()[(1, 0)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn straightline_translation_is_the_flow() {
        let p0 = point(
            &[1, 2, 3],
            &[3.0, 1.0, -2.0],
            &[(2, 0, 0.3)],
            &[(1, 0, 1.5), (2, 0, -0.8), (2, 1, 0.2)],
        );
        let p = ScalarFunction::Polynomial(vec![1.0, 2.0]); // 2x + 1, monotone
        let t = 0.37;
        let sl = to_straightline(&p0, &p, (2, 0)).unwrap();
        let translated = from_straightline(&straightline_evolve(&sl, t), &p).unwrap();
        let exact = toda_exact(&p0, &p, t).unwrap();
        assert!(close(translated.z(), exact.z(), 1e-12));
        assert!(close(translated.y(), exact.y(), 0.0));
        // conserved coordinates do not move at all
        let sl_t = to_straightline(&exact, &p, (2, 0)).unwrap();
        let before = conserved_quantities(&sl);
        let after = conserved_quantities(&sl_t);
        assert_eq!(before.len(), 9 - 1);
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-12);
        }
        // and the anchor moved by exactly t
        assert!((sl_t.w()[(2, 0)] - sl.w()[(2, 0)] - t).abs() < 1e-12);
    }

    #[test]
    fn straightline_rejects_bad_anchors_and_functions() {
        let p0 = point(&[1, 2], &[1.0, -1.0], &[], &[(1, 0, 0.5)]);
        let sparse = point(&[1, 2], &[1.0, -1.0], &[], &[]);
        assert!(matches!(
            to_straightline(&sparse, &ScalarFunction::Identity, (1, 0)),
            Err(Error::ZeroAnchor)
        ));
        assert!(matches!(
            to_straightline(&p0, &ScalarFunction::Identity, (0, 1)),
            Err(Error::NotStrictlyLower)
        ));
        // x^2 takes the values 1, 1 on the spectrum: not monotone
        assert!(matches!(
            to_straightline(&p0, &ScalarFunction::Polynomial(vec![0.0, 0.0, 1.0]), (1, 0)),
            Err(Error::NonmonotonicFunction)
        ));
    }
}
