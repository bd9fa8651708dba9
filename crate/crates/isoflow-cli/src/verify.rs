//! Named cross-validation suites. Each suite runs a set of checks at the
//! configured seed/step/tolerance, prints a machine-readable summary, and
//! fails the process (exit 1) when any residual misses its tolerance.

use crate::io::{self, Failure};
use crate::{SuiteKind, VerifyArgs};
use isoflow::charts::{chart_decompose, chart_reconstruct, ChartPoint};
use isoflow::extended::{
    full_flow_exact, full_flow_oracle, full_flow_scaling_exact, full_flow_shear_exact, qr_step,
    skew_flow_exact, skew_flow_oracle, sweep_flow, sweep_flow_oracle, toda_log_time1,
    LowerGenerator,
};
use isoflow::linalg::real_eigen;
use isoflow::svd::{svd_chart_reconstruct, svd_exact, svd_lax_integrate, SvdChartPoint};
use isoflow::toda::{
    conserved_quantities, lax_integrate, straightline_evolve, to_straightline, toda_exact,
    ScalarFunction,
};
use isoflow::{Matrix, Permutation, SignDiagonal, Spectrum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Serialize)]
struct Check {
    name: String,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct Report {
    suite: String,
    seed: u64,
    pass: bool,
    checks: Vec<Check>,
}

fn check(name: impl Into<String>, residual: f64, tolerance: f64) -> Check {
    Check { name: name.into(), residual, tolerance, pass: residual <= tolerance }
}

pub fn run(args: &VerifyArgs) -> Result<(), Failure> {
    let h = args.h.unwrap_or(1e-3);
    if !h.is_finite() || h <= 0.0 {
        return Err(Failure::Input(format!("step size must be positive, got {h}")));
    }
    let tol = |default: f64| io::tolerance(args.tol, default);
    let checks = match args.suite {
        SuiteKind::Roundtrip => roundtrip(args.seed, args.samples.unwrap_or(100), tol(1e-9)?)?,
        SuiteKind::Toda => toda(args.seed, h, tol(1e-6)?)?,
        SuiteKind::Svd => svd(args.seed, h, args.tol)?,
        SuiteKind::Ext => ext(args.seed, h, args.tol)?,
        SuiteKind::Qrstep => qrstep(args.seed, args.samples.unwrap_or(100), tol(1e-8)?)?,
        SuiteKind::Straightline => straightline(args.seed, tol(1e-8)?)?,
    };
    let pass = checks.iter().all(|c| c.pass);
    let report = Report { suite: args.suite.label().to_string(), seed: args.seed, pass, checks };
    print!("{}", io::to_pretty_json(&report));
    if pass {
        Ok(())
    } else {
        let failed: Vec<&str> =
            report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(Failure::Check(format!("checks failed: {}", failed.join("; "))))
    }
}

fn random_spectrum(rng: &mut ChaCha8Rng, n: usize, top: f64, gap: f64) -> Spectrum {
    let mut values = Vec::with_capacity(n);
    let mut v = top + rng.gen_range(0.0..0.5);
    for _ in 0..n {
        values.push(v);
        v -= gap + rng.gen_range(0.0..0.7);
    }
    Spectrum::new(values).expect("gaps are enforced by construction")
}

fn random_strict_lower(rng: &mut ChaCha8Rng, n: usize, amp: f64) -> Matrix {
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = rng.gen_range(-amp..amp);
        }
    }
    m
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut images: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        images.swap(i, j);
    }
    Permutation::from_one_based(&images).expect("shuffle of 1..=n is a permutation")
}

fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).max_abs()
}

fn roundtrip(seed: u64, cases: usize, tol: f64) -> Result<Vec<Check>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let n = 2 + case % 5;
        let pi = random_permutation(&mut rng, n);
        let spectrum = random_spectrum(&mut rng, n, 2.0, 0.8);
        let y = random_strict_lower(&mut rng, n, 1.2);
        let z = random_strict_lower(&mut rng, n, 1.2);
        let point = ChartPoint::new(pi.clone(), spectrum.clone(), y.clone(), z.clone())?;
        let back = chart_decompose(&chart_reconstruct(&point)?, &pi)?;
        let scale = y.max_abs().max(z.max_abs()).max(spectrum.values()[0].abs()).max(1.0);
        let mut err = max_diff(back.y(), &y).max(max_diff(back.z(), &z));
        for (a, b) in back.spectrum().values().iter().zip(spectrum.values()) {
            err = err.max((a - b).abs());
        }
        worst = worst.max(err / scale);
    }
    Ok(vec![check(format!("decompose inverts reconstruct ({cases} cases)"), worst, tol)])
}

fn toda(seed: u64, h: f64, tol: f64) -> Result<Vec<Check>, Failure> {
    let spectrum = Spectrum::new(vec![1.5, 0.7, -0.6, -1.6])?;
    let pi = Permutation::identity(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = random_strict_lower(&mut rng, 4, 0.6);
    let z = random_strict_lower(&mut rng, 4, 0.8);
    let functions: [(&str, ScalarFunction); 3] = [
        ("x", ScalarFunction::Identity),
        ("x^2", ScalarFunction::Polynomial(vec![0.0, 0.0, 1.0])),
        ("x^3 - 2x", ScalarFunction::Polynomial(vec![0.0, -2.0, 0.0, 1.0])),
    ];
    let mut checks = Vec::new();
    for (shape, y0) in [("symmetric", Matrix::zeros(4)), ("nonsymmetric", y)] {
        for (label, p) in &functions {
            let point = ChartPoint::new(pi.clone(), spectrum.clone(), y0.clone(), z.clone())?;
            let m0 = chart_reconstruct(&point)?;
            let exact = chart_reconstruct(&toda_exact(&point, p, 1.0)?)?;
            let oracle = lax_integrate(&m0, p, 1.0, h)?;
            checks.push(check(
                format!("closed form vs oracle at t = 1 ({shape}, p = {label})"),
                max_diff(&exact, oracle.final_state()),
                tol,
            ));
        }
    }
    Ok(checks)
}

fn svd(seed: u64, h: f64, tol_flag: Option<f64>) -> Result<Vec<Check>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = Permutation::identity(3);
    let rho = random_permutation(&mut rng, 3);
    let point = SvdChartPoint::new(
        pi,
        rho,
        vec![1.5, 1.0, 0.5],
        SignDiagonal::from_signs(&[1.0, -1.0, 1.0])?,
        random_strict_lower(&mut rng, 3, 0.8),
        random_strict_lower(&mut rng, 3, 0.8),
    )?;
    let m0 = svd_chart_reconstruct(&point)?;
    let p = ScalarFunction::Identity;
    let q = ScalarFunction::Polynomial(vec![0.0, 0.0, 1.0]);
    let exact = svd_chart_reconstruct(&svd_exact(&point, &p, &q, 1.0)?)?;
    let traj = svd_lax_integrate(&m0, &p, &q, 1.0, h)?;
    let gap = max_diff(&exact, traj.final_state());

    let final_state = traj.final_state();
    let (mu, _) = isoflow::linalg::sym_eigen(&isoflow::linalg::symmetrize(
        &(&final_state.transpose() * final_state),
    ))?;
    let mut sigmas: Vec<f64> = mu.iter().map(|m| m.max(0.0).sqrt()).collect();
    sigmas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let drift = sigmas.iter().zip(point.sigma()).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    Ok(vec![
        check(
            "closed form vs oracle at t = 1 (p = x, q = x^2)",
            gap,
            io::tolerance(tol_flag, 1e-6)?,
        ),
        check("singular values conserved", drift, io::tolerance(tol_flag, 1e-7)?),
    ])
}

fn ext(seed: u64, h: f64, tol_flag: Option<f64>) -> Result<Vec<Check>, Failure> {
    let spectrum = Spectrum::new(vec![1.4, 0.5, -0.9])?;
    let pi = Permutation::identity(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = ChartPoint::new(
        pi.clone(),
        spectrum,
        random_strict_lower(&mut rng, 3, 0.6),
        random_strict_lower(&mut rng, 3, 0.8),
    )?;
    let m0 = chart_reconstruct(&point)?;
    let mut c_raw = random_strict_lower(&mut rng, 3, 0.6);
    for i in 0..3 {
        c_raw[(i, i)] = rng.gen_range(-0.6..0.6);
    }
    let c = LowerGenerator::new(c_raw)?;
    let tol6 = io::tolerance(tol_flag, 1e-6)?;
    let mut checks = Vec::new();

    let skew_exact = chart_reconstruct(&skew_flow_exact(&point, &c, 0.5)?)?;
    let skew_oracle = skew_flow_oracle(&m0, &pi, &c, 0.5, h)?;
    checks.push(check(
        "skew form vs oracle at t = 0.5",
        max_diff(&skew_exact, skew_oracle.final_state()),
        tol6,
    ));

    // with C = p(Y + D) the skew form is the Toda flow itself
    let p = ScalarFunction::Polynomial(vec![0.0, 0.0, 1.0]);
    let c_toda = LowerGenerator::new(p.of_matrix(&point.y_plus_d())?)?;
    let via_skew = skew_flow_exact(&point, &c_toda, 0.5)?;
    let via_toda = toda_exact(&point, &p, 0.5)?;
    checks.push(check(
        "skew form with C = p(Y + D) is the p-flow",
        max_diff(via_skew.z(), via_toda.z()),
        io::tolerance(tol_flag, 1e-10)?,
    ));

    let full_exact = chart_reconstruct(&full_flow_exact(&point, &c, 0.5)?)?;
    let full_oracle = full_flow_oracle(&m0, &pi, &c, 0.5, h)?;
    checks.push(check(
        "full form vs oracle at t = 0.5",
        max_diff(&full_exact, full_oracle.final_state()),
        tol6,
    ));

    let shear_exact = chart_reconstruct(&full_flow_shear_exact(&point, 2, 0, 0.7, 0.5)?)?;
    let shear_oracle =
        full_flow_oracle(&m0, &pi, &LowerGenerator::elementary(3, 2, 0, 0.7)?, 0.5, h)?;
    checks.push(check(
        "single-entry shear formula vs oracle",
        max_diff(&shear_exact, shear_oracle.final_state()),
        tol6,
    ));

    let scaling_exact = chart_reconstruct(&full_flow_scaling_exact(&point, 1, 0.5, 0.5)?)?;
    let scaling_oracle =
        full_flow_oracle(&m0, &pi, &LowerGenerator::elementary(3, 1, 1, 0.5)?, 0.5, h)?;
    checks.push(check(
        "diagonal scaling formula vs oracle",
        max_diff(&scaling_exact, scaling_oracle.final_state()),
        tol6,
    ));

    let x = Matrix::from_fn(3, |i, j| ((2 * i + 3 * j) as f64 * 0.41).cos() * 0.5);
    let swept = sweep_flow_oracle(&m0, &x, 0.8, h)?;
    checks.push(check(
        "factorization sweep vs its equation",
        max_diff(&sweep_flow(&m0, &x, 0.8)?, swept.final_state()),
        io::tolerance(tol_flag, 1e-5)?,
    ));
    Ok(checks)
}

fn qrstep(seed: u64, cases: usize, tol: f64) -> Result<Vec<Check>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut last_good = Matrix::identity(4);
    while checked < cases {
        let b = Matrix::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let spd = &(&b.transpose() * &b) + &Matrix::identity(4).scale(0.3);
        match real_eigen(&spd) {
            Ok((s, _)) => {
                let v = s.values();
                if (0..v.len() - 1).any(|k| v[k] - v[k + 1] < 1e-3) {
                    continue;
                }
            }
            Err(_) => continue,
        }
        worst = worst.max(max_diff(&toda_log_time1(&spd)?, &qr_step(&spd)?));
        last_good = spd;
        checked += 1;
    }
    let mut via_flow = last_good;
    let mut via_qr = via_flow.clone();
    for _ in 0..3 {
        via_flow = toda_log_time1(&via_flow)?;
        via_qr = qr_step(&via_qr)?;
    }
    Ok(vec![
        check(format!("log flow at t = 1 equals one qr step ({cases} cases)"), worst, tol),
        check("three-fold iteration equals three qr steps", max_diff(&via_flow, &via_qr), tol),
    ])
}

fn straightline(seed: u64, tol: f64) -> Result<Vec<Check>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = Permutation::identity(3);
    let spectrum = Spectrum::new(vec![1.2, 0.3, -0.8])?;
    let y = random_strict_lower(&mut rng, 3, 0.8);
    let mut z = random_strict_lower(&mut rng, 3, 1.0);
    z[(1, 0)] = 0.7;
    let point = ChartPoint::new(pi, spectrum, y, z)?;
    let p = ScalarFunction::Identity;
    let anchor = (1, 0);
    let sl0 = to_straightline(&point, &p, anchor)?;
    let base = conserved_quantities(&sl0);
    let mut worst = 0.0f64;
    for t in [0.3, 1.0, 2.5] {
        let moved = to_straightline(&toda_exact(&point, &p, t)?, &p, anchor)?;
        for i in 0..3 {
            for j in 0..i {
                let expected = sl0.w()[(i, j)] + if (i, j) == anchor { t } else { 0.0 };
                worst = worst.max((moved.w()[(i, j)] - expected).abs());
            }
        }
        for (a, b) in conserved_quantities(&moved).iter().zip(&base) {
            worst = worst.max((a - b).abs());
        }
        worst = worst.max(max_diff(straightline_evolve(&sl0, t).w(), moved.w()));
    }
    let count_gap = (base.len() as f64 - (3.0 * 3.0 - 1.0)).abs();
    Ok(vec![
        check("anchor advances at unit speed, the rest stand still", worst, tol),
        check("conserved quantity count is dim - 1", count_gap, 0.5),
    ])
}
