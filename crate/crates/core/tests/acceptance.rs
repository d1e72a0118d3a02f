//! Acceptance suite. Runs each criterion in turn, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};
use zetakit::copoisson::{
    completed_mellin_fe_residual, copoisson_member, default_intertwining_grid,
    default_line_samples, intertwining_residual, intertwining_residual_pair, kahane_sonine,
    sonine_check, special_value_check, twisted_intertwining_residual,
};
use zetakit::explicit::{explicit_formula_report, von_mangoldt_convergence, von_mangoldt_sides};
use zetakit::nymanbeurling::{
    bound_report, ip_cross, ip_frac, octave_thetas, solve_distance, solve_thetas, DEFAULT_CUTOFF,
};
use zetakit::specfun::dirichlet::dirichlet_functional_equation_residual;
use zetakit::specfun::{chi_plus, dirichlet_l, gamma_ln, hurwitz_zeta, zeta, DirichletCharacter};
use zetakit::testfn::{bump_on, corpus_entry, enforce_moments, enforce_single_moment, Moment};
use zetakit::zeros::{
    count_below, find_zeros, riemann_von_mangoldt, zero_sum_inv_sq, ZeroList, ZeroWeighting,
};
use zetakit::{cpx, Complex64, Result, EULER_GAMMA};

/// Result of one criterion: verdict plus a one-line summary of the numbers.
struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

/// Low-discrepancy points in `[lo, hi]`.
fn weyl(n: usize, alpha: f64, lo: f64, hi: f64) -> Vec<f64> {
    (1..=n)
        .map(|k| lo + (hi - lo) * (k as f64 * alpha).fract())
        .collect()
}

fn sample_points(n: usize, im_max: f64) -> Vec<Complex64> {
    let re = weyl(n, 2f64.sqrt() - 1.0, -1.5, 2.5);
    let im = weyl(n, (5f64.sqrt() - 1.0) / 2.0, -im_max, im_max);
    re.into_iter().zip(im).map(|(a, b)| cpx(a, b)).collect()
}

fn functional_equations() -> Result<Verdict> {
    let one = cpx(1.0, 0.0);
    let mut worst = 0.0f64;
    for s in sample_points(200, 100.0) {
        let z = zeta(s)?;
        let r = (z - chi_plus(s)? * zeta(one - s)?).norm() / (1.0 + z.norm());
        worst = worst.max(r);
    }
    let chi = DirichletCharacter::legendre(5)?;
    let mut worst_l = 0.0f64;
    for s in sample_points(50, 50.0) {
        let l = dirichlet_l(s, &chi)?;
        worst_l = worst_l.max(dirichlet_functional_equation_residual(s, &chi)? / (1.0 + l.norm()));
    }
    verdict(
        worst <= 1e-10 && worst_l <= 1e-10,
        format!(
            "zeta worst {worst:.2e} (200 pts), L(s,chi_5) worst {worst_l:.2e} (50 pts), tol 1e-10"
        ),
    )
}

const INTERTWINING: [&str; 3] = ["bump_half_two", "bump_log3", "bump_below_one"];

fn intertwining() -> Result<Verdict> {
    let grid = default_intertwining_grid();
    let mut worst = 0.0f64;
    for name in INTERTWINING {
        worst = worst.max(intertwining_residual(&corpus_entry(name)?, &grid)?.residual);
    }
    let g = corpus_entry("bump_half_two")?;
    let corrupted = g.plus(0.01, &bump_on(0.5, 2.0, 1.0)?);
    let sens = intertwining_residual_pair(&corrupted, &g, &grid)?.residual;
    verdict(
        worst < 1e-6 && sens > 1e-3,
        format!(
            "worst residual {worst:.2e} on {} pts, corrupted input {sens:.2e}",
            grid.len()
        ),
    )
}

fn special_value() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for name in ["bump_half_two", "bump_log3", "moment_free_half_two"] {
        let (lhs, rhs) = special_value_check(&corpus_entry(name)?)?;
        worst = worst.max((lhs - rhs).abs());
    }
    verdict(
        worst < 1e-7,
        format!("worst |lhs + (1/2) int g| = {worst:.2e}"),
    )
}

fn sonine() -> Result<Verdict> {
    let mut pass = true;
    let mut parts = Vec::new();
    for lam in [0.3, 0.5, 0.7] {
        let raw = bump_on(lam, 1.0 / lam, 1.0)?;
        let full = sonine_check(&copoisson_member(&enforce_moments(&raw)?, lam)?, lam, 1e-8);
        let mut ablations_fail = true;
        for which in [Moment::Mass, Moment::Inverse] {
            let g = enforce_single_moment(&raw, which)?;
            ablations_fail &= !sonine_check(&copoisson_member(&g, lam)?, lam, 1e-8).pass;
        }
        pass &= full.pass && ablations_fail;
        let rel = full.sup_f_near_zero.max(full.sup_ff_near_zero) / full.l2_norm;
        parts.push(format!(
            "lambda {lam}: {rel:.1e}{}",
            if ablations_fail {
                ""
            } else {
                " ablation passed"
            }
        ));
    }
    for (n, eps, target) in [(1, 0.1, 0.8), (4, 0.2, 1.5)] {
        let (k, lam) = kahane_sonine(n, eps)?;
        let ok = lam >= target - 1e-12 && sonine_check(&k, target, 1e-8).pass;
        pass &= ok;
        parts.push(format!(
            "Kahane N={n} lambda {lam:.3} at {target}: {}",
            if ok { "ok" } else { "fails" }
        ));
    }
    verdict(pass, parts.join("; "))
}

fn completed_mellin() -> Result<Verdict> {
    let samples = default_line_samples();
    let g = enforce_moments(&bump_on(0.5, 2.0, 1.0)?)?;
    let cp = completed_mellin_fe_residual(&copoisson_member(&g, 0.5)?, &samples)?;
    let (k1, _) = kahane_sonine(1, 0.1)?;
    let r1 = completed_mellin_fe_residual(&k1, &samples)?;
    let (k4, _) = kahane_sonine(4, 0.2)?;
    let r4 = completed_mellin_fe_residual(&k4, &samples)?;
    verdict(
        cp.max(r1).max(r4) < 1e-5,
        format!(
            "{} pts: co-Poisson {cp:.1e}, Kahane N=1 {r1:.1e}, N=4 {r4:.1e}",
            samples.len()
        ),
    )
}

const EXPLICIT: [&str; 5] = [
    "bump_half_two",
    "bump_one_forty",
    "bump_log3",
    "bump_below_one",
    "bump_wide",
];

fn explicit_formula(zeros: &ZeroList) -> Result<Verdict> {
    let z = zeros.prefix(500);
    let mut worst = 0.0f64;
    for name in EXPLICIT {
        let r = explicit_formula_report(&corpus_entry(name)?, &z)?;
        worst = worst.max(r.residual).max(r.recomputed_residual());
    }
    verdict(
        worst < 1e-6,
        format!("worst residual {worst:.2e} over 5 bumps, 500 zeros"),
    )
}

fn von_mangoldt(zeros: &ZeroList) -> Result<Verdict> {
    // ψ(10.5) = log lcm(1..10) = log 2520.
    let oracle = 2520f64.ln();
    let (lhs, rhs) = von_mangoldt_sides(10.5, zeros, false)?;
    let counts = [100, 200, 400, 800, 1600, 2000];
    let table = von_mangoldt_convergence(10.5, zeros, &counts)?;
    let monotone = table.windows(2).all(|w| w[1].envelope < w[0].envelope);
    let res = (lhs - rhs).abs();
    let envelope: Vec<String> = table.iter().map(|r| format!("{:.4}", r.envelope)).collect();
    verdict(
        (lhs - oracle).abs() < 1e-12 && res < 0.02 && monotone,
        format!(
            "lhs {lhs:.10} (log 2520 {oracle:.10}), |lhs-rhs| {res:.4}, envelope {}",
            envelope.join(" > ")
        ),
    )
}

/// `Re e^{iθ(t)} ζ(1/2+it)` with ζ taken from the Hurwitz function at `a = 1`.
fn oracle_z(t: f64) -> Result<f64> {
    let th = gamma_ln(cpx(0.25, 0.5 * t))?.im - 0.5 * t * PI.ln();
    Ok((Complex64::from_polar(1.0, th) * hurwitz_zeta(cpx(0.5, t), 1.0)?).re)
}

/// First `n` sign changes of the oracle Z on a 0.05 grid, bisected.
fn oracle_zeros(n: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let (mut a, mut fa) = (10.0, oracle_z(10.0)?);
    while out.len() < n {
        let b = a + 0.05;
        let fb = oracle_z(b)?;
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = oracle_z(mid)?;
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

fn zeros_check(zeros: &ZeroList, elapsed: Duration) -> Result<Verdict> {
    let oracle = oracle_zeros(3)?;
    let first = zeros.ordinates()[..3]
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let n200 = count_below(zeros, 200.0);
    let rvm = riemann_von_mangoldt(200.0);
    let sum = zero_sum_inv_sq(zeros, ZeroWeighting::Once);
    let closed = 2.0 + EULER_GAMMA - (4.0 * PI).ln();
    let rel = (sum - closed).abs() / closed;
    verdict(
        first < 1e-8 && (n200 as f64 - rvm).abs() <= 1.0 && rel < 0.05,
        format!(
            "first 3 vs oracle {first:.1e}, N(200) = {n200} vs {rvm:.2}, zero sum {sum:.6} vs {closed:.6} ({:.1}%), {} zeros in {:.1} s",
            100.0 * rel,
            zeros.count(),
            elapsed.as_secs_f64()
        ),
    )
}

fn nyman_beurling(zeros: &ZeroList) -> Result<Verdict> {
    let frac_oracle = (2.0 * PI).ln() - EULER_GAMMA;
    let cross_oracle = 1.0 - EULER_GAMMA;
    let frac = ip_frac(1.0, 1.0)?;
    let cross = ip_cross(1.0)?;
    let d2_oracle = 1.0 - cross_oracle * cross_oracle / frac_oracle;
    let d2 = solve_distance(1.0, 1, DEFAULT_CUTOFF)?.d2;
    let values_ok = (frac - frac_oracle).abs() < 1e-7
        && (cross - cross_oracle).abs() < 1e-7
        && (d2 - d2_oracle).abs() < 1e-7;
    // 1.2606560 circulates as this value but is wrong in the sixth digit.
    let quoted_gap = (frac - 1.2606560).abs();

    let mut monotone = true;
    let mut systems = Vec::new();
    let mut prev = f64::INFINITY;
    for lam in [0.2, 0.1, 0.05] {
        let coarse = solve_thetas(&octave_thetas(lam, 4)?, DEFAULT_CUTOFF)?.d2;
        let fine = solve_thetas(&octave_thetas(lam, 8)?, DEFAULT_CUTOFF)?;
        monotone &= fine.d2 <= coarse && fine.d2 <= prev;
        prev = fine.d2;
        systems.push((lam, fine));
    }
    let rows = bound_report(&systems, zeros)?;
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("{}:{:.4}", r.lambda, r.d2))
        .collect();
    verdict(
        values_ok && monotone && rows.len() == 3,
        format!(
            "ip_frac(1,1) {frac:.10} (log 2pi - gamma), ip_cross(1) {cross:.10}, D2(1,1) {d2:.7}; D2 {}; 1.2606560 is off by {quoted_gap:.1e}",
            table.join(" ")
        ),
    )
}

fn twisted() -> Result<Verdict> {
    let chi = DirichletCharacter::legendre(5)?;
    let r = twisted_intertwining_residual(
        &bump_on(0.5, 2.0, 1.0)?,
        &chi,
        &default_intertwining_grid(),
    )?;
    verdict(
        r.residual < 1e-6 && r.vanishing_sup < 1e-7,
        format!(
            "residual {:.1e}, vanishing {:.1e}",
            r.residual, r.vanishing_sup
        ),
    )
}

fn main() {
    let mut failures = 0;
    let mut report =
        |n: usize, name: &str, limit: Option<f64>, start: Instant, v: Result<Verdict>| {
            let secs = start.elapsed().as_secs_f64();
            let (pass, detail) = match v {
                Ok(v) => (v.pass, v.detail),
                Err(e) => (false, format!("error: {e}")),
            };
            let in_time = limit.map_or(true, |l| secs < l);
            let ok = pass && in_time;
            if !ok {
                failures += 1;
            }
            let budget = limit
                .map(|l| format!(", limit {l:.0} s"))
                .unwrap_or_default();
            println!(
                "criterion {n:>2} {} {name} [{secs:.1} s{budget}] {detail}",
                if ok { "PASS" } else { "FAIL" }
            );
        };

    let t = Instant::now();
    report(
        1,
        "functional equations",
        Some(10.0),
        t,
        functional_equations(),
    );
    let t = Instant::now();
    report(2, "co-Poisson intertwining", Some(60.0), t, intertwining());
    let t = Instant::now();
    report(3, "special value", None, t, special_value());
    let t = Instant::now();
    report(4, "Sonine membership", None, t, sonine());
    let t = Instant::now();
    report(5, "completed Mellin symmetry", None, t, completed_mellin());

    let t = Instant::now();
    let zeros = find_zeros(2000);
    let zero_time = t.elapsed();
    match zeros {
        Ok(zeros) => {
            let t = Instant::now();
            report(
                6,
                "explicit formula",
                Some(300.0),
                t,
                explicit_formula(&zeros),
            );
            let t = Instant::now();
            report(7, "von Mangoldt formula", None, t, von_mangoldt(&zeros));
            let t = Instant::now();
            report(8, "zeros", None, t, zeros_check(&zeros, zero_time));
            let t = Instant::now();
            report(9, "Nyman-Beurling", None, t, nyman_beurling(&zeros));
        }
        Err(e) => {
            for (n, name) in [
                (6, "explicit formula"),
                (7, "von Mangoldt formula"),
                (8, "zeros"),
                (9, "Nyman-Beurling"),
            ] {
                report(n, name, None, Instant::now(), Err(e.clone()));
            }
        }
    }
    let t = Instant::now();
    report(10, "twisted intertwining", None, t, twisted());

    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
