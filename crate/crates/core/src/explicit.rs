//! The explicit formula: von Mangoldt's formula for `ψ(X)` and Weil's form
//! against a compactly supported test function.
//!
//! Conventions, with `ĝ(s) = ∫ g(u) u^{s−1} du`:
//!
//! ```text
//! Σ_ρ ĝ(ρ) − ĝ(0) − ĝ(1) = arch − prime
//! prime = Σ_p Σ_k log p · (g(p^k) + p^{−k} g(p^{−k}))
//! arch  = −(1/2π) ∫ ĝ(1/2+iτ) (log π − Re ψ(1/4 + iτ/2)) dτ
//! ```

use crate::specfun::{chebyshev_psi, digamma, primes_up_to};
use crate::testfn::SmoothTestFunction;
use crate::zeros::ZeroList;
use crate::{cpx, Complex64, Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Default spacing of the trapezoidal `τ` grid for the archimedean integral.
pub const ARCH_STEP: f64 = 0.05;
const ARCH_BLOCK: f64 = 25.0;
const ARCH_CAP: f64 = 4000.0;

/// Both sides of von Mangoldt's formula at `X`:
/// `ψ(X)` and `X − Σ_ρ X^ρ/ρ − log 2π − ½ log(1 − X^{−2})`, the zero sum
/// taken over conjugate pairs in increasing height.
///
/// At a prime power the boundary term `Λ(X)/2` is only allowed with
/// `weight_boundary`.
pub fn von_mangoldt_sides(x: f64, zeros: &ZeroList, weight_boundary: bool) -> Result<(f64, f64)> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "von Mangoldt formula needs X > 1, got {x}"
        )));
    }
    if zeros.is_empty() {
        return Err(Error::Domain("empty zero list".into()));
    }
    if !weight_boundary && is_prime_power(x) {
        return Err(Error::Domain(format!(
            "X = {x} is a prime power; pass the boundary flag"
        )));
    }
    let lhs = chebyshev_psi(x, true);
    let rhs = von_mangoldt_partial(x, zeros.ordinates())
        .last()
        .copied()
        .unwrap_or(f64::NAN);
    Ok((lhs, rhs))
}

fn is_prime_power(x: f64) -> bool {
    if x.fract() != 0.0 || !(2.0..=9.0e15).contains(&x) {
        return false;
    }
    crate::specfun::mangoldt(x as u64) > 0.0
}

/// Right-hand side after each zero pair.
fn von_mangoldt_partial(x: f64, ordinates: &[f64]) -> Vec<f64> {
    let lx = x.ln();
    let base = x - (2.0 * PI).ln() - 0.5 * (1.0 - 1.0 / (x * x)).ln();
    let mut acc = crate::quad::Neumaier::new();
    ordinates
        .iter()
        .map(|&g| {
            let rho = cpx(0.5, g);
            let term = (rho * lx).exp() / rho;
            acc.add(2.0 * term.re);
            base - acc.value()
        })
        .collect()
}

/// One line of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub zeros_used: usize,
    pub residual: f64,
    /// Largest residual over zero counts from this row up to the next one.
    pub envelope: f64,
}

/// `|ψ(X) − rhs|` at each count in `counts` (increasing), with the envelope
/// taken over every intermediate count.
pub fn von_mangoldt_convergence(
    x: f64,
    zeros: &ZeroList,
    counts: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    check_counts(counts, zeros.count())?;
    let (lhs, _) = von_mangoldt_sides(x, &zeros.prefix(1), true)?;
    let partial = von_mangoldt_partial(x, zeros.ordinates());
    let err: Vec<f64> = partial.iter().map(|r| (lhs - r).abs()).collect();
    Ok(table(counts, &err))
}

fn check_counts(counts: &[usize], available: usize) -> Result<()> {
    if counts.is_empty() || counts.windows(2).any(|w| w[1] <= w[0]) || counts[0] == 0 {
        return Err(Error::Domain(
            "zero counts must be positive and increasing".into(),
        ));
    }
    if *counts.last().unwrap_or(&0) > available {
        return Err(Error::Domain(format!(
            "table needs {} zeros, only {available} available",
            counts.last().unwrap_or(&0)
        )));
    }
    Ok(())
}

fn table(counts: &[usize], err: &[f64]) -> Vec<ConvergenceRow> {
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let end = counts
                .get(i + 1)
                .copied()
                .unwrap_or(c + 1)
                .min(err.len() + 1);
            let envelope = err[c - 1..end - 1].iter().cloned().fold(0.0, f64::max);
            ConvergenceRow {
                zeros_used: c,
                residual: err[c - 1],
                envelope,
            }
        })
        .collect()
}

/// `zeros_used,residual` CSV.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("zeros_used,residual\n");
    for r in rows {
        out.push_str(&format!("{},{:.6e}\n", r.zeros_used, r.residual));
    }
    out
}

/// The zero side of Weil's formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroSide {
    /// `Σ_ρ ĝ(ρ)` over the supplied zeros and their conjugates.
    pub sum: Complex64,
    /// `ĝ(0) + ĝ(1)`.
    pub poles: f64,
    /// Estimated contribution of the zeros above the last one supplied.
    pub tail_estimate: f64,
    pub zeros_used: usize,
}

impl ZeroSide {
    /// `Σ_ρ ĝ(ρ) − ĝ(0) − ĝ(1)`.
    pub fn value(&self) -> Complex64 {
        self.sum - self.poles
    }
}

fn g_hat(g: &SmoothTestFunction, s: Complex64) -> Complex64 {
    g.mellin_left(s)
}

/// `Σ_ρ ĝ(ρ) − ĝ(0) − ĝ(1)` with `ĝ(s) = ∫ g(u) u^{s−1} du`.
///
/// The tail estimate integrates `2|ĝ(1/2+iτ)|` against the zero density
/// `log(τ/2π)/2π` above the last ordinate.
pub fn weil_zero_side(g: &SmoothTestFunction, zeros: &ZeroList) -> Result<ZeroSide> {
    let ords = zeros.ordinates();
    let terms = crate::par::map(ords, 32, |&gm| {
        Ok(g_hat(g, cpx(0.5, gm)) + g_hat(g, cpx(0.5, -gm)))
    })?;
    let mut re = crate::quad::Neumaier::new();
    let mut im = crate::quad::Neumaier::new();
    for t in &terms {
        re.add(t.re);
        im.add(t.im);
    }
    let poles = g_hat(g, cpx(0.0, 0.0)).re + g_hat(g, cpx(1.0, 0.0)).re;
    let top = ords.last().copied().unwrap_or(0.0);
    Ok(ZeroSide {
        sum: cpx(re.value(), im.value()),
        poles,
        tail_estimate: zero_tail(g, top),
        zeros_used: ords.len(),
    })
}

fn zero_tail(g: &SmoothTestFunction, from: f64) -> f64 {
    let step = 1.0;
    let floor = 1e-14 * g_hat(g, cpx(0.5, 0.0)).norm();
    let mut acc = 0.0;
    let mut t = from.max(1.0);
    let mut quiet = 0;
    while quiet < 20 && t < ARCH_CAP {
        let v = g_hat(g, cpx(0.5, t)).norm();
        acc += 2.0 * v * ((t / (2.0 * PI)).ln().max(0.0) / (2.0 * PI)) * step;
        quiet = if v < floor { quiet + 1 } else { 0 };
        t += step;
    }
    acc
}

/// `Σ_p Σ_k log p · (g(p^k) + p^{−k} g(p^{−k}))` over prime powers in the
/// support of `g` or of its involution.
pub fn weil_prime_side(g: &SmoothTestFunction) -> f64 {
    let (a, b) = g.support();
    let top = b.max(1.0 / a);
    if top <= 2.0 {
        return 0.0;
    }
    let mut acc = crate::quad::Neumaier::new();
    for p in primes_up_to(top.floor() as u64) {
        let lp = (p as f64).ln();
        let mut pk = p as f64;
        while pk < top {
            if pk > a && pk < b {
                acc.add(lp * g.eval(pk));
            }
            let inv = 1.0 / pk;
            if inv > a && inv < b {
                acc.add(lp * inv * g.eval(inv));
            }
            pk *= p as f64;
        }
    }
    acc.value()
}

/// The archimedean term together with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArchTerm {
    pub value: f64,
    /// Imaginary part of the trapezoidal sum; zero for real `g`.
    pub imag: f64,
    pub tau_max: f64,
    pub step: f64,
}

/// `log π − Re ψ(1/4 + iτ/2)`, i.e. `d/ds log χ₊(s)` on the critical line.
pub fn arch_kernel(tau: f64) -> Result<f64> {
    Ok(PI.ln() - digamma(cpx(0.25, 0.5 * tau))?.re)
}

/// `ĝ(1/2 + iτ)` on a uniform `τ` grid from one fixed rule in `x = log u`:
/// `ĝ = ∫ g(e^x) e^{x/2} e^{iτx} dx`, advanced in `τ` by rotating phases and
/// re-anchored with exact exponentials every 128 steps.
fn line_values(g: &SmoothTestFunction, step: f64, n: usize, sign: f64) -> Vec<Complex64> {
    let (xs, ws) = g.log_rule(step * n as f64, 1);
    let wg: Vec<f64> = xs
        .iter()
        .zip(&ws)
        .map(|(x, w)| w * g.eval(x.exp()) * (0.5 * x).exp())
        .collect();
    let rot: Vec<Complex64> = xs
        .iter()
        .map(|x| Complex64::from_polar(1.0, sign * step * x))
        .collect();
    let mut phase: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); xs.len()];
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k % 128 == 0 {
            let t = sign * step * k as f64;
            for (p, x) in phase.iter_mut().zip(&xs) {
                *p = Complex64::from_polar(1.0, t * x);
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, w) in phase.iter().zip(&wg) {
            acc += p * *w;
        }
        out.push(acc);
        for (p, r) in phase.iter_mut().zip(&rot) {
            *p *= r;
        }
    }
    out
}

/// Trapezoidal archimedean term on the grid `τ = k·step`, `|τ| ≤ tau_max`.
pub fn weil_arch_term(g: &SmoothTestFunction, step: f64, tau_max: f64) -> Result<ArchTerm> {
    if !(step > 0.0 && tau_max > 0.0) {
        return Err(Error::Domain(
            "arch grid needs positive step and range".into(),
        ));
    }
    let n = (tau_max / step).round() as usize;
    let up = line_values(g, step, n, 1.0);
    let down = line_values(g, step, n, -1.0);
    let mut re = crate::quad::Neumaier::new();
    let mut im = crate::quad::Neumaier::new();
    for k in 0..=n {
        let kern = arch_kernel(k as f64 * step)?;
        let w = if k == n { 0.5 * step } else { step };
        // τ = 0 is shared by both halves.
        let v = if k == 0 { up[0] } else { up[k] + down[k] };
        re.add(w * kern * v.re);
        im.add(w * kern * v.im);
    }
    Ok(ArchTerm {
        value: -re.value() / (2.0 * PI),
        imag: -im.value() / (2.0 * PI),
        tau_max: n as f64 * step,
        step,
    })
}

/// Smallest multiple of 25 beyond which the remaining archimedean integrand,
/// estimated as `block · max |ĝ(1/2+iτ)| · (1 + log τ)`, stays under `tol`
/// relative to `|ĝ(1/2)|`.
pub fn arch_range(g: &SmoothTestFunction, tol: f64) -> Result<f64> {
    let peak = g_hat(g, cpx(0.5, 0.0)).norm().max(1e-300);
    let mut t0 = 0.0;
    let mut rest = f64::INFINITY;
    while t0 < ARCH_CAP {
        rest = (0..=25)
            .map(|i| {
                let t = t0 + ARCH_BLOCK * i as f64 / 25.0;
                g_hat(g, cpx(0.5, t)).norm() * (1.0 + t.max(1.0).ln())
            })
            .fold(0.0, f64::max)
            * ARCH_BLOCK;
        t0 += ARCH_BLOCK;
        if rest < tol * peak {
            return Ok(t0);
        }
    }
    Err(Error::TailBound {
        what: "archimedean integral range".into(),
        estimate: rest / peak,
        tolerance: tol,
    })
}

/// Archimedean term on the default grid, with the range chosen by
/// [`arch_range`] at relative tolerance `1e−10`.
pub fn weil_arch_auto(g: &SmoothTestFunction) -> Result<ArchTerm> {
    let tau_max = arch_range(g, 1e-10)?;
    weil_arch_term(g, ARCH_STEP, tau_max)
}

/// The contribution of one prime as a critical-line integral,
/// `−(1/2π) ∫ ĝ(s) d/ds log[(1 − p^{s−1})/(1 − p^{−s})] dτ`, for checking the
/// prime-power expansion.
pub fn local_factor_line_integral(
    g: &SmoothTestFunction,
    p: u64,
    step: f64,
    tau_max: f64,
) -> Result<f64> {
    let lp = (p as f64).ln();
    let one = Complex64::new(1.0, 0.0);
    let n = (tau_max / step).round() as i64;
    let mut acc = crate::quad::Neumaier::new();
    for k in -n..=n {
        let s = cpx(0.5, k as f64 * step);
        let a = (-(s * lp)).exp();
        let b = ((s - 1.0) * lp).exp();
        // d/ds log(1 − p^{s−1}) − d/ds log(1 − p^{−s})
        let d = -lp * b / (one - b) - lp * a / (one - a);
        let w = if k.abs() == n { 0.5 * step } else { step };
        acc.add(w * (g_hat(g, s) * d).re);
    }
    Ok(-acc.value() / (2.0 * PI))
}

/// Weil's formula evaluated side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplicitFormulaReport {
    /// `Σ_ρ ĝ(ρ)` (real part).
    pub zero_side: f64,
    pub zero_side_imag: f64,
    pub prime_side: f64,
    pub arch_term: f64,
    /// `ĝ(0) + ĝ(1)`.
    pub pole_terms: f64,
    /// `|zero_side − (pole_terms − prime_side + arch_term)|`.
    pub residual: f64,
    pub zeros_used: usize,
    pub tail_estimate: f64,
    pub arch_tau_max: f64,
    pub arch_step: f64,
}

impl ExplicitFormulaReport {
    /// The residual recomputed from the stored parts.
    pub fn recomputed_residual(&self) -> f64 {
        (self.zero_side - (self.pole_terms - self.prime_side + self.arch_term)).abs()
    }
}

/// All three sides of Weil's formula for `g` with the given zeros.
pub fn explicit_formula_report(
    g: &SmoothTestFunction,
    zeros: &ZeroList,
) -> Result<ExplicitFormulaReport> {
    let z = weil_zero_side(g, zeros)?;
    let prime = weil_prime_side(g);
    let arch = weil_arch_auto(g)?;
    let mut r = ExplicitFormulaReport {
        zero_side: z.sum.re,
        zero_side_imag: z.sum.im,
        prime_side: prime,
        arch_term: arch.value,
        pole_terms: z.poles,
        residual: 0.0,
        zeros_used: z.zeros_used,
        tail_estimate: z.tail_estimate,
        arch_tau_max: arch.tau_max,
        arch_step: arch.step,
    };
    r.residual = r.recomputed_residual();
    Ok(r)
}

/// Weil residual at each zero count in `counts`.
pub fn weil_convergence(
    g: &SmoothTestFunction,
    zeros: &ZeroList,
    counts: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    check_counts(counts, zeros.count())?;
    let last = *counts.last().unwrap_or(&0);
    let ords = &zeros.ordinates()[..last];
    let target = weil_arch_auto(g)?.value - weil_prime_side(g)
        + g_hat(g, cpx(0.0, 0.0)).re
        + g_hat(g, cpx(1.0, 0.0)).re;
    let terms = crate::par::map(ords, 32, |&gm| Ok(2.0 * g_hat(g, cpx(0.5, gm)).re))?;
    let mut acc = crate::quad::Neumaier::new();
    let err: Vec<f64> = terms
        .iter()
        .map(|t| {
            acc.add(*t);
            (acc.value() - target).abs()
        })
        .collect();
    Ok(table(counts, &err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::{bump, bump_on, corpus_entry};
    use crate::zeros::find_zeros;
    use std::sync::OnceLock;

    fn zeros() -> &'static ZeroList {
        static Z: OnceLock<ZeroList> = OnceLock::new();
        Z.get_or_init(|| find_zeros(2000).unwrap())
    }

    /// `ψ(X)` by trial division, independent of the sieve.
    fn psi_oracle(x: f64) -> f64 {
        let mut acc = 0.0;
        for n in 2..=(x.floor() as u64) {
            let mut p = 2;
            while n % p != 0 {
                p += 1;
            }
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            if m == 1 {
                acc += (p as f64).ln();
            }
        }
        acc
    }

    #[test]
    fn von_mangoldt_examples() {
        let z = zeros();
        let (l, r) = von_mangoldt_sides(10.5, z, false).unwrap();
        assert!((l - psi_oracle(10.5)).abs() < 1e-13);
        assert!((l - 7.832_014_180_505_469).abs() < 1e-12);
        assert!((l - r).abs() < 0.02, "{l} vs {r}");
        let (l, r) = von_mangoldt_sides(1.5, z, false).unwrap();
        assert_eq!(l, 0.0);
        assert!(r.abs() < 0.02);
        assert!(von_mangoldt_sides(8.0, z, false).is_err());
        assert!(von_mangoldt_sides(8.0, z, true).is_ok());
        assert!(von_mangoldt_sides(0.5, z, false).is_err());
    }

    #[test]
    fn von_mangoldt_envelope_shrinks() {
        let counts = [100, 200, 400, 800, 1600, 2000];
        let rows = von_mangoldt_convergence(10.5, zeros(), &counts).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].envelope < w[0].envelope, "{rows:?}");
        }
        let csv = convergence_csv(&rows);
        assert!(csv.starts_with("zeros_used,residual\n100,"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn prime_side_respects_support() {
        let g = bump_on(1.0, 50.0, 1.0).unwrap();
        let direct: f64 = crate::specfun::primes_up_to(50)
            .into_iter()
            .flat_map(|p| (1..6).map(move |k| (p, (p as f64).powi(k))))
            .filter(|(_, pk)| *pk < 50.0)
            .map(|(p, pk)| (p as f64).ln() * g.eval(pk))
            .sum();
        assert!((weil_prime_side(&g) - direct).abs() < 1e-13);
        let h = g.involute();
        let direct: f64 = crate::specfun::primes_up_to(50)
            .into_iter()
            .flat_map(|p| (1..6).map(move |k| (p, (p as f64).powi(k))))
            .filter(|(_, pk)| *pk < 50.0)
            .map(|(p, pk)| (p as f64).ln() / pk * h.eval(1.0 / pk))
            .sum();
        assert!((weil_prime_side(&h) - direct).abs() < 1e-13);
        let g = bump(3f64.ln(), 0.05, 1.0).unwrap();
        assert_eq!(weil_prime_side(&g), 3f64.ln() * g.eval(3.0));
    }

    #[test]
    fn zero_function_gives_zero_sides() {
        let g = bump_on(0.5, 2.0, 1.0).unwrap().scaled(0.0);
        let z = weil_zero_side(&g, &zeros().prefix(20)).unwrap();
        assert_eq!(z.value(), cpx(0.0, 0.0));
        assert_eq!(weil_arch_term(&g, 0.1, 50.0).unwrap().value, 0.0);
    }

    #[test]
    fn involution_symmetric_zero_side_is_real() {
        let g = bump(0.0, 0.7, 1.0).unwrap();
        let z = weil_zero_side(&g, &zeros().prefix(200)).unwrap();
        assert!(z.sum.im.abs() < 1e-10);
    }

    #[test]
    fn arch_term_is_grid_stable() {
        let g = corpus_entry("bump_one_forty").unwrap();
        let r = arch_range(&g, 1e-10).unwrap();
        let a = weil_arch_term(&g, ARCH_STEP, r).unwrap();
        let b = weil_arch_term(&g, 2.0 * ARCH_STEP, r).unwrap();
        assert!((a.value - b.value).abs() < 1e-8);
        assert!(a.imag.abs() < 1e-10);
    }

    #[test]
    fn single_prime_line_integral_matches_expansion() {
        let g = bump(3f64.ln(), 0.5, 1.0).unwrap();
        let sum = 3f64.ln() * (g.eval(3.0) + g.eval(9.0) + g.eval(1.0 / 3.0) / 3.0);
        let line = local_factor_line_integral(&g, 3, 0.05, arch_range(&g, 1e-10).unwrap()).unwrap();
        assert!((line - sum).abs() < 1e-7, "{line} vs {sum}");
    }

    #[test]
    fn weil_identity_closes() {
        let z = zeros().prefix(500);
        let g = corpus_entry("bump_one_forty").unwrap();
        let r = explicit_formula_report(&g, &z).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
        assert_eq!(r.residual, r.recomputed_residual());
        // Dilation moves primes in and out of the support.
        let d = corpus_entry("bump_half_two").unwrap().dilate(1.7).unwrap();
        let r = explicit_formula_report(&d, &z).unwrap();
        assert!(r.prime_side > 0.0);
        assert!(r.residual < 2e-6, "{r:?}");
    }

    #[test]
    fn tail_estimate_bounds_doubling() {
        for name in ["bump_log3", "bump_below_one"] {
            let g = corpus_entry(name).unwrap();
            let a = weil_zero_side(&g, &zeros().prefix(500)).unwrap();
            let b = weil_zero_side(&g, &zeros().prefix(1000)).unwrap();
            assert!((a.sum - b.sum).norm() <= a.tail_estimate, "{name}");
        }
    }

    #[test]
    fn weil_convergence_table() {
        let g = corpus_entry("bump_below_one").unwrap();
        let rows = weil_convergence(&g, zeros(), &[50, 100, 200, 500]).unwrap();
        assert!(rows[3].residual < 1e-6);
        assert!(rows[0].residual > rows[3].residual);
        assert!(weil_convergence(&g, zeros(), &[100, 50]).is_err());
    }
}
