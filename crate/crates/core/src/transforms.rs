//! Fourier cosine transform, critical-line Mellin sampling and inversion,
//! scale-invariant multipliers, and the Poisson/co-Poisson summation maps.

use crate::quad::{clenshaw_curtis, composite_rule, gauss_legendre, Neumaier};
use crate::specfun::{chi_plus, DirichletCharacter};
use crate::testfn::{moments, Convention, PiecewiseFunction, RealFunction, SmoothTestFunction};
use crate::{cpx, Complex64, ComplexPoint, Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

const PANEL_ORDER: usize = 20;

/// Panel rule for `∫ f(t) cos(2π t u) dt` valid for all `|u| ≤ u_max`.
fn oscillatory_rule(
    f: &dyn RealFunction,
    lo: f64,
    hi: f64,
    u_max: f64,
    align: bool,
) -> (Vec<f64>, Vec<f64>) {
    let mut cuts = f.breakpoints(lo, hi);
    let half = if u_max > 0.0 {
        0.5 / u_max
    } else {
        f64::INFINITY
    };
    let cc = align && u_max * (hi - lo) > 4.0;
    // A 20-point Gauss panel integrates one full period to machine precision.
    let limit = if cc { half } else { 2.0 * half };
    if cc {
        // cos(2π t u) vanishes at t = (k + 1/2)/(2u).
        let k0 = (lo * 2.0 * u_max - 0.5).ceil().max(0.0) as i64;
        let mut k = k0;
        loop {
            let z = (k as f64 + 0.5) * half;
            if z >= hi {
                break;
            }
            if z > lo {
                cuts.push(z);
            }
            k += 1;
        }
    }
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cut"));
    cuts.dedup();
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for pair in cuts.windows(2) {
        let (mut a, b) = (pair[0], pair[1]);
        while a < b {
            let mid_scale = f.scale(a).max(1e-6);
            let width = limit.min(0.125 * mid_scale).min(b - a);
            let end = if b - (a + width) < 1e-3 * width {
                b
            } else {
                a + width
            };
            if cc {
                let first = xs.len();
                clenshaw_curtis(16).push_mapped(a, end, &mut xs, &mut ws);
                // Keep the closed rule off the panel ends, where jumps sit.
                let nudge = 1e-13 * (end - a);
                xs[first] += nudge;
                let last = xs.len() - 1;
                xs[last] -= nudge;
            } else {
                gauss_legendre(PANEL_ORDER).push_mapped(a, end, &mut xs, &mut ws);
            }
            a = end;
        }
    }
    (xs, ws)
}

fn finite_extent(f: &dyn RealFunction) -> Result<(f64, f64)> {
    let (a, b) = f.extent();
    if !b.is_finite() {
        return Err(Error::TailBound {
            what: "cosine transform of a slowly decaying input".into(),
            estimate: f64::INFINITY,
            tolerance: 0.0,
        });
    }
    Ok((a.max(0.0), b))
}

/// `F₊(f)(u) = 2 ∫₀^∞ cos(2π t u) f(t) dt`.
///
/// Errors for inputs without a finite extent; use
/// [`cosine_transform_window`] with an explicit truncation for those.
pub fn cosine_transform(f: &dyn RealFunction, u: f64) -> Result<f64> {
    let (a, b) = finite_extent(f)?;
    Ok(cosine_on(f, a, b, u))
}

fn cosine_on(f: &dyn RealFunction, a: f64, b: f64, u: f64) -> f64 {
    let (xs, ws) = oscillatory_rule(f, a, b, u.abs(), true);
    let mut acc = Neumaier::new();
    for (x, w) in xs.iter().zip(&ws) {
        acc.add(w * f.eval(*x) * (2.0 * PI * x * u).cos());
    }
    2.0 * acc.value()
}

/// Cosine transform over `[0, window]`, with the truncation error bounded by
/// `window^{1-p}/(p-1)·sup_{t≥window}|f| t^p` when `f` decays like `t^{-p}`.
/// Returns the value and that bound; errors when the input does not decay
/// faster than `1/t`.
pub fn cosine_transform_window(
    f: &dyn RealFunction,
    u: f64,
    window: f64,
    decay: f64,
) -> Result<(f64, f64)> {
    if decay <= 1.0 {
        return Err(Error::TailBound {
            what: format!("cosine transform: integrand decays like t^-{decay}, not integrable"),
            estimate: f64::INFINITY,
            tolerance: 0.0,
        });
    }
    let (a, b) = f.extent();
    let hi = b.min(window);
    let value = cosine_on(f, a.max(0.0), hi, u);
    let bound = if b <= window {
        0.0
    } else {
        let probe = (0..16)
            .map(|k| {
                let t = window * (1.0 + k as f64 / 4.0);
                f.eval(t).abs() * t.powf(decay)
            })
            .fold(0.0f64, f64::max);
        2.0 * probe * window.powf(1.0 - decay) / (decay - 1.0)
    };
    Ok((value, bound))
}

/// Cosine transform evaluated at many frequencies from one set of samples.
#[derive(Debug, Clone)]
pub struct BatchCosine {
    nodes: Vec<f64>,
    weighted: Vec<f64>,
    u_max: f64,
}

impl BatchCosine {
    /// Samples `f` on `[lo, hi]` with panels fine enough for `|u| ≤ u_max`.
    pub fn new(f: &dyn RealFunction, lo: f64, hi: f64, u_max: f64) -> BatchCosine {
        let (xs, ws) = oscillatory_rule(f, lo, hi, u_max, false);
        let mut nodes = Vec::with_capacity(xs.len());
        let mut weighted = Vec::with_capacity(xs.len());
        for (x, w) in xs.iter().zip(&ws) {
            let v = f.eval(*x);
            if v != 0.0 {
                nodes.push(*x);
                weighted.push(2.0 * w * v);
            }
        }
        BatchCosine {
            nodes,
            weighted,
            u_max,
        }
    }

    /// Same as [`BatchCosine::new`] on a caller-supplied rule.
    pub fn from_rule(xs: &[f64], ws: &[f64], values: &[f64], u_max: f64) -> BatchCosine {
        BatchCosine {
            nodes: xs.to_vec(),
            weighted: ws.iter().zip(values).map(|(w, v)| 2.0 * w * v).collect(),
            u_max,
        }
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn eval(&self, u: f64) -> f64 {
        let mut acc = Neumaier::new();
        let k = 2.0 * PI * u;
        for (x, w) in self.nodes.iter().zip(&self.weighted) {
            acc.add(w * (k * x).cos());
        }
        acc.value()
    }
}

/// Hardy average `(1/t) ∫₀^t f(u) du`; `refine` doubles the panel count.
pub fn hardy_average(f: &dyn RealFunction, t: f64, refine: usize) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("hardy_average needs t > 0, got {t}")));
    }
    let (a, _) = f.extent();
    let lo = a.max(0.0);
    if t <= lo {
        return Ok(0.0);
    }
    let breaks = f.breakpoints(lo, t);
    let width = (f.scale(lo.max(1e-3 * t)) * 0.125).min(t - lo) / refine.max(1) as f64;
    let (xs, ws) = composite_rule(lo, t, &breaks, width, PANEL_ORDER);
    let mut acc = Neumaier::new();
    for (x, w) in xs.iter().zip(&ws) {
        acc.add(w * f.eval(*x));
    }
    Ok(acc.value() / t)
}

/// Scale-invariant operators acting on Mellin transforms by multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Multiplier {
    Identity,
    /// `s/(s−1)` in the left convention.
    L,
    /// `s/(s−1)` in the right convention.
    N,
    /// `ζ(1−s)/ζ(s) · s/(1−s)` in the left convention.
    U,
    /// `U·L²`.
    V,
    InverseL,
    InverseN,
}

impl Multiplier {
    pub fn convention(&self) -> Convention {
        match self {
            Multiplier::N | Multiplier::InverseN => Convention::Right,
            _ => Convention::Left,
        }
    }

    /// Multiplier value at `s`. The ratio `ζ(1−s)/ζ(s)` is evaluated as
    /// `1/χ₊(s)`, which stays finite through the nontrivial zeros.
    pub fn eval(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        let one = Complex64::new(1.0, 0.0);
        let pole = |name: &'static str| Error::Pole {
            function: name,
            at: format!("{s}"),
        };
        match self {
            Multiplier::Identity => Ok(one),
            Multiplier::L | Multiplier::N => {
                if s == one {
                    return Err(pole("L"));
                }
                Ok(s / (s - 1.0))
            }
            Multiplier::InverseL | Multiplier::InverseN => {
                if s == Complex64::new(0.0, 0.0) {
                    return Err(pole("inverse-L"));
                }
                Ok((s - 1.0) / s)
            }
            Multiplier::U | Multiplier::V => {
                if s == one {
                    return Err(pole("U"));
                }
                let c = chi_plus(s)?;
                if c == Complex64::new(0.0, 0.0) {
                    return Err(pole("U"));
                }
                let u = s / ((one - s) * c);
                if *self == Multiplier::U {
                    Ok(u)
                } else {
                    let l = s / (s - 1.0);
                    Ok(u * l * l)
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Multiplier::Identity => "identity",
            Multiplier::L => "L",
            Multiplier::N => "N",
            Multiplier::U => "U",
            Multiplier::V => "V",
            Multiplier::InverseL => "inverse-L",
            Multiplier::InverseN => "inverse-N",
        }
    }
}

/// Mellin transform samples on `1/2 + iτ`.
#[derive(Debug, Clone, Serialize)]
pub struct MellinSamples {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub support: (f64, f64),
    pub convention: Convention,
}

/// Uniform symmetric grid `−τ_max..=τ_max` with the given step.
pub fn symmetric_grid(tau_max: f64, step: f64) -> Vec<f64> {
    let n = (tau_max / step).round() as i64;
    (-n..=n).map(|k| k as f64 * step).collect()
}

/// Default critical-line grid: `τ ∈ [−60, 60]`, step 0.05.
pub fn default_grid() -> Vec<f64> {
    symmetric_grid(60.0, 0.05)
}

/// Samples the Mellin transform of `f` at `1/2 + iτ` for every `τ` in `grid`.
pub fn mellin_line(
    f: &SmoothTestFunction,
    grid: &[f64],
    conv: Convention,
) -> Result<MellinSamples> {
    let values = crate::par::map(grid, 64, |&tau| {
        Ok(crate::testfn::mellin(f, cpx(0.5, tau), conv))
    })?;
    Ok(MellinSamples {
        grid: grid.to_vec(),
        values,
        support: f.support(),
        convention: conv,
    })
}

impl MellinSamples {
    /// Largest `|F(1/2+iτ) − conj F(1/2−iτ)|`; the grid must be symmetric.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let n = self.grid.len();
        (0..n)
            .map(|i| (self.values[i] - self.values[n - 1 - i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|F|` over the outer 5% of the grid on either side.
    pub fn tail_level(&self) -> f64 {
        let tmax = self.grid.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        self.grid
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| t.abs() >= 0.95 * tmax)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    fn step(&self) -> Result<f64> {
        if self.grid.len() < 3 {
            return Err(Error::Domain("Mellin grid needs at least 3 points".into()));
        }
        let h = self.grid[1] - self.grid[0];
        for w in self.grid.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0) {
                return Err(Error::Domain("Mellin grid must be uniform".into()));
            }
        }
        Ok(h)
    }
}

/// Line samples of a piecewise function from its closed-form transform.
pub fn mellin_line_piecewise(
    f: &PiecewiseFunction,
    grid: &[f64],
    conv: Convention,
) -> Result<MellinSamples> {
    let one = Complex64::new(1.0, 0.0);
    let values = crate::par::map(grid, 64, |&tau| {
        let s = cpx(0.5, tau);
        match conv {
            Convention::Left => f.mellin_left_closed_form(s),
            Convention::Right => f.mellin_left_closed_form(one - s),
        }
    })?;
    Ok(MellinSamples {
        grid: grid.to_vec(),
        values,
        support: RealFunction::extent(f),
        convention: conv,
    })
}

/// Pointwise product with a multiplier, translating conventions if needed.
pub fn apply_multiplier(samples: &MellinSamples, m: Multiplier) -> Result<MellinSamples> {
    let one = Complex64::new(1.0, 0.0);
    let values = samples
        .grid
        .iter()
        .zip(&samples.values)
        .map(|(&tau, v)| {
            let s = cpx(0.5, tau);
            let arg = if m.convention() == samples.convention {
                s
            } else {
                one - s
            };
            Ok(v * m.eval(arg)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MellinSamples {
        grid: samples.grid.clone(),
        values,
        support: samples.support,
        convention: samples.convention,
    })
}

/// Taper applied to the line integrand before inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Window {
    None,
    /// `cos²(πτ/(2τ_max))`.
    Hann,
}

/// Result of a numerical inverse Mellin transform.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Inversion {
    pub value: f64,
    /// Change when every other grid point is dropped.
    pub refinement_delta: f64,
    /// Largest `|F|` at the grid ends, scaled like the integrand.
    pub tail_mass: f64,
}

/// Inverse Mellin transform at `t` by the trapezoid rule on the samples'
/// uniform grid.
pub fn invert_mellin(samples: &MellinSamples, t: f64, window: Window) -> Result<Inversion> {
    if t <= 0.0 {
        return Err(Error::Domain(format!(
            "inverse Mellin needs t > 0, got {t}"
        )));
    }
    let h = samples.step()?;
    let tmax = samples.grid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let lt = t.ln();
    let sign = match samples.convention {
        Convention::Left => -1.0,
        Convention::Right => 1.0,
    };
    let mut full = Neumaier::new();
    let mut half = Neumaier::new();
    let n = samples.grid.len();
    for (i, (&tau, v)) in samples.grid.iter().zip(&samples.values).enumerate() {
        let w = match window {
            Window::None => 1.0,
            Window::Hann => {
                let c = (0.5 * PI * tau / tmax).cos();
                c * c
            }
        };
        let edge = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        let phase = Complex64::new(0.0, sign * tau * lt).exp();
        let term = (v * phase).re * w;
        full.add(edge * term);
        if i % 2 == 0 {
            let edge2 = if i == 0 || i + 2 >= n { 0.5 } else { 1.0 };
            half.add(edge2 * term);
        }
    }
    let scale = t.powf(-0.5) / (2.0 * PI);
    let value = full.value() * h * scale;
    let coarse = half.value() * 2.0 * h * scale;
    Ok(Inversion {
        value,
        refinement_delta: (value - coarse).abs(),
        tail_mass: samples.tail_level() * scale,
    })
}

/// Like [`invert_mellin`] but errors when the refinement delta exceeds `tol`.
pub fn invert_mellin_checked(
    samples: &MellinSamples,
    t: f64,
    window: Window,
    tol: f64,
) -> Result<Inversion> {
    let inv = invert_mellin(samples, t, window)?;
    if inv.refinement_delta > tol {
        return Err(Error::TailBound {
            what: format!("inverse Mellin at t={t}"),
            estimate: inv.refinement_delta,
            tolerance: tol,
        });
    }
    Ok(inv)
}

/// Müntz-modified Poisson sum `Σ_{n≥1} f(ny) − (∫f)/y`.
pub fn poisson_muntz(f: &SmoothTestFunction, y: f64) -> Result<f64> {
    PoissonMuntz::new(f).eval_checked(y)
}

/// [`poisson_muntz`] with the mass of `f` computed once.
#[derive(Debug, Clone)]
pub struct PoissonMuntz {
    f: SmoothTestFunction,
    mass: f64,
}

impl PoissonMuntz {
    pub fn new(f: &SmoothTestFunction) -> PoissonMuntz {
        PoissonMuntz {
            f: f.clone(),
            mass: moments(f).0,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn eval_checked(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Err(Error::Domain(format!("poisson_muntz needs y > 0, got {y}")));
        }
        Ok(self.eval(y))
    }

    pub fn eval(&self, y: f64) -> f64 {
        let (a, b) = self.f.support();
        let n0 = (a / y).ceil().max(1.0) as u64;
        let n1 = (b / y).floor() as u64;
        let mut acc = Neumaier::new();
        for n in n0..=n1 {
            acc.add(self.f.eval(n as f64 * y));
        }
        acc.add(-self.mass / y);
        acc.value()
    }
}

/// Co-Poisson sum `Σ_{n≥1} g(t/n)/n − ∫₀^∞ g(u)/u du`.
pub fn copoisson_sum(g: &SmoothTestFunction, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("copoisson_sum needs t > 0, got {t}")));
    }
    Ok(CoPoisson::new(g).eval(t))
}

/// [`copoisson_sum`] with `∫g(u)/u du` computed once.
#[derive(Debug, Clone)]
pub struct CoPoisson {
    g: SmoothTestFunction,
    constant: f64,
}

impl CoPoisson {
    pub fn new(g: &SmoothTestFunction) -> CoPoisson {
        CoPoisson {
            g: g.clone(),
            constant: moments(g).1,
        }
    }

    pub fn generator(&self) -> &SmoothTestFunction {
        &self.g
    }

    /// `∫ g(u)/u du`; the sum equals `−constant` on `(0, a)`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// The finite sum `Σ g(t/n)/n` alone.
    pub fn sum_part(&self, t: f64) -> f64 {
        let (a, b) = self.g.support();
        if t < a {
            return 0.0;
        }
        let n0 = (t / b).ceil().max(1.0) as u64;
        let n1 = (t / a).floor() as u64;
        let mut acc = Neumaier::new();
        for n in n0..=n1 {
            let nf = n as f64;
            acc.add(self.g.eval(t / nf) / nf);
        }
        acc.value()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.g.support().0 {
            return -self.constant;
        }
        self.sum_part(t) - self.constant
    }
}

impl RealFunction for CoPoisson {
    fn eval(&self, t: f64) -> f64 {
        CoPoisson::eval(self, t)
    }
    fn extent(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let a = self.g.support().0;
        if a >= lo && a <= hi {
            vec![a]
        } else {
            vec![]
        }
    }
    fn scale(&self, t: f64) -> f64 {
        let (a, _) = self.g.support();
        // Far out the sum oscillates with period of order one in t.
        (a.max(t) * self.g.min_log_width()).min(2.0)
    }
}

/// Direction of a twisted summation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `P_χ(φ)(t) = Σ χ(n) φ(nt)`.
    Poisson,
    /// `P′_χ(φ)(t) = Σ χ̄(n) φ(t/n)/n`.
    CoPoisson,
}

fn require_nonprincipal(chi: &DirichletCharacter) -> Result<()> {
    if chi.modulus <= 1 || !chi.primitive || !chi.even {
        return Err(Error::Domain(format!(
            "twisted sums need a primitive even character with q > 1 (got q={}, index {})",
            chi.modulus, chi.index
        )));
    }
    Ok(())
}

/// Twisted Poisson or co-Poisson sum at `t`.
pub fn twisted_sums(
    g: &SmoothTestFunction,
    chi: &DirichletCharacter,
    direction: Direction,
    t: f64,
) -> Result<Complex64> {
    require_nonprincipal(chi)?;
    if t <= 0.0 {
        return Err(Error::Domain(format!("twisted sums need t > 0, got {t}")));
    }
    Ok(twisted_unchecked(g, chi, direction, t))
}

pub(crate) fn twisted_unchecked(
    g: &SmoothTestFunction,
    chi: &DirichletCharacter,
    direction: Direction,
    t: f64,
) -> Complex64 {
    let (a, b) = g.support();
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    match direction {
        Direction::Poisson => {
            let n0 = (a / t).ceil().max(1.0) as u64;
            let n1 = (b / t).floor() as u64;
            for n in n0..=n1 {
                let z = chi.value(n as i64) * g.eval(n as f64 * t);
                re.add(z.re);
                im.add(z.im);
            }
        }
        Direction::CoPoisson => {
            if t < a {
                return Complex64::new(0.0, 0.0);
            }
            let n0 = (t / b).ceil().max(1.0) as u64;
            let n1 = (t / a).floor() as u64;
            for n in n0..=n1 {
                let nf = n as f64;
                let z = chi.value(n as i64).conj() * (g.eval(t / nf) / nf);
                re.add(z.re);
                im.add(z.im);
            }
        }
    }
    cpx(re.value(), im.value())
}

/// `∫_lo^hi f(t) t^{-s} dt` by Gauss-Legendre in `x = log t`, with panels of
/// at most `log_width` and `breaks` (in `t`) as panel edges.
pub fn mellin_quadrature<F: Fn(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    log_width: f64,
    s: ComplexPoint,
) -> Complex64 {
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let width = log_width.min(3.0 / s.im.abs().max(1e-9));
    let lbreaks: Vec<f64> = breaks
        .iter()
        .filter(|b| **b > 0.0)
        .map(|b| b.ln())
        .collect();
    let (xs, ws) = composite_rule(lo.ln(), hi.ln(), &lbreaks, width, 32);
    let e = Complex64::new(1.0, 0.0) - s;
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for (x, w) in xs.iter().zip(&ws) {
        let v = f(x.exp());
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let z = v * (e * *x).exp() * *w;
        re.add(z.re);
        im.add(z.im);
    }
    cpx(re.value(), im.value())
}
