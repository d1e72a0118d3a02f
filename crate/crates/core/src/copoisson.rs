//! Checks around co-Poisson summation: the intertwining with the cosine
//! transform, the special value at zero, Sonine-space membership (including
//! Kahane's construction), perpendicularity at zeros, and the twisted case.

use crate::quad::{composite_rule, gauss_legendre, Neumaier};
use crate::specfun::{gamma_ln, DirichletCharacter};
use crate::testfn::{bump_on, moments, RealFunction, SmoothTestFunction};
use crate::transforms::{twisted_unchecked, BatchCosine, CoPoisson, Direction};
use crate::{cpx, Complex64, ComplexPoint, Error, Result};
use nalgebra::DMatrix;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

/// Frequencies up to which the cached cosine batch of a co-Poisson sum is valid.
const BATCH_U_MAX: f64 = 5.0;
const WINDOW_START: f64 = 25.0;
const WINDOW_CAP: f64 = 6400.0;

/// Smallest `W = 25·2^k` such that `sup_{[W,2W]} |h(t)| t^{p+1} ≤ tol`, or
/// such that `|h|` has dropped to the rounding floor `floor` there. Returns the
/// window and the weighted sup.
fn decay_window(
    h: &dyn Fn(f64) -> f64,
    start: f64,
    p: f64,
    tol: f64,
    floor: f64,
) -> Result<(f64, f64)> {
    let mut w = WINDOW_START.max(2.0 * start);
    loop {
        let (sup, weighted) = (0..400)
            .map(|i| {
                let t = w * (1.0 + i as f64 / 400.0);
                let v = h(t).abs();
                (v, v * t.powf(p + 1.0))
            })
            .fold((0.0f64, 0.0f64), |(a, b), (v, x)| (a.max(v), b.max(x)));
        if weighted <= tol || sup <= floor {
            return Ok((w, weighted));
        }
        w *= 2.0;
        if w > WINDOW_CAP {
            return Err(Error::TailBound {
                what: "co-Poisson decay window".into(),
                estimate: weighted,
                tolerance: tol,
            });
        }
    }
}

/// Rounding level of a co-Poisson sum of `g`.
fn noise_floor(g: &SmoothTestFunction, constant: f64) -> f64 {
    let (a, b) = g.support();
    let peak = (0..64)
        .map(|i| g.eval(a + (b - a) * (i as f64 + 0.5) / 64.0).abs())
        .fold(0.0f64, f64::max);
    1e-14 * (peak + constant.abs())
}

/// Decay target for twisted sums, far below the checks built on them.
const TWIST_TOL: f64 = 1e-10;

/// Highest `|Im s|` served by the cached Mellin rule of a sum.
const TAU_DESIGN: f64 = 40.0;

/// Gauss rule on `[lo, hi]` for co-Poisson-type sums: panels proportional to
/// `t` near the generator's support, capped at a fixed width far out where the
/// sum oscillates with period of order one, and narrow enough in `log t` for
/// `|Im s| ≤ TAU_DESIGN`.
fn sum_rule(lo: f64, hi: f64, log_width: f64) -> (Vec<f64>, Vec<f64>) {
    let gl = gauss_legendre(32);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    let mut t = lo;
    while t < hi {
        let step = (0.125 * log_width * t).min(0.25).min(2.0 * t / TAU_DESIGN);
        let end = if hi - (t + step) < 0.01 * step {
            hi
        } else {
            t + step
        };
        gl.push_mapped(t, end, &mut xs, &mut ws);
        t = end;
    }
    (xs, ws)
}

/// Nodes, weights and sampled values of a sum on its window.
#[derive(Debug, Clone)]
struct Sampled {
    ts: Vec<f64>,
    ws: Vec<f64>,
    vs: Vec<Complex64>,
}

impl Sampled {
    fn new(lo: f64, hi: f64, log_width: f64, h: impl Fn(f64) -> Complex64) -> Sampled {
        let (ts, ws) = sum_rule(lo, hi, log_width);
        let vs = ts.iter().map(|t| h(*t)).collect();
        Sampled { ts, ws, vs }
    }

    fn mellin(&self, s: ComplexPoint) -> Complex64 {
        let mut re = Neumaier::new();
        let mut im = Neumaier::new();
        for ((t, w), v) in self.ts.iter().zip(&self.ws).zip(&self.vs) {
            let z = v * (-s * t.ln()).exp() * *w;
            re.add(z.re);
            im.add(z.im);
        }
        cpx(re.value(), im.value())
    }
}

/// A co-Poisson sum together with its decay window.
#[derive(Debug, Clone)]
pub struct CoPoissonFunction {
    sum: CoPoisson,
    window: f64,
    tail_sup: f64,
    samples: OnceLock<Sampled>,
}

impl CoPoissonFunction {
    /// Window chosen so that `|f(t)|·t` stays below `1e-13` beyond it.
    pub fn new(g: &SmoothTestFunction) -> Result<CoPoissonFunction> {
        Self::with_weight(g, 0.0, 1e-13)
    }

    /// Window good for integrals against `t^p`.
    pub fn with_weight(g: &SmoothTestFunction, p: f64, tol: f64) -> Result<CoPoissonFunction> {
        let sum = CoPoisson::new(g);
        let b = g.support().1;
        let floor = noise_floor(g, sum.constant());
        let (window, tail_sup) = decay_window(&|t| sum.eval(t), b, p, tol, floor)?;
        Ok(CoPoissonFunction {
            sum,
            window,
            tail_sup,
            samples: OnceLock::new(),
        })
    }

    pub fn generator(&self) -> &SmoothTestFunction {
        self.sum.generator()
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.sum.eval(t)
    }

    pub fn constant(&self) -> f64 {
        self.sum.constant()
    }

    /// Bound on `∫_W^∞ |f|`, from `|f(t)| t ≤ s` on `[W, 2W]` and the
    /// faster-than-polynomial decay beyond.
    pub fn tail_bound(&self) -> f64 {
        2.0 * self.tail_sup
    }

    fn lower(&self) -> f64 {
        self.generator().support().0
    }

    fn samples(&self) -> &Sampled {
        self.samples.get_or_init(|| {
            Sampled::new(
                self.lower(),
                self.window,
                self.generator().min_log_width(),
                |t| cpx(self.eval(t), 0.0),
            )
        })
    }

    /// `∫₀^∞ f dt`, with the constant on `(0, a)` integrated exactly.
    pub fn integral(&self) -> f64 {
        let sm = self.samples();
        let mut acc = Neumaier::new();
        acc.add(-self.constant() * self.lower());
        for (w, v) in sm.ws.iter().zip(&sm.vs) {
            acc.add(w * v.re);
        }
        acc.value()
    }

    /// `‖f‖₂` over `(0, ∞)`.
    pub fn l2_norm(&self) -> f64 {
        let sm = self.samples();
        let mut acc = Neumaier::new();
        acc.add(self.constant().powi(2) * self.lower());
        for (w, v) in sm.ws.iter().zip(&sm.vs) {
            acc.add(w * v.re * v.re);
        }
        acc.value().max(0.0).sqrt()
    }

    /// Right Mellin transform by direct quadrature of the sum:
    /// `C a^{1−s}/(s−1) + ∫_a^W f(t) t^{−s} dt`, continued from the strip
    /// `0 < Re s < 1`.
    pub fn mellin(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        let one = Complex64::new(1.0, 0.0);
        let a = self.lower();
        let head = if self.constant() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            if s == one {
                return Err(Error::Pole {
                    function: "co-Poisson Mellin",
                    at: format!("{s}"),
                });
            }
            ((one - s) * a.ln()).exp() * self.constant() / (s - one)
        };
        let body = if s.im.abs() <= TAU_DESIGN {
            self.samples().mellin(s)
        } else {
            let lw = self.generator().min_log_width();
            Sampled::new(a, self.window, lw * TAU_DESIGN / s.im.abs(), |t| {
                cpx(self.eval(t), 0.0)
            })
            .mellin(s)
        };
        Ok(head + body)
    }

    /// Cosine transform of the constant piece `−C·1_{(0,a)}`.
    fn constant_transform(&self, u: f64) -> f64 {
        let a = self.lower();
        if u == 0.0 {
            -2.0 * self.constant() * a
        } else {
            -self.constant() * (2.0 * PI * u * a).sin() / (PI * u)
        }
    }

    /// Numerical cosine transform, valid for `|u| ≤ u_max`.
    pub fn cosine_batch(&self, u_max: f64) -> CoPoissonTransform {
        let batch = if u_max <= BATCH_U_MAX {
            // Panels of width ≤ 0.25 resolve cos(2πut) for u ≤ 5 under GL32.
            let sm = self.samples();
            let vals: Vec<f64> = sm.vs.iter().map(|v| v.re).collect();
            BatchCosine::from_rule(&sm.ts, &sm.ws, &vals, u_max)
        } else {
            BatchCosine::new(self, self.lower(), self.window, u_max)
        };
        CoPoissonTransform {
            f: self.clone(),
            batch,
        }
    }
}

impl RealFunction for CoPoissonFunction {
    fn eval(&self, t: f64) -> f64 {
        CoPoissonFunction::eval(self, t)
    }
    fn extent(&self) -> (f64, f64) {
        (0.0, self.window)
    }
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.sum.breakpoints(lo, hi)
    }
    fn scale(&self, t: f64) -> f64 {
        self.sum.scale(t)
    }
}

/// Cosine transform of a co-Poisson sum from one batch of samples.
#[derive(Debug, Clone)]
pub struct CoPoissonTransform {
    f: CoPoissonFunction,
    batch: BatchCosine,
}

impl CoPoissonTransform {
    pub fn eval(&self, u: f64) -> f64 {
        self.batch.eval(u) + self.f.constant_transform(u)
    }
}

/// Outcome of an intertwining check.
#[derive(Debug, Clone, Serialize)]
pub struct IntertwiningReport {
    pub residual: f64,
    pub tail_bound: f64,
    pub window: f64,
    pub points: usize,
}

/// `sup_u |F₊(co-Poisson of g)(u) − co-Poisson of I(g) at u|` over `grid`.
pub fn intertwining_residual(g: &SmoothTestFunction, grid: &[f64]) -> Result<IntertwiningReport> {
    intertwining_residual_pair(g, g, grid)
}

/// As [`intertwining_residual`], with the left side built from `lhs` and the
/// right side from `rhs`. Used for sensitivity checks with a corrupted input.
pub fn intertwining_residual_pair(
    lhs: &SmoothTestFunction,
    rhs: &SmoothTestFunction,
    grid: &[f64],
) -> Result<IntertwiningReport> {
    if grid.iter().any(|u| !(*u > 0.0)) {
        return Err(Error::Domain("intertwining grid must lie in (0, ∞)".into()));
    }
    let f = CoPoissonFunction::new(lhs)?;
    let u_max = grid.iter().fold(0.0f64, |m, u| m.max(*u));
    let transform = f.cosine_batch(u_max);
    let right = CoPoisson::new(&rhs.involute());
    let residual = grid
        .iter()
        .map(|&u| (transform.eval(u) - right.eval(u)).abs())
        .fold(0.0, f64::max);
    Ok(IntertwiningReport {
        residual,
        tail_bound: f.tail_bound(),
        window: f.window(),
        points: grid.len(),
    })
}

/// Default intertwining grid: 100 points on `(0, 5]`.
pub fn default_intertwining_grid() -> Vec<f64> {
    (1..=100).map(|i| 0.05 * i as f64).collect()
}

/// `(∫₀^∞ co-Poisson(g) dt, −½∫g)`.
pub fn special_value_check(g: &SmoothTestFunction) -> Result<(f64, f64)> {
    let f = CoPoissonFunction::new(g)?;
    let rhs = -0.5 * moments(g).0;
    Ok((f.integral(), rhs))
}

/// Membership data of a candidate Sonine function.
#[derive(Debug, Clone, Serialize)]
pub struct SonineReport {
    pub lambda: f64,
    pub sup_f_near_zero: f64,
    pub sup_ff_near_zero: f64,
    pub l2_norm: f64,
    pub tol: f64,
    pub pass: bool,
}

/// An even function with a computable cosine transform.
pub trait SonineCandidate {
    fn eval(&self, t: f64) -> f64;
    /// `F₊f(u)`.
    fn transform(&self, u: f64) -> f64;
    /// `‖f‖₂` over `(0, ∞)`.
    fn l2_norm(&self) -> f64;
}

/// Sups of `|f|` and `|F₊f|` on 200 points of `(0, λ)` against `tol·‖f‖₂`.
pub fn sonine_check(f: &dyn SonineCandidate, lambda: f64, tol: f64) -> SonineReport {
    let pts: Vec<f64> = (0..200)
        .map(|i| lambda * (i as f64 + 0.5) / 200.0)
        .collect();
    let sup_f = pts.iter().map(|t| f.eval(*t).abs()).fold(0.0, f64::max);
    let sup_ff = pts
        .iter()
        .map(|t| f.transform(*t).abs())
        .fold(0.0, f64::max);
    let l2 = f.l2_norm();
    SonineReport {
        lambda,
        sup_f_near_zero: sup_f,
        sup_ff_near_zero: sup_ff,
        l2_norm: l2,
        tol,
        pass: sup_f <= tol * l2 && sup_ff <= tol * l2,
    }
}

/// Right Mellin transforms of a function and of its cosine transform.
pub trait LineTransforms {
    fn mellin_f(&self, s: ComplexPoint) -> Result<ComplexPoint>;
    fn mellin_ff(&self, s: ComplexPoint) -> Result<ComplexPoint>;
}

/// Swaps the roles of `f` and `F₊f`.
pub struct Exchanged<'a>(pub &'a dyn LineTransforms);

impl LineTransforms for Exchanged<'_> {
    fn mellin_f(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        self.0.mellin_ff(s)
    }
    fn mellin_ff(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        self.0.mellin_f(s)
    }
}

/// Completed Mellin transform `π^{−s/2} Γ(s/2) f̂(s)`.
pub fn completed(s: ComplexPoint, fhat: ComplexPoint) -> Result<ComplexPoint> {
    Ok((gamma_ln(s * 0.5)? - s * 0.5 * PI.ln()).exp() * fhat)
}

/// `max_s |M(F₊f)(s) − M(f)(1−s)|`.
pub fn completed_mellin_fe_residual(
    f: &dyn LineTransforms,
    samples: &[ComplexPoint],
) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for &s in samples {
        let lhs = completed(s, f.mellin_ff(s)?)?;
        let rhs = completed(one - s, f.mellin_f(one - s)?)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// 21 points `1/2 + iτ`, `τ = −10, −9, …, 10`.
pub fn default_line_samples() -> Vec<ComplexPoint> {
    (-10..=10).map(|k| cpx(0.5, k as f64)).collect()
}

/// A co-Poisson sum viewed as a candidate element of `K_λ`.
#[derive(Debug, Clone)]
pub struct CoPoissonMember {
    f: CoPoissonFunction,
    dual: CoPoissonFunction,
    transform: CoPoissonTransform,
    l2: f64,
}

/// Co-Poisson sum of `g` as a Sonine candidate for `λ`; needs `0 < λ < 1` and
/// `g` supported in `[λ, 1/λ]`. Moments are not enforced here.
pub fn copoisson_member(g: &SmoothTestFunction, lambda: f64) -> Result<CoPoissonMember> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!(
            "co-Poisson sums give Sonine functions only for 0 < λ < 1, got {lambda}"
        )));
    }
    let (a, b) = g.support();
    if a < lambda * (1.0 - 1e-12) || b > (1.0 + 1e-12) / lambda {
        return Err(Error::Domain(format!(
            "support [{a}, {b}] is not inside [{lambda}, {}]",
            1.0 / lambda
        )));
    }
    let f = CoPoissonFunction::new(g)?;
    let dual = CoPoissonFunction::new(&g.involute())?;
    let transform = f.cosine_batch(BATCH_U_MAX);
    let l2 = f.l2_norm();
    Ok(CoPoissonMember {
        f,
        dual,
        transform,
        l2,
    })
}

impl CoPoissonMember {
    pub fn function(&self) -> &CoPoissonFunction {
        &self.f
    }
}

impl SonineCandidate for CoPoissonMember {
    fn eval(&self, t: f64) -> f64 {
        self.f.eval(t)
    }
    /// Numerical cosine transform for `u ≤ 5`, direct quadrature beyond.
    fn transform(&self, u: f64) -> f64 {
        if u.abs() <= BATCH_U_MAX {
            self.transform.eval(u)
        } else {
            self.f.cosine_batch(u.abs()).eval(u)
        }
    }
    fn l2_norm(&self) -> f64 {
        self.l2
    }
}

impl LineTransforms for CoPoissonMember {
    fn mellin_f(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        self.f.mellin(s)
    }
    /// The cosine transform of a co-Poisson sum is the co-Poisson sum of the
    /// involuted generator; that identity is checked on its own by
    /// [`intertwining_residual`].
    fn mellin_ff(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        self.dual.mellin(s)
    }
}

/// Right Mellin transforms of the co-Poisson sum of `g` at `points`, by
/// quadrature of the sum itself.
pub fn zero_perp_check(
    g: &SmoothTestFunction,
    points: &[ComplexPoint],
) -> Result<Vec<ComplexPoint>> {
    let p = points.iter().fold(0.0f64, |m, s| m.max(-s.re));
    let f = CoPoissonFunction::with_weight(g, p, 1e-12)?;
    points.iter().map(|s| f.mellin(*s)).collect()
}

/// `max |f̂(1/2+iτ)|` over `τ = 0, 0.5, …, 30`.
pub fn line_sup(g: &SmoothTestFunction) -> Result<f64> {
    let f = CoPoissonFunction::new(g)?;
    let mut m = 0.0f64;
    for k in 0..=60 {
        m = m.max(f.mellin(cpx(0.5, 0.5 * k as f64))?.norm());
    }
    Ok(m)
}

/// Condition number of `[f̂_j(s_i)]`, the Mellin transforms of the co-Poisson
/// sums of `gens` at `points`. Finite and moderate when the sums are linearly
/// independent as functionals on those points.
pub fn gram_condition(gens: &[SmoothTestFunction], points: &[ComplexPoint]) -> Result<f64> {
    if gens.len() != points.len() || gens.is_empty() {
        return Err(Error::Domain("need as many generators as points".into()));
    }
    let n = gens.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (j, g) in gens.iter().enumerate() {
        for (i, v) in zero_perp_check(g, points)?.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    let sv = m.singular_values();
    let hi = sv.max();
    let lo = sv.min();
    Ok(if lo > 0.0 { hi / lo } else { f64::INFINITY })
}

/// Outcome of the twisted intertwining check.
#[derive(Debug, Clone, Serialize)]
pub struct TwistedReport {
    pub residual: f64,
    /// `sup |F₊(P′_χ g)|` on `(0, 1/(q λ₂))`.
    pub vanishing_sup: f64,
    pub tail_bound: f64,
    pub window: f64,
}

fn require_twist(chi: &DirichletCharacter) -> Result<()> {
    if chi.modulus <= 1 || !chi.primitive || !chi.even {
        return Err(Error::Domain(format!(
            "twisted intertwining needs a primitive even character with q > 1 (got q={}, index {})",
            chi.modulus, chi.index
        )));
    }
    Ok(())
}

/// `sup_u |F₊(P′_χ g)(u) − w_χ̄ √q P′_χ̄(I g)(q u)|` over `grid`, plus the
/// vanishing of the left side on `(0, 1/(q λ₂))`.
pub fn twisted_intertwining_residual(
    g: &SmoothTestFunction,
    chi: &DirichletCharacter,
    grid: &[f64],
) -> Result<TwistedReport> {
    require_twist(chi)?;
    let (a, b) = g.support();
    let q = chi.modulus as f64;
    let re = |t: f64| twisted_unchecked(g, chi, Direction::CoPoisson, t).re;
    let im = |t: f64| twisted_unchecked(g, chi, Direction::CoPoisson, t).im;
    let floor = noise_floor(g, 0.0);
    let (w1, s1) = decay_window(&re, b, 0.0, TWIST_TOL, floor)?;
    let (w2, s2) = decay_window(&im, b, 0.0, TWIST_TOL, floor)?;
    let window = w1.max(w2);
    let edge = 1.0 / (q * b);
    let vanish: Vec<f64> = (0..200).map(|i| edge * (i as f64 + 0.5) / 200.0).collect();
    let u_max = grid.iter().chain(&vanish).fold(0.0f64, |m, u| m.max(*u));
    let lw = g.min_log_width();
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    let gl = gauss_legendre(20);
    let mut t = a;
    while t < window {
        // Two periods of the fastest cosine, and the sum's own scale ∝ t.
        let step = (2.0 / u_max).min(0.5).min(0.125 * lw * t);
        let end = (t + step).min(window);
        gl.push_mapped(t, end, &mut xs, &mut ws);
        t = end;
    }
    let part = |h: &dyn Fn(f64) -> f64| {
        let vals: Vec<f64> = xs.iter().map(|x| h(*x)).collect();
        BatchCosine::from_rule(&xs, &ws, &vals, u_max)
    };
    let bre = part(&re);
    let bim = part(&im);
    let conj = chi.conj();
    let ig = g.involute();
    let w = conj.root_number * q.sqrt();
    let residual = grid
        .iter()
        .map(|&u| {
            let lhs = cpx(bre.eval(u), bim.eval(u));
            let rhs = w * twisted_unchecked(&ig, &conj, Direction::CoPoisson, q * u);
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max);
    let vanishing_sup = vanish
        .iter()
        .map(|&u| cpx(bre.eval(u), bim.eval(u)).norm())
        .fold(0.0, f64::max);
    Ok(TwistedReport {
        residual,
        vanishing_sup,
        tail_bound: 2.0 * s1.max(s2),
        window,
    })
}

/// Right Mellin transforms of `P′_χ(g)` at `points`, by quadrature of the
/// twisted sum.
pub fn twisted_mellin(
    g: &SmoothTestFunction,
    chi: &DirichletCharacter,
    points: &[ComplexPoint],
) -> Result<Vec<ComplexPoint>> {
    require_twist(chi)?;
    let (a, b) = g.support();
    let p = points.iter().fold(0.0f64, |m, s| m.max(-s.re));
    let tau = points.iter().fold(0.0f64, |m, s| m.max(s.im.abs()));
    let norm = |t: f64| twisted_unchecked(g, chi, Direction::CoPoisson, t).norm();
    let (window, _) = decay_window(&norm, b, p, TWIST_TOL, noise_floor(g, 0.0))?;
    let lw = g.min_log_width() * (TAU_DESIGN / tau.max(1e-9)).min(1.0);
    let sm = Sampled::new(a, window, lw, |t| {
        twisted_unchecked(g, chi, Direction::CoPoisson, t)
    });
    Ok(points.iter().map(|s| sm.mellin(*s)).collect())
}

/// One ordinate of a Dirichlet L-function zero from an input file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LZero {
    pub modulus: u64,
    pub character_index: usize,
    pub gamma: f64,
}

/// Parses lines `q,character_index,gamma`; blank lines and `#` comments are
/// skipped.
pub fn parse_l_zeros(text: &str) -> Result<Vec<LZero>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "line {}: expected q,character_index,gamma",
                i + 1
            )));
        }
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what} {:?}", i + 1, line));
        let modulus: u64 = parts[0].parse().map_err(|_| bad("modulus"))?;
        let character_index: usize = parts[1].parse().map_err(|_| bad("character index"))?;
        let gamma: f64 = parts[2].parse().map_err(|_| bad("ordinate"))?;
        if !gamma.is_finite() {
            return Err(bad("ordinate"));
        }
        out.push(LZero {
            modulus,
            character_index,
            gamma,
        });
    }
    Ok(out)
}

pub fn load_l_zeros(path: &Path) -> Result<Vec<LZero>> {
    parse_l_zeros(&std::fs::read_to_string(path)?)
}

/// First zeros of `L(s, χ)` for the quadratic character modulo 5.
pub const QUADRATIC_MOD5_ZEROS: &str =
    "# q,character_index,gamma\n5,2,6.648453344728\n5,2,9.831444432887\n";

/// Kahane's Sonine function: a rescaled comb of weighted `δ′`, `δ` terms
/// smoothed by a compact kernel and multiplied by the kernel's transform.
#[derive(Debug)]
pub struct KahaneSonine {
    n: u32,
    eps: f64,
    order: usize,
    h: f64,
    n_max: i64,
    /// Normalisation making `‖f‖₂ = 1` on `(0, ∞)`.
    scale: f64,
    lambda: f64,
    y_max: f64,
    y_rule: OnceLock<(Vec<f64>, Vec<f64>, Vec<f64>)>,
    x_rule: (Vec<f64>, Vec<f64>, Vec<f64>),
}

/// Centered cardinal B-spline of order `k` (support `[−k/2, k/2]`).
pub fn cardinal_bspline(k: usize, u: f64) -> f64 {
    let v = u + 0.5 * k as f64;
    if v <= 0.0 || v >= k as f64 {
        return 0.0;
    }
    let i = v.floor() as usize;
    let mut vals = vec![0.0; i + 2];
    vals[i] = 1.0;
    for m in 2..=k {
        let lo = (i + 1).saturating_sub(m);
        let mf = m as f64;
        for j in lo..=i {
            let w = v - j as f64;
            vals[j] = (w * vals[j] + (mf - w) * vals[j + 1]) / (mf - 1.0);
        }
    }
    vals[0]
}

impl KahaneSonine {
    fn weight(&self, n: i64) -> (f64, f64) {
        poly_weight(self.n, n as f64)
    }

    /// `φ(x) = B_k(x/h)/h`.
    fn kernel(&self, x: f64) -> f64 {
        cardinal_bspline(self.order, x / self.h) / self.h
    }

    fn kernel_derivative(&self, x: f64) -> f64 {
        let u = x / self.h;
        (cardinal_bspline(self.order - 1, u + 0.5) - cardinal_bspline(self.order - 1, u - 0.5))
            / (self.h * self.h)
    }

    /// `Φ(y) = (sin z / z)^k` with `z = π h y`.
    pub fn kernel_transform(&self, y: f64) -> f64 {
        let z = PI * self.h * y;
        if z.abs() < 1e-8 {
            return 1.0;
        }
        (z.sin() / z).powi(self.order as i32)
    }

    fn raw(&self, x: f64) -> f64 {
        let rn = (self.n as f64).sqrt();
        let n0 = ((x - self.eps) * rn).ceil() as i64;
        let n1 = ((x + self.eps) * rn).floor() as i64;
        let mut acc = 0.0;
        for n in n0..=n1 {
            if n.abs() <= self.n as i64 || n.abs() > self.n_max {
                continue;
            }
            let (p, dp) = self.weight(n);
            let d = x - n as f64 / rn;
            acc += p / self.n as f64 * self.kernel_derivative(d) - dp / rn * self.kernel(d);
        }
        acc * self.kernel_transform(x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.raw(x) * self.scale
    }

    /// Radius below which both `f` and `F₊f` provably vanish, reported with margin.
    pub fn lambda_achieved(&self) -> f64 {
        self.lambda
    }

    pub fn terms(&self) -> i64 {
        self.n_max
    }

    /// Cosine transform by quadrature over the supports of the comb bumps.
    pub fn transform_at(&self, y: f64) -> f64 {
        let (xs, ws, vs) = &self.x_rule;
        let k = 2.0 * PI * y;
        let mut acc = Neumaier::new();
        for ((x, w), v) in xs.iter().zip(ws).zip(vs) {
            acc.add(w * v * (k * x).cos());
        }
        2.0 * acc.value()
    }

    /// Nodes, weights and transform values on the `y`-bumps at `m√N`.
    fn y_samples(&self) -> &(Vec<f64>, Vec<f64>, Vec<f64>) {
        self.y_rule.get_or_init(|| {
            let rn = (self.n as f64).sqrt();
            let m_max = (self.y_max / rn).ceil() as i64;
            let centers: Vec<f64> = (1..=m_max).map(|m| m as f64 * rn).collect();
            let (ys, ws) = bump_rule(&centers, self.eps);
            let vs: Vec<f64> = ys.iter().map(|y| self.transform_at(*y)).collect();
            (ys, ws, vs)
        })
    }

    /// Largest `|F₊f|` at the midpoints between consecutive `y`-bumps.
    pub fn gap_sup(&self) -> f64 {
        let rn = (self.n as f64).sqrt();
        let m_max = (self.y_max / rn).ceil() as i64;
        (0..m_max)
            .map(|m| self.transform_at((m as f64 + 0.5) * rn).abs())
            .fold(0.0, f64::max)
    }

    /// Upper end of the `y` range used for the transform's Mellin integral.
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
}

/// `P(x) = x³ Π_{j≤N} (x²−j²)²` and `P′(x)`.
fn poly_weight(n_deg: u32, x: f64) -> (f64, f64) {
    let mut p = x * x * x;
    let mut dp = 3.0 * x * x;
    for j in 1..=n_deg {
        let q = x * x - (j * j) as f64;
        let q2 = q * q;
        let dq2 = 4.0 * x * q;
        dp = dp * q2 + p * dq2;
        p *= q2;
    }
    (p, dp)
}

/// Gauss rule over the union of `[c − ε, c + ε]`: eight panels per bump.
fn bump_rule(centers: &[f64], eps: f64) -> (Vec<f64>, Vec<f64>) {
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for &c in centers {
        let (lo, hi) = (c - eps, c + eps);
        match intervals.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => intervals.push((lo.max(0.0), hi)),
        }
    }
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for (lo, hi) in intervals {
        let (x, w) = composite_rule(lo, hi, &[], eps / 4.0, 20);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

/// Kahane's Sonine function for `N ≥ 1` and kernel half-width `ε < √N/4`.
pub fn kahane_sonine(n: u32, eps: f64) -> Result<(KahaneSonine, f64)> {
    let rn = (n as f64).sqrt();
    if n == 0 || !(eps > 0.0 && eps < rn / 4.0) {
        return Err(Error::Domain(format!(
            "kahane_sonine needs N ≥ 1 and 0 < ε < √N/4 (got N={n}, ε={eps})"
        )));
    }
    // Order high enough that F₊f is smooth across 4N+3 derivatives of δ.
    let order = 4 * n as usize + 27;
    let h = 2.0 * eps / order as f64;
    let mut ks = KahaneSonine {
        n,
        eps,
        order,
        h,
        n_max: 0,
        scale: 1.0,
        lambda: rn - eps * (1.0 + 1.0 / rn),
        y_max: 0.0,
        y_rule: OnceLock::new(),
        x_rule: (Vec::new(), Vec::new(), Vec::new()),
    };
    // Envelope of the n-th term: weights times sup |Φ| over the bump.
    let phi_sup = cardinal_bspline(order, 0.0) / h;
    let dphi_sup = (1..200)
        .map(|i| ks.kernel_derivative(eps * i as f64 / 200.0).abs())
        .fold(0.0, f64::max);
    let envelope = |m: i64| {
        let (p, dp) = poly_weight(n, m as f64);
        let x = m as f64 / rn - eps;
        let z = PI * h * x;
        let phi = if z <= 1.0 {
            1.0
        } else {
            z.powi(-(order as i32))
        };
        (p.abs() / n as f64 * dphi_sup + dp.abs() / rn * phi_sup) * phi
    };
    let cap = 512 * n as i64;
    let mut peak = 0.0f64;
    let mut n_max = None;
    for m in (n as i64 + 1)..=cap {
        let e = envelope(m);
        peak = peak.max(e);
        if e < 1e-14 * peak && envelope(m + 1) < e {
            n_max = Some(m);
            break;
        }
    }
    let n_max = n_max.ok_or_else(|| Error::TailBound {
        what: format!("Kahane comb truncation for N={n}"),
        estimate: envelope(cap) / peak,
        tolerance: 1e-14,
    })?;
    ks.n_max = n_max;
    let centers: Vec<f64> = ((n as i64 + 1)..=n_max).map(|m| m as f64 / rn).collect();
    let (xs, ws) = bump_rule(&centers, eps);
    let raw: Vec<f64> = xs.iter().map(|x| ks.raw(*x)).collect();
    let norm2: f64 = raw.iter().zip(&ws).map(|(v, w)| w * v * v).sum();
    ks.scale = 1.0 / norm2.sqrt();
    let vs: Vec<f64> = raw.iter().map(|v| v * ks.scale).collect();
    ks.x_rule = (xs, ws, vs);
    // Transform bumps at m√N: keep going until three in a row are negligible.
    // Rounding in the x-quadrature leaves a floor near 1e−12 of the peak.
    let mut quiet = 0;
    let mut m = 1;
    let mut top = 0.0f64;
    loop {
        let c = m as f64 * rn;
        let v = (0..9)
            .map(|i| ks.transform_at(c + eps * (i as f64 - 4.0) / 5.0).abs())
            .fold(0.0, f64::max);
        top = top.max(v);
        if v < 1e-11 * top {
            quiet += 1;
            if quiet == 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        m += 1;
        if c > ks.n_max as f64 / rn * 2.0 {
            return Err(Error::TailBound {
                what: "Kahane transform range".into(),
                estimate: v / top,
                tolerance: 1e-11,
            });
        }
    }
    ks.y_max = m as f64 * rn + eps;
    let lambda = ks.lambda;
    Ok((ks, lambda))
}

impl SonineCandidate for KahaneSonine {
    fn eval(&self, t: f64) -> f64 {
        KahaneSonine::eval(self, t)
    }
    fn transform(&self, u: f64) -> f64 {
        self.transform_at(u)
    }
    fn l2_norm(&self) -> f64 {
        1.0
    }
}

impl LineTransforms for KahaneSonine {
    fn mellin_f(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        let (xs, ws, vs) = &self.x_rule;
        Ok(sum_mellin(xs, ws, vs, s))
    }
    fn mellin_ff(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        let (ys, ws, vs) = self.y_samples();
        Ok(sum_mellin(ys, ws, vs, s))
    }
}

fn sum_mellin(xs: &[f64], ws: &[f64], vs: &[f64], s: ComplexPoint) -> ComplexPoint {
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for ((x, w), v) in xs.iter().zip(ws).zip(vs) {
        let z = (-s * x.ln()).exp() * (w * v);
        re.add(z.re);
        im.add(z.im);
    }
    cpx(re.value(), im.value())
}

/// Corpus generator: a bump on `[a, b]` with both moments removed.
pub fn moment_free_bump(a: f64, b: f64) -> Result<SmoothTestFunction> {
    crate::testfn::enforce_moments(&bump_on(a, b, 1.0)?)
}
