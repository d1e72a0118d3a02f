//! Even test functions on `(0, ∞)` with exact support bookkeeping, their
//! Mellin transforms, and the piecewise fractional-part dictionary.

use crate::quad::{composite_rule, gauss_legendre, Neumaier};
use crate::specfun::zeta;
use crate::{cpx, Complex64, ComplexPoint, Error, Result};
use std::fmt;
use std::sync::Arc;

/// A real function on `(0, ∞)` that quadrature routines can sample.
pub trait RealFunction: Sync {
    fn eval(&self, t: f64) -> f64;

    /// Closed interval outside which the function vanishes. The upper end may
    /// be infinite.
    fn extent(&self) -> (f64, f64);

    /// Points in `[lo, hi]` where the function is not smooth.
    fn breakpoints(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Length over which the function changes appreciably near `t`.
    fn scale(&self, t: f64) -> f64 {
        t.max(1e-3)
    }
}

/// Mellin convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Convention {
    /// `∫ f(t) t^{-s} dt`.
    Right,
    /// `∫ f(t) t^{s-1} dt`.
    Left,
}

#[derive(Debug)]
enum Node {
    Bump { m: f64, h: f64, c: f64 },
    Dilate { theta: f64, inner: Arc<Node> },
    Involute(Arc<Node>),
    Contract { q: u64, inner: Arc<Node> },
    Combination(Vec<(f64, Arc<Node>)>),
}

impl Node {
    fn support(&self) -> (f64, f64) {
        match self {
            Node::Bump { m, h, .. } => ((m - h).exp(), (m + h).exp()),
            Node::Dilate { theta, inner } => {
                let (a, b) = inner.support();
                (theta * a, theta * b)
            }
            Node::Involute(inner) => {
                let (a, b) = inner.support();
                (1.0 / b, 1.0 / a)
            }
            Node::Contract { q, inner } => {
                let (a, b) = inner.support();
                (a / *q as f64, b / *q as f64)
            }
            Node::Combination(parts) => {
                parts
                    .iter()
                    .fold((f64::INFINITY, 0.0f64), |(lo, hi), (_, n)| {
                        let (a, b) = n.support();
                        (lo.min(a), hi.max(b))
                    })
            }
        }
    }

    fn eval(&self, t: f64) -> f64 {
        match self {
            Node::Bump { m, h, c } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let x = (t.ln() - m) / h;
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    c * (-1.0 / (1.0 - x * x)).exp()
                }
            }
            Node::Dilate { theta, inner } => inner.eval(t / theta),
            Node::Involute(inner) => {
                if t <= 0.0 {
                    0.0
                } else {
                    inner.eval(1.0 / t) / t
                }
            }
            Node::Contract { q, inner } => {
                let q = *q as f64;
                q.sqrt() * inner.eval(q * t)
            }
            Node::Combination(parts) => parts.iter().map(|(w, n)| w * n.eval(t)).sum(),
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        match self {
            Node::Bump { m, h, c } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let x = (t.ln() - m) / h;
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    let d = 1.0 - x * x;
                    c * (-1.0 / d).exp() * (-2.0 * x / (d * d)) / (h * t)
                }
            }
            Node::Dilate { theta, inner } => inner.derivative(t / theta) / theta,
            Node::Involute(inner) => {
                if t <= 0.0 {
                    0.0
                } else {
                    let u = 1.0 / t;
                    -inner.derivative(u) * u * u * u - inner.eval(u) * u * u
                }
            }
            Node::Contract { q, inner } => {
                let q = *q as f64;
                q.sqrt() * q * inner.derivative(q * t)
            }
            Node::Combination(parts) => parts.iter().map(|(w, n)| w * n.derivative(t)).sum(),
        }
    }

    fn collect_edges(&self, out: &mut Vec<f64>) {
        match self {
            Node::Combination(parts) => {
                for (_, n) in parts {
                    n.collect_edges(out);
                }
            }
            _ => {
                let (a, b) = self.support();
                out.push(a);
                out.push(b);
            }
        }
    }

    /// Smallest logarithmic half-width among base bumps.
    fn min_log_width(&self) -> f64 {
        match self {
            Node::Bump { h, .. } => *h,
            Node::Dilate { inner, .. } | Node::Involute(inner) | Node::Contract { inner, .. } => {
                inner.min_log_width()
            }
            Node::Combination(parts) => parts
                .iter()
                .map(|(_, n)| n.min_log_width())
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn describe(&self, depth: usize, out: &mut Vec<String>) {
        let pad = "  ".repeat(depth);
        match self {
            Node::Bump { m, h, c } => out.push(format!("{pad}bump(m={m}, h={h}, c={c})")),
            Node::Dilate { theta, inner } => {
                out.push(format!("{pad}dilate(theta={theta})"));
                inner.describe(depth + 1, out);
            }
            Node::Involute(inner) => {
                out.push(format!("{pad}involute"));
                inner.describe(depth + 1, out);
            }
            Node::Contract { q, inner } => {
                out.push(format!("{pad}contract(q={q})"));
                inner.describe(depth + 1, out);
            }
            Node::Combination(parts) => {
                out.push(format!("{pad}combination({} terms)", parts.len()));
                for (w, n) in parts {
                    out.push(format!("{pad}  weight {w}"));
                    n.describe(depth + 2, out);
                }
            }
        }
    }
}

/// A smooth function on `(0, ∞)` with compact support `[a, b]`, built from
/// bumps by dilation, involution, conductor contraction and linear
/// combination. The even extension to the real line is implicit.
#[derive(Clone)]
pub struct SmoothTestFunction {
    node: Arc<Node>,
    support: (f64, f64),
}

impl fmt::Debug for SmoothTestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothTestFunction")
            .field("support", &self.support)
            .field("layers", &self.layers())
            .finish()
    }
}

/// `t ↦ c·exp(−1/(1−x²))` with `x = (log t − m)/h`, supported on
/// `[e^{m−h}, e^{m+h}]`.
pub fn bump(m: f64, h: f64, c: f64) -> Result<SmoothTestFunction> {
    if !(h > 0.0 && h.is_finite() && m.is_finite() && c.is_finite()) {
        return Err(Error::Domain(format!(
            "bump needs finite m, c and h > 0 (got m={m}, h={h}, c={c})"
        )));
    }
    Ok(SmoothTestFunction::from_node(Node::Bump { m, h, c }))
}

/// Bump whose support is exactly `[a, b]`.
pub fn bump_on(a: f64, b: f64, c: f64) -> Result<SmoothTestFunction> {
    if !(a > 0.0 && b > a) {
        return Err(Error::Domain(format!("bad support [{a}, {b}]")));
    }
    let (la, lb) = (a.ln(), b.ln());
    bump(0.5 * (la + lb), 0.5 * (lb - la), c)
}

impl SmoothTestFunction {
    fn from_node(node: Node) -> Self {
        let support = node.support();
        SmoothTestFunction {
            node: Arc::new(node),
            support,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.support.0 || t > self.support.1 {
            return 0.0;
        }
        self.node.eval(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t < self.support.0 || t > self.support.1 {
            return 0.0;
        }
        self.node.derivative(t)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Every function built here is infinitely differentiable.
    pub fn is_smooth(&self) -> bool {
        true
    }

    /// Human-readable composition trace.
    pub fn layers(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.node.describe(0, &mut out);
        out
    }

    /// Support edges of every component, sorted.
    pub fn edges(&self) -> Vec<f64> {
        let mut e = Vec::new();
        self.node.collect_edges(&mut e);
        e.sort_by(|a, b| a.partial_cmp(b).expect("finite edges"));
        e.dedup();
        e
    }

    /// `t ↦ f(t/θ)`.
    pub fn dilate(&self, theta: f64) -> Result<SmoothTestFunction> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!(
                "dilation factor must be positive, got {theta}"
            )));
        }
        if theta == 1.0 {
            return Ok(self.clone());
        }
        Ok(Self::from_node(Node::Dilate {
            theta,
            inner: self.node.clone(),
        }))
    }

    /// `t ↦ f(1/t)/t`.
    pub fn involute(&self) -> SmoothTestFunction {
        if let Node::Involute(inner) = &*self.node {
            let node = inner.clone();
            let support = node.support();
            return SmoothTestFunction { node, support };
        }
        Self::from_node(Node::Involute(self.node.clone()))
    }

    /// `t ↦ √q f(qt)`.
    pub fn conductor_contract(&self, q: u64) -> Result<SmoothTestFunction> {
        if q == 0 {
            return Err(Error::Domain("conductor must be at least 1".into()));
        }
        if q == 1 {
            return Ok(self.clone());
        }
        Ok(Self::from_node(Node::Contract {
            q,
            inner: self.node.clone(),
        }))
    }

    /// `Σ w_i f_i`.
    pub fn combination(parts: &[(f64, &SmoothTestFunction)]) -> Result<SmoothTestFunction> {
        if parts.is_empty() {
            return Err(Error::Domain("empty combination".into()));
        }
        Ok(Self::from_node(Node::Combination(
            parts.iter().map(|(w, f)| (*w, f.node.clone())).collect(),
        )))
    }

    pub fn scaled(&self, c: f64) -> SmoothTestFunction {
        Self::from_node(Node::Combination(vec![(c, self.node.clone())]))
    }

    /// `self + c·other`.
    pub fn plus(&self, c: f64, other: &SmoothTestFunction) -> SmoothTestFunction {
        Self::from_node(Node::Combination(vec![
            (1.0, self.node.clone()),
            (c, other.node.clone()),
        ]))
    }

    /// Smallest logarithmic half-width of the constituent bumps.
    pub fn min_log_width(&self) -> f64 {
        self.node.min_log_width()
    }

    /// `∫ f(t) t^{-s} dt` with the default rule.
    pub fn mellin(&self, s: ComplexPoint) -> ComplexPoint {
        mellin_right(self, s, 1)
    }

    /// `∫ f(t) t^{s-1} dt`.
    pub fn mellin_left(&self, s: ComplexPoint) -> ComplexPoint {
        mellin_right(self, Complex64::new(1.0, 0.0) - s, 1)
    }

    /// Composite Gauss-Legendre rule in `x = log t` over the support:
    /// `(x_i, w_i)` such that `∫ F(x) dx ≈ Σ w_i F(x_i)`.
    pub fn log_rule(&self, tau: f64, refine: usize) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = self.support;
        let (la, lb) = (a.ln(), b.ln());
        let breaks: Vec<f64> = self.edges().iter().map(|e| e.ln()).collect();
        let h = self.min_log_width();
        let width = (h / 8.0).min(3.0 / tau.abs().max(1e-9)) / refine as f64;
        composite_rule(la, lb, &breaks, width, 32)
    }
}

impl RealFunction for SmoothTestFunction {
    fn eval(&self, t: f64) -> f64 {
        SmoothTestFunction::eval(self, t)
    }
    fn extent(&self) -> (f64, f64) {
        self.support
    }
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.edges()
            .into_iter()
            .filter(|e| *e >= lo && *e <= hi)
            .collect()
    }
    fn scale(&self, t: f64) -> f64 {
        t * self.min_log_width()
    }
}

/// Right Mellin transform of a test function; `refine` multiplies the number
/// of panels (1 is the default rule, 2 the order-doubling check).
pub fn mellin_right(f: &SmoothTestFunction, s: ComplexPoint, refine: usize) -> ComplexPoint {
    let (xs, ws) = f.log_rule(s.im, refine.max(1));
    let one_minus = Complex64::new(1.0, 0.0) - s;
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for (x, w) in xs.iter().zip(&ws) {
        let v = f.eval(x.exp());
        if v == 0.0 {
            continue;
        }
        let z = (one_minus * *x).exp() * (w * v);
        re.add(z.re);
        im.add(z.im);
    }
    cpx(re.value(), im.value())
}

/// Difference between the default and the refined Mellin rule.
pub fn mellin_error_estimate(f: &SmoothTestFunction, s: ComplexPoint) -> f64 {
    (mellin_right(f, s, 1) - mellin_right(f, s, 2)).norm()
}

/// Mellin transform in either convention.
pub fn mellin(f: &SmoothTestFunction, s: ComplexPoint, conv: Convention) -> ComplexPoint {
    match conv {
        Convention::Right => f.mellin(s),
        Convention::Left => f.mellin_left(s),
    }
}

/// `∫ f dt` and `∫ f/t dt`, i.e. the right Mellin transform at 0 and 1.
pub fn moments(f: &SmoothTestFunction) -> (f64, f64) {
    (f.mellin(cpx(0.0, 0.0)).re, f.mellin(cpx(1.0, 0.0)).re)
}

/// Which moment a partial normalisation removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moment {
    /// `∫ f dt`, the right Mellin transform at 0.
    Mass,
    /// `∫ f/t dt`, the right Mellin transform at 1.
    Inverse,
}

fn auxiliary_bumps(f: &SmoothTestFunction) -> Result<(SmoothTestFunction, SmoothTestFunction)> {
    let (a, b) = f.support();
    let (la, lb) = (a.ln(), b.ln());
    let l = lb - la;
    let b1 = bump(la + 0.35 * l, 0.25 * l, 1.0)?;
    let b2 = bump(la + 0.65 * l, 0.25 * l, 1.0)?;
    Ok((b1, b2))
}

/// Subtracts two fixed auxiliary bumps inside the support of `f` so that both
/// `∫ f dt` and `∫ f/t dt` vanish.
pub fn enforce_moments(f: &SmoothTestFunction) -> Result<SmoothTestFunction> {
    let (b1, b2) = auxiliary_bumps(f)?;
    let (f0, f1) = moments(f);
    let (p0, p1) = moments(&b1);
    let (q0, q1) = moments(&b2);
    let det = p0 * q1 - q0 * p1;
    if det.abs() <= 1e-12 * (p0.abs() * q1.abs() + q0.abs() * p1.abs()) {
        return Err(Error::Numerical(
            "auxiliary bump moments are degenerate".into(),
        ));
    }
    let x = (f0 * q1 - q0 * f1) / det;
    let y = (p0 * f1 - f0 * p1) / det;
    SmoothTestFunction::combination(&[(1.0, f), (-x, &b1), (-y, &b2)])
}

/// Removes a single moment with one auxiliary bump, leaving the other one
/// untouched.
pub fn enforce_single_moment(f: &SmoothTestFunction, which: Moment) -> Result<SmoothTestFunction> {
    let (b1, _) = auxiliary_bumps(f)?;
    let (f0, f1) = moments(f);
    let (p0, p1) = moments(&b1);
    let x = match which {
        Moment::Mass => f0 / p0,
        Moment::Inverse => f1 / p1,
    };
    SmoothTestFunction::combination(&[(1.0, f), (-x, &b1)])
}

/// Piecewise functions of the Nyman-Beurling dictionary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PiecewiseFunction {
    /// `t ↦ {a/t}`, with breakpoints at `t = a/k` and decay `a/t`.
    FractionalPart { a: f64 },
    /// `1_{(0,1)}`.
    UnitIndicator,
}

/// Named test functions shared by the checks and the command line.
pub fn corpus() -> Vec<(&'static str, SmoothTestFunction)> {
    let b = |a: f64, b: f64| bump_on(a, b, 1.0).expect("valid support");
    vec![
        ("bump_half_two", b(0.5, 2.0)),
        ("bump_one_forty", b(1.0, 40.0)),
        ("bump_log3", bump(3f64.ln(), 0.5, 1.0).expect("valid bump")),
        ("bump_below_one", bump(-0.5, 0.6, 1.0).expect("valid bump")),
        ("bump_wide", b(0.2, 12.0)),
        (
            "moment_free_half_two",
            enforce_moments(&b(0.5, 2.0)).expect("moments"),
        ),
    ]
}

/// Looks up a [`corpus`] entry by name.
pub fn corpus_entry(name: &str) -> Result<SmoothTestFunction> {
    corpus()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, g)| g)
        .ok_or_else(|| Error::Domain(format!("unknown test function `{name}`")))
}

/// `t ↦ {a/t}`.
pub fn fractional_part_dilate(a: f64) -> Result<PiecewiseFunction> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!(
            "fractional_part_dilate needs a > 0, got {a}"
        )));
    }
    Ok(PiecewiseFunction::FractionalPart { a })
}

impl PiecewiseFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            PiecewiseFunction::FractionalPart { a } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let x = a / t;
                x - x.floor()
            }
            PiecewiseFunction::UnitIndicator => {
                if t > 0.0 && t < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Exponent `p` with `f(t) = O(t^{-p})` as `t → ∞`.
    pub fn decay_exponent(&self) -> f64 {
        match self {
            PiecewiseFunction::FractionalPart { .. } => 1.0,
            PiecewiseFunction::UnitIndicator => f64::INFINITY,
        }
    }

    /// Open strip `(σ_lo, σ_hi)` where the left Mellin integral converges.
    pub fn left_strip(&self) -> (f64, f64) {
        match self {
            PiecewiseFunction::FractionalPart { .. } => (0.0, 1.0),
            PiecewiseFunction::UnitIndicator => (0.0, f64::INFINITY),
        }
    }

    /// Left Mellin transform `∫ f(t) t^{s-1} dt` by quadrature.
    ///
    /// For `{a/t}` the substitution `u = a/t` gives `a^s ∫ {u} u^{-s-1} du`,
    /// integrated exactly on `[0, 1]`, by Gauss-Legendre on each unit interval
    /// up to a cutoff `K`, and by Euler-Maclaurin beyond it.
    pub fn mellin_left(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        let (lo, hi) = self.left_strip();
        if !(s.re > lo && s.re < hi) {
            return Err(Error::Domain(format!(
                "left Mellin integral diverges at {s} (strip {lo} < Re s < {hi})"
            )));
        }
        let one = Complex64::new(1.0, 0.0);
        match *self {
            PiecewiseFunction::UnitIndicator => Ok(s.inv()),
            PiecewiseFunction::FractionalPart { a } => {
                let alpha = s + 1.0;
                let k_cut = (40.0 * alpha.norm()).max(2000.0).ceil() as usize;
                let gl = gauss_legendre(12);
                let mut re = Neumaier::new();
                let mut im = Neumaier::new();
                // ∫_0^1 u^{-s} du
                let head = (one - s).inv();
                re.add(head.re);
                im.add(head.im);
                for k in 1..k_cut {
                    let kf = k as f64;
                    let h = 0.5;
                    let c = kf + 0.5;
                    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                        let u = c + h * x;
                        let z = (-alpha * u.ln()).exp() * ((u - kf) * w * h);
                        re.add(z.re);
                        im.add(z.im);
                    }
                }
                // Tail: ∫_K^∞ ½ u^{-α} du + Σ_j (−1)^j B_{j+1}/(j+1)! φ^{(j−1)}(K).
                let kf = k_cut as f64;
                let lk = kf.ln();
                let phi = (-alpha * lk).exp();
                let mut tail = phi * kf * 0.5 / (alpha - 1.0);
                tail -= phi / 12.0;
                tail += alpha * (alpha + 1.0) * phi / (720.0 * kf * kf);
                tail -= alpha * (alpha + 1.0) * (alpha + 2.0) * (alpha + 3.0) * phi
                    / (30240.0 * kf.powi(4));
                re.add(tail.re);
                im.add(tail.im);
                Ok((s * a.ln()).exp() * cpx(re.value(), im.value()))
            }
        }
    }

    /// Left Mellin transform in closed form: `−a^s ζ(s)/s` for `{a/t}`.
    pub fn mellin_left_closed_form(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        match *self {
            PiecewiseFunction::UnitIndicator => Ok(s.inv()),
            PiecewiseFunction::FractionalPart { a } => Ok(-(s * a.ln()).exp() * zeta(s)? / s),
        }
    }

    /// Right Mellin transform `∫ f(t) t^{-s} dt = (left transform)(1−s)`.
    pub fn mellin(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        self.mellin_left(Complex64::new(1.0, 0.0) - s)
    }
}

impl RealFunction for PiecewiseFunction {
    fn eval(&self, t: f64) -> f64 {
        PiecewiseFunction::eval(self, t)
    }
    fn extent(&self) -> (f64, f64) {
        match self {
            PiecewiseFunction::FractionalPart { .. } => (0.0, f64::INFINITY),
            PiecewiseFunction::UnitIndicator => (0.0, 1.0),
        }
    }
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        match *self {
            PiecewiseFunction::FractionalPart { a } => {
                // t = a/k for integers k in [a/hi, a/lo].
                let kmin = (a / hi).ceil().max(1.0) as u64;
                let kmax = if lo > 0.0 {
                    (a / lo).floor() as u64
                } else {
                    kmin + 100_000
                };
                (kmin..=kmax.min(kmin + 100_000))
                    .map(|k| a / k as f64)
                    .collect()
            }
            PiecewiseFunction::UnitIndicator => {
                if lo <= 1.0 && 1.0 <= hi {
                    vec![1.0]
                } else {
                    vec![]
                }
            }
        }
    }
    fn scale(&self, t: f64) -> f64 {
        match *self {
            // Breakpoints a/k are spaced about t²/a apart near t.
            PiecewiseFunction::FractionalPart { a } => (t * t / a).min(t).max(1e-9),
            PiecewiseFunction::UnitIndicator => 1.0,
        }
    }
}

/// Adapter turning a closure into a [`RealFunction`].
pub struct FnFunction<F: Fn(f64) -> f64 + Sync> {
    pub f: F,
    pub extent: (f64, f64),
    pub breaks: Vec<f64>,
    pub scale: f64,
}

impl<F: Fn(f64) -> f64 + Sync> RealFunction for FnFunction<F> {
    fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn extent(&self) -> (f64, f64) {
        self.extent
    }
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.breaks
            .iter()
            .copied()
            .filter(|b| *b >= lo && *b <= hi)
            .collect()
    }
    fn scale(&self, _t: f64) -> f64 {
        self.scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn unit() -> SmoothTestFunction {
        bump(0.0, LN_2, 1.0).unwrap()
    }

    #[test]
    fn bump_examples() {
        let f = unit();
        let (a, b) = f.support();
        assert!((a - 0.5).abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
        assert!((f.eval(1.0) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(2.0), 0.0);
        assert!(f.derivative(0.5 * (1.0 + 1e-9)).abs() < 1e-300);
        assert!(f.derivative(2.0 * (1.0 - 1e-9)).abs() < 1e-300);
        assert!(bump(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn derivative_matches_differences() {
        let f = unit()
            .dilate(0.7)
            .unwrap()
            .involute()
            .conductor_contract(3)
            .unwrap();
        let (a, b) = f.support();
        for i in 1..20 {
            let t = a + (b - a) * i as f64 / 20.0;
            let h = 1e-6 * t;
            let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
            assert!((f.derivative(t) - fd).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn dilate_examples() {
        let f = unit();
        assert_eq!(f.dilate(1.0).unwrap().eval(1.3), f.eval(1.3));
        let g = f.dilate(0.25).unwrap();
        let (a, b) = g.support();
        assert!((a - 0.125).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
        let theta = 0.37;
        for s in [cpx(0.5, 3.0), cpx(2.0, 0.0), cpx(-0.5, 10.0)] {
            let lhs = f.dilate(theta).unwrap().mellin(s);
            let rhs = ((cpx(1.0, 0.0) - s) * theta.ln()).exp() * f.mellin(s);
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn involute_examples() {
        let f = bump(0.3, 0.5, 2.0).unwrap();
        let ff = f.involute().involute();
        let mut worst = 0.0f64;
        for i in 1..1000 {
            let t = 0.3 + 3.0 * i as f64 / 1000.0;
            worst = worst.max((ff.eval(t) - f.eval(t)).abs());
        }
        assert!(worst < 1e-14);
        let (a, b) = unit().involute().support();
        assert!((a - 0.5).abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
        // ∫ I(f) dt = ∫ f(u)/u du, both sides by quadrature.
        let g = f.involute();
        let (ga, gb) = g.support();
        let lhs = crate::quad::composite(ga, gb, &[], 0.01, 16, |t| g.eval(t));
        let (fa, fb) = f.support();
        let rhs = crate::quad::composite(fa, fb, &[], 0.01, 16, |u| f.eval(u) / u);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn conductor_examples() {
        let f = bump_on(1.0, 2.0, 1.0).unwrap();
        assert_eq!(f.conductor_contract(1).unwrap().eval(1.4), f.eval(1.4));
        let g = f.conductor_contract(4).unwrap();
        let (a, b) = g.support();
        assert!((a - 0.25).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
        let s = cpx(0.5, 7.0);
        let rhs = ((s - 0.5) * 4f64.ln()).exp() * f.mellin(s);
        assert!((g.mellin(s) - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn mellin_examples() {
        let f = unit();
        for s in [
            cpx(0.5, 0.0),
            cpx(0.5, 25.0),
            cpx(2.0, -3.0),
            cpx(0.5, 60.0),
        ] {
            let err = mellin_error_estimate(&f, s);
            assert!(err < 1e-11, "s={s}: {err}");
        }
        let ind = PiecewiseFunction::UnitIndicator;
        let s = cpx(0.3, 2.0);
        let v = ind.mellin(s).unwrap();
        let expect = (cpx(1.0, 0.0) - s).inv();
        assert!((v - expect).norm() < 1e-15);
        let fp = fractional_part_dilate(1.0).unwrap();
        let s = cpx(0.5, 2.0);
        let q = fp.mellin_left(s).unwrap();
        let c = -zeta(s).unwrap() / s;
        assert!((q - c).norm() < 1e-10, "{q} vs {c}");
        let fp = fractional_part_dilate(0.3).unwrap();
        let s = cpx(0.7, -11.0);
        let q = fp.mellin_left(s).unwrap();
        let c = fp.mellin_left_closed_form(s).unwrap();
        assert!((q - c).norm() < 1e-10);
        assert!(fp.mellin_left(cpx(1.5, 0.0)).is_err());
    }

    #[test]
    fn enforce_moments_examples() {
        let f = bump(0.1, 0.6, 1.0).unwrap();
        let g = enforce_moments(&f).unwrap();
        let (m0, m1) = moments(&g);
        assert!(m0.abs() < 1e-12 && m1.abs() < 1e-12);
        let gg = enforce_moments(&g).unwrap();
        let (a, b) = g.support();
        assert_eq!(gg.support(), g.support());
        assert!((a - f.support().0).abs() < 1e-15 && (b - f.support().1).abs() < 1e-15);
        for i in 0..500 {
            let t = a + (b - a) * i as f64 / 500.0;
            assert!((gg.eval(t) - g.eval(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_moment_leaves_the_other() {
        let f = bump(0.1, 0.6, 1.0).unwrap();
        let g = enforce_single_moment(&f, Moment::Mass).unwrap();
        let (m0, m1) = moments(&g);
        assert!(m0.abs() < 1e-12 && m1.abs() > 1e-3);
        let g = enforce_single_moment(&f, Moment::Inverse).unwrap();
        let (m0, m1) = moments(&g);
        assert!(m1.abs() < 1e-12 && m0.abs() > 1e-3);
    }

    #[test]
    fn fractional_part_examples() {
        let f = fractional_part_dilate(1.0).unwrap();
        assert!((f.eval(2.5) - 0.4).abs() < 1e-15);
        assert!((f.eval(0.4) - 0.5).abs() < 1e-15);
        let g = fractional_part_dilate(0.3).unwrap();
        for t in [0.31, 0.5, 2.0, 100.0] {
            assert_eq!(g.eval(t), 0.3 / t);
        }
        assert!(fractional_part_dilate(0.0).is_err());
    }

    #[test]
    fn support_matches_vanishing_set() {
        let f = bump(0.2, 0.4, 1.0)
            .unwrap()
            .dilate(0.6)
            .unwrap()
            .involute()
            .conductor_contract(3)
            .unwrap();
        let (a, b) = f.support();
        let lo = a / 2.0;
        let hi = b * 2.0;
        let mut first = None;
        let mut last = None;
        for i in 0..=1000 {
            let t = lo * (hi / lo).powf(i as f64 / 1000.0);
            if f.eval(t) != 0.0 {
                first.get_or_insert(t);
                last = Some(t);
            }
        }
        let step = (hi / lo).powf(1e-3);
        assert!(first.unwrap() >= a && first.unwrap() <= a * step);
        assert!(last.unwrap() <= b && last.unwrap() >= b / step);
    }
}
