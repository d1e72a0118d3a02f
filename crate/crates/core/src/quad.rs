//! Quadrature rules and compensated summation.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    /// Appends mapped nodes and weights for `[a, b]`.
    pub fn push_mapped(&self, a: f64, b: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            xs.push(c + h * x);
            ws.push(w * h);
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared Gauss-Legendre rule of order `n`, built once per process.
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static GaussLegendre>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(Box::new(GaussLegendre::new(n))))
}

/// Clenshaw-Curtis rule on `[-1, 1]` with `n + 1` points.
#[derive(Debug, Clone)]
pub struct ClenshawCurtis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ClenshawCurtis {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2 && n % 2 == 0, "Clenshaw-Curtis needs an even n >= 2");
        let nf = n as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        let mut weights = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let theta = PI * k as f64 / nf;
            nodes.push(-theta.cos());
            let ck = if k == 0 || k == n { 1.0 } else { 2.0 };
            let mut s = 0.0;
            for j in 1..=n / 2 {
                let bj = if 2 * j == n { 1.0 } else { 2.0 };
                s += bj / (4.0 * (j * j) as f64 - 1.0) * (2.0 * j as f64 * theta).cos();
            }
            weights.push(ck / nf * (1.0 - s));
        }
        ClenshawCurtis { nodes, weights }
    }

    pub fn push_mapped(&self, a: f64, b: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            xs.push(c + h * x);
            ws.push(w * h);
        }
    }
}

/// Shared Clenshaw-Curtis rule with `n + 1` points.
pub fn clenshaw_curtis(n: usize) -> &'static ClenshawCurtis {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static ClenshawCurtis>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(Box::new(ClenshawCurtis::new(n))))
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Composite Gauss-Legendre over `[a, b]` split at `breaks` into panels of
/// width at most `max_width`.
pub fn composite<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    breaks: &[f64],
    max_width: f64,
    order: usize,
    mut f: F,
) -> f64 {
    let (xs, ws) = composite_rule(a, b, breaks, max_width, order);
    let mut acc = Neumaier::new();
    for (x, w) in xs.iter().zip(&ws) {
        acc.add(w * f(*x));
    }
    acc.value()
}

/// Nodes and weights of the composite rule used by [`composite`].
pub fn composite_rule(
    a: f64,
    b: f64,
    breaks: &[f64],
    max_width: f64,
    order: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    if b <= a {
        return (xs, ws);
    }
    let gl = gauss_legendre(order);
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("NaN breakpoint"));
    cuts.dedup();
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let pieces = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let step = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let p0 = lo + step * k as f64;
            let p1 = if k + 1 == pieces { hi } else { p0 + step };
            gl.push_mapped(p0, p1, &mut xs, &mut ws);
        }
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(7);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(13) + 3.0 * x.powi(4));
        let exact = 2f64.powi(14) / 14.0 + 3.0 * 2f64.powi(5) / 5.0;
        assert!((v - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 32, 64, 128] {
            let s: f64 = gauss_legendre(n).weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn clenshaw_curtis_cosine() {
        let cc = clenshaw_curtis(24);
        let (mut xs, mut ws) = (vec![], vec![]);
        cc.push_mapped(0.0, 1.0, &mut xs, &mut ws);
        let v: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (3.0 * x).cos()).sum();
        assert!((v - 3f64.sin() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn neumaier_recovers_small_terms() {
        let mut acc = Neumaier::new();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-15).abs() < 1e-30);
    }

    #[test]
    fn composite_respects_breakpoints() {
        let v = composite(0.0, 3.0, &[1.0, 2.0], 0.5, 8, |x| x.floor());
        assert!((v - 3.0).abs() < 1e-14);
    }
}
