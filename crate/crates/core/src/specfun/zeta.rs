//! Riemann zeta via the accelerated alternating series, and the factor χ₊.

use super::gamma::{gamma_ln, is_nonpositive_integer};
use super::hurwitz::hurwitz_zeta;
use crate::{Complex64, ComplexPoint, Error, Result};
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

/// Number of terms of the accelerated eta series for height `t`.
fn eta_terms(t: f64) -> usize {
    let rate = (3.0 + 8f64.sqrt()).ln();
    let n = (0.5 * PI * t.abs() + (1.0 + 2.0 * t.abs()).ln() + 40.0) / rate;
    n.ceil() as usize + 8
}

/// Normalised tail weights `w_k = Σ_{i>k} a_i / Σ_i a_i` of the Chebyshev
/// acceleration, computed in log space.
fn eta_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut log_a = Vec::with_capacity(n + 1);
    let mut la = 0.0;
    log_a.push(la);
    for i in 0..n {
        let fi = i as f64;
        let ratio = 4.0 * (nf + fi) * (nf - fi) / ((2.0 * fi + 1.0) * (2.0 * fi + 2.0));
        la += ratio.ln();
        log_a.push(la);
    }
    let peak = log_a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let a: Vec<f64> = log_a.iter().map(|l| (l - peak).exp()).collect();
    let total: f64 = a.iter().sum();
    let mut w = vec![0.0; n];
    let mut tail = 0.0;
    for k in (0..n).rev() {
        tail += a[k + 1];
        w[k] = tail / total;
    }
    w
}

/// Dirichlet eta function `Σ (-1)^{k} (k+1)^{-s}` for `Re s > 0`.
pub fn eta(s: ComplexPoint) -> ComplexPoint {
    let n = eta_terms(s.im);
    EtaTables::with(n, |w, logs| eta_sum(s, w, logs))
}

/// Per-thread cache of acceleration weights and `log(k+1)`.
struct EtaTables {
    weights: HashMap<usize, Rc<Vec<f64>>>,
    logs: Rc<Vec<f64>>,
}

thread_local! {
    static ETA_TABLES: RefCell<EtaTables> = RefCell::new(EtaTables {
        weights: HashMap::new(),
        logs: Rc::new(Vec::new()),
    });
}

impl EtaTables {
    fn with<R>(n: usize, f: impl FnOnce(&[f64], &[f64]) -> R) -> R {
        let (w, logs) = ETA_TABLES.with(|cell| {
            let mut t = cell.borrow_mut();
            if t.logs.len() < n {
                let logs: Vec<f64> = (0..n.max(4096)).map(|k| ((k + 1) as f64).ln()).collect();
                t.logs = Rc::new(logs);
            }
            if t.weights.len() > 256 {
                t.weights.clear();
            }
            let w = t
                .weights
                .entry(n)
                .or_insert_with(|| Rc::new(eta_weights(n)))
                .clone();
            (w, t.logs.clone())
        });
        f(&w, &logs[..n])
    }
}

fn eta_sum(s: ComplexPoint, w: &[f64], logs: &[f64]) -> ComplexPoint {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for (k, (wk, lk)) in w.iter().zip(logs).enumerate() {
        let term = (-s * *lk).exp() * *wk;
        let term = if k % 2 == 0 { term } else { -term };
        let y = term - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    acc
}

/// Riemann zeta function.
pub fn zeta(s: ComplexPoint) -> Result<ComplexPoint> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {s}")));
    }
    if s.re == 1.0 && s.im == 0.0 {
        return Err(Error::Pole {
            function: "zeta",
            at: format!("{s}"),
        });
    }
    if s.re < 0.0 {
        // ζ(s) = χ₊(s) ζ(1-s); χ₊ vanishes at the trivial zeros.
        let c = chi_plus(s)?;
        if c == Complex64::new(0.0, 0.0) {
            return Ok(c);
        }
        return Ok(c * zeta(Complex64::new(1.0, 0.0) - s)?);
    }
    if s.re > 40.0 {
        // Direct series converges to machine precision after a few terms.
        let mut acc = Complex64::new(1.0, 0.0);
        for k in 2..8 {
            acc += (-s * (k as f64).ln()).exp();
        }
        return Ok(acc);
    }
    let factor = Complex64::new(1.0, 0.0) - (Complex64::new(1.0, 0.0) - s).scale(2f64.ln()).exp();
    if factor.norm() < 0.1 {
        return hurwitz_zeta(s, 1.0);
    }
    Ok(eta(s) / factor)
}

/// `χ₊(s) = π^{s-1/2} Γ((1-s)/2) / Γ(s/2)`, so that `ζ(s) = χ₊(s) ζ(1-s)`.
///
/// Exactly zero at `s = 0, -2, -4, ...`; pole error at `s = 1, 3, 5, ...`.
pub fn chi_plus(s: ComplexPoint) -> Result<ComplexPoint> {
    let half = s * 0.5;
    if is_nonpositive_integer(half) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let other = (Complex64::new(1.0, 0.0) - s) * 0.5;
    if is_nonpositive_integer(other) {
        return Err(Error::Pole {
            function: "chi_plus",
            at: format!("{s}"),
        });
    }
    let l = (s - 0.5) * PI.ln() + gamma_ln(other)? - gamma_ln(half)?;
    Ok(l.exp())
}

/// Logarithmic derivative `d/ds log χ₊(s) = log π - ψ((1-s)/2)/2 - ψ(s/2)/2`.
pub fn chi_plus_log_derivative(s: ComplexPoint) -> Result<ComplexPoint> {
    let one = Complex64::new(1.0, 0.0);
    Ok(PI.ln()
        - 0.5 * super::gamma::digamma((one - s) * 0.5)?
        - 0.5 * super::gamma::digamma(s * 0.5)?)
}
