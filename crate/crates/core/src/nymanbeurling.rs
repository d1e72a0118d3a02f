//! Least-squares distance from `1_{(0,1)}` to spans of dilated fractional
//! parts `{θ/t}`, `λ ≤ θ ≤ 1`, and its comparison with zero sums.

use crate::zeros::{zero_sum_inv_sq, ZeroList, ZeroWeighting};
use crate::{Error, Result, EULER_GAMMA};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

/// Default spectral cutoff, relative to the largest Gram eigenvalue.
pub const DEFAULT_CUTOFF: f64 = 1e-10;
/// Default dictionary density.
pub const DEFAULT_PER_OCTAVE: usize = 8;
/// Quadrature cutoff for `ip_frac(x, 1)` is `CUTOFF_SCALE / x`.
const CUTOFF_SCALE: f64 = 2e5;

/// `p/q` in lowest terms with `q ≤ max_den` if `x` is within `1e−12·x` of it.
fn small_rational(x: f64, max_den: u64) -> Option<(u64, u64)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= 1e-12 * x {
            return Some((h1, k1));
        }
        let f = r - a as f64;
        if f < 1e-15 {
            break;
        }
        r = 1.0 / f;
    }
    None
}

/// Mean value of `{xu}{u}`: `1/4 + 1/(12pq)` for `x = p/q`, else `1/4`.
fn product_mean(x: f64) -> f64 {
    match small_rational(x, 10_000) {
        Some((p, q)) => 0.25 + 1.0 / (12.0 * p as f64 * q as f64),
        None => 0.25,
    }
}

/// `∫_{u1}^{u2} (xu − j)(u − k)/u² du` in closed form.
#[inline]
fn panel(x: f64, j: f64, k: f64, u1: f64, u2: f64) -> f64 {
    let d = u2 - u1;
    x * d - (x * k + j) * (d / u1).ln_1p() + j * k * d / (u1 * u2)
}

/// `∫₀^∞ {a/t}{b/t} dt` with a bound on the tail replacement error.
///
/// Substituting `u = 1/t` gives `∫ {au}{bu} u^{−2} du`, integrated exactly
/// between breakpoints up to `U`; beyond `U` the product is replaced by its
/// mean value.
pub fn ip_frac_with_error(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "ip_frac needs a, b > 0 (got {a}, {b})"
        )));
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let x = lo / hi;
    let cutoff = CUTOFF_SCALE / x;
    // Below u = 1 both fractional parts are linear.
    let mut acc = crate::quad::Neumaier::new();
    acc.add(x);
    let mut u = 1.0;
    let mut k = 1.0f64;
    let mut j = (x * u).floor();
    let mut next_j = (j + 1.0) / x;
    while u < cutoff {
        let next_k = k + 1.0;
        let end = next_k.min(next_j).min(cutoff);
        acc.add(panel(x, j, k, u, end));
        u = end;
        if u == next_k {
            k = next_k;
        }
        if u == next_j {
            j += 1.0;
            next_j = (j + 1.0) / x;
        }
    }
    let tail = product_mean(x) / cutoff;
    acc.add(tail);
    // The running mean deviates from its limit by at most one period's worth.
    let err = (1.0 + 1.0 / x) / (cutoff * cutoff);
    Ok((hi * acc.value(), hi * err))
}

/// `∫₀^∞ {a/t}{b/t} dt`.
pub fn ip_frac(a: f64, b: f64) -> Result<f64> {
    ip_frac_with_error(a, b).map(|v| v.0)
}

/// `∫₀^1 {θ/t} dt = θ ∫_θ^∞ {v} v^{−2} dv`, summed over unit panels with an
/// Euler–Maclaurin tail.
pub fn ip_cross(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Domain(format!(
            "ip_cross needs 0 < θ ≤ 1, got {theta}"
        )));
    }
    let mut acc = crate::quad::Neumaier::new();
    // On (θ, 1) the fractional part is v itself.
    acc.add(-theta.ln());
    let kmax = 100_000u64;
    for k in 1..kmax {
        let kf = k as f64;
        acc.add((1.0 / kf).ln_1p() - 1.0 / (kf + 1.0));
    }
    let kf = kmax as f64;
    acc.add(0.5 / kf - 1.0 / (6.0 * kf * kf));
    Ok(theta * acc.value())
}

/// Closed form of [`ip_cross`], `θ(1 − γ − log θ)`.
pub fn ip_cross_closed_form(theta: f64) -> f64 {
    theta * (1.0 - EULER_GAMMA - theta.ln())
}

/// `n` points `λ^{i/(n−1)}`, from 1 down to `λ`.
pub fn geometric_thetas(lambda: f64, n: usize) -> Result<Vec<f64>> {
    check_lambda(lambda, true)?;
    if n == 0 {
        return Err(Error::Domain("dictionary needs n ≥ 1".into()));
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    Ok((0..n)
        .map(|i| lambda.powf(i as f64 / (n - 1) as f64))
        .collect())
}

/// `2^{−k/d}` for every `k ≥ 0` with `2^{−k/d} ≥ λ`.
pub fn octave_thetas(lambda: f64, per_octave: usize) -> Result<Vec<f64>> {
    check_lambda(lambda, true)?;
    if per_octave == 0 {
        return Err(Error::Domain("per-octave density must be positive".into()));
    }
    let d = per_octave as f64;
    let n = (-lambda.log2() * d + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| (-(k as f64) / d).exp2()).collect())
}

fn check_lambda(lambda: f64, allow_one: bool) -> Result<()> {
    let ok = lambda > 0.0 && (lambda < 1.0 || (allow_one && lambda == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("λ must lie in (0, 1], got {lambda}")))
    }
}

/// A solved least-squares problem.
#[derive(Debug, Clone, Serialize)]
pub struct GramSystem {
    pub thetas: Vec<f64>,
    #[serde(skip)]
    pub gram: DMatrix<f64>,
    pub rhs: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub d2: f64,
    pub svd_cutoff: f64,
    pub retained: usize,
    /// `σ_max / |σ_min|` of the full Gram matrix.
    pub condition: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Summed tail bounds of the Gram and right-hand-side entries.
    pub quadrature_error: f64,
}

impl GramSystem {
    /// `‖Gc − b‖`.
    pub fn normal_residual(&self) -> f64 {
        let c = DVector::from_column_slice(&self.coeffs);
        let b = DVector::from_column_slice(&self.rhs);
        (&self.gram * c - b).norm()
    }

    /// `max |G − Gᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.gram - self.gram.transpose()).abs().max()
    }
}

/// Solves for the best combination of `{θ/t}`, `θ ∈ thetas`, discarding
/// eigenvalues below `cutoff·σ_max`.
pub fn solve_thetas(thetas: &[f64], cutoff: f64) -> Result<GramSystem> {
    if thetas.is_empty() {
        return Err(Error::Domain("empty dictionary".into()));
    }
    if thetas.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::Domain("dilations must lie in (0, 1]".into()));
    }
    if !(0.0..1.0).contains(&cutoff) {
        return Err(Error::Domain(format!(
            "cutoff must lie in [0, 1), got {cutoff}"
        )));
    }
    let n = thetas.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let entries = crate::par::map(&pairs, 8, |&(i, j)| {
        ip_frac_with_error(thetas[i], thetas[j])
    })?;
    let mut gram = DMatrix::<f64>::zeros(n, n);
    let mut qerr = 0.0;
    for (&(i, j), &(v, e)) in pairs.iter().zip(&entries) {
        gram[(i, j)] = v;
        gram[(j, i)] = v;
        qerr += if i == j { e } else { 2.0 * e };
    }
    let rhs: Vec<f64> = thetas.iter().map(|t| ip_cross(*t)).collect::<Result<_>>()?;
    let b = DVector::from_column_slice(&rhs);
    let eig = SymmetricEigen::new(gram.clone());
    let smax = eig.eigenvalues.max();
    let smin = eig.eigenvalues.min();
    let mut c = DVector::<f64>::zeros(n);
    let mut retained = 0;
    for k in 0..n {
        let s = eig.eigenvalues[k];
        if s > cutoff * smax && s > 0.0 {
            let v = eig.eigenvectors.column(k);
            c += v * (v.dot(&b) / s);
            retained += 1;
        }
    }
    if retained == 0 {
        return Err(Error::Numerical(
            "spectral cutoff removed every mode".into(),
        ));
    }
    let d2 = 1.0 - b.dot(&c);
    Ok(GramSystem {
        thetas: thetas.to_vec(),
        gram,
        rhs,
        coeffs: c.iter().copied().collect(),
        d2,
        svd_cutoff: cutoff,
        retained,
        condition: smax / smin.abs(),
        min_eigenvalue: smin,
        max_eigenvalue: smax,
        quadrature_error: qerr,
    })
}

/// [`solve_thetas`] on the geometric dictionary of `n` points in `[λ, 1]`.
pub fn solve_distance(lambda: f64, n: usize, cutoff: f64) -> Result<GramSystem> {
    solve_thetas(&geometric_thetas(lambda, n)?, cutoff)
}

/// One row of the bound table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub lambda: f64,
    pub n: usize,
    pub d2: f64,
    /// `|log λ| · D²`.
    pub logscaled: f64,
    /// `Σ_ρ 1/|ρ|²` over the supplied zeros.
    pub zerosum: f64,
    pub cond: f64,
}

/// Juxtaposes `|log λ|·D(λ)²` with the partial zero sum. The comparison is
/// asymptotic, so nothing is asserted.
pub fn bound_report(systems: &[(f64, GramSystem)], zeros: &ZeroList) -> Result<Vec<BoundRow>> {
    let mut seen: Vec<f64> = Vec::new();
    for (l, _) in systems {
        check_lambda(*l, false)?;
        if seen.contains(l) {
            return Err(Error::Domain(format!("λ = {l} appears twice")));
        }
        seen.push(*l);
    }
    let zerosum = zero_sum_inv_sq(zeros, ZeroWeighting::MultiplicitySquared);
    Ok(systems
        .iter()
        .map(|(l, s)| BoundRow {
            lambda: *l,
            n: s.thetas.len(),
            d2: s.d2,
            logscaled: l.ln().abs() * s.d2,
            zerosum,
            cond: s.condition,
        })
        .collect())
}

/// `lambda,n,D2,logscaled,zerosum,cond` CSV.
pub fn bound_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from("lambda,n,D2,logscaled,zerosum,cond\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.10},{:.10},{:.10},{:.6e}\n",
            r.lambda, r.n, r.d2, r.logscaled, r.zerosum, r.cond
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `∫ {au}{bu} u^{−2} du` by midpoint sums on a fine grid between
    /// breakpoints, plus the mean-value tail.
    fn ip_oracle(a: f64, b: f64, upper: f64) -> f64 {
        let mut bps: Vec<f64> = Vec::new();
        for k in 1..=(upper * a) as u64 {
            bps.push(k as f64 / a);
        }
        for k in 1..=(upper * b) as u64 {
            bps.push(k as f64 / b);
        }
        bps.push(upper);
        bps.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut acc = 0.0;
        let mut lo = 0.0;
        for hi in bps {
            if hi <= lo {
                continue;
            }
            let m = 64;
            let h = (hi - lo) / m as f64;
            for i in 0..m {
                let u = lo + (i as f64 + 0.5) * h;
                let f = (a * u).fract() * (b * u).fract();
                acc += if u > 0.0 { f / (u * u) * h } else { 0.0 };
            }
            lo = hi;
        }
        // First panel: the integrand tends to ab at 0.
        acc + 0.25 / upper
    }

    #[test]
    fn ip_frac_examples() {
        let target = (2.0 * PI).ln() - EULER_GAMMA;
        let (v, e) = ip_frac_with_error(1.0, 1.0).unwrap();
        assert!((v - target).abs() < 1e-8);
        assert!(e < 1e-8);
        assert!((v - 1.260_661_401_507_812_6).abs() < 1e-10);
        // Coarse independent quadrature, good to a few 1e−5.
        let o = ip_oracle(0.6, 1.0, 3000.0);
        assert!((ip_frac(0.6, 1.0).unwrap() - o).abs() < 1e-4, "{o}");
        assert!((ip_frac(0.3, 0.7).unwrap() - ip_frac(0.7, 0.3).unwrap()).abs() < 1e-12);
        assert!((ip_frac(0.6, 1.4).unwrap() - 2.0 * ip_frac(0.3, 0.7).unwrap()).abs() < 1e-9);
        assert!(ip_frac(0.0, 1.0).is_err());
    }

    #[test]
    fn rational_means() {
        assert_eq!(small_rational(0.5, 100), Some((1, 2)));
        assert_eq!(small_rational(1.0, 100), Some((1, 1)));
        assert_eq!(small_rational(2f64.sqrt() - 1.0, 100), None);
        assert!((product_mean(1.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ip_cross_examples() {
        assert!((ip_cross(1.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-9);
        assert!((ip_cross(1.0).unwrap() - 0.422_784_335_098_467_1).abs() < 1e-9);
        for t in [1e-3, 0.1, 0.37, 0.8] {
            assert!((ip_cross(t).unwrap() - ip_cross_closed_form(t)).abs() < 1e-9);
        }
        let small = ip_cross(1e-3).unwrap();
        assert!(small > 0.0 && small < 1e-3 * (1e3f64).ln() + 1e-3);
        // Increasing below e^{−γ}, where the derivative −γ − log θ changes sign.
        let grid: Vec<f64> = (1..=50).map(|i| 0.01 * i as f64).collect();
        for w in grid.windows(2) {
            assert!(ip_cross(w[1]).unwrap() > ip_cross(w[0]).unwrap());
        }
        assert!(ip_cross(1.0).unwrap() < ip_cross(0.6).unwrap());
        assert!(ip_cross(0.0).is_err() && ip_cross(1.5).is_err());
    }

    #[test]
    fn single_atom_distance() {
        let s = solve_distance(1.0, 1, DEFAULT_CUTOFF).unwrap();
        let expected = 1.0 - (1.0 - EULER_GAMMA).powi(2) / ((2.0 * PI).ln() - EULER_GAMMA);
        assert!((s.d2 - expected).abs() < 1e-8);
        assert!((s.d2 - 0.858_212_051_395_510_9).abs() < 1e-8);
    }

    #[test]
    fn refinement_never_increases_distance() {
        let mut prev = f64::INFINITY;
        for n in [5, 9, 17] {
            let s = solve_distance(0.1, n, DEFAULT_CUTOFF).unwrap();
            assert!(s.asymmetry() < 1e-10);
            assert!(s.min_eigenvalue >= -1e-8 * s.max_eigenvalue);
            assert!((0.0..=1.0).contains(&s.d2));
            assert!(s.normal_residual() < 1e-10);
            assert!(s.d2 <= prev + 1e-12, "n={n}");
            prev = s.d2;
        }
        // A sub-dictionary can only do worse.
        let full = octave_thetas(0.25, 4).unwrap();
        let d_full = solve_thetas(&full, DEFAULT_CUTOFF).unwrap().d2;
        let sub: Vec<f64> = full.iter().step_by(3).copied().collect();
        assert!(d_full <= solve_thetas(&sub, DEFAULT_CUTOFF).unwrap().d2);
    }

    #[test]
    fn dictionaries() {
        let g = geometric_thetas(0.1, 5).unwrap();
        let h = geometric_thetas(0.1, 9).unwrap();
        for (i, t) in g.iter().enumerate() {
            assert!((t - h[2 * i]).abs() < 1e-15);
        }
        assert_eq!(octave_thetas(0.25, 2).unwrap().len(), 5);
        let a = octave_thetas(0.1, 8).unwrap();
        let b = octave_thetas(0.05, 8).unwrap();
        assert_eq!(&b[..a.len()], &a[..]);
        assert!(geometric_thetas(1.5, 3).is_err());
        assert!(solve_thetas(&[1.0], 1.5).is_err());
    }

    #[test]
    fn bound_table() {
        let z = ZeroList::new(vec![14.134725141734694, 21.022039638771555], 1e-9).unwrap();
        let systems: Vec<(f64, GramSystem)> = [0.5, 0.25]
            .iter()
            .map(|&l| {
                (
                    l,
                    solve_thetas(&octave_thetas(l, 4).unwrap(), DEFAULT_CUTOFF).unwrap(),
                )
            })
            .collect();
        let rows = bound_report(&systems, &z).unwrap();
        let zs = zero_sum_inv_sq(&z, ZeroWeighting::Once);
        for r in &rows {
            assert!(r.logscaled.is_finite());
            assert_eq!(r.zerosum, zs);
        }
        assert!(rows[1].d2 <= rows[0].d2);
        let csv = bound_csv(&rows);
        assert!(csv.starts_with("lambda,n,D2,logscaled,zerosum,cond\n0.5,5,"));
        let dup = vec![systems[0].clone(), systems[0].clone()];
        assert!(bound_report(&dup, &z).is_err());
    }
}
