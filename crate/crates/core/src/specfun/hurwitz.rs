//! Hurwitz zeta by Euler-Maclaurin summation.

use super::gamma::BERNOULLI_EVEN;
use crate::{Complex64, ComplexPoint, Error, Result};

const CORRECTIONS: usize = 14;

/// `ζ(s, a) = Σ_{k≥0} (k+a)^{-s}` for `a ∈ (0, 1]`.
pub fn hurwitz_zeta(s: ComplexPoint, a: f64) -> Result<ComplexPoint> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!(
            "hurwitz_zeta needs a in (0,1], got {a}"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    if s == one {
        return Err(Error::Pole {
            function: "hurwitz_zeta",
            at: format!("{s}"),
        });
    }
    let n = (s.norm().ceil() as usize).max(15) + 10;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        acc += (-s * (k as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let xs = (-s * lx).exp();
    acc += xs * x / (s - one) + 0.5 * xs;
    // B_{2j}/(2j)! · s(s+1)...(s+2j-2) · x^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut pow = xs / x;
    for (j, b) in BERNOULLI_EVEN.iter().take(CORRECTIONS).enumerate() {
        let term = rising * pow * (b / fact);
        acc += term;
        let m = 2.0 * (j + 1) as f64;
        rising *= (s + (m - 1.0)) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        pow /= x * x;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpx;
    use std::f64::consts::PI;

    #[test]
    fn hurwitz_examples() {
        let v = hurwitz_zeta(cpx(2.0, 0.0), 1.0).unwrap();
        assert!((v.re - PI * PI / 6.0).abs() < 1e-14);
        // Direct-sum oracle for a = 1/2 with integral tail 1/(N+1/2) ... corrected.
        let n = 1_000_000u64;
        let mut acc = crate::quad::Neumaier::new();
        for k in 0..n {
            let x = k as f64 + 0.5;
            acc.add(1.0 / (x * x));
        }
        let x = n as f64 + 0.5;
        let oracle = acc.value() + 1.0 / x + 0.5 / (x * x);
        let v = hurwitz_zeta(cpx(2.0, 0.0), 0.5).unwrap();
        assert!((v.re - oracle).abs() < 1e-12);
        assert!((v.re - PI * PI / 2.0).abs() < 1e-13);
        let v0 = hurwitz_zeta(cpx(0.0, 0.0), 0.5).unwrap();
        assert!(v0.norm() < 1e-14);
        let v0 = hurwitz_zeta(cpx(0.0, 0.0), 0.2).unwrap();
        assert!((v0.re - 0.3).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_duplication() {
        // ζ(s,1/2) + ζ(s,1) = 2^s ζ(s).
        for &(re, im) in &[(0.5, 20.0), (0.3, -150.0), (2.5, 1.0)] {
            let s = cpx(re, im);
            let lhs = hurwitz_zeta(s, 0.5).unwrap() + hurwitz_zeta(s, 1.0).unwrap();
            let rhs = (s * 2f64.ln()).exp() * hurwitz_zeta(s, 1.0).unwrap();
            assert!((lhs - rhs).norm() < 1e-11 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn hurwitz_rejects_bad_input() {
        assert!(hurwitz_zeta(cpx(1.0, 0.0), 0.5).is_err());
        assert!(hurwitz_zeta(cpx(2.0, 0.0), 0.0).is_err());
        assert!(hurwitz_zeta(cpx(2.0, 0.0), 1.5).is_err());
    }
}
