//! Log-gamma and digamma for complex arguments.

use crate::{Complex64, ComplexPoint, Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Even Bernoulli numbers `B_2, B_4, ..., B_30`.
pub(crate) const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

pub(crate) fn is_nonpositive_integer(s: ComplexPoint) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

fn lanczos_ln(z: ComplexPoint) -> ComplexPoint {
    // ln Γ(z) for Re z >= 1/2.
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Principal branch of `ln Γ(s)`.
///
/// Arguments left of `Re s = 1/2` are shifted right with the recurrence rather
/// than reflected, so the result is continuous away from the negative real
/// axis.
pub fn gamma_ln(s: ComplexPoint) -> Result<ComplexPoint> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {s}")));
    }
    if is_nonpositive_integer(s) {
        return Err(Error::Pole {
            function: "gamma_ln",
            at: format!("{s}"),
        });
    }
    if s.re >= 0.5 {
        return Ok(lanczos_ln(s));
    }
    let m = (0.5 - s.re).ceil() as usize;
    let mut shift = Complex64::new(0.0, 0.0);
    for k in 0..m {
        shift += (s + k as f64).ln();
    }
    Ok(lanczos_ln(s + m as f64) - shift)
}

/// `Γ(s)`; zero is never returned.
pub fn gamma(s: ComplexPoint) -> Result<ComplexPoint> {
    gamma_ln(s).map(|l| l.exp())
}

/// Digamma `ψ(s) = Γ'(s)/Γ(s)`.
pub fn digamma(s: ComplexPoint) -> Result<ComplexPoint> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {s}")));
    }
    if is_nonpositive_integer(s) {
        return Err(Error::Pole {
            function: "digamma",
            at: format!("{s}"),
        });
    }
    let mut z = s;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < 10.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let zi2 = (z * z).inv();
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = zi2;
    for (k, b) in BERNOULLI_EVEN.iter().take(8).enumerate() {
        series += b / (2.0 * (k + 1) as f64) * p;
        p *= zi2;
    }
    Ok(acc + z.ln() - 0.5 / z - series)
}
