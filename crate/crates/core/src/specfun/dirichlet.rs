//! Primitive even Dirichlet characters and their L-functions.

use super::arith::{factorize, gcd};
use super::hurwitz::hurwitz_zeta;
use super::zeta::chi_plus;
use crate::{Complex64, ComplexPoint, Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// A Dirichlet character modulo `q`, stored as its value table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletCharacter {
    pub modulus: u64,
    /// Position in the enumeration of [`DirichletCharacter::all`].
    pub index: usize,
    /// `values[n] = χ(n)` for `0 <= n < q`.
    pub values: Vec<Complex64>,
    pub even: bool,
    pub primitive: bool,
    pub gauss_sum: Complex64,
    pub root_number: Complex64,
}

/// Generator data for one cyclic factor of `(Z/q)^×`.
struct CyclicFactor {
    order: u64,
    /// Discrete log table over residues modulo `q` (u64::MAX when unused).
    dlog: Vec<u64>,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn cyclic_factors(q: u64) -> Vec<CyclicFactor> {
    let mut out = Vec::new();
    for (p, k) in factorize(q) {
        let pk = p.pow(k);
        let mut gens: Vec<(u64, u64)> = Vec::new(); // (generator mod pk, order)
        if p == 2 {
            if k == 2 {
                gens.push((pk - 1, 2));
            } else if k >= 3 {
                gens.push((pk - 1, 2));
                gens.push((5, pk / 4));
            }
        } else {
            let phi = pk / p * (p - 1);
            let primes: Vec<u64> = factorize(phi).into_iter().map(|(r, _)| r).collect();
            let g = (2..pk)
                .find(|&g| g % p != 0 && primes.iter().all(|&r| pow_mod(g, phi / r, pk) != 1))
                .expect("odd prime powers have primitive roots");
            gens.push((g, phi));
        }
        // Discrete logs are computed jointly over the generators of this
        // prime power, then transported to residues mod q.
        let mut logs = vec![vec![u64::MAX; pk as usize]; gens.len()];
        match gens.len() {
            1 => {
                let (g, ord) = gens[0];
                let mut x = 1 % pk;
                for e in 0..ord {
                    logs[0][x as usize] = e;
                    x = x * g % pk;
                }
            }
            2 => {
                let (g0, o0) = gens[0];
                let (g1, o1) = gens[1];
                let mut x0 = 1 % pk;
                for e0 in 0..o0 {
                    let mut x = x0;
                    for e1 in 0..o1 {
                        logs[0][x as usize] = e0;
                        logs[1][x as usize] = e1;
                        x = x * g1 % pk;
                    }
                    x0 = x0 * g0 % pk;
                }
            }
            _ => {}
        }
        for (i, &(_, ord)) in gens.iter().enumerate() {
            let mut dlog = vec![u64::MAX; q as usize];
            for n in 0..q {
                if gcd(n, q) == 1 {
                    dlog[n as usize] = logs[i][(n % pk) as usize];
                }
            }
            out.push(CyclicFactor { order: ord, dlog });
        }
    }
    out
}

fn root_of_unity(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    if num == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * num == den {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * num == den {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * num == 3 * den {
        return Complex64::new(0.0, -1.0);
    }
    let a = 2.0 * PI * num as f64 / den as f64;
    Complex64::new(a.cos(), a.sin())
}

impl DirichletCharacter {
    /// Every character modulo `q`, in a fixed order (index 0 is principal).
    pub fn all(q: u64) -> Result<Vec<DirichletCharacter>> {
        if q == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        if q > 100_000 {
            return Err(Error::Domain(format!("modulus {q} too large")));
        }
        let factors = cyclic_factors(q);
        let total: u64 = factors.iter().map(|f| f.order).product();
        let mut out = Vec::with_capacity(total as usize);
        for index in 0..total {
            // Mixed radix digits of index give the exponent per factor.
            let mut rest = index;
            let mut exps = Vec::with_capacity(factors.len());
            for f in &factors {
                exps.push(rest % f.order);
                rest /= f.order;
            }
            let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
            for n in 0..q {
                if gcd(n, q) != 1 {
                    continue;
                }
                // χ(n) = exp(2πi Σ_j e_j log_j(n) / ord_j); combine over a common denominator.
                let den: u64 = factors.iter().map(|f| f.order).fold(1, lcm);
                let mut num = 0u64;
                for (f, e) in factors.iter().zip(&exps) {
                    let l = f.dlog[n as usize];
                    num = (num + (e * l % f.order) * (den / f.order)) % den;
                }
                values[n as usize] = root_of_unity(num, den);
            }
            out.push(Self::from_values(q, index as usize, values));
        }
        Ok(out)
    }

    fn from_values(q: u64, index: usize, values: Vec<Complex64>) -> Self {
        let even = q <= 2 || (values[(q - 1) as usize] - Complex64::new(1.0, 0.0)).norm() < 1e-12;
        let primitive = is_primitive(q, &values);
        let mut gauss = Complex64::new(0.0, 0.0);
        for (a, v) in values.iter().enumerate() {
            gauss += v * root_of_unity(a as u64, q);
        }
        let root_number = gauss / (q as f64).sqrt();
        DirichletCharacter {
            modulus: q,
            index,
            values,
            even,
            primitive,
            gauss_sum: gauss,
            root_number,
        }
    }

    /// Primitive even characters modulo `q` with `q > 1`.
    pub fn primitive_even(q: u64) -> Result<Vec<DirichletCharacter>> {
        Ok(Self::all(q)?
            .into_iter()
            .filter(|c| c.primitive && c.even && q > 1)
            .collect())
    }

    /// The character with the given enumeration index, required to be
    /// primitive and even.
    pub fn new(q: u64, index: usize) -> Result<DirichletCharacter> {
        let chi = Self::all(q)?
            .into_iter()
            .nth(index)
            .ok_or_else(|| Error::Domain(format!("no character {index} modulo {q}")))?;
        chi.validate()?;
        Ok(chi)
    }

    /// The real character `n ↦ (n/p)` for a prime `p ≡ 1 (mod 4)`.
    pub fn legendre(p: u64) -> Result<DirichletCharacter> {
        if p < 5 || p % 4 != 1 || factorize(p).len() != 1 || factorize(p)[0].1 != 1 {
            return Err(Error::Domain(format!(
                "{p} is not a prime congruent to 1 mod 4"
            )));
        }
        Self::all(p)?
            .into_iter()
            .find(|c| c.index != 0 && c.values.iter().all(|v| v.im == 0.0))
            .ok_or_else(|| Error::Numerical("quadratic character not found".into()))
            .and_then(|c| c.validate().map(|_| c))
    }

    /// Checks primitivity, evenness and `| |w_χ| - 1 | <= 1e-12`.
    pub fn validate(&self) -> Result<()> {
        if self.modulus < 2 {
            return Err(Error::Domain(
                "principal character modulo 1 is excluded".into(),
            ));
        }
        if !self.primitive {
            return Err(Error::Domain(format!(
                "character {} modulo {} is not primitive",
                self.index, self.modulus
            )));
        }
        if !self.even {
            return Err(Error::Domain(format!(
                "character {} modulo {} is odd",
                self.index, self.modulus
            )));
        }
        if (self.root_number.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!(
                "root number has modulus {}",
                self.root_number.norm()
            )));
        }
        Ok(())
    }

    /// `χ(n)` for any integer `n`.
    pub fn value(&self, n: i64) -> Complex64 {
        let q = self.modulus as i64;
        self.values[n.rem_euclid(q) as usize]
    }

    /// The complex conjugate character.
    pub fn conj(&self) -> DirichletCharacter {
        let values: Vec<Complex64> = self.values.iter().map(|v| v.conj()).collect();
        let mut c = Self::from_values(self.modulus, self.index, values);
        c.index = usize::MAX;
        // Recover the enumeration index of the conjugate when possible.
        if let Ok(all) = Self::all(self.modulus) {
            if let Some(m) = all.iter().find(|d| {
                d.values
                    .iter()
                    .zip(&c.values)
                    .all(|(a, b)| (a - b).norm() < 1e-12)
            }) {
                c.index = m.index;
            }
        }
        c
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.abs() < 1e-14)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn is_primitive(q: u64, values: &[Complex64]) -> bool {
    if q == 1 {
        return true;
    }
    // Not induced from q/p for any prime p | q.
    factorize(q).iter().all(|&(p, _)| {
        let d = q / p;
        (1..q).any(|n| {
            gcd(n, q) == 1
                && n % d == 1 % d
                && (values[n as usize] - Complex64::new(1.0, 0.0)).norm() > 1e-9
        })
    })
}

/// `L(s, χ) = q^{-s} Σ_{a=1}^{q} χ(a) ζ(s, a/q)` for a primitive even χ.
pub fn dirichlet_l(s: ComplexPoint, chi: &DirichletCharacter) -> Result<ComplexPoint> {
    chi.validate()?;
    let q = chi.modulus as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..=chi.modulus {
        let v = chi.value(a as i64);
        if v.norm() == 0.0 {
            continue;
        }
        acc += v * hurwitz_zeta(s, a as f64 / q)?;
    }
    Ok(acc * (-s * q.ln()).exp())
}

/// Residual of `L(s,χ) = w_χ q^{1/2-s} χ₊(s) L(1-s, χ̄)`.
pub fn dirichlet_functional_equation_residual(
    s: ComplexPoint,
    chi: &DirichletCharacter,
) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let q = chi.modulus as f64;
    let lhs = dirichlet_l(s, chi)?;
    let rhs = chi.root_number
        * ((Complex64::new(0.5, 0.0) - s) * q.ln()).exp()
        * chi_plus(s)?
        * dirichlet_l(one - s, &chi.conj())?;
    Ok((lhs - rhs).norm())
}

/// Real rotation `e^{iθ_χ(t)} L(1/2+it, χ)` of a real even primitive
/// character's L-function on the critical line, whose sign changes are zeros.
pub fn dirichlet_hardy_z(t: f64, chi: &DirichletCharacter) -> Result<f64> {
    if !chi.is_real() {
        return Err(Error::Domain(
            "Hardy rotation needs a real character".into(),
        ));
    }
    let q = chi.modulus as f64;
    let s = Complex64::new(0.5, t);
    let theta = super::gamma::gamma_ln(Complex64::new(0.25, 0.5 * t))?.im + 0.5 * t * (q / PI).ln();
    let phase = Complex64::new(theta.cos(), theta.sin()) * chi.root_number.sqrt().conj();
    let z = phase * dirichlet_l(s, chi)?;
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpx;

    #[test]
    fn quadratic_mod5() {
        let chi = DirichletCharacter::legendre(5).unwrap();
        let expect = [0.0, 1.0, -1.0, -1.0, 1.0];
        for (v, e) in chi.values.iter().zip(expect) {
            assert_eq!(*v, cpx(e, 0.0));
        }
        assert!((chi.gauss_sum - cpx(5f64.sqrt(), 0.0)).norm() < 1e-13);
        assert!((chi.root_number - cpx(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn l_at_two_matches_series() {
        let chi = DirichletCharacter::legendre(5).unwrap();
        let v = dirichlet_l(cpx(2.0, 0.0), &chi).unwrap();
        // Direct series oracle, grouped in full periods (the period sum is 0).
        let mut acc = crate::quad::Neumaier::new();
        let n_max = 2_000_000i64;
        for n in 1..=n_max {
            let c = chi.value(n).re;
            if c != 0.0 {
                acc.add(c / (n as f64 * n as f64));
            }
        }
        assert!(
            (v.re - acc.value()).abs() < 1e-10,
            "{} vs {}",
            v.re,
            acc.value()
        );
        assert!((v.re - 0.706_211_403_259_740_9).abs() < 1e-12);
    }

    #[test]
    fn enumeration_is_a_group() {
        for q in [5u64, 8, 12, 13, 21] {
            let all = DirichletCharacter::all(q).unwrap();
            let phi = (1..q).filter(|&n| gcd(n, q) == 1).count();
            assert_eq!(all.len(), phi);
            for c in &all {
                for m in 1..q as i64 {
                    for n in 1..q as i64 {
                        let lhs = c.value(m * n);
                        let rhs = c.value(m) * c.value(n);
                        assert!((lhs - rhs).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn primitive_even_counts() {
        // Known counts of primitive even characters.
        assert_eq!(DirichletCharacter::primitive_even(5).unwrap().len(), 1);
        assert_eq!(DirichletCharacter::primitive_even(8).unwrap().len(), 1);
        assert_eq!(DirichletCharacter::primitive_even(12).unwrap().len(), 1);
        assert_eq!(DirichletCharacter::primitive_even(13).unwrap().len(), 5);
        assert_eq!(DirichletCharacter::primitive_even(4).unwrap().len(), 0);
        for c in DirichletCharacter::primitive_even(13).unwrap() {
            assert!((c.root_number.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_odd_or_imprimitive() {
        assert!(DirichletCharacter::new(5, 0).is_err());
        let all = DirichletCharacter::all(5).unwrap();
        let odd = all.iter().find(|c| !c.even).unwrap();
        assert!(DirichletCharacter::new(5, odd.index).is_err());
        assert!(dirichlet_l(cpx(2.0, 0.0), odd).is_err());
    }

    #[test]
    fn functional_equation_complex_character() {
        for chi in DirichletCharacter::primitive_even(13).unwrap() {
            for &(re, im) in &[(0.5, 7.0), (0.2, -15.0), (0.8, 31.0)] {
                let s = cpx(re, im);
                let r = dirichlet_functional_equation_residual(s, &chi).unwrap();
                let scale = 1.0 + dirichlet_l(s, &chi).unwrap().norm();
                assert!(r < 1e-10 * scale, "index {} s={s}: {r}", chi.index);
            }
        }
    }

    #[test]
    fn first_zero_mod5_is_a_sign_change() {
        let chi = DirichletCharacter::legendre(5).unwrap();
        let a = dirichlet_hardy_z(6.6, &chi).unwrap();
        let b = dirichlet_hardy_z(6.7, &chi).unwrap();
        assert!(a * b < 0.0, "{a} {b}");
    }
}
