//! Critical-line zeros of ζ located as sign changes of the Hardy Z function.

use crate::specfun::{gamma_ln, zeta};
use crate::{cpx, Complex64, Error, Result};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Header line of the zero cache file.
pub const CACHE_HEADER: &str = "# zetakit-zeros v1";
/// Environment variable overriding the zero cache location.
pub const CACHE_ENV: &str = "ZETAKIT_ZERO_CACHE";

const SCAN_STEP: f64 = 0.05;
const BRACKET_WIDTH: f64 = 1e-9;
const SCAN_START: f64 = 1.0;

/// Ordered positive ordinates of critical-line zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroList {
    ordinates: Vec<f64>,
    precision: f64,
}

/// How a zero sum weights repeated zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroWeighting {
    /// Each distinct zero once.
    Once,
    /// Weight `m_ρ²`. Every zero found here is simple, so `m_ρ = 1`.
    MultiplicitySquared,
}

impl ZeroList {
    /// Wraps ordinates, checking that they are positive and strictly increasing.
    pub fn new(ordinates: Vec<f64>, precision: f64) -> Result<Self> {
        if ordinates.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::Domain("zero ordinates must be positive".into()));
        }
        if ordinates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "zero ordinates must be strictly increasing".into(),
            ));
        }
        Ok(ZeroList {
            ordinates,
            precision,
        })
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn count(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Bracket half-width guaranteed by the refinement.
    pub fn precision(&self) -> f64 {
        self.precision
    }

    /// The first `n` ordinates (all of them if fewer are stored).
    pub fn prefix(&self, n: usize) -> ZeroList {
        ZeroList {
            ordinates: self.ordinates[..n.min(self.ordinates.len())].to_vec(),
            precision: self.precision,
        }
    }

    /// Cache file contents: header, then `index,gamma` with 12 decimals.
    pub fn to_cache_string(&self) -> String {
        let mut out = String::with_capacity(24 * self.ordinates.len() + 32);
        out.push_str(CACHE_HEADER);
        out.push('\n');
        for (i, g) in self.ordinates.iter().enumerate() {
            let _ = writeln!(out, "{},{:.12}", i + 1, g);
        }
        out
    }

    pub fn parse_cache(text: &str) -> Result<ZeroList> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CACHE_HEADER => {}
            _ => return Err(Error::Parse(format!("missing header `{CACHE_HEADER}`"))),
        }
        let mut ords = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (idx, val) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `index,gamma`", k + 2)))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad index", k + 2)))?;
            if idx != ords.len() + 1 {
                return Err(Error::Parse(format!(
                    "line {}: index {idx} out of sequence",
                    k + 2
                )));
            }
            let g: f64 = val
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad ordinate", k + 2)))?;
            ords.push(g);
        }
        ZeroList::new(ords, 5e-13_f64.max(BRACKET_WIDTH))
    }

    /// Writes the cache atomically (temporary file, then rename).
    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_cache_string().as_bytes())
    }

    pub fn load(path: &Path) -> Result<ZeroList> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_cache(&text)
    }
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::from(e)
    })
}

/// Cache path from the environment, if set.
pub fn cache_path_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

/// Loads at least `count` zeros from `path`, recomputing and rewriting the
/// file when it is missing, unreadable or too short.
pub fn load_or_compute(count: usize, path: &Path) -> Result<ZeroList> {
    if let Ok(z) = ZeroList::load(path) {
        if z.count() >= count {
            return Ok(z.prefix(count));
        }
    }
    let z = find_zeros(count)?;
    z.save(path)?;
    // Hand back exactly what a later reload will see.
    ZeroList::load(path).map(|z| z.prefix(count))
}

/// Riemann-Siegel theta `θ(t) = Im ln Γ(1/4 + it/2) − (t/2) log π`.
pub fn rs_theta(t: f64) -> f64 {
    let lg = gamma_ln(cpx(0.25, 0.5 * t)).expect("1/4 + it/2 is never a pole");
    lg.im - 0.5 * t * PI.ln()
}

/// Hardy function `Z(t) = e^{iθ(t)} ζ(1/2 + it)`.
///
/// Fails if the rotated value has an imaginary part above 1e-8.
pub fn hardy_z(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("hardy_z needs t >= 0, got {t}")));
    }
    let th = rs_theta(t);
    let z = Complex64::new(th.cos(), th.sin()) * zeta(cpx(0.5, t))?;
    if z.im.abs() > 1e-8 * (1.0 + z.re.abs()) {
        return Err(Error::Numerical(format!(
            "Hardy Z at t={t} has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Smooth zero-counting estimate `(T/2π) log(T/2πe) + 7/8`.
pub fn riemann_von_mangoldt(t: f64) -> f64 {
    let x = t / (2.0 * PI);
    x * (x / std::f64::consts::E).ln() + 0.875
}

/// `θ(T)/π + 1`, the zero count to height `T` up to `S(T)`.
pub fn theta_count(t: f64) -> f64 {
    rs_theta(t) / PI + 1.0
}

fn illinois(mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> Result<f64> {
    let mut side = 0i32;
    for _ in 0..200 {
        if (b - a).abs() <= BRACKET_WIDTH {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = hardy_z(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    if (b - a).abs() > BRACKET_WIDTH {
        return Err(Error::Numerical(format!(
            "zero bracket [{a}, {b}] did not shrink"
        )));
    }
    // Secant point inside the final bracket.
    let c = if fb != fa {
        (a * fb - b * fa) / (fb - fa)
    } else {
        0.5 * (a + b)
    };
    Ok(c.clamp(a.min(b), a.max(b)))
}

/// Sign-change brackets of `Z` on `[lo, hi]` with grid step `h`. Shallow
/// same-sign dips are re-scanned ten times finer so close pairs are not lost.
fn scan(lo: f64, hi: f64, h: f64) -> Result<Vec<(f64, f64, f64, f64)>> {
    let n = ((hi - lo) / h).ceil() as usize;
    let ts: Vec<f64> = (0..=n).map(|i| lo + h * i as f64).collect();
    let zs = crate::par::map(&ts, 64, |t| hardy_z(*t))?;
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (ts[i], ts[i + 1]);
        let (fa, fb) = (zs[i], zs[i + 1]);
        if fa == 0.0 {
            out.push((a - 0.5 * BRACKET_WIDTH, -1.0, a + 0.5 * BRACKET_WIDTH, 1.0));
            continue;
        }
        if fa.signum() != fb.signum() && fb != 0.0 {
            out.push((a, fa, b, fb));
            continue;
        }
        // Local minimum of |Z| between same-sign neighbours.
        if i >= 1 && fb != 0.0 {
            let fp = zs[i - 1];
            if fp.signum() == fa.signum()
                && fa.abs() < fp.abs()
                && fa.abs() < fb.abs()
                && fa.abs() < 0.5 * fp.abs().min(fb.abs()).max(1e-3)
            {
                let fine = scan_plain(ts[i - 1], b, h / 10.0)?;
                if fine.len() >= 2 {
                    // Replace the coarse classification of [t_{i-1}, t_{i+1}].
                    out.retain(|&(x, _, _, _)| x < ts[i - 1]);
                    out.extend(fine);
                }
            }
        }
    }
    Ok(out)
}

fn scan_plain(lo: f64, hi: f64, h: f64) -> Result<Vec<(f64, f64, f64, f64)>> {
    let n = ((hi - lo) / h).ceil() as usize;
    let mut out = Vec::new();
    let mut a = lo;
    let mut fa = hardy_z(a)?;
    for i in 1..=n {
        let b = (lo + h * i as f64).min(hi);
        let fb = hardy_z(b)?;
        if fa.signum() != fb.signum() && fa != 0.0 && fb != 0.0 {
            out.push((a, fa, b, fb));
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

/// The first `count` positive zero ordinates.
///
/// The scan height is chosen from `θ(T)/π + 1`. The number of sign changes
/// found up to `T` must agree with that estimate within 2, since `|S(T)| < 2`
/// at these heights. A disagreement triggers one finer rescan and is then
/// reported as an error.
pub fn find_zeros(count: usize) -> Result<ZeroList> {
    if count > 10_000 {
        return Err(Error::Domain(format!("count {count} exceeds 10^4")));
    }
    if count == 0 {
        return ZeroList::new(Vec::new(), BRACKET_WIDTH);
    }
    let mut top = 20.0;
    while theta_count(top) < count as f64 + 2.5 {
        top *= 1.1;
    }
    let mut step = SCAN_STEP;
    let brackets = loop {
        let b = scan(SCAN_START, top, step)?;
        let expected = theta_count(top);
        if (b.len() as f64 - expected).abs() <= 2.0 && b.len() >= count {
            break b;
        }
        if step < SCAN_STEP / 3.0 {
            return Err(Error::Numerical(format!(
                "found {} sign changes below {top:.3} where about {expected:.1} zeros are expected",
                b.len()
            )));
        }
        step /= 4.0;
    };
    let roots = crate::par::map(&brackets[..count], 64, |&(a, fa, b, fb)| {
        illinois(a, fa, b, fb)
    })?;
    ZeroList::new(roots, BRACKET_WIDTH)
}

/// `Σ_i 2/(1/4 + γ_i²)`, counting each conjugate pair.
pub fn zero_sum_inv_sq(zeros: &ZeroList, weighting: ZeroWeighting) -> f64 {
    let m2 = match weighting {
        ZeroWeighting::Once | ZeroWeighting::MultiplicitySquared => 1.0,
    };
    let mut acc = crate::quad::Neumaier::new();
    for g in zeros.ordinates() {
        acc.add(m2 * 2.0 / (0.25 + g * g));
    }
    acc.value()
}

/// Central difference estimate of `Z'(t)`.
pub fn hardy_z_derivative(t: f64) -> Result<f64> {
    let h = 1e-5;
    Ok((hardy_z(t + h)? - hardy_z(t - h)?) / (2.0 * h))
}

/// Number of ordinates strictly below `t`.
pub fn count_below(zeros: &ZeroList, t: f64) -> usize {
    zeros.ordinates().partition_point(|&g| g < t)
}
