//! Command-line front end: argument parsing, suite orchestration and report
//! output.

pub mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use report::{Check, Report};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use zetakit::copoisson::{
    completed_mellin_fe_residual, copoisson_member, default_intertwining_grid,
    default_line_samples, intertwining_residual, intertwining_residual_pair, kahane_sonine,
    load_l_zeros, parse_l_zeros, sonine_check, special_value_check, twisted_intertwining_residual,
    twisted_mellin, LZero, QUADRATIC_MOD5_ZEROS,
};
use zetakit::explicit::{
    convergence_csv, explicit_formula_report, von_mangoldt_convergence, von_mangoldt_sides,
    weil_convergence,
};
use zetakit::nymanbeurling::{
    bound_csv, bound_report, octave_thetas, solve_thetas, DEFAULT_CUTOFF,
};
use zetakit::specfun::dirichlet::dirichlet_functional_equation_residual;
use zetakit::specfun::{dirichlet_l, DirichletCharacter};
use zetakit::testfn::{bump_on, corpus_entry, enforce_moments};
use zetakit::zeros::{cache_path_from_env, find_zeros, load_or_compute, write_atomic, ZeroList};
use zetakit::{cpx, Error};

#[derive(Debug, Parser)]
#[command(
    name = "zetakit",
    version,
    about = "Numerical checks around the Riemann zeta function"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Report path; written atomically. Standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Override a tolerance, `key=value`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    #[serde(skip)]
    pub tol: Vec<String>,
    /// Seed for the jittered grid of the sensitivity check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the effective configuration as JSON to this path.
    #[arg(long)]
    #[serde(skip)]
    pub write_config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical-line zeros of ζ.
    Zeros {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Co-Poisson intertwining, special value and Sonine membership.
    Copoisson {
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Sonine membership and the completed Mellin functional equation.
    Sonine {
        /// Co-Poisson generator support `[λ, 1/λ]`; ignored with `--kahane`.
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// Use Kahane's construction with this `N`.
        #[arg(long)]
        kahane: Option<u32>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Weil's explicit formula on corpus test functions.
    Explicit {
        /// Corpus entry; repeatable. Defaults to five bumps.
        #[arg(long = "function")]
        functions: Vec<String>,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Von Mangoldt's formula for ψ(X).
    Vonmangoldt {
        #[arg(long, default_value_t = 10.5)]
        x: f64,
        #[arg(long, default_value_t = 2000)]
        count: usize,
        /// Allow a prime-power X, with the boundary term halved.
        #[arg(long)]
        boundary: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Nyman-Beurling distances against the zero sum.
    Nb {
        /// Repeatable.
        #[arg(long = "lambda", default_values_t = vec![0.2, 0.1, 0.05])]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 8)]
        per_octave: usize,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: f64,
        #[arg(long, default_value_t = 2000)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Dirichlet L-functions: functional equation and twisted co-Poisson checks.
    Lfun {
        #[arg(long, default_value_t = 5)]
        modulus: u64,
        /// Character index; defaults to the Legendre symbol for prime moduli.
        #[arg(long)]
        index: Option<usize>,
        /// File of `q,character_index,gamma` lines; built-in zeros mod 5 otherwise.
        #[arg(long)]
        zeros_file: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the report schema.
    Schema,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) | Error::Parse(m) => Failure::Config(m),
            Error::Io(m) => Failure::Config(m),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn tolerances(command: &str, overrides: &[String]) -> Run<BTreeMap<String, f64>> {
    let defaults: &[(&str, f64)] = match command {
        "copoisson" => &[
            ("intertwining", 1e-6),
            ("sensitivity", 1e-3),
            ("special_value", 1e-7),
            ("sonine", 1e-8),
        ],
        "sonine" => &[("sonine", 1e-8), ("fe", 1e-5)],
        "explicit" => &[("residual", 1e-6)],
        "vonmangoldt" => &[("residual", 0.02)],
        "nb" => &[("psd", 1e-8), ("symmetry", 1e-10)],
        "lfun" => &[
            ("fe", 1e-10),
            ("twisted", 1e-6),
            ("vanishing", 1e-7),
            ("perpendicularity", 1e-5),
        ],
        _ => &[],
    };
    let mut map: BTreeMap<String, f64> =
        defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("tolerance `{o}` is not KEY=VALUE")))?;
        if !map.contains_key(k) {
            let known: Vec<&str> = map.keys().map(String::as_str).collect();
            return Err(Failure::Config(format!(
                "unknown tolerance `{k}` for {command} (known: {})",
                known.join(", ")
            )));
        }
        let v: f64 = v
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite() && *x >= 0.0)
            .ok_or_else(|| {
                Failure::Config(format!("tolerance `{o}` needs a non-negative number"))
            })?;
        map.insert(k.to_string(), v);
    }
    Ok(map)
}

fn zeros(count: usize) -> Run<ZeroList> {
    if count == 0 {
        return Err(Failure::Config("zero count must be positive".into()));
    }
    Ok(match cache_path_from_env() {
        Some(p) => load_or_compute(count, &p)?,
        None => find_zeros(count)?,
    })
}

/// Output of a suite before it is written.
struct Outcome {
    checks: Vec<Check>,
    data: Value,
    csv: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report data serialises")
}

/// Runs the parsed command line and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            3
        }
    }
}

fn execute(cli: Cli) -> Run<bool> {
    let (name, common, params) = match &cli.command {
        Command::Schema => {
            print!("{}", report::schema_text());
            return Ok(true);
        }
        Command::Zeros { count, common } => ("zeros", common, json!({ "count": count })),
        Command::Copoisson { lambda, common } => ("copoisson", common, json!({ "lambda": lambda })),
        Command::Sonine {
            lambda,
            kahane,
            eps,
            common,
        } => (
            "sonine",
            common,
            json!({ "lambda": lambda, "kahane": kahane, "eps": eps }),
        ),
        Command::Explicit {
            functions,
            count,
            common,
        } => (
            "explicit",
            common,
            json!({ "functions": functions, "count": count }),
        ),
        Command::Vonmangoldt {
            x,
            count,
            boundary,
            common,
        } => (
            "vonmangoldt",
            common,
            json!({ "x": x, "count": count, "boundary": boundary }),
        ),
        Command::Nb {
            lambdas,
            per_octave,
            cutoff,
            count,
            common,
        } => (
            "nb",
            common,
            json!({ "lambdas": lambdas, "per_octave": per_octave, "cutoff": cutoff, "count": count }),
        ),
        Command::Lfun {
            modulus,
            index,
            zeros_file,
            common,
        } => (
            "lfun",
            common,
            json!({ "modulus": modulus, "index": index, "zeros_file": zeros_file }),
        ),
    };
    let tol = tolerances(name, &common.tol)?;
    if common.format == Format::Csv && !matches!(name, "zeros" | "explicit" | "vonmangoldt" | "nb")
    {
        return Err(Failure::Config(format!("{name} has no CSV output")));
    }
    let config = json!({
        "command": name,
        "params": params,
        "tolerances": tol,
        "output": common.output,
        "format": common.format,
        "seed": common.seed,
    });
    if let Some(p) = &common.write_config {
        let text = serde_json::to_string_pretty(&config).expect("config serialises") + "\n";
        write_atomic(p, text.as_bytes())?;
    }
    let outcome = match cli.command {
        Command::Schema => unreachable!(),
        Command::Zeros { count, .. } => run_zeros(count)?,
        Command::Copoisson { lambda, .. } => run_copoisson(lambda, common.seed, &tol)?,
        Command::Sonine {
            lambda,
            kahane,
            eps,
            ..
        } => run_sonine(lambda, kahane, eps, &tol)?,
        Command::Explicit {
            ref functions,
            count,
            ..
        } => run_explicit(functions, count, &tol)?,
        Command::Vonmangoldt {
            x, count, boundary, ..
        } => run_vonmangoldt(x, count, boundary, &tol)?,
        Command::Nb {
            ref lambdas,
            per_octave,
            cutoff,
            count,
            ..
        } => run_nb(lambdas, per_octave, cutoff, count, &tol)?,
        Command::Lfun {
            modulus,
            index,
            ref zeros_file,
            ..
        } => run_lfun(modulus, index, zeros_file.as_deref(), &tol)?,
    };
    let report = Report::new(name, config, outcome.checks, outcome.data);
    let text = match common.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serialises") + "\n",
        Format::Csv => outcome.csv.expect("CSV commands produce CSV"),
    };
    match &common.output {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "FAIL {}: {:e} (tolerance {:e}, {})",
            c.name, c.value, c.tolerance, c.kind
        );
    }
    Ok(report.pass)
}

fn run_zeros(count: usize) -> Run<Outcome> {
    let z = zeros(count)?;
    let mut csv = String::from("index,gamma\n");
    for (i, g) in z.ordinates().iter().enumerate() {
        csv.push_str(&format!("{},{:.12}\n", i + 1, g));
    }
    Ok(Outcome {
        checks: Vec::new(),
        data: json!({ "count": z.count(), "ordinates": z.ordinates() }),
        csv: Some(csv),
    })
}

/// The default grid with every point moved by up to ±0.01.
fn jittered_grid(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    default_intertwining_grid()
        .into_iter()
        .map(|u| u + 0.01 * (2.0 * rng.gen::<f64>() - 1.0))
        .collect()
}

fn run_copoisson(lambda: f64, seed: u64, tol: &BTreeMap<String, f64>) -> Run<Outcome> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Failure::Config(format!(
            "co-Poisson Sonine functions need 0 < λ < 1, got {lambda}"
        )));
    }
    let raw = bump_on(lambda, 1.0 / lambda, 1.0)?;
    let g = enforce_moments(&raw)?;
    let inter = intertwining_residual(&g, &default_intertwining_grid())?;
    let corrupted = g.plus(0.01, &raw);
    let sens = intertwining_residual_pair(&corrupted, &g, &jittered_grid(seed))?;
    let mass = zetakit::testfn::moments(&raw).0;
    let unit = raw.scaled(1.0 / mass);
    let (lhs, rhs) = special_value_check(&unit)?;
    let member = copoisson_member(&g, lambda)?;
    let son = sonine_check(&member, lambda, tol["sonine"]);
    let vanish = son.sup_f_near_zero.max(son.sup_ff_near_zero) / son.l2_norm;
    let checks = vec![
        Check::at_most("intertwining", inter.residual, tol["intertwining"]),
        Check::at_least("sensitivity", sens.residual, tol["sensitivity"]),
        Check::at_most("special_value", (lhs - rhs).abs(), tol["special_value"]),
        Check::at_most("sonine", vanish, tol["sonine"]),
    ];
    Ok(Outcome {
        checks,
        data: json!({
            "lambda": lambda,
            "generator": format!("moment-free bump on [{lambda}, {}]", 1.0 / lambda),
            "intertwining": to_value(&inter),
            "sensitivity": to_value(&sens),
            "special_value": { "lhs": lhs, "rhs": rhs },
            "sonine": to_value(&son),
        }),
        csv: None,
    })
}

fn run_sonine(
    lambda: f64,
    kahane: Option<u32>,
    eps: f64,
    tol: &BTreeMap<String, f64>,
) -> Run<Outcome> {
    let samples = default_line_samples();
    let (source, lam, son, fe) = match kahane {
        Some(n) => {
            let (k, lam) = kahane_sonine(n, eps)?;
            let son = sonine_check(&k, lam, tol["sonine"]);
            let fe = completed_mellin_fe_residual(&k, &samples)?;
            (format!("kahane N={n} eps={eps}"), lam, son, fe)
        }
        None => {
            if !(lambda > 0.0 && lambda < 1.0) {
                return Err(Failure::Config(format!(
                    "co-Poisson Sonine functions need 0 < λ < 1, got {lambda}"
                )));
            }
            let g = enforce_moments(&bump_on(lambda, 1.0 / lambda, 1.0)?)?;
            let m = copoisson_member(&g, lambda)?;
            let son = sonine_check(&m, lambda, tol["sonine"]);
            let fe = completed_mellin_fe_residual(&m, &samples)?;
            (
                format!(
                    "co-Poisson, moment-free bump on [{lambda}, {}]",
                    1.0 / lambda
                ),
                lambda,
                son,
                fe,
            )
        }
    };
    let vanish = son.sup_f_near_zero.max(son.sup_ff_near_zero) / son.l2_norm;
    Ok(Outcome {
        checks: vec![
            Check::at_most("sonine", vanish, tol["sonine"]),
            Check::at_most("fe", fe, tol["fe"]),
        ],
        data: json!({ "source": source, "lambda": lam, "sonine": to_value(&son), "fe_residual": fe }),
        csv: None,
    })
}

const DEFAULT_EXPLICIT: [&str; 5] = [
    "bump_half_two",
    "bump_one_forty",
    "bump_log3",
    "bump_below_one",
    "bump_wide",
];

fn run_explicit(functions: &[String], count: usize, tol: &BTreeMap<String, f64>) -> Run<Outcome> {
    let names: Vec<String> = if functions.is_empty() {
        DEFAULT_EXPLICIT.iter().map(|s| s.to_string()).collect()
    } else {
        functions.to_vec()
    };
    let gens = names
        .iter()
        .map(|n| corpus_entry(n).map(|g| (n.clone(), g)))
        .collect::<Result<Vec<_>, _>>()?;
    let z = zeros(count)?;
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for (n, g) in &gens {
        let r = explicit_formula_report(g, &z)?;
        checks.push(Check::at_most(
            &format!("residual[{n}]"),
            r.residual,
            tol["residual"],
        ));
        reports.push(json!({ "function": n, "report": to_value(&r) }));
    }
    let counts: Vec<usize> = [10, 20, 50, 100, 200, 500, 1000, 2000]
        .into_iter()
        .filter(|c| *c < count)
        .chain(std::iter::once(count))
        .collect();
    let table = weil_convergence(&gens[0].1, &z, &counts)?;
    Ok(Outcome {
        checks,
        data: json!({ "reports": reports, "convergence": { "function": gens[0].0, "rows": to_value(&table) } }),
        csv: Some(convergence_csv(&table)),
    })
}

fn run_vonmangoldt(
    x: f64,
    count: usize,
    boundary: bool,
    tol: &BTreeMap<String, f64>,
) -> Run<Outcome> {
    let z = zeros(count)?;
    let (lhs, rhs) = von_mangoldt_sides(x, &z, boundary)?;
    let mut counts: Vec<usize> = Vec::new();
    let mut c = 100;
    while c < count {
        counts.push(c);
        c *= 2;
    }
    counts.push(count);
    let table = von_mangoldt_convergence(x, &z, &counts)?;
    Ok(Outcome {
        checks: vec![Check::at_most(
            "residual",
            (lhs - rhs).abs(),
            tol["residual"],
        )],
        data: json!({ "x": x, "lhs": lhs, "rhs": rhs, "table": to_value(&table) }),
        csv: Some(convergence_csv(&table)),
    })
}

fn run_nb(
    lambdas: &[f64],
    per_octave: usize,
    cutoff: f64,
    count: usize,
    tol: &BTreeMap<String, f64>,
) -> Run<Outcome> {
    let z = zeros(count)?;
    let mut systems = Vec::new();
    let mut checks = Vec::new();
    for &l in lambdas {
        let s = solve_thetas(&octave_thetas(l, per_octave)?, cutoff)?;
        let neg = (-s.min_eigenvalue / s.max_eigenvalue).max(0.0);
        checks.push(Check::at_most(&format!("psd[{l}]"), neg, tol["psd"]));
        checks.push(Check::at_most(
            &format!("symmetry[{l}]"),
            s.asymmetry(),
            tol["symmetry"],
        ));
        systems.push((l, s));
    }
    let rows = bound_report(&systems, &z)?;
    Ok(Outcome {
        checks,
        data: json!({ "rows": to_value(&rows) }),
        csv: Some(bound_csv(&rows)),
    })
}

fn run_lfun(
    modulus: u64,
    index: Option<usize>,
    zeros_file: Option<&Path>,
    tol: &BTreeMap<String, f64>,
) -> Run<Outcome> {
    let chi = match index {
        Some(i) => DirichletCharacter::new(modulus, i)?,
        None => DirichletCharacter::legendre(modulus)?,
    };
    let points: Vec<_> = (0..50)
        .map(|k| cpx(-1.5 + 0.07 * k as f64, -30.0 + 1.3 * k as f64))
        .collect();
    let mut fe = 0.0f64;
    let mut scale = 0.0f64;
    for s in &points {
        fe = fe.max(dirichlet_functional_equation_residual(*s, &chi)?);
        scale = scale.max(dirichlet_l(*s, &chi)?.norm());
    }
    let values: Vec<Value> = [cpx(2.0, 0.0), cpx(0.5, 0.0), cpx(0.5, 10.0)]
        .iter()
        .map(|s| dirichlet_l(*s, &chi).map(|v| json!({ "s": [s.re, s.im], "value": [v.re, v.im] })))
        .collect::<Result<_, _>>()?;
    let mut checks = vec![Check::at_most("fe", fe / (1.0 + scale), tol["fe"])];
    let mut data = json!({
        "modulus": modulus,
        "index": chi.index,
        "root_number": [chi.root_number.re, chi.root_number.im],
        "values": values,
        "fe_residual": fe,
    });
    if chi.even && chi.primitive && modulus > 1 {
        let g = bump_on(0.5, 2.0, 1.0)?;
        let tw = twisted_intertwining_residual(&g, &chi, &default_intertwining_grid())?;
        checks.push(Check::at_most("twisted", tw.residual, tol["twisted"]));
        checks.push(Check::at_most(
            "vanishing",
            tw.vanishing_sup,
            tol["vanishing"],
        ));
        data["twisted"] = to_value(&tw);
        let zeros: Vec<LZero> = match zeros_file {
            Some(p) => load_l_zeros(p)?,
            None => parse_l_zeros(QUADRATIC_MOD5_ZEROS)?,
        };
        let conj = chi.conj();
        let mine: Vec<&LZero> = zeros
            .iter()
            .filter(|z| z.modulus == modulus && z.character_index == conj.index)
            .collect();
        if !mine.is_empty() {
            let mut pts: Vec<_> = mine.iter().map(|z| cpx(0.5, z.gamma)).collect();
            pts.extend((0..=60).map(|k| cpx(0.5, 0.5 * k as f64)));
            let v = twisted_mellin(&g, &chi, &pts)?;
            let line = v[mine.len()..].iter().map(|z| z.norm()).fold(0.0, f64::max);
            let worst = v[..mine.len()].iter().map(|z| z.norm()).fold(0.0, f64::max) / line;
            checks.push(Check::at_most(
                "perpendicularity",
                worst,
                tol["perpendicularity"],
            ));
            data["perpendicularity"] = json!({
                "zeros": mine.iter().map(|z| z.gamma).collect::<Vec<_>>(),
                "relative": worst,
            });
        }
    }
    Ok(Outcome {
        checks,
        data,
        csv: None,
    })
}
