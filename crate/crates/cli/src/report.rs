//! Report envelope shared by every subcommand.

use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

pub const SCHEMA: &str = "zetakit-report v1";

/// One asserted tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// `"max"`: pass when `value ≤ tolerance`; `"min"`: pass when `value ≥ tolerance`.
    pub kind: &'static str,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            tolerance,
            kind: "max",
            pass: value <= tolerance,
        }
    }

    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            tolerance,
            kind: "min",
            pass: value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: Value,
    pub versions: BTreeMap<&'static str, &'static str>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub data: Value,
}

impl Report {
    pub fn new(command: &str, config: Value, checks: Vec<Check>, data: Value) -> Report {
        let mut versions = BTreeMap::new();
        versions.insert("zetakit", env!("CARGO_PKG_VERSION"));
        let pass = checks.iter().all(|c| c.pass);
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            config,
            versions,
            checks,
            pass,
            data,
        }
    }
}

/// Text printed by `zetakit schema`.
pub fn schema_text() -> String {
    format!(
        "{SCHEMA}

Every JSON report is one object with the fields
  schema    string   always \"{SCHEMA}\"
  command   string   subcommand that produced the report
  config    object   echo of the effective configuration, including tolerances
  versions  object   crate name -> version
  checks    array    asserted tolerances: {{name, value, tolerance, kind, pass}}
                     kind \"max\" passes when value <= tolerance, \"min\" when value >= tolerance
  pass      bool     true iff every check passes (exit code 0)
  data      object   command-specific results

Command data
  zeros        count, ordinates
  copoisson    lambda, generator, intertwining, sensitivity, special_value, sonine
  sonine       source, lambda, sonine, fe_residual
  explicit     reports (one per test function), convergence
  vonmangoldt  x, lhs, rhs, table
  nb           rows of lambda, n, D2, logscaled, zerosum, cond
  lfun         modulus, index, root_number, values, fe_residual, twisted, perpendicularity

CSV outputs
  zeros        index,gamma
  explicit     zeros_used,residual
  vonmangoldt  zeros_used,residual
  nb           lambda,n,D2,logscaled,zerosum,cond

Exit codes: 0 all checks pass, 1 a tolerance failed, 2 configuration error,
3 numerical failure such as an unmet tail bound.
"
    )
}

/// Validates the envelope of a parsed report.
pub fn validate(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report is not an object")?;
    for key in [
        "schema", "command", "config", "versions", "checks", "pass", "data",
    ] {
        if !obj.contains_key(key) {
            return Err(format!("missing field `{key}`"));
        }
    }
    if obj.len() != 7 {
        return Err("unexpected extra fields".into());
    }
    if obj["schema"] != SCHEMA {
        return Err("wrong schema version".into());
    }
    let checks = obj["checks"].as_array().ok_or("checks is not an array")?;
    let mut all = true;
    for c in checks {
        let c = c.as_object().ok_or("check is not an object")?;
        for key in ["name", "value", "tolerance", "kind", "pass"] {
            if !c.contains_key(key) {
                return Err(format!("check missing `{key}`"));
            }
        }
        all &= c["pass"].as_bool().ok_or("check pass is not a bool")?;
    }
    if obj["pass"].as_bool() != Some(all) {
        return Err("pass flag disagrees with checks".into());
    }
    Ok(())
}
