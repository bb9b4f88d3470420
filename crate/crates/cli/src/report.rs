//! Deterministic JSON reports: sorted keys (serde_json's default map is a
//! BTreeMap) and reals rounded to 9 significant digits before serialization,
//! so identical inputs produce byte-identical files.

use std::path::Path;

use recourse_core::{CapacityVector, Error, Matching, Result, WeightMatrix, WelfareReport};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Round to 9 significant digits; negative zero normalizes to zero.
pub fn sig9(value: f64) -> f64 {
    if value == 0.0 {
        return 0.0;
    }
    format!("{value:.8e}").parse().expect("formatted float")
}

/// Shortest decimal form of the 9-significant-digit rounding.
pub fn fmt9(value: f64) -> String {
    format!("{}", sig9(value))
}

pub fn real(value: f64) -> Value {
    json!(sig9(value))
}

fn optional_real(value: Option<f64>) -> Value {
    value.map_or(Value::Null, real)
}

fn capacities(caps: Option<&CapacityVector>) -> Value {
    caps.map_or(Value::Null, |c| json!(c.as_slice()))
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(hex(&Sha256::digest(&bytes)))
}

pub fn sha256_of_parts(parts: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    hex(&hasher.finalize())
}

fn hex(digest: &[u8]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// The embedded input configuration. Every report carries every key;
/// inapplicable ones are null.
pub struct ConfigEcho<'a> {
    pub command: &'a str,
    pub matrix_file: Option<String>,
    pub kind: Option<&'a str>,
    pub transform: Option<&'a str>,
    pub fixture_hash: String,
    pub gamma: Option<f64>,
    pub betas: Option<Vec<f64>>,
    pub initial_capacities: Option<Vec<u32>>,
    pub k_total: Option<u32>,
    pub k_max: Option<u32>,
    pub norm: Option<&'a str>,
    pub seekers_file: Option<String>,
    pub providers_file: Option<String>,
    pub bounds_file: Option<String>,
}

impl ConfigEcho<'_> {
    fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "matrix_file": self.matrix_file,
            "kind": self.kind,
            "transform": self.transform,
            "fixture_hash": self.fixture_hash,
            "gamma": optional_real(self.gamma),
            "betas": self.betas.as_ref().map_or(Value::Null, |b| {
                Value::Array(b.iter().map(|&x| real(x)).collect())
            }),
            "initial_capacities": self.initial_capacities,
            "k_total": self.k_total,
            "k_max": self.k_max,
            "norm": self.norm,
            "seekers_file": self.seekers_file,
            "providers_file": self.providers_file,
            "bounds_file": self.bounds_file,
        })
    }
}

/// Assemble the report for a solver run. `costs` runs pass `None` for the
/// welfare side and get nulls.
pub struct ReportParts<'a> {
    pub config: ConfigEcho<'a>,
    pub capacities_in: Option<&'a CapacityVector>,
    pub capacities_out: Option<&'a CapacityVector>,
    pub outcome: Option<(&'a WeightMatrix, &'a Matching, &'a WelfareReport)>,
}

pub fn build_report(parts: &ReportParts<'_>) -> Value {
    let mut root = Map::new();
    root.insert("config".into(), parts.config.to_value());
    root.insert("capacities_in".into(), capacities(parts.capacities_in));
    root.insert("capacities_out".into(), capacities(parts.capacities_out));

    let delta = match (parts.capacities_in, parts.capacities_out) {
        (Some(before), Some(after)) => json!(after
            .as_slice()
            .iter()
            .zip(before.as_slice())
            .map(|(&a, &b)| i64::from(a) - i64::from(b))
            .collect::<Vec<i64>>()),
        _ => Value::Null,
    };
    root.insert("capacity_delta".into(), delta);

    match parts.outcome {
        Some((weights, matching, welfare)) => {
            let assignments: Vec<Value> = matching
                .iter()
                .filter_map(|(i, assigned)| {
                    assigned.map(|j| {
                        json!({
                            "seeker": weights.seeker_ids()[i],
                            "provider": weights.provider_ids()[j],
                            "weight": real(weights.at(i, j)),
                        })
                    })
                })
                .collect();
            root.insert("assignments".into(), Value::Array(assignments));
            root.insert(
                "individual_welfare".into(),
                real(welfare.individual_welfare),
            );
            root.insert("social_welfare".into(), real(welfare.social_welfare));
            root.insert("welfare_gap".into(), real(welfare.welfare_gap));
            root.insert("penalty".into(), real(welfare.penalty));
            root.insert("objective".into(), real(welfare.objective));
            root.insert(
                "pct_of_individual".into(),
                real(100.0 * welfare.social_welfare / welfare.individual_welfare),
            );
        }
        None => {
            for key in [
                "assignments",
                "individual_welfare",
                "social_welfare",
                "welfare_gap",
                "penalty",
                "objective",
                "pct_of_individual",
            ] {
                root.insert(key.into(), Value::Null);
            }
        }
    }
    Value::Object(root)
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Validation(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))
}
