//! Flat key-value run configuration: `gamma`, `betas`, `initial_capacities`,
//! `k_total`, `k_max`, `norm`. One `key = value` per line, `#` comments.

use std::path::Path;

use recourse_core::{Error, Norm, Result};

/// Penalty sensitivities as written in the config: one shared value or one
/// per provider.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaSpec {
    Scalar(f64),
    PerProvider(Vec<f64>),
}

impl BetaSpec {
    pub fn expand(&self, n_providers: usize) -> Result<Vec<f64>> {
        match self {
            BetaSpec::Scalar(beta) => Ok(vec![*beta; n_providers]),
            BetaSpec::PerProvider(betas) => {
                if betas.len() != n_providers {
                    return Err(Error::Validation(format!(
                        "config lists {} betas but the matrix has {} providers",
                        betas.len(),
                        n_providers
                    )));
                }
                Ok(betas.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub gamma: Option<f64>,
    pub betas: Option<BetaSpec>,
    pub initial_capacities: Option<Vec<u32>>,
    pub k_total: Option<u32>,
    pub k_max: Option<u32>,
    pub norm: Option<Norm>,
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn parse_config(text: &str) -> std::result::Result<RunConfig, String> {
    let mut config = RunConfig::default();
    let mut seen: Vec<&str> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        if seen.contains(&key) {
            return Err(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
        match key {
            "gamma" => config.gamma = Some(parse_real(key, value, lineno)?),
            "betas" => {
                let values = parse_real_list(key, value, lineno)?;
                config.betas = Some(if value.contains(',') {
                    BetaSpec::PerProvider(values)
                } else {
                    BetaSpec::Scalar(values[0])
                });
            }
            "initial_capacities" => {
                config.initial_capacities = Some(parse_int_list(key, value, lineno)?);
            }
            "k_total" => config.k_total = Some(parse_int(key, value, lineno)?),
            "k_max" => config.k_max = Some(parse_int(key, value, lineno)?),
            "norm" => {
                config.norm = Some(match value {
                    "l1" => Norm::L1,
                    "linf" => Norm::Linf,
                    other => {
                        return Err(format!(
                            "line {}: norm must be `l1` or `linf`, got `{other}`",
                            lineno + 1
                        ))
                    }
                });
            }
            other => return Err(format!("line {}: unknown key `{other}`", lineno + 1)),
        }
        seen.push(key);
    }
    Ok(config)
}

fn parse_real(key: &str, value: &str, lineno: usize) -> std::result::Result<f64, String> {
    let parsed: f64 = value
        .parse()
        .map_err(|_| format!("line {}: `{key}` must be a number, got `{value}`", lineno + 1))?;
    if !parsed.is_finite() {
        return Err(format!("line {}: `{key}` must be finite", lineno + 1));
    }
    Ok(parsed)
}

fn parse_real_list(key: &str, value: &str, lineno: usize) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|part| parse_real(key, part.trim(), lineno))
        .collect()
}

fn parse_int(key: &str, value: &str, lineno: usize) -> std::result::Result<u32, String> {
    value.parse().map_err(|_| {
        format!(
            "line {}: `{key}` must be a nonnegative integer, got `{value}`",
            lineno + 1
        )
    })
}

fn parse_int_list(key: &str, value: &str, lineno: usize) -> std::result::Result<Vec<u32>, String> {
    value
        .split(',')
        .map(|part| parse_int(key, part.trim(), lineno))
        .collect()
}
