//! Argument parsing shared by the subcommands: codes, noise models,
//! recovery tables, grids and output destinations.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use logicalnoise::channels::ChannelSpec;
use logicalnoise::codes::{RecoveryTable, StabilizerCode};
use logicalnoise::logical::{NoiseModel, NoiseTerm};

/// Resolves `@path` arguments to file contents, everything else verbatim.
pub fn load_arg(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    } else {
        Ok(arg.to_string())
    }
}

/// `repetition:N` / `five_qubit` / `steane`, or `@file.json` for a custom code.
pub fn parse_code(arg: &str) -> Result<StabilizerCode> {
    if arg.starts_with('@') {
        let text = load_arg(arg)?;
        Ok(StabilizerCode::from_json(&text)?)
    } else {
        Ok(StabilizerCode::from_name(arg)?)
    }
}

/// Builds the n-qubit noise model from the `--noise` argument: `identity`,
/// a single-channel JSON spec applied to every qubit, or the `product` /
/// `correlated` wrappers with explicit per-qubit factors.
pub fn parse_noise(arg: &str, n: usize) -> Result<NoiseModel> {
    if arg == "identity" {
        return Ok(NoiseModel::iid(
            logicalnoise::channels::ProcessMatrix1Q::identity(),
            n,
        )?);
    }
    let text = load_arg(arg)?;
    let value: serde_json::Value = serde_json::from_str(&text).context("parsing noise JSON")?;
    match value.get("type").and_then(|t| t.as_str()) {
        Some("product") => {
            let factors = value
                .get("factors")
                .context("product noise needs a factors array")?;
            let specs: Vec<ChannelSpec> = serde_json::from_value(factors.clone())?;
            if specs.len() != n {
                bail!(
                    "product noise has {} factors, code has {n} qubits",
                    specs.len()
                );
            }
            let built = specs
                .iter()
                .map(|s| s.build())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(NoiseModel::product(built)?)
        }
        Some("correlated") => {
            #[derive(serde::Deserialize)]
            struct TermSpec {
                weight: f64,
                factors: Vec<ChannelSpec>,
            }
            let terms = value
                .get("terms")
                .context("correlated noise needs a terms array")?;
            let specs: Vec<TermSpec> = serde_json::from_value(terms.clone())?;
            let mut built = Vec::with_capacity(specs.len());
            for t in &specs {
                if t.factors.len() != n {
                    bail!(
                        "correlated term has {} factors, code has {n} qubits",
                        t.factors.len()
                    );
                }
                let factors = t
                    .factors
                    .iter()
                    .map(|s| s.build())
                    .collect::<Result<Vec<_>, _>>()?;
                built.push(NoiseTerm {
                    weight: t.weight,
                    factors,
                });
            }
            Ok(NoiseModel::correlated(built)?)
        }
        _ => {
            let spec: ChannelSpec = serde_json::from_value(value)?;
            Ok(NoiseModel::iid(spec.build()?, n)?)
        }
    }
}

/// Recovery selection: `none`, `minweight`, or `@table.json` mapping
/// syndrome strings to Pauli strings.
pub fn parse_recovery(arg: &str, code: &StabilizerCode) -> Result<Option<RecoveryTable>> {
    match arg {
        "none" => Ok(None),
        "minweight" => Ok(Some(RecoveryTable::min_weight(code)?)),
        other if other.starts_with('@') => {
            let text = load_arg(other)?;
            let map: std::collections::BTreeMap<String, String> =
                serde_json::from_str(&text).context("parsing recovery table JSON")?;
            let pairs: Vec<(String, String)> = map.into_iter().collect();
            Ok(Some(RecoveryTable::from_pairs(code, &pairs)?))
        }
        other => bail!("unknown recovery {other:?}: expected none, minweight or @table.json"),
    }
}

/// Grid syntax `start:stop:count[:log|lin]`; count must be positive.
pub fn parse_grid(arg: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = arg.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        bail!("grid {arg:?} must be start:stop:count[:log|lin]");
    }
    let start: f64 = parts[0].parse().context("grid start")?;
    let stop: f64 = parts[1].parse().context("grid stop")?;
    let count: usize = parts[2].parse().context("grid count")?;
    if count == 0 {
        bail!("grid has zero points");
    }
    let log = match parts.get(3) {
        None | Some(&"lin") => false,
        Some(&"log") => true,
        Some(other) => bail!("unknown grid scale {other:?}"),
    };
    if count == 1 {
        return Ok(vec![start]);
    }
    if log && (start <= 0.0 || stop <= 0.0) {
        bail!("log grid needs positive endpoints");
    }
    Ok((0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            if log {
                start * (stop / start).powf(t)
            } else {
                start + (stop - start) * t
            }
        })
        .collect())
}

/// Oracle qubit cap, overridable through LOGICALNOISE_MAX_N.
pub fn oracle_cap() -> usize {
    std::env::var("LOGICALNOISE_MAX_N")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(logicalnoise::oracle::DEFAULT_MAX_QUBITS)
}

/// Output sink: a file when `--out` is given, stdout otherwise.
pub fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    match out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            Ok(Box::new(std::io::BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

/// Effective distance reported in sweeps: the repetition code protects only
/// one error axis, where its distance is its length.
pub fn effective_distance(code: &StabilizerCode) -> usize {
    code.name()
        .strip_prefix("repetition:")
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| code.distance())
}
