use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{RunConfig, Scenario};
use crate::error::CliError;
use crate::output::{json_file, sha256_hex, write_all, OutputFile};
use crate::scenario::{execute, Outcome};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Wall-clock information; not part of the reproducible content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallClock {
    pub started_unix_s: f64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub scenario: Scenario,
    /// Resolved configuration, sufficient to repeat the run.
    pub config: Value,
    /// SHA-256 of the canonical JSON of `config`.
    pub input_sha256: String,
    pub conventions: BTreeMap<String, String>,
    pub integrator: BTreeMap<String, Value>,
    pub diagnostics: Value,
    pub outputs: Vec<OutputRecord>,
    pub threads: usize,
    pub wall_clock: WallClock,
}

pub fn conventions() -> BTreeMap<String, String> {
    [
        ("mu5_eff", "mu5_eff = (alpha / 4 pi^2) * mu5 is the coefficient of the k-linear term"),
        ("helicity", "the + helicity is destabilized when mu5_eff > 0"),
        ("epsilon", "eps^{12} = +1, eps^{012} = +1"),
        ("current_normalization", "j^mu = (sigma_H / 2) eps^{mu nu lambda} F_{nu lambda}, so j^k = sigma_H eps^{kl} E_l and j^0 = sigma_H B"),
        ("wavenumber", "k is held constant in time; the mode equation is integrated as written, without deciding whether k is comoving or physical"),
        ("volume_normalization", "densities per unit comoving volume; each mode carries weight 4 pi k^2 dk of its bin"),
        ("helicity_functional", "H = sum weight (|b+|^2 - |b-|^2) / k with A = +-b/k"),
        ("units", "natural units c = hbar = 1; alpha defaults to 2 pi e^2/h"),
        ("fractions", "Hall fractions in units of e^2/h, printed as p/q"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

fn integrator(cfg: &RunConfig) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    match cfg.scenario() {
        Scenario::Evolve | Scenario::EvolveCoupled => {
            let e = cfg.evolve.as_ref().expect("validated");
            m.insert("method".into(), Value::from("Dormand-Prince 5(4), max-norm error control"));
            m.insert("rtol".into(), Value::from(e.tol));
            m.insert("atol".into(), Value::from(e.tol));
            m.insert("max_steps".into(), Value::from(e.max_steps));
        }
        Scenario::Cme => {
            m.insert("method".into(), Value::from("Dormand-Prince 5(4), max-norm error control"));
            m.insert("rtol".into(), Value::from(1e-13));
            m.insert("atol".into(), Value::from(1e-13));
        }
        _ => {}
    }
    m
}

/// Serializes the resolved configuration and its hash.
pub fn canonical_config(cfg: &RunConfig) -> (Value, String) {
    let value = serde_json::to_value(cfg).expect("configuration serializes");
    let bytes = serde_json::to_vec(&value).expect("JSON value serializes");
    (value, sha256_hex(&bytes))
}

/// Executes `cfg`, writes its outputs and manifest into `out`.
pub fn run_to_dir(cfg: &RunConfig, out: &Path, threads: usize) -> Result<(RunManifest, Outcome), CliError> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let outcome = execute(cfg, threads)?;
    let (config, input_sha256) = canonical_config(cfg);
    let outputs = outcome
        .files
        .iter()
        .map(|f| OutputRecord { file: f.name.clone(), sha256: f.sha256(), bytes: f.bytes.len() })
        .collect();
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: cfg.scenario(),
        config,
        input_sha256,
        conventions: conventions(),
        integrator: integrator(cfg),
        diagnostics: outcome.diagnostics.clone(),
        outputs,
        threads,
        wall_clock: WallClock { started_unix_s: started, elapsed_s: clock.elapsed().as_secs_f64() },
    };
    let mut files: Vec<OutputFile> = outcome.files.clone();
    files.push(json_file(MANIFEST_NAME, &serde_json::to_value(&manifest).expect("manifest serializes")));
    write_all(out, &files)?;
    Ok((manifest, outcome))
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(Some("manifest"), e.to_string()))
}

/// Re-runs the configuration recorded in a manifest into `out` and checks
/// every output hash against the record.
pub fn rerun(manifest: &RunManifest, out: &Path, threads: usize) -> Result<RunManifest, CliError> {
    let cfg = RunConfig::from_json(manifest.config.clone())?.resolve(Some(manifest.scenario), None)?;
    let (_, sha) = canonical_config(&cfg);
    if sha != manifest.input_sha256 {
        return Err(CliError::config(Some("manifest.config"), "configuration does not match its recorded hash"));
    }
    let (fresh, _) = run_to_dir(&cfg, out, threads)?;
    if fresh.outputs.len() != manifest.outputs.len() {
        return Err(CliError::numeric(None, "rerun produced a different set of outputs"));
    }
    for (a, b) in manifest.outputs.iter().zip(&fresh.outputs) {
        if a.file != b.file || a.sha256 != b.sha256 {
            return Err(CliError::numeric(Some(a.file.clone()), "rerun output differs from the recorded hash"));
        }
    }
    Ok(fresh)
}
