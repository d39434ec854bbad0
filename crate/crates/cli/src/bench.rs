//! The `bench` command: runs algorithms over a list of models and prints a
//! tab-separated table.
//!
//! A spec is a TOML file with one `[[model]]` table per row:
//!
//! ```toml
//! [[model]]
//! name = "vasy_0_1"
//! path = "data/vlts/vasy_0_1.aut"   # relative to the spec file
//! optional = true                    # skip instead of failing if absent
//!
//! [[model]]
//! name = "layered-1000"
//! layered = { states = 1000, groups = 8, out_degree = 12.5, seed = 1 }
//!
//! [[model]]
//! name = "random-50"
//! random = { states = 50, labels = 2, density = 0.1, total = true, seed = 3 }
//! ```

use std::io::Write;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::Deserialize;
use simshell_core::algorithms::{compute, Algorithm, RunOptions, SimResult};
use simshell_core::generate::{generate, generate_layered, GenSpec, LayeredSpec};
use simshell_core::{initial_partition, KripkeStructure};

use crate::run::{load_structure, InputFormat};
use crate::{algorithm_guard, CliError};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(rename = "model", default)]
    pub models: Vec<ModelSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub path: Option<PathBuf>,
    /// Defaults to the file extension.
    pub format: Option<String>,
    #[serde(default)]
    pub optional: bool,
    pub layered: Option<LayeredParams>,
    pub random: Option<RandomParams>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredParams {
    pub states: usize,
    pub groups: usize,
    pub out_degree: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomParams {
    pub states: usize,
    pub labels: usize,
    pub density: f64,
    #[serde(default)]
    pub total: bool,
    #[serde(default)]
    pub seed: u64,
}

impl BenchSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        toml::from_str(&text).map_err(|e| CliError::BenchSpec { path: path.to_owned(), message: e.to_string() })
    }
}

/// Loads or generates a model; `Ok(None)` for an absent optional file.
fn materialise(model: &ModelSpec, base: &Path) -> Result<Option<KripkeStructure>, CliError> {
    let bad = |message: String| CliError::BenchSpec { path: base.to_owned(), message };
    match (&model.path, &model.layered, &model.random) {
        (Some(p), None, None) => {
            let path = base.join(p);
            if !path.exists() && model.optional {
                warn!("{}: {} not found, skipped", model.name, path.display());
                return Ok(None);
            }
            let format = match model.format.as_deref() {
                Some(f) => f.parse::<InputFormat>().map_err(bad)?,
                None if path.extension().is_some_and(|e| e == "aut") => InputFormat::Aut,
                None => InputFormat::Kripke,
            };
            load_structure(&path, format, format == InputFormat::Aut).map(Some)
        }
        (None, Some(l), None) => Ok(Some(generate_layered(&LayeredSpec {
            num_states: l.states,
            groups: l.groups,
            out_degree: l.out_degree,
            seed: l.seed,
        })?)),
        (None, None, Some(r)) => Ok(Some(generate(&GenSpec {
            num_states: r.states,
            num_labels: r.labels,
            edge_density: r.density,
            total: r.total,
            seed: r.seed,
        })?)),
        _ => Err(bad(format!("model `{}` needs exactly one of path, layered, random", model.name))),
    }
}

/// Peak resident set size of this process in KiB, where the platform
/// reports it. Cumulative over the whole run.
fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Runs every algorithm on every model sequentially and writes one TSV row
/// per model. All algorithms must agree on the number of simulation
/// classes; the counter columns come from the first partition-based
/// algorithm in `algos`.
pub fn run_bench(spec_path: &Path, algos: &[Algorithm], out: &mut dyn Write) -> Result<(), CliError> {
    let spec = BenchSpec::load(spec_path)?;
    let base = spec_path.parent().unwrap_or(Path::new("."));
    if algos.is_empty() {
        return Err(CliError::Usage("no algorithms selected".into()));
    }
    write!(out, "model\tstates\ttransitions\tp_in\tp_sim")?;
    for a in algos {
        write!(out, "\ttime_{}_s", a.name().replace('-', "_"))?;
    }
    writeln!(out, "\tblocks_created\tremove_volume\tpeak_rss_kib")?;

    for model in &spec.models {
        let Some(ks) = materialise(model, base)? else { continue };
        let n = ks.num_states();
        let mut results: Vec<SimResult> = Vec::new();
        for &alg in algos {
            algorithm_guard(alg, n)?;
            let res = compute(&ks, alg, &RunOptions::default())?;
            info!("{} / {}: {:?}", model.name, alg, res.stats.wall_time);
            results.push(res);
        }
        let p_sim = results[0].num_blocks();
        if let Some((alg, r)) = algos.iter().zip(&results).find(|(_, r)| r.num_blocks() != p_sim) {
            return Err(CliError::Mismatch(format!(
                "{}: {} found {} classes, {} found {p_sim}",
                model.name,
                alg,
                r.num_blocks(),
                algos[0]
            )));
        }
        write!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            model.name,
            n,
            ks.num_transitions(),
            initial_partition(&ks).num_blocks(),
            p_sim
        )?;
        for r in &results {
            write!(out, "\t{:.6}", r.stats.wall_time.as_secs_f64())?;
        }
        let counters = algos
            .iter()
            .zip(&results)
            .find(|(a, _)| matches!(a, Algorithm::Sa | Algorithm::Basic | Algorithm::Refined))
            .map(|(_, r)| (r.stats.blocks_created.to_string(), r.stats.remove_volume.to_string()));
        let (blocks, volume) = counters.unwrap_or_else(|| ("-".into(), "-".into()));
        let rss = peak_rss_kib().map_or_else(|| "-".to_string(), |v| v.to_string());
        writeln!(out, "\t{blocks}\t{volume}\t{rss}")?;
    }
    Ok(())
}
