//! The `run` command.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{debug, info};
use simshell_core::algorithms::{compute, expand_preorder, Algorithm, RunOptions};
use simshell_core::domains::{self, forward_shell, label_closure, preorder_from_closure};
use simshell_core::parse::{parse_aut, parse_kripke};
use simshell_core::reference::naive_oracle;
use simshell_core::{lts_to_kripke, KripkeStructure};

use crate::output::{write_result, write_verify, Section, Style};
use crate::{algorithm_guard, check_guard, CliError, ORACLE_GUARD, PAIR_GUARD};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// Aldebaran transition systems; need the Kripke transformation.
    Aut,
    Kripke,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aut" => Ok(InputFormat::Aut),
            "kripke" => Ok(InputFormat::Kripke),
            other => Err(format!("unknown input format `{other}` (expected aut or kripke)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub transform: bool,
    pub algorithm: Algorithm,
    pub buggy: bool,
    pub sections: Vec<Section>,
    pub style: Style,
    pub verify: bool,
    /// `None` leaves the library default (debug builds, small inputs).
    pub debug_invariants: Option<bool>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, format: InputFormat, algorithm: Algorithm) -> Self {
        RunConfig {
            input: input.into(),
            format,
            transform: format == InputFormat::Aut,
            algorithm,
            buggy: false,
            sections: vec![Section::Partition, Section::Relation, Section::Stats],
            style: Style::Machine,
            verify: false,
            debug_invariants: None,
        }
    }
}

/// Reads and, for transition systems, transforms the input.
pub fn load_structure(path: &Path, format: InputFormat, transform: bool) -> Result<KripkeStructure, CliError> {
    match (format, transform) {
        (InputFormat::Aut, false) => {
            return Err(CliError::Usage(
                "aut input carries transition labels; pass --transform to encode it as a Kripke structure".into(),
            ))
        }
        (InputFormat::Kripke, true) => {
            return Err(CliError::Usage("--transform only applies to aut input".into()));
        }
        _ => {}
    }
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    let parse_err = |source| CliError::Parse { path: path.to_owned(), source };
    let ks = match format {
        InputFormat::Aut => lts_to_kripke(&parse_aut(&text).map_err(parse_err)?)?,
        InputFormat::Kripke => parse_kripke(&text).map_err(parse_err)?,
    };
    if ks.duplicates_dropped() > 0 {
        info!("{}: dropped {} duplicate edges", path.display(), ks.duplicates_dropped());
    }
    Ok(ks)
}

/// Loads the input, runs the algorithm and writes the requested sections
/// to `out`. With verification the result is compared pointwise with the
/// naive oracle and, when small enough, with the closure-based shell.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let ks = load_structure(&cfg.input, cfg.format, cfg.transform)?;
    let n = ks.num_states();
    debug!("{} states, {} transitions", n, ks.num_transitions());
    algorithm_guard(cfg.algorithm, n)?;
    if cfg.buggy && !cfg.algorithm.has_buggy_mode() {
        return Err(CliError::Usage(format!("--buggy has no effect on {}", cfg.algorithm)));
    }
    let wants_pairs = cfg.sections.contains(&Section::Preorder);
    if wants_pairs {
        check_guard("state-level preorder output", n, PAIR_GUARD)?;
    }

    let opts = RunOptions { buggy: cfg.buggy, check_invariants: cfg.debug_invariants, ..RunOptions::default() };
    let res = compute(&ks, cfg.algorithm, &opts)?;
    info!("{} finished in {:?}", cfg.algorithm, res.stats.wall_time);
    let preorder = (wants_pairs || cfg.verify).then(|| expand_preorder(&res));
    write_result(out, &res, &cfg.sections, cfg.style, preorder.as_ref())?;

    if cfg.verify {
        check_guard("naive oracle", n, ORACLE_GUARD)?;
        let ours = preorder.expect("computed for verification");
        let mut failures = Vec::new();
        let oracle = naive_oracle(&ks);
        let ok = ours == oracle;
        write_verify(out, "oracle", ok, cfg.style)?;
        if let Some((s, t)) = ours.first_difference(&oracle) {
            failures.push(format!("oracle disagrees on pair ({s}, {t})"));
        }
        if n <= domains::MAX_STATES {
            let shell = preorder_from_closure(&forward_shell(&label_closure(&ks)?, &ks)?);
            write_verify(out, "shell", ours == shell, cfg.style)?;
            if let Some((s, t)) = ours.first_difference(&shell) {
                failures.push(format!("shell disagrees on pair ({s}, {t})"));
            }
        }
        if !failures.is_empty() {
            return Err(CliError::Mismatch(failures.join("; ")));
        }
    }
    Ok(())
}
