use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use simshell::{run, run_bench, CliError, InputFormat, RunConfig, Section, Style};
use simshell_core::algorithms::Algorithm;
use simshell_core::generate::{generate, GenSpec};
use simshell_core::parse::write_kripke;

#[derive(Parser)]
#[command(name = "simshell", version, about = "Simulation preorders on Kripke structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the simulation preorder of one input.
    Run {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_format)]
        format: InputFormat,
        /// Encode an aut transition system as a Kripke structure first.
        #[arg(long)]
        transform: bool,
        #[arg(long, default_value = "sa", value_parser = parse_algo)]
        algo: Algorithm,
        /// Run the deliberately faulty variant of a reference algorithm.
        #[arg(long)]
        buggy: bool,
        /// Compare with the naive oracle (and the shell on small inputs).
        #[arg(long)]
        verify: bool,
        /// Force invariant checking on.
        #[arg(long, conflicts_with = "no_debug_invariants")]
        debug_invariants: bool,
        /// Force invariant checking off.
        #[arg(long)]
        no_debug_invariants: bool,
        /// Comma-separated sections: partition, relation, preorder, stats, all.
        #[arg(long, default_value = "partition,relation,stats")]
        emit: String,
        /// Human-readable output instead of the line format.
        #[arg(long)]
        text: bool,
    },
    /// Write a random Kripke structure.
    Gen {
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 1)]
        labels: usize,
        #[arg(long, default_value_t = 0.1)]
        density: f64,
        /// Give every state at least one successor.
        #[arg(long)]
        total: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time algorithms over the models listed in a TOML file.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "sa,hhk", value_delimiter = ',', value_parser = parse_algo)]
        algos: Vec<Algorithm>,
    },
}

fn parse_format(s: &str) -> Result<InputFormat, String> {
    s.parse()
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse::<Algorithm>().map_err(|e| e.to_string())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    match cli.command {
        Command::Run {
            input,
            format,
            transform,
            algo,
            buggy,
            verify,
            debug_invariants,
            no_debug_invariants,
            emit,
            text,
        } => {
            let mut cfg = RunConfig::new(input, format, algo);
            cfg.transform = transform;
            cfg.buggy = buggy;
            cfg.verify = verify;
            cfg.sections = Section::parse_list(&emit).map_err(CliError::Usage)?;
            cfg.style = if text { Style::Text } else { Style::Machine };
            cfg.debug_invariants = match (debug_invariants, no_debug_invariants) {
                (true, _) => Some(true),
                (_, true) => Some(false),
                _ => None,
            };
            let res = run(&cfg, &mut out);
            out.flush()?;
            res
        }
        Command::Gen { states, labels, density, total, seed, out: path } => {
            let ks = generate(&GenSpec { num_states: states, num_labels: labels, edge_density: density, total, seed })?;
            let text = write_kripke(&ks);
            match path {
                Some(p) => std::fs::write(&p, text).map_err(|source| CliError::Io { path: p, source }),
                None => {
                    out.write_all(text.as_bytes())?;
                    out.flush()?;
                    Ok(())
                }
            }
        }
        Command::Bench { spec, algos } => {
            let res = run_bench(&spec, &algos, &mut out);
            out.flush()?;
            res
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("simshell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
