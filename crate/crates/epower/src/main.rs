//! `epower` command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use epower::commands::{self, BoundsRequest};
use epower::gate_io::{self, Dims};
use epower::parallel::{build_pool, THREADS_ENV};
use epower::{sidecar, CliError, CliResult};
use epower_core::minimize::ObjectiveKind;
use epower_core::sampling::Seed;
use epower_core::tensor::Gate;

#[derive(Debug, Parser)]
#[command(name = "epower", version, about = "Entangling power of quantum gates")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    /// Sidecar log receiving a timestamped line per run
    /// (default: `<out>.log` when `--out` is given).
    #[arg(long, global = true)]
    log: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimum tail energies of Haar-random gates versus the generic Schmidt rank (CSV).
    RankSurvey {
        #[arg(long)]
        dims: Dims,
        #[arg(long, default_value_t = 20)]
        gates: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluates concentration bounds (JSON).
    Bounds(BoundsArgs),
    /// Estimates the minimum entangling power of a gate and classifies it (JSON).
    VerifyGate {
        #[command(flatten)]
        gate: GateSource,
        /// Additional objectives: entropy, negativity, tail<k>, or all.
        #[arg(long, value_delimiter = ',')]
        objective: Vec<String>,
        #[arg(long, default_value_t = 128)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Builds and verifies a Householder-type entangler (gate file + JSON report).
    Householder {
        #[arg(long)]
        dims: Dims,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        verify_restarts: usize,
        /// Restarts for the final minimum check of the gate; 0 skips it.
        #[arg(long, default_value_t = 128)]
        check_restarts: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        binary: bool,
    },
    /// Per-cut minima of Haar-random multipartite gates (CSV).
    Multipartite {
        #[arg(long)]
        dims: Dims,
        #[arg(long, default_value_t = 10)]
        gates: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "tail1")]
        objective: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CP residual curve and border-rank estimate of a named state (JSON).
    Tensor {
        /// w-like, ghz or product.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 4)]
        rmax: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certified lower bound on the minimum entropy from an ε-net (JSON).
    Certify {
        #[command(flatten)]
        gate: GateSource,
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Writes a built-in gate to a file.
    Gate {
        #[arg(long)]
        builtin: String,
        #[arg(long)]
        dims: Option<Dims>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        binary: bool,
    },
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Smallest d_A = d_B admitting a nontrivial α.
    #[arg(long = "scan-3933")]
    scan: bool,
    /// α-grid size of the scan.
    #[arg(long, default_value_t = epower_core::bounds::SCAN_GRID_POINTS)]
    grid: usize,
    #[arg(long, num_args = 2, value_names = ["D_A", "D_B"])]
    mean_lower: Option<Vec<usize>>,
    /// Entropy tail: D_A D_B ALPHA.
    #[arg(long, num_args = 3, value_names = ["D_A", "D_B", "ALPHA"])]
    tail: Option<Vec<f64>>,
    /// Union-bound tail over the product net: D_A D_B ALPHA.
    #[arg(long, num_args = 3, value_names = ["D_A", "D_B", "ALPHA"])]
    pmin_tail: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["D_A", "D_B"])]
    optimal_epsilon: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct GateSource {
    /// Gate file (JSON or binary).
    path: Option<PathBuf>,
    /// Built-in gate: hadamard12, identity, swap or haar.
    #[arg(long, conflicts_with = "path")]
    builtin: Option<String>,
    /// Dimensions for identity, swap and haar.
    #[arg(long)]
    gate_dims: Option<Dims>,
    /// Seed for the haar builtin.
    #[arg(long, default_value_t = 0)]
    gate_seed: u64,
}

impl GateSource {
    fn load(&self) -> CliResult<Gate> {
        match (&self.path, &self.builtin) {
            (Some(p), None) => gate_io::read_gate(p),
            (None, Some(name)) => commands::builtin_gate(
                name,
                self.gate_dims.as_ref().map(|d| d.0.as_slice()),
                Seed(self.gate_seed),
            ),
            _ => Err(CliError::Argument(String::from("give a gate file or --builtin"))),
        }
    }
}

fn parse_objective(s: &str) -> CliResult<Vec<ObjectiveKind>> {
    match s {
        "entropy" => Ok(vec![ObjectiveKind::Entropy]),
        "negativity" => Ok(vec![ObjectiveKind::Negativity]),
        "all" => Ok(vec![ObjectiveKind::Entropy, ObjectiveKind::Negativity]),
        _ => s
            .strip_prefix("tail")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .map(|k| vec![ObjectiveKind::TailEnergy(k)])
            .ok_or_else(|| CliError::Argument(format!("unknown objective '{s}'"))),
    }
}

fn as_dim(x: f64) -> CliResult<usize> {
    if x >= 2.0 && x.fract() == 0.0 && x < 1e15 {
        Ok(x as usize)
    } else {
        Err(CliError::Argument(format!("'{x}' is not a dimension")))
    }
}

fn triple(v: &Option<Vec<f64>>) -> CliResult<Option<(usize, usize, f64)>> {
    v.as_ref().map(|t| Ok((as_dim(t[0])?, as_dim(t[1])?, t[2]))).transpose()
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn run(command: &Command) -> CliResult<()> {
    match command {
        Command::RankSurvey {
            dims,
            gates,
            restarts,
            seed,
            out,
        } => {
            let rows = commands::rank_survey(&dims.0, *gates, *restarts, Seed(*seed))?;
            let r0 = epower_core::varieties::generic_min_sr(epower_core::varieties::BipartiteDims::new(
                dims.0[0], dims.0[1],
            )?);
            let mut buf = Vec::new();
            commands::write_survey_csv(&rows, r0, &mut buf)?;
            write_output(out.as_deref(), &buf)
        }
        Command::Bounds(b) => {
            let pair = |v: &Option<Vec<usize>>| v.as_ref().map(|p| (p[0], p[1]));
            let req = BoundsRequest {
                scan: b.scan.then_some(b.grid),
                mean_lower: pair(&b.mean_lower),
                tail: triple(&b.tail)?,
                pmin_tail: triple(&b.pmin_tail)?,
                optimal_epsilon: pair(&b.optimal_epsilon),
            };
            write_output(None, &json_line(&commands::bounds(&req)?)?)
        }
        Command::VerifyGate {
            gate,
            objective,
            restarts,
            seed,
        } => {
            let g = gate.load()?;
            let mut extra = Vec::new();
            for o in objective {
                extra.extend(parse_objective(o)?);
            }
            write_output(
                None,
                &json_line(&commands::verify_gate(&g, &extra, *restarts, Seed(*seed))?)?,
            )
        }
        Command::Householder {
            dims,
            r,
            seed,
            verify_restarts,
            check_restarts,
            out,
            binary,
        } => {
            let (gate, report) = commands::householder(&dims.0, *r, Seed(*seed), *verify_restarts, *check_restarts)?;
            gate_io::write_gate(&gate, out, *binary)?;
            write_output(None, &json_line(&report)?)
        }
        Command::Multipartite {
            dims,
            gates,
            restarts,
            seed,
            objective,
            out,
        } => {
            let kind = match parse_objective(objective)?.as_slice() {
                [k] => *k,
                _ => return Err(CliError::Argument(String::from("give a single objective"))),
            };
            let (_, rows) = commands::multipartite(&dims.0, *gates, kind, *restarts, Seed(*seed))?;
            let mut buf = Vec::new();
            commands::write_cut_csv(&rows, &mut buf)?;
            write_output(out.as_deref(), &buf)
        }
        Command::Tensor { state, rmax, tol, seed } => {
            write_output(None, &json_line(&commands::tensor(state, *rmax, *tol, Seed(*seed))?)?)
        }
        Command::Certify { gate, epsilon, seed } => {
            let g = gate.load()?;
            write_output(None, &json_line(&commands::certify(&g, *epsilon, Seed(*seed))?)?)
        }
        Command::Gate {
            builtin,
            dims,
            seed,
            out,
            binary,
        } => {
            let g = commands::builtin_gate(builtin, dims.as_ref().map(|d| d.0.as_slice()), Seed(*seed))?;
            gate_io::write_gate(&g, out, *binary)
        }
    }
}

fn out_path(command: &Command) -> Option<&Path> {
    match command {
        Command::RankSurvey { out, .. } | Command::Multipartite { out, .. } => out.as_deref(),
        Command::Householder { out, .. } | Command::Gate { out, .. } => Some(out),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_pool(cli.threads).and_then(|pool| pool.install(|| run(&cli.command)));
    let code = match &result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    let log = cli.log.clone().or_else(|| {
        out_path(&cli.command).map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".log");
            PathBuf::from(s)
        })
    });
    if let Some(log) = log {
        let args: Vec<String> = std::env::args().collect();
        if let Err(e) = sidecar::append(&log, &args, code) {
            eprintln!("warning: {e}");
        }
    }
    ExitCode::from(code as u8)
}
