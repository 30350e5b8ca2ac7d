use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinberry::angle::parse_angle;
use spinberry::hubbard::{ScatterConfig, TimePolicy};
use spinberry::measures::default_measures;
use spinberry::sweep::{run_heisenberg_table, run_hubbard_scatter, run_lattice_measures, run_theta_sweep, Grid};
use spinberry::{RegionPartition, ReportDocument, TwoElectronState};

#[derive(Parser)]
#[command(name = "spinberry", version, about = "Spin concurrence of two fermions on a lattice via Berry phases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-spin Berry phases and Bell coefficients over a polar-angle grid.
    SpinSweep {
        /// START:STOP:POINTS, bounds in radians or as pi expressions.
        #[arg(long, default_value = "0:pi:101")]
        grid: Grid,
        #[command(flatten)]
        output: Output,
    },
    /// Heisenberg-map concurrence predictions per momentum.
    HeisenbergTable {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        u: f64,
        /// Comma-separated momenta, e.g. `0,pi/4,pi/2`.
        #[arg(long, value_delimiter = ',', default_value = "0,pi/4,pi/2,3pi/4,pi", conflicts_with = "grid")]
        k0: Vec<String>,
        /// Evenly spaced momenta instead of a list.
        #[arg(long)]
        grid: Option<Grid>,
        #[command(flatten)]
        output: Output,
    },
    /// Two-packet collision in the Hubbard chain.
    HubbardScatter {
        /// TOML experiment file; the built-in reference collision if omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Measure at this fixed time instead of the configured policy.
        #[arg(long)]
        time: Option<f64>,
        /// Override the propagator (`exact` or `krylov`).
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Concurrence measures of a two-electron state.
    LatticeMeasures {
        /// JSON state dump with 1-based sites.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        state: Option<PathBuf>,
        /// Draw a random state on this many sites (needs --seed).
        #[arg(long, requires = "seed")]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Sites of region A, 1-based, e.g. `1-3` or `1,2,5`; defaults to the left half.
        #[arg(long)]
        region_a: Option<String>,
        /// Sites of region B; defaults to the right half.
        #[arg(long)]
        region_b: Option<String>,
        /// Measure to evaluate (repeatable); all registered measures by default.
        #[arg(long)]
        measure: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_sites(spec: &str, num_sites: usize) -> anyhow::Result<Vec<usize>> {
    let mut sites = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim().parse::<usize>()?, b.trim().parse::<usize>()?),
            None => {
                let s = part.parse::<usize>()?;
                (s, s)
            }
        };
        if lo == 0 || hi < lo || hi > num_sites {
            bail!("site range `{part}` outside 1..={num_sites}");
        }
        sites.extend(lo - 1..hi);
    }
    Ok(sites)
}

fn partition(n: usize, a: Option<&str>, b: Option<&str>) -> anyhow::Result<RegionPartition> {
    Ok(match (a, b) {
        (None, None) => RegionPartition::halves(n)?,
        (Some(a), Some(b)) => RegionPartition::new(n, parse_sites(a, n)?, parse_sites(b, n)?)?,
        _ => bail!("give both --region-a and --region-b or neither"),
    })
}

fn emit(doc: &ReportDocument, output: &Output) -> anyhow::Result<()> {
    let text = match output.format {
        Format::Csv => doc.to_csv_string()?,
        Format::Json => doc.to_json_string()? + "\n",
    };
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_scatter_config(path: &Path) -> anyhow::Result<ScatterConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(ScatterConfig::from_toml_str(&text)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::SpinSweep { grid, output } => emit(&run_theta_sweep(&grid)?, &output),
        Command::HeisenbergTable { t, u, k0, grid, output } => {
            let k0s = match grid {
                Some(g) => g.values(),
                None => k0.iter().map(|s| parse_angle(s)).collect::<Result<_, _>>()?,
            };
            emit(&run_heisenberg_table(t, u, &k0s)?, &output)
        }
        Command::HubbardScatter { config, time, method, output } => {
            let mut cfg = match config {
                Some(path) => load_scatter_config(&path)?,
                None => ScatterConfig::reference(),
            };
            if let Some(t) = time {
                cfg.t_policy = TimePolicy::Fixed(t);
            }
            if let Some(m) = method {
                cfg.method = m;
            }
            emit(&run_hubbard_scatter(&cfg)?, &output)
        }
        Command::LatticeMeasures { state, random, seed, region_a, region_b, measure, output } => {
            let state = match (state, random) {
                (Some(path), _) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
                    TwoElectronState::from_json(&text)?
                }
                (None, Some(n)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.expect("clap enforces --seed"));
                    TwoElectronState::random(n, &mut rng)?
                }
                (None, None) => unreachable!("clap requires --state or --random"),
            };
            let part = partition(state.num_sites(), region_a.as_deref(), region_b.as_deref())?;
            let doc = run_lattice_measures(&state, &part, &default_measures(), &measure, seed)?;
            emit(&doc, &output)
        }
    }
}

fn error_class(err: &anyhow::Error) -> &'static str {
    if let Some(e) = err.downcast_ref::<spinberry::Error>() {
        e.class()
    } else if err.downcast_ref::<io::Error>().is_some() {
        "io"
    } else {
        "input"
    }
}

/// Collapses a possibly multi-line message onto one line.
fn one_line(msg: &str) -> String {
    msg.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && *l != "|" && !l.chars().all(|c| c == '^' || c == '|' || c == ' '))
        .collect::<Vec<_>>()
        .join("; ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", error_class(&e), one_line(&format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
