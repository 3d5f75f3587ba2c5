use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use locsched::export::{write_events, write_figure, write_means, write_summary, write_trace};
use locsched::{
    figure_series, generate_trace, means, run_on_trace, sweep, Metric, SimulationConfig,
    StrategyKind, SummaryRow, SweepGrid,
};

mod config;
mod grid;

#[derive(Parser)]
#[command(
    name = "locsched",
    version,
    about = "Energy-aware localization scheduling simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// `key = value` file; omitted keys use the reference setup
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Simulated horizon in seconds
    #[arg(long)]
    duration: Option<String>,
    /// `adaptive` or `fixed:<method>`
    #[arg(long)]
    strategy: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation; prints a summary row and optionally writes the event log
    Simulate {
        #[command(flatten)]
        overrides: Overrides,
        /// Event CSV output path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Velocity trace CSV output path
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Run the Cartesian product of the given axes
    Sweep {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma list and/or `start:stop:step` ranges
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        betas: Option<String>,
        /// Comma list and/or inclusive `a..b` ranges
        #[arg(long)]
        seeds: Option<String>,
        /// e.g. `adaptive,fixed:gps`
        #[arg(long)]
        kinds: Option<String>,
        /// Summary CSV path; per-cell means go to `<stem>_mean.csv` beside it
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the four baseline-vs-adaptive mean series (seeds 1..30)
    ReproduceFigures {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory, created if missing
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(config: Option<&Path>) -> Result<SimulationConfig> {
    match config {
        None => Ok(SimulationConfig::default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                locsched::Error::config("config", format!("cannot read {}: {e}", path.display()))
            })?;
            Ok(config::parse(&text)?)
        }
    }
}

fn effective_config(o: &Overrides) -> Result<SimulationConfig> {
    let mut cfg = load(o.config.as_deref())?;
    let flags = [
        ("seed", &o.seed),
        ("alpha", &o.alpha),
        ("beta", &o.beta),
        ("duration_s", &o.duration),
        ("strategy", &o.strategy),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config::apply(&mut cfg, key, v)?;
        }
    }
    cfg.validate()?;
    eprint!("{}", config::render(&cfg));
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn means_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or("sweep".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_mean.csv"))
}

fn simulate(o: &Overrides, out: Option<&Path>, trace_out: Option<&Path>) -> Result<()> {
    let cfg = effective_config(o)?;
    let trace = generate_trace(&cfg.mobility)?;
    let result = run_on_trace(&cfg, &trace)?;
    if let Some(path) = out {
        let mut w = create(path)?;
        write_events(&mut w, &result.events)?;
        w.flush()?;
    }
    if let Some(path) = trace_out {
        let mut w = create(path)?;
        write_trace(&mut w, &trace)?;
        w.flush()?;
    }
    let stdout = io::stdout();
    write_summary(stdout.lock(), &[SummaryRow::new(&cfg, &result)])?;
    Ok(())
}

fn run_sweep(base: &SimulationConfig, grid: &SweepGrid, out: &Path) -> Result<()> {
    let rows = sweep(base, grid)?;
    let mut w = create(out)?;
    write_summary(&mut w, &rows)?;
    w.flush()?;
    let mean_out = means_path(out);
    let mut w = create(&mean_out)?;
    write_means(&mut w, &means(&rows))?;
    w.flush()?;
    eprintln!(
        "wrote {} rows to {} and {}",
        rows.len(),
        out.display(),
        mean_out.display()
    );
    Ok(())
}

fn reproduce_figures(config: Option<&Path>, out: &Path) -> Result<()> {
    let base = load(config)?;
    base.validate()?;
    eprint!("{}", config::render(&base));
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let baseline = StrategyKind::Fixed("gps".into());
    let grid = SweepGrid {
        kinds: vec![StrategyKind::Adaptive, baseline.clone()],
        alphas: vec![0.5, 0.3],
        betas: SweepGrid::beta_decades(),
        seeds: (1..=30).collect(),
    };
    let mean_rows = means(&sweep(&base, &grid)?);
    let figures = [
        ("fig2.csv", 0.5, Metric::Energy),
        ("fig3.csv", 0.5, Metric::Satisfaction),
        ("fig4.csv", 0.3, Metric::Energy),
        ("fig5.csv", 0.3, Metric::Satisfaction),
    ];
    for (name, alpha, metric) in figures {
        let path = out.join(name);
        let mut w = create(&path)?;
        write_figure(&mut w, &figure_series(&mean_rows, alpha, &baseline, metric))?;
        w.flush()?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            overrides,
            out,
            trace_out,
        } => simulate(&overrides, out.as_deref(), trace_out.as_deref()),
        Command::Sweep {
            overrides,
            alphas,
            betas,
            seeds,
            kinds,
            out,
        } => {
            let base = effective_config(&overrides)?;
            let grid = SweepGrid {
                kinds: match kinds {
                    Some(k) => grid::kinds(&k)?,
                    None => vec![base.kind.clone()],
                },
                alphas: match alphas {
                    Some(a) => grid::floats("alphas", &a)?,
                    None => vec![base.strategy.alpha],
                },
                betas: match betas {
                    Some(b) => grid::floats("betas", &b)?,
                    None => vec![base.strategy.beta],
                },
                seeds: match seeds {
                    Some(s) => grid::seeds(&s)?,
                    None => vec![base.mobility.seed],
                },
            };
            run_sweep(&base, &grid, &out)
        }
        Command::ReproduceFigures { config, out } => reproduce_figures(config.as_deref(), &out),
    }
}

fn is_config_error(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|c| c.downcast_ref::<locsched::Error>())
        .any(locsched::Error::is_config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_config_error(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
