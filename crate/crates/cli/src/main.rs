//! `semilab`: runs the registered scenario bundles and writes their
//! curves, residuals and optional SVG charts.
//!
//! Exit codes: 0 all checks passed, 2 usage error or unknown scenario,
//! 3 numerical or threshold failure, 4 I/O failure.

mod config;
mod plot;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semiflow::registry::{self, Bundle, RunParams};

use config::{FileConfig, Format};
use table::Table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("threshold checks failed: {0}")]
    Threshold(String),
    #[error("I/O failure: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::UnknownScenario(_) => 2,
            CliError::Numerical(_) | CliError::Threshold(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<semiflow::Error> for CliError {
    fn from(e: semiflow::Error) -> Self {
        use semiflow::Error as E;
        match e {
            E::InvalidArgument(_) | E::InvalidSpace(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "semilab",
    version,
    about = "Operator-semigroup scenario runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the diagnostic bundle of a scenario.
    Run(Box<RunArgs>),
    /// List registered scenarios.
    List,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Scenario name (see `semilab list`).
    scenario: String,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_step: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    s_step: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
    /// Right end of the spatial grid (truncation length for sequences).
    #[arg(long)]
    domain_max: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Unit-sphere samples for two-dimensional angles.
    #[arg(long)]
    sphere_samples: Option<usize>,
    /// Output directory [default: $SEMILAB_OUT, else ./semilab-out].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Also write one SVG chart per table.
    #[arg(long)]
    plot: bool,
    /// key = value run file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

struct Settings {
    scenario: String,
    params: RunParams,
    out: PathBuf,
    format: Format,
    plot: bool,
}

fn settings(a: RunArgs) -> Result<Settings, CliError> {
    let file = match &a.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    if let Some(s) = &file.scenario {
        if s != &a.scenario {
            return Err(CliError::Usage(format!(
                "config names scenario '{s}' but '{}' was requested",
                a.scenario
            )));
        }
    }
    let out = a
        .out
        .or(file.out)
        .or_else(|| std::env::var_os("SEMILAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("semilab-out"));
    Ok(Settings {
        params: RunParams {
            t_max: a.t_max.or(file.t_max),
            t_step: a.t_step.or(file.t_step),
            s_max: a.s_max.or(file.s_max),
            s_step: a.s_step.or(file.s_step),
            grid_step: a.grid_step.or(file.grid_step),
            domain_max: a.domain_max.or(file.domain_max),
            k_max: a.k_max.or(file.k_max),
            sphere_samples: a.sphere_samples.or(file.sphere_samples),
        },
        scenario: a.scenario,
        out,
        format: a.format.or(file.format).unwrap_or(Format::Csv),
        plot: a.plot || file.plot.unwrap_or(false),
    })
}

/// Tables in output order: file stem, table, chart axes.
fn tables(b: &Bundle) -> Vec<(&'static str, Table, [&'static str; 2])> {
    let mut decay = Table::new(&["t", "norm"]);
    if let Some(d) = &b.decay {
        for (t, n) in d.times.iter().zip(&d.norms) {
            decay.push(vec![*t, *n]);
        }
    }
    let mut angles = Table::new(&["T", "s", "angle", "sup_profile"]);
    if let Some(a) = &b.angles {
        for ((t, row), sup) in a.t_grid.iter().zip(&a.angles).zip(&a.sup_profile) {
            for (s, x) in a.s_grid.iter().zip(row) {
                angles.push(vec![*t, *s, *x, *sup]);
            }
        }
    }
    let mut series = Table::new(&["k", "term", "partial_sum"]);
    if let Some(l) = &b.series {
        for (i, (term, sum)) in l.terms.iter().zip(&l.partial_sums).enumerate() {
            series.push(vec![(i + 1) as f64, *term, *sum]);
        }
    }
    let mut growth = Table::new(&["t", "ratio"]);
    for g in &b.growth {
        growth.push(vec![g.t, g.ratio]);
    }
    vec![
        ("decay", decay, ["t", "norm"]),
        ("angles", angles, ["T", "sup_profile"]),
        ("series", series, ["k", "partial_sum"]),
        ("growth", growth, ["t", "ratio"]),
    ]
}

fn invariance_json(b: &Bundle) -> serde_json::Value {
    serde_json::json!({
        "scenario": b.scenario,
        "passed": b.passed(),
        "params": b.params,
        "residuals": b.residuals,
        "reports": b.reports,
        "checks": b.checks,
    })
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn write_outputs(b: &Bundle, s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(&s.out).map_err(|e| io(&s.out, e))?;
    let mut written = Vec::new();
    let ext = extension(s.format);
    let mut charts = Vec::new();
    for (stem, table, axes) in tables(b) {
        let path = s.out.join(format!("{stem}.{ext}"));
        table.write(&path, s.format)?;
        written.push(path.clone());
        charts.push((stem, path, axes));
    }
    let inv = s.out.join("invariance.json");
    let text = serde_json::to_string_pretty(&invariance_json(b))
        .map_err(|e| CliError::Io(format!("{}: {e}", inv.display())))?;
    std::fs::write(&inv, text + "\n").map_err(|e| io(&inv, e))?;
    written.push(inv);

    if s.plot {
        // charts come from the files on disk, never from the in-memory bundle
        for (stem, path, [x, y]) in charts {
            let t = Table::read(&path, s.format)?;
            let (mut xs, mut ys) = (
                t.column(x).unwrap_or_default(),
                t.column(y).unwrap_or_default(),
            );
            if stem == "angles" {
                // one point per T; sup_profile repeats across s
                let mut keep: Vec<(f64, f64)> = Vec::new();
                for (a, b) in xs.iter().zip(&ys) {
                    if keep.last().map(|p| p.0) != Some(*a) {
                        keep.push((*a, *b));
                    }
                }
                (xs, ys) = keep.into_iter().unzip();
            }
            let svg = plot::line_chart(&format!("{} {stem}", b.scenario), x, y, &xs, &ys);
            let svg_path = s.out.join(format!("{stem}.svg"));
            std::fs::write(&svg_path, svg).map_err(|e| io(&svg_path, e))?;
            written.push(svg_path);
        }
    }
    Ok(written)
}

fn run(a: RunArgs) -> Result<(), CliError> {
    if registry::lookup(&a.scenario).is_err() {
        return Err(CliError::UnknownScenario(a.scenario));
    }
    let s = settings(a)?;
    let bundle = registry::run_bundle(&s.scenario, &s.params)?;
    let written = write_outputs(&bundle, &s)?;

    println!("scenario {}", bundle.scenario);
    for c in &bundle.checks {
        println!(
            "  [{}] {}: {:.6e} {} {:e}",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.value,
            c.relation,
            c.threshold
        );
    }
    for p in &written {
        println!("  wrote {}", p.display());
    }
    let failed: Vec<String> = bundle
        .failures()
        .iter()
        .map(|c| {
            format!(
                "{} = {:e} (needs {} {:e})",
                c.name, c.value, c.relation, c.threshold
            )
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Threshold(failed.join("; ")))
    }
}

fn list() {
    for e in &registry::SCENARIOS {
        println!("{:<24} {}", e.name, e.anchor);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::List => {
            list();
            Ok(())
        }
        Command::Run(a) => run(*a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semilab: {e}");
            if let CliError::UnknownScenario(_) = e {
                eprintln!("registered scenarios:");
                for name in registry::names() {
                    eprintln!("  {name}");
                }
            }
            ExitCode::from(e.code())
        }
    }
}
