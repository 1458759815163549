use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use quasicrystal::acceptance;
use quasicrystal::brusselator::{turing_analysis, BrusselatorParams};
use quasicrystal::field::Window;
use quasicrystal::io::{export_raster, parse_config, read_snapshot, Equation};
use quasicrystal::run::simulate;

/// Hull-function simulator for quasicrystalline patterns.
#[derive(Parser)]
#[command(name = "quasicrystal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Swift-Hohenberg configuration.
    SimulateSh(SimulateArgs),
    /// Run a Brusselator configuration.
    SimulateBruss(SimulateArgs),
    /// Turing onset of the Brusselator for (A, d1, d2).
    Turing {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        d1: f64,
        #[arg(long)]
        d2: f64,
    },
    /// Render a two-dimensional snapshot as a binary PGM.
    Render {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        /// The window is [-half_width, half_width]².
        #[arg(long, default_value_t = 40.0)]
        half_width: f64,
        #[arg(long, value_enum, default_value_t = Component::U)]
        component: Component,
    },
    /// Run the acceptance suite; exits non-zero if any criterion fails.
    Verify,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Component {
    U,
    V,
}

/// Up to 12 decimals, trailing zeros trimmed.
fn short(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn simulate_cmd(args: &SimulateArgs, equation: Equation) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut config = parse_config(&text)?;
    if config.equation != equation {
        bail!("configuration has equation = {}, expected {equation}", config.equation);
    }
    if let Some(out) = &args.output {
        config.output = out.clone();
    }
    let summary = simulate(&config)?;
    println!("t_final = {}", summary.final_state.time());
    println!("records = {}", summary.records.len());
    println!("diagnostics = {}", summary.csv.display());
    for s in &summary.snapshots {
        println!("snapshot = {}", s.display());
    }
    Ok(())
}

fn turing_cmd(a: f64, d1: f64, d2: f64) -> anyhow::Result<()> {
    let t = turing_analysis(&BrusselatorParams::new(a, 1.0, d1, d2)?)?;
    println!("eta = {}", short(t.eta));
    println!("B_c = {}", short(t.b_c));
    println!("k_c = {}", short(t.k_c));
    println!(
        "critical_eigenvector = {}, {}",
        short(t.critical_eigenvector[0]),
        short(t.critical_eigenvector[1])
    );
    println!("turing_first = {}", t.turing_first);
    println!("B_c_closed_form = {}", short(t.b_c_closed_form));
    println!("k_c_closed_form = {}", short(t.k_c_closed_form));
    for n in &t.notes {
        println!("note = {n}");
    }
    Ok(())
}

fn render_cmd(snapshot: &Path, output: &Path, resolution: usize, half_width: f64, component: Component) -> anyhow::Result<()> {
    let snap = read_snapshot(snapshot)?;
    let index = match component {
        Component::U => 0,
        Component::V => 1,
    };
    let field = snap.fields.get(index).context("snapshot has no such component")?;
    export_raster(field, Window::centered(half_width), resolution, output)?;
    println!("image = {}", output.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SimulateSh(args) => simulate_cmd(args, Equation::Sh),
        Command::SimulateBruss(args) => simulate_cmd(args, Equation::Brusselator),
        Command::Turing { a, d1, d2 } => turing_cmd(*a, *d1, *d2),
        Command::Render {
            snapshot,
            output,
            resolution,
            half_width,
            component,
        } => render_cmd(snapshot, output, *resolution, *half_width, *component),
        Command::Verify => {
            let results = acceptance::run_all(|c| println!("{c}"));
            let passed = results.iter().filter(|c| c.passed).count();
            println!("verify: {passed}/{} criteria passed", results.len());
            return if passed == results.len() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
