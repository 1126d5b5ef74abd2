//! Command-line driver: evaluates norms, K-functionals and Peetre norms from
//! a JSON config, and emits the experiment tables as CSV or JSON.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use peetre_core::config::ExperimentConfig;
use peetre_core::diagnostics::{self, TestFamily};
use peetre_core::experiments::{self, ModulusSource};
use peetre_core::tables::{self, format_float, OutputFormat, TableKind};
use peetre_core::{k_functional, peetre_norm};

#[derive(Parser)]
#[command(
    name = "peetre",
    about = "Symmetric function space norms, K-functionals and Peetre interpolation norms on [0,1]",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the seed of random generators in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the Peetre-norm bracket tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Table output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Norm of the configured function in the space `spaces.e`.
    Norm,
    /// K-functional k(f; a, b) for the couple `(spaces.e, spaces.f)`.
    Kfun,
    /// Normalized Peetre norm of the configured function.
    PeetreNorm,
    /// Fundamental function table over `tau_grid`.
    Fundamental,
    /// Concentration modulus eta(f, tau) over `tau_grid`.
    Eta,
    /// Inclusion modulus profile s(tau) over `tau_grid`.
    SProfile,
    /// Head/tail cutting report for the configured function.
    HeadTail,
    /// Disjoint-family block-ratio sampling.
    Blocks,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .context("--config <path> is required")?;
    ExperimentConfig::from_path(path).with_context(|| format!("reading {}", path.display()))
}

fn out_dir(cli: &Cli) -> Result<&PathBuf> {
    cli.out.as_ref().context("--out <dir> is required for table output")
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = load_config(&cli)?;
    let format: OutputFormat = cli.format.into();

    match cli.command {
        Command::Norm => {
            let space = config.space_e()?;
            let f = config.build_function(cli.seed)?;
            println!("norm = {}", format_float(space.norm(&f)));
        }
        Command::Kfun => {
            let e = config.space_e()?;
            let fs = config.space_f()?;
            let f = config.build_function(cli.seed)?;
            let params = config.params();
            let kv = k_functional(&f, params.a(), params.b(), &e, &fs)?;
            println!("k = {}", format_float(kv.value));
            println!("bracket = [{}, {}]", format_float(kv.lower), format_float(kv.upper));
            println!("method = {:?}", kv.method);
        }
        Command::PeetreNorm => {
            let spec = config.build_peetre_spec()?;
            let f = config.build_function(cli.seed)?;
            let tol = cli.tol.unwrap_or_else(|| config.params().tol());
            let ev = peetre_norm(&f, &spec, tol)?;
            println!("peetre_norm = {}", format_float(ev.value));
            println!("bracket = [{}, {}]", format_float(ev.lower), format_float(ev.upper));
            println!("terms = {}", ev.terms);
            println!("converged = {}", ev.converged);
        }
        Command::Fundamental => {
            let paths = tables::emit_tables(TableKind::Fundamental, &config, out_dir(&cli)?, format)?;
            report_paths(&paths);
        }
        Command::Eta => {
            let space = config.space_e()?;
            let f = config.build_function(cli.seed)?;
            let grid = config.build_tau_grid()?;
            let rows: peetre_core::Result<Vec<(f64, f64)>> = grid
                .iter()
                .map(|t| Ok((*t, diagnostics::eta_point(&space, &f, *t)?)))
                .collect();
            let rows = rows?;
            match &cli.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let path = dir.join(format!("eta.{}", format.extension()));
                    tables::write_pairs(&path, ("tau", "eta"), &rows, format)?;
                    report_paths(&[path]);
                }
                None => {
                    println!("tau,eta");
                    for (t, v) in rows {
                        println!("{},{}", format_float(t), format_float(v));
                    }
                }
            }
        }
        Command::SProfile => {
            let paths = tables::emit_tables(TableKind::SProfile, &config, out_dir(&cli)?, format)?;
            // echo the verdict for interactive use
            let e = config.space_e()?;
            let fs = config.space_f()?;
            let grid = config.build_tau_grid()?;
            let family = TestFamily::scaled_indicators(
                &grid,
                match fs {
                    peetre_core::SpaceSpec::Lp { p } => p,
                    _ => f64::INFINITY,
                },
            )?;
            let profile =
                diagnostics::inclusion_profile(&e, &fs, &grid, &family, config.params().threshold())?;
            println!("verdict = {}", profile.verdict);
            report_paths(&paths);
        }
        Command::HeadTail => {
            let spec = config.build_peetre_spec()?;
            let params = config.params();
            let f = config.build_function(cli.seed)?;
            let report = experiments::run_head_tail(
                &spec,
                params.epsilon0(),
                params.n0(),
                &f,
                &ModulusSource::ClosedForm,
            )?;
            println!("hypotheses_met = {}", report.hypotheses_met);
            println!("head_norm = {}", format_float(report.head_norm));
            println!("tail_bound = {}", format_float(report.tail_bound));
            println!("combined = {}", format_float(report.combined));
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("head_tail.{}", format.extension()));
                tables::write_fields(&path, &tables::head_tail_rows(&report), format)?;
                report_paths(&[path]);
            }
        }
        Command::Blocks => {
            let spec = config.build_peetre_spec()?;
            let params = config.params();
            let family = config.build_family()?;
            let selection = experiments::select_subsequence(
                &family,
                &spec,
                params.epsilon(),
                &ModulusSource::ClosedForm,
            )?;
            if selection.indices.is_empty() {
                bail!("selection criterion met by no family member");
            }
            let selected: Vec<_> =
                selection.indices.iter().map(|i| family[*i].clone()).collect();
            let seed = cli.seed.unwrap_or_else(|| params.seed());
            let report = experiments::run_block_equivalence(
                &selected,
                &spec,
                params.samples(),
                seed,
                params.epsilon(),
            )?;
            println!(
                "selected = {:?}{}",
                selection.indices,
                if selection.exhausted { " (family exhausted)" } else { "" }
            );
            println!("min_ratio = {} (sample {})", format_float(report.min_ratio.1), report.min_ratio.0);
            println!("max_ratio = {} (sample {})", format_float(report.max_ratio.1), report.max_ratio.0);
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("blocks.{}", format.extension()));
                tables::write_blocks(&path, &report, format)?;
                report_paths(&[path]);
            }
        }
    }
    Ok(())
}

fn report_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}
