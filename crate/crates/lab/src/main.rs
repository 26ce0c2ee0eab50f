use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use nw_core::harness::{beta_sweep, noisy_input_sweep};
use nw_core::ErrorCurve;
use nw_lab::config::{load_json, MnistConfigFile, RunConfigFile};
use nw_lab::idx::load_idx;
use nw_lab::mnist::{mnist_binary_subset, mnist_sweep, TestPool};
use nw_lab::report::{curve_csv_bytes, curve_svg, sigma_path, write_file, write_sigma_summary};
use nw_lab::verify_suite::{run_suite, Suite, DEFAULT_VERIFY_SEED};
use nw_lab::RayonRunner;

/// Kernel-interpolation overfitting experiments.
///
/// Worker threads are capped by the NW_THREADS environment variable.
#[derive(Parser)]
#[command(name = "nw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a β × p sweep (or one per σ when the config lists `sigmas`).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; falls back to `output.csv` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// SVG chart destination; falls back to `output.svg` in the config.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run Monte Carlo checks of the underlying probability facts.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = DEFAULT_VERIFY_SEED)]
        seed: u64,
    },
    /// Sweep on a two-digit MNIST task read from IDX files (optionally gzipped).
    ///
    /// Test points come from --test-images/--test-labels when given,
    /// otherwise from training examples left out of each subsample.
    Mnist {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, requires = "test_labels")]
        test_images: Option<PathBuf>,
        #[arg(long, requires = "test_images")]
        test_labels: Option<PathBuf>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep { config, out, plot } => {
            let file: RunConfigFile = load_json(&config)?;
            let out = out
                .or(file.output.csv.clone())
                .context("no output path: pass --out")?;
            let plot = plot.or(file.output.svg.clone());
            check_writable(&out)?;
            if let Some(p) = &plot {
                check_writable(p)?;
            }
            let cfg = file.experiment_config()?;
            let runner = RayonRunner::from_env()?;
            match &file.experiment.sigmas {
                None => {
                    let curve = beta_sweep(&cfg, &runner)?;
                    emit(&curve, &out, plot.as_deref(), "clean test error vs beta")?;
                }
                Some(sigmas) => {
                    let results = noisy_input_sweep(&cfg, sigmas, &runner)?;
                    for s in &results {
                        let title = format!("clean test error vs beta, sigma = {}", s.sigma);
                        let svg = plot.as_deref().map(|p| sigma_path(p, s.sigma));
                        emit(&s.curve, &sigma_path(&out, s.sigma), svg.as_deref(), &title)?;
                    }
                    let mut buf = Vec::new();
                    write_sigma_summary(&results, &mut buf)?;
                    write_file(&out, &buf)?;
                    eprintln!("wrote {}", out.display());
                }
            }
            Ok(true)
        }
        Command::Verify { suite, seed } => {
            let lines = run_suite(suite, seed)?;
            for line in &lines {
                println!("{line}");
            }
            Ok(lines.iter().all(|l| l.pass))
        }
        Command::Mnist {
            images,
            labels,
            test_images,
            test_labels,
            config,
            out,
            plot,
        } => {
            let file: MnistConfigFile = load_json(&config)?;
            let out = out
                .or(file.output.csv.clone())
                .context("no output path: pass --out")?;
            let plot = plot.or(file.output.svg.clone());
            check_writable(&out)?;
            let (neg, pos) = (file.digits.neg, file.digits.pos);
            let load_pair = |img: &Path, lab: &Path| -> Result<_> {
                let i = load_idx(img).with_context(|| format!("loading {}", img.display()))?;
                let l = load_idx(lab).with_context(|| format!("loading {}", lab.display()))?;
                Ok(mnist_binary_subset(&i, &l, neg, pos)?)
            };
            let pool = load_pair(&images, &labels)?;
            eprintln!("digits {neg}/{pos}: {} training examples", pool.len());
            let test = match (&test_images, &test_labels) {
                (Some(i), Some(l)) => Some(load_pair(i, l)?),
                _ => None,
            };
            let test_pool = test.as_ref().map_or(TestPool::Holdout, TestPool::Separate);
            let runner = RayonRunner::from_env()?;
            let curve = mnist_sweep(&pool, test_pool, &file.sweep_config(), &runner)?;
            let title = format!("MNIST {neg} vs {pos}: clean test error vs beta");
            emit(&curve, &out, plot.as_deref(), &title)?;
            Ok(true)
        }
    }
}

fn emit(curve: &ErrorCurve, csv: &Path, svg: Option<&Path>, title: &str) -> Result<()> {
    write_file(csv, &curve_csv_bytes(curve)?)?;
    eprintln!("wrote {} ({} rows)", csv.display(), curve.rows.len());
    if let Some(svg) = svg {
        write_file(svg, curve_svg(curve, title).as_bytes())?;
        eprintln!("wrote {}", svg.display());
    }
    Ok(())
}

/// Fails early, before any computation, when the parent directory is missing.
fn check_writable(path: &Path) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        bail!(
            "cannot write {}: {} is not a directory",
            path.display(),
            parent.display()
        );
    }
    if path.is_dir() {
        bail!("cannot write {}: it is a directory", path.display());
    }
    Ok(())
}
