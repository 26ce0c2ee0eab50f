//! End-to-end acceptance run: one line per criterion, nonzero exit if any
//! fails. MNIST files are looked up in `$NW_MNIST_DIR`, else `data/mnist`
//! at the workspace root; the MNIST criterion is skipped when they are
//! absent.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use nw_core::constants::{catastrophic_mass_bound, tempered_constant};
use nw_core::harness::{beta_sweep, noisy_input_sweep};
use nw_core::predictor::Sign;
use nw_core::rng::{Stream, StreamTag};
use nw_core::{raw_score, DistributionSpec, ExperimentConfig, Label, TrainingSet};
use nw_lab::idx::load_idx;
use nw_lab::mnist::{mnist_binary_subset, mnist_sweep, MnistSweepConfig, TestPool};
use nw_lab::verify_suite::{self, interpolates, random_training_set, INTERPOLATION_BETAS};
use nw_lab::RayonRunner;
use rand::Rng;

const SEED: u64 = 1;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn rng(index: u64) -> nw_core::StreamRng {
    Stream::new(SEED, StreamTag::Verify, 50_000 + index).rng()
}

struct Mnist {
    train: TrainingSet,
    test: Option<TrainingSet>,
}

fn mnist_dir() -> PathBuf {
    std::env::var_os("NW_MNIST_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            let root = Path::new(env!("CARGO_MANIFEST_DIR"))
                .ancestors()
                .nth(2)
                .expect("workspace root");
            root.join("data/mnist")
        })
}

fn find(dir: &Path, stem: &str) -> Option<PathBuf> {
    [stem.to_string(), format!("{stem}.gz")]
        .into_iter()
        .map(|n| dir.join(n))
        .find(|p| p.is_file())
}

fn load_mnist() -> Result<Option<Mnist>> {
    let dir = mnist_dir();
    let (Some(images), Some(labels)) = (
        find(&dir, "train-images-idx3-ubyte"),
        find(&dir, "train-labels-idx1-ubyte"),
    ) else {
        return Ok(None);
    };
    let train = mnist_binary_subset(&load_idx(images)?, &load_idx(labels)?, 0, 1)?;
    let test = match (
        find(&dir, "t10k-images-idx3-ubyte"),
        find(&dir, "t10k-labels-idx1-ubyte"),
    ) {
        (Some(i), Some(l)) => Some(mnist_binary_subset(&load_idx(i)?, &load_idx(l)?, 0, 1)?),
        _ => None,
    };
    Ok(Some(Mnist { train, test }))
}

/// 784-dimensional inputs: a random 100-point MNIST 0/1 subset when the
/// files are present, otherwise random byte-valued images scaled by 1/255.
fn set_784<R: Rng>(mnist: Option<&Mnist>, r: &mut R) -> Result<TrainingSet> {
    let mut set = TrainingSet::new(784)?;
    let mut x = vec![0.0; 784];
    for _ in 0..100 {
        let y = if r.random::<bool>() {
            Label::Pos
        } else {
            Label::Neg
        };
        match mnist {
            Some(m) => {
                let i = r.random_range(0..m.train.len());
                set.push(m.train.point(i), y)?;
            }
            None => {
                x.iter_mut()
                    .for_each(|v| *v = f64::from(r.random::<u8>()) / 255.0);
                set.push(&x, y)?;
            }
        }
    }
    Ok(set)
}

fn c1_interpolation(mnist: Option<&Mnist>) -> Result<Outcome> {
    let start = Instant::now();
    let mut passed = 0;
    let n_sets: usize = 200;
    for s in 0..n_sets {
        let mut r = rng(s as u64);
        let set = match s % 3 {
            0 => random_training_set(r.random_range(1..=500), 1, &mut r)?,
            1 => random_training_set(r.random_range(1..=500), 2, &mut r)?,
            _ => set_784(mnist, &mut r)?,
        };
        let mut ok = true;
        for beta in INTERPOLATION_BETAS {
            ok &= interpolates(&set, beta)?;
        }
        passed += usize::from(ok);
    }
    let secs = start.elapsed().as_secs_f64();
    let source = if mnist.is_some() {
        "MNIST"
    } else {
        "synthetic bytes"
    };
    Ok(verdict(
        passed == n_sets && secs < 30.0,
        format!("{passed}/{n_sets} sets reproduced in {secs:.1}s (d=784 from {source})"),
    ))
}

fn c2_stability() -> Result<Outcome> {
    let mut compared = 0;
    let mut mismatches = 0;
    for s in 0..500 {
        let mut r = rng(1000 + s);
        let dim = r.random_range(1..=3);
        let m = r.random_range(1..=50);
        let beta = r.random_range(0.05..=8.0);
        let mut set = TrainingSet::new(dim)?;
        let mut x = vec![0.0; dim];
        for _ in 0..m {
            x.iter_mut().for_each(|v| *v = r.random_range(-1.0..1.0));
            set.push(
                &x,
                if r.random::<bool>() {
                    Label::Pos
                } else {
                    Label::Neg
                },
            )?;
        }
        x.iter_mut().for_each(|v| *v = r.random_range(-1.0..1.0));
        let naive: f64 = set
            .iter()
            .map(|(xi, y)| {
                let d2: f64 = xi.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum();
                f64::from(y.value()) * d2.sqrt().powf(-beta)
            })
            .sum();
        if naive.abs() > 1e-8 {
            compared += 1;
            let expected = if naive > 0.0 { Sign::Pos } else { Sign::Neg };
            mismatches += usize::from(raw_score(&x, &set, beta)?.sign != expected);
        }
    }
    Ok(verdict(
        mismatches == 0 && compared > 400,
        format!("{mismatches} sign mismatches over {compared} instances with |naive sum| > 1e-8"),
    ))
}

fn c3_fig2(runner: &RayonRunner) -> Result<Outcome> {
    let mut cfg = ExperimentConfig::new(
        DistributionSpec::default_1d_mixture(),
        2000,
        vec![0.01, 0.08],
        vec![0.5, 1.0, 2.0],
    );
    cfg.base_seed = SEED;
    let curve = beta_sweep(&cfg, runner)?;
    let e = |beta, p| {
        curve
            .get(beta, p)
            .map(|r| r.mean_error)
            .context("missing row")
    };
    let (a1, a8) = (e(0.5, 0.01)?, e(0.5, 0.08)?);
    let b1 = e(1.0, 0.01)?;
    let (c1, c8) = (e(2.0, 0.01)?, e(2.0, 0.08)?);
    let ok_a = (0.07..=0.13).contains(&a1) && (0.07..=0.13).contains(&a8) && (a1 - a8).abs() < 0.02;
    let ok_b = b1 < 0.03;
    let ok_c = c1 < 0.5 * c8;
    Ok(verdict(
        ok_a && ok_b && ok_c,
        format!(
            "(a) beta=0.5: {a1:.4}, {a8:.4} {} (b) beta=1, p=0.01: {b1:.4} {} (c) beta=2: {c1:.4} vs {c8:.4} {}",
            ok_str(ok_a),
            ok_str(ok_b),
            ok_str(ok_c)
        ),
    ))
}

fn ok_str(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn c4_fig3(runner: &RayonRunner) -> Result<Outcome> {
    let mut cfg = ExperimentConfig::new(
        DistributionSpec::default_sphere_cap(),
        2000,
        vec![0.04],
        vec![1.0, 1.5, 2.0, 2.5, 3.0, 4.0],
    );
    cfg.base_seed = SEED;
    let curve = beta_sweep(&cfg, runner)?;
    let best = curve.argmin_beta(0.04).context("empty curve")?;
    let errs: Vec<String> = curve
        .rows
        .iter()
        .map(|r| format!("{}:{:.4}", r.beta, r.mean_error))
        .collect();
    Ok(verdict(
        [1.5, 2.0, 2.5].contains(&best),
        format!("argmin beta = {best} [{}]", errs.join(" ")),
    ))
}

fn c5_sigma(runner: &RayonRunner) -> Result<Outcome> {
    let betas: Vec<f64> = (0..=8).map(|k| 1.5 + 0.25 * f64::from(k)).collect();
    let mut cfg = ExperimentConfig::new(
        DistributionSpec::default_sphere_cap(),
        2000,
        vec![0.04],
        betas,
    );
    cfg.base_seed = SEED;
    let results = noisy_input_sweep(&cfg, &[0.0, 0.1, 0.2], runner)?;
    let best: Vec<f64> = results.iter().map(|s| s.best_betas[0].1).collect();
    let drops: Vec<f64> = best
        .windows(2)
        .map(|w| w[0] - w[1])
        .filter(|&d| d > 0.0)
        .collect();
    let monotone = drops.len() <= 1 && drops.iter().all(|&d| d <= 0.25 + 1e-12);
    let last = best[best.len() - 1];
    let ok_last = last > 2.0 && last < 3.0;
    Ok(verdict(
        monotone && ok_last,
        format!("best beta at sigma 0, 0.1, 0.2 = {best:?}"),
    ))
}

fn c6_verifiers() -> Result<Outcome> {
    let mut lines = verify_suite::order_stats(verify_suite::DEFAULT_VERIFY_SEED)?;
    lines.extend(verify_suite::tails(verify_suite::DEFAULT_VERIFY_SEED)?);
    lines.extend(verify_suite::local_cdf(verify_suite::DEFAULT_VERIFY_SEED)?);
    lines.extend(verify_suite::knn(verify_suite::DEFAULT_VERIFY_SEED)?);
    let failed: Vec<String> = lines
        .iter()
        .filter(|l| !l.pass)
        .map(|l| l.to_string())
        .collect();
    let knn = lines
        .iter()
        .find(|l| l.name.starts_with("knn-agreement") && l.name.ends_with(".rate"))
        .map_or(f64::NAN, |l| l.statistic);
    Ok(verdict(
        failed.is_empty(),
        format!(
            "{}/{} checks pass, knn agreement {knn:.3}{}",
            lines.len() - failed.len(),
            lines.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failed.join("; "))
            }
        ),
    ))
}

fn c7_constants() -> Result<Outcome> {
    // 50-digit reference values
    const TEMPERED_2: f64 = 32.0;
    #[allow(clippy::excessive_precision)]
    const MASS_BOUND: f64 = 9.316949906249123735e-5;
    let t = tempered_constant(2.0)?;
    let b = catastrophic_mass_bound(0.5, 1, 1.0, 4.0)?;
    let rel = |a: f64, r: f64| ((a - r) / r).abs();
    Ok(verdict(
        rel(t, TEMPERED_2) < 5e-7 && rel(b, MASS_BOUND) < 5e-7,
        format!("tempered_constant(2) = {t}, catastrophic_mass_bound(0.5,1,1,4) = {b:.6e}"),
    ))
}

fn c8_mnist(mnist: Option<&Mnist>, runner: &RayonRunner) -> Result<Outcome> {
    let Some(data) = mnist else {
        return Ok(Outcome::Skip(format!(
            "no MNIST files in {}",
            mnist_dir().display()
        )));
    };
    let size = data.train.len();
    let cfg = MnistSweepConfig {
        m: size,
        p_values: vec![0.1],
        betas: vec![2.0, 4.0, 8.0, 16.0, 64.0, 784.0],
        reps: 5,
        n_test: 500,
        base_seed: SEED,
        tie_break: Default::default(),
    };
    let pool = data
        .test
        .as_ref()
        .map_or(TestPool::Holdout, TestPool::Separate);
    ensure!(
        data.test.is_some(),
        "t10k files missing next to the training files"
    );
    let curve = mnist_sweep(&data.train, pool, &cfg, runner)?;
    let best = curve.argmin_beta(0.1).context("empty curve")?;
    Ok(verdict(
        size == 12_665 && [4.0, 8.0, 16.0].contains(&best),
        format!("{size} training examples, argmin beta = {best}"),
    ))
}

fn c9_determinism() -> Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"experiment": {"m": 500, "p_values": [0.01, 0.08], "betas": [0.5, 1, 2, 4],
            "reps": 12, "n_test": 300, "base_seed": 3},
            "distribution": {"kind": "one_d_mixture"}}"#,
    )?;
    let run = |threads: &str, name: &str| -> Result<Vec<u8>> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_nw"))
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .env("NW_THREADS", threads)
            .stderr(Stdio::null())
            .status()?;
        ensure!(status.success(), "sweep failed with NW_THREADS={threads}");
        Ok(std::fs::read(out)?)
    };
    let a = run("1", "a.csv")?;
    let b = run("1", "b.csv")?;
    let c = run("4", "c.csv")?;
    Ok(verdict(
        a == b && a == c && !a.is_empty(),
        format!(
            "{} bytes; NW_THREADS=1 twice and NW_THREADS=4 identical: {}",
            a.len(),
            a == b && a == c
        ),
    ))
}

fn main() -> ExitCode {
    let runner = RayonRunner::from_env().expect("thread pool");
    let mnist = match load_mnist() {
        Ok(m) => m,
        Err(e) => {
            println!("acceptance: failed to load MNIST files: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    type Check<'a> = (&'a str, Box<dyn Fn() -> Result<Outcome> + 'a>);
    let checks: Vec<Check> = vec![
        (
            "1 interpolation",
            Box::new(|| c1_interpolation(mnist.as_ref())),
        ),
        ("2 log-domain vs naive sign", Box::new(c2_stability)),
        ("3 1D mixture error profile", Box::new(|| c3_fig2(&runner))),
        ("4 sphere-cap optimal beta", Box::new(|| c4_fig3(&runner))),
        ("5 input-noise optimal beta", Box::new(|| c5_sigma(&runner))),
        ("6 theory verifiers", Box::new(c6_verifiers)),
        ("7 closed-form constants", Box::new(c7_constants)),
        (
            "8 MNIST 0/1",
            Box::new(|| c8_mnist(mnist.as_ref(), &runner)),
        ),
        (
            "9 determinism across thread counts",
            Box::new(c9_determinism),
        ),
    ];
    let mut failures = 0;
    for (name, check) in &checks {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(Outcome::Pass(d)) => ("PASS", d),
            Ok(Outcome::Skip(d)) => ("SKIP", d),
            Ok(Outcome::Fail(d)) => ("FAIL", d),
            Err(e) => ("FAIL", format!("error: {e:#}")),
        };
        failures += usize::from(tag == "FAIL");
        println!(
            "criterion {name}: {tag} ({detail}) [{:.1}s]",
            start.elapsed().as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
