//! Command-line front-end for the coverage-simulation library.
//!
//! Exit codes: 0 on success (including --help/--version), 1 on invalid
//! arguments or I/O trouble, 2 when a coverage/interference check fails;
//! in that case the replay seed and stream are printed.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use covsim_core::beta::{
    verify_lemma_first, verify_prohorov, verify_series_integral_identity, binomial_cdf,
    incomplete_beta, beta_pdf, BetaParams,
};
use covsim_core::harness::{
    agg_path, fit_scaling, oracle_scaling_2d, read_agg_csv, replicate_case2, run_experiment,
    write_agg_csv, write_trials_csv, Experiment, ExperimentConfig, RunOutput,
};
use covsim_core::quad;
use covsim_core::sampling::RNG_ALGORITHM;

#[derive(Parser)]
#[command(
    name = "covsim",
    version,
    about = "Randomized sensor reallocation experiments on the unit interval and unit square"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment batch and write per-trial and aggregate CSV files
    Simulate(SimulateArgs),
    /// Rebuild the batched anchor study: grid sides 1..=60, 200 trials per
    /// size, reported as 20 batch means of 10
    ReplicateCase2(ReplicateArgs),
    /// Fit a log-log scaling line to an aggregate CSV
    Fit(FitArgs),
    /// Optimal-assignment scaling study against the square grid anchors
    #[command(name = "oracle-2d")]
    Oracle2d(Oracle2dArgs),
    /// One-shot checks of the proven numeric inequalities and identities
    VerifyBeta(VerifyBetaArgs),
    /// Run a placement experiment purely for its coverage/interference
    /// verdict (exit 2 with a replay seed on any violation)
    VerifyCi(SimulateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// One of: anchors_1d, mv_1d, cv1_1d, cv2_2d, oracle_2d, beta_lemmas
    #[arg(long)]
    experiment: Option<String>,
    /// Single problem size (shorthand for a one-point --n-grid)
    #[arg(long)]
    n: Option<u64>,
    /// Comma-separated problem sizes, strictly increasing
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    /// Displacement exponent
    #[arg(long)]
    a: Option<f64>,
    /// Gap bound as a multiple of 1/n
    #[arg(long)]
    rho_n: Option<f64>,
    /// Interference distance as a multiple of 1/n
    #[arg(long)]
    s_n: Option<f64>,
    /// Sensing diameter as a multiple of 1/n (1D) or 1/⌊√n⌋ (2D)
    #[arg(long)]
    r_2n: Option<f64>,
    /// Trials per problem size
    #[arg(long)]
    reps: Option<u64>,
    /// Master seed; every trial derives its own stream from it
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long)]
    workers: Option<usize>,
    /// Per-trial CSV path; the aggregate table lands next to it as .agg.csv
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config supplying any of the above (flags take precedence)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Default-grid spacing when no --n or --n-grid is given
    #[arg(long)]
    stride: Option<u64>,
}

#[derive(Args)]
struct ReplicateArgs {
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Aggregate CSV produced by simulate (the .agg.csv file)
    #[arg(long = "in")]
    input: PathBuf,
    /// Ignore rows with n below this
    #[arg(long, default_value_t = 0)]
    n_min: u64,
}

#[derive(Args)]
struct Oracle2dArgs {
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Comma-separated grid sides; problem sizes are their squares
    #[arg(long, value_delimiter = ',', default_value = "4,8,12,16,20")]
    q_grid: Vec<u64>,
    #[arg(long, default_value_t = 50)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyBetaArgs {
    /// One of: lemma_first, prohorov, binomial_identity, normalization,
    /// series_identity, all
    #[arg(long, default_value = "all")]
    check: String,
    /// Largest n scanned by the grid checks
    #[arg(long, default_value_t = 10_000)]
    n_max: u64,
    /// Seed for the sampled concentration-bound triples
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };

    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(covsim_core::Error::CiViolation { .. }) =
                err.downcast_ref::<covsim_core::Error>()
            {
                eprintln!("{err:#}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {err:#}");
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args, true),
        Command::VerifyCi(args) => verify_ci(args),
        Command::ReplicateCase2(args) => replicate(args),
        Command::Fit(args) => fit(args),
        Command::Oracle2d(args) => oracle_2d(args),
        Command::VerifyBeta(args) => verify_beta(args),
    }
}

/// Merge config file and flags (flags win) into a validated run config.
fn resolve_config(args: &SimulateArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml_path(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => {
            let experiment: Experiment = args
                .experiment
                .as_deref()
                .ok_or_else(|| anyhow!("--experiment is required without --config"))?
                .parse()
                .map_err(|e: covsim_core::Error| anyhow!(e))?;
            ExperimentConfig {
                experiment,
                n_grid: None,
                a: args.a.ok_or_else(|| anyhow!("--a is required without --config"))?,
                rho_n: None,
                s_n: None,
                r_2n: None,
                reps: args
                    .reps
                    .ok_or_else(|| anyhow!("--reps is required without --config"))?,
                master_seed: args
                    .seed
                    .ok_or_else(|| anyhow!("--seed is required without --config"))?,
                output: PathBuf::new(),
                stride: None,
            }
        }
    };

    if let Some(e) = &args.experiment {
        cfg.experiment = e.parse().map_err(|e: covsim_core::Error| anyhow!(e))?;
    }
    if let Some(n) = args.n {
        cfg.n_grid = Some(vec![n]);
    }
    if let Some(grid) = &args.n_grid {
        cfg.n_grid = Some(grid.clone());
    }
    if let Some(a) = args.a {
        cfg.a = a;
    }
    if let Some(v) = args.rho_n {
        cfg.rho_n = Some(v);
    }
    if let Some(v) = args.s_n {
        cfg.s_n = Some(v);
    }
    if let Some(v) = args.r_2n {
        cfg.r_2n = Some(v);
    }
    if let Some(v) = args.reps {
        cfg.reps = v;
    }
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(out) = &args.out {
        cfg.output = out.clone();
    }
    if let Some(v) = args.stride {
        cfg.stride = Some(v);
    }
    cfg.validate().map_err(|e| anyhow!(e))?;
    Ok(cfg)
}

/// Run `f` on a dedicated pool when --workers is given; otherwise inherit
/// the default pool. Results are deterministic either way.
fn with_workers<T>(
    workers: Option<usize>,
    f: impl FnOnce() -> covsim_core::Result<T> + Send,
) -> anyhow::Result<T>
where
    T: Send,
{
    let out = match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .context("building worker pool")?;
            pool.install(f)
        }
        None => f(),
    };
    out.map_err(anyhow::Error::from)
}

fn print_summary(cfg: &ExperimentConfig, out: &RunOutput) {
    println!(
        "experiment {} | a = {} | reps = {} | seed = {} | rng: {}",
        cfg.experiment.name(),
        cfg.a,
        cfg.reps,
        cfg.master_seed,
        RNG_ALGORITHM
    );
    println!("{:>8}  {:>14}  {:>12}  {:>14}", "n", "mean", "std_err", "centerline");
    for row in &out.aggregates {
        let center = row
            .centerline
            .map(|c| format!("{c:.6}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>8}  {:>14.6}  {:>12.6}  {:>14}",
            row.n, row.mean, row.std_err, center
        );
    }
}

fn write_outputs(cfg: &ExperimentConfig, out: &RunOutput) -> anyhow::Result<()> {
    write_trials_csv(&cfg.output, &out.trials)
        .with_context(|| format!("writing {}", cfg.output.display()))?;
    let agg = agg_path(&cfg.output);
    write_agg_csv(&agg, &out.aggregates).with_context(|| format!("writing {}", agg.display()))?;
    println!("wrote {} and {}", cfg.output.display(), agg.display());
    Ok(())
}

fn simulate(args: SimulateArgs, require_out: bool) -> anyhow::Result<()> {
    let cfg = resolve_config(&args)?;
    if require_out && cfg.output.as_os_str().is_empty() {
        bail!("--out is required (or an output path in the config file)");
    }
    let out = with_workers(args.workers, || run_experiment(&cfg))?;
    print_summary(&cfg, &out);
    if !cfg.output.as_os_str().is_empty() {
        write_outputs(&cfg, &out)?;
    }
    Ok(())
}

fn verify_ci(args: SimulateArgs) -> anyhow::Result<()> {
    let cfg = resolve_config(&args)?;
    match cfg.experiment {
        Experiment::Anchors1d | Experiment::Cv1_1d | Experiment::Cv2_2d => {}
        other => bail!(
            "verify-ci needs an experiment with a coverage check, got {}",
            other.name()
        ),
    }
    let out = with_workers(args.workers, || run_experiment(&cfg))?;
    let checked = out
        .trials
        .iter()
        .filter(|t| t.ci_verified == Some(true))
        .count();
    println!(
        "verified {} of {} trials, zero violations | rng: {}",
        checked,
        out.trials.len(),
        RNG_ALGORITHM
    );
    if !cfg.output.as_os_str().is_empty() {
        write_outputs(&cfg, &out)?;
    }
    Ok(())
}

fn replicate(args: ReplicateArgs) -> anyhow::Result<()> {
    let a = args.a;
    let out = with_workers(args.workers, || replicate_case2(a, args.seed))?;
    println!(
        "anchor study | a = {} | seed = {} | sizes 1..=3600 | rng: {}",
        args.a, args.seed, RNG_ALGORITHM
    );
    println!(
        "{} trials in {} batch rows; final-size batch means:",
        out.trials.len(),
        out.aggregates.len()
    );
    for row in out.aggregates.iter().rev().take(3).collect::<Vec<_>>().iter().rev() {
        println!(
            "  n = {:>5}  batch mean {:.6} (centerline {:.6})",
            row.n,
            row.mean,
            row.centerline.unwrap_or(f64::NAN)
        );
    }
    write_trials_csv(&args.out, &out.trials)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let agg = agg_path(&args.out);
    write_agg_csv(&agg, &out.aggregates).with_context(|| format!("writing {}", agg.display()))?;
    println!("wrote {} and {}", args.out.display(), agg.display());
    Ok(())
}

fn fit(args: FitArgs) -> anyhow::Result<()> {
    let rows = read_agg_csv(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let fit = fit_scaling(&rows, args.n_min).map_err(anyhow::Error::from)?;
    println!(
        "slope {:+.4}  intercept {:+.4}  R² {:.4}  over n ∈ [{}, {}]",
        fit.slope, fit.intercept, fit.r_squared, fit.n_range.0, fit.n_range.1
    );
    Ok(())
}

fn oracle_2d(args: Oracle2dArgs) -> anyhow::Result<()> {
    if args.q_grid.is_empty() {
        bail!("--q-grid must name at least one grid side");
    }
    let (a, q_grid, reps, seed) = (args.a, args.q_grid.clone(), args.reps, args.seed);
    let out = with_workers(args.workers, || oracle_scaling_2d(a, &q_grid, reps, seed))?;
    println!(
        "assignment study | a = {} | reps = {} | seed = {} | rng: {}",
        args.a, args.reps, args.seed, RNG_ALGORITHM
    );
    println!(
        "{:>8}  {:>14}  {:>12}  {:>16}",
        "n", "mean", "std_err", "mean/centerline"
    );
    for row in &out.aggregates {
        let ratio = row.centerline.map(|c| row.mean / c).unwrap_or(f64::NAN);
        println!(
            "{:>8}  {:>14.6}  {:>12.6}  {:>16.6}",
            row.n, row.mean, row.std_err, ratio
        );
    }
    if let Some(path) = &args.out {
        write_trials_csv(path, &out.trials)
            .with_context(|| format!("writing {}", path.display()))?;
        let agg = agg_path(path);
        write_agg_csv(&agg, &out.aggregates)
            .with_context(|| format!("writing {}", agg.display()))?;
        println!("wrote {} and {}", path.display(), agg.display());
    }
    Ok(())
}

fn verify_beta(args: VerifyBetaArgs) -> anyhow::Result<()> {
    let n_max = args.n_max.max(2) as usize;
    let wanted = args.check.as_str();
    let mut ran = 0;
    let mut run_check = |name: &str, f: &mut dyn FnMut() -> anyhow::Result<String>| {
        if wanted != "all" && wanted != name {
            return Ok(());
        }
        ran += 1;
        let detail = f()?;
        println!("{name}: ok ({detail})");
        Ok::<(), anyhow::Error>(())
    };

    run_check("lemma_first", &mut || {
        for a in [0.5, 1.0, 2.0, 4.0] {
            for n in 2..=n_max {
                if !verify_lemma_first(n, a) {
                    bail!("tail bound fails at n={n}, a={a}");
                }
            }
        }
        Ok(format!("n ∈ 2..={n_max}, a ∈ {{0.5, 1, 2, 4}}"))
    })?;

    run_check("prohorov", &mut || {
        use covsim_core::sampling::SeedSpec;
        use rand::Rng;
        let mut rng = SeedSpec::new(args.seed, 0).rng();
        const SAMPLES: usize = 10_000;
        for _ in 0..SAMPLES {
            let n = rng.gen_range(1..=n_max);
            let j = rng.gen_range(0..=n);
            // admissible means n(1−x) ≥ 1, so x ranges over [0, 1 − 1/n]
            let x: f64 = rng.gen_range(0.0..=(1.0 - 1.0 / n as f64));
            if !verify_prohorov(n, j, x).map_err(anyhow::Error::from)? {
                bail!("concentration bound fails at n={n} j={j} x={x}");
            }
        }
        Ok(format!("{SAMPLES} sampled triples, n ≤ {n_max}"))
    })?;

    run_check("binomial_identity", &mut || {
        let mut worst = 0.0f64;
        for n in [1usize, 2, 5, 10, 50, 100, 500, 1000] {
            for l in [1, n / 2 + 1, n] {
                for x in [0.05f64, 0.3, 0.5, 0.77, 0.95] {
                    let lhs: f64 = incomplete_beta(BetaParams::new(l, n + 1 - l)?, x)
                        .map_err(anyhow::Error::from)?;
                    let rhs = 1.0 - binomial_cdf(n, l - 1, x);
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
        if worst > 1e-10 {
            bail!("identity off by {worst:.2e}");
        }
        Ok(format!("worst deviation {worst:.2e}"))
    })?;

    run_check("normalization", &mut || {
        let mut worst = 0.0f64;
        for (c, d) in [(1usize, 1usize), (2, 8), (100, 4), (500, 500), (5000, 5000)] {
            let p = BetaParams::new(c, d)?;
            let mu = c as f64 / (c + d) as f64;
            let sigma =
                ((c * d) as f64 / (((c + d) * (c + d)) as f64 * (c + d + 1) as f64)).sqrt();
            let mut seeds = vec![mu];
            for k in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
                seeds.push((mu - k * sigma).max(1e-12));
                seeds.push((mu + k * sigma).min(1.0 - 1e-12));
            }
            let integral = quad::integrate(
                &|t| beta_pdf(p, t),
                0.0,
                1.0,
                &seeds,
                &quad::QuadOptions::default(),
            )
            .value;
            worst = worst.max((integral - 1.0).abs());
        }
        if worst > 1e-8 {
            bail!("normalization off by {worst:.2e}");
        }
        Ok(format!("worst deviation {worst:.2e}"))
    })?;

    run_check("series_identity", &mut || {
        for a in [0.5, 1.0, 2.5, 3.3] {
            if !verify_series_integral_identity(a).map_err(anyhow::Error::from)? {
                bail!("series–integral identity fails at a={a}");
            }
        }
        Ok("a ∈ {0.5, 1, 2.5, 3.3}".into())
    })?;

    if ran == 0 {
        bail!(
            "unknown check '{}'; expected lemma_first, prohorov, binomial_identity, \
             normalization, series_identity, or all",
            args.check
        );
    }
    Ok(())
}
