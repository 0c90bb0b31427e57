//! The release gate: every stated requirement exercised end to end, one
//! PASS/FAIL line per check, with stated runtime budgets enforced. The
//! test panics at the end if any check failed, listing them all.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use covsim_core::beta::{
    beta_pdf, binomial_cdf, incomplete_beta, verify_lemma_first, verify_prohorov, BetaParams,
};
use covsim_core::harness::{
    fit_scaling, linear_regression, oracle_scaling_2d, run_experiment, write_agg_csv,
    write_trials_csv, Experiment, ExperimentConfig, RunOutput,
};
use covsim_core::matching::{hungarian, sorted_matching_cost_1d, CostMatrix};
use covsim_core::quad;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn run_check(
    name: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce() -> Result<String, String>,
) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            detail = format!("{detail}; exceeded {:.0}s budget", b.as_secs_f64());
        }
    }
    Outcome {
        name,
        passed,
        detail,
        elapsed,
    }
}

fn cfg(experiment: Experiment, n_grid: Vec<u64>, a: f64, reps: u64, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        experiment,
        n_grid: Some(n_grid),
        a,
        rho_n: None,
        s_n: None,
        r_2n: None,
        reps,
        master_seed: seed,
        output: PathBuf::from("unused.csv"),
        stride: None,
    }
}

fn within_pct(value: f64, target: f64, pct: f64) -> bool {
    (value - target).abs() <= pct / 100.0 * target.abs()
}

// mean a-total anchor cost at n = 3600, a = 2, vs the constant law 1/6
fn c01_anchor_constant_a2() -> Result<String, String> {
    let out = run_experiment(&cfg(Experiment::Anchors1d, vec![3600], 2.0, 200, 101))
        .map_err(|e| e.to_string())?;
    let mean = out.aggregates[0].mean;
    let target = 1.0 / 6.0;
    let detail = format!("mean {mean:.5} vs 1/6 = {target:.5}");
    if within_pct(mean, target, 10.0) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// a = 1: mean/√n vs Γ(3/2)/(2√2)
fn c02_anchor_constant_a1() -> Result<String, String> {
    let out = run_experiment(&cfg(Experiment::Anchors1d, vec![3600], 1.0, 200, 102))
        .map_err(|e| e.to_string())?;
    let normalized = out.aggregates[0].mean / 3600f64.sqrt();
    let target = 0.31332853432887506;
    let detail = format!("mean/sqrt(n) {normalized:.5} vs {target:.5}");
    if within_pct(normalized, target, 10.0) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mv_slack_config(a: f64) -> ExperimentConfig {
    let grid: Vec<u64> = (1..=10).map(|k| 500 * k).collect();
    let mut c = cfg(Experiment::Mv1d, grid, a, 50, 103);
    c.rho_n = Some(1.8);
    c.s_n = Some(0.5);
    c
}

// slack-parameter sweep: log-log slope 1 − a for a ∈ {1, 3/2, 2}
fn c03_sweep_slack_slopes() -> Result<String, String> {
    let mut details = Vec::new();
    let mut ok = true;
    for (a, want) in [(1.0, 0.0), (1.5, -0.5), (2.0, -1.0)] {
        let out = run_experiment(&mv_slack_config(a)).map_err(|e| e.to_string())?;
        let fit = fit_scaling(&out.aggregates, 0).map_err(|e| e.to_string())?;
        let hit = (fit.slope - want).abs() <= 0.15;
        ok &= hit;
        details.push(format!("a={a}: slope {:+.3} (want {want:+.2})", fit.slope));
    }
    let detail = details.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// 10⁴ trials per size and exponent, every one checked; any violation
// aborts the run with a replay seed
fn c04_edge_repair_zero_violations() -> Result<String, String> {
    let mut total = 0usize;
    for a in [1.0, 2.0] {
        let mut c = cfg(Experiment::Cv1_1d, vec![100, 1000, 10000], a, 10_000, 104);
        c.r_2n = Some(1.2);
        c.s_n = Some(0.5);
        let out = run_experiment(&c).map_err(|e| e.to_string())?;
        if let Some(bad) = out.trials.iter().find(|t| t.ci_verified != Some(true)) {
            return Err(format!(
                "unverified trial n={} trial={} (a={a})",
                bad.n, bad.trial
            ));
        }
        total += out.trials.len();
    }
    Ok(format!("{total} trials, zero violations"))
}

// every 2D trial verified; the a = 2 mean-cost slope is also checked
// against the flat law here and reported as measured
fn c05_square_repair_and_scaling() -> Result<String, String> {
    let mut c = cfg(Experiment::Cv2_2d, vec![400, 900, 2500], 2.0, 200, 105);
    c.r_2n = Some(1.2);
    c.s_n = Some(0.5);
    let out = run_experiment(&c).map_err(|e| e.to_string())?;
    if let Some(bad) = out.trials.iter().find(|t| t.ci_verified != Some(true)) {
        return Err(format!("unverified trial n={} trial={}", bad.n, bad.trial));
    }
    let pts: Vec<(f64, f64)> = out
        .aggregates
        .iter()
        .map(|r| ((r.n as f64).ln(), r.mean.ln()))
        .collect();
    let (slope, _, _) = linear_regression(&pts);
    let detail = format!(
        "{} trials verified; a=2 slope {slope:+.3} (want within ±0.15 of 0)",
        out.trials.len()
    );
    if slope.abs() <= 0.15 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

const ORACLE_Q_GRID: [u64; 5] = [4, 8, 12, 16, 20];

// optimal-assignment cost at a = 1 normalized by √(n ln n) stays in a
// narrow band across the grid
fn c06_matching_band_a1() -> Result<String, String> {
    let out = oracle_scaling_2d(1.0, &ORACLE_Q_GRID, 50, 106).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = out
        .aggregates
        .iter()
        .map(|r| {
            let nf = r.n as f64;
            r.mean / (nf * nf.ln()).sqrt()
        })
        .collect();
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let detail = format!("normalized band [{lo:.4}, {hi:.4}], ratio {:.3}", hi / lo);
    if hi / lo < 1.5 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// squared-cost optimum grows like ln n: positive slope, strong linearity
fn c07_matching_growth_a2() -> Result<String, String> {
    let out = oracle_scaling_2d(2.0, &ORACLE_Q_GRID, 50, 107).map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> = out
        .aggregates
        .iter()
        .map(|r| ((r.n as f64).ln(), r.mean))
        .collect();
    let (slope, _, r2) = linear_regression(&pts);
    let detail = format!("mean vs ln n: slope {slope:+.4}, R² {r2:.3}");
    if slope > 0.0 && r2 > 0.8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// the proven inequalities, scanned exhaustively or densely sampled
fn c08_proven_inequality_suites() -> Result<String, String> {
    for a in [0.5, 1.0, 2.0, 4.0] {
        for n in 2..=10_000usize {
            if !verify_lemma_first(n, a) {
                return Err(format!("tail bound fails at n={n}, a={a}"));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(108);
    for k in 0..10_000 {
        let n = rng.gen_range(1..=10_000usize);
        let j = rng.gen_range(0..=n);
        // admissible means n(1−x) ≥ 1, so x ranges over [0, 1 − 1/n]
        let x: f64 = rng.gen_range(0.0..=(1.0 - 1.0 / n as f64));
        match verify_prohorov(n, j, x) {
            Ok(true) => {}
            Ok(false) => return Err(format!("concentration bound fails at n={n} j={j} x={x}")),
            Err(e) => return Err(format!("triple {k} rejected: {e}")),
        }
    }

    // order-statistic CDF as a binomial tail, both sides independently
    for n in [1usize, 2, 5, 10, 50, 100, 500, 1000] {
        for l in [1, n / 2 + 1, n] {
            for x in [0.05f64, 0.3, 0.5, 0.77, 0.95] {
                let lhs: f64 =
                    incomplete_beta(BetaParams::new(l, n + 1 - l).unwrap(), x).unwrap();
                let rhs = 1.0 - binomial_cdf(n, l - 1, x);
                if (lhs - rhs).abs() > 1e-10 {
                    return Err(format!(
                        "cdf identity off by {:.2e} at n={n} l={l} x={x}",
                        (lhs - rhs).abs()
                    ));
                }
            }
        }
    }

    // density normalization, including very peaked shapes near c+d = 10⁴
    for (c, d) in [
        (1usize, 1usize),
        (2, 8),
        (10, 10),
        (100, 4),
        (500, 500),
        (1, 9999),
        (9999, 1),
        (3000, 7000),
        (5000, 5000),
    ] {
        let p = BetaParams::new(c, d).unwrap();
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
        if (integral - 1.0).abs() > 1e-8 {
            return Err(format!(
                "normalization off by {:.2e} at ({c},{d})",
                (integral - 1.0).abs()
            ));
        }
    }

    Ok("tail bounds 4×9999, concentration 10⁴ triples, cdf identity, normalization".into())
}

// scaled moment bounds stay within a factor 2 across three decades of n
fn c09_moment_bounds_stay_bounded() -> Result<String, String> {
    let mut details = Vec::new();
    for a in [1.0, 2.0] {
        let c = cfg(Experiment::BetaLemmas, vec![100, 1000, 10_000], a, 1, 109);
        let out = run_experiment(&c).map_err(|e| e.to_string())?;
        for (trial, label) in [(0u64, "peak"), (1, "sum-upper"), (2, "sum-lower")] {
            let vals: Vec<f64> = out
                .trials
                .iter()
                .filter(|t| t.trial == trial)
                .map(|t| t.cost)
                .collect();
            let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
            let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
            if !(lo > 0.0) || hi / lo >= 2.0 {
                return Err(format!(
                    "a={a} {label}: values {vals:?} vary by {:.2}×",
                    hi / lo
                ));
            }
            details.push(format!("a={a} {label} {:.2}×", hi / lo));
        }
    }
    Ok(details.join(", "))
}

// the assignment solver against brute force, and the 1D shortcut against
// the solver
fn c10_solver_oracles() -> Result<String, String> {
    fn brute_force_min(c: &CostMatrix<f64>) -> f64 {
        fn go(c: &CostMatrix<f64>, row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
            if row == c.n() {
                *best = best.min(acc);
                return;
            }
            for j in 0..c.n() {
                if !used[j] {
                    used[j] = true;
                    go(c, row + 1, used, acc + c.at(row, j), best);
                    used[j] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        go(c, 0, &mut vec![false; c.n()], 0.0, &mut best);
        best
    }

    let mut rng = ChaCha8Rng::seed_from_u64(110);
    for k in 0..1000 {
        let entries: Vec<f64> = (0..36).map(|_| rng.gen::<f64>() * 10.0).collect();
        let c = CostMatrix::new(6, entries).unwrap();
        let (_, total) = hungarian(&c).map_err(|e| e.to_string())?;
        let brute = brute_force_min(&c);
        if total != brute {
            return Err(format!("6×6 instance {k}: solver {total} vs brute {brute}"));
        }
    }

    for k in 0..1000 {
        let n = rng.gen_range(1..=8usize);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let mut ys: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        for a in [1.0, 1.5, 2.0] {
            let direct = sorted_matching_cost_1d(&xs, &ys, a).map_err(|e| e.to_string())?;
            let c =
                CostMatrix::from_fn(n, |i, j| (xs[i] - ys[j]).abs().powf(a)).unwrap();
            let (_, solved) = hungarian(&c).map_err(|e| e.to_string())?;
            if (direct - solved).abs() > 1e-10 {
                return Err(format!(
                    "1D instance {k} (n={n}, a={a}): {direct} vs {solved}"
                ));
            }
        }
    }
    Ok("1000 brute-force matches exact, 1000 1D instances × 3 exponents".into())
}

// identical configs and seeds must yield byte-identical CSV artifacts
fn c11_byte_identical_reruns() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write_both = |out: &RunOutput, tag: &str| -> Result<(PathBuf, PathBuf), String> {
        let t = dir.path().join(format!("{tag}.csv"));
        let g = dir.path().join(format!("{tag}.agg.csv"));
        write_trials_csv(&t, &out.trials).map_err(|e| e.to_string())?;
        write_agg_csv(&g, &out.aggregates).map_err(|e| e.to_string())?;
        Ok((t, g))
    };
    let mut bytes_checked = 0usize;
    for (i, a) in [1.0, 1.5, 2.0].iter().enumerate() {
        let c = mv_slack_config(*a);
        let first = run_experiment(&c).map_err(|e| e.to_string())?;
        let second = run_experiment(&c).map_err(|e| e.to_string())?;
        let (t1, g1) = write_both(&first, &format!("run{i}a"))?;
        let (t2, g2) = write_both(&second, &format!("run{i}b"))?;
        for (p1, p2) in [(t1, t2), (g1, g2)] {
            let b1 = std::fs::read(&p1).map_err(|e| e.to_string())?;
            let b2 = std::fs::read(&p2).map_err(|e| e.to_string())?;
            if b1 != b2 {
                return Err(format!("outputs differ for a={a}"));
            }
            bytes_checked += b1.len();
        }
    }
    Ok(format!("3 configs × 2 files identical ({bytes_checked} bytes compared)"))
}

#[test]
fn acceptance_gate() {
    let secs = Duration::from_secs;
    let outcomes = vec![
        run_check("c01 anchor-constant-a2", Some(secs(10)), c01_anchor_constant_a2),
        run_check("c02 anchor-constant-a1", Some(secs(10)), c02_anchor_constant_a1),
        run_check("c03 sweep-slack-slopes", Some(secs(120)), c03_sweep_slack_slopes),
        run_check("c04 edge-repair-verified", Some(secs(120)), c04_edge_repair_zero_violations),
        run_check("c05 square-repair-scaling", Some(secs(300)), c05_square_repair_and_scaling),
        run_check("c06 matching-band-a1", Some(secs(300)), c06_matching_band_a1),
        run_check("c07 matching-growth-a2", None, c07_matching_growth_a2),
        run_check("c08 proven-inequalities", None, c08_proven_inequality_suites),
        run_check("c09 moment-bounds", None, c09_moment_bounds_stay_bounded),
        run_check("c10 solver-oracles", None, c10_solver_oracles),
        run_check("c11 deterministic-output", None, c11_byte_identical_reruns),
    ];

    let mut failures = Vec::new();
    for o in &outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict}  {:<28} ({:>6.1}s)  {}",
            o.name,
            o.elapsed.as_secs_f64(),
            o.detail
        );
        if !o.passed {
            failures.push(o.name);
        }
    }
    assert!(failures.is_empty(), "failed acceptance checks: {failures:?}");
}
