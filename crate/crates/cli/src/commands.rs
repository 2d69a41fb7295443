//! Subcommand implementations. Each returns a [`Report`] whose `result`
//! holds the experiment's primary output.

use std::f64::consts::PI;

use qftcheck::applications::{near_multiple, period_finding};
use qftcheck::bounds::split_phase;
use qftcheck::phase_estimation::{median_phase_estimate, randomized_pe_with_offset};
use qftcheck::verifier::estimate_average_infidelity_sequential;
use qftcheck::{
    amplitude_estimation, bad_outcome_bound, bad_outcome_bound_with_tail, bounds_table,
    estimate_average_infidelity, exact_per_basis_infidelity, good_outcome, tail_probability_exact,
    verdict, Channel, NoiseBudget, Offset, PeriodicStateSpec, SeedStream, Verdict,
};
use serde_json::{json, Value};

use crate::config::{allowed_keys, ConfigFile};
use crate::{AmplitudeArgs, BoundsArgs, PeArgs, PeriodArgs, UsageError, VerifyArgs};

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub table: Option<Table>,
    pub passed: bool,
}

fn lib<T>(r: qftcheck::Result<T>) -> Result<T, UsageError> {
    r.map_err(|e| UsageError(e.to_string()))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, UsageError> {
    value.ok_or_else(|| UsageError(format!("missing required option --{flag}")))
}

/// The explicit channel, or a perfect inverse QFT on `n` qubits. The
/// second value is the config echo, absent for the default channel.
fn channel_or_perfect(
    channel: Option<Channel>,
    n: Option<usize>,
) -> Result<(Channel, Option<Value>), UsageError> {
    match (channel, n) {
        (Some(c), Some(n)) if c.num_qubits() != n => Err(UsageError(format!(
            "channel acts on {} qubits but --n is {n}",
            c.num_qubits()
        ))),
        (Some(c), _) => {
            let echo = serde_json::to_value(&c).expect("channel serializes");
            Ok((c, Some(echo)))
        }
        (None, Some(n)) => Ok((lib(Channel::perfect(n))?, None)),
        (None, None) => Err(UsageError("need --n or a channel document".into())),
    }
}

fn with_channel(mut config: Value, echo: Option<Value>) -> Value {
    if let Some(doc) = echo {
        config["channel"] = doc;
    }
    config
}

pub fn verify(args: &VerifyArgs, cfg: &ConfigFile, seed: u64) -> Result<Report, UsageError> {
    cfg.check_keys(&allowed_keys(&[
        "channel",
        "epsilon",
        "delta",
        "threshold",
        "sequential",
    ]))?;
    let channel = require(cfg.channel(args.channel.as_ref())?, "channel")?;
    let threshold = require(cfg.pick(args.threshold, "threshold")?, "threshold")?;
    let epsilon = cfg.pick(args.epsilon, "epsilon")?.unwrap_or(0.01);
    let delta = cfg.pick(args.delta, "delta")?.unwrap_or(0.01);
    let sequential = cfg.flag_or(args.sequential, "sequential")?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(UsageError(format!("threshold {threshold} not in [0, 1]")));
    }

    let estimate = if sequential {
        lib(estimate_average_infidelity_sequential(
            &channel, epsilon, delta, seed,
        ))?
    } else {
        lib(estimate_average_infidelity(&channel, epsilon, delta, seed))?
    };
    let outcome = verdict(&estimate, threshold);
    let mut result = serde_json::to_value(&estimate).expect("estimate serializes");
    result["threshold"] = json!(threshold);
    result["verdict"] = json!(outcome);
    Ok(Report {
        command: "verify",
        config: json!({
            "channel": channel,
            "epsilon": epsilon,
            "delta": delta,
            "threshold": threshold,
            "sequential": sequential,
            "seed": seed,
        }),
        result,
        table: None,
        passed: outcome == Verdict::Pass,
    })
}

/// Average infidelity used for the bound: supplied, exact, or estimated
/// over sampled noise realizations.
fn channel_eta(
    channel: &Channel,
    supplied: Option<f64>,
    realizations: usize,
    seed: u64,
) -> Result<(f64, &'static str), UsageError> {
    if let Some(eta) = supplied {
        if !(0.0..=1.0).contains(&eta) {
            return Err(UsageError(format!("eta {eta} not in [0, 1]")));
        }
        return Ok((eta, "supplied"));
    }
    if channel.is_exact() {
        return Ok((
            lib(exact_per_basis_infidelity(channel, None))?.eta_avg,
            "exact",
        ));
    }
    let budget = NoiseBudget {
        realizations,
        seed: SeedStream::new(seed).child(1).master(),
    };
    let est = lib(exact_per_basis_infidelity(channel, Some(budget)))?;
    Ok((est.eta_avg, "estimated"))
}

pub fn pe(args: &PeArgs, cfg: &ConfigFile, seed: u64, verbose: bool) -> Result<Report, UsageError> {
    cfg.check_keys(&allowed_keys(&[
        "channel",
        "n",
        "theta",
        "window",
        "shots",
        "eta",
        "pin_offset",
        "noise_realizations",
    ]))?;
    let (channel, echo) =
        channel_or_perfect(cfg.channel(args.channel.as_ref())?, cfg.pick(args.n, "n")?)?;
    let n = channel.num_qubits();
    let dim = 1u64 << n;
    let theta: f64 = require(cfg.pick(args.theta, "theta")?, "theta")?;
    let window: u64 = cfg.pick(args.window, "window")?.unwrap_or(2);
    let shots: usize = cfg.pick(args.shots, "shots")?.unwrap_or(1000);
    let pin: Option<u64> = cfg.pick(args.pin_offset, "pin_offset")?;
    let realizations: usize = cfg
        .pick(args.noise_realizations, "noise_realizations")?
        .unwrap_or(16);
    if window < 1 || 2 * window > dim {
        return Err(UsageError(format!(
            "window K = {window} needs 2 <= 2K <= {dim}"
        )));
    }
    if realizations == 0 {
        return Err(UsageError("noise_realizations must be positive".into()));
    }
    let (eta, eta_source) = channel_eta(&channel, cfg.pick(args.eta, "eta")?, realizations, seed)?;

    let offset = pin.map_or(Offset::Uniform, Offset::Pinned);
    let outcomes = lib(randomized_pe_with_offset(
        &channel, theta, shots, offset, seed,
    ))?;
    let bad = outcomes
        .iter()
        .filter(|o| !good_outcome(o.corrected, theta, window, n))
        .count();
    let bad_fraction = bad as f64 / shots as f64;
    let tail = lib(tail_probability_exact(dim, theta, window))?;
    let bound = lib(bad_outcome_bound_with_tail(window, eta, tail))?;
    let closed_form = bad_outcome_bound(window, eta).ok();
    let sigma = (bound.min(1.0) * (1.0 - bound.min(1.0)) / shots as f64).sqrt();
    let within = bad_fraction <= bound + 3.0 * sigma;
    let (k_star, x) = split_phase(dim, theta);

    let mut result = json!({
        "theta": theta,
        "n": n,
        "K": window,
        "shots": shots,
        "bad_fraction": bad_fraction,
        "bound": bound,
        "closed_form_bound": closed_form,
        "exact_tail": tail,
        "eta": eta,
        "eta_source": eta_source,
        "sigma": sigma,
        "within_bound": within,
        "k_star": k_star,
        "x": x,
        "median_estimate": lib(median_phase_estimate(&outcomes, n))?,
        "seed": seed,
    });
    if verbose {
        result["outcomes"] = json!(outcomes);
    }
    Ok(Report {
        command: "pe",
        config: with_channel(
            json!({
                "n": n,
                "theta": theta,
                "window": window,
                "shots": shots,
                "pin_offset": pin,
                "noise_realizations": realizations,
                "seed": seed,
            }),
            echo,
        ),
        result,
        table: None,
        passed: within,
    })
}

pub fn period(
    args: &PeriodArgs,
    cfg: &ConfigFile,
    seed: u64,
    verbose: bool,
) -> Result<Report, UsageError> {
    cfg.check_keys(&allowed_keys(&[
        "channel", "n", "period", "offset", "bound", "runs",
    ]))?;
    let (channel, echo) =
        channel_or_perfect(cfg.channel(args.channel.as_ref())?, cfg.pick(args.n, "n")?)?;
    let n = channel.num_qubits();
    let r: u64 = require(cfg.pick(args.period, "period")?, "period")?;
    let s: u64 = cfg.pick(args.offset, "offset")?.unwrap_or(0);
    let runs: usize = require(cfg.pick(args.runs, "runs")?, "runs")?;
    let spec = lib(PeriodicStateSpec::new(n, r, s))?;
    let dim = spec.dim();
    let bound: u64 = cfg
        .pick(args.bound, "bound")?
        .unwrap_or_else(|| (dim as f64).sqrt().floor().max(r as f64) as u64);
    if runs == 0 {
        return Err(UsageError("runs must be positive".into()));
    }

    let results = lib(period_finding(&channel, &spec, bound, runs, seed))?;
    let successes = results.iter().filter(|r| r.success).count();
    let near = results
        .iter()
        .filter(|res| near_multiple(res.outcome_j, dim, r))
        .count();
    let mut result = json!({
        "n": n,
        "N": dim,
        "r": r,
        "s": s,
        "R": bound,
        "runs": runs,
        "successes": successes,
        "success_rate": successes as f64 / runs as f64,
        "near_multiple_rate": near as f64 / runs as f64,
        "seed": seed,
    });
    if verbose {
        result["results"] = json!(results
            .iter()
            .map(|res| json!({
                "eigen_j": res.eigen_j,
                "outcome_j": res.outcome_j,
                "convergents": res.convergents,
                "candidate_period": res.candidate_period,
                "success": res.success,
            }))
            .collect::<Vec<_>>());
    }
    Ok(Report {
        command: "period",
        config: with_channel(
            json!({
                "n": n,
                "period": r,
                "offset": s,
                "bound": bound,
                "runs": runs,
                "seed": seed,
            }),
            echo,
        ),
        result,
        table: None,
        passed: true,
    })
}

pub fn amplitude(
    args: &AmplitudeArgs,
    cfg: &ConfigFile,
    seed: u64,
    verbose: bool,
) -> Result<Report, UsageError> {
    cfg.check_keys(&allowed_keys(&["channel", "n", "mu", "shots", "window"]))?;
    let (channel, echo) =
        channel_or_perfect(cfg.channel(args.channel.as_ref())?, cfg.pick(args.n, "n")?)?;
    let n = channel.num_qubits();
    let mu: f64 = require(cfg.pick(args.mu, "mu")?, "mu")?;
    let shots: usize = cfg.pick(args.shots, "shots")?.unwrap_or(101);
    let window: u64 = cfg.pick(args.window, "window")?.unwrap_or(2);
    let est = lib(amplitude_estimation(&channel, mu, shots, seed))?;
    let tolerance = window as f64 / (1u64 << n) as f64 * PI;
    let error = (est.mu_hat - mu).abs();
    let mut result = json!({
        "mu": mu,
        "n": n,
        "K": window,
        "shots": shots,
        "mu_hat": est.mu_hat,
        "error": error,
        "tolerance": tolerance,
        "within_tolerance": error <= tolerance,
        "seed": seed,
    });
    if verbose {
        result["samples"] = json!(est.samples);
    }
    Ok(Report {
        command: "amplitude",
        config: with_channel(
            json!({
                "n": n,
                "mu": mu,
                "shots": shots,
                "window": window,
                "seed": seed,
            }),
            echo,
        ),
        result,
        table: None,
        passed: true,
    })
}

pub fn bounds(args: &BoundsArgs, cfg: &ConfigFile, seed: u64) -> Result<Report, UsageError> {
    cfg.check_keys(&allowed_keys(&["dim", "window", "x", "x_grid"]))?;
    let dim: u64 = cfg.pick(args.dim, "dim")?.unwrap_or(1024);
    let windows: Vec<u64> = cfg
        .pick_list(args.window.clone(), "window")?
        .unwrap_or_else(|| vec![2, 3, 4]);
    let grid: Option<usize> = cfg.pick(args.x_grid, "x_grid")?;
    let xs: Vec<f64> = match (cfg.pick_list(args.x.clone(), "x")?, grid) {
        (Some(_), Some(_)) => {
            return Err(UsageError("give either --x or --x-grid, not both".into()))
        }
        (Some(xs), None) => xs,
        (None, Some(0)) => return Err(UsageError("x-grid needs at least one point".into())),
        (None, Some(points)) => (0..points).map(|i| i as f64 / points as f64).collect(),
        (None, None) => vec![0.5],
    };
    if windows.is_empty() {
        return Err(UsageError("need at least one window K".into()));
    }
    let rows = lib(bounds_table(dim, &windows, &xs))?;
    let table = Table {
        header: vec!["N", "K", "x", "exact_tail", "rigorous", "conjectured"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.dim.to_string(),
                    r.window.to_string(),
                    r.x.to_string(),
                    r.exact_tail.to_string(),
                    r.rigorous_bound.to_string(),
                    r.conjectured_bound.to_string(),
                ]
            })
            .collect(),
    };
    Ok(Report {
        command: "bounds",
        config: json!({ "dim": dim, "window": windows, "x": xs, "seed": seed }),
        result: json!({ "rows": rows, "seed": seed }),
        table: Some(table),
        passed: true,
    })
}
