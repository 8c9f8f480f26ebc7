use std::time::Instant;

use incpath_core::cyclestats::{
    self, alpha, binomial_outliers, crp_largest_block, longest_cycle_distribution, predicted_fraction_from_alpha,
    AlphaTable, EmpiricalPmf, Precision,
};
use incpath_core::exact::{count_increasing_ham_paths, has_increasing_ham_path, longest_increasing_path_len, DEFAULT_CAP};
use incpath_core::kgreedy::k_greedy_path;
use incpath_core::ordering::edge_count;
use incpath_core::rng::{rng_from_seed, trial_seed, PRNG_ID};
use incpath_core::secondmoment::{
    constant_c_partial, exact_moments, profile_census, s_sum_bounds, to_decimal, RationalText,
};
use incpath_core::walks::{greedy_path, pedestrian_walks, refusal_paths};
use incpath_core::{matching_ordering, random_ordering, EdgeOrdering};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Command, ExperimentConfig};
use crate::report::{summarize, Report};
use crate::{HarnessError, TOOLKIT, VERSION};

/// What one command produced, before the common report fields are added.
struct Outcome {
    values: Option<Vec<f64>>,
    results: Value,
    csv: Option<String>,
    trace_csv: Option<String>,
}

impl Outcome {
    fn exact(results: Value) -> Self {
        Self { values: None, results, csv: None, trace_csv: None }
    }
}

pub fn run(config: ExperimentConfig) -> Result<Report, HarnessError> {
    let config = config.resolve()?;
    let start = Instant::now();
    let command = config.command.name();
    let core = |source| HarnessError::Core { command, source };
    let outcome = match config.command {
        Command::GreedySim => greedy_sim(&config).map_err(core)?,
        Command::KgreedySim => kgreedy_sim(&config).map_err(core)?,
        Command::WalksDemo => walks_demo(&config).map_err(core)?,
        Command::AlphaTable => alpha_table(&config).map_err(core)?,
        Command::CyclesMc => cycles_mc(&config).map_err(core)?,
        Command::Hamprob => hamprob(&config).map_err(core)?,
        Command::Moments => moments(&config).map_err(core)?,
        Command::Census => census(&config).map_err(core)?,
        Command::Bounds => bounds(&config).map_err(core)?,
        Command::ConstantC => constant_c(&config),
        Command::Worstcase => worstcase(&config).map_err(core)?,
    };
    let summary = outcome.values.as_deref().map(summarize).transpose()?;
    let raw = if config.emit_raw { outcome.values } else { None };
    Ok(Report {
        toolkit: TOOLKIT.into(),
        version: VERSION.into(),
        prng: PRNG_ID.into(),
        config,
        summary,
        raw,
        results: outcome.results,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        csv: outcome.csv,
        trace_csv: outcome.trace_csv,
    })
}

type CoreResult<T> = incpath_core::Result<T>;

/// Runs `f(trial_seed(seed, t))` for every trial in parallel; results come
/// back in trial order.
fn per_trial<T: Send>(trials: u64, seed: u64, f: impl Fn(u64) -> CoreResult<T> + Sync) -> CoreResult<Vec<T>> {
    (0..trials).into_par_iter().map(|t| f(trial_seed(seed, t))).collect()
}

fn greedy_sim(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let n = cfg.n.unwrap();
    let lengths = per_trial(cfg.trials.unwrap(), cfg.seed, |s| {
        let o = random_ordering(n, s, cfg.model)?;
        Ok(greedy_path(&o, 0)?.len())
    })?;
    let fractions: Vec<f64> = lengths.iter().map(|&l| l as f64 / n as f64).collect();
    let results = json!({
        "statistic": "greedy path length / n",
        "target_fraction": 1.0 - (-1.0f64).exp(),
        "min_length": lengths.iter().min(),
        "max_length": lengths.iter().max(),
    });
    Ok(Outcome { values: Some(fractions), results, csv: None, trace_csv: None })
}

fn kgreedy_sim(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let (n, k) = (cfg.n.unwrap(), cfg.k.unwrap());
    let lengths = per_trial(cfg.trials.unwrap(), cfg.seed, |s| {
        let o = random_ordering(n, s, cfg.model)?;
        Ok(k_greedy_path(&o, 0, k, cfg.mode)?.0.len())
    })?;
    let fractions: Vec<f64> = lengths.iter().map(|&l| l as f64 / n as f64).collect();
    let (alpha_k, alpha_exact) = alpha(k)?;
    let predicted = predicted_fraction_from_alpha(alpha_k);
    let first = random_ordering(n, trial_seed(cfg.seed, 0), cfg.model)?;
    let (_, trace) = k_greedy_path(&first, 0, k, cfg.mode)?;
    let hist = trace.retained_histogram(k);
    let traced: u64 = hist.iter().sum();
    let pmf = longest_cycle_distribution(k, if k <= cyclestats::RATIONAL_CAP { Precision::Rational } else { Precision::Float })?;
    let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
    let results = json!({
        "statistic": "k-greedy path length / n",
        "alpha_k": alpha_k,
        "alpha_k_exact": alpha_exact.map(|a| RationalText::from(&a)),
        "predicted_fraction": predicted,
        "mean_minus_predicted": mean - predicted,
        "trial0_full_tree_extensions": traced,
        "trial0_retained_frequency": hist.iter().skip(1).map(|&c| if traced == 0 { 0.0 } else { c as f64 / traced as f64 }).collect::<Vec<_>>(),
        "longest_cycle_pmf": pmf.pmf,
    });
    Ok(Outcome { values: Some(fractions), results, csv: None, trace_csv: Some(trace.to_csv()) })
}

#[derive(Debug, Clone, Copy)]
struct WalkStats {
    pedestrian_max: usize,
    pedestrian_total: usize,
    refusal_max: usize,
    refusal_accounted: bool,
}

fn walk_stats(o: &EdgeOrdering) -> WalkStats {
    let ped = pedestrian_walks(o);
    let refusal = refusal_paths(o);
    WalkStats {
        pedestrian_max: ped.max_len(),
        pedestrian_total: ped.total_steps(),
        refusal_max: refusal.max_len(),
        refusal_accounted: refusal.walked() + refusal.refused == edge_count(o.n()),
    }
}

fn walks_demo(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let n = cfg.n.unwrap();
    let stats = per_trial(cfg.trials.unwrap(), cfg.seed, |s| Ok(walk_stats(&random_ordering(n, s, cfg.model)?)))?;
    let sqrt_bound = ((n - 1) as f64).sqrt().ceil() as usize;
    let matching = if n % 2 == 0 {
        let m = walk_stats(&matching_ordering(n)?);
        json!({
            "pedestrian_max": m.pedestrian_max,
            "pedestrian_total": m.pedestrian_total,
            "refusal_max": m.refusal_max,
            "refusal_accounted": m.refusal_accounted,
        })
    } else {
        Value::Null
    };
    let results = json!({
        "statistic": "longest pedestrian walk",
        "n_minus_1": n - 1,
        "expected_total_steps": n * (n - 1),
        "min_pedestrian_max": stats.iter().map(|s| s.pedestrian_max).min(),
        "all_totals_exact": stats.iter().all(|s| s.pedestrian_total == n * (n - 1)),
        "refusal_sqrt_bound": sqrt_bound,
        "min_refusal_max": stats.iter().map(|s| s.refusal_max).min(),
        "all_refusals_accounted": stats.iter().all(|s| s.refusal_accounted),
        "matching_ordering": matching,
    });
    let values = stats.iter().map(|s| s.pedestrian_max as f64).collect();
    Ok(Outcome { values: Some(values), results, csv: None, trace_csv: None })
}

fn alpha_table(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let k = cfg.k.unwrap();
    let table = AlphaTable::build(k, cfg.precision.unwrap())?;
    let monotone = table.rows.windows(2).all(|w| w[1].alpha <= w[0].alpha);
    let last = table.row(k).expect("k >= 1");
    let results = json!({
        "k_max": k,
        "alpha_k_max": last.alpha,
        "alpha_k_max_exact": last.alpha_exact,
        "predicted_fraction_k_max": last.predicted_fraction,
        "monotone_nonincreasing": monotone,
        "richardson_limit_estimate": table.limit_estimate().map(|(_, lim)| lim),
        "rows": table.rows,
    });
    Ok(Outcome { values: None, results, csv: Some(table.to_csv()), trace_csv: None })
}

fn cycles_mc(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let k = cfg.k.unwrap();
    let trials = cfg.trials.unwrap();
    let table = longest_cycle_distribution(k, cfg.precision.unwrap())?;
    let longest = per_trial(trials, cfg.seed, |s| Ok(crp_largest_block(k, &mut rng_from_seed(s))))?;
    let mut counts = vec![0u64; k + 1];
    longest.iter().for_each(|&l| counts[l] += 1);
    let empirical = EmpiricalPmf { k, trials, counts };
    let outliers = binomial_outliers(&empirical, &table.pmf, 3.0);
    let results = json!({
        "statistic": "L_k / k",
        "exact_mean_ratio": table.mean() / k as f64,
        "outliers_3sigma": outliers,
        "empirical_counts": empirical.counts,
        "exact_pmf": table.pmf,
    });
    let values = longest.iter().map(|&l| l as f64 / k as f64).collect();
    Ok(Outcome { values: Some(values), results, csv: None, trace_csv: None })
}

fn hamprob(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let n = cfg.n.unwrap();
    let hits = per_trial(cfg.trials.unwrap(), cfg.seed, |s| has_increasing_ham_path(&random_ordering(n, s, cfg.model)?))?;
    let values: Vec<f64> = hits.iter().map(|&h| f64::from(u8::from(h))).collect();
    let inv_e = (-1.0f64).exp();
    let results = json!({
        "statistic": "indicator of an increasing Hamiltonian path",
        "successes": hits.iter().filter(|&&h| h).count(),
        "reference_inv_e": inv_e,
        "threshold": inv_e - 0.05,
    });
    Ok(Outcome { values: Some(values), results, csv: None, trace_csv: None })
}

fn moments(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let n = cfg.n.unwrap();
    let Some(trials) = cfg.trials else {
        let report = exact_moments(n)?;
        return Ok(Outcome::exact(json!({
            "method": "exact",
            "n_squared": n * n,
            "moment_ratio": report.moment_ratio(),
            "report": report.summary(),
            "orientation_note": "pairs are ordered pairs of vertex sequences; each undirected path appears twice",
        })));
    };
    let counts = per_trial(trials, cfg.seed, |s| count_increasing_ham_paths(&random_ordering(n, s, cfg.model)?))?;
    let values: Vec<f64> = counts.iter().map(|&h| h as f64).collect();
    let s = summarize(&values).expect("trials >= 1");
    let second = values.iter().map(|h| h * h).sum::<f64>() / values.len() as f64;
    let standard_error = s.stddev / (s.count as f64).sqrt();
    Ok(Outcome {
        values: Some(values),
        results: json!({
            "method": "monte-carlo",
            "statistic": "H_n",
            "expected_mean": n,
            "standard_error": standard_error,
            "z_score": if standard_error > 0.0 { (s.mean - n as f64) / standard_error } else { 0.0 },
            "second_moment_estimate": second,
        }),
        csv: None,
        trace_csv: None,
    })
}

fn census(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let n = cfg.n.unwrap();
    let census = profile_census(n)?;
    let moments = exact_moments(n)?;
    let second = census.second_moment();
    let checks: Vec<Value> = census
        .bound_checks()
        .iter()
        .map(|c| {
            json!({
                "c": c.signature.c, "k": c.signature.k, "l": c.signature.l,
                "labeled_profiles": c.labeled_profiles,
                "labeled_bound": c.labeled_bound.to_string(),
                "max_profile_pairs": c.max_profile_pairs,
                "embedding_bound": c.embedding_bound.to_string(),
                "embedding_ratio": c.embedding_ratio(),
                "mass_within_product": c.mass_ok(),
                "holds": c.holds(),
            })
        })
        .collect();
    let all_hold = census.bound_checks().iter().all(|c| c.holds());
    let results = json!({
        "total_pairs": census.total_pairs(),
        "second_moment": RationalText::from(&second),
        "matches_exact_moments": second == moments.second_moment,
        "disjoint_fraction": census.disjoint_fraction(),
        "e_minus_2": (-2.0f64).exp(),
        "bounds_hold": all_hold,
        "classes": census.rows(),
        "bound_checks": checks,
        "orientation_note": "ordered pairs of vertex sequences: each unordered pair of undirected paths is counted four times",
    });
    Ok(Outcome { values: None, results, csv: Some(census.to_csv()), trace_csv: None })
}

fn bounds(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let n = cfg.n.unwrap();
    let s = s_sum_bounds(n)?;
    let n2 = (n * n) as f64;
    Ok(Outcome::exact(json!({
        "small_c_max": s.small_c_max,
        "middle_c_max": s.middle_c_max,
        "s1_value": s.s1_value(),
        "s1_over_e_n2": s.s1_value() / (std::f64::consts::E * n2),
        "s1_without_e_minus_2": RationalText::from(&s.s1_rational),
        "s2_bound": RationalText::from(&s.s2_bound),
        "s2_over_n2": s.s2_value() / n2,
        "s3_bound": RationalText::from(&s.s3_bound),
        "s3_over_n2": s.s3_value() / n2,
    })))
}

fn constant_c(cfg: &ExperimentConfig) -> Outcome {
    let c_max = cfg.c_max.unwrap();
    let partial = constant_c_partial(c_max);
    let e3 = 3.0f64.exp();
    Outcome::exact(json!({
        "c_max": c_max,
        "partial_sum": to_decimal(&partial, 40),
        "partial_sum_exact": RationalText::from(&partial),
        "e_cubed": e3,
        "difference": e3 - cyclestats::rational_to_f64(&partial),
    }))
}

fn worstcase(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let n = cfg.n.unwrap();
    let o = matching_ordering(n)?;
    let greedy: Vec<usize> = (0..n).map(|v| greedy_path(&o, v).map(|p| p.len())).collect::<CoreResult<_>>()?;
    let stats = walk_stats(&o);
    let (longest, ham) = if n <= DEFAULT_CAP {
        (Some(longest_increasing_path_len(&o)?), Some(has_increasing_ham_path(&o)?))
    } else {
        (None, None)
    };
    Ok(Outcome::exact(json!({
        "ordering": "matching",
        "greedy_lengths": greedy,
        "pedestrian_max": stats.pedestrian_max,
        "pedestrian_total": stats.pedestrian_total,
        "refusal_max": stats.refusal_max,
        "longest_increasing_path": longest,
        "has_increasing_hamiltonian_path": ham,
    })))
}
