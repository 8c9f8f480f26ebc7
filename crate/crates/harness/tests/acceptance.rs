//! One line per acceptance criterion. Lines go straight to the process
//! stdout so they show up even when the harness captures test output.

use std::io::Write;
use std::time::{Duration, Instant};

use incpath_core::cyclestats::{
    alpha, binomial_outliers, golomb_dickman_estimate, longest_cycle_distribution, predicted_fraction_from_alpha,
    rational_to_f64, sample_longest_cycle, CycleTables, Precision,
};
use incpath_core::exact::{brute_force_longest, longest_increasing_path_len};
use incpath_core::kgreedy::{k_greedy_path, TerminationMode};
use incpath_core::rng::trial_seed;
use incpath_core::secondmoment::{constant_c_partial, exact_moments, factorial, profile_census, s_sum_bounds};
use incpath_core::walks::greedy_path;
use incpath_core::{random_ordering, EdgeOrdering, LabelModel, VertexWalk};
use incpath_harness::{run, Command, ExperimentConfig, Report};
use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Criteria that cannot pass with the quantities as defined; see the notes
/// in each check. They must still be evaluated and must still print FAIL.
const KNOWN_UNATTAINABLE: [u32; 2] = [3, 12];

struct Outcome {
    id: u32,
    pass: bool,
}

fn emit(id: u32, name: &str, pass: bool, detail: String, elapsed: Duration) -> Outcome {
    let line = format!(
        "criterion {id:>2} {name:<28} {} ({:.1}s) {detail}\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    Outcome { id, pass }
}

fn report(config: ExperimentConfig) -> Report {
    run(config).expect("experiment runs")
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Increasing Hamiltonian vertex sequences, by checking all `n!` of them.
fn brute_ham_count(o: &EdgeOrdering) -> u64 {
    let n = o.n();
    (0..n)
        .permutations(n)
        .filter(|p| o.is_increasing(&VertexWalk::new(p.clone(), n).unwrap()))
        .count() as u64
}

/// All `6! = 720` orderings of `K_4`.
fn k4_orderings() -> impl Iterator<Item = EdgeOrdering> {
    (1..=6u32).permutations(6).map(|l| EdgeOrdering::from_permutation(4, l).unwrap())
}

fn c1_greedy() -> Outcome {
    let t = Instant::now();
    let r = report(ExperimentConfig::new(Command::GreedySim).n(2000).trials(200));
    let mean = r.summary.unwrap().mean;
    let el = t.elapsed();
    let pass = (0.612..=0.652).contains(&mean) && el <= Duration::from_secs(60);
    emit(1, "greedy fraction", pass, format!("mean length/n = {mean:.4} (target 0.6321, window [0.612, 0.652])"), el)
}

fn c2_kgreedy() -> Outcome {
    let t = Instant::now();
    let r = report(ExperimentConfig::new(Command::KgreedySim).n(2000).k(10).trials(100));
    let mean = r.summary.unwrap().mean;
    let predicted = predicted_fraction_from_alpha(alpha(10).unwrap().0);
    let el = t.elapsed();
    let pass = (mean - predicted).abs() <= 0.03 && el <= Duration::from_secs(300);
    emit(2, "k-greedy prediction", pass, format!("k=10 mean = {mean:.4}, 1 - e^(-1/alpha_10) = {predicted:.4}"), el)
}

/// With alpha_k = E[1/L_k + ... + 1/k], alpha_100 = 0.530821..., above 0.523.
fn c3_alpha_100() -> Outcome {
    let t = Instant::now();
    let (a, exact) = alpha(100).unwrap();
    let exact = exact.expect("rational mode below the cap");
    let fraction = predicted_fraction_from_alpha(a);
    let el = t.elapsed();
    let pass = exact < rat(523, 1000) && fraction > 0.85 && el <= Duration::from_secs(10);
    emit(3, "alpha_100 bound", pass, format!("alpha_100 = {a:.6} (exact rational), 1 - e^(-1/alpha_100) = {fraction:.6}"), el)
}

fn c4_monotone() -> Outcome {
    let t = Instant::now();
    let tables = CycleTables::build(200, Precision::Rational).unwrap();
    let exact: Vec<BigRational> = (1..=200).map(|k| tables.alpha(k).unwrap().1.unwrap()).collect();
    let mut violations: Vec<usize> = (1..200).filter(|&k| exact[k] > exact[k - 1]).collect();
    let a201 = CycleTables::build(201, Precision::Float).unwrap().alpha(201).unwrap().0;
    if a201 > rational_to_f64(&exact[199]) {
        violations.push(200);
    }
    let el = t.elapsed();
    emit(4, "alpha monotone", violations.is_empty(), format!("k = 1..200 exact, k = 201 float; violations at {violations:?}"), el)
}

fn c5_golomb_dickman() -> Outcome {
    let t = Instant::now();
    let g = golomb_dickman_estimate(2000).unwrap();
    let el = t.elapsed();
    emit(5, "Golomb-Dickman", (g - 0.6243).abs() <= 0.002, format!("E[L_2000/2000] = {g:.5} (float mode)"), el)
}

fn walks_grid() -> Vec<(usize, Report)> {
    [10, 30, 100]
        .into_iter()
        .map(|n| (n, report(ExperimentConfig::new(Command::WalksDemo).n(n).trials(100))))
        .collect()
}

fn c6_pedestrian(grid: &[(usize, Report)], el: Duration) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, r) in grid {
        let res = &r.results;
        let m = &res["matching_ordering"];
        let ok = res["min_pedestrian_max"].as_u64().unwrap() >= (*n as u64 - 1)
            && res["all_totals_exact"] == true
            && m["pedestrian_max"].as_u64().unwrap() >= (*n as u64 - 1)
            && m["pedestrian_total"].as_u64().unwrap() == (n * (n - 1)) as u64;
        pass &= ok;
        detail.push(format!("n={n}: min max-walk {} / matching {}", res["min_pedestrian_max"], m["pedestrian_max"]));
    }
    emit(6, "pedestrian guarantees", pass, detail.join("; "), el)
}

fn c7_refusal(grid: &[(usize, Report)], el: Duration) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, r) in grid {
        let res = &r.results;
        let bound = ((*n - 1) as f64).sqrt().ceil() as u64;
        let m = &res["matching_ordering"];
        let ok = res["min_refusal_max"].as_u64().unwrap() >= bound
            && m["refusal_max"].as_u64().unwrap() >= bound
            && res["all_refusals_accounted"] == true;
        pass &= ok;
        detail.push(format!("n={n}: min {} / matching {} vs {bound}", res["min_refusal_max"], m["refusal_max"]));
    }
    emit(7, "refusal guarantee", pass, detail.join("; "), el)
}

fn c8_oracles() -> Outcome {
    let t = Instant::now();
    let mut dp_mismatch = 0;
    for n in 4..=7 {
        for i in 0..50 {
            let o = random_ordering(n, trial_seed(8, (n * 100 + i) as u64), LabelModel::Real).unwrap();
            dp_mismatch += usize::from(longest_increasing_path_len(&o).unwrap() != brute_force_longest(&o).unwrap());
        }
    }
    let mut greedy_mismatch = 0;
    for i in 0..100 {
        let o = random_ordering(40, trial_seed(88, i), LabelModel::Real).unwrap();
        let (k1, _) = k_greedy_path(&o, 0, 1, TerminationMode::Exhaust).unwrap();
        greedy_mismatch += usize::from(k1 != greedy_path(&o, 0).unwrap());
    }
    let mut outliers = Vec::new();
    for k in [3, 20] {
        let pmf = longest_cycle_distribution(k, Precision::Rational).unwrap();
        let emp = sample_longest_cycle(k, 100_000, 888).unwrap();
        outliers.extend(binomial_outliers(&emp, &pmf.pmf, 3.0).into_iter().map(|s| (k, s)));
    }
    let el = t.elapsed();
    let pass = dp_mismatch == 0 && greedy_mismatch == 0 && outliers.is_empty();
    emit(
        8,
        "oracle equivalence",
        pass,
        format!("DP/brute mismatches {dp_mismatch}/200, k=1 vs greedy mismatches {greedy_mismatch}/100, CRP 3-sigma outliers {outliers:?}"),
        el,
    )
}

fn c9_first_moment() -> Outcome {
    let t = Instant::now();
    let (sum, count) = k4_orderings().fold((0u64, 0u64), |(s, c), o| (s + brute_ham_count(&o), c + 1));
    let exact_ok = count == 720 && sum == 4 * 720;
    let r = report(ExperimentConfig::new(Command::Moments).n(10).trials(100_000));
    let s = r.summary.unwrap();
    let se = s.stddev / (s.count as f64).sqrt();
    let mc_ok = (s.mean - 10.0).abs() <= 3.0 * se;
    let el = t.elapsed();
    emit(
        9,
        "first moment",
        exact_ok && mc_ok,
        format!("n=4: sum H = {sum} over {count} orderings; n=10: mean {:.4}, 3 SE = {:.4}", s.mean, 3.0 * se),
        el,
    )
}

fn c10_second_moment() -> Outcome {
    let t = Instant::now();
    let sum_sq: u64 = k4_orderings().map(|o| brute_ham_count(&o).pow(2)).sum();
    let enumerated = rat(sum_sq as i64, 720);
    let moments = exact_moments(4).unwrap();
    let census = profile_census(4).unwrap().second_moment();
    let jensen: Vec<(usize, bool)> = (4..=7)
        .map(|n| (n, exact_moments(n).unwrap().second_moment >= rat((n * n) as i64, 1)))
        .collect();
    let el = t.elapsed();
    let pass = moments.second_moment == enumerated && census == enumerated && jensen.iter().all(|j| j.1);
    emit(
        10,
        "second moment exact",
        pass,
        format!("E[H_4^2] = {} (enumeration {enumerated}, census {census}); >= n^2 for n=4..7: {jensen:?}", moments.second_moment),
        el,
    )
}

fn c11_constant() -> Outcome {
    let t = Instant::now();
    let partial = constant_c_partial(80);
    let el = t.elapsed();
    // e^3 to well below 1e-30: the tail after j = 60 is under 2 * 3^61 / 61!.
    let e3 = (0..=60u32).fold(BigRational::zero(), |acc, j| {
        acc + BigRational::new(BigInt::from(3).pow(j), BigInt::from(factorial(j as usize)))
    });
    let diff = (&partial - &e3).abs();
    let pass = diff < rat(1, 1_000_000) && el <= Duration::from_secs(1);
    emit(11, "constant C", pass, format!("|C_80 - e^3| = {:.3e}", rational_to_f64(&diff)), el)
}

/// The census half holds. The split-sum half does not: the exact
/// evaluation of S3_bound / n^2 grows over n = 50..400.
fn c12_bounds() -> Outcome {
    let t = Instant::now();
    let census = profile_census(6).unwrap();
    let checks = census.bound_checks();
    let failing: Vec<String> = checks.iter().filter(|c| !c.holds()).map(|c| c.signature.to_string()).collect();
    let ratios: Vec<f64> = [50, 100, 200, 400]
        .into_iter()
        .map(|n| s_sum_bounds(n).unwrap().s3_value() / (n * n) as f64)
        .collect();
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let el = t.elapsed();
    emit(
        12,
        "bound sanity",
        failing.is_empty() && decreasing,
        format!(
            "n=6 classes {} checked, failing {failing:?}; S3/n^2 at 50,100,200,400 = {}",
            checks.len(),
            ratios.iter().map(|r| format!("{r:.3e}")).join(", ")
        ),
        el,
    )
}

fn c13_hamiltonicity() -> Outcome {
    let t = Instant::now();
    let r = report(ExperimentConfig::new(Command::Hamprob).n(12).trials(2000));
    let s = r.summary.unwrap();
    let threshold = (-1.0f64).exp() - 0.05;
    let el = t.elapsed();
    let pass = s.mean >= threshold && el <= Duration::from_secs(600);
    emit(
        13,
        "Hamiltonicity probability",
        pass,
        format!("n=12: estimate {:.4}, 95% CI [{:.4}, {:.4}], threshold {threshold:.4}", s.mean, s.ci95[0], s.ci95[1]),
        el,
    )
}

#[test]
fn acceptance_criteria() {
    let mut outcomes = vec![c1_greedy(), c2_kgreedy(), c3_alpha_100(), c4_monotone(), c5_golomb_dickman()];
    let t = Instant::now();
    let grid = walks_grid();
    let el = t.elapsed();
    outcomes.push(c6_pedestrian(&grid, el));
    outcomes.push(c7_refusal(&grid, el));
    outcomes.extend([c8_oracles(), c9_first_moment(), c10_second_moment(), c11_constant(), c12_bounds(), c13_hamiltonicity()]);

    let passed = outcomes.iter().filter(|o| o.pass).count();
    let summary = format!("acceptance: {passed}/{} criteria pass; known unattainable: {KNOWN_UNATTAINABLE:?}\n", outcomes.len());
    std::io::stdout().lock().write_all(summary.as_bytes()).unwrap();

    for o in &outcomes {
        if KNOWN_UNATTAINABLE.contains(&o.id) {
            assert!(!o.pass, "criterion {} now passes; drop it from KNOWN_UNATTAINABLE", o.id);
        } else {
            assert!(o.pass, "criterion {} failed", o.id);
        }
    }
}
