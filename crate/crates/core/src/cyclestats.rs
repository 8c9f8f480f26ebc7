//! Distribution of the longest cycle `L_k` of a uniform random permutation
//! of `{1..k}`, and the constants derived from it.
//!
//! The tables come from the recurrence
//!
//! ```text
//! Pr[L_m = s] = sum_{j=1}^{floor(m/s)} 1/(j! s^j) * Pr[L_{m-sj} <= s-1],   L_0 = 0
//! ```
//!
//! evaluated bottom-up for every `m <= k`. Exact mode runs it on permutation
//! counts (`m!` times the probabilities) in big integers; float mode runs it on
//! probabilities with compensated summation.
//!
//! `alpha_k = E[1/L_k + 1/(L_k+1) + ... + 1/k]` sets the k-greedy path
//! fraction `1 - exp(-1/alpha_k)`.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, trial_seed};

/// Largest `k` accepted in exact rational mode.
pub const RATIONAL_CAP: usize = 200;
/// Largest `k` accepted in float mode.
pub const FLOAT_CAP: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Rational,
    Float,
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Self::Rational),
            "float" => Ok(Self::Float),
            other => Err(invalid(format!("unknown precision '{other}'"))),
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Rational => "rational",
            Self::Float => "float",
        })
    }
}

/// `Pr[L_k = s]` and `Pr[L_k <= s]` for `s = 1..=k` (stored at index `s - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct CycleLengthTable {
    pub k: usize,
    pub pmf: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Present when built in rational mode.
    pub exact_pmf: Option<Vec<BigRational>>,
}

impl CycleLengthTable {
    pub fn pmf_at(&self, s: usize) -> f64 {
        self.pmf[s - 1]
    }

    pub fn mean(&self) -> f64 {
        neumaier_sum(self.pmf.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p))
    }
}

/// All rows `m = 0..=k_max` of the recurrence.
#[derive(Debug, Clone)]
pub enum CycleTables {
    /// `count_le[m][t]`: permutations of `m` points with longest cycle at
    /// most `t`, for `t < m` (for `t >= m` it is `m!`).
    Exact { count_le: Vec<Vec<BigUint>>, factorial: Vec<BigUint> },
    /// `prob_le[m][t] = Pr[L_m <= t]` for `t < m`.
    Float { prob_le: Vec<Vec<f64>> },
}

impl CycleTables {
    pub fn build(k_max: usize, precision: Precision) -> Result<Self> {
        if k_max < 1 {
            return Err(invalid("k must be at least 1"));
        }
        match precision {
            Precision::Rational if k_max > RATIONAL_CAP => Err(Error::Capacity(format!(
                "rational cycle tables are limited to k <= {RATIONAL_CAP}, got {k_max}"
            ))),
            Precision::Float if k_max > FLOAT_CAP => Err(Error::Capacity(format!(
                "float cycle tables are limited to k <= {FLOAT_CAP}, got {k_max}"
            ))),
            Precision::Rational => Ok(build_exact(k_max)),
            Precision::Float => Ok(build_float(k_max)),
        }
    }

    pub fn k_max(&self) -> usize {
        match self {
            Self::Exact { count_le, .. } => count_le.len() - 1,
            Self::Float { prob_le } => prob_le.len() - 1,
        }
    }

    pub fn table(&self, k: usize) -> Result<CycleLengthTable> {
        if k < 1 || k > self.k_max() {
            return Err(invalid(format!("row {k} not in 1..={}", self.k_max())));
        }
        match self {
            Self::Exact { .. } => {
                let exact = self.exact_pmf(k);
                let pmf: Vec<f64> = exact.iter().map(rational_to_f64).collect();
                let mut cdf = Vec::with_capacity(k);
                let mut acc = BigRational::zero();
                for p in &exact {
                    acc += p;
                    cdf.push(rational_to_f64(&acc));
                }
                Ok(CycleLengthTable { k, pmf, cdf, exact_pmf: Some(exact) })
            }
            Self::Float { prob_le } => {
                let cdf: Vec<f64> = (1..=k).map(|s| if s < k { prob_le[k][s] } else { 1.0 }).collect();
                let pmf = (1..=k).map(|s| float_pmf_entry(prob_le, k, s)).collect();
                Ok(CycleLengthTable { k, pmf, cdf, exact_pmf: None })
            }
        }
    }

    /// Exact pmf of row `k` (rational mode only).
    fn exact_pmf(&self, k: usize) -> Vec<BigRational> {
        let Self::Exact { count_le, factorial } = self else { unreachable!("exact tables") };
        let total = BigInt::from(factorial[k].clone());
        let le = |t: usize| -> BigUint { if t >= k { factorial[k].clone() } else { count_le[k][t].clone() } };
        (1..=k)
            .map(|s| {
                let eq = le(s) - le(s - 1);
                BigRational::new(BigInt::from(eq), total.clone())
            })
            .collect()
    }

    /// `alpha_k` as a float, and exactly when the tables are exact.
    pub fn alpha(&self, k: usize) -> Result<(f64, Option<BigRational>)> {
        let table = self.table(k)?;
        match &table.exact_pmf {
            Some(exact) => {
                let a = alpha_from_exact_pmf(exact);
                Ok((rational_to_f64(&a), Some(a)))
            }
            None => Ok((alpha_from_pmf(&table.pmf), None)),
        }
    }
}

fn build_exact(k_max: usize) -> CycleTables {
    let mut factorial = vec![BigUint::one()];
    for m in 1..=k_max {
        let next = &factorial[m - 1] * BigUint::from(m);
        factorial.push(next);
    }
    let mut count_le: Vec<Vec<BigUint>> = Vec::with_capacity(k_max + 1);
    count_le.push(Vec::new());
    for m in 1..=k_max {
        let mut row = Vec::with_capacity(m);
        row.push(BigUint::zero()); // no permutation of m >= 1 points has all cycles of length 0
        let mut running = BigUint::zero();
        for s in 1..m {
            running += count_longest_equal(m, s, &count_le, &factorial);
            row.push(running.clone());
        }
        count_le.push(row);
    }
    CycleTables::Exact { count_le, factorial }
}

/// Permutations of `m` points whose longest cycle has length exactly `s`.
fn count_longest_equal(m: usize, s: usize, count_le: &[Vec<BigUint>], factorial: &[BigUint]) -> BigUint {
    let le = |r: usize, t: usize| -> BigUint {
        if t >= r {
            factorial[r].clone()
        } else {
            count_le[r][t].clone()
        }
    };
    let mut total = BigUint::zero();
    // ways to pick j disjoint s-cycles out of m points: m! / ((m-sj)! j! s^j)
    let mut ways = BigUint::one();
    for j in 1..=m / s {
        let start = m - s * (j - 1);
        for t in 0..s {
            ways *= BigUint::from(start - t);
        }
        ways /= BigUint::from(j * s);
        total += &ways * le(m - s * j, s - 1);
    }
    total
}

fn build_float(k_max: usize) -> CycleTables {
    let mut prob_le: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
    prob_le.push(Vec::new());
    for m in 1..=k_max {
        let mut row = Vec::with_capacity(m);
        row.push(0.0);
        let mut running = Neumaier::default();
        for s in 1..m {
            running.add(float_pmf_entry(&prob_le, m, s));
            row.push(running.total().min(1.0));
        }
        prob_le.push(row);
    }
    CycleTables::Float { prob_le }
}

/// `Pr[L_m = s]` from the rows below `m`.
fn float_pmf_entry(prob_le: &[Vec<f64>], m: usize, s: usize) -> f64 {
    let le = |r: usize, t: usize| if t >= r { 1.0 } else { prob_le[r][t] };
    let mut acc = Neumaier::default();
    let mut weight = 1.0;
    for j in 1..=m / s {
        weight /= (j * s) as f64;
        if weight == 0.0 {
            break;
        }
        acc.add(weight * le(m - s * j, s - 1));
    }
    acc.total()
}

pub fn longest_cycle_distribution(k: usize, precision: Precision) -> Result<CycleLengthTable> {
    CycleTables::build(k, precision)?.table(k)
}

pub fn harmonic(m: usize) -> BigRational {
    (1..=m).fold(BigRational::zero(), |acc, i| acc + BigRational::new(BigInt::one(), BigInt::from(i)))
}

/// `sum_s Pr[L_k = s] (H_k - H_{s-1})`, with `H_0 = 0`.
pub fn alpha_from_exact_pmf(pmf: &[BigRational]) -> BigRational {
    let k = pmf.len();
    // tail[s] = H_k - H_{s-1} = 1/s + ... + 1/k, built from the top down
    let mut tail = BigRational::zero();
    let mut total = BigRational::zero();
    for s in (1..=k).rev() {
        tail += BigRational::new(BigInt::one(), BigInt::from(s));
        if !pmf[s - 1].is_zero() {
            total += &pmf[s - 1] * &tail;
        }
    }
    total
}

pub fn alpha_from_pmf(pmf: &[f64]) -> f64 {
    let k = pmf.len();
    let mut tail = Neumaier::default();
    let mut total = Neumaier::default();
    for s in (1..=k).rev() {
        tail.add(1.0 / s as f64);
        total.add(pmf[s - 1] * tail.total());
    }
    total.total()
}

/// `alpha_k`, computed exactly when `k <= RATIONAL_CAP`.
pub fn alpha(k: usize) -> Result<(f64, Option<BigRational>)> {
    let precision = if k <= RATIONAL_CAP { Precision::Rational } else { Precision::Float };
    CycleTables::build(k.max(1), precision)?.alpha(k)
}

pub fn predicted_fraction_from_alpha(alpha: f64) -> f64 {
    1.0 - (-1.0 / alpha).exp()
}

/// `1 - exp(-1/alpha_k)`.
pub fn predicted_fraction(k: usize) -> Result<f64> {
    Ok(predicted_fraction_from_alpha(alpha(k)?.0))
}

/// `E[L_k / k]` from the exact distribution (float recurrence beyond the rational cap).
pub fn golomb_dickman_estimate(k: usize) -> Result<f64> {
    let precision = if k <= RATIONAL_CAP { Precision::Rational } else { Precision::Float };
    let table = longest_cycle_distribution(k, precision)?;
    Ok(table.mean() / k as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRow {
    pub k: usize,
    pub alpha: f64,
    /// Exact value as `numerator/denominator` when computed in rational mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_exact: Option<String>,
    pub predicted_fraction: f64,
    pub mean_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaTable {
    pub precision: Precision,
    pub rows: Vec<AlphaRow>,
}

impl AlphaTable {
    pub fn build(k_max: usize, precision: Precision) -> Result<Self> {
        let tables = CycleTables::build(k_max, precision)?;
        let rows = (1..=k_max)
            .map(|k| {
                let table = tables.table(k)?;
                let (alpha, exact) = match &table.exact_pmf {
                    Some(p) => {
                        let a = alpha_from_exact_pmf(p);
                        (rational_to_f64(&a), Some(format!("{}/{}", a.numer(), a.denom())))
                    }
                    None => (alpha_from_pmf(&table.pmf), None),
                };
                Ok(AlphaRow {
                    k,
                    alpha,
                    alpha_exact: exact,
                    predicted_fraction: predicted_fraction_from_alpha(alpha),
                    mean_ratio: table.mean() / k as f64,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { precision, rows })
    }

    pub fn row(&self, k: usize) -> Option<&AlphaRow> {
        self.rows.get(k.checked_sub(1)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,alpha_k,predicted_fraction,mean_ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.k, r.alpha, r.predicted_fraction, r.mean_ratio));
        }
        out
    }

    /// `(alpha at the largest k, first-order Richardson extrapolate 2*alpha_K - alpha_{K/2})`.
    pub fn limit_estimate(&self) -> Option<(f64, f64)> {
        let k = self.rows.len();
        if k < 2 {
            return None;
        }
        let top = self.rows[k - 1].alpha;
        let half = self.rows[k / 2 - 1].alpha;
        let kh = (k / 2) as f64;
        let kk = k as f64;
        // alpha_k ~ alpha + c/k  =>  alpha ~ (K alpha_K - (K/2) alpha_{K/2}) / (K - K/2)
        Some((top, (kk * top - kh * half) / (kk - kh)))
    }
}

/// Empirical distribution of the largest block size after `k` steps of the
/// Chinese restaurant process.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalPmf {
    pub k: usize,
    pub trials: u64,
    /// `counts[s]` for `s = 0..=k` (slot 0 always zero).
    pub counts: Vec<u64>,
}

impl EmpiricalPmf {
    pub fn frequency(&self, s: usize) -> f64 {
        self.counts[s] as f64 / self.trials as f64
    }
}

/// Largest block after seating `k` customers: customer `j` opens a new table
/// with probability `1/j` and otherwise sits next to a uniformly chosen
/// earlier customer.
pub fn crp_largest_block<R: Rng>(k: usize, rng: &mut R) -> usize {
    let mut table_of = Vec::with_capacity(k);
    let mut sizes: Vec<usize> = Vec::new();
    for j in 1..=k {
        let r = rng.random_range(0..j);
        if r == j - 1 {
            table_of.push(sizes.len());
            sizes.push(1);
        } else {
            let t = table_of[r];
            table_of.push(t);
            sizes[t] += 1;
        }
    }
    sizes.into_iter().max().unwrap_or(0)
}

const SAMPLE_CHUNK: u64 = 4096;

/// Monte Carlo pmf of `L_k`; trial `t` uses its own seed `trial_seed(seed, t)`.
pub fn sample_longest_cycle(k: usize, trials: u64, seed: u64) -> Result<EmpiricalPmf> {
    if k < 1 || trials < 1 {
        return Err(invalid("k and trials must be at least 1"));
    }
    let chunks = trials.div_ceil(SAMPLE_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; k + 1];
            for t in c * SAMPLE_CHUNK..((c + 1) * SAMPLE_CHUNK).min(trials) {
                let mut rng = rng_from_seed(trial_seed(seed, t));
                counts[crp_largest_block(k, &mut rng)] += 1;
            }
            counts
        })
        .reduce(|| vec![0u64; k + 1], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        });
    Ok(EmpiricalPmf { k, trials, counts })
}

/// Indices `s` where the empirical count falls outside `expected ± z·σ`
/// (binomial σ).
pub fn binomial_outliers(empirical: &EmpiricalPmf, pmf: &[f64], z: f64) -> Vec<usize> {
    let n = empirical.trials as f64;
    (1..=empirical.k)
        .filter(|&s| {
            let p = pmf[s - 1];
            let expected = n * p;
            let sigma = (n * p * (1.0 - p)).sqrt();
            (empirical.counts[s] as f64 - expected).abs() > z * sigma + 1e-9
        })
        .collect()
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    // Scale so that numerator and denominator both fit comfortably in f64.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = 60 - (nb - db);
    let scaled = if shift >= 0 {
        (r.numer() << shift as usize) / r.denom()
    } else {
        r.numer() / (r.denom() << (-shift) as usize)
    };
    // two steps so that results in the subnormal range survive
    let first = (-shift / 2) as i32;
    let second = (-shift) as i32 - first;
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(first) * 2f64.powi(second)
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    xs.into_iter().for_each(|x| acc.add(x));
    acc.total()
}
