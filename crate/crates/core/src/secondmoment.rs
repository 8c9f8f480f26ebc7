//! Second moment of the number of increasing Hamiltonian paths.
//!
//! Paths here are vertex sequences, so every undirected path appears twice.
//! Ordered pairs `(A, B)` are grouped by intersection profile; a profile is
//! summarized by `(c, k, l)`: shared edges, shared segments, and segments of
//! a single edge.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclestats::rational_to_f64;
use crate::error::{invalid, Error, Result};

/// Largest `n` for [`exact_moments`] and [`profile_census`].
pub const MOMENT_CAP: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProfileSignature {
    pub c: usize,
    pub k: usize,
    pub l: usize,
}

impl ProfileSignature {
    pub fn new(c: usize, k: usize, l: usize) -> Self {
        Self { c, k, l }
    }

    /// Checks `l <= k <= c`, `k <= n - c`, `l >= 2k - c`, and that `k = 0`
    /// exactly when `c = 0`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let Self { c, k, l } = *self;
        let ok = n >= 2
            && c < n
            && l <= k
            && k <= c
            && k <= n - c
            && l + c >= 2 * k
            && (k == 0) == (c == 0);
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("signature (c={c}, k={k}, l={l}) is impossible for n = {n}")))
        }
    }

    /// Number of edges in the union of the two paths.
    pub fn union_edges(&self, n: usize) -> usize {
        2 * (n - 1) - self.c
    }
}

impl std::fmt::Display for ProfileSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.c, self.k, self.l)
    }
}

fn check_hamiltonian(seq: &[usize], n: usize, name: &str) -> Result<()> {
    let mut seen = vec![false; n];
    if seq.len() != n {
        return Err(invalid(format!("{name} has {} vertices, expected {n}", seq.len())));
    }
    for &v in seq {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(invalid(format!("{name} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// `matches[i] = Some(j)` when edge `i` of `A` is edge `j` of `B`.
fn match_edges(a: &[usize], b: &[usize]) -> Result<Vec<Option<usize>>> {
    let n = a.len();
    if n < 2 {
        return Err(invalid("paths need at least two vertices"));
    }
    check_hamiltonian(a, n, "A")?;
    check_hamiltonian(b, n, "B")?;
    let mut pos_b = vec![usize::MAX; n * n];
    for (j, w) in b.windows(2).enumerate() {
        pos_b[w[0] * n + w[1]] = j;
        pos_b[w[1] * n + w[0]] = j;
    }
    Ok(a.windows(2)
        .map(|w| Some(pos_b[w[0] * n + w[1]]).filter(|&j| j != usize::MAX))
        .collect())
}

fn signature_of(matches: &[Option<usize>]) -> ProfileSignature {
    let mut sig = ProfileSignature::new(0, 0, 0);
    for (shared, run) in &matches.iter().chunk_by(|m| m.is_some()) {
        if shared {
            let len = run.count();
            sig.c += len;
            sig.k += 1;
            sig.l += usize::from(len == 1);
        }
    }
    sig
}

/// Counts orders of the union edges that make both traversal chains increasing.
fn two_chain_extensions<T>(matches: &[Option<usize>], len_b: usize) -> T
where
    T: Zero + Clone + for<'a> std::ops::AddAssign<&'a T>,
    T: One,
{
    let len_a = matches.len();
    let mut b_shared = vec![false; len_b];
    for j in matches.iter().flatten() {
        b_shared[*j] = true;
    }
    let width = len_b + 1;
    let mut f = vec![T::zero(); (len_a + 1) * width];
    f[0] = T::one();
    for i in 0..=len_a {
        for j in 0..=len_b {
            let here = f[i * width + j].clone();
            if here.is_zero() {
                continue;
            }
            if i < len_a {
                match matches[i] {
                    None => f[(i + 1) * width + j] += &here,
                    Some(jj) if jj == j => f[(i + 1) * width + j + 1] += &here,
                    Some(_) => {}
                }
            }
            if j < len_b && !b_shared[j] {
                f[i * width + j + 1] += &here;
            }
        }
    }
    f[len_a * width + len_b].clone()
}

/// Intersection profile signature of two Hamiltonian vertex sequences.
pub fn classify_pair(a: &[usize], b: &[usize]) -> Result<ProfileSignature> {
    if a.len() != b.len() {
        return Err(invalid("A and B have different lengths"));
    }
    Ok(signature_of(&match_edges(a, b)?))
}

/// Number of label orders of the union edges under which both paths increase.
pub fn linear_extension_count(a: &[usize], b: &[usize]) -> Result<BigUint> {
    if a.len() != b.len() {
        return Err(invalid("A and B have different lengths"));
    }
    let matches = match_edges(a, b)?;
    Ok(two_chain_extensions(&matches, b.len() - 1))
}

/// Probability that both `A` and `B` are increasing under a uniform ordering.
pub fn pair_probability(a: &[usize], b: &[usize]) -> Result<BigRational> {
    let ext = linear_extension_count(a, b)?;
    let sig = classify_pair(a, b)?;
    Ok(BigRational::new(ext.into(), factorial(sig.union_edges(a.len())).into()))
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

fn check_moment_cap(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    if n > MOMENT_CAP {
        return Err(Error::Capacity(format!(
            "exact moment enumeration is limited to n <= {MOMENT_CAP}, got {n}"
        )));
    }
    Ok(())
}

/// Pair count and summed linear-extension count of one profile class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassTotals {
    pub pair_count: u64,
    pub mass: u64,
}

#[derive(Debug, Clone)]
pub struct MomentReport {
    pub n: usize,
    pub first_moment: BigRational,
    pub second_moment: BigRational,
    pub census: BTreeMap<ProfileSignature, ClassTotals>,
}

/// Exact rational as decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalText {
    pub numerator: String,
    pub denominator: String,
    pub value: f64,
}

impl From<&BigRational> for RationalText {
    fn from(r: &BigRational) -> Self {
        Self {
            numerator: r.numer().to_string(),
            denominator: r.denom().to_string(),
            value: rational_to_f64(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRow {
    pub c: usize,
    pub k: usize,
    pub l: usize,
    pub pair_count: u64,
    pub mass_numerator: u64,
    pub mass_denominator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSummary {
    pub n: usize,
    pub first_moment: RationalText,
    pub second_moment: RationalText,
    pub census: Vec<CensusRow>,
}

fn census_rows<'a>(n: usize, it: impl Iterator<Item = (&'a ProfileSignature, ClassTotals)>) -> Vec<CensusRow> {
    it.map(|(sig, t)| CensusRow {
        c: sig.c,
        k: sig.k,
        l: sig.l,
        pair_count: t.pair_count,
        mass_numerator: t.mass,
        mass_denominator: factorial(sig.union_edges(n)).to_string(),
    })
    .collect()
}

fn recombine<'a>(n: usize, it: impl Iterator<Item = (&'a ProfileSignature, u64)>) -> BigRational {
    it.fold(BigRational::zero(), |acc, (sig, mass)| {
        acc + BigRational::new(BigUint::from(mass).into(), factorial(sig.union_edges(n)).into())
    })
}

impl MomentReport {
    pub fn summary(&self) -> MomentSummary {
        MomentSummary {
            n: self.n,
            first_moment: (&self.first_moment).into(),
            second_moment: (&self.second_moment).into(),
            census: census_rows(self.n, self.census.iter().map(|(s, t)| (s, *t))),
        }
    }

    /// `E[H_n^2] / E[H_n]^2`.
    pub fn moment_ratio(&self) -> f64 {
        rational_to_f64(&(&self.second_moment / (&self.first_moment * &self.first_moment)))
    }
}

/// Exact `E[H_n]` and `E[H_n^2]`. `A` is fixed to the identity sequence and
/// every class total is multiplied by `n!`.
pub fn exact_moments(n: usize) -> Result<MomentReport> {
    check_moment_cap(n)?;
    let a: Vec<usize> = (0..n).collect();
    let mut census: BTreeMap<ProfileSignature, ClassTotals> = BTreeMap::new();
    for b in (0..n).permutations(n) {
        let matches = match_edges(&a, &b)?;
        let ext: u64 = two_chain_extensions(&matches, n - 1);
        let t = census.entry(signature_of(&matches)).or_default();
        t.pair_count += 1;
        t.mass += ext;
    }
    let sym = (2..=n as u64).product::<u64>();
    for t in census.values_mut() {
        t.pair_count *= sym;
        t.mass *= sym;
    }
    let first_moment = BigRational::new(factorial(n).into(), factorial(n - 1).into());
    let second_moment = recombine(n, census.iter().map(|(s, t)| (s, t.mass)));
    Ok(MomentReport { n, first_moment, second_moment, census })
}

/// Per-class results of the full census over all ordered pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CensusClass {
    pub pair_count: u64,
    /// Sum over pairs of the linear-extension count.
    pub mass: u64,
    /// Distinct unlabeled profiles met in this class.
    pub profile_count: u64,
    /// Labeled profiles: sum over distinct profiles of their extension count.
    pub labeled_profiles: u64,
    /// Largest number of pairs fitting one profile.
    pub max_profile_pairs: u64,
}

#[derive(Debug, Clone)]
pub struct ProfileCensus {
    pub n: usize,
    pub classes: BTreeMap<ProfileSignature, CensusClass>,
}

/// One class compared with the two upper bounds.
#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub signature: ProfileSignature,
    pub labeled_profiles: u64,
    pub labeled_bound: BigUint,
    pub max_profile_pairs: u64,
    pub embedding_bound: BigUint,
    pub mass: u64,
}

impl BoundCheck {
    pub fn labeled_ok(&self) -> bool {
        BigUint::from(self.labeled_profiles) <= self.labeled_bound
    }

    pub fn embedding_ok(&self) -> bool {
        BigUint::from(self.max_profile_pairs) <= self.embedding_bound
    }

    pub fn mass_ok(&self) -> bool {
        BigUint::from(self.mass) <= &self.labeled_bound * &self.embedding_bound
    }

    pub fn holds(&self) -> bool {
        self.labeled_ok() && self.embedding_ok() && self.mass_ok()
    }

    /// `max |P| / (n! (n-c-k)!)`.
    pub fn embedding_ratio(&self) -> f64 {
        self.max_profile_pairs as f64 / self.embedding_bound.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl ProfileCensus {
    pub fn total_pairs(&self) -> u64 {
        self.classes.values().map(|c| c.pair_count).sum()
    }

    /// `sum over classes of mass / (2n-c-2)!`.
    pub fn second_moment(&self) -> BigRational {
        recombine(self.n, self.classes.iter().map(|(s, c)| (s, c.mass)))
    }

    pub fn rows(&self) -> Vec<CensusRow> {
        census_rows(
            self.n,
            self.classes.iter().map(|(s, c)| (s, ClassTotals { pair_count: c.pair_count, mass: c.mass })),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,k,l,pair_count,mass_numerator,mass_denominator\n");
        for r in self.rows() {
            out += &format!("{},{},{},{},{},{}\n", r.c, r.k, r.l, r.pair_count, r.mass_numerator, r.mass_denominator);
        }
        out
    }

    pub fn bound_checks(&self) -> Vec<BoundCheck> {
        self.classes
            .iter()
            .map(|(sig, class)| BoundCheck {
                signature: *sig,
                labeled_profiles: class.labeled_profiles,
                labeled_bound: labeled_profile_bound(sig.c, sig.k, sig.l, self.n).expect("census signature is valid"),
                max_profile_pairs: class.max_profile_pairs,
                embedding_bound: embedding_bound(sig.c, sig.k, self.n).expect("census signature is valid"),
                mass: class.mass,
            })
            .collect()
    }

    /// Fraction of ordered pairs sharing no edge; tends to `e^-2`.
    pub fn disjoint_fraction(&self) -> f64 {
        let disjoint = self.classes.get(&ProfileSignature::new(0, 0, 0)).map_or(0, |c| c.pair_count);
        disjoint as f64 / self.total_pairs() as f64
    }
}

/// Profile key: byte `i` describes edge `i` of `A`. Bit 7 marks a shared
/// edge, bit 6 marks equal traversal direction, bits 0..6 hold its position in `B`.
fn profile_key(a: &[usize], pos_a: &[u8], b: &[usize]) -> u64 {
    let n = a.len();
    let mut key = 0u64;
    for (j, w) in b.windows(2).enumerate() {
        let i = pos_a[w[0] * n + w[1]];
        if i != u8::MAX {
            let same = u64::from(a[i as usize] == w[0]);
            key |= (0x80 | same << 6 | j as u64) << (8 * i as u32);
        }
    }
    key
}

fn key_matches(key: u64, n: usize) -> Vec<Option<usize>> {
    (0..n - 1)
        .map(|i| {
            let byte = (key >> (8 * i)) & 0xff;
            (byte & 0x80 != 0).then_some((byte & 0x3f) as usize)
        })
        .collect()
}

/// Classifies all `(n!)^2` ordered pairs of Hamiltonian vertex sequences.
pub fn profile_census(n: usize) -> Result<ProfileCensus> {
    check_moment_cap(n)?;
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let per_key = perms
        .par_iter()
        .fold(HashMap::<u64, u64>::new, |mut acc, a| {
            let mut pos_a = vec![u8::MAX; n * n];
            for (i, w) in a.windows(2).enumerate() {
                pos_a[w[0] * n + w[1]] = i as u8;
                pos_a[w[1] * n + w[0]] = i as u8;
            }
            for b in &perms {
                *acc.entry(profile_key(a, &pos_a, b)).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut x, y| {
            for (key, count) in y {
                *x.entry(key).or_default() += count;
            }
            x
        });
    let mut classes: BTreeMap<ProfileSignature, CensusClass> = BTreeMap::new();
    for (key, pairs) in per_key.into_iter().sorted() {
        let matches = key_matches(key, n);
        let ext: u64 = two_chain_extensions(&matches, n - 1);
        let class = classes.entry(signature_of(&matches)).or_default();
        class.pair_count += pairs;
        class.mass += pairs * ext;
        class.profile_count += 1;
        class.labeled_profiles += ext;
        class.max_profile_pairs = class.max_profile_pairs.max(pairs);
    }
    Ok(ProfileCensus { n, classes })
}

/// Compositions of `c - l` into `k - l` parts of size at least 2, i.e.
/// `C(c-k-1, k-l-1)` when `k > l`, and 1 for the empty composition `k = l = c`.
pub fn composition_factor(c: usize, k: usize, l: usize) -> BigUint {
    if k > l {
        if c + l < 2 * k {
            return BigUint::zero();
        }
        binomial(BigUint::from(c - k - 1), BigUint::from(k - l - 1))
    } else if k == l && c == l {
        BigUint::one()
    } else {
        BigUint::zero()
    }
}

/// `(a+b+c)! / (a! b! c!)`.
pub fn multinomial3(a: usize, b: usize, c: usize) -> BigUint {
    binomial(BigUint::from(a + b + c), BigUint::from(c)) * binomial(BigUint::from(a + b), BigUint::from(b))
}

/// `2^l C(k,l) C(c-k-1, k-l-1) multinomial(2(n-c-1)+k; n-c-1, n-c-1, k)`.
pub fn labeled_profile_bound(c: usize, k: usize, l: usize, n: usize) -> Result<BigUint> {
    ProfileSignature::new(c, k, l).validate(n)?;
    let m = n - c - 1;
    Ok((BigUint::one() << l) * binomial(BigUint::from(k), BigUint::from(l)) * composition_factor(c, k, l) * multinomial3(m, m, k))
}

/// `2^k C(c-1, k-1) multinomial(2(n-c-1)+k; n-c-1, n-c-1, k)`, bounding the
/// sum of [`labeled_profile_bound`] over `l`.
pub fn aggregated_profile_bound(c: usize, k: usize, n: usize) -> Result<BigUint> {
    if n < 2 || c >= n || k > c || k > n - c || (k == 0) != (c == 0) {
        return Err(invalid(format!("no profile has c = {c}, k = {k} at n = {n}")));
    }
    let m = n - c - 1;
    let comp = if c == 0 { BigUint::one() } else { binomial(BigUint::from(c - 1), BigUint::from(k - 1)) };
    Ok((BigUint::one() << k) * comp * multinomial3(m, m, k))
}

/// `n! (n-c-k)!`.
pub fn embedding_bound(c: usize, k: usize, n: usize) -> Result<BigUint> {
    if c >= n || k > c || c + k > n {
        return Err(invalid(format!("embedding bound needs c <= n-1 and k <= min(c, n-c); got n={n}, c={c}, k={k}")));
    }
    Ok(factorial(n) * factorial(n - c - k))
}

/// Evaluated right-hand sides of the three-way split of the second moment.
#[derive(Debug, Clone)]
pub struct SSums {
    pub n: usize,
    /// Largest `c` in the first part: `floor(ln n)`.
    pub small_c_max: usize,
    /// Largest `c` in the second part: `floor(9n/10)`.
    pub middle_c_max: usize,
    /// First part without the `e^-2` factor.
    pub s1_rational: BigRational,
    pub s2_bound: BigRational,
    pub s3_bound: BigRational,
}

impl SSums {
    pub fn s1_value(&self) -> f64 {
        (-2.0f64).exp() * rational_to_f64(&self.s1_rational)
    }

    pub fn s2_value(&self) -> f64 {
        rational_to_f64(&self.s2_bound)
    }

    pub fn s3_value(&self) -> f64 {
        rational_to_f64(&self.s3_bound)
    }
}

/// Sums `weight(c, k) * multinomial(2m+k; m, m, k) * n! (n-c-k)! / (2n-c-2)!`
/// over `c` in `cs` and all admissible `k`, where `m = n - c - 1`.
fn split_sum(n: usize, cs: std::ops::RangeInclusive<usize>, weight: impl Fn(usize, usize) -> BigUint) -> BigRational {
    let mut fact = vec![BigUint::one()];
    for i in 1..=2 * n {
        let next = &fact[i - 1] * BigUint::from(i);
        fact.push(next);
    }
    // (2n-2)! / (2n-c-2)! for each c
    let mut falling = vec![BigUint::one()];
    for c in 1..n {
        let next = &falling[c - 1] * BigUint::from(2 * n - 1 - c);
        falling.push(next);
    }
    let mut total = BigUint::zero();
    for c in cs {
        let m = n - c - 1;
        let k_range = if c == 0 { 0..=0 } else { 1..=c.min(n - c) };
        let mut inner = BigUint::zero();
        for k in k_range {
            let w = weight(c, k);
            if w.is_zero() {
                continue;
            }
            let shuffle = binomial(BigUint::from(2 * m + k), BigUint::from(k));
            inner += w * shuffle * &fact[n - c - k];
        }
        total += inner * binomial(BigUint::from(2 * m), BigUint::from(m)) * &falling[c];
    }
    BigRational::new((total * &fact[n]).into(), fact[2 * n - 2].clone().into())
}

/// The three parts split at `c <= floor(ln n)` and `c <= floor(9n/10)`.
pub fn s_sum_bounds(n: usize) -> Result<SSums> {
    if n < 10 {
        return Err(invalid(format!("the split sums need n >= 10, got {n}")));
    }
    let small_c_max = (n as f64).ln().floor() as usize;
    let middle_c_max = 9 * n / 10;
    let labeled = |c: usize, k: usize| {
        (0..=k)
            .map(|l| (BigUint::one() << l) * binomial(BigUint::from(k), BigUint::from(l)) * composition_factor(c, k, l))
            .sum::<BigUint>()
    };
    let aggregated = |c: usize, k: usize| (BigUint::one() << k) * binomial(BigUint::from(c - 1), BigUint::from(k - 1));
    Ok(SSums {
        n,
        small_c_max,
        middle_c_max,
        s1_rational: split_sum(n, 0..=small_c_max, labeled),
        s2_bound: split_sum(n, small_c_max + 1..=middle_c_max, aggregated),
        s3_bound: split_sum(n, middle_c_max + 1..=n - 1, aggregated),
    })
}

/// `sum_{c <= c_max} sum_{k,l} C(k,l) C(c-k-1, k-l-1) 2^(l-c+k) / k!`, exactly.
pub fn constant_c_partial(c_max: usize) -> BigRational {
    // Pascal rows 0..=c_max for the binomials.
    let mut pascal: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
    for r in 1..=c_max {
        let prev = &pascal[r - 1];
        let row = (0..=r)
            .map(|j| match (j, j == r) {
                (0, _) | (_, true) => BigUint::one(),
                _ => &prev[j - 1] + &prev[j],
            })
            .collect();
        pascal.push(row);
    }
    let comp = |c: usize, k: usize, l: usize| -> BigUint {
        if k > l {
            if c + l < 2 * k {
                BigUint::zero()
            } else {
                pascal[c - k - 1][k - l - 1].clone()
            }
        } else {
            BigUint::from(u8::from(k == l && c == l))
        }
    };
    // Everything over the common denominator c_max! 2^c_max.
    let mut numerator = BigUint::zero();
    let mut fall = BigUint::one(); // c_max! / k!
    for k in (0..=c_max).rev() {
        let mut inner = BigUint::zero();
        for l in 0..=k {
            let mut over_c = BigUint::zero();
            for c in 2 * k - l..=c_max {
                over_c += comp(c, k, l) << (c_max - c);
            }
            inner += (&pascal[k][l] * over_c) << (l + k);
        }
        numerator += inner * &fall;
        fall *= BigUint::from(k.max(1));
    }
    BigRational::new(numerator.into(), (factorial(c_max) << c_max).into())
}

/// Decimal expansion of a nonnegative rational, truncated to `digits` places.
pub fn to_decimal(r: &BigRational, digits: usize) -> String {
    let scaled = (r * BigRational::from_integer(num_bigint::BigInt::from(10u32).pow(digits as u32))).floor();
    let s = scaled.to_integer().to_string();
    if digits == 0 {
        return s;
    }
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{int}.{frac}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    const FIG_A: [usize; 9] = [0, 1, 2, 3, 4, 5, 6, 7, 8];
    const FIG_B: [usize; 9] = [8, 5, 1, 2, 3, 0, 7, 6, 4];

    #[test]
    fn classify_examples() {
        let a: Vec<usize> = (0..6).collect();
        assert_eq!(classify_pair(&a, &a).unwrap(), ProfileSignature::new(5, 1, 0));
        let rev: Vec<usize> = a.iter().rev().copied().collect();
        assert_eq!(classify_pair(&a, &rev).unwrap(), ProfileSignature::new(5, 1, 0));
        assert_eq!(classify_pair(&[0, 1, 2, 3], &[2, 0, 3, 1]).unwrap(), ProfileSignature::new(0, 0, 0));
        assert_eq!(classify_pair(&FIG_A, &FIG_B).unwrap(), ProfileSignature::new(3, 2, 1));
    }

    #[test]
    fn classify_rejects_bad_input() {
        assert!(classify_pair(&[0, 1, 1], &[0, 1, 2]).is_err());
        assert!(classify_pair(&[0, 1, 2], &[0, 1]).is_err());
        assert!(classify_pair(&[0, 1, 3], &[0, 1, 2]).is_err());
        assert!(pair_probability(&[0], &[0]).is_err());
    }

    #[test]
    fn pair_probability_examples() {
        let a = [0, 1, 2, 3];
        assert_eq!(pair_probability(&a, &a).unwrap(), rat(1, 6));
        assert_eq!(pair_probability(&a, &[2, 0, 3, 1]).unwrap(), rat(1, 36));
        // shared segment 1-2-3 traversed backwards by B
        assert!(pair_probability(&a, &[3, 2, 1, 0]).unwrap().is_zero());
        assert!(pair_probability(&[0, 1, 2, 3, 4], &[4, 3, 2, 0, 1]).unwrap().is_zero());
    }

    /// Counts orders of the union edges directly.
    fn brute_pair_probability(a: &[usize], b: &[usize]) -> BigRational {
        let key = |w: &[usize]| (w[0].min(w[1]), w[0].max(w[1]));
        let ea: Vec<_> = a.windows(2).map(key).collect();
        let eb: Vec<_> = b.windows(2).map(key).collect();
        let union: Vec<_> = ea.iter().chain(eb.iter()).copied().unique().collect();
        let m = union.len();
        let mut good = 0i64;
        let mut total = 0i64;
        for perm in (0..m).permutations(m) {
            total += 1;
            let label = |e: &(usize, usize)| perm[union.iter().position(|x| x == e).unwrap()];
            let inc = |es: &[(usize, usize)]| es.windows(2).all(|w| label(&w[0]) < label(&w[1]));
            if inc(&ea) && inc(&eb) {
                good += 1;
            }
        }
        rat(good, total)
    }

    #[test]
    fn pair_probability_matches_direct_count() {
        let a = [0, 1, 2, 3];
        for b in (0..4).permutations(4) {
            assert_eq!(pair_probability(&a, &b).unwrap(), brute_pair_probability(&a, &b), "{b:?}");
        }
        for b in (0..5).permutations(5).step_by(7) {
            let a5 = [0, 1, 2, 3, 4];
            assert_eq!(pair_probability(&a5, &b).unwrap(), brute_pair_probability(&a5, &b), "{b:?}");
        }
    }

    #[test]
    fn two_vertex_moments() {
        let r = exact_moments(2).unwrap();
        assert_eq!(r.first_moment, rat(2, 1));
        assert_eq!(r.second_moment, rat(4, 1));
    }

    #[test]
    fn moments_basic_properties() {
        for n in 3..=6 {
            let r = exact_moments(n).unwrap();
            assert_eq!(r.first_moment, rat(n as i64, 1));
            assert!(r.second_moment >= rat((n * n) as i64, 1));
            let pairs: u64 = r.census.values().map(|t| t.pair_count).sum();
            assert_eq!(pairs, factorial(n).to_u64().unwrap().pow(2));
        }
    }

    #[test]
    fn moments_cap() {
        assert!(matches!(exact_moments(8), Err(Error::Capacity(_))));
        assert!(matches!(profile_census(8), Err(Error::Capacity(_))));
        assert!(exact_moments(1).is_err());
    }

    #[test]
    fn census_completeness_and_recombination() {
        for n in 3..=5 {
            let census = profile_census(n).unwrap();
            let fact = factorial(n).to_u64().unwrap();
            assert_eq!(census.total_pairs(), fact * fact);
            let moments = exact_moments(n).unwrap();
            assert_eq!(census.second_moment(), moments.second_moment);
            for (sig, class) in &census.classes {
                let t = moments.census[sig];
                assert_eq!((class.pair_count, class.mass), (t.pair_count, t.mass), "{sig}");
            }
        }
    }

    #[test]
    fn full_overlap_class() {
        let n = 5;
        let census = profile_census(n).unwrap();
        let full = &census.classes[&ProfileSignature::new(n - 1, 1, 0)];
        // B = A and B = reverse(A); only the first has increasing orders.
        assert_eq!(full.pair_count, 2 * 120);
        assert_eq!(full.mass, 120);
        assert_eq!(full.profile_count, 2);
    }

    #[test]
    fn census_signatures_valid() {
        let census = profile_census(6).unwrap();
        for sig in census.classes.keys() {
            sig.validate(6).unwrap();
        }
    }

    #[test]
    fn bounds_hold_at_six() {
        let census = profile_census(6).unwrap();
        for check in census.bound_checks() {
            assert!(check.labeled_ok(), "{}: {} > {}", check.signature, check.labeled_profiles, check.labeled_bound);
            assert!(check.embedding_ok(), "{}", check.signature);
            assert!(check.mass_ok(), "{}", check.signature);
        }
    }

    #[test]
    fn census_csv_layout() {
        let csv = profile_census(3).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("c,k,l,pair_count,mass_numerator,mass_denominator"));
        assert!(lines.all(|l| l.split(',').count() == 6));
    }

    #[test]
    fn composition_conventions() {
        assert_eq!(composition_factor(2, 1, 0), BigUint::one());
        assert_eq!(composition_factor(1, 1, 1), BigUint::one());
        assert_eq!(composition_factor(0, 0, 0), BigUint::one());
        assert_eq!(composition_factor(2, 1, 1), BigUint::zero());
        assert_eq!(composition_factor(3, 2, 0), BigUint::zero());
        assert_eq!(composition_factor(7, 3, 1), BigUint::from(3u32));
    }

    /// Compositions counted by recursion over the first part.
    fn compositions_at_least_two(total: usize, parts: usize) -> u64 {
        if parts == 0 {
            return u64::from(total == 0);
        }
        (2..=total).map(|first| compositions_at_least_two(total - first, parts - 1)).sum()
    }

    #[test]
    fn composition_factor_counts_compositions() {
        for c in 0..=12 {
            for k in 0..=c {
                for l in 0..=k {
                    let expect = compositions_at_least_two(c - l, k - l);
                    assert_eq!(composition_factor(c, k, l), BigUint::from(expect), "({c},{k},{l})");
                }
            }
        }
    }

    #[test]
    fn aggregated_identity() {
        for c in 1..=12 {
            for k in 1..=c {
                let plain: BigUint =
                    (0..=k).map(|l| binomial(BigUint::from(k), BigUint::from(l)) * composition_factor(c, k, l)).sum();
                assert_eq!(plain, binomial(BigUint::from(c - 1), BigUint::from(k - 1)), "({c},{k})");
                let n = 2 * c + 2;
                let summed: BigUint =
                    (0..=k).filter_map(|l| labeled_profile_bound(c, k, l, n).ok()).sum();
                assert!(summed <= aggregated_profile_bound(c, k, n).unwrap());
            }
        }
    }

    #[test]
    fn bound_formula_values() {
        assert_eq!(embedding_bound(0, 0, 5).unwrap(), BigUint::from(14400u32));
        assert_eq!(embedding_bound(2, 1, 5).unwrap(), BigUint::from(240u32));
        assert!(embedding_bound(5, 1, 5).is_err());
        // m = 2, k = 1: 2 * 1 * 1 * 5!/(2! 2! 1!) = 60
        assert_eq!(labeled_profile_bound(1, 1, 1, 4).unwrap(), BigUint::from(60u32));
        assert!(labeled_profile_bound(2, 2, 0, 6).is_err());
        assert!(labeled_profile_bound(1, 0, 0, 6).is_err());
    }

    #[test]
    fn s_sums_shape() {
        assert!(s_sum_bounds(9).is_err());
        let s = s_sum_bounds(50).unwrap();
        assert_eq!((s.small_c_max, s.middle_c_max), (3, 45));
        assert!(s.s1_value() > 0.0 && s.s2_value() >= 0.0 && s.s3_value() >= 0.0);
    }

    /// The split sums term by term with plain rational arithmetic.
    fn naive_split(n: usize, cs: std::ops::RangeInclusive<usize>, with_l: bool) -> BigRational {
        let mut total = BigRational::zero();
        for c in cs {
            let ks: Vec<usize> = if c == 0 { vec![0] } else { (1..=c.min(n - c)).collect() };
            for k in ks {
                let count: BigUint = if with_l {
                    (0..=k).filter_map(|l| labeled_profile_bound(c, k, l, n).ok()).sum()
                } else {
                    aggregated_profile_bound(c, k, n).unwrap()
                };
                let emb = embedding_bound(c, k, n).unwrap();
                total += BigRational::new((count * emb).into(), factorial(2 * n - c - 2).into());
            }
        }
        total
    }

    #[test]
    fn split_sums_match_naive_evaluation() {
        for n in [10, 23, 50] {
            let s = s_sum_bounds(n).unwrap();
            assert_eq!(s.s1_rational, naive_split(n, 0..=s.small_c_max, true));
            assert_eq!(s.s2_bound, naive_split(n, s.small_c_max + 1..=s.middle_c_max, false));
            assert_eq!(s.s3_bound, naive_split(n, s.middle_c_max + 1..=n - 1, false));
        }
    }

    #[test]
    fn s1_against_e_n_squared() {
        let ratios: Vec<f64> = [100, 200, 400]
            .iter()
            .map(|&n| s_sum_bounds(n).unwrap().s1_value() / (std::f64::consts::E * (n * n) as f64))
            .collect();
        assert!(ratios.iter().all(|r| (0.5..=2.0).contains(r)), "{ratios:?}");
        // 200 and 400 share the cutoff c <= 5, so only the endpoints are compared.
        assert!((ratios[2] - 1.0).abs() < (ratios[0] - 1.0).abs(), "{ratios:?}");
    }

    /// `sum_{j <= terms} 3^j / j!`, with remainder below `3^(terms+1)/(terms+1)! * 2`.
    fn e_cubed(terms: u32) -> BigRational {
        (0..=terms).fold(BigRational::zero(), |acc, j| {
            acc + BigRational::new(BigInt::from(3).pow(j), BigInt::from(factorial(j as usize)))
        })
    }

    #[test]
    fn constant_partial_sums() {
        assert_eq!(constant_c_partial(0), rat(1, 1));
        assert_eq!(constant_c_partial(1), rat(3, 1));
        assert_eq!(constant_c_partial(2), rat(11, 2));
        let mut prev = BigRational::zero();
        for c in 0..30 {
            let cur = constant_c_partial(c);
            assert!(cur >= prev);
            prev = cur;
        }
        let diff = (e_cubed(60) - constant_c_partial(80)).abs();
        assert!(diff < rat(1, 1_000_000));
        assert!(to_decimal(&constant_c_partial(80), 6).starts_with("20.085536"));
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(to_decimal(&rat(1, 3), 5), "0.33333");
        assert_eq!(to_decimal(&rat(41, 2), 2), "20.50");
        assert_eq!(to_decimal(&rat(7, 1), 0), "7");
        assert_eq!(to_decimal(&rat(1, 400), 3), "0.002");
    }

    proptest! {
        #[test]
        fn classify_invariant_under_relabeling(
            a in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle(),
            b in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle(),
            sigma in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let ra: Vec<usize> = a.iter().map(|&v| sigma[v]).collect();
            let rb: Vec<usize> = b.iter().map(|&v| sigma[v]).collect();
            prop_assert_eq!(classify_pair(&a, &b).unwrap(), classify_pair(&ra, &rb).unwrap());
            prop_assert_eq!(pair_probability(&a, &b).unwrap(), pair_probability(&ra, &rb).unwrap());
        }

        #[test]
        fn pair_probability_symmetric(
            a in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle(),
            b in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            prop_assert_eq!(pair_probability(&a, &b).unwrap(), pair_probability(&b, &a).unwrap());
            prop_assert_eq!(pair_probability(&a, &a).unwrap(), BigRational::new(1.into(), factorial(7).into()));
            let sig = classify_pair(&a, &b).unwrap();
            prop_assert!(sig.validate(8).is_ok());
            prop_assert_eq!(sig, classify_pair(&b, &a).unwrap());
        }
    }
}
