//! Edge orderings of the complete graph `K_n` and the walk/path types that
//! are checked against them.
//!
//! Edges are identified by their rank in the lexicographic order of the pairs
//! `(min, max)`; see [`edge_index`]. An [`EdgeOrdering`] stores one label per
//! edge in that order, either as a permutation of `1..=N` (with
//! `N = n(n-1)/2`) or as distinct reals in `(0, 1)`. Only the relative order
//! of labels matters to every algorithm in this crate.

use std::cmp::Ordering as CmpOrdering;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::distr::Open01;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::rng_from_seed;

/// Number of edges of `K_n`.
pub const fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic rank of the unordered pair `{u, v}` among all pairs of `0..n`.
pub fn edge_index(u: usize, v: usize, n: usize) -> Result<usize> {
    if u >= n || v >= n {
        return Err(invalid(format!("vertex out of range: ({u}, {v}) with n = {n}")));
    }
    if u == v {
        return Err(invalid(format!("loop edge ({u}, {u})")));
    }
    Ok(edge_index_unchecked(u, v, n))
}

#[inline]
pub(crate) fn edge_index_unchecked(u: usize, v: usize, n: usize) -> usize {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    // Pairs starting with 0..a come first: a(n-1) - a(a-1)/2 of them.
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Inverse of [`edge_index`].
pub fn edge_endpoints(index: usize, n: usize) -> Result<(usize, usize)> {
    if index >= edge_count(n) {
        return Err(invalid(format!("edge index {index} out of range for n = {n}")));
    }
    let mut a = 0;
    let mut start = 0;
    loop {
        let row = n - a - 1;
        if index < start + row {
            return Ok((a, a + 1 + index - start));
        }
        start += row;
        a += 1;
    }
}

/// Endpoints of every edge, indexed by [`edge_index`].
pub fn edge_table(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(edge_count(n));
    for a in 0..n {
        for b in a + 1..n {
            out.push((a, b));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelModel {
    /// Labels are a bijection onto `1..=n(n-1)/2`.
    #[serde(rename = "perm")]
    Permutation,
    /// Labels are distinct reals in `(0, 1)`.
    Real,
}

impl fmt::Display for LabelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LabelModel::Permutation => "perm",
            LabelModel::Real => "real",
        })
    }
}

impl FromStr for LabelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perm" | "permutation" => Ok(LabelModel::Permutation),
            "real" => Ok(LabelModel::Real),
            other => Err(invalid(format!("unknown label model '{other}'"))),
        }
    }
}

/// A label value that algorithms can compare. Implemented for the integer
/// labels of the permutation model and the reals of the real model.
pub trait Label: Copy + PartialOrd + Send + Sync + fmt::Debug + 'static {
    fn to_f64(self) -> f64;
}

impl Label for u32 {
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Label for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    Permutation(Vec<u32>),
    Real(Vec<f64>),
}

/// Runs `$body` with `$labels` bound to the label slice of `$ord`, once per
/// label type, so generic code is monomorphized for both models.
#[macro_export]
macro_rules! with_labels {
    ($ord:expr, $labels:ident => $body:expr) => {
        match $ord.labels() {
            $crate::ordering::Labels::Permutation($labels) => {
                let $labels: &[u32] = $labels.as_slice();
                $body
            }
            $crate::ordering::Labels::Real($labels) => {
                let $labels: &[f64] = $labels.as_slice();
                $body
            }
        }
    };
}

/// A labeling of the edges of `K_n` inducing a strict total order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeOrdering {
    n: usize,
    labels: Labels,
    seed: Option<u64>,
}

impl EdgeOrdering {
    /// Permutation-model ordering from explicit labels (indexed by edge index).
    pub fn from_permutation(n: usize, labels: Vec<u32>) -> Result<Self> {
        check_n(n)?;
        let m = edge_count(n);
        if labels.len() != m {
            return Err(invalid(format!("expected {m} labels for n = {n}, got {}", labels.len())));
        }
        let mut seen = vec![false; m];
        for &l in &labels {
            let l = l as usize;
            if l == 0 || l > m || seen[l - 1] {
                return Err(invalid(format!("labels are not a bijection onto 1..={m}")));
            }
            seen[l - 1] = true;
        }
        Ok(Self { n, labels: Labels::Permutation(labels), seed: None })
    }

    /// Real-model ordering. Labels must lie in `(0, 1)`; exact ties are broken
    /// by nudging the label of the higher edge index upward one ulp at a time.
    pub fn from_real(n: usize, mut labels: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        let m = edge_count(n);
        if labels.len() != m {
            return Err(invalid(format!("expected {m} labels for n = {n}, got {}", labels.len())));
        }
        if let Some(bad) = labels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(invalid(format!("real label {bad} outside (0, 1)")));
        }
        break_ties(&mut labels);
        Ok(Self { n, labels: Labels::Real(labels), seed: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        edge_count(self.n)
    }

    pub fn model(&self) -> LabelModel {
        match self.labels {
            Labels::Permutation(_) => LabelModel::Permutation,
            Labels::Real(_) => LabelModel::Real,
        }
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    /// Seed the ordering was sampled from, if it was sampled.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Label of edge `{u, v}` as a float (integer labels are widened).
    pub fn label(&self, u: usize, v: usize) -> f64 {
        let e = edge_index_unchecked(u, v, self.n);
        match &self.labels {
            Labels::Permutation(l) => f64::from(l[e]),
            Labels::Real(l) => l[e],
        }
    }

    pub fn compare_edges(&self, e: usize, g: usize) -> CmpOrdering {
        match &self.labels {
            Labels::Permutation(l) => l[e].cmp(&l[g]),
            Labels::Real(l) => l[e].total_cmp(&l[g]),
        }
    }

    /// Edge indices sorted by ascending label.
    pub fn edges_by_label(&self) -> Vec<usize> {
        match &self.labels {
            Labels::Permutation(l) => {
                let mut out = vec![0; l.len()];
                for (e, &lab) in l.iter().enumerate() {
                    out[lab as usize - 1] = e;
                }
                out
            }
            Labels::Real(l) => {
                let mut out: Vec<usize> = (0..l.len()).collect();
                out.sort_unstable_by(|&a, &b| l[a].total_cmp(&l[b]));
                out
            }
        }
    }

    /// The permutation-model ordering inducing the same edge order.
    pub fn to_permutation(&self) -> EdgeOrdering {
        let mut ranks = vec![0u32; self.edge_count()];
        for (r, e) in self.edges_by_label().into_iter().enumerate() {
            ranks[e] = r as u32 + 1;
        }
        EdgeOrdering { n: self.n, labels: Labels::Permutation(ranks), seed: self.seed }
    }

    /// True iff the labels along `walk` strictly increase.
    pub fn is_increasing(&self, walk: &VertexWalk) -> bool {
        assert_eq!(walk.n(), self.n, "walk and ordering disagree on n");
        with_labels!(self, labels => is_increasing_in(labels, self.n, walk.vertices()))
    }

    /// Serializes to the line-oriented text format (`n <n> <model>` header,
    /// then `<u> <v> <label>` per edge in edge-index order).
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.edge_count() * 24 + 16);
        writeln!(out, "n {} {}", self.n, self.model()).unwrap();
        for (e, (u, v)) in edge_table(self.n).into_iter().enumerate() {
            match &self.labels {
                Labels::Permutation(l) => writeln!(out, "{u} {v} {}", l[e]).unwrap(),
                Labels::Real(l) => writeln!(out, "{u} {v} {}", format_sig17(l[e])).unwrap(),
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty input".into() })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let perr = |line: usize, message: String| Error::Parse { line: line + 1, message };
        if parts.len() != 3 || parts[0] != "n" {
            return Err(perr(0, format!("bad header '{header}'")));
        }
        let n: usize = parts[1].parse().map_err(|_| perr(0, format!("bad vertex count '{}'", parts[1])))?;
        let model: LabelModel = parts[2].parse().map_err(|e: Error| perr(0, e.to_string()))?;
        check_n(n).map_err(|e| perr(0, e.to_string()))?;
        let table = edge_table(n);
        let mut perm = Vec::new();
        let mut real = Vec::new();
        let mut count = 0;
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(perr(lineno, format!("expected '<u> <v> <label>', got '{line}'")));
            }
            let u: usize = fields[0].parse().map_err(|_| perr(lineno, "bad vertex".into()))?;
            let v: usize = fields[1].parse().map_err(|_| perr(lineno, "bad vertex".into()))?;
            if count >= table.len() || table[count] != (u, v) {
                return Err(perr(lineno, format!("edge ({u}, {v}) out of canonical order")));
            }
            match model {
                LabelModel::Permutation => {
                    perm.push(fields[2].parse::<u32>().map_err(|_| perr(lineno, "bad integer label".into()))?)
                }
                LabelModel::Real => {
                    real.push(fields[2].parse::<f64>().map_err(|_| perr(lineno, "bad real label".into()))?)
                }
            }
            count += 1;
        }
        if count != table.len() {
            return Err(Error::Parse { line: count + 2, message: format!("expected {} edges, got {count}", table.len()) });
        }
        match model {
            LabelModel::Permutation => Self::from_permutation(n, perm),
            LabelModel::Real => {
                let mut sorted = real.clone();
                sorted.sort_by(f64::total_cmp);
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(invalid("duplicate real labels in ordering file"));
                }
                Self::from_real(n, real)
            }
        }
    }
}

/// Samples an ordering: a uniform bijection (permutation model) or i.i.d.
/// `Uniform(0, 1)` labels (real model). Deterministic in `(n, seed, model)`.
pub fn random_ordering(n: usize, seed: u64, model: LabelModel) -> Result<EdgeOrdering> {
    check_n(n)?;
    let m = edge_count(n);
    let mut rng = rng_from_seed(seed);
    let labels = match model {
        LabelModel::Permutation => {
            let mut l: Vec<u32> = (1..=m as u32).collect();
            l.shuffle(&mut rng);
            Labels::Permutation(l)
        }
        LabelModel::Real => {
            let mut l: Vec<f64> = (0..m).map(|_| rng.sample(Open01)).collect();
            break_ties(&mut l);
            Labels::Real(l)
        }
    };
    Ok(EdgeOrdering { n, labels, seed: Some(seed) })
}

/// The round-robin 1-factorization ordering: matching `i` of the circle
/// schedule receives the consecutive labels `i*n/2 + 1 ..= (i+1)*n/2`, in
/// ascending edge-index order within the matching.
pub fn matching_ordering(n: usize) -> Result<EdgeOrdering> {
    check_n(n)?;
    if n % 2 != 0 {
        return Err(invalid(format!("matching ordering needs even n, got {n}")));
    }
    let half = n / 2;
    let mut labels = vec![0u32; edge_count(n)];
    for (round, matching) in round_robin_matchings(n).into_iter().enumerate() {
        let mut edges: Vec<usize> = matching.iter().map(|&(u, v)| edge_index_unchecked(u, v, n)).collect();
        edges.sort_unstable();
        for (j, e) in edges.into_iter().enumerate() {
            labels[e] = (round * half + j + 1) as u32;
        }
    }
    EdgeOrdering::from_permutation(n, labels)
}

/// Circle-method schedule: vertex `n-1` stays fixed while `0..n-1` rotate.
pub fn round_robin_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    debug_assert!(n >= 2 && n % 2 == 0);
    let m = n - 1;
    (0..m)
        .map(|r| {
            let mut round = vec![(r.min(n - 1), r.max(n - 1))];
            for i in 1..n / 2 {
                let a = (r + i) % m;
                let b = (r + m - i) % m;
                round.push((a.min(b), a.max(b)));
            }
            round
        })
        .collect()
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("need at least 2 vertices, got {n}")));
    }
    if edge_count(n) > u32::MAX as usize {
        return Err(Error::Capacity(format!("n = {n} has too many edges for 32-bit labels")));
    }
    Ok(())
}

pub(crate) fn is_increasing_in<L: Label>(labels: &[L], n: usize, vertices: &[usize]) -> bool {
    let mut prev: Option<L> = None;
    for w in vertices.windows(2) {
        let lab = labels[edge_index_unchecked(w[0], w[1], n)];
        if let Some(p) = prev {
            if !(lab > p) {
                return false;
            }
        }
        prev = Some(lab);
    }
    true
}

fn break_ties(labels: &mut [f64]) {
    // Labels are positive, so bit patterns compare like values. The cheap
    // duplicate scan avoids the indirect sort in the (usual) tie-free case.
    let mut bits: Vec<u64> = labels.iter().map(|x| x.to_bits()).collect();
    bits.sort_unstable();
    if bits.windows(2).all(|w| w[0] != w[1]) {
        return;
    }
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_unstable_by(|&a, &b| labels[a].total_cmp(&labels[b]).then(a.cmp(&b)));
    let original = labels.to_vec();
    for w in order.windows(2) {
        if labels[w[1]] <= labels[w[0]] {
            labels[w[1]] = labels[w[0]].next_up();
        }
    }
    if order.last().is_some_and(|&top| labels[top] >= 1.0) {
        // Bumping ran into 1; push the tied block down instead.
        labels.copy_from_slice(&original);
        for w in order.windows(2).rev() {
            if labels[w[0]] >= labels[w[1]] {
                labels[w[0]] = labels[w[1]].next_down();
            }
        }
    }
}

/// Plain decimal rendering of `x` in `(0, 1)` with 17 significant digits,
/// which round-trips every `f64`.
pub fn format_sig17(x: f64) -> String {
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    if exp >= 0 {
        // Not reachable for labels in (0, 1); fall back to the shortest repr.
        return format!("{x}");
    }
    let zeros = (-exp - 1) as usize;
    format!("0.{}{}", "0".repeat(zeros), digits)
}

/// A walk in `K_n`: consecutive vertices distinct, revisits allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexWalk {
    n: usize,
    vertices: Vec<usize>,
}

impl VertexWalk {
    pub fn new(vertices: Vec<usize>, n: usize) -> Result<Self> {
        if vertices.is_empty() {
            return Err(invalid("walk must contain at least one vertex"));
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= n) {
            return Err(invalid(format!("vertex {v} out of range for n = {n}")));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("walk repeats a vertex consecutively"));
        }
        Ok(Self { n, vertices })
    }

    pub(crate) fn new_unchecked(vertices: Vec<usize>, n: usize) -> Self {
        debug_assert!(Self::new(vertices.clone(), n).is_ok());
        Self { n, vertices }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_self_avoiding(&self) -> bool {
        let mut seen = vec![false; self.n];
        self.vertices.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }
}

/// A self-avoiding walk.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexPath(VertexWalk);

impl VertexPath {
    pub fn new(vertices: Vec<usize>, n: usize) -> Result<Self> {
        let walk = VertexWalk::new(vertices, n)?;
        if !walk.is_self_avoiding() {
            return Err(invalid("path revisits a vertex"));
        }
        Ok(Self(walk))
    }

    pub(crate) fn new_unchecked(vertices: Vec<usize>, n: usize) -> Self {
        debug_assert!(Self::new(vertices.clone(), n).is_ok());
        Self(VertexWalk { n, vertices })
    }

    pub fn as_walk(&self) -> &VertexWalk {
        &self.0
    }

    pub fn vertices(&self) -> &[usize] {
        self.0.vertices()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }
}

impl From<VertexPath> for VertexWalk {
    fn from(p: VertexPath) -> Self {
        p.0
    }
}
