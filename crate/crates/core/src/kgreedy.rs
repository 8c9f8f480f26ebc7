//! The k-greedy algorithm: grow an increasing path `P` guided by a look-ahead
//! search tree `T` of at most `k` edges rooted at the end of `P`.
//!
//! 1. `P = (v0)`, `T = {v0}`, `tau` = below every label.
//! 2. While `T` has fewer than `k` edges: among edges from `T` to vertices
//!    outside `P ∪ T` with label above `tau`, add the smallest to `T` and set
//!    `tau` to its label. If there is none, stop.
//! 3. Move the end of `P` to the root child with the largest subtree and keep
//!    only that subtree as `T`. Go to 2.
//!
//! Equal subtree sizes resolve to the child that entered `T` first.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ordering::{edge_index_unchecked, EdgeOrdering, Label, VertexPath};
use crate::with_labels;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminationMode {
    /// Stop as soon as no eligible edge exists.
    Strict,
    /// On stopping, additionally walk down the remaining tree, always into
    /// the largest root-child subtree, until the tree is used up.
    #[default]
    Exhaust,
}

impl FromStr for TerminationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Self::Strict),
            "exhaust" => Ok(Self::Exhaust),
            other => Err(invalid(format!("unknown termination mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for TerminationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Strict => "strict",
            Self::Exhaust => "exhaust",
        })
    }
}

/// One path extension made with a full `k`-edge tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionRecord {
    /// Path length (edges) before the extension.
    pub ell: usize,
    /// Vertices in the subtree that was kept.
    pub retained_subtree_size: usize,
    /// Label advance since the previous extension, in label units.
    pub waiting_time: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KGreedyTrace {
    pub records: Vec<ExtensionRecord>,
}

impl KGreedyTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,retained_subtree_size,waiting_time\n");
        for r in &self.records {
            writeln!(out, "{},{},{}", r.ell, r.retained_subtree_size, r.waiting_time).unwrap();
        }
        out
    }

    /// Histogram of retained subtree sizes, indexed `1..=k` (slot 0 unused).
    pub fn retained_histogram(&self, k: usize) -> Vec<u64> {
        let mut h = vec![0; k + 1];
        for r in &self.records {
            h[r.retained_subtree_size] += 1;
        }
        h
    }
}

pub fn k_greedy_path(
    ordering: &EdgeOrdering,
    v0: usize,
    k: usize,
    mode: TerminationMode,
) -> Result<(VertexPath, KGreedyTrace)> {
    run(ordering, v0, k, mode, false)
}

pub(crate) fn run(
    ordering: &EdgeOrdering,
    v0: usize,
    k: usize,
    mode: TerminationMode,
    validate: bool,
) -> Result<(VertexPath, KGreedyTrace)> {
    if k < 1 {
        return Err(invalid("k must be at least 1"));
    }
    let n = ordering.n();
    if v0 >= n {
        return Err(invalid(format!("start vertex {v0} out of range for n = {n}")));
    }
    let (path, trace) = with_labels!(ordering, labels => {
        let mut state = SearchTreeState::new(labels, n, v0, validate);
        state.run(k, mode);
        (state.path, state.trace)
    });
    Ok((VertexPath::new_unchecked(path, n), trace))
}

/// Working state of one run: the path, the search tree (in insertion order,
/// root at index 0) and the current time `tau`.
struct SearchTreeState<'a, L: Label> {
    labels: &'a [L],
    n: usize,
    path: Vec<usize>,
    on_path: Vec<bool>,
    tree_vertex: Vec<usize>,
    tree_parent: Vec<usize>,
    in_tree: Vec<bool>,
    tau: Option<L>,
    tau_at_extension: f64,
    /// Neighbours of each vertex sorted by edge label, built on first use.
    sorted: Vec<Vec<u32>>,
    /// Entries before the cursor are dead for good: label at most `tau`, or
    /// leading to a path vertex.
    cursor: Vec<usize>,
    trace: KGreedyTrace,
    validate: bool,
}

const NO_PARENT: usize = usize::MAX;

impl<'a, L: Label> SearchTreeState<'a, L> {
    fn new(labels: &'a [L], n: usize, v0: usize, validate: bool) -> Self {
        let mut on_path = vec![false; n];
        on_path[v0] = true;
        let mut in_tree = vec![false; n];
        in_tree[v0] = true;
        Self {
            labels,
            n,
            path: vec![v0],
            on_path,
            tree_vertex: vec![v0],
            tree_parent: vec![NO_PARENT],
            in_tree,
            tau: None,
            tau_at_extension: 0.0,
            sorted: vec![Vec::new(); n],
            cursor: vec![0; n],
            trace: KGreedyTrace::default(),
            validate,
        }
    }

    #[inline]
    fn label(&self, u: usize, v: usize) -> L {
        self.labels[edge_index_unchecked(u, v, self.n)]
    }

    fn tree_edges(&self) -> usize {
        self.tree_vertex.len() - 1
    }

    fn run(&mut self, k: usize, mode: TerminationMode) {
        loop {
            while self.tree_edges() < k {
                match self.min_eligible_edge() {
                    Some((lab, parent, x)) => self.add_to_tree(lab, parent, x),
                    None => {
                        if mode == TerminationMode::Exhaust {
                            while self.tree_edges() > 0 {
                                self.descend();
                            }
                        }
                        return;
                    }
                }
            }
            let tau = self.tau.expect("tree has edges").to_f64();
            let ell = self.path.len() - 1;
            let retained = self.descend();
            self.trace.records.push(ExtensionRecord {
                ell,
                retained_subtree_size: retained,
                waiting_time: tau - self.tau_at_extension,
            });
            self.tau_at_extension = tau;
        }
    }

    fn ensure_sorted(&mut self, u: usize) {
        if !self.sorted[u].is_empty() || self.n < 2 {
            return;
        }
        let mut pairs: Vec<(L, u32)> = (0..self.n)
            .filter(|&x| x != u)
            .map(|x| (self.label(u, x), x as u32))
            .collect();
        pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("labels are comparable"));
        self.sorted[u] = pairs.into_iter().map(|(_, x)| x).collect();
    }

    /// Smallest edge from the tree to a vertex outside `P ∪ T` with label above `tau`.
    fn min_eligible_edge(&mut self) -> Option<(L, usize, usize)> {
        let mut best: Option<(L, usize, usize)> = None;
        for idx in 0..self.tree_vertex.len() {
            let u = self.tree_vertex[idx];
            self.ensure_sorted(u);
            let list = &self.sorted[u];
            let mut c = self.cursor[u];
            while c < list.len() {
                let x = list[c] as usize;
                if self.on_path[x] || self.tau.is_some_and(|t| !(self.labels[edge_index_unchecked(u, x, self.n)] > t)) {
                    c += 1;
                } else {
                    break;
                }
            }
            self.cursor[u] = c;
            // Everything from the cursor on is above tau; tree membership is
            // temporary, so those entries are skipped but not retired.
            let found = list[c..]
                .iter()
                .map(|&x| x as usize)
                .find(|&x| !self.on_path[x] && !self.in_tree[x]);
            if let Some(x) = found {
                let lab = self.label(u, x);
                if best.is_none_or(|(b, _, _)| lab < b) {
                    best = Some((lab, idx, x));
                }
            }
        }
        best
    }

    fn add_to_tree(&mut self, lab: L, parent_idx: usize, x: usize) {
        if self.validate {
            assert!(self.tau.is_none_or(|t| lab > t), "tau must strictly increase");
            assert!(!self.on_path[x] && !self.in_tree[x]);
        }
        self.tree_vertex.push(x);
        self.tree_parent.push(parent_idx);
        self.in_tree[x] = true;
        self.tau = Some(lab);
        if self.validate {
            self.check_invariants();
        }
    }

    /// Sizes (in vertices) of the subtrees rooted at each tree node.
    fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1; self.tree_vertex.len()];
        // children always come after their parent in insertion order
        for i in (1..self.tree_vertex.len()).rev() {
            size[self.tree_parent[i]] += size[i];
        }
        size
    }

    /// Step 3: extend the path into the largest root-child subtree and make
    /// it the new tree. Returns its vertex count.
    fn descend(&mut self) -> usize {
        let size = self.subtree_sizes();
        let mut chosen = None;
        for i in 1..self.tree_vertex.len() {
            if self.tree_parent[i] == 0 && chosen.is_none_or(|c: usize| size[i] > size[c]) {
                chosen = Some(i);
            }
        }
        let chosen = chosen.expect("tree has a root child");
        if self.validate {
            let max = (1..size.len()).filter(|&i| self.tree_parent[i] == 0).map(|i| size[i]).max();
            assert_eq!(Some(size[chosen]), max);
        }

        let mut keep = vec![false; self.tree_vertex.len()];
        let mut remap = vec![NO_PARENT; self.tree_vertex.len()];
        let mut vertex = Vec::with_capacity(size[chosen]);
        let mut parent = Vec::with_capacity(size[chosen]);
        for i in 0..self.tree_vertex.len() {
            let v = self.tree_vertex[i];
            if i == chosen || (i > chosen && self.tree_parent[i] != NO_PARENT && keep[self.tree_parent[i]]) {
                keep[i] = true;
                remap[i] = vertex.len();
                vertex.push(v);
                parent.push(if i == chosen { NO_PARENT } else { remap[self.tree_parent[i]] });
            } else {
                self.in_tree[v] = false;
            }
        }
        let x = self.tree_vertex[chosen];
        self.path.push(x);
        self.on_path[x] = true;
        self.tree_vertex = vertex;
        self.tree_parent = parent;
        if self.validate {
            self.check_invariants();
        }
        size[chosen]
    }

    fn check_invariants(&self) {
        let root = self.tree_vertex[0];
        assert_eq!(Some(&root), self.path.last(), "tree root is the end of the path");
        for &v in &self.tree_vertex[1..] {
            assert!(!self.on_path[v], "tree and path overlap outside the root");
        }
        let tree_count = self.in_tree.iter().filter(|&&b| b).count();
        assert_eq!(tree_count, self.tree_vertex.len());
        // Labels along path then any root-to-node route strictly increase.
        let mut last_on_path = None;
        for w in self.path.windows(2) {
            let lab = self.label(w[0], w[1]);
            assert!(last_on_path.is_none_or(|p| lab > p));
            last_on_path = Some(lab);
        }
        let mut incoming: Vec<Option<L>> = vec![last_on_path; self.tree_vertex.len()];
        for i in 1..self.tree_vertex.len() {
            let p = self.tree_parent[i];
            assert!(p < i);
            let lab = self.label(self.tree_vertex[p], self.tree_vertex[i]);
            assert!(incoming[p].is_none_or(|q| lab > q), "root-to-leaf labels must increase");
            assert!(self.tau.is_some_and(|t| !(lab > t)), "tau is the largest committed label");
            incoming[i] = Some(lab);
        }
    }
}
