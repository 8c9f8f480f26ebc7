//! Worst-case walk constructions and the greedy increasing path.
//!
//! * [`pedestrian_walks`]: one pedestrian per vertex; edges are called out in
//!   increasing label order and the two pedestrians on the called edge swap.
//! * [`refusal_paths`]: the same process, except that a swap which would send
//!   either pedestrian to a vertex it already visited is refused.
//! * [`greedy_path`]: always leave along the smallest admissible label.
//! * [`jumps`]: the cyclic label gaps along a walk in the real-label model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordering::{edge_index_unchecked, edge_table, EdgeOrdering, Label, Labels, VertexPath, VertexWalk};
use crate::with_labels;

/// One trajectory per starting vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkSet {
    /// `walks[v]` is the trajectory of the pedestrian that started at `v`.
    pub walks: Vec<VertexWalk>,
    /// Edges that were called out but not walked (zero for the plain process).
    pub refused: usize,
}

impl WalkSet {
    pub fn lengths(&self) -> Vec<usize> {
        self.walks.iter().map(VertexWalk::len).collect()
    }

    pub fn max_len(&self) -> usize {
        self.walks.iter().map(VertexWalk::len).max().unwrap_or(0)
    }

    pub fn total_steps(&self) -> usize {
        self.walks.iter().map(VertexWalk::len).sum()
    }

    /// Edges actually traversed; every walked edge moves two pedestrians.
    pub fn walked(&self) -> usize {
        self.total_steps() / 2
    }
}

pub fn pedestrian_walks(ordering: &EdgeOrdering) -> WalkSet {
    let n = ordering.n();
    let table = edge_table(n);
    // occupant[v] = pedestrian currently standing on v
    let mut occupant: Vec<usize> = (0..n).collect();
    let mut trails: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for e in ordering.edges_by_label() {
        let (u, v) = table[e];
        let (p, q) = (occupant[u], occupant[v]);
        trails[p].push(v);
        trails[q].push(u);
        occupant.swap(u, v);
    }
    WalkSet {
        walks: trails.into_iter().map(|t| VertexWalk::new_unchecked(t, n)).collect(),
        refused: 0,
    }
}

pub fn refusal_paths(ordering: &EdgeOrdering) -> WalkSet {
    let n = ordering.n();
    let table = edge_table(n);
    let mut occupant: Vec<usize> = (0..n).collect();
    let mut trails: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    // visited[p * n + v]: pedestrian p has stood on v
    let mut visited = vec![false; n * n];
    for v in 0..n {
        visited[v * n + v] = true;
    }
    let mut refused = 0;
    for e in ordering.edges_by_label() {
        let (u, v) = table[e];
        let (p, q) = (occupant[u], occupant[v]);
        if visited[p * n + v] || visited[q * n + u] {
            refused += 1;
            continue;
        }
        visited[p * n + v] = true;
        visited[q * n + u] = true;
        trails[p].push(v);
        trails[q].push(u);
        occupant.swap(u, v);
    }
    WalkSet {
        walks: trails.into_iter().map(|t| VertexWalk::new_unchecked(t, n)).collect(),
        refused,
    }
}

/// Greedy increasing path from `v0`: each step takes the smallest label, among
/// edges to unvisited vertices, that exceeds the previous label.
pub fn greedy_path(ordering: &EdgeOrdering, v0: usize) -> Result<VertexPath> {
    let n = ordering.n();
    if v0 >= n {
        return Err(Error::InvalidArgument(format!("start vertex {v0} out of range for n = {n}")));
    }
    let path = with_labels!(ordering, labels => greedy_in(labels, n, v0));
    Ok(VertexPath::new_unchecked(path, n))
}

fn greedy_in<L: Label>(labels: &[L], n: usize, v0: usize) -> Vec<usize> {
    let mut on_path = vec![false; n];
    on_path[v0] = true;
    let mut path = vec![v0];
    let mut current = v0;
    let mut last: Option<L> = None;
    loop {
        let mut best: Option<(L, usize)> = None;
        for x in (0..n).filter(|&x| !on_path[x]) {
            let lab = labels[edge_index_unchecked(current, x, n)];
            if last.is_some_and(|l| !(lab > l)) {
                continue;
            }
            if best.is_none_or(|(b, _)| lab < b) {
                best = Some((lab, x));
            }
        }
        let Some((lab, x)) = best else { break };
        on_path[x] = true;
        path.push(x);
        current = x;
        last = Some(lab);
    }
    path
}

/// Hamiltonian path built by always taking the edge of smallest jump
/// `(f(e) - f(prev)) mod 1` to an unvisited vertex (real model only).
///
/// Its longest prefix with jump sum at most 1 is the greedy increasing path.
pub fn smallest_jump_path(ordering: &EdgeOrdering, v0: usize) -> Result<VertexPath> {
    let Labels::Real(labels) = ordering.labels() else {
        return Err(Error::UnsupportedModel { required: "real" });
    };
    let n = ordering.n();
    if v0 >= n {
        return Err(Error::InvalidArgument(format!("start vertex {v0} out of range for n = {n}")));
    }
    let mut on_path = vec![false; n];
    on_path[v0] = true;
    let mut path = vec![v0];
    let mut last = 0.0;
    while path.len() < n {
        let current = *path.last().unwrap();
        let (x, lab) = (0..n)
            .filter(|&x| !on_path[x])
            .map(|x| (x, labels[edge_index_unchecked(current, x, n)]))
            .min_by(|a, b| cyclic_gap(last, a.1).total_cmp(&cyclic_gap(last, b.1)))
            .expect("unvisited vertex remains");
        on_path[x] = true;
        path.push(x);
        last = lab;
    }
    Ok(VertexPath::new_unchecked(path, n))
}

fn cyclic_gap(from: f64, to: f64) -> f64 {
    if to > from {
        to - from
    } else {
        1.0 + to - from
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpSequence {
    pub jumps: Vec<f64>,
    pub prefix_sums: Vec<f64>,
    /// Positions where the walk fails to increase.
    pub descents: usize,
}

impl JumpSequence {
    pub fn total(&self) -> f64 {
        self.prefix_sums.last().copied().unwrap_or(0.0)
    }
}

/// Jumps `X_1 = f(e_1)`, `X_i = (f(e_i) - f(e_{i-1})) mod 1` along `walk`.
pub fn jumps(ordering: &EdgeOrdering, walk: &VertexWalk) -> Result<JumpSequence> {
    let Labels::Real(labels) = ordering.labels() else {
        return Err(Error::UnsupportedModel { required: "real" });
    };
    let n = ordering.n();
    let mut out = JumpSequence { jumps: Vec::new(), prefix_sums: Vec::new(), descents: 0 };
    let mut last = 0.0;
    let mut sum = 0.0;
    for (i, w) in walk.vertices().windows(2).enumerate() {
        let lab = labels[edge_index_unchecked(w[0], w[1], n)];
        if i > 0 && lab <= last {
            out.descents += 1;
        }
        let x = if i == 0 { lab } else { cyclic_gap(last, lab) };
        sum += x;
        out.jumps.push(x);
        out.prefix_sums.push(sum);
        last = lab;
    }
    Ok(out)
}
