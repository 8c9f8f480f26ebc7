//! Exact oracles for small `n`.
//!
//! The subset DP processes edges in ascending label order. A state `(S, v)`
//! means: some increasing path visits exactly the vertex set `S`, ends at `v`
//! and uses only edges processed so far. Processing edge `{u, v}` extends
//! states ending at `u` that avoid `v` (and symmetrically). Such reads touch
//! sets containing exactly one endpoint and writes touch sets containing both,
//! so one pass per edge never chains two edges of the same label.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::ordering::{edge_count, edge_table, EdgeOrdering, VertexWalk};

/// Default largest `n` for the subset DP.
pub const DEFAULT_CAP: usize = 20;
/// Hard upper limit for a configured cap (reachability table of `4 * 2^n` bytes).
pub const MAX_CAP: usize = 28;
/// Largest `n` accepted by [`brute_force_longest`].
pub const BRUTE_FORCE_CAP: usize = 8;

/// Subset-DP oracle with a configurable vertex cap.
#[derive(Debug, Clone, Copy)]
pub struct SubsetDp {
    cap: usize,
}

impl Default for SubsetDp {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

impl SubsetDp {
    pub fn with_cap(cap: usize) -> Result<Self> {
        if cap > MAX_CAP {
            return Err(Error::Capacity(format!(
                "cap {cap} exceeds the hard limit {MAX_CAP} (reachability table would need {})",
                human_bytes(4u128 << cap)
            )));
        }
        Ok(Self { cap })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check(&self, n: usize, bytes_per_subset: u128) -> Result<()> {
        if n > self.cap {
            return Err(Error::Capacity(format!(
                "n = {n} exceeds the subset-DP cap {} (this n would need about {}; raise the cap explicitly)",
                self.cap,
                human_bytes(bytes_per_subset << n)
            )));
        }
        Ok(())
    }

    /// Number of edges in the longest increasing path.
    pub fn longest_increasing_path_len(&self, ordering: &EdgeOrdering) -> Result<usize> {
        let n = ordering.n();
        self.check(n, 4)?;
        let mut reach = initial_reach(n);
        let table = edge_table(n);
        let mut best_size = 1;
        for e in ordering.edges_by_label() {
            let (a, b) = table[e];
            for (u, v) in [(a, b), (b, a)] {
                let (ubit, vbit) = (1u32 << u, 1u32 << v);
                for s in 0..reach.len() as u32 {
                    if s & vbit == 0 && reach[s as usize] & ubit != 0 {
                        reach[(s | vbit) as usize] |= vbit;
                        best_size = best_size.max((s | vbit).count_ones() as usize);
                    }
                }
            }
        }
        Ok(best_size - 1)
    }

    /// True iff some increasing Hamiltonian path exists. Stops at the first one.
    pub fn has_increasing_ham_path(&self, ordering: &EdgeOrdering) -> Result<bool> {
        let n = ordering.n();
        self.check(n, 4)?;
        let full = full_mask(n);
        let mut reach = initial_reach(n);
        let table = edge_table(n);
        for e in ordering.edges_by_label() {
            let (a, b) = table[e];
            for (u, v) in [(a, b), (b, a)] {
                let (ubit, vbit) = (1u32 << u, 1u32 << v);
                for s in 0..reach.len() as u32 {
                    if s & vbit == 0 && reach[s as usize] & ubit != 0 {
                        if s | vbit == full {
                            return Ok(true);
                        }
                        reach[(s | vbit) as usize] |= vbit;
                    }
                }
            }
        }
        Ok(false)
    }

    /// Number of vertex sequences covering all `n` vertices whose edge
    /// labels strictly increase.
    pub fn count_increasing_ham_paths(&self, ordering: &EdgeOrdering) -> Result<u64> {
        let n = ordering.n();
        self.check(n, 8 * n as u128)?;
        let subsets = 1usize << n;
        let mut count = vec![0u64; subsets * n];
        for v in 0..n {
            count[(1 << v) * n + v] = 1;
        }
        let table = edge_table(n);
        for e in ordering.edges_by_label() {
            let (a, b) = table[e];
            for (u, v) in [(a, b), (b, a)] {
                let vbit = 1usize << v;
                for s in (0..subsets).filter(|s| s & vbit == 0 && s & (1 << u) != 0) {
                    let c = count[s * n + u];
                    if c == 0 {
                        continue;
                    }
                    let slot = &mut count[(s | vbit) * n + v];
                    *slot = slot.checked_add(c).ok_or_else(|| {
                        Error::Capacity(format!("path count overflowed 64 bits at n = {n}"))
                    })?;
                }
            }
        }
        let full = subsets - 1;
        Ok(count[full * n..(full + 1) * n].iter().sum())
    }
}

fn full_mask(n: usize) -> u32 {
    ((1u64 << n) - 1) as u32
}

fn initial_reach(n: usize) -> Vec<u32> {
    let mut reach = vec![0u32; 1 << n];
    for v in 0..n {
        reach[1 << v] = 1 << v;
    }
    reach
}

fn human_bytes(b: u128) -> String {
    const UNITS: [&str; 5] = ["B", "KiB", "MiB", "GiB", "TiB"];
    let mut x = b as f64;
    let mut i = 0;
    while x >= 1024.0 && i + 1 < UNITS.len() {
        x /= 1024.0;
        i += 1;
    }
    format!("{x:.1} {}", UNITS[i])
}

pub fn longest_increasing_path_len(ordering: &EdgeOrdering) -> Result<usize> {
    SubsetDp::default().longest_increasing_path_len(ordering)
}

pub fn count_increasing_ham_paths(ordering: &EdgeOrdering) -> Result<u64> {
    SubsetDp::default().count_increasing_ham_paths(ordering)
}

pub fn has_increasing_ham_path(ordering: &EdgeOrdering) -> Result<bool> {
    SubsetDp::default().has_increasing_ham_path(ordering)
}

/// Longest increasing path by enumerating every simple path and testing it.
pub fn brute_force_longest(ordering: &EdgeOrdering) -> Result<usize> {
    let n = ordering.n();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::Capacity(format!("brute force is limited to n <= {BRUTE_FORCE_CAP}, got {n}")));
    }
    let mut best = 0;
    let mut stack = Vec::with_capacity(n);
    for start in 0..n {
        stack.push(start);
        dfs_all_paths(ordering, &mut stack, &mut best);
        stack.pop();
    }
    Ok(best)
}

fn dfs_all_paths(ordering: &EdgeOrdering, stack: &mut Vec<usize>, best: &mut usize) {
    let n = ordering.n();
    let walk = VertexWalk::new(stack.clone(), n).expect("simple path is a walk");
    if ordering.is_increasing(&walk) {
        *best = (*best).max(walk.len());
    }
    for x in 0..n {
        if !stack.contains(&x) {
            stack.push(x);
            dfs_all_paths(ordering, stack, best);
            stack.pop();
        }
    }
}

/// Every permutation-model ordering of `K_n`, in lexicographic order of the
/// label vectors. Limited to `n <= 4` (720 orderings).
pub fn all_orderings(n: usize) -> Result<impl Iterator<Item = EdgeOrdering>> {
    if !(2..=4).contains(&n) {
        return Err(Error::Capacity(format!("full ordering enumeration supports 2 <= n <= 4, got {n}")));
    }
    let m = edge_count(n) as u32;
    Ok((1..=m)
        .permutations(m as usize)
        .map(move |labels| EdgeOrdering::from_permutation(n, labels).expect("permutation labels")))
}
