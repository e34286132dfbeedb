//! Simple undirected graphs, the node metric, and the text format.

use crate::error::{Error, Result};
use std::fmt;

/// Edge list of the symmetric difference above which the exact vertex-cover
/// search gives way to a flagged upper bound.
pub const NODE_DISTANCE_EXACT_EDGE_CAP: usize = 40;

/// Zero-diagonal symmetric adjacency over `n` vertices, stored as an
/// upper-triangular bitset so edge flips and neighbor scans are O(1)/O(n).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    bits: Vec<u64>,
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let pairs = n * n.saturating_sub(1) / 2;
        Graph {
            n,
            bits: vec![0u64; pairs.div_ceil(64)],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(i, j) in edges {
            if i == j || i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "bad edge ({i}, {j}) for n={n}"
                )));
            }
            g.set_edge(i, j, true);
        }
        Ok(g)
    }

    /// Rebuild a graph of `n` vertices from the packed pair bitmask; pairs
    /// are indexed in the same upper-triangular order the bitset uses. Only
    /// sensible at audit scale (n(n-1)/2 <= 64).
    pub fn from_bitmask(n: usize, mask: u64) -> Self {
        let pairs = n * (n - 1) / 2;
        assert!(pairs <= 64, "bitmask construction limited to 64 pairs");
        let mut g = Graph::empty(n);
        if pairs > 0 {
            g.bits[0] = mask & (u64::MAX >> (64 - pairs));
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let idx = pair_index(i, j);
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        assert!(i != j, "no self-loops");
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let idx = pair_index(i, j);
        if present {
            self.bits[idx / 64] |= 1 << (idx % 64);
        } else {
            self.bits[idx / 64] &= !(1 << (idx % 64));
        }
    }

    /// Unordered edges, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&u| u != v && self.has_edge(v, u)).count()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| u != v && self.has_edge(v, u))
    }

    /// Maximum vertex degree; 0 for the edgeless graph.
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Text form: first line `n m`, then one `i j` line per edge, 1-based,
    /// i < j, sorted lexicographically.
    pub fn to_text(&self) -> String {
        let edges = self.edges();
        let mut out = format!("{} {}\n", self.n, edges.len());
        for (i, j) in edges {
            out.push_str(&format!("{} {}\n", i + 1, j + 1));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty graph file".into()))?;
        let mut head = header.split_whitespace();
        let n: usize = parse_tok(head.next(), "n")?;
        let m: usize = parse_tok(head.next(), "m")?;
        let mut g = Graph::empty(n);
        let mut count = 0usize;
        for line in lines {
            let mut toks = line.split_whitespace();
            let i: usize = parse_tok(toks.next(), "edge endpoint")?;
            let j: usize = parse_tok(toks.next(), "edge endpoint")?;
            if i == 0 || j == 0 || i > n || j > n || i >= j {
                return Err(Error::InvalidParameter(format!(
                    "bad edge line {line:?} (endpoints are 1-based with i < j)"
                )));
            }
            g.set_edge(i - 1, j - 1, true);
            count += 1;
        }
        if count != m {
            return Err(Error::InvalidParameter(format!(
                "header claims {m} edges, found {count}"
            )));
        }
        Ok(g)
    }
}

fn parse_tok(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::InvalidParameter(format!("missing or bad {what}")))
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Node distance between two graphs: the minimum number of single-vertex
/// neighborhood rewirings carrying one into the other, which equals the
/// minimum vertex cover of their symmetric-difference edge set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeDistance {
    pub value: usize,
    /// False when the difference graph exceeded the exact-search cap and
    /// `value` is only an upper bound.
    pub exact: bool,
}

pub fn node_distance(g1: &Graph, g2: &Graph) -> Result<NodeDistance> {
    if g1.n() != g2.n() {
        return Err(Error::DimensionMismatch {
            left: g1.n(),
            right: g2.n(),
        });
    }
    let mut diff = Vec::new();
    for i in 0..g1.n() {
        for j in (i + 1)..g1.n() {
            if g1.has_edge(i, j) != g2.has_edge(i, j) {
                diff.push((i, j));
            }
        }
    }
    if diff.is_empty() {
        return Ok(NodeDistance {
            value: 0,
            exact: true,
        });
    }
    if diff.len() > NODE_DISTANCE_EXACT_EDGE_CAP {
        // Greedy matching gives a 2-approximate cover.
        let mut covered = std::collections::HashSet::new();
        let mut bound = 0usize;
        for &(i, j) in &diff {
            if !covered.contains(&i) && !covered.contains(&j) {
                covered.insert(i);
                covered.insert(j);
                bound += 2;
            }
        }
        return Ok(NodeDistance {
            value: bound,
            exact: false,
        });
    }
    let mut best = diff.len(); // covering one endpoint per edge always works
    branch_cover(&diff, 0, &mut best);
    Ok(NodeDistance {
        value: best,
        exact: true,
    })
}

/// Branch and bound for minimum vertex cover: pick an uncovered edge, branch
/// on which endpoint joins the cover.
fn branch_cover(diff: &[(usize, usize)], picked: usize, best: &mut usize) {
    if picked >= *best {
        return;
    }
    let Some(&(u, v)) = diff.first() else {
        *best = picked;
        return;
    };
    for choice in [u, v] {
        let remaining: Vec<(usize, usize)> = diff
            .iter()
            .copied()
            .filter(|&(a, b)| a != choice && b != choice)
            .collect();
        branch_cover(&remaining, picked + 1, best);
    }
}
