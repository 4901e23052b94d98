//! Small undirected graphs stored as adjacency bitsets.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Largest vertex count a graph may have (one `u64` word per adjacency row).
pub const MAX_VERTICES: usize = 64;

/// Exclusivity graph: one vertex per test, an edge between exclusive tests.
///
/// Vertices are addressed internally by index `0..n`; `labels` maps each
/// index to the external vertex id (1-based for the KS set).
#[derive(Clone, PartialEq, Eq)]
pub struct ExclusivityGraph {
    labels: Vec<u32>,
    adj: Vec<u64>,
}

impl ExclusivityGraph {
    /// Edgeless graph with the given labels.
    pub fn new(labels: Vec<u32>) -> Result<Self> {
        if labels.len() > MAX_VERTICES {
            return Err(Error::Graph(format!(
                "{} vertices exceeds the supported maximum of {MAX_VERTICES}",
                labels.len()
            )));
        }
        let distinct: BTreeSet<_> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::Graph("duplicate vertex label".into()));
        }
        let n = labels.len();
        Ok(ExclusivityGraph {
            labels,
            adj: vec![0; n],
        })
    }

    /// Graph on vertices labelled `1..=n` with 0-based index edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new((1..=n as u32).collect())?;
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        Self::from_edges(n, &edges).expect("complete graph within size limit")
    }

    pub fn edgeless(n: usize) -> Self {
        Self::from_edges(n, &[]).expect("edgeless graph within size limit")
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("cycle within size limit")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("path within size limit")
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(Error::Graph(format!("edge ({i}, {j}) out of range for n = {n}")));
        }
        if i == j {
            return Err(Error::Graph(format!("self-loop at vertex {}", self.labels[i])));
        }
        self.adj[i] |= 1 << j;
        self.adj[j] |= 1 << i;
        Ok(())
    }

    /// Adds an edge between two vertices given by label.
    pub fn add_edge_by_label(&mut self, a: u32, b: u32) -> Result<()> {
        let i = self
            .index_of(a)
            .ok_or_else(|| Error::Graph(format!("unknown vertex {a}")))?;
        let j = self
            .index_of(b)
            .ok_or_else(|| Error::Graph(format!("unknown vertex {b}")))?;
        self.add_edge(i, j)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    pub fn has_edge_by_label(&self, a: u32, b: u32) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.has_edge(i, j),
            _ => false,
        }
    }

    /// Neighbourhood of `i` as a bitmask over vertex indices.
    pub fn neighbors(&self, i: usize) -> u64 {
        self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].count_ones() as usize
    }

    pub fn all_mask(&self) -> u64 {
        if self.n() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n()) - 1
        }
    }

    /// Index pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| ((i + 1)..n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
            .collect()
    }

    /// Edges as label pairs, smaller label first, sorted.
    pub fn labelled_edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(i, j)| {
                let (a, b) = (self.labels[i], self.labels[j]);
                (a.min(b), a.max(b))
            })
            .collect();
        e.sort_unstable();
        e
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn complement(&self) -> Self {
        let all = self.all_mask();
        let adj = (0..self.n())
            .map(|i| !self.adj[i] & all & !(1u64 << i))
            .collect();
        ExclusivityGraph {
            labels: self.labels.clone(),
            adj,
        }
    }

    /// True when the vertices in `mask` are pairwise adjacent.
    pub fn is_clique(&self, mask: u64) -> bool {
        iter_bits(mask).all(|i| mask & !(1u64 << i) & !self.adj[i] == 0)
    }

    /// True when no two vertices in `mask` are adjacent.
    pub fn is_independent(&self, mask: u64) -> bool {
        iter_bits(mask).all(|i| self.adj[i] & mask == 0)
    }

    /// Same graph with labels rewritten by `f`. The new labels must stay distinct.
    pub fn relabel(&self, f: impl Fn(u32) -> u32) -> Result<Self> {
        let labels: Vec<u32> = self.labels.iter().map(|&l| f(l)).collect();
        let mut g = Self::new(labels)?;
        g.adj = self.adj.clone();
        Ok(g)
    }

    /// Reorders vertex indices: new index `k` holds old index `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n() {
            return Err(Error::Graph("permutation length mismatch".into()));
        }
        let mut pos = vec![usize::MAX; self.n()];
        for (k, &old) in order.iter().enumerate() {
            pos[old] = k;
        }
        let labels = order.iter().map(|&old| self.labels[old]).collect();
        let mut g = Self::new(labels)?;
        for (i, j) in self.edges() {
            g.add_edge(pos[i], pos[j])?;
        }
        Ok(g)
    }

    /// Converts a set of labels to an index bitmask.
    pub fn mask_of(&self, labels: &[u32]) -> Result<u64> {
        labels.iter().try_fold(0u64, |m, &l| {
            self.index_of(l)
                .map(|i| m | 1 << i)
                .ok_or_else(|| Error::Graph(format!("unknown vertex {l}")))
        })
    }

    pub fn labels_of(&self, mask: u64) -> Vec<u32> {
        let mut v: Vec<u32> = iter_bits(mask).map(|i| self.labels[i]).collect();
        v.sort_unstable();
        v
    }

    /// Parses the plain edge-list format: first token `n`, then `i j` pairs, 1-indexed.
    /// Lines starting with `#` are comments.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim_start().starts_with('#'))
            .flat_map(|(ln, l)| l.split_whitespace().map(move |t| (ln + 1, t)));
        let (line, first) = tokens.next().ok_or(Error::EmptyInput)?;
        let n: usize = first.parse().map_err(|_| Error::Parse {
            line,
            message: format!("expected vertex count, found `{first}`"),
        })?;
        let mut g = Self::from_edges(n, &[])?;
        let rest: Vec<(usize, &str)> = tokens.collect();
        if rest.len() % 2 != 0 {
            return Err(Error::Parse {
                line: rest.last().map(|t| t.0).unwrap_or(line),
                message: "dangling vertex without partner".into(),
            });
        }
        for pair in rest.chunks(2) {
            let parse = |(ln, t): (usize, &str)| -> Result<usize> {
                let v: usize = t.parse().map_err(|_| Error::Parse {
                    line: ln,
                    message: format!("expected vertex number, found `{t}`"),
                })?;
                if v == 0 || v > n {
                    return Err(Error::Parse {
                        line: ln,
                        message: format!("vertex {v} outside 1..={n}"),
                    });
                }
                Ok(v - 1)
            };
            let i = parse(pair[0])?;
            let j = parse(pair[1])?;
            g.add_edge(i, j).map_err(|e| Error::Parse {
                line: pair[0].0,
                message: e.to_string(),
            })?;
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for (i, j) in self.edges() {
            out.push_str(&format!("{} {}\n", i + 1, j + 1));
        }
        out
    }
}

impl fmt::Debug for ExclusivityGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ExclusivityGraph(n = {}, edges = {:?})",
            self.n(),
            self.labelled_edges()
        )
    }
}

/// Iterates the set bit positions of `mask`, lowest first.
pub fn iter_bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_cycle_five_is_cycle_five() {
        let c5 = ExclusivityGraph::cycle(5);
        let comp = c5.complement();
        assert_eq!(comp.edge_count(), 5);
        assert!((0..5).all(|i| comp.degree(i) == 2));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = ExclusivityGraph::cycle(5);
        let back = ExclusivityGraph::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let err = ExclusivityGraph::parse_edge_list("3\n1 2\n2 7\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                message: "vertex 7 outside 1..=3".into()
            }
        );
        assert!(ExclusivityGraph::parse_edge_list("3\n1 1\n").is_err());
        assert!(ExclusivityGraph::parse_edge_list("").is_err());
    }

    #[test]
    fn clique_and_independence_masks() {
        let k4 = ExclusivityGraph::complete(4);
        assert!(k4.is_clique(0b1111));
        assert!(!k4.is_independent(0b0011));
        let p3 = ExclusivityGraph::path(3);
        assert!(p3.is_independent(0b101));
        assert!(!p3.is_clique(0b101));
    }
}
