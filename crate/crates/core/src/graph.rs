//! Simple undirected graphs on vertices `0..n`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(vertices: usize) -> Self {
        Graph {
            adjacency: vec![BTreeSet::new(); vertices],
        }
    }

    /// Builds a graph from an edge list. Self-loops are dropped.
    pub fn from_edges(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::new(vertices);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(vertices: usize) -> Self {
        let mut g = Graph::new(vertices);
        for u in 0..vertices {
            for v in u + 1..vertices {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Adds `{u, v}`; ignored when `u == v`.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adjacency[u].insert(v);
            self.adjacency[v].insert(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.range(u + 1..).map(move |&v| (u, v)))
    }

    /// Neighborhoods as bitmasks; only meaningful for at most 64 vertices.
    pub(crate) fn neighbor_masks(&self) -> Vec<u64> {
        self.adjacency
            .iter()
            .map(|adj| adj.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect()
    }
}
