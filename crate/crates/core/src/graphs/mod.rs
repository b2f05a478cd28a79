//! Small labeled graphs.
//!
//! Vertex sets are `{0, …, order-1}` with `order <= 64`; adjacency is stored
//! as one bit row per vertex. Canonical forms and subgraph enumeration are
//! limited to order 9.

mod canon;
mod enumerate;
mod graph6;

pub use canon::{canonical_form, CanonGraph, MAX_CANON_ORDER};
pub use enumerate::{count_nj, enumerate_h, enumerate_h_min_degree};
pub use graph6::{decode_graph6_size, encode_graph6_size, parse_graph6, to_graph6};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph order {order} exceeds the supported maximum {max}")]
    TooLarge { order: usize, max: usize },
    #[error("malformed graph6 string: {0}")]
    MalformedGraph6(String),
    #[error("graph is not embeddable in the complete graph on {0} vertices")]
    NotEmbeddable(usize),
    #[error("graph has an isolated vertex")]
    IsolatedVertex,
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
    #[error("order {0} is outside the supported range")]
    OrderOutOfRange(usize),
    #[error("unknown graph name {0:?}")]
    UnknownName(String),
}

pub const MAX_ORDER: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    order: usize,
    adj: Vec<u64>,
}

/// Index of the pair `{i, j}` (`i < j`) in colex order: `(0,1), (0,2),
/// (1,2), (0,3), …`.
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

/// Inverse of [`pair_index`] for small graphs.
pub fn pairs(order: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(order * order.saturating_sub(1) / 2);
    for j in 1..order {
        for i in 0..j {
            out.push((i, j));
        }
    }
    out
}

impl Graph {
    pub fn empty(order: usize) -> Result<Self, GraphError> {
        if order > MAX_ORDER {
            return Err(GraphError::TooLarge { order, max: MAX_ORDER });
        }
        Ok(Graph { order, adj: vec![0; order] })
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(order)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Graph on `order` vertices whose edges are the set bits of `mask` in
    /// [`pair_index`] order.
    pub fn from_pair_mask(order: usize, mask: u64) -> Self {
        let mut g = Graph { order, adj: vec![0; order] };
        for (k, (i, j)) in pairs(order).into_iter().enumerate() {
            if mask >> k & 1 == 1 {
                g.adj[i] |= 1 << j;
                g.adj[j] |= 1 << i;
            }
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n).expect("order within limits");
        for j in 1..n {
            for i in 0..j {
                g.adj[i] |= 1 << j;
                g.adj[j] |= 1 << i;
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("valid cycle")
    }

    /// Path with `len` edges (`len + 1` vertices).
    pub fn path(len: usize) -> Self {
        let edges: Vec<_> = (0..len).map(|i| (i, i + 1)).collect();
        Self::from_edges(len + 1, &edges).expect("valid path")
    }

    /// Built-in names accepted on the command line.
    pub fn named(name: &str) -> Result<Self, GraphError> {
        let unknown = || GraphError::UnknownName(name.into());
        let g = match name {
            "paw" => Self::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)])?,
            "path3+v" => Self::from_edges(5, &[(0, 1), (1, 2), (2, 3)])?,
            "diamond" => Self::from_edges(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])?,
            _ => {
                let (Some(kind), Some(n)) = (name.get(..1), name.get(1..)) else {
                    return Err(unknown());
                };
                let n: usize = n.parse().map_err(|_| unknown())?;
                match kind {
                    "K" if (1..=MAX_ORDER).contains(&n) => Self::complete(n),
                    "C" if (3..=MAX_ORDER).contains(&n) => Self::cycle(n),
                    "P" if (1..MAX_ORDER).contains(&n) => Self::path(n),
                    _ => return Err(unknown()),
                }
            }
        };
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u == v || u >= self.order || v >= self.order {
            return Err(GraphError::InvalidEdge(u, v));
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    #[inline]
    pub fn neighbors_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.order {
            for v in u + 1..self.order {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        self.complement().edges()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn min_degree(&self) -> usize {
        (0..self.order).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn is_clique(&self) -> bool {
        self.edge_count() == self.order * self.order.saturating_sub(1) / 2
    }

    pub fn has_isolated_vertex(&self) -> bool {
        self.adj.contains(&0)
    }

    pub fn complement(&self) -> Self {
        let full = if self.order == 64 { u64::MAX } else { (1u64 << self.order) - 1 };
        Graph {
            order: self.order,
            adj: (0..self.order).map(|v| !self.adj[v] & full & !(1 << v)).collect(),
        }
    }

    /// Pair mask in [`pair_index`] order (order at most 11).
    pub fn pair_mask(&self) -> u64 {
        let mut m = 0u64;
        for (k, (i, j)) in pairs(self.order).into_iter().enumerate() {
            if self.has_edge(i, j) {
                m |= 1 << k;
            }
        }
        m
    }

    /// The same graph with isolated vertices deleted (relabeled in order).
    pub fn without_isolated(&self) -> Self {
        let keep: Vec<usize> = (0..self.order).filter(|&v| self.adj[v] != 0).collect();
        self.induced(&keep)
    }

    /// Induced subgraph on `vertices`, relabeled `0..vertices.len()`.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut g = Graph { order: vertices.len(), adj: vec![0; vertices.len()] };
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate() {
                if a != b && self.has_edge(u, v) {
                    g.adj[a] |= 1 << b;
                }
            }
        }
        g
    }

    /// Relabel: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut g = Graph { order: self.order, adj: vec![0; self.order] };
        for (u, v) in self.edges() {
            g.adj[perm[u]] |= 1 << perm[v];
            g.adj[perm[v]] |= 1 << perm[u];
        }
        g
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}; {:?})", self.order, self.edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_queries() {
        let c4 = Graph::cycle(4);
        assert_eq!(c4.min_degree(), 2);
        assert!(Graph::complete(5).is_clique());
        assert!(!c4.is_clique());
        assert_eq!(Graph::named("path3+v").unwrap().edge_count(), 3);
        assert!(Graph::named("path3+v").unwrap().has_isolated_vertex());
        assert_eq!(Graph::named("P2").unwrap().order(), 3);
        assert!(Graph::named("Q7").is_err());
    }

    #[test]
    fn complement_of_c5_is_c5() {
        let c5 = Graph::cycle(5);
        let comp = c5.complement();
        assert_eq!(comp.edge_count(), 5);
        assert_eq!(canonical_form(&comp).unwrap(), canonical_form(&c5).unwrap());
    }

    #[test]
    fn rejects_loops_and_out_of_range() {
        assert!(Graph::from_edges(3, &[(1, 1)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        assert!(Graph::empty(65).is_err());
    }

    #[test]
    fn pair_mask_roundtrip() {
        let g = Graph::named("paw").unwrap();
        assert_eq!(Graph::from_pair_mask(4, g.pair_mask()), g);
        assert_eq!(pair_index(0, 1), 0);
        assert_eq!(pair_index(1, 2), 2);
        assert_eq!(pairs(4)[pair_index(1, 3)], (1, 3));
    }
}
