use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{Graph, GraphError};

pub const MAX_CANON_ORDER: usize = 9;

/// Isomorphism-class representative of a small graph.
///
/// `key` is the adjacency bit string of the canonical labeling, with pairs
/// in lexicographic order `(0,1), (0,2), …, (1,2), …` and `(0,1)` as the
/// most significant bit. Ordering is by edge count, then order, then key.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonGraph {
    edges: u8,
    order: u8,
    key: u64,
}

fn lex_pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl CanonGraph {
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn edge_count(&self) -> usize {
        self.edges as usize
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// The canonically labeled graph.
    pub fn to_graph(&self) -> Graph {
        let n = self.order();
        let k = lex_pair_count(n);
        let mut g = Graph::empty(n).expect("canonical order is small");
        let mut l = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.key >> (k - 1 - l) & 1 == 1 {
                    g.add_edge(i, j).expect("valid pair");
                }
                l += 1;
            }
        }
        g
    }

    pub fn is_clique(&self) -> bool {
        self.edge_count() == lex_pair_count(self.order())
    }

    pub fn min_degree(&self) -> usize {
        self.to_graph().min_degree()
    }
}

impl fmt::Debug for CanonGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Canon({}; {:?})", self.order, self.to_graph().edges())
    }
}

/// Stable vertex colouring by iterated degree refinement. Colours are ranks
/// of sorted signatures, so they are preserved by isomorphisms.
fn refine_colors(g: &Graph) -> Vec<usize> {
    let n = g.order();
    let mut color: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    loop {
        let mut sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = (0..n).filter(|&u| g.has_edge(u, v)).map(|u| color[u]).collect();
                nb.sort_unstable();
                (color[v], nb)
            })
            .collect();
        let mut sorted = sigs.clone();
        sorted.sort();
        sorted.dedup();
        let next: Vec<usize> = sigs
            .iter_mut()
            .map(|s| sorted.binary_search(s).expect("present"))
            .collect();
        let classes = sorted.len();
        let before = {
            let mut c = color.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        color = next;
        if classes == before {
            return color;
        }
    }
}

struct Search<'a> {
    g: &'a Graph,
    slot_cell: Vec<usize>,
    cells: Vec<Vec<usize>>,
    used: Vec<bool>,
    placed: Vec<usize>,
    best: Option<u64>,
}

impl Search<'_> {
    fn leaf_key(&self) -> u64 {
        let n = self.placed.len();
        let k = lex_pair_count(n);
        let mut key = 0u64;
        let mut l = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.g.has_edge(self.placed[i], self.placed[j]) {
                    key |= 1 << (k - 1 - l);
                }
                l += 1;
            }
        }
        key
    }

    fn run(&mut self, pos: usize) {
        if pos == self.slot_cell.len() {
            let key = self.leaf_key();
            if self.best.is_none_or(|b| key > b) {
                self.best = Some(key);
            }
            return;
        }
        let cell = self.slot_cell[pos];
        for idx in 0..self.cells[cell].len() {
            let v = self.cells[cell][idx];
            if self.used[v] {
                continue;
            }
            self.used[v] = true;
            self.placed.push(v);
            self.run(pos + 1);
            self.placed.pop();
            self.used[v] = false;
        }
    }
}

/// Canonical representative: the lexicographically largest adjacency bit
/// string (equivalently the lexicographically smallest sorted edge list)
/// over all labelings that list vertices by refined colour class.
pub fn canonical_form(g: &Graph) -> Result<CanonGraph, GraphError> {
    let n = g.order();
    if n > MAX_CANON_ORDER {
        return Err(GraphError::TooLarge { order: n, max: MAX_CANON_ORDER });
    }
    let color = refine_colors(g);
    let ncolors = color.iter().max().map_or(0, |m| m + 1);
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); ncolors];
    for v in 0..n {
        cells[color[v]].push(v);
    }
    // higher colours first: they carry the larger degrees
    cells.reverse();
    cells.retain(|c| !c.is_empty());
    let slot_cell: Vec<usize> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, c)| core::iter::repeat_n(i, c.len()))
        .collect();
    let mut search = Search {
        g,
        slot_cell,
        cells,
        used: vec![false; n],
        placed: Vec::with_capacity(n),
        best: None,
    };
    search.run(0);
    Ok(CanonGraph {
        edges: g.edge_count() as u8,
        order: n as u8,
        key: search.best.unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeled_paths_agree() {
        let a = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b = Graph::from_edges(3, &[(0, 2), (2, 1)]).unwrap();
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn triangle_is_fixed() {
        let k3 = Graph::complete(3);
        let c = canonical_form(&k3).unwrap();
        assert_eq!(c.to_graph(), k3);
        assert!(c.is_clique());
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        let c6 = Graph::cycle(6);
        let two_triangles =
            Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_ne!(canonical_form(&c6).unwrap(), canonical_form(&two_triangles).unwrap());
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            canonical_form(&Graph::cycle(10)),
            Err(GraphError::TooLarge { .. })
        ));
    }

    #[test]
    fn roundtrip_through_representative() {
        let paw = Graph::named("paw").unwrap();
        let c = canonical_form(&paw).unwrap();
        assert_eq!(canonical_form(&c.to_graph()).unwrap(), c);
    }
}
