use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::canon::{canonical_form, MAX_CANON_ORDER};
use super::{pair_index, CanonGraph, Graph, GraphError};

/// All isomorphism classes of graphs with at least one edge and no isolated
/// vertices that fit inside `K_m`, sorted by edge count.
///
/// Built level by level: every class with `e + 1` edges arises from a class
/// with `e` edges by adding one edge, possibly touching one or two new
/// vertices.
pub fn enumerate_h(m: usize) -> Result<Vec<CanonGraph>, GraphError> {
    if m < 3 {
        return Err(GraphError::OrderOutOfRange(m));
    }
    if m > MAX_CANON_ORDER {
        return Err(GraphError::TooLarge { order: m, max: MAX_CANON_ORDER });
    }
    let k2 = canonical_form(&Graph::complete(2))?;
    let mut all: Vec<CanonGraph> = vec![k2];
    let mut level: BTreeSet<CanonGraph> = BTreeSet::from([k2]);
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for h in &level {
            let g = h.to_graph();
            let v = g.order();
            for j in 0..(v + 2).min(m) {
                for i in 0..j {
                    // at most two fresh vertices, added as v and v+1
                    if i > v {
                        continue;
                    }
                    if j > v && !(j == v + 1 && i == v) {
                        continue;
                    }
                    if i < v && j < v && g.has_edge(i, j) {
                        continue;
                    }
                    let order = v.max(j + 1);
                    let mut child = Graph::empty(order)?;
                    for (a, b) in g.edges() {
                        child.add_edge(a, b)?;
                    }
                    child.add_edge(i, j)?;
                    next.insert(canonical_form(&child)?);
                }
            }
        }
        all.extend(next.iter().copied());
        level = next;
    }
    all.sort();
    Ok(all)
}

/// Classes from [`enumerate_h`] with minimum degree at least `d`.
pub fn enumerate_h_min_degree(m: usize, d: usize) -> Result<Vec<CanonGraph>, GraphError> {
    Ok(enumerate_h(m)?
        .into_iter()
        .filter(|h| h.min_degree() >= d)
        .collect())
}

fn embed(
    h: &Graph,
    m: usize,
    image: &mut Vec<usize>,
    used: &mut u64,
    h_edges: &[(usize, usize)],
    out: &mut Vec<u64>,
) {
    if image.len() == h.order() {
        let mut mask = 0u64;
        for &(a, b) in h_edges {
            let (x, y) = (image[a], image[b]);
            let (x, y) = if x < y { (x, y) } else { (y, x) };
            mask |= 1 << pair_index(x, y);
        }
        out.push(mask);
        return;
    }
    for v in 0..m {
        if *used >> v & 1 == 1 {
            continue;
        }
        *used |= 1 << v;
        image.push(v);
        embed(h, m, image, used, h_edges, out);
        image.pop();
        *used &= !(1 << v);
    }
}

/// `n_j(H, F)` for `j = 0..=e(H)`: the number of `e(H)`-sets of vertex
/// pairs of `F` using exactly `e(H) - j` edges and `j` non-edges of `F`
/// whose union (isolated vertices dropped) is isomorphic to `H`.
///
/// Each such set is the image of an injective map `V(H) → V(F)`; images are
/// collected and deduplicated, then classified by how many non-edges of `F`
/// they use.
pub fn count_nj(h: &Graph, f: &Graph) -> Result<Vec<u64>, GraphError> {
    let m = f.order();
    if m > MAX_CANON_ORDER {
        return Err(GraphError::TooLarge { order: m, max: MAX_CANON_ORDER });
    }
    if h.has_isolated_vertex() {
        return Err(GraphError::IsolatedVertex);
    }
    if h.order() > m {
        return Err(GraphError::NotEmbeddable(m));
    }
    let e = h.edge_count();
    let non_edges = f.complement().pair_mask();
    let mut images = Vec::new();
    embed(h, m, &mut Vec::with_capacity(h.order()), &mut 0, &h.edges(), &mut images);
    images.sort_unstable();
    images.dedup();
    let mut n = vec![0u64; e + 1];
    for mask in images {
        n[(mask & non_edges).count_ones() as usize] += 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_in_k3() {
        let hs = enumerate_h(3).unwrap();
        let expected: BTreeSet<_> = [Graph::complete(2), Graph::path(2), Graph::complete(3)]
            .iter()
            .map(|g| canonical_form(g).unwrap())
            .collect();
        assert_eq!(hs.iter().copied().collect::<BTreeSet<_>>(), expected);
        assert_eq!(hs.len(), 3);
    }

    #[test]
    fn min_degree_two_in_k4() {
        let hs = enumerate_h_min_degree(4, 2).unwrap();
        let expected: BTreeSet<_> = ["K3", "C4", "diamond", "K4"]
            .iter()
            .map(|s| canonical_form(&Graph::named(s).unwrap()).unwrap())
            .collect();
        assert_eq!(hs.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn order_out_of_range() {
        assert!(enumerate_h(2).is_err());
        assert!(enumerate_h(10).is_err());
    }

    #[test]
    fn class_counts_are_known_values() {
        // graphs on n vertices without isolated vertices, summed over n <= m,
        // with at least one edge: 1, 3, 10, 33, 155 classes for m = 2..6
        assert_eq!(enumerate_h(4).unwrap().len(), 10);
        assert_eq!(enumerate_h(5).unwrap().len(), 33);
        assert_eq!(enumerate_h(6).unwrap().len(), 155);
    }

    #[test]
    fn nj_examples() {
        let f = Graph::named("path3+v").unwrap();
        assert_eq!(count_nj(&Graph::complete(3), &f).unwrap(), vec![0, 2, 5, 3]);
        let c5 = Graph::cycle(5);
        assert_eq!(count_nj(&Graph::path(2), &c5).unwrap(), vec![5, 20, 5]);
        // on each 4-set the induced path a-b-c-d carries three 4-cycles using
        // one, two and three non-edges respectively
        assert_eq!(count_nj(&Graph::cycle(4), &c5).unwrap(), vec![0, 5, 5, 5, 0]);
        assert_eq!(count_nj(&Graph::complete(3), &Graph::complete(3)).unwrap(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn nj_errors() {
        let k3 = Graph::complete(3);
        assert_eq!(count_nj(&Graph::complete(4), &k3), Err(GraphError::NotEmbeddable(3)));
        let with_iso = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(count_nj(&with_iso, &k3), Err(GraphError::IsolatedVertex));
    }
}
