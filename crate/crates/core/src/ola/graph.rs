use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Build a graph, rejecting loops, repeated edges and endpoints out of
    /// range. Edges are stored with the smaller endpoint first, sorted.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::DimensionMismatch(format!("edge {u}-{v} outside 0..{n}")));
            }
            if u == v {
                return Err(Error::DimensionMismatch(format!("loop at vertex {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::DimensionMismatch(format!("repeated edge {u}-{v}")));
            }
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        Ok(Graph { n, edges, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Copy with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Graph::new(self.n, &edges)
    }

    pub fn is_vertex_cover(&self, cover: &[usize]) -> bool {
        let mut inside = vec![false; self.n];
        for &c in cover {
            inside[c] = true;
        }
        self.edges.iter().all(|&(u, v)| inside[u] || inside[v])
    }
}

/// A bijection from vertices to positions `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Arrangement {
    positions: Vec<usize>,
}

impl Arrangement {
    /// From explicit positions; fails unless they are a permutation of `1..=n`.
    pub fn from_positions(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        let mut seen = vec![false; n];
        for &p in &positions {
            if p == 0 || p > n || seen[p - 1] {
                return Err(Error::DimensionMismatch(format!("positions are not a permutation of 1..={n}")));
            }
            seen[p - 1] = true;
        }
        Ok(Arrangement { positions })
    }

    /// From the left-to-right vertex order.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let mut positions = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            if v >= order.len() {
                return Err(Error::DimensionMismatch(format!("vertex {v} outside the order")));
            }
            positions[v] = i + 1;
        }
        Arrangement::from_positions(positions)
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> usize {
        self.positions[v]
    }

    /// Sum of edge stretches.
    pub fn cost(&self, g: &Graph) -> u64 {
        g.edges().iter().map(|&(u, v)| self.positions[u].abs_diff(self.positions[v]) as u64).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_edges() {
        assert!(Graph::new(2, &[(0, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn arrangement_cost() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let a = Arrangement::from_order(&[2, 0, 1]).unwrap();
        assert_eq!(a.positions(), &[2, 3, 1]);
        assert_eq!(a.cost(&g), 4);
        assert!(Arrangement::from_positions(vec![1, 1]).is_err());
    }
}
