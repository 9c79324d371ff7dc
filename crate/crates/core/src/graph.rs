//! Graph types: weighted digraphs, undirected weighted graphs, pair sets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// A directed graph with finite integer arc weights and no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    /// Arc map, ordered pair -> weight. Absent = no arc.
    arcs: BTreeMap<(usize, usize), i64>,
    /// Largest weight magnitude the graph promises to stay within.
    bound: i64,
}

impl WeightedDigraph {
    pub fn new(n: usize, bound: i64) -> Self {
        assert!(n > 0, "graph needs at least one vertex");
        WeightedDigraph {
            n,
            arcs: BTreeMap::new(),
            bound,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn weight_bound(&self) -> i64 {
        self.bound
    }

    pub fn add_arc(&mut self, from: usize, to: usize, weight: i64) -> Result<(), GraphError> {
        if from >= self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: from,
                n: self.n,
            });
        }
        if to >= self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: to,
                n: self.n,
            });
        }
        if from == to {
            return Err(GraphError::SelfLoop { vertex: from });
        }
        if weight.abs() > self.bound {
            return Err(GraphError::WeightOutOfBounds {
                weight,
                bound: self.bound,
            });
        }
        self.arcs.insert((from, to), weight);
        Ok(())
    }

    pub fn arc(&self, from: usize, to: usize) -> Option<i64> {
        self.arcs.get(&(from, to)).copied()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.arcs.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }
}

/// An undirected graph with finite integer edge weights, no self-loops.
/// Access is symmetric: `weight(u, v) == weight(v, u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedWeightedGraph {
    n: usize,
    /// Canonical storage under min/max vertex order.
    edges: BTreeMap<(usize, usize), i64>,
    /// Per-vertex adjacency for fast neighbor scans.
    adj: Vec<BTreeMap<usize, i64>>,
}

impl UndirectedWeightedGraph {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "graph needs at least one vertex");
        UndirectedWeightedGraph {
            n,
            edges: BTreeMap::new(),
            adj: vec![BTreeMap::new(); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn set_edge(&mut self, u: usize, v: usize, weight: i64) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: u,
                n: self.n,
            });
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            });
        }
        if u == v {
            return Err(GraphError::SelfLoop { vertex: u });
        }
        self.edges.insert((u.min(v), u.max(v)), weight);
        self.adj[u].insert(v, weight);
        self.adj[v].insert(u, weight);
        Ok(())
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<i64> {
        self.edges.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.adj[u].iter().map(|(&v, &w)| (v, w))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_weight_magnitude(&self) -> i64 {
        self.edges.values().map(|w| w.abs()).max().unwrap_or(0)
    }
}

/// An unordered vertex pair, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    a: usize,
    b: usize,
}

impl Pair {
    pub fn new(u: usize, v: usize) -> Self {
        assert_ne!(u, v, "pair {{u,u}} is not allowed");
        Pair {
            a: u.min(v),
            b: u.max(v),
        }
    }

    pub fn lo(&self) -> usize {
        self.a
    }

    pub fn hi(&self) -> usize {
        self.b
    }

    pub fn contains(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint that is not `v`.
    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// A set of unordered vertex pairs over a graph's vertex range.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSet {
    pairs: Vec<Pair>,
}

impl PairSet {
    pub fn new() -> Self {
        PairSet { pairs: Vec::new() }
    }

    pub fn from_pairs(mut pairs: Vec<Pair>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        PairSet { pairs }
    }

    pub fn insert(&mut self, p: Pair) {
        if let Err(pos) = self.pairs.binary_search(&p) {
            self.pairs.insert(pos, p);
        }
    }

    pub fn contains(&self, p: &Pair) -> bool {
        self.pairs.binary_search(p).is_ok()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pair> {
        self.pairs.iter()
    }

    pub fn validate(&self, n: usize) -> Result<(), GraphError> {
        for p in &self.pairs {
            if p.hi() >= n {
                return Err(GraphError::VertexOutOfRange { vertex: p.hi(), n });
            }
        }
        Ok(())
    }

    pub fn union(&self, other: &PairSet) -> PairSet {
        let mut pairs = self.pairs.clone();
        pairs.extend(other.pairs.iter().copied());
        PairSet::from_pairs(pairs)
    }

    pub fn difference(&self, other: &PairSet) -> PairSet {
        PairSet {
            pairs: self
                .pairs
                .iter()
                .copied()
                .filter(|p| !other.contains(p))
                .collect(),
        }
    }

    /// All pairs over `[0, n)`.
    pub fn complete(n: usize) -> PairSet {
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        for u in 0..n {
            for v in (u + 1)..n {
                pairs.push(Pair::new(u, v));
            }
        }
        PairSet { pairs }
    }
}

impl FromIterator<Pair> for PairSet {
    fn from_iter<T: IntoIterator<Item = Pair>>(iter: T) -> Self {
        PairSet::from_pairs(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digraph_rejects_bad_arcs() {
        let mut g = WeightedDigraph::new(3, 10);
        assert!(g.add_arc(0, 0, 1).is_err());
        assert!(g.add_arc(0, 3, 1).is_err());
        assert!(g.add_arc(0, 1, 11).is_err());
        g.add_arc(0, 1, -10).unwrap();
        assert_eq!(g.arc(0, 1), Some(-10));
        assert_eq!(g.arc(1, 0), None);
    }

    #[test]
    fn undirected_access_is_symmetric() {
        let mut g = UndirectedWeightedGraph::new(4);
        g.set_edge(2, 1, -7).unwrap();
        assert_eq!(g.weight(1, 2), Some(-7));
        assert_eq!(g.weight(2, 1), Some(-7));
        assert_eq!(g.weight(0, 3), None);
        assert!(g.set_edge(1, 1, 0).is_err());
    }

    #[test]
    fn pair_set_dedupes_and_orders() {
        let s = PairSet::from_pairs(vec![Pair::new(2, 1), Pair::new(1, 2), Pair::new(0, 3)]);
        assert_eq!(s.len(), 2);
        assert!(s.contains(&Pair::new(1, 2)));
        assert_eq!(s.iter().next().unwrap(), &Pair::new(0, 3));
    }
}
