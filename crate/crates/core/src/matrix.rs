//! Square matrices over the min-plus semiring.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::WeightedDigraph;
use crate::weight::{ExtWeight, Finite, Inf};

/// A square matrix of extended weights, the carrier of the min-plus product.
///
/// `max_mag` records the largest finite entry magnitude; repeated squaring
/// widens it (up to `n * W` for distance computations).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistMatrix {
    n: usize,
    entries: Vec<ExtWeight>,
    max_mag: i64,
}

impl DistMatrix {
    /// All-INF matrix.
    pub fn filled_inf(n: usize) -> Self {
        assert!(n > 0);
        DistMatrix {
            n,
            entries: vec![Inf; n * n],
            max_mag: 0,
        }
    }

    /// The min-plus identity: 0 on the diagonal, INF elsewhere.
    pub fn dist_identity(n: usize) -> Self {
        let mut m = Self::filled_inf(n);
        for i in 0..n {
            m.entries[i * n + i] = Finite(0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ExtWeight>>) -> Result<Self, GraphError> {
        let n = rows.len();
        assert!(n > 0);
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(GraphError::DimensionMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        let max_mag = entries.iter().map(|w| w.magnitude()).max().unwrap_or(0);
        Ok(DistMatrix {
            n,
            entries,
            max_mag,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn max_magnitude(&self) -> i64 {
        self.max_mag
    }

    pub fn get(&self, i: usize, j: usize) -> ExtWeight {
        debug_assert!(i < self.n && j < self.n);
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, w: ExtWeight) {
        debug_assert!(i < self.n && j < self.n);
        self.entries[i * self.n + j] = w;
        self.max_mag = self.max_mag.max(w.magnitude());
    }

    pub fn rows(&self) -> Vec<Vec<ExtWeight>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Recompute `max_mag` from the entries (after bulk edits).
    pub fn refresh_bound(&mut self) {
        self.max_mag = self
            .entries
            .iter()
            .map(|w| w.magnitude())
            .max()
            .unwrap_or(0);
    }

    /// Entries of the main diagonal.
    pub fn diagonal(&self) -> impl Iterator<Item = ExtWeight> + '_ {
        (0..self.n).map(|i| self.entries[i * self.n + i])
    }
}

/// Direct evaluation of the distance product `C[i,j] = min_k (A[i,k] + B[k,j])`.
///
/// This is the definitional route; the triangle-based reduction is checked
/// against it.
pub fn min_plus_product(a: &DistMatrix, b: &DistMatrix) -> Result<DistMatrix, GraphError> {
    if a.n != b.n {
        return Err(GraphError::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    let n = a.n;
    let mut c = DistMatrix::filled_inf(n);
    for i in 0..n {
        for j in 0..n {
            let mut best = Inf;
            for k in 0..n {
                best = best.min(a.get(i, k).add(b.get(k, j))?);
            }
            c.entries[i * n + j] = best;
        }
    }
    c.refresh_bound();
    Ok(c)
}

/// Encode a digraph as its distance matrix: 0 on the diagonal, arc weights
/// where arcs exist, INF elsewhere.
pub fn encode_graph_matrix(g: &WeightedDigraph) -> DistMatrix {
    let n = g.vertex_count();
    let mut m = DistMatrix::dist_identity(n);
    for (u, v, w) in g.arcs() {
        m.set(u, v, Finite(w));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<ExtWeight>>) -> DistMatrix {
        DistMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let b = m(vec![vec![Finite(2), Finite(-1)], vec![Inf, Finite(4)]]);
        let id = DistMatrix::dist_identity(2);
        assert_eq!(min_plus_product(&id, &b).unwrap(), b);
        assert_eq!(min_plus_product(&b, &id).unwrap(), b);
    }

    #[test]
    fn two_by_two_by_hand() {
        let a = m(vec![vec![Finite(0), Finite(3)], vec![Inf, Finite(0)]]);
        let b = m(vec![vec![Finite(0), Finite(1)], vec![Inf, Finite(0)]]);
        let c = min_plus_product(&a, &b).unwrap();
        let expect = m(vec![vec![Finite(0), Finite(1)], vec![Inf, Finite(0)]]);
        assert_eq!(c, expect);
    }

    #[test]
    fn fully_inf_row_propagates() {
        // Row 0 of A entirely INF (including the diagonal): row 0 of C is INF.
        let a = m(vec![vec![Inf, Inf], vec![Finite(1), Finite(0)]]);
        let b = m(vec![vec![Finite(5), Finite(6)], vec![Finite(7), Finite(8)]]);
        let c = min_plus_product(&a, &b).unwrap();
        assert_eq!(c.get(0, 0), Inf);
        assert_eq!(c.get(0, 1), Inf);
        // With a finite diagonal A[i,i], row i reaches B's row i.
        let a2 = m(vec![vec![Finite(2), Inf], vec![Finite(1), Finite(0)]]);
        let c2 = min_plus_product(&a2, &b).unwrap();
        assert_eq!(c2.get(0, 0), Finite(7));
        assert_eq!(c2.get(0, 1), Finite(8));
    }

    #[test]
    fn encode_empty_graph() {
        let g = WeightedDigraph::new(2, 1);
        let m = encode_graph_matrix(&g);
        assert_eq!(m.get(0, 0), Finite(0));
        assert_eq!(m.get(1, 1), Finite(0));
        assert_eq!(m.get(0, 1), Inf);
        assert_eq!(m.get(1, 0), Inf);
    }

    #[test]
    fn encode_single_arc() {
        let mut g = WeightedDigraph::new(3, 5);
        g.add_arc(1, 2, 5).unwrap();
        let m = encode_graph_matrix(&g);
        assert_eq!(m.get(1, 2), Finite(5));
        for i in 0..3 {
            assert_eq!(m.get(i, i), Finite(0));
        }
        assert_eq!(m.get(0, 1), Inf);
        assert_eq!(m.get(2, 1), Inf);
    }

    #[test]
    fn encode_complete_digraph() {
        let mut g = WeightedDigraph::new(3, 1);
        for u in 0..3 {
            for v in 0..3 {
                if u != v {
                    g.add_arc(u, v, 1).unwrap();
                }
            }
        }
        let m = encode_graph_matrix(&g);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { Finite(0) } else { Finite(1) };
                assert_eq!(m.get(i, j), expect);
            }
        }
    }
}
