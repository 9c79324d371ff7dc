//! Reduction instance builder: distance products as negative-triangle search.
//!
//! Two matrices A, B and a threshold matrix D become one undirected
//! tripartite graph on blocks I, J, K. The pair {i, j} is involved in a
//! negative triangle exactly when `min_k (A[i,k] + B[k,j]) < D[i,j]`, so a
//! negative-triangle finder run on this instance answers per-entry threshold
//! queries about the product.

use crate::error::GraphError;
use crate::graph::{Pair, PairSet, UndirectedWeightedGraph};
use crate::matrix::DistMatrix;
use crate::weight::Finite;

/// Vertex layout of a tripartite instance on `3n` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripartiteLayout {
    pub n: usize,
}

impl TripartiteLayout {
    pub fn vertex_count(&self) -> usize {
        3 * self.n
    }

    pub fn i_vertex(&self, i: usize) -> usize {
        i
    }

    pub fn j_vertex(&self, j: usize) -> usize {
        self.n + j
    }

    pub fn k_vertex(&self, k: usize) -> usize {
        2 * self.n + k
    }

    /// Inverse of `i_vertex`/`j_vertex` for an I x J pair.
    pub fn pair_indices(&self, p: &Pair) -> Option<(usize, usize)> {
        let (lo, hi) = (p.lo(), p.hi());
        if lo < self.n && hi >= self.n && hi < 2 * self.n {
            Some((lo, hi - self.n))
        } else {
            None
        }
    }
}

/// Build the tripartite instance for matrices `a`, `b` and thresholds `d`.
///
/// Returns the graph together with the pair set S of all I x J pairs that
/// admit at least one finite `A[i,k] + B[k,j]`; pairs with no finite middle
/// leg are settled as INF by the caller without any triangle search. INF
/// entries of A and B become non-edges. All entries of `d` must be finite.
#[allow(clippy::needless_range_loop)] // index couples matrices, flags and the layout
pub fn build_tripartite_instance(
    a: &DistMatrix,
    b: &DistMatrix,
    d: &DistMatrix,
) -> Result<(UndirectedWeightedGraph, PairSet), GraphError> {
    let n = a.dimension();
    for m in [b, d] {
        if m.dimension() != n {
            return Err(GraphError::DimensionMismatch {
                left: n,
                right: m.dimension(),
            });
        }
    }
    let layout = TripartiteLayout { n };
    let mut g = UndirectedWeightedGraph::new(layout.vertex_count());

    // Which rows of A / columns of B have any finite entry per k.
    let mut a_fin = vec![false; n]; // per i: row has a finite entry
    let mut b_fin = vec![false; n]; // per j: column has a finite entry
    for i in 0..n {
        for k in 0..n {
            if let Finite(w) = a.get(i, k) {
                g.set_edge(layout.i_vertex(i), layout.k_vertex(k), w)?;
                a_fin[i] = true;
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            if let Finite(w) = b.get(k, j) {
                g.set_edge(layout.j_vertex(j), layout.k_vertex(k), w)?;
                b_fin[j] = true;
            }
        }
    }

    // Finite-middle-leg test per pair: exists k with both legs finite.
    let mut s = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let d_ij = d
                .get(i, j)
                .finite()
                .ok_or(GraphError::NonFiniteThreshold { i, j })?;
            g.set_edge(layout.i_vertex(i), layout.j_vertex(j), -d_ij)?;
            if a_fin[i] && b_fin[j] {
                let joined = (0..n).any(|k| a.get(i, k).is_finite() && b.get(k, j).is_finite());
                if joined {
                    s.push(Pair::new(layout.i_vertex(i), layout.j_vertex(j)));
                }
            }
        }
    }
    Ok((g, PairSet::from_pairs(s)))
}
