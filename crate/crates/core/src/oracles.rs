//! Brute-force ground truth.
//!
//! Everything here is a direct evaluation of a definition, kept independent
//! of the simulator code paths it validates. Shared surface is limited to
//! the core value types. Instance sizes are guarded so the test suite stays
//! at desk scale.

use crate::error::PipelineError;
use crate::graph::{PairSet, UndirectedWeightedGraph, WeightedDigraph};
use crate::matrix::DistMatrix;
use crate::weight::{ExtWeight, Finite, Inf};

/// Largest vertex count accepted by the cubic triangle enumerations.
pub const ORACLE_VERTEX_CAP: usize = 1 << 10;

fn guard(n: usize) {
    assert!(
        n <= ORACLE_VERTEX_CAP,
        "oracle instance too large: {n} > {ORACLE_VERTEX_CAP}"
    );
}

/// Exact all-pairs shortest distances; fails on a negative cycle.
pub fn floyd_warshall(g: &WeightedDigraph) -> Result<DistMatrix, PipelineError> {
    let n = g.vertex_count();
    guard(n);
    let mut dist = vec![vec![Inf; n]; n];
    for (u, v, w) in g.arcs() {
        dist[u][v] = Finite(w);
    }
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = Finite(0);
    }
    for k in 0..n {
        let row_k = dist[k].clone();
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            let dik = dist[i][k];
            if !dik.is_finite() {
                continue;
            }
            for (j, cell) in dist[i].iter_mut().enumerate() {
                let cand = dik.add(row_k[j]).expect("oracle weights stay in range");
                *cell = cell.min(cand);
            }
        }
    }
    for (v, row) in dist.iter().enumerate() {
        if let Finite(d) = row[v] {
            if d < 0 {
                return Err(PipelineError::NegativeCycle { vertex: v, diag: d });
            }
        }
    }
    Ok(DistMatrix::from_rows(dist).expect("square by construction"))
}

/// Number of vertices w completing a negative triangle with the pair {u, v}.
pub fn gamma_count(g: &UndirectedWeightedGraph, u: usize, v: usize) -> usize {
    guard(g.vertex_count());
    let Some(f_uv) = g.weight(u, v) else {
        return 0;
    };
    let mut count = 0;
    for (w, f_uw) in g.neighbors(u) {
        if w == v {
            continue;
        }
        if let Some(f_wv) = g.weight(w, v) {
            if f_uv + f_uw + f_wv < 0 {
                count += 1;
            }
        }
    }
    count
}

/// The S-pairs across two vertex blocks that some vertex of a third block
/// completes into a negative triangle.
pub fn delta_set(
    g: &UndirectedWeightedGraph,
    s: &PairSet,
    u_block: &[usize],
    v_block: &[usize],
    w_block: &[usize],
) -> PairSet {
    guard(g.vertex_count());
    let in_u = |x: usize| u_block.contains(&x);
    let in_v = |x: usize| v_block.contains(&x);
    let mut out = Vec::new();
    for p in s.iter() {
        let (a, b) = (p.lo(), p.hi());
        let crossing = (in_u(a) && in_v(b)) || (in_u(b) && in_v(a));
        if !crossing {
            continue;
        }
        let Some(f_ab) = g.weight(a, b) else {
            continue;
        };
        let hit = w_block.iter().any(|&w| {
            w != a
                && w != b
                && match (g.weight(a, w), g.weight(w, b)) {
                    (Some(x), Some(y)) => f_ab + x + y < 0,
                    _ => false,
                }
        });
        if hit {
            out.push(*p);
        }
    }
    PairSet::from_pairs(out)
}

/// All pairs of S involved in at least one negative triangle.
pub fn brute_find_edges(g: &UndirectedWeightedGraph, s: &PairSet) -> PairSet {
    guard(g.vertex_count());
    PairSet::from_pairs(
        s.iter()
            .filter(|p| gamma_count(g, p.lo(), p.hi()) > 0)
            .copied()
            .collect(),
    )
}

/// Exact tail `Pr[#successes > threshold]` of a sum of independent Bernoulli
/// trials, by the full O(m^2) distribution recurrence.
pub fn poisson_binomial_tail(probs: &[f64], threshold: usize) -> f64 {
    for &p in probs {
        assert!((0.0..=1.0).contains(&p), "probability {p} outside [0,1]");
    }
    let m = probs.len();
    if threshold >= m {
        return 0.0;
    }
    // dist[c] = Pr[count == c] after processing a prefix of the trials.
    let mut dist = vec![0.0f64; m + 1];
    dist[0] = 1.0;
    for (t, &p) in probs.iter().enumerate() {
        for c in (0..=t + 1).rev() {
            let stay = dist[c] * (1.0 - p);
            let step = if c > 0 { dist[c - 1] * p } else { 0.0 };
            dist[c] = stay + step;
        }
    }
    dist[threshold + 1..].iter().sum()
}

/// Reference APSP by repeated min-plus squaring of the encoded matrix.
/// Cross-checks `floyd_warshall` through an algebraically different route.
pub fn apsp_by_squaring(g: &WeightedDigraph) -> Result<DistMatrix, PipelineError> {
    use crate::matrix::{encode_graph_matrix, min_plus_product};
    let n = g.vertex_count();
    guard(n);
    let mut m = encode_graph_matrix(g);
    let mut hops = 1usize;
    while hops < n.saturating_sub(1).max(1) {
        m = min_plus_product(&m, &m).map_err(PipelineError::Graph)?;
        hops *= 2;
    }
    for (v, d) in m.diagonal().enumerate() {
        if let Finite(d) = d {
            if d < 0 {
                return Err(PipelineError::NegativeCycle { vertex: v, diag: d });
            }
        }
    }
    Ok(m)
}

/// Exact min-plus distance between matrix entries encoded as `ExtWeight`;
/// convenience used by tests comparing against serialized reports.
pub fn entries_equal(a: &DistMatrix, b: &DistMatrix) -> bool {
    if a.dimension() != b.dimension() {
        return false;
    }
    let n = a.dimension();
    (0..n).all(|i| (0..n).all(|j| a.get(i, j) == b.get(i, j)))
}

/// Helper for tests: the multiset of finite entries as `(i, j, w)`.
pub fn finite_entries(m: &DistMatrix) -> Vec<(usize, usize, i64)> {
    let n = m.dimension();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if let ExtWeight::Finite(w) = m.get(i, j) {
                out.push((i, j, w));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Pair;

    #[test]
    fn floyd_warshall_empty_graph_is_identity() {
        let g = WeightedDigraph::new(3, 1);
        let d = floyd_warshall(&g).unwrap();
        assert_eq!(d, DistMatrix::dist_identity(3));
    }

    #[test]
    fn floyd_warshall_path_graph_prefix_sums() {
        let mut g = WeightedDigraph::new(4, 10);
        g.add_arc(0, 1, 2).unwrap();
        g.add_arc(1, 2, 3).unwrap();
        g.add_arc(2, 3, 4).unwrap();
        let d = floyd_warshall(&g).unwrap();
        assert_eq!(d.get(0, 1), Finite(2));
        assert_eq!(d.get(0, 2), Finite(5));
        assert_eq!(d.get(0, 3), Finite(9));
        assert_eq!(d.get(3, 0), Inf);
    }

    #[test]
    fn floyd_warshall_detects_negative_cycle() {
        let mut g = WeightedDigraph::new(2, 5);
        g.add_arc(0, 1, 1).unwrap();
        g.add_arc(1, 0, -2).unwrap();
        assert!(matches!(
            floyd_warshall(&g),
            Err(PipelineError::NegativeCycle { .. })
        ));
    }

    #[test]
    fn gamma_on_empty_graph_is_zero() {
        let g = UndirectedWeightedGraph::new(4);
        assert_eq!(gamma_count(&g, 0, 1), 0);
    }

    #[test]
    fn gamma_counts_planted_triangle_on_each_pair() {
        let mut g = UndirectedWeightedGraph::new(5);
        g.set_edge(0, 1, -1).unwrap();
        g.set_edge(1, 2, -1).unwrap();
        g.set_edge(0, 2, -1).unwrap();
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(gamma_count(&g, u, v), 1);
        }
        assert_eq!(gamma_count(&g, 0, 3), 0);
    }

    #[test]
    fn gamma_complete_negative_k4() {
        let mut g = UndirectedWeightedGraph::new(4);
        for u in 0..4 {
            for v in (u + 1)..4 {
                g.set_edge(u, v, -1).unwrap();
            }
        }
        // Each pair has exactly the two remaining vertices as completions.
        for u in 0..4 {
            for v in (u + 1)..4 {
                assert_eq!(gamma_count(&g, u, v), 2);
            }
        }
    }

    #[test]
    fn delta_set_cases() {
        let mut g = UndirectedWeightedGraph::new(6);
        g.set_edge(0, 2, 1).unwrap();
        g.set_edge(0, 4, -1).unwrap();
        g.set_edge(4, 2, -1).unwrap();
        let s = PairSet::from_pairs(vec![Pair::new(0, 2)]);
        let u_block = [0usize, 1];
        let v_block = [2usize, 3];
        let w_block = [4usize, 5];
        assert_eq!(
            delta_set(&g, &PairSet::new(), &u_block, &v_block, &w_block),
            PairSet::new()
        );
        // w-block disjoint from all triangles.
        assert_eq!(delta_set(&g, &s, &u_block, &v_block, &[5]), PairSet::new());
        let hit = delta_set(&g, &s, &u_block, &v_block, &w_block);
        assert_eq!(hit, s);
    }

    #[test]
    fn brute_find_edges_matches_gamma_filter() {
        let mut g = UndirectedWeightedGraph::new(4);
        g.set_edge(0, 1, 5).unwrap();
        g.set_edge(1, 2, 5).unwrap();
        g.set_edge(0, 2, 5).unwrap();
        let s = PairSet::complete(4);
        // all-positive weights: empty output
        assert_eq!(brute_find_edges(&g, &s), PairSet::new());
        g.set_edge(0, 3, -4).unwrap();
        g.set_edge(1, 3, -4).unwrap();
        let found = brute_find_edges(&g, &s);
        // {0,1,3} has weight 5 - 4 - 4 = -3 < 0.
        let expect = PairSet::from_pairs(vec![Pair::new(0, 1), Pair::new(0, 3), Pair::new(1, 3)]);
        assert_eq!(found, expect);
    }

    #[test]
    fn poisson_binomial_edge_cases() {
        assert_eq!(poisson_binomial_tail(&[0.0; 6], 0), 0.0);
        assert!((poisson_binomial_tail(&[1.0; 6], 5) - 1.0).abs() < 1e-15);
        assert_eq!(poisson_binomial_tail(&[1.0; 6], 6), 0.0);
    }

    #[test]
    fn poisson_binomial_binomial_closed_form() {
        // 12 trials at 1/9, tail beyond 11 = (1/9)^12.
        let p = 1.0 / 9.0;
        let got = poisson_binomial_tail(&[p; 12], 11);
        let expect = p.powi(12);
        assert!((got - expect).abs() <= 1e-18, "{got} vs {expect}");
    }
}
