//! Node labeling schemes used by the triangle-detection pipeline.
//!
//! Besides the identity labeling (node ids are graph vertices), the pipeline
//! views the same `n` nodes through:
//!
//! * a coarse partition of the vertices into `n^(1/4)` blocks of `n^(3/4)`;
//! * a fine partition into `sqrt(n)` blocks of `sqrt(n)`;
//! * the *triple* scheme: nodes in bijection with
//!   (coarse block, coarse block, fine block), exactly `n` triples;
//! * the *helper* scheme: nodes in bijection with
//!   (coarse block, coarse block, helper index in `[sqrt(n)]`);
//! * per-class *duplication* schemes: a partial bijection between nodes and
//!   (triple, copy index) used to widen bandwidth toward hot triples.
//!
//! All schemes require `n` to be a fourth power; callers pad their input
//! with isolated vertices to the next fourth power first.

use crate::error::NetError;
use crate::net::NodeId;

/// Flat index of a (coarse, coarse, fine) triple; lies in `[0, n)`.
pub type TripleIdx = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelSchemes {
    n: usize,
    root4: usize,
    root2: usize,
    root34: usize,
}

/// Smallest fourth power >= x (and >= 16, the smallest usable network).
pub fn pad_to_fourth_power(x: usize) -> usize {
    let mut r = 2usize;
    while r * r * r * r < x {
        r += 1;
    }
    r * r * r * r
}

impl LabelSchemes {
    /// Build the canonical schemes for an `n`-node network.
    pub fn build(n: usize) -> Result<Self, NetError> {
        let root4 = (n as f64).powf(0.25).round() as usize;
        if root4 < 2 || root4 * root4 * root4 * root4 != n {
            return Err(NetError::NotFourthPower { n });
        }
        Ok(LabelSchemes {
            n,
            root4,
            root2: root4 * root4,
            root34: root4 * root4 * root4,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n^(1/4)`: number of coarse blocks.
    pub fn coarse_count(&self) -> usize {
        self.root4
    }

    /// `sqrt(n)`: number of fine blocks, helpers per block pair, fine block size.
    pub fn fine_count(&self) -> usize {
        self.root2
    }

    /// `n^(3/4)`: coarse block size.
    pub fn coarse_size(&self) -> usize {
        self.root34
    }

    pub fn coarse_block_of(&self, v: usize) -> usize {
        debug_assert!(v < self.n);
        v / self.root34
    }

    pub fn fine_block_of(&self, v: usize) -> usize {
        debug_assert!(v < self.n);
        v / self.root2
    }

    pub fn coarse_members(&self, block: usize) -> std::ops::Range<usize> {
        block * self.root34..(block + 1) * self.root34
    }

    pub fn fine_members(&self, block: usize) -> std::ops::Range<usize> {
        block * self.root2..(block + 1) * self.root2
    }

    /// Total number of (coarse, coarse, fine) triples; always equals `n`.
    pub fn triple_count(&self) -> usize {
        self.n
    }

    pub fn triple_index(&self, ub: usize, vb: usize, wb: usize) -> TripleIdx {
        debug_assert!(ub < self.root4 && vb < self.root4 && wb < self.root2);
        (ub * self.root4 + vb) * self.root2 + wb
    }

    pub fn triple_parts(&self, t: TripleIdx) -> (usize, usize, usize) {
        let wb = t % self.root2;
        let uv = t / self.root2;
        (uv / self.root4, uv % self.root4, wb)
    }

    /// Node hosting a triple under the triple scheme.
    pub fn triple_node(&self, t: TripleIdx) -> NodeId {
        t
    }

    /// Node hosting (coarse pair, helper index) under the helper scheme.
    pub fn helper_node(&self, ub: usize, vb: usize, x: usize) -> NodeId {
        debug_assert!(ub < self.root4 && vb < self.root4 && x < self.root2);
        (ub * self.root4 + vb) * self.root2 + x
    }

    pub fn helper_parts(&self, node: NodeId) -> (usize, usize, usize) {
        self.triple_parts(node)
    }

    /// Index of an ordered coarse block pair, in `[0, sqrt(n))`.
    pub fn pair_slot(&self, ub: usize, vb: usize) -> usize {
        ub * self.root4 + vb
    }

    pub fn pair_slots(&self) -> usize {
        self.root4 * self.root4
    }
}

/// Partial bijection node <-> (triple, copy) for one class of triples.
///
/// The requested copy count is clamped so all labels fit in `[0, n)`; at
/// least one copy per triple is always assigned.
#[derive(Debug, Clone)]
pub struct DuplicationScheme {
    triples: Vec<TripleIdx>,
    copies: usize,
}

impl DuplicationScheme {
    pub fn assign(schemes: &LabelSchemes, mut triples: Vec<TripleIdx>, requested: usize) -> Self {
        triples.sort_unstable();
        triples.dedup();
        let copies = if triples.is_empty() {
            1
        } else {
            requested.clamp(1, schemes.n() / triples.len()).max(1)
        };
        DuplicationScheme { triples, copies }
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn triples(&self) -> &[TripleIdx] {
        &self.triples
    }

    /// Node labeled (triple, copy). `slot` is the triple's rank within the class.
    pub fn node_for(&self, slot: usize, copy: usize) -> NodeId {
        debug_assert!(copy < self.copies);
        slot * self.copies + copy
    }

    pub fn slot_of(&self, triple: TripleIdx) -> Option<usize> {
        self.triples.binary_search(&triple).ok()
    }
}
