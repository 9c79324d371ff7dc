//! Iteration schedules for searches with an unknown number of solutions.
//!
//! One pass draws iteration counts from a geometrically growing window, the
//! classic recipe for amplitude amplification without knowing how many
//! solutions exist. The pass length is fixed up front so the total iteration
//! budget is deterministic: the sum of one pass is at most
//! `16 * sqrt(d) * log2(d)` for a domain of size `d`.

use rand::Rng;

use crate::rng::Substream;

/// Window growth per step.
const GROWTH: f64 = 1.2;
/// Extra steps past the point where the window saturates at `sqrt(d)`.
const TAIL_STEPS: usize = 6;

/// Number of steps in one pass over a domain of size `d`.
pub fn pass_length(domain: usize) -> usize {
    let root = (domain.max(2) as f64).sqrt();
    (root.ln() / GROWTH.ln()).ceil().max(0.0) as usize + TAIL_STEPS
}

/// One amplification pass: a sequence of iteration counts `k_j`, each drawn
/// uniformly from `[0, min(ceil(GROWTH^j), ceil(sqrt(d)))]`.
pub fn schedule_iterations(domain: usize, rng: &mut Substream) -> Vec<usize> {
    assert!(domain >= 2, "domain needs at least 2 elements");
    let cap = (domain as f64).sqrt().ceil() as usize;
    (1..=pass_length(domain))
        .map(|j| {
            let window = (GROWTH.powi(j as i32).ceil() as usize).min(cap);
            rng.random_range(0..=window)
        })
        .collect()
}

/// Deterministic upper bound on the summed iterations of one pass.
pub fn pass_iteration_bound(domain: usize) -> usize {
    let cap = (domain as f64).sqrt().ceil() as usize;
    pass_length(domain) * cap
}
