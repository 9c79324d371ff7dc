//! Amplitude-exact Grover dynamics.
//!
//! A search runs over a finite domain extended with a dummy element that is
//! always a solution, so the solution set is never empty. The dummy occupies
//! the last domain index. One Grover iteration phase-flips the solutions and
//! reflects about the mean; both the full state vector and the two-level
//! fast path (amplitudes are constant on solutions and on non-solutions)
//! implement exactly this map.

use num_complex::Complex64;
use thiserror::Error;

use crate::rng::Substream;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("truth table already carries a dummy element")]
    AlreadyExtended,
    #[error("search domain needs at least 2 elements, got {0}")]
    DomainTooSmall(usize),
    #[error("ensemble tables must share one domain: {left} vs {right}")]
    DomainMismatch { left: usize, right: usize },
    #[error("operation requires a dummy-extended table")]
    NotExtended,
}

/// A Boolean function over a search domain, as an explicit bitmap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    bits: Vec<bool>,
    extended: bool,
}

impl TruthTable {
    /// Table over the raw domain (no dummy yet).
    pub fn from_bits(bits: Vec<bool>) -> Self {
        TruthTable {
            bits,
            extended: false,
        }
    }

    /// Append the always-true dummy element. Extending twice is an error.
    pub fn dummy_extend(self) -> Result<TruthTable, SearchError> {
        if self.extended {
            return Err(SearchError::AlreadyExtended);
        }
        let mut bits = self.bits;
        bits.push(true);
        Ok(TruthTable {
            bits,
            extended: true,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.bits.len()
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    /// Index of the dummy element, when extended.
    pub fn dummy_index(&self) -> Option<usize> {
        self.extended.then(|| self.bits.len() - 1)
    }

    pub fn is_solution(&self, x: usize) -> bool {
        self.bits[x]
    }

    pub fn solutions(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&x| self.bits[x]).collect()
    }

    pub fn solution_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Solutions excluding the dummy.
    pub fn real_solutions(&self) -> Vec<usize> {
        let cut = if self.extended {
            self.bits.len() - 1
        } else {
            self.bits.len()
        };
        (0..cut).filter(|&x| self.bits[x]).collect()
    }
}

/// A unit-norm state over a search domain.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    amps: Vec<Complex64>,
}

impl AmplitudeVector {
    pub fn uniform(domain: usize) -> Result<Self, SearchError> {
        if domain < 2 {
            return Err(SearchError::DomainTooSmall(domain));
        }
        let a = Complex64::new(1.0 / (domain as f64).sqrt(), 0.0);
        Ok(AmplitudeVector {
            amps: vec![a; domain],
        })
    }

    pub fn domain_size(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, x: usize) -> Complex64 {
        self.amps[x]
    }

    pub fn squared_norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability that a measurement yields a solution of `table`.
    pub fn success_probability(&self, table: &TruthTable) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|&(x, _)| table.is_solution(x))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Measure: sample an element from the squared-amplitude distribution.
    pub fn sample(&self, rng: &mut Substream) -> usize {
        let mut t: f64 = rng.random::<f64>();
        for (x, a) in self.amps.iter().enumerate() {
            t -= a.norm_sqr();
            if t <= 0.0 {
                return x;
            }
        }
        self.amps.len() - 1
    }
}

/// One Grover iteration: phase-flip the solutions of `g`, then reflect about
/// the mean amplitude. Norm-preserving.
pub fn grover_iterate(v: &AmplitudeVector, g: &TruthTable) -> AmplitudeVector {
    assert_eq!(
        v.domain_size(),
        g.domain_size(),
        "state and table domains must agree"
    );
    let d = v.domain_size() as f64;
    let flipped: Vec<Complex64> = v
        .amps
        .iter()
        .enumerate()
        .map(|(x, &a)| if g.is_solution(x) { -a } else { a })
        .collect();
    let mean = flipped.iter().sum::<Complex64>() / d;
    AmplitudeVector {
        amps: flipped.iter().map(|&a| 2.0 * mean - a).collect(),
    }
}

/// The same dynamics on the two-dimensional invariant subspace: one
/// amplitude for the non-solutions, one for the solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    n0: usize,
    n1: usize,
    /// Amplitude on each non-solution.
    pub a: Complex64,
    /// Amplitude on each solution.
    pub b: Complex64,
}

impl TwoLevelState {
    /// Uniform superposition over a domain with `n1` solutions.
    pub fn uniform(n0: usize, n1: usize) -> Self {
        let d = (n0 + n1) as f64;
        let amp = Complex64::new(1.0 / d.sqrt(), 0.0);
        TwoLevelState {
            n0,
            n1,
            a: amp,
            b: amp,
        }
    }

    pub fn iterate(&mut self) {
        let d = (self.n0 + self.n1) as f64;
        let flipped_b = -self.b;
        let mean = (self.a * self.n0 as f64 + flipped_b * self.n1 as f64) / d;
        self.a = 2.0 * mean - self.a;
        self.b = 2.0 * mean - flipped_b;
    }

    pub fn iterate_k(&mut self, k: usize) {
        for _ in 0..k {
            self.iterate();
        }
    }

    pub fn success_probability(&self) -> f64 {
        self.b.norm_sqr() * self.n1 as f64
    }

    pub fn squared_norm(&self) -> f64 {
        self.a.norm_sqr() * self.n0 as f64 + self.b.norm_sqr() * self.n1 as f64
    }

    /// Measure against an explicit solution list (ascending indices over the
    /// domain `[0, n0 + n1)`). Returns the sampled element.
    pub fn sample(&self, solutions: &[usize], rng: &mut Substream) -> usize {
        debug_assert_eq!(solutions.len(), self.n1);
        let p_solution = self.success_probability().clamp(0.0, 1.0);
        let hit = self.n1 > 0 && (self.n0 == 0 || rng.random::<f64>() < p_solution);
        if hit {
            solutions[rng.random_range(0..self.n1)]
        } else {
            // Uniform over the complement of the solution list.
            let mut x = rng.random_range(0..self.n0);
            for &s in solutions {
                if s <= x {
                    x += 1;
                } else {
                    break;
                }
            }
            x
        }
    }
}

/// Closed-form success probability of `k` iterations from uniform:
/// `sin^2((2k+1) asin(sqrt(n1/d)))`.
pub fn closed_form_success(domain: usize, n1: usize, k: usize) -> f64 {
    let theta = ((n1 as f64 / domain as f64).sqrt()).asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(domain: usize, solutions: &[usize]) -> TruthTable {
        let mut bits = vec![false; domain];
        for &s in solutions {
            bits[s] = true;
        }
        TruthTable {
            bits,
            extended: false,
        }
    }

    #[test]
    fn single_solution_domain_four_reaches_certainty_in_one_step() {
        let g = table(4, &[2]);
        let v = AmplitudeVector::uniform(4).unwrap();
        let v1 = grover_iterate(&v, &g);
        assert!((v1.success_probability(&g) - 1.0).abs() < 1e-9);
        assert!((v1.amplitude(2).re - 1.0).abs() < 1e-9);
        assert!((v1.squared_norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_iterations_success_is_uniform_mass() {
        let g = table(8, &[1, 5, 6]);
        let v = AmplitudeVector::uniform(8).unwrap();
        assert!((v.success_probability(&g) - 3.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn all_solutions_fixed_up_to_global_phase() {
        let g = table(6, &[0, 1, 2, 3, 4, 5]);
        let v = AmplitudeVector::uniform(6).unwrap();
        let v1 = grover_iterate(&v, &g);
        for x in 0..6 {
            assert!((v1.amplitude(x) + v.amplitude(x)).norm() < 1e-12);
        }
        assert!((v1.success_probability(&g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_iteration_across_domains() {
        for domain in 2..=64usize {
            for n1 in 1..=(domain / 2).max(1) {
                let g = table(domain, &(0..n1).collect::<Vec<_>>());
                let mut v = AmplitudeVector::uniform(domain).unwrap();
                let kmax = (2.0 * (domain as f64).sqrt()).ceil() as usize;
                for k in 0..=kmax {
                    let expect = closed_form_success(domain, n1, k);
                    assert!(
                        (v.success_probability(&g) - expect).abs() < 1e-9,
                        "domain {domain} n1 {n1} k {k}"
                    );
                    assert!((v.squared_norm() - 1.0).abs() < 1e-9);
                    v = grover_iterate(&v, &g);
                }
            }
        }
    }

    #[test]
    fn two_level_state_agrees_with_full_vector() {
        for (domain, n1) in [(5usize, 2usize), (16, 3), (9, 4)] {
            let sols: Vec<usize> = (0..n1).map(|i| 2 * i).collect::<Vec<_>>();
            let g = table(domain, &sols);
            let mut v = AmplitudeVector::uniform(domain).unwrap();
            let mut t = TwoLevelState::uniform(domain - n1, n1);
            for _ in 0..10 {
                v = grover_iterate(&v, &g);
                t.iterate();
                assert!((v.success_probability(&g) - t.success_probability()).abs() < 1e-12);
                assert!((t.squared_norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dummy_extension_counts_and_flags() {
        let g = TruthTable::from_bits(vec![false; 4]);
        let e = g.dummy_extend().unwrap();
        assert_eq!(e.solution_count(), 1);
        assert_eq!(e.dummy_index(), Some(4));
        assert!(e.clone().dummy_extend().is_err());

        let g2 = TruthTable::from_bits(vec![true, false, true]);
        let e2 = g2.dummy_extend().unwrap();
        assert_eq!(e2.solution_count(), 3); // k + 1
        assert_eq!(e2.real_solutions(), vec![0, 2]);
    }
}
