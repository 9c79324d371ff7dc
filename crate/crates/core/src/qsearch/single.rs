//! Single distributed search, simulated at the amplitude level.

use rand::Rng;

use crate::rng::Substream;

use super::amplitude::{SearchError, TruthTable, TwoLevelState};
use super::schedule::schedule_iterations;

/// Knobs shared by the search drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    /// Amplification passes over the schedule.
    pub repetitions: usize,
    /// Uniform classical samples tried before any amplitude work; catches
    /// solution-dense tables cheaply.
    pub pretest_samples: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            repetitions: 2,
            pretest_samples: 3,
        }
    }
}

/// Find a solution of the (dummy-extended) table. Returns the dummy index
/// only when no real solution was ever observed: for solvable tables the
/// schedule finds a real solution with high probability, and a measured
/// dummy just triggers another attempt.
pub fn grover_search(
    table: &TruthTable,
    params: &SearchParams,
    rng: &mut Substream,
) -> Result<usize, SearchError> {
    if !table.is_extended() {
        return Err(SearchError::NotExtended);
    }
    let d = table.domain_size();
    if d < 2 {
        return Err(SearchError::DomainTooSmall(d));
    }
    let dummy = table.dummy_index().expect("extended table");
    let solutions = table.solutions();
    let n1 = solutions.len();
    let n0 = d - n1;

    // Classical pretest over the real domain.
    for _ in 0..params.pretest_samples {
        let x = rng.random_range(0..dummy);
        if table.is_solution(x) {
            return Ok(x);
        }
    }
    if n0 == 0 {
        // Everything solves; any real element does.
        return Ok(rng.random_range(0..dummy));
    }

    for _ in 0..params.repetitions.max(1) {
        for k in schedule_iterations(d, rng) {
            let mut state = TwoLevelState::uniform(n0, n1);
            state.iterate_k(k);
            let x = state.sample(&solutions, rng);
            if table.is_solution(x) && x != dummy {
                return Ok(x);
            }
            // Dummy measurements are retried: with several solutions the
            // measurement is near-uniform among them, so a real one surfaces
            // after a few draws when it exists.
        }
    }
    Ok(dummy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seeder;

    fn extended(domain: usize, solutions: &[usize]) -> TruthTable {
        let mut bits = vec![false; domain];
        for &s in solutions {
            bits[s] = true;
        }
        TruthTable::from_bits(bits).dummy_extend().unwrap()
    }

    #[test]
    fn empty_predicate_returns_dummy() {
        let t = extended(4, &[]);
        let seeder = Seeder::new(5);
        for seed in 0..50u64 {
            let mut rng = seeder.substream("empty", &[seed]);
            assert_eq!(
                grover_search(&t, &SearchParams::default(), &mut rng).unwrap(),
                4
            );
        }
    }

    #[test]
    fn single_solution_found_at_high_rate() {
        let t = extended(4, &[1]);
        let seeder = Seeder::new(6);
        let params = SearchParams {
            pretest_samples: 0,
            ..SearchParams::default()
        };
        let mut hits = 0;
        for seed in 0..1000u64 {
            let mut rng = seeder.substream("single", &[seed]);
            if grover_search(&t, &params, &mut rng).unwrap() == 1 {
                hits += 1;
            }
        }
        assert!(hits >= 990, "hit rate {hits}/1000");
    }

    #[test]
    fn never_dummy_when_real_solutions_exist() {
        // All real elements solve: output must be a real element.
        let t = extended(6, &[0, 1, 2, 3, 4, 5]);
        let seeder = Seeder::new(7);
        for seed in 0..200u64 {
            let mut rng = seeder.substream("all", &[seed]);
            let x = grover_search(&t, &SearchParams::default(), &mut rng).unwrap();
            assert!(x < 6);
        }
    }

    #[test]
    fn unextended_table_is_rejected() {
        let t = TruthTable::from_bits(vec![true, false]);
        let seeder = Seeder::new(8);
        let mut rng = seeder.substream("x", &[0]);
        assert!(matches!(
            grover_search(&t, &SearchParams::default(), &mut rng),
            Err(SearchError::NotExtended)
        ));
    }
}
