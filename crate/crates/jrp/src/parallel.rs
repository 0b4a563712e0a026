//! Multi-threaded solve with the same result as the sequential one.

use jrp_core::solver::{Accumulator, SolvePlan, SolveResult, SolverConfig};
use jrp_core::{Rational, Result};
use rayon::prelude::*;

/// Guesses handed to the pool per round.
const CHUNK: usize = 4096;

/// Evaluates guesses on `threads` workers and reduces with the plan's total
/// order, so every thread count yields the same [`SolveResult`].
pub fn solve_parallel(
    instance: &jrp_core::eoq::Instance,
    epsilon: &Rational,
    config: &SolverConfig,
    threads: usize,
) -> anyhow::Result<SolveResult> {
    let plan = SolvePlan::new(instance, epsilon, config)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
    let mut stream = plan.guesses()?;
    let mut total = Accumulator::default();
    loop {
        let chunk: Vec<_> = stream.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let part = pool.install(|| {
            chunk
                .par_iter()
                .try_fold(Accumulator::default, |mut acc, (ordinal, guess)| -> Result<Accumulator> {
                    plan.evaluate_guess(&mut acc, *ordinal, guess)?;
                    Ok(acc)
                })
                .try_reduce(Accumulator::default, |a, b| Ok(plan.merge(a, b)))
        })?;
        total = plan.merge(total, part);
    }
    Ok(plan.finish(total, stream.budget_exhausted())?)
}
