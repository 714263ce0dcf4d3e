//! Thread-pool versions of the core estimators.
//!
//! Restarts are seeded by index exactly as in the sequential routines, so
//! results are identical to them regardless of the pool size.

use epower_core::minimize::{
    average, reduce, AverageReport, Direction, EstimateReport, Objective, ObjectiveKind, ProductProblem,
    SubspaceProblem,
};
use epower_core::multipartite::{cut_seed, enumerate_cuts, MultipartiteReport};
use epower_core::sampling::{Seed, Subspace};
use epower_core::tensor::{Cut, Gate};
use epower_core::{Error, Result};
use rayon::prelude::*;

use crate::error::CliResult;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "EPOWER_THREADS";

/// Pool with `threads` workers, falling back to `EPOWER_THREADS` and then
/// to the available parallelism.
pub fn build_pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let n = threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|s| s.parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?)
}

fn check(restarts: usize) -> Result<()> {
    if restarts == 0 {
        return Err(Error::DomainError(String::from("at least one restart is required")));
    }
    Ok(())
}

fn extremum(problem: &ProductProblem, restarts: usize, seed: Seed, direction: Direction) -> Result<EstimateReport> {
    check(restarts)?;
    let outcomes = (0..restarts)
        .into_par_iter()
        .map(|i| problem.run_restart(seed, i, direction))
        .collect::<Result<Vec<_>>>()?;
    reduce(outcomes, direction)
}

pub fn estimate_pmin(gate: &Gate, objective: &Objective, restarts: usize, seed: Seed) -> Result<EstimateReport> {
    extremum(
        &ProductProblem::new(gate, objective)?,
        restarts,
        seed,
        Direction::Minimize,
    )
}

pub fn estimate_pmax(gate: &Gate, objective: &Objective, restarts: usize, seed: Seed) -> Result<EstimateReport> {
    extremum(
        &ProductProblem::new(gate, objective)?,
        restarts,
        seed,
        Direction::Maximize,
    )
}

pub fn estimate_pavg(gate: &Gate, objective: &Objective, samples: usize, seed: Seed) -> Result<AverageReport> {
    check(samples)?;
    let p = ProductProblem::new(gate, objective)?;
    let values = (0..samples)
        .into_par_iter()
        .map(|i| p.sample(seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(average(&values))
}

pub fn min_over_subspace(
    subspace: &Subspace,
    cut: &Cut,
    k: usize,
    restarts: usize,
    seed: Seed,
) -> Result<EstimateReport> {
    check(restarts)?;
    let p = SubspaceProblem::new(subspace, cut, k)?;
    let outcomes = (0..restarts)
        .into_par_iter()
        .map(|i| p.run_restart(seed, i))
        .collect::<Result<Vec<_>>>()?;
    reduce(outcomes, Direction::Minimize)
}

pub fn multipartite_pmin(gate: &Gate, kind: ObjectiveKind, restarts: usize, seed: Seed) -> Result<MultipartiteReport> {
    if gate.shape().parties() < 3 {
        return Err(Error::InvalidShape(format!(
            "multipartite analysis needs at least 3 parties, got {}",
            gate.shape()
        )));
    }
    let per_cut = enumerate_cuts(gate.shape())
        .into_par_iter()
        .enumerate()
        .map(|(c, cut)| {
            let p = ProductProblem::new(gate, &Objective::new(kind, cut.clone())?)?;
            Ok((cut, extremum(&p, restarts, cut_seed(seed, c), Direction::Minimize)?))
        })
        .collect::<Result<Vec<_>>>()?;
    MultipartiteReport::from_cuts(per_cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use epower_core::minimize as seq;
    use epower_core::sampling::haar_unitary;
    use epower_core::tensor::Shape;

    #[test]
    fn matches_sequential() {
        let g = Gate::new(haar_unitary(6, Seed(2)), Shape::bipartite(2, 3).unwrap()).unwrap();
        let obj = Objective::entropy(Cut::new(2, &[0]).unwrap());
        let pool = build_pool(Some(3)).unwrap();
        let par = pool.install(|| estimate_pmin(&g, &obj, 6, Seed(9))).unwrap();
        assert_eq!(par, seq::estimate_pmin(&g, &obj, 6, Seed(9)).unwrap());
        let par = pool.install(|| estimate_pavg(&g, &obj, 20, Seed(9))).unwrap();
        assert_eq!(par, seq::estimate_pavg(&g, &obj, 20, Seed(9)).unwrap());
        let g3 = Gate::new(haar_unitary(8, Seed(5)), Shape::new(vec![2, 2, 2]).unwrap()).unwrap();
        let par = pool
            .install(|| multipartite_pmin(&g3, ObjectiveKind::TailEnergy(1), 3, Seed(1)))
            .unwrap();
        let s = epower_core::multipartite::multipartite_pmin(&g3, ObjectiveKind::TailEnergy(1), 3, Seed(1)).unwrap();
        assert_eq!(par, s);
    }
}
