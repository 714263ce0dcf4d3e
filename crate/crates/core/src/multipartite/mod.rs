//! Bipartitions of multipartite systems, per-cut entangling power, genuine
//! entanglement and tensor-rank fits.

pub mod cp;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::minimize::descent::Direction;
use crate::minimize::estimate::{reduce, EstimateReport, ProductProblem};
use crate::minimize::objective::{Objective, ObjectiveKind};
use crate::sampling::Seed;
use crate::tensor::{schmidt_coefficients, Cut, Gate, PureState, Shape};
use crate::varieties::{generic_min_sr, BipartiteDims};

pub use cp::{cp_fit, cp_fit_curve, cp_fit_with, estimate_border_rank, BorderRankEstimate, CPModel, CpOptions};

/// All `2^{N−1} − 1` canonical cuts, sorted.
pub fn enumerate_cuts(shape: &Shape) -> Vec<Cut> {
    let n = shape.parties();
    let mut cuts = BTreeSet::new();
    for mask in 1u64..(1u64 << n) - 1 {
        let gamma: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        cuts.insert(Cut::canonical(shape, &gamma).expect("proper nonempty subset"));
    }
    cuts.into_iter().collect()
}

/// Seed used for the restarts of the `index`-th cut.
pub fn cut_seed(seed: Seed, index: usize) -> Seed {
    seed.derive(index as u64)
}

/// Per-cut minima and their overall minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteReport {
    pub per_cut: Vec<(Cut, EstimateReport)>,
    pub overall: f64,
    /// Index into `per_cut` of the smallest value; ties go to the first.
    pub argmin: usize,
}

impl MultipartiteReport {
    /// Assembles a report from per-cut results in [`enumerate_cuts`] order.
    pub fn from_cuts(per_cut: Vec<(Cut, EstimateReport)>) -> Result<Self> {
        let (argmin, overall) = per_cut
            .iter()
            .enumerate()
            .map(|(i, (_, r))| (i, r.value))
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, b)) if b <= v => best,
                _ => Some((i, v)),
            })
            .ok_or_else(|| Error::InvalidShape(String::from("no cuts")))?;
        Ok(Self {
            per_cut,
            overall,
            argmin,
        })
    }
}

fn check_multipartite(shape: &Shape) -> Result<()> {
    if shape.parties() < 3 {
        return Err(Error::InvalidShape(format!(
            "multipartite analysis needs at least 3 parties, got {shape}"
        )));
    }
    Ok(())
}

/// Minimizes the cut objective over fully product inputs for every cut.
pub fn multipartite_pmin(gate: &Gate, kind: ObjectiveKind, restarts: usize, seed: Seed) -> Result<MultipartiteReport> {
    check_multipartite(gate.shape())?;
    if restarts == 0 {
        return Err(Error::DomainError(String::from("at least one restart is required")));
    }
    let mut per_cut = Vec::new();
    for (c, cut) in enumerate_cuts(gate.shape()).into_iter().enumerate() {
        let problem = ProductProblem::new(gate, &Objective::new(kind, cut.clone())?)?;
        let s = cut_seed(seed, c);
        let outcomes = (0..restarts)
            .map(|i| problem.run_restart(s, i, Direction::Minimize))
            .collect::<Result<Vec<_>>>()?;
        per_cut.push((cut, reduce(outcomes, Direction::Minimize)?));
    }
    MultipartiteReport::from_cuts(per_cut)
}

/// Generic multipartite minimum Schmidt rank `r₀(d₁, ∏_{i≥2} d_i)` with the
/// dimensions sorted ascending.
pub fn generic_multipartite_sr(dims: &[usize]) -> Result<usize> {
    if dims.len() < 3 {
        return Err(Error::InvalidShape(format!(
            "need at least 3 parties, got {}",
            dims.len()
        )));
    }
    let mut d = dims.to_vec();
    d.sort_unstable();
    let rest = d[1..]
        .iter()
        .try_fold(1usize, |acc, &x| acc.checked_mul(x))
        .ok_or_else(|| Error::Overflow(format!("dimension product of {dims:?}")))?;
    Ok(generic_min_sr(BipartiteDims::new(d[0], rest)?))
}

/// Minimum of `r₀(∏_Γ d, ∏_{Γᶜ} d)` over every cut.
pub fn min_cut_generic_sr(shape: &Shape) -> Result<usize> {
    enumerate_cuts(shape)
        .iter()
        .map(|cut| {
            let (a, b) = cut.matrix_dims(shape);
            Ok(generic_min_sr(BipartiteDims::new(a, b)?))
        })
        .try_fold(usize::MAX, |m, r: Result<usize>| Ok(m.min(r?)))
}

/// Per-cut second Schmidt coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct GenuineReport {
    pub entangled: bool,
    pub margins: Vec<(Cut, f64)>,
    /// First cut whose margin does not exceed the tolerance.
    pub witness: Option<Cut>,
}

/// Whether every cut's second Schmidt coefficient exceeds `tol`.
pub fn genuinely_entangled(state: &PureState, tol: f64) -> Result<GenuineReport> {
    check_multipartite(state.shape())?;
    let mut margins = Vec::new();
    for cut in enumerate_cuts(state.shape()) {
        let s = schmidt_coefficients(state, &cut)?;
        margins.push((cut, s.get(1).copied().unwrap_or(0.0)));
    }
    let witness = margins.iter().find(|(_, m)| *m <= tol).map(|(c, _)| c.clone());
    Ok(GenuineReport {
        entangled: witness.is_none(),
        margins,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{haar_unitary, Seed};
    use crate::tensor::{CVector, C64};
    use crate::varieties::sorted_shapes;

    fn shape(d: &[usize]) -> Shape {
        Shape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn cut_counts() {
        assert_eq!(enumerate_cuts(&shape(&[2, 2, 2])).len(), 3);
        assert_eq!(enumerate_cuts(&shape(&[2, 3, 2, 2])).len(), 7);
        assert_eq!(enumerate_cuts(&shape(&[2; 5])).len(), 15);
        let cuts = enumerate_cuts(&shape(&[2, 2, 3]));
        assert!(cuts.iter().any(|c| c.gamma() == [2]));
        assert!(!cuts.iter().any(|c| c.gamma() == [0, 1]));
    }

    #[test]
    fn generic_values() {
        assert_eq!(generic_multipartite_sr(&[2, 2, 2]).unwrap(), 1);
        assert_eq!(generic_multipartite_sr(&[3, 3, 3]).unwrap(), 2);
        assert!(generic_multipartite_sr(&[3, 3]).is_err());
        for cut in enumerate_cuts(&shape(&[2, 2, 2])) {
            let (a, b) = cut.matrix_dims(&shape(&[2, 2, 2]));
            assert_eq!(generic_min_sr(BipartiteDims::new(a, b).unwrap()), 1);
        }
    }

    #[test]
    fn smallest_cut_attains_minimum() {
        for n in 3..=4 {
            for dims in sorted_shapes(n, 5) {
                assert_eq!(
                    generic_multipartite_sr(&dims).unwrap(),
                    min_cut_generic_sr(&shape(&dims)).unwrap(),
                    "{dims:?}"
                );
            }
        }
    }

    fn basis(i: usize) -> CVector {
        let mut v = CVector::zeros(8);
        v[i] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn genuine_entanglement_examples() {
        let s = shape(&[2, 2, 2]);
        let h = C64::new(0.5f64.sqrt(), 0.0);
        let ghz = PureState::new((basis(0) + basis(7)) * h, s.clone()).unwrap();
        assert!(genuinely_entangled(&ghz, 1e-8).unwrap().entangled);
        let bell0 = PureState::new((basis(0) + basis(6)) * h, s.clone()).unwrap();
        let r = genuinely_entangled(&bell0, 1e-8).unwrap();
        assert!(!r.entangled);
        assert_eq!(r.witness.unwrap().gamma(), &[2]);
        let prod = PureState::new(basis(0), s).unwrap();
        assert!(!genuinely_entangled(&prod, 1e-8).unwrap().entangled);
    }

    #[test]
    fn local_gates_and_overall_minimum() {
        let g = Gate::local(&[
            haar_unitary(2, Seed(1)),
            haar_unitary(2, Seed(2)),
            haar_unitary(2, Seed(3)),
        ])
        .unwrap();
        let rep = multipartite_pmin(&g, ObjectiveKind::Entropy, 4, Seed(5)).unwrap();
        assert!(rep.overall < 1e-9);
        let min = rep.per_cut.iter().map(|(_, r)| r.value).fold(f64::INFINITY, f64::min);
        assert_eq!(rep.overall, min);
        assert_eq!(rep.per_cut[rep.argmin].1.value, rep.overall);
        assert!(multipartite_pmin(&Gate::identity(shape(&[2, 2])), ObjectiveKind::Entropy, 2, Seed(1)).is_err());
    }
}
