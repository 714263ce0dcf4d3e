//! Entanglement objectives on cut matrices, with analytic gradients.
//!
//! Gradients are real gradients with respect to the complex cut matrix `M`:
//! the returned `G` satisfies `dF = Re tr(G† dM)`.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::tensor::{
    entropy_from_coefficients, negativity_from_coefficients, sorted_singular_values, tail_from_coefficients, CMatrix,
    Cut, C64,
};

/// Squared Schmidt coefficients below this contribute nothing to the entropy
/// objective or its gradient.
pub const ENTROPY_CLAMP: f64 = 1e-15;

/// Which entanglement measure is optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    /// Entanglement entropy in bits.
    Entropy,
    /// `Σ_{i>k} λ_i²`, zero exactly when the Schmidt rank is at most `k`.
    TailEnergy(usize),
    /// `((Σλ)² − 1)/2`.
    Negativity,
}

impl core::fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ObjectiveKind::Entropy => f.write_str("entropy"),
            ObjectiveKind::TailEnergy(k) => write!(f, "tail_energy({k})"),
            ObjectiveKind::Negativity => f.write_str("negativity"),
        }
    }
}

/// A measure evaluated across a fixed cut.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Objective {
    kind: ObjectiveKind,
    cut: Cut,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, cut: Cut) -> Result<Self> {
        if kind == ObjectiveKind::TailEnergy(0) {
            return Err(Error::InvalidRank {
                rank: 0,
                reason: String::from("tail index must be at least 1"),
            });
        }
        Ok(Self { kind, cut })
    }

    pub fn entropy(cut: Cut) -> Self {
        Self {
            kind: ObjectiveKind::Entropy,
            cut,
        }
    }

    pub fn negativity(cut: Cut) -> Self {
        Self {
            kind: ObjectiveKind::Negativity,
            cut,
        }
    }

    pub fn tail_energy(k: usize, cut: Cut) -> Result<Self> {
        Self::new(ObjectiveKind::TailEnergy(k), cut)
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn cut(&self) -> &Cut {
        &self.cut
    }

    /// Objective value at the cut matrix `m`.
    pub fn value(&self, m: &CMatrix) -> f64 {
        value_of(self.kind, &sorted_singular_values(m))
    }

    /// Objective value and real gradient at `m`.
    pub fn value_and_gradient(&self, m: &CMatrix) -> (f64, CMatrix) {
        value_and_gradient(self.kind, m)
    }
}

/// Objective value from sorted Schmidt coefficients.
pub fn value_of(kind: ObjectiveKind, s: &[f64]) -> f64 {
    match kind {
        ObjectiveKind::Entropy => {
            let clamped: Vec<f64> = s.iter().copied().filter(|l| l * l >= ENTROPY_CLAMP).collect();
            entropy_from_coefficients(&clamped)
        }
        ObjectiveKind::TailEnergy(k) => tail_from_coefficients(s, k),
        ObjectiveKind::Negativity => negativity_from_coefficients(s),
    }
}

pub(crate) fn value_and_gradient(kind: ObjectiveKind, m: &CMatrix) -> (f64, CMatrix) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested left singular vectors");
    let v_t = svd.v_t.expect("requested right singular vectors");
    let s = &svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    let sorted: Vec<f64> = order.iter().map(|&i| s[i].max(0.0)).collect();
    let value = value_of(kind, &sorted);

    // Σ_i w_i u_i v_i† over the listed (sorted position, weight) pairs.
    let outer_sum = |terms: &mut dyn Iterator<Item = (usize, f64)>| -> CMatrix {
        let mut g = CMatrix::zeros(m.nrows(), m.ncols());
        for (pos, w) in terms {
            if w == 0.0 {
                continue;
            }
            let i = order[pos];
            let ui = u.column(i);
            let vi = v_t.row(i);
            g += (ui * vi) * C64::new(w, 0.0);
        }
        g
    };

    let grad = match kind {
        ObjectiveKind::TailEnergy(k) => {
            let head = outer_sum(&mut (0..k.min(sorted.len())).map(|p| (p, sorted[p])));
            (m - head) * C64::new(2.0, 0.0)
        }
        ObjectiveKind::Entropy => {
            let inv_ln2 = 1.0 / core::f64::consts::LN_2;
            outer_sum(&mut (0..sorted.len()).filter_map(|p| {
                let l = sorted[p];
                let prob = l * l;
                (prob >= ENTROPY_CLAMP).then(|| (p, -(prob.log2() + inv_ln2) * 2.0 * l))
            }))
        }
        ObjectiveKind::Negativity => {
            let total: f64 = sorted.iter().sum();
            outer_sum(&mut (0..sorted.len()).filter_map(|p| (sorted[p] > 0.0).then_some((p, total))))
        }
    };
    (value, grad)
}
