//! Closed-form concentration bounds, net sizes and the feasibility scan.
//!
//! `log` means `log₂`; `ln` is written out where the natural logarithm
//! appears. Quantities that overflow `f64` at moderate dimensions are
//! returned as [`LogMagnitude`].

use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

use core::f64::consts::{LN_2, PI};

/// A positive real stored through its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogMagnitude {
    ln: f64,
}

impl LogMagnitude {
    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn log10(self) -> f64 {
        self.ln / core::f64::consts::LN_10
    }

    /// Value as `f64`; `inf` or `0` when out of range.
    pub fn to_f64(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_below_one(self) -> bool {
        self.ln < 0.0
    }
}

impl core::ops::Mul for LogMagnitude {
    type Output = LogMagnitude;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, other: LogMagnitude) -> LogMagnitude {
        LogMagnitude::from_ln(self.ln + other.ln)
    }
}

/// `1/(9π³ ln 2)`.
pub fn levy_c1() -> f64 {
    1.0 / (9.0 * PI * PI * PI * LN_2)
}

/// `1/(2π² ln 2)`.
pub fn levy_c2() -> f64 {
    1.0 / (2.0 * PI * PI * LN_2)
}

/// Lipschitz constant `√8 log₂ d_A` of the minimum entropy.
pub fn entropy_lipschitz(d_a: usize) -> f64 {
    8f64.sqrt() * (d_a as f64).log2()
}

/// Lipschitz constant of the negativity.
pub const NEGATIVITY_LIPSCHITZ: f64 = 1.0;

/// Lipschitz constant `4√(2 d_A d_B) log₂ d_A` of the ancilla-assisted
/// minimum entropy.
pub fn ancilla_entropy_lipschitz(d_a: usize, d_b: usize) -> f64 {
    4.0 * (2.0 * (d_a * d_b) as f64).sqrt() * (d_a as f64).log2()
}

fn check_dims(d_a: usize, d_b: usize) -> Result<()> {
    if d_a < 3 || d_b < d_a {
        return Err(Error::DomainError(format!("need d_B >= d_A >= 3, got ({d_a}, {d_b})")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError(format!(
            "{name} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::DomainError(format!("epsilon {epsilon} outside (0, 1)")));
    }
    Ok(())
}

/// `exp(−(d_A d_B − 1) α² / (8π² ln 2 (log d_A)²))`: probability that a
/// random state's entropy falls `α` below its mean scale.
pub fn hayden_entropy_tail(d_a: usize, d_b: usize, alpha: f64) -> Result<f64> {
    check_dims(d_a, d_b)?;
    check_positive("alpha", alpha)?;
    Ok(hayden_ln(d_a, d_b, alpha).exp())
}

fn hayden_ln(d_a: usize, d_b: usize, alpha: f64) -> f64 {
    let l = (d_a as f64).log2();
    -(((d_a * d_b) as f64 - 1.0) * alpha * alpha) / (8.0 * PI * PI * LN_2 * l * l)
}

/// `(10/ε)^{2(d_A+d_B)}`, the size of a product ε-net.
pub fn net_size_product(d_a: usize, d_b: usize, epsilon: f64) -> Result<LogMagnitude> {
    check_epsilon(epsilon)?;
    Ok(LogMagnitude::from_ln(2.0 * (d_a + d_b) as f64 * (10.0 / epsilon).ln()))
}

/// `(5/ε)^{2d}`, the size of an ε-net on the unit sphere of `C^d`.
pub fn net_size_single(d: usize, epsilon: f64) -> Result<LogMagnitude> {
    check_epsilon(epsilon)?;
    Ok(LogMagnitude::from_ln(2.0 * d as f64 * (5.0 / epsilon).ln()))
}

/// `(20√2 log d_A/α)^{2(d_A+d_B)} exp(−(d_A d_B − 1) α² / (32π² ln 2 (log d_A)²))`.
pub fn pmin_entropy_tail(d_a: usize, d_b: usize, alpha: f64) -> Result<LogMagnitude> {
    check_dims(d_a, d_b)?;
    check_positive("alpha", alpha)?;
    Ok(LogMagnitude::from_ln(pmin_tail_ln(d_a, d_b, alpha)))
}

fn pmin_tail_ln(d_a: usize, d_b: usize, alpha: f64) -> f64 {
    let l = (d_a as f64).log2();
    let n = ((d_a * d_b) as f64) - 1.0;
    2.0 * (d_a + d_b) as f64 * (20.0 * 2f64.sqrt() * l / alpha).ln()
        - n * alpha * alpha / (32.0 * PI * PI * LN_2 * l * l)
}

/// `log d_A − d_A/(d_B ln 2)`, the upper end of the admissible α range.
pub fn alpha_ceiling(d_a: usize, d_b: usize) -> f64 {
    (d_a as f64).log2() - d_a as f64 / (d_b as f64 * LN_2)
}

/// Grid of α values in `(0, ceiling)` used by the feasibility scan.
///
/// Points accumulate geometrically at the ceiling,
/// `α_k = ceiling · (1 − 10^{−12 k / n})` for `k = 1..=n`, because the tail
/// is strictly decreasing in α and feasibility is decided next to the
/// ceiling.
pub fn alpha_grid(ceiling: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |k| ceiling * (1.0 - 10f64.powf(-12.0 * k as f64 / n as f64)))
}

/// Smallest α on the grid satisfying both feasibility conditions at
/// `d_A = d_B = d`.
pub fn feasible_alpha(d: usize, grid_points: usize) -> Option<f64> {
    let ceiling = alpha_ceiling(d, d);
    if !(ceiling > 0.0) {
        return None;
    }
    alpha_grid(ceiling, grid_points).find(|&a| ceiling - a > 0.0 && a > 0.0 && pmin_tail_ln(d, d, a) < 0.0)
}

/// Default α-grid size of the scan.
pub const SCAN_GRID_POINTS: usize = 10_000;

/// Smallest `d_A` (with `d_B = d_A`) admitting a nontrivial α.
pub fn min_dim_for_nontrivial_alpha() -> usize {
    min_dim_for_nontrivial_alpha_with(SCAN_GRID_POINTS)
}

/// As [`min_dim_for_nontrivial_alpha`] with a custom grid size.
pub fn min_dim_for_nontrivial_alpha_with(grid_points: usize) -> usize {
    (3..)
        .find(|&d| feasible_alpha(d, grid_points).is_some())
        .expect("feasibility holds for large dimensions")
}

/// `2 exp(−n δ² / (8 L²))`.
pub fn su_concentration_tail(n: usize, delta: f64, lipschitz: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::DomainError(format!("n must be at least 2, got {n}")));
    }
    check_positive("delta", delta)?;
    check_positive("lipschitz constant", lipschitz)?;
    Ok(2.0 * (-(n as f64) * delta * delta / (8.0 * lipschitz * lipschitz)).exp())
}

/// `2 exp(−d_A d_B δ² / (64 (log d_A)²))`, the entropy instance of
/// [`su_concentration_tail`].
pub fn entropy_concentration_tail(d_a: usize, d_b: usize, delta: f64) -> Result<f64> {
    check_dims(d_a, d_b)?;
    check_positive("delta", delta)?;
    let l = (d_a as f64).log2();
    Ok(2.0 * (-((d_a * d_b) as f64) * delta * delta / (64.0 * l * l)).exp())
}

/// Mean lower bound `log d_A − d_A/(d_B ln 2) − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanBound {
    /// Bound clamped at 0.
    pub value: f64,
    /// Value before clamping.
    pub raw: f64,
    /// True when the unclamped bound is negative.
    pub vacuous: bool,
}

pub fn mean_pmin_lower_bound(d_a: usize, d_b: usize) -> Result<MeanBound> {
    check_dims(d_a, d_b)?;
    let raw = alpha_ceiling(d_a, d_b) - 1.0;
    Ok(MeanBound {
        value: raw.max(0.0),
        raw,
        vacuous: raw < 0.0,
    })
}

/// Concentration of a Lipschitz function on the unit sphere of `R^{k+1}`:
/// around the mean `2 exp(−C₁ (k+1) α² / L²)`, around the median
/// `exp(−C₂ (k−1) α² / L²)`.
pub fn levy_tail(k: usize, alpha: f64, lipschitz: f64, use_median: bool) -> Result<f64> {
    if k < 2 {
        return Err(Error::DomainError(format!("k must be at least 2, got {k}")));
    }
    check_positive("alpha", alpha)?;
    check_positive("lipschitz constant", lipschitz)?;
    let r = alpha * alpha / (lipschitz * lipschitz);
    Ok(if use_median {
        (-levy_c2() * (k as f64 - 1.0) * r).exp()
    } else {
        2.0 * (-levy_c1() * (k as f64 + 1.0) * r).exp()
    })
}

/// `(10/ε)^{2(d_A+d_B)} exp(−(d_A d_B − 1)(α − √2 ε log d_A)² / (8π² ln 2 (log d_A)²))`.
pub fn epsilon_tail(d_a: usize, d_b: usize, alpha: f64, epsilon: f64) -> Result<LogMagnitude> {
    check_dims(d_a, d_b)?;
    check_positive("alpha", alpha)?;
    let net = net_size_product(d_a, d_b, epsilon)?;
    let shifted = alpha - 2f64.sqrt() * epsilon * (d_a as f64).log2();
    if !(shifted > 0.0) {
        return Err(Error::DomainError(format!(
            "alpha {alpha} does not exceed the net correction"
        )));
    }
    Ok(net * LogMagnitude::from_ln(hayden_ln(d_a, d_b, shifted)))
}

/// Root in `(0, 1)` of `ε² ln(10/ε) = 8π² ln 2 (d_A + d_B)/(d_A d_B − 1)`.
pub fn optimal_epsilon(d_a: usize, d_b: usize) -> Result<f64> {
    check_dims(d_a, d_b)?;
    let target = 8.0 * PI * PI * LN_2 * (d_a + d_b) as f64 / ((d_a * d_b) as f64 - 1.0);
    let f = |e: f64| e * e * (10.0 / e).ln() - target;
    if f(1.0) <= 0.0 {
        return Err(Error::DomainError(format!(
            "no root in (0, 1) for dimensions ({d_a}, {d_b})"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid == 0.0 || f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
