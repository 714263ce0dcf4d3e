//! Generic values of the minimum Schmidt rank and related variety dimensions.
//!
//! Every closed form is evaluated in exact integer arithmetic and paired with
//! a brute-force oracle that scans the defining inequality directly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Bipartite dimensions stored with `d_a <= d_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BipartiteDims {
    d_a: usize,
    d_b: usize,
}

impl BipartiteDims {
    /// Sorts the pair; both dimensions must be at least 2.
    pub fn new(x: usize, y: usize) -> Result<Self> {
        if x < 2 || y < 2 {
            return Err(Error::InvalidShape(format!(
                "dimensions must be at least 2, got ({x}, {y})"
            )));
        }
        Ok(Self {
            d_a: x.min(y),
            d_b: x.max(y),
        })
    }

    pub fn d_a(self) -> usize {
        self.d_a
    }

    pub fn d_b(self) -> usize {
        self.d_b
    }

    fn signed(self) -> (i128, i128) {
        (self.d_a as i128, self.d_b as i128)
    }
}

/// Which formula produced a [`DimReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DimFormula {
    /// `d_A d_B − (d_A − r)(d_B − r) − 1`.
    Determinantal,
    /// `min{∏d_i − 1, r(Σ(d_i − 1) + 1) + Σ(d_i − 1)}`.
    SecantExpected,
}

/// A projective dimension together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DimReport {
    pub value: i64,
    /// Set when the true dimension may fall below the expected one.
    pub defective: bool,
    pub formula_used: DimFormula,
}

fn check_rank(d: BipartiteDims, r: usize, upper: usize) -> Result<()> {
    if r < 1 || r > upper {
        return Err(Error::InvalidRank {
            rank: r,
            reason: format!("must lie in 1..={upper} for dimensions ({}, {})", d.d_a, d.d_b),
        });
    }
    Ok(())
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `⌈(S − √D)/2⌉` for `S > √D ≥ 0`, exactly.
///
/// With `q = ⌊√D⌋`, `S − √D` lies in `(S − q − 1, S − q]`, and in both the
/// perfect-square and irrational cases the ceiling of half of it is
/// `⌈(S − q)/2⌉`.
fn ceil_half_gap(s: i128, disc: i128) -> i128 {
    debug_assert!(disc >= 0 && s * s > disc);
    let q = isqrt(disc as u128) as i128;
    (s - q + 1).div_euclid(2)
}

/// Projective dimension of the variety of states with Schmidt rank `≤ r`.
pub fn det_variety_dim(d: BipartiteDims, r: usize) -> Result<i64> {
    check_rank(d, r, d.d_a)?;
    let (a, b) = d.signed();
    let r = r as i128;
    Ok((a * b - (a - r) * (b - r) - 1) as i64)
}

/// Generic minimum output Schmidt rank `r₀` of a gate on `d_A ⊗ d_B`.
pub fn generic_min_sr(d: BipartiteDims) -> usize {
    let (a, b) = d.signed();
    ceil_half_gap(a + b, (a - b) * (a - b) + 4 * (a + b) - 8) as usize
}

/// `min{r ≥ 1 : (d_A − r)(d_B − r) ≤ d_A + d_B − 2}` by direct scan.
pub fn generic_min_sr_oracle(d: BipartiteDims) -> usize {
    let (a, b) = d.signed();
    (1..=a).find(|&r| (a - r) * (b - r) <= a + b - 2).unwrap_or(a) as usize
}

/// Whether a generic gate on these dimensions maps some product to a product.
pub fn is_vanishing(d: BipartiteDims) -> bool {
    generic_min_sr(d) <= 1
}

/// Generic minimum output Schmidt rank over inputs of Schmidt rank `≥ r`.
pub fn generic_min_sr_from_rank(d: BipartiteDims, r: usize) -> Result<usize> {
    check_rank(d, r, d.d_a)?;
    let (a, b) = d.signed();
    let r = r as i128;
    let disc = (a - b) * (a - b) + 4 * r * (a + b) - 4 * (r * r + 1);
    Ok(ceil_half_gap(a + b, disc) as usize)
}

/// `min{s ≥ 1 : (d_A − r)(d_B − r) + (d_A − s)(d_B − s) ≤ d_A d_B − 1}`.
#[allow(clippy::int_plus_one)]
pub fn generic_min_sr_from_rank_oracle(d: BipartiteDims, r: usize) -> Result<usize> {
    check_rank(d, r, d.d_a)?;
    let (a, b) = d.signed();
    let r = r as i128;
    Ok((1..=a)
        .find(|&s| (a - r) * (b - r) + (a - s) * (b - s) <= a * b - 1)
        .unwrap_or(a) as usize)
}

/// Upper bound `d_A² d_B² − (d_A − r)(d_B − r) + 2r − 3` on the dimension of
/// the closure of gates mapping some product to rank `≤ r`.
pub fn closure_dim_bound(d: BipartiteDims, r: usize) -> Result<i64> {
    check_rank(d, r, d.d_a)?;
    let (a, b) = d.signed();
    let r = r as i128;
    Ok((a * a * b * b - (a - r) * (b - r) + 2 * r - 3) as i64)
}

fn check_multi(dims: &[usize], min_parties: usize) -> Result<()> {
    if dims.len() < min_parties {
        return Err(Error::InvalidShape(format!(
            "need at least {min_parties} parties, got {}",
            dims.len()
        )));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidShape(format!("local dimension {d} below 2")));
    }
    Ok(())
}

fn product_i128(dims: &[usize]) -> Result<i128> {
    dims.iter()
        .try_fold(1i128, |acc, &d| acc.checked_mul(d as i128))
        .ok_or_else(|| Error::Overflow(String::from("dimension product")))
}

/// Dimension `Σ(d_i − 1)` of the Segre variety of product states.
pub fn segre_dim(dims: &[usize]) -> Result<i64> {
    check_multi(dims, 2)?;
    Ok(dims.iter().map(|&d| d as i64 - 1).sum())
}

/// Known defective families for `N ≥ 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefectiveCase {
    /// `3 ⊗ 3 ⊗ 3`.
    ThreeQutrits,
    /// `2 ⊗ 2 ⊗ d ⊗ d`.
    TwoTwoDD,
    /// `3 ⊗ d ⊗ d` with odd `d`.
    ThreeOddDD,
    /// `3 ⊗ 4 ⊗ 4`.
    ThreeFourFour,
    /// `∏_{i≤m} d_i + 1 − Σ_{i≤m}(d_i − 1) < d_{m+1}` for the last factor.
    Unbalanced,
}

/// Classifies dimensions (sorted ascending internally) into the defective
/// families; `None` for `N < 3` or non-defective shapes.
pub fn defective_case(dims: &[usize]) -> Option<DefectiveCase> {
    if dims.len() < 3 {
        return None;
    }
    let mut d = dims.to_vec();
    d.sort_unstable();
    match d.as_slice() {
        [3, 3, 3] => return Some(DefectiveCase::ThreeQutrits),
        [2, 2, x, y] if x == y => return Some(DefectiveCase::TwoTwoDD),
        [3, 4, 4] => return Some(DefectiveCase::ThreeFourFour),
        [3, x, y] if x == y && x % 2 == 1 => return Some(DefectiveCase::ThreeOddDD),
        _ => {}
    }
    let (last, head) = d.split_last().expect("nonempty");
    let prod: Option<i128> = head.iter().try_fold(1i128, |acc, &x| acc.checked_mul(x as i128));
    let sum: i128 = head.iter().map(|&x| x as i128 - 1).sum();
    match prod {
        Some(p) if p + 1 - sum < *last as i128 => Some(DefectiveCase::Unbalanced),
        _ => None,
    }
}

/// Expected dimension of the `r`-th secant variety of the Segre variety.
///
/// For two parties the secant variety is the determinantal variety of rank
/// `r + 1`, so its exact dimension is returned (capped at the full space);
/// `defective` records that it falls below the naive expected count.
pub fn secant_expected_dim(dims: &[usize], r: usize) -> Result<DimReport> {
    check_multi(dims, 2)?;
    let s = segre_dim(dims)? as i128;
    let full = product_i128(dims)? - 1;
    let r_i = r as i128;
    let expected = full.min(r_i * (s + 1) + s);
    if dims.len() == 2 {
        let d = BipartiteDims::new(dims[0], dims[1])?;
        let value = if r + 1 >= d.d_a {
            full
        } else {
            det_variety_dim(d, r + 1)? as i128
        };
        return Ok(DimReport {
            value: value as i64,
            defective: value < expected,
            formula_used: DimFormula::Determinantal,
        });
    }
    Ok(DimReport {
        value: expected as i64,
        defective: defective_case(dims).is_some(),
        formula_used: DimFormula::SecantExpected,
    })
}

/// Generic minimum output border rank, or the defective marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BorderRankPower {
    Value(usize),
    Defective(DefectiveCase),
}

/// `⌈(∏d_i − Σd_i + N)/(Σd_i − N + 1)⌉` for non-defective `N ≥ 3` shapes.
pub fn generic_border_rank_power(dims: &[usize]) -> Result<BorderRankPower> {
    check_multi(dims, 3)?;
    if let Some(case) = defective_case(dims) {
        return Ok(BorderRankPower::Defective(case));
    }
    let s = segre_dim(dims)? as i128;
    let p = product_i128(dims)?;
    let value = ceil_div(p - s, s + 1).max(1);
    Ok(BorderRankPower::Value(value as usize))
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

/// Largest `r ≥ 0` with expected `dim Sec_r < ∏d_i − 1 − Σ(d_i − 1)`, plus 2;
/// 1 when no such `r` exists.
pub fn generic_border_rank_power_oracle(dims: &[usize]) -> Result<usize> {
    check_multi(dims, 3)?;
    let s = segre_dim(dims)? as i128;
    let full = product_i128(dims)? - 1;
    let target = full - s;
    let mut best: Option<i128> = None;
    let mut r = 0i128;
    loop {
        let e = full.min(r * (s + 1) + s);
        if e < target {
            best = Some(r);
            r += 1;
        } else {
            break;
        }
    }
    Ok(best.map_or(1, |r| (r + 2) as usize))
}

/// Exact nonnegative rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub numerator: u128,
    pub denominator: u128,
}

impl Ratio {
    pub fn is_integer(self) -> bool {
        self.denominator == 1
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn factorial(n: usize) -> Result<u128> {
    (1..=n as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .ok_or_else(|| Error::Overflow(format!("{n}!")))
}

fn ratio_mul(x: Ratio, num: u128, den: u128) -> Result<Ratio> {
    let g1 = gcd(num, x.denominator);
    let g2 = gcd(x.numerator, den);
    let n = (x.numerator / g2).checked_mul(num / g1);
    let d = (x.denominator / g1).checked_mul(den / g2);
    match (n, d) {
        (Some(n), Some(d)) => {
            let g = gcd(n, d).max(1);
            Ok(Ratio {
                numerator: n / g,
                denominator: d / g,
            })
        }
        _ => Err(Error::Overflow(String::from("rational product"))),
    }
}

/// Number of states of Schmidt rank `≤ r` in a generic subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalgateCount {
    Zero,
    /// The product formula `∏_{j=0}^{d_A−r−1} (d_B+r)! r! / ((r+j)! (d_B−r+j)!)`
    /// at the critical dimension, reported verbatim. `suspect_typo` is set
    /// when it disagrees with [`determinantal_degree`].
    Printed {
        value: Ratio,
        suspect_typo: bool,
    },
    Infinite,
}

/// Count of Schmidt-rank-`≤ r` states in a generic `s`-dimensional subspace.
pub fn walgate_count(d: BipartiteDims, r: usize, s: usize) -> Result<WalgateCount> {
    if r < 1 || r >= d.d_a {
        return Err(Error::InvalidRank {
            rank: r,
            reason: format!("must lie in 1..{}", d.d_a),
        });
    }
    if s < 1 {
        return Err(Error::InvalidDimension(String::from(
            "subspace dimension must be positive",
        )));
    }
    let critical = (d.d_a - r) * (d.d_b - r);
    if s <= critical {
        return Ok(WalgateCount::Zero);
    }
    if s > critical + 1 {
        return Ok(WalgateCount::Infinite);
    }
    let mut value = Ratio {
        numerator: 1,
        denominator: 1,
    };
    let top = factorial(d.d_b + r)?
        .checked_mul(factorial(r)?)
        .ok_or_else(|| Error::Overflow(String::from("numerator")))?;
    for j in 0..(d.d_a - r) {
        let bottom = factorial(r + j)?
            .checked_mul(factorial(d.d_b - r + j)?)
            .ok_or_else(|| Error::Overflow(String::from("denominator")))?;
        value = ratio_mul(value, top, bottom)?;
    }
    let degree = determinantal_degree(d, r)?;
    Ok(WalgateCount::Printed {
        value,
        suspect_typo: !(value.is_integer() && value.numerator == degree),
    })
}

/// Degree `∏_{j=0}^{d_A−r−1} (d_B+j)! j! / ((r+j)! (d_B−r+j)!)` of the variety
/// of `d_A × d_B` matrices of rank `≤ r`; the number of such states in a
/// generic subspace of the critical dimension.
pub fn determinantal_degree(d: BipartiteDims, r: usize) -> Result<u128> {
    check_rank(d, r, d.d_a)?;
    let mut value = Ratio {
        numerator: 1,
        denominator: 1,
    };
    for j in 0..(d.d_a - r) {
        let num = factorial(d.d_b + j)?
            .checked_mul(factorial(j)?)
            .ok_or_else(|| Error::Overflow(String::from("numerator")))?;
        let den = factorial(r + j)?
            .checked_mul(factorial(d.d_b - r + j)?)
            .ok_or_else(|| Error::Overflow(String::from("denominator")))?;
        value = ratio_mul(value, num, den)?;
    }
    if !value.is_integer() {
        return Err(Error::InternalInconsistency(format!(
            "non-integer degree {}/{}",
            value.numerator, value.denominator
        )));
    }
    Ok(value.numerator)
}

/// All shapes with `N` parties and dimensions in `2..=max_dim`, sorted
/// ascending, without repetition.
pub fn sorted_shapes(parties: usize, max_dim: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, left: usize, lo: usize, hi: usize, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for d in lo..=hi {
            prefix.push(d);
            rec(prefix, left - 1, d, hi, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), parties, 2, max_dim, &mut out);
    out
}
