//! The braided family: vase `i` has height `1/i` and parameter `p_i`, and is
//! lifted into R⁴ by `w = |φ|·w_i(z)` so that distinct walls only meet
//! along `φ = 0`.

mod profile;
mod scene;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::vase::{inner_heights, VaseParams};

pub use profile::{build_w_profiles, verify_profile_conditions, w_eval, ProfileReport, WProfile, ZeroInterval};
pub use scene::{build_bhv, min_wall_separation, BhvScene, BraidedVase, SeparationReport};

/// Shrink factor applied to an amplitude on collision.
pub const REPAIR_FACTOR: f64 = 0.971_012_574_498_318_7;
/// Maximum number of amplitude repairs before giving up.
pub const REPAIR_BUDGET: usize = 32;
/// Fractional digits stored for generated parameters.
pub const P_DIGITS: usize = 60;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BraidError {
    #[error("parameters coincide (p = {0}); walls would overlap")]
    EqualParameters(f64),
    #[error("invalid decimal `{0}`")]
    BadDecimal(String),
    #[error("vase index must be at least 1")]
    ZeroIndex,
    #[error("parameter sequence has not passed the independence check")]
    Unverified,
    #[error("profile repair budget exhausted; colliding heights: {0:?}")]
    RepairExhausted(Vec<(usize, usize, f64)>),
    #[error("zero interval around inner-height {height} of vase {vase} is degenerate")]
    DegenerateInterval { vase: usize, height: f64 },
    #[error("{profiles} profiles for {vases} vases")]
    CountMismatch { profiles: usize, vases: usize },
    #[error("profile conditions fail: {0}")]
    ConditionsFail(String),
    #[error(transparent)]
    Vase(#[from] crate::vase::VaseError),
}

/// A positive parameter kept as a decimal string; the `f64` is always
/// parsed from the string, so scenes reload bit-exactly.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub struct PValue {
    decimal: String,
    value: f64,
}

impl PValue {
    pub fn parse(decimal: &str) -> Result<Self, BraidError> {
        let trimmed = decimal.trim();
        let ok = !trimmed.is_empty()
            && trimmed.bytes().all(|b| b.is_ascii_digit() || b == b'.')
            && trimmed.bytes().filter(|&b| b == b'.').count() <= 1;
        let value: f64 = match trimmed.parse() {
            Ok(v) if ok => v,
            _ => return Err(BraidError::BadDecimal(decimal.to_string())),
        };
        if !(value > 0.0 && value.is_finite()) {
            return Err(BraidError::BadDecimal(decimal.to_string()));
        }
        Ok(Self { decimal: trimmed.to_string(), value })
    }

    pub fn decimal(&self) -> &str {
        &self.decimal
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl TryFrom<String> for PValue {
    type Error = BraidError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        PValue::parse(&s)
    }
}

impl From<PValue> for String {
    fn from(p: PValue) -> String {
        p.decimal
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decimal)
    }
}

/// `⌊√n⌋` to `digits` fractional decimal places, computed exactly.
pub fn sqrt_decimal(n: u64, digits: usize) -> String {
    let scale = num_traits::pow(BigUint::from(10u32), 2 * digits);
    let root = (BigUint::from(n) * scale).sqrt().to_string();
    let (int, frac) = if root.len() > digits {
        root.split_at(root.len() - digits)
    } else {
        ("", root.as_str())
    };
    let int = if int.is_empty() { "0" } else { int };
    let mut s = String::with_capacity(int.len() + 1 + digits);
    s.push_str(int);
    s.push('.');
    for _ in frac.len()..digits {
        s.push('0');
    }
    s.push_str(frac);
    s
}

/// First `n` primes.
pub fn primes(n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PSequence {
    pub scheme: String,
    values: Vec<PValue>,
    verified: bool,
}

impl PSequence {
    /// Arbitrary positive decimals; must be pairwise distinct.
    pub fn from_decimals(scheme: &str, decimals: &[&str]) -> Result<Self, BraidError> {
        let values = decimals.iter().map(|d| PValue::parse(d)).collect::<Result<Vec<_>, _>>()?;
        for (a, pa) in values.iter().enumerate() {
            if values[..a].iter().any(|pb| pb.value == pa.value) {
                return Err(BraidError::EqualParameters(pa.value));
            }
        }
        Ok(Self { scheme: scheme.to_string(), values, verified: false })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Parameter of vase `i` (1-based).
    pub fn p(&self, i: usize) -> f64 {
        self.values[i - 1].value
    }

    pub fn values(&self) -> &[PValue] {
        &self.values
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Sets the verified flag iff `report` passed.
    pub fn mark_verified(&mut self, report: &IndependenceReport) -> bool {
        self.verified = report.pass;
        self.verified
    }

    pub fn vase(&self, i: usize) -> VaseParams {
        VaseParams { m: 1.0 / i as f64, p: self.p(i) }
    }
}

/// `p_i = √(i-th prime)` to [`P_DIGITS`] decimal places.
pub fn choose_p_sequence(n: usize) -> PSequence {
    let values = primes(n)
        .into_iter()
        .map(|q| PValue::parse(&sqrt_decimal(q, P_DIGITS)).expect("generated decimal is valid"))
        .collect();
    PSequence { scheme: "sqrt-primes".to_string(), values, verified: false }
}

/// Heights in `[floor, 1/i]` where walls `HV(1/i, p_i)` and `HV(1/j, p_j)`
/// meet away from `φ = 0`, descending.
///
/// `sin(πp_i/z) = sin(πp_j/z)` holds iff `z = (p_i − p_j)/(2k)` or
/// `z = (p_i + p_j)/(2k + 1)`.
pub fn intersection_heights(p_i: f64, p_j: f64, i: usize, floor: f64) -> Result<Vec<f64>, BraidError> {
    if i == 0 {
        return Err(BraidError::ZeroIndex);
    }
    if p_i == p_j {
        return Err(BraidError::EqualParameters(p_i));
    }
    let top = 1.0 / i as f64;
    let floor = floor.max(f64::MIN_POSITIVE);
    let mut out = Vec::new();

    let diff = libm::fabs(p_i - p_j);
    let start = libm::ceil(diff / (2.0 * top)).max(1.0) as u64;
    for k in start.. {
        let z = diff / (2 * k) as f64;
        if z > top {
            continue;
        }
        if z < floor {
            break;
        }
        out.push(z);
    }

    let sum = p_i + p_j;
    let start = libm::ceil((sum / top - 1.0) / 2.0).max(0.0) as u64;
    for k in start.. {
        let z = sum / (2 * k + 1) as f64;
        if z > top {
            continue;
        }
        if z < floor {
            break;
        }
        out.push(z);
    }

    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Intersection heights involving vase `i`, over all partners, down to
/// `floor`. Partners with larger index restrict to their own height.
pub fn intersection_set(ps: &PSequence, i: usize, floor: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for j in 1..=ps.len() {
        if j == i {
            continue;
        }
        let top = i.max(j);
        let hs = intersection_heights(ps.p(top), ps.p(i + j - top), top, floor).expect("p-sequence is pairwise distinct");
        out.extend(hs);
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceReport {
    pub pass: bool,
    /// Smallest gap between an inner-height and an intersection height;
    /// `None` when there are no pairs to compare.
    pub min_gap: Option<f64>,
    /// `(i, j, inner-height, intersection height)` attaining `min_gap`.
    pub worst: Option<(usize, usize, f64, f64)>,
    pub tolerance: f64,
    pub depth: usize,
}

/// For every pair `j < i`, compares the first `depth` inner-heights of vase
/// `i` with the intersection heights of walls `i` and `j` down to the
/// smallest of them.
pub fn verify_independence(ps: &PSequence, depth: usize, tolerance: f64) -> IndependenceReport {
    let mut min_gap: Option<f64> = None;
    let mut worst = None;
    for i in 2..=ps.len() {
        let inner = inner_heights(&ps.vase(i), depth);
        let Some(&lowest) = inner.last() else { continue };
        for j in 1..i {
            let hs = intersection_heights(ps.p(i), ps.p(j), i, lowest).expect("distinct parameters");
            for &a in &inner {
                // hs is descending; locate the neighbours of `a`
                let pos = hs.partition_point(|&z| z > a);
                for &z in hs[pos.saturating_sub(1)..(pos + 1).min(hs.len())].iter() {
                    let gap = libm::fabs(z - a);
                    if min_gap.is_none_or(|g| gap < g) {
                        min_gap = Some(gap);
                        worst = Some((i, j, a, z));
                    }
                }
            }
        }
    }
    IndependenceReport { pass: min_gap.is_none_or(|g| g > tolerance), min_gap, worst, tolerance, depth }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_decimals() {
        assert_eq!(sqrt_decimal(2, 10), "1.4142135623");
        assert_eq!(sqrt_decimal(4, 3), "2.000");
        assert_eq!(sqrt_decimal(0, 2), "0.00");
        let s = sqrt_decimal(5, P_DIGITS);
        assert_eq!(s.len(), 2 + P_DIGITS);
        assert!(s.starts_with("2.2360679774997896964091736687312762354406183596115257"));
    }

    #[test]
    fn p_sequence_is_sqrt_primes() {
        let ps = choose_p_sequence(3);
        assert_eq!(ps.p(1), core::f64::consts::SQRT_2);
        assert_eq!(ps.p(2), libm::sqrt(3.0));
        assert_eq!(ps.p(3), libm::sqrt(5.0));
        assert!(!ps.is_verified());
        let ps = choose_p_sequence(12);
        for i in 1..=12 {
            for j in 1..i {
                assert_ne!(ps.p(i), ps.p(j));
            }
        }
    }

    #[test]
    fn pvalue_rejects_garbage() {
        assert!(PValue::parse("1.5").is_ok());
        assert!(PValue::parse("-1").is_err());
        assert!(PValue::parse("0").is_err());
        assert!(PValue::parse("1e3").is_err());
        assert!(PValue::parse("1.2.3").is_err());
        assert!(PSequence::from_decimals("x", &["1.0", "1"]).is_err());
    }

    #[test]
    fn intersection_example() {
        let (p3, p2) = (libm::sqrt(3.0), core::f64::consts::SQRT_2);
        let hs = intersection_heights(p3, p2, 2, 0.07).unwrap();
        let expect = [(p3 + p2) / 7.0, (p3 + p2) / 9.0, (p3 + p2) / 11.0, (p3 - p2) / 2.0, (p3 + p2) / 13.0];
        for e in expect {
            assert!(hs.iter().any(|h| (h - e).abs() < 1e-15), "missing {e}");
        }
        assert!(hs.iter().any(|h| (h - (p3 - p2) / 4.0).abs() < 1e-15));
        assert!(hs.iter().all(|&h| h <= 0.5 && h >= 0.07));
        assert!(!hs.iter().any(|h| (h - (p3 + p2) / 5.0).abs() < 1e-9));
        for &z in &hs {
            let d = libm::sin(crate::PI * p3 / z) - libm::sin(crate::PI * p2 / z);
            assert!(d.abs() < 1e-10);
        }
        assert!(intersection_heights(1.0, 1.0, 2, 0.1).is_err());
    }

    #[test]
    fn independence_trivial_and_sqrt_primes() {
        let r = verify_independence(&choose_p_sequence(1), 50, 1e-9);
        assert!(r.pass && r.min_gap.is_none());
        let r = verify_independence(&choose_p_sequence(4), 30, 1e-9);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn rational_parameters_can_collide() {
        // vase 2 with p = 5: inner-height 10/35 = 2/7 equals (5 - 1)/(2·7)
        let ps = PSequence::from_decimals("adversarial", &["1", "5"]).unwrap();
        let r = verify_independence(&ps, 30, 1e-9);
        assert!(!r.pass);
        assert!(r.min_gap.unwrap() < 1e-12);
    }

    #[test]
    fn mark_verified_follows_report() {
        let mut ps = choose_p_sequence(3);
        let r = verify_independence(&ps, 20, 1e-9);
        assert!(ps.mark_verified(&r));
        let mut bad = PSequence::from_decimals("adversarial", &["1", "5"]).unwrap();
        let r = verify_independence(&bad, 30, 1e-9);
        assert!(!bad.mark_verified(&r));
    }
}
