use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{intersection_heights, intersection_set, BraidError, PSequence, REPAIR_BUDGET, REPAIR_FACTOR};
use crate::vase::{inner_heights, inner_heights_above, phase_grid};
use crate::PI;

/// `[center − radius, center + radius]`, on which `w_i ≡ 0`. Outside it,
/// `w_i` ramps linearly back to its plateau over `ramp`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZeroInterval {
    pub center: f64,
    pub radius: f64,
    pub ramp: f64,
}

impl ZeroInterval {
    pub fn lo(&self) -> f64 {
        self.center - self.radius
    }

    pub fn hi(&self) -> f64 {
        self.center + self.radius
    }

    pub fn contains(&self, z: f64) -> bool {
        self.lo() <= z && z <= self.hi()
    }
}

/// The braiding function `w_i` of one vase: `θ_i·z` away from its zero
/// intervals, `0` on them, linear in between.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WProfile {
    pub vase_index: usize,
    /// Top of the domain, `1/i`.
    pub height: f64,
    pub amplitude: f64,
    /// Sorted by decreasing center.
    pub intervals: Vec<ZeroInterval>,
}

impl WProfile {
    pub(crate) fn eval_unchecked(&self, z: f64) -> f64 {
        let pos = self.intervals.partition_point(|iv| iv.center > z);
        let mut lambda: f64 = 1.0;
        for iv in &self.intervals[pos.saturating_sub(1)..(pos + 1).min(self.intervals.len())] {
            let d = libm::fabs(z - iv.center) - iv.radius;
            if d <= 0.0 {
                return 0.0;
            }
            lambda = lambda.min(d / iv.ramp);
        }
        self.amplitude * z * lambda
    }

    /// Interval containing `z`, if any.
    pub fn interval_at(&self, z: f64) -> Option<&ZeroInterval> {
        let pos = self.intervals.partition_point(|iv| iv.center > z);
        self.intervals[pos.saturating_sub(1)..(pos + 1).min(self.intervals.len())]
            .iter()
            .find(|iv| iv.contains(z))
    }
}

/// `w_i(z)` for `0 < z ≤ 1/i`.
pub fn w_eval(profile: &WProfile, z: f64) -> Result<f64, BraidError> {
    if !(z > 0.0 && z <= profile.height) {
        return Err(BraidError::Vase(crate::vase::VaseError::HeightOutOfRange { c: z, m: profile.height }));
    }
    Ok(profile.eval_unchecked(z))
}

fn nearest_distance(sorted_desc: &[f64], x: f64) -> f64 {
    let pos = sorted_desc.partition_point(|&z| z > x);
    sorted_desc[pos.saturating_sub(1)..(pos + 1).min(sorted_desc.len())]
        .iter()
        .map(|z| libm::fabs(z - x))
        .fold(f64::INFINITY, f64::min)
}

/// Zero intervals for every inner-height of vase `i` above `z_min`.
fn carve_intervals(ps: &PSequence, i: usize, z_min: f64) -> Result<Vec<ZeroInterval>, BraidError> {
    let v = ps.vase(i);
    let count = inner_heights_above(&v, z_min).len();
    // one extra below the cutoff bounds the gap of the lowest interval
    let inner = inner_heights(&v, count + 1);
    let hset = intersection_set(ps, i, z_min / 2.0);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let h = inner[k];
        let gap_up = if k == 0 { f64::INFINITY } else { inner[k - 1] - h };
        let gap_down = h - inner[k + 1];
        let radius = (nearest_distance(&hset, h) / 2.0)
            .min(gap_up / 4.0)
            .min(gap_down / 4.0)
            .min(v.m - h);
        if !(radius > 0.0) {
            return Err(BraidError::DegenerateInterval { vase: i, height: h });
        }
        out.push(ZeroInterval { center: h, radius, ramp: radius / 2.0 });
    }
    Ok(out)
}

/// `(i, j, z)` for every intersection height `z ≥ z_min` of walls `i > j`
/// with `|w_i(z) − w_j(z)| ≤ tolerance`.
fn collisions(ps: &PSequence, profiles: &[WProfile], z_min: f64, tolerance: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 2..=ps.len() {
        for j in 1..i {
            for z in intersection_heights(ps.p(i), ps.p(j), i, z_min).expect("distinct parameters") {
                let gap = libm::fabs(profiles[i - 1].eval_unchecked(z) - profiles[j - 1].eval_unchecked(z));
                if !(gap > tolerance) {
                    out.push((i, j, z));
                }
            }
        }
    }
    out
}

/// Builds `w_1 … w_N` jointly.
///
/// Amplitudes start at `θ_i = 1/(π(i+1))`, so `|φ|·w_i(z) ≤ z/(i+1)`.
/// Zero-interval radii are the smallest of: half the distance to the nearest
/// intersection height involving vase `i` (with earlier *or* later vases), a
/// quarter of the gap to each neighbouring inner-height, and the distance to
/// the top `1/i`. On a collision `w_i(z*) = w_j(z*)` the amplitude of the
/// later vase shrinks by [`REPAIR_FACTOR`], at most [`REPAIR_BUDGET`] times.
pub fn build_w_profiles(ps: &PSequence, z_min: f64, tolerance: f64) -> Result<Vec<WProfile>, BraidError> {
    if !ps.is_verified() {
        return Err(BraidError::Unverified);
    }
    let mut profiles = Vec::with_capacity(ps.len());
    for i in 1..=ps.len() {
        profiles.push(WProfile {
            vase_index: i,
            height: 1.0 / i as f64,
            amplitude: 1.0 / (PI * (i + 1) as f64),
            intervals: carve_intervals(ps, i, z_min)?,
        });
    }
    for attempt in 0..=REPAIR_BUDGET {
        let found = collisions(ps, &profiles, z_min, tolerance);
        if found.is_empty() {
            return Ok(profiles);
        }
        if attempt == REPAIR_BUDGET {
            return Err(BraidError::RepairExhausted(found));
        }
        let shrink: BTreeSet<usize> = found.iter().map(|&(i, _, _)| i).collect();
        for i in shrink {
            profiles[i - 1].amplitude *= REPAIR_FACTOR;
        }
    }
    unreachable!()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileReport {
    /// `|φ|·w_i(z) < z` everywhere (amplitude bound and sampled check).
    pub below_diagonal: bool,
    /// Largest sampled `π·w_i(z)/z`.
    pub max_w_over_z: f64,
    /// `w_i ≠ w_j` at every intersection height above `z_min`.
    pub separated: bool,
    pub min_separation: Option<f64>,
    pub worst_separation: Option<(usize, usize, f64)>,
    /// Zero intervals are disjoint, inside `(0, 1/i]`, each holds exactly one
    /// inner-height, all inner-heights above `z_min` are covered, and no
    /// intersection height of the vase falls inside one.
    pub vanishes_near_inner_heights: bool,
    pub pass: bool,
    pub failures: Vec<String>,
}

pub fn verify_profile_conditions(ps: &PSequence, profiles: &[WProfile], z_min: f64, tolerance: f64) -> ProfileReport {
    let mut failures = Vec::new();
    if profiles.len() != ps.len() {
        failures.push(format!("{} profiles for {} vases", profiles.len(), ps.len()));
        return ProfileReport {
            below_diagonal: false,
            max_w_over_z: f64::NAN,
            separated: false,
            min_separation: None,
            worst_separation: None,
            vanishes_near_inner_heights: false,
            pass: false,
            failures,
        };
    }

    let mut below_diagonal = true;
    let mut max_ratio: f64 = 0.0;
    for pr in profiles {
        if !(PI * pr.amplitude < 1.0) {
            below_diagonal = false;
            failures.push(format!("vase {}: amplitude {} is not below 1/π", pr.vase_index, pr.amplitude));
        }
        let p = ps.p(pr.vase_index);
        for z in phase_grid(pr.height, z_min, p, 16) {
            let ratio = PI * pr.eval_unchecked(z) / z;
            max_ratio = max_ratio.max(ratio);
            if !(ratio < 1.0) {
                below_diagonal = false;
            }
        }
    }

    let mut min_sep: Option<f64> = None;
    let mut worst = None;
    for i in 2..=ps.len() {
        for j in 1..i {
            for z in intersection_heights(ps.p(i), ps.p(j), i, z_min).expect("distinct parameters") {
                let gap = libm::fabs(profiles[i - 1].eval_unchecked(z) - profiles[j - 1].eval_unchecked(z));
                if min_sep.is_none_or(|m| gap < m) {
                    min_sep = Some(gap);
                    worst = Some((i, j, z));
                }
            }
        }
    }
    let separated = min_sep.is_none_or(|m| m > tolerance);
    if !separated {
        failures.push(format!("w_i = w_j within {tolerance} at {worst:?}"));
    }

    let mut vanishes = true;
    for pr in profiles {
        let i = pr.vase_index;
        let v = ps.vase(i);
        let inner = inner_heights_above(&v, z_min);
        let probe = inner_heights(&v, inner.len() + 1);
        let hset = intersection_set(ps, i, z_min / 2.0);
        for (k, iv) in pr.intervals.iter().enumerate() {
            let inside = probe.iter().filter(|&&h| iv.contains(h)).count();
            if inside != 1 {
                vanishes = false;
                failures.push(format!("vase {i}: interval around {} holds {inside} inner-heights", iv.center));
            }
            if !(iv.lo() > 0.0 && iv.hi() <= pr.height) {
                vanishes = false;
                failures.push(format!("vase {i}: interval around {} leaves (0, 1/i]", iv.center));
            }
            if let Some(next) = pr.intervals.get(k + 1) {
                if !(next.hi() < iv.lo()) {
                    vanishes = false;
                    failures.push(format!("vase {i}: intervals around {} and {} overlap", iv.center, next.center));
                }
            }
            let inner_edge = iv.radius * (1.0 - 1e-9);
            if pr.eval_unchecked(iv.center - inner_edge) != 0.0 || pr.eval_unchecked(iv.center + inner_edge) != 0.0 {
                vanishes = false;
                failures.push(format!("vase {i}: w does not vanish on the interval around {}", iv.center));
            }
            if hset.iter().any(|&z| iv.contains(z)) {
                vanishes = false;
                failures.push(format!("vase {i}: an intersection height lies in the interval around {}", iv.center));
            }
        }
        for h in inner {
            if pr.eval_unchecked(h) != 0.0 || pr.interval_at(h).is_none() {
                vanishes = false;
                failures.push(format!("vase {i}: inner-height {h} is not covered"));
            }
        }
    }

    ProfileReport {
        below_diagonal,
        max_w_over_z: max_ratio,
        separated,
        min_separation: min_sep,
        worst_separation: worst,
        vanishes_near_inner_heights: vanishes,
        pass: below_diagonal && separated && vanishes,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{choose_p_sequence, verify_independence};

    fn verified(n: usize) -> PSequence {
        let mut ps = choose_p_sequence(n);
        let r = verify_independence(&ps, 60, 1e-9);
        assert!(ps.mark_verified(&r));
        ps
    }

    #[test]
    fn unverified_sequence_is_rejected() {
        assert_eq!(build_w_profiles(&choose_p_sequence(2), 0.05, 1e-9), Err(BraidError::Unverified));
    }

    #[test]
    fn profiles_vanish_at_inner_heights_and_stay_below_z() {
        let ps = verified(4);
        let profiles = build_w_profiles(&ps, 0.02, 1e-9).unwrap();
        for pr in &profiles {
            for h in inner_heights_above(&ps.vase(pr.vase_index), 0.02) {
                assert_eq!(w_eval(pr, h).unwrap(), 0.0);
            }
            for z in phase_grid(pr.height, 0.02, 3.0, 8) {
                let w = w_eval(pr, z).unwrap();
                assert!(w <= pr.amplitude * z && w < z);
            }
            assert!(w_eval(pr, 0.0).is_err());
            assert!(w_eval(pr, pr.height * 1.01).is_err());
        }
        let report = verify_profile_conditions(&ps, &profiles, 0.02, 1e-9);
        assert!(report.pass, "{:?}", report.failures);
        assert!(report.min_separation.unwrap() > 1e-9);
        assert!(report.max_w_over_z <= 0.5 + 1e-15);
    }

    #[test]
    fn plateau_far_from_intervals() {
        let pr = WProfile {
            vase_index: 1,
            height: 1.0,
            amplitude: 0.1,
            intervals: alloc::vec![ZeroInterval { center: 0.5, radius: 0.01, ramp: 0.005 }],
        };
        assert_eq!(w_eval(&pr, 0.9).unwrap(), 0.1 * 0.9);
        assert_eq!(w_eval(&pr, 0.505).unwrap(), 0.0);
        let mid = w_eval(&pr, 0.5125).unwrap();
        assert!((mid - 0.5 * 0.1 * 0.5125).abs() < 1e-15);
    }

    #[test]
    fn ramp_slope_bound() {
        let ps = verified(3);
        let profiles = build_w_profiles(&ps, 0.05, 1e-9).unwrap();
        let delta = 1e-7;
        for pr in &profiles {
            let min_ramp = pr.intervals.iter().map(|iv| iv.ramp).fold(f64::INFINITY, f64::min);
            let mut z = 0.05;
            while z + delta <= pr.height {
                let bound = (pr.amplitude + pr.amplitude * z / min_ramp) * delta;
                let diff = libm::fabs(w_eval(pr, z).unwrap() - w_eval(pr, z + delta).unwrap());
                assert!(diff <= bound * (1.0 + 1e-9) + 1e-18, "z = {z}");
                z += 1.3e-4;
            }
        }
    }

    #[test]
    fn verification_catches_a_shared_amplitude() {
        let ps = verified(3);
        let mut profiles = build_w_profiles(&ps, 0.05, 1e-9).unwrap();
        for pr in profiles.iter_mut() {
            pr.amplitude = 0.05;
        }
        let report = verify_profile_conditions(&ps, &profiles, 0.05, 1e-9);
        assert!(!report.separated);
        assert!(!report.pass);
    }
}
