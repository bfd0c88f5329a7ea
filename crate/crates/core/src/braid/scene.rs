use alloc::string::String;
use alloc::vec::Vec;

use super::{intersection_heights, verify_profile_conditions, BraidError, PSequence, PValue, WProfile};
use crate::config::Resolution;
use crate::vase::{phase_grid, phi_grid, radius_unchecked, sample_wall, CylPoint4, VaseError, VaseParams, WallMesh};
use crate::PI;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct BraidedVase {
    pub index: usize,
    pub params: VaseParams,
    pub p: PValue,
    pub profile: WProfile,
}

impl BraidedVase {
    /// Wall point at `(φ, z)`, including the braiding coordinate.
    pub fn wall_point(&self, phi: f64, z: f64) -> CylPoint4 {
        CylPoint4::new(
            radius_unchecked(self.params.p, phi, z),
            phi,
            z,
            libm::fabs(phi) * self.profile.eval_unchecked(z),
        )
    }
}

/// `⋃ HV(1/i, p_i, |φ|·w_i)` down to `z_min`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct BhvScene {
    pub z_min: f64,
    pub p_scheme: String,
    pub vases: Vec<BraidedVase>,
}

impl BhvScene {
    pub fn len(&self) -> usize {
        self.vases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vases.is_empty()
    }

    /// Vase `i`, 1-based.
    pub fn vase(&self, i: usize) -> Option<&BraidedVase> {
        i.checked_sub(1).and_then(|k| self.vases.get(k))
    }

    pub fn sample_walls(&self, resolution: Resolution, budget: usize) -> Result<Vec<WallMesh>, VaseError> {
        self.vases
            .iter()
            .map(|v| sample_wall(&v.params, Some(&v.profile), v.index, resolution, self.z_min, budget))
            .collect()
    }
}

/// Checks the profiles and assembles the scene; vase `i` gets `m = 1/i`.
pub fn build_bhv(ps: &PSequence, profiles: &[WProfile], z_min: f64, tolerance: f64) -> Result<BhvScene, BraidError> {
    if profiles.len() != ps.len() {
        return Err(BraidError::CountMismatch { profiles: profiles.len(), vases: ps.len() });
    }
    if !ps.is_verified() {
        return Err(BraidError::Unverified);
    }
    let report = verify_profile_conditions(ps, profiles, z_min, tolerance);
    if !report.pass {
        return Err(BraidError::ConditionsFail(report.failures.join("; ")));
    }
    let vases = profiles
        .iter()
        .enumerate()
        .map(|(k, pr)| BraidedVase { index: k + 1, params: ps.vase(k + 1), p: ps.values()[k].clone(), profile: pr.clone() })
        .collect();
    Ok(BhvScene { z_min, p_scheme: ps.scheme.clone(), vases })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeparationReport {
    /// `None` when fewer than two vases share any grid height.
    pub min_distance: Option<f64>,
    /// `(i, j, φ, z)` attaining the minimum.
    pub location: Option<(usize, usize, f64, f64)>,
    pub delta: f64,
    pub z_window: (f64, f64),
    pub compared: usize,
}

/// Minimum 4D distance between walls of distinct vases at shared `(φ, z)`
/// with `|φ| ≥ delta` and `z_lo ≤ z ≤ z_hi`.
///
/// The `z` grid is phase-uniform for the largest parameter, refined by
/// `resolution.oversample`, and every intersection height in the window is
/// added explicitly since that is where the `r`-coordinates agree.
pub fn min_wall_separation(scene: &BhvScene, delta: f64, z_lo: f64, z_hi: f64, resolution: Resolution) -> SeparationReport {
    let phis: Vec<f64> = phi_grid(resolution.phi_steps).into_iter().filter(|p| libm::fabs(*p) >= delta).collect();
    let p_max = scene.vases.iter().map(|v| v.params.p).fold(0.0, f64::max);
    let mut zs = if p_max > 0.0 { phase_grid(z_hi, z_lo, p_max, resolution.oversample) } else { Vec::new() };
    for a in &scene.vases {
        for b in scene.vases.iter().filter(|b| b.index < a.index) {
            if let Ok(hs) = intersection_heights(a.params.p, b.params.p, a.index, z_lo) {
                zs.extend(hs.into_iter().filter(|&z| z <= z_hi));
            }
        }
    }
    if z_lo > 0.0 && z_lo <= z_hi {
        zs.push(z_lo);
    }

    let mut best: Option<f64> = None;
    let mut location = None;
    let mut compared = 0;
    for &z in &zs {
        let live: Vec<&BraidedVase> = scene.vases.iter().filter(|v| v.params.m >= z).collect();
        for (k, a) in live.iter().enumerate() {
            let sa = libm::sin(PI * a.params.p / z);
            let wa = a.profile.eval_unchecked(z);
            for b in &live[..k] {
                let ds = (sa - libm::sin(PI * b.params.p / z)) / PI;
                let dw = wa - b.profile.eval_unchecked(z);
                let unit = libm::sqrt(ds * ds + dw * dw);
                for &phi in &phis {
                    let d = libm::fabs(phi) * unit;
                    compared += 1;
                    if best.is_none_or(|m| d < m) {
                        best = Some(d);
                        location = Some((a.index, b.index, phi, z));
                    }
                }
            }
        }
    }
    SeparationReport { min_distance: best, location, delta, z_window: (z_lo, z_hi), compared }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{build_w_profiles, choose_p_sequence, intersection_heights, verify_independence};
    use crate::vase::distance4;

    fn scene(n: usize, z_min: f64) -> BhvScene {
        let mut ps = choose_p_sequence(n);
        let r = verify_independence(&ps, 60, 1e-9);
        ps.mark_verified(&r);
        let profiles = build_w_profiles(&ps, z_min, 1e-9).unwrap();
        build_bhv(&ps, &profiles, z_min, 1e-9).unwrap()
    }

    #[test]
    fn heights_are_reciprocals() {
        let s = scene(3, 0.02);
        let ms: Vec<f64> = s.vases.iter().map(|v| v.params.m).collect();
        assert_eq!(ms, [1.0, 0.5, 1.0 / 3.0]);
    }

    #[test]
    fn meshes_stay_in_the_box() {
        let s = scene(3, 0.02);
        for mesh in s.sample_walls(Resolution::default(), 1_000_000).unwrap() {
            for pt in &mesh.points {
                assert!(pt.r <= 3.0 && pt.r >= 1.0);
                assert!(pt.w >= 0.0 && pt.w < pt.z && pt.z <= 1.0);
            }
        }
    }

    #[test]
    fn separation_formula_matches_cartesian_distance() {
        let s = scene(3, 0.02);
        let (a, b) = (&s.vases[2], &s.vases[0]);
        let z = intersection_heights(a.params.p, b.params.p, 3, 0.05).unwrap()[0];
        let (pa, pb) = (a.wall_point(PI, z), b.wall_point(PI, z));
        let d = distance4(&pa.to_cartesian(), &pb.to_cartesian());
        let expect = PI * libm::fabs(a.profile.eval_unchecked(z) - b.profile.eval_unchecked(z));
        assert!((d - expect).abs() < 1e-12);
        assert!(d > 0.0);
    }

    #[test]
    fn separation_positive_away_from_axis_and_zero_on_it() {
        let s = scene(3, 0.02);
        let r = min_wall_separation(&s, 0.05, 0.02, 1.0, Resolution::default());
        assert!(r.min_distance.unwrap() > 0.0);
        let r0 = min_wall_separation(&s, 0.0, 0.02, 1.0, Resolution::default());
        assert_eq!(r0.min_distance, Some(0.0));
    }

    #[test]
    fn rejects_mismatched_profiles() {
        let mut ps = choose_p_sequence(2);
        let r = verify_independence(&ps, 20, 1e-9);
        ps.mark_verified(&r);
        let profiles = build_w_profiles(&ps, 0.05, 1e-9).unwrap();
        assert!(matches!(build_bhv(&ps, &profiles[..1], 0.05, 1e-9), Err(BraidError::CountMismatch { .. })));
    }
}
