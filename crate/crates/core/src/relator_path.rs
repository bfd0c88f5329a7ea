//! The descending path `α` along which a relator disc is attached: vertical
//! drops on the axis line `{r = 2, φ = 0, w = 0}` alternating with one full
//! turn around an inner-curve per letter.

use alloc::vec::Vec;

use crate::braid::BhvScene;
use crate::presentation::{GeneratorId, Letter, Sign, Word};
use crate::vase::{radius_unchecked, CylPoint4};
use crate::PI;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PathError {
    #[error("letter {position}: generator {generator} has no vase in the scene")]
    UnknownGenerator { position: usize, generator: usize },
    #[error("letter {position} (generator {generator}): no inner-height left below {below} above the cutoff")]
    InsufficientHeadroom { position: usize, generator: usize, below: f64 },
    #[error("start height {0} is outside (0, 1]")]
    BadStart(f64),
    #[error("loops need an even number of samples, at least 4 (got {0})")]
    BadLoopSamples(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ScheduleEntry {
    pub vase: usize,
    pub inner_height: f64,
    /// Zero-interval radius of the vase around `inner_height`.
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PathSegment {
    Vertical { z_start: f64, z_end: f64 },
    Loop { vase: usize, inner_height: f64, orientation: Sign, z_in: f64, z_out: f64 },
}

impl PathSegment {
    fn z_range(&self) -> (f64, f64) {
        match *self {
            PathSegment::Vertical { z_start, z_end } => (z_start, z_end),
            PathSegment::Loop { z_in, z_out, .. } => (z_in, z_out),
        }
    }
}

/// Angle after a fraction `u` of a loop: `0 → π ≡ −π → 0` for `Plus`.
pub fn loop_angle(u: f64, orientation: Sign) -> f64 {
    let phi = if u <= 0.5 { 2.0 * PI * u } else { 2.0 * PI * u - 2.0 * PI };
    match orientation {
        Sign::Plus => phi,
        Sign::Minus => -phi,
    }
}

/// The straight segment `γ` from height `from` down (or up) to `to` on the
/// axis line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasePointPath {
    pub from: f64,
    pub to: f64,
}

impl BasePointPath {
    pub fn point(&self, t: f64) -> CylPoint4 {
        CylPoint4::axis(self.from + (self.to - self.from) * t)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct AlphaPath {
    pub segments: Vec<PathSegment>,
    pub polyline: Vec<CylPoint4>,
    pub start: f64,
    pub terminal: f64,
}

impl AlphaPath {
    /// The point of `α` at height `z` (exact, not interpolated from the
    /// polyline). `None` outside `[terminal, start]`.
    pub fn point_at_height(&self, scene: &BhvScene, z: f64) -> Option<CylPoint4> {
        if !(z >= self.terminal && z <= self.start) {
            return None;
        }
        let pos = self.segments.partition_point(|s| s.z_range().1 > z);
        match self.segments.get(pos) {
            None => Some(CylPoint4::axis(z)),
            Some(PathSegment::Vertical { .. }) => Some(CylPoint4::axis(z)),
            Some(&PathSegment::Loop { vase, orientation, z_in, z_out, .. }) => {
                let u = (z_in - z) / (z_in - z_out);
                if u <= 0.0 {
                    return Some(CylPoint4::axis(z));
                }
                let phi = loop_angle(u.min(1.0), orientation);
                let p = scene.vase(vase)?.params.p;
                Some(CylPoint4::new(radius_unchecked(p, phi, z), phi, z, 0.0))
            }
        }
    }

    pub fn cartesian(&self) -> Vec<[f64; 4]> {
        self.polyline.iter().map(|p| p.to_cartesian()).collect()
    }
}

/// Greedy choice of inner-heights `h > a₁ > a₂ > …`, one per letter.
///
/// For each letter the largest zero-interval center `c` of its vase with
/// `c + ρ` below the running bound is taken; the bound then drops to
/// `c − ρ`. The loop later spans `c ± ρ/2`, which must stay above the
/// scene cutoff.
pub fn schedule_inner_heights(scene: &BhvScene, word: &Word, h: f64) -> Result<Vec<ScheduleEntry>, PathError> {
    let mut bound = h;
    let mut out = Vec::with_capacity(word.len());
    for (position, letter) in word.letters().iter().enumerate() {
        let generator = letter.generator.index();
        let vase = scene.vase(generator).ok_or(PathError::UnknownGenerator { position, generator })?;
        let pick = vase
            .profile
            .intervals
            .iter()
            .find(|iv| iv.center + iv.radius < bound && iv.center - iv.radius / 2.0 > scene.z_min)
            .ok_or(PathError::InsufficientHeadroom { position, generator, below: bound })?;
        out.push(ScheduleEntry { vase: generator, inner_height: pick.center, radius: pick.radius });
        bound = pick.center - pick.radius;
    }
    Ok(out)
}

/// `α₁ ∗ β₁ ∗ … ∗ α_k ∗ β_k` from the axis point at height `h`.
pub fn build_alpha(scene: &BhvScene, word: &Word, h: f64, loop_samples: usize) -> Result<AlphaPath, PathError> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(PathError::BadStart(h));
    }
    if loop_samples < 4 || loop_samples % 2 != 0 {
        return Err(PathError::BadLoopSamples(loop_samples));
    }
    let schedule = schedule_inner_heights(scene, word, h)?;
    let mut segments = Vec::with_capacity(2 * schedule.len());
    let mut polyline = alloc::vec![CylPoint4::axis(h)];
    let mut z = h;
    for (entry, letter) in schedule.iter().zip(word.letters()) {
        let z_in = entry.inner_height + entry.radius / 2.0;
        let z_out = entry.inner_height - entry.radius / 2.0;
        segments.push(PathSegment::Vertical { z_start: z, z_end: z_in });
        polyline.push(CylPoint4::axis(z_in));
        let p = scene.vases[entry.vase - 1].params.p;
        for k in 1..=loop_samples {
            let u = k as f64 / loop_samples as f64;
            let zk = if k == loop_samples { z_out } else { z_in - (z_in - z_out) * u };
            let phi = loop_angle(u, letter.sign);
            polyline.push(CylPoint4::new(radius_unchecked(p, phi, zk), phi, zk, 0.0));
        }
        segments.push(PathSegment::Loop {
            vase: entry.vase,
            inner_height: entry.inner_height,
            orientation: letter.sign,
            z_in,
            z_out,
        });
        z = z_out;
    }
    Ok(AlphaPath { segments, polyline, start: h, terminal: z })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneReport {
    pub pass: bool,
    /// First `k` with `z[k + 1] ≥ z[k]`.
    pub first_violation: Option<usize>,
    pub min_drop: Option<f64>,
}

/// Strict decrease of `z` along consecutive samples.
pub fn verify_monotone(polyline: &[CylPoint4]) -> MonotoneReport {
    let mut first_violation = None;
    let mut min_drop: Option<f64> = None;
    for (k, pair) in polyline.windows(2).enumerate() {
        let drop = pair[0].z - pair[1].z;
        if min_drop.is_none_or(|m| drop < m) {
            min_drop = Some(drop);
        }
        if !(drop > 0.0) && first_violation.is_none() {
            first_violation = Some(k);
        }
    }
    MonotoneReport { pass: first_violation.is_none(), first_violation, min_drop }
}

/// Largest deviation of a polyline sample from the wall (or axis line) its
/// segment claims, in `r` and in `w`.
pub fn wall_residual(scene: &BhvScene, path: &AlphaPath) -> f64 {
    let mut worst: f64 = 0.0;
    for pt in &path.polyline {
        let pos = path.segments.partition_point(|s| s.z_range().1 > pt.z);
        let (r, w) = match path.segments.get(pos) {
            Some(&PathSegment::Loop { vase, .. }) => {
                let v = &scene.vases[vase - 1];
                (radius_unchecked(v.params.p, pt.phi, pt.z), libm::fabs(pt.phi) * v.profile.eval_unchecked(pt.z))
            }
            _ => (2.0, 0.0),
        };
        worst = worst.max(libm::fabs(pt.r - r)).max(libm::fabs(pt.w - w));
    }
    worst
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("episode starting at sample {start} does not make exactly one full turn")]
    IncompleteSweep { start: usize },
    #[error("episode starting at sample {start} (z in [{z_lo}, {z_hi}]) matches no vase")]
    Unmatched { start: usize, z_lo: f64, z_hi: f64 },
    #[error("episode starting at sample {start} matches vases {candidates:?}")]
    Ambiguous { start: usize, candidates: Vec<usize> },
    #[error("sample {index} is neither on the axis line nor inside a loop")]
    OffAxis { index: usize },
}

const ANGLE_EPS: f64 = 1e-12;
const WALL_TOL: f64 = 1e-9;

/// Reads the word back off a Cartesian polyline, using only the geometry.
///
/// A loop episode is a maximal run of samples with `|φ| > 0`; it must cross
/// `φ = ±π` exactly once. The vase is the one whose zero interval contains
/// the episode's heights, whose wall carries every sample, and whose radius
/// at the crossing is near its inner minimum `1`. The orientation is the sign
/// of `φ` on entry.
pub fn decode_word(scene: &BhvScene, cartesian: &[[f64; 4]]) -> Result<Word, DecodeError> {
    let pts: Vec<CylPoint4> = cartesian.iter().map(|&c| CylPoint4::from_cartesian(c)).collect();
    let mut letters = Vec::new();
    let mut k = 0;
    while k < pts.len() {
        if libm::fabs(pts[k].phi) <= ANGLE_EPS {
            if libm::fabs(pts[k].r - 2.0) > WALL_TOL || libm::fabs(pts[k].w) > WALL_TOL {
                return Err(DecodeError::OffAxis { index: k });
            }
            k += 1;
            continue;
        }
        let start = k;
        while k < pts.len() && libm::fabs(pts[k].phi) > ANGLE_EPS {
            k += 1;
        }
        if k == pts.len() || start == 0 {
            return Err(DecodeError::IncompleteSweep { start });
        }
        let episode = &pts[start..k];
        letters.push(decode_episode(scene, episode, start)?);
    }
    Ok(Word::new(letters))
}

fn decode_episode(scene: &BhvScene, episode: &[CylPoint4], start: usize) -> Result<Letter, DecodeError> {
    let entry_sign = episode[0].phi > 0.0;
    let mut wraps = 0;
    let mut wrap_at = 0;
    for (k, pair) in episode.windows(2).enumerate() {
        if (pair[0].phi > 0.0) != (pair[1].phi > 0.0) {
            wraps += 1;
            wrap_at = if libm::fabs(pair[0].phi) >= libm::fabs(pair[1].phi) { k } else { k + 1 };
        }
    }
    let exit_sign = episode[episode.len() - 1].phi > 0.0;
    if wraps != 1 || entry_sign == exit_sign {
        return Err(DecodeError::IncompleteSweep { start });
    }
    let z_hi = episode.iter().map(|p| p.z).fold(f64::NEG_INFINITY, f64::max);
    let z_lo = episode.iter().map(|p| p.z).fold(f64::INFINITY, f64::min);

    let mut candidates = Vec::new();
    for v in &scene.vases {
        let Some(iv) = v.profile.interval_at(z_hi) else { continue };
        if !iv.contains(z_lo) {
            continue;
        }
        let on_wall = episode.iter().all(|p| {
            libm::fabs(p.r - radius_unchecked(v.params.p, p.phi, p.z)) <= WALL_TOL
                && libm::fabs(p.w - libm::fabs(p.phi) * v.profile.eval_unchecked(p.z)) <= WALL_TOL
        });
        if on_wall && episode[wrap_at].r <= 1.5 {
            candidates.push(v.index);
        }
    }
    match candidates.as_slice() {
        [] => Err(DecodeError::Unmatched { start, z_lo, z_hi }),
        &[vase] => {
            let generator = GeneratorId::new(vase as u32).expect("vase indices start at 1");
            let sign = if entry_sign { Sign::Plus } else { Sign::Minus };
            Ok(Letter::new(generator, sign))
        }
        _ => Err(DecodeError::Ambiguous { start, candidates }),
    }
}

/// [`decode_word`] on the path's polyline alone.
pub fn decode_path(scene: &BhvScene, path: &AlphaPath) -> Result<Word, DecodeError> {
    decode_word(scene, &path.cartesian())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{build_bhv, build_w_profiles, choose_p_sequence, verify_independence};

    fn scene(n: usize) -> BhvScene {
        let mut ps = choose_p_sequence(n);
        let r = verify_independence(&ps, 80, 1e-9);
        ps.mark_verified(&r);
        let profiles = build_w_profiles(&ps, 0.01, 1e-9).unwrap();
        build_bhv(&ps, &profiles, 0.01, 1e-9).unwrap()
    }

    #[test]
    fn single_letter_skips_the_top_inner_height() {
        let s = scene(3);
        let sched = schedule_inner_heights(&s, &Word::from_pairs(&[(1, 1)]), 0.95).unwrap();
        assert_eq!(sched.len(), 1);
        assert!((sched[0].inner_height - 2.0 * core::f64::consts::SQRT_2 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn schedule_descends_with_clearance() {
        let s = scene(3);
        let word = Word::from_pairs(&[(1, 1), (2, 1), (3, -1), (1, 1)]);
        let sched = schedule_inner_heights(&s, &word, 0.95).unwrap();
        for pair in sched.windows(2) {
            assert!(pair[0].inner_height - pair[1].inner_height > pair[0].radius + pair[1].radius);
        }
        assert!(sched.iter().all(|e| e.inner_height > s.z_min));
    }

    #[test]
    fn empty_word_is_a_point() {
        let s = scene(2);
        let a = build_alpha(&s, &Word::empty(), 0.9, 16).unwrap();
        assert!(a.segments.is_empty());
        assert_eq!(a.terminal, 0.9);
        assert_eq!(decode_path(&s, &a).unwrap(), Word::empty());
    }

    #[test]
    fn loops_lie_on_their_wall() {
        let s = scene(3);
        let a = build_alpha(&s, &Word::from_pairs(&[(1, 1), (3, -1)]), 0.95, 64).unwrap();
        assert!(wall_residual(&s, &a) < 1e-12);
        assert!(verify_monotone(&a.polyline).pass);
        assert!(a.terminal > s.z_min && a.terminal < a.start);
        assert_eq!(a.polyline.last().unwrap().phi, 0.0);
    }

    #[test]
    fn point_at_height_matches_polyline() {
        let s = scene(2);
        let a = build_alpha(&s, &Word::from_pairs(&[(2, 1), (1, -1)]), 0.9, 32).unwrap();
        for pt in &a.polyline {
            let q = a.point_at_height(&s, pt.z).unwrap();
            let d = crate::vase::distance4(&q.to_cartesian(), &pt.to_cartesian());
            assert!(d < 1e-12, "{pt:?} vs {q:?}");
        }
        assert!(a.point_at_height(&s, a.terminal / 2.0).is_none());
    }

    #[test]
    fn reducible_word_keeps_both_loops() {
        let s = scene(2);
        let w = Word::from_pairs(&[(1, 1), (1, -1)]);
        let a = build_alpha(&s, &w, 0.95, 16).unwrap();
        let decoded = decode_path(&s, &a).unwrap();
        assert_eq!(decoded, w);
        assert!(decoded.free_reduce().is_empty());
    }

    #[test]
    fn monotone_negative_cases() {
        let flat = [CylPoint4::axis(0.5), CylPoint4::axis(0.4), CylPoint4::axis(0.4)];
        assert_eq!(verify_monotone(&flat).first_violation, Some(1));
        let s = scene(2);
        let mut a = build_alpha(&s, &Word::from_pairs(&[(1, 1)]), 0.95, 16).unwrap();
        a.polyline.reverse();
        assert_eq!(verify_monotone(&a.polyline).first_violation, Some(0));
    }

    #[test]
    fn headroom_error_names_the_letter() {
        let s = scene(2);
        let long = Word::new(alloc::vec![Letter::new(GeneratorId::new(2).unwrap(), Sign::Plus); 200]);
        match schedule_inner_heights(&s, &long, 0.95) {
            Err(PathError::InsufficientHeadroom { generator: 2, position, .. }) => assert!(position > 0),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            schedule_inner_heights(&s, &Word::from_pairs(&[(3, 1)]), 0.95),
            Err(PathError::UnknownGenerator { generator: 3, .. })
        ));
    }

    #[test]
    fn truncated_sweep_is_rejected() {
        let s = scene(2);
        let a = build_alpha(&s, &Word::from_pairs(&[(1, 1)]), 0.95, 16).unwrap();
        let mut cart = a.cartesian();
        cart.truncate(cart.len() - 3);
        assert!(matches!(decode_word(&s, &cart), Err(DecodeError::IncompleteSweep { .. })));
    }
}
