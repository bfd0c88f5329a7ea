//! Assembly of the realization space: the braided vases of all generators
//! plus one disc per relator, each in its own height band below the
//! previous one. Finite truncations `{z ≥ ε}` are read back into
//! presentations and compared with the input.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::braid::{
    build_bhv, build_w_profiles, choose_p_sequence, verify_independence, BhvScene, BraidError,
};
use crate::config::BuildConfig;
use crate::disc::{build_disc, DiscError, DiscMesh};
use crate::presentation::{
    count_homomorphisms, first_homology, FiniteGroupTable, Homology, Presentation, PresentationError, Word,
};
use crate::relator_path::{build_alpha, decode_path, AlphaPath, DecodeError, PathError};
use crate::vase::{inner_heights_above, VaseError, WallMesh};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RealizeError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("relator {0} is the empty word")]
    EmptyRelator(usize),
    #[error("parameter sequence failed the coincidence check (min gap {min_gap:?})")]
    Independence { min_gap: Option<f64> },
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error("only {placed} of {total} relators fit above the cutoff: {source}")]
    Headroom { placed: usize, total: usize, source: PathError },
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error(transparent)]
    Vase(#[from] VaseError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("epsilon {epsilon} must lie in (z_min = {z_min}, 1]")]
    Epsilon { epsilon: f64, z_min: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("disc {disc} decodes to a word using generator {generator}, above the {included} included")]
    ForeignGenerator { disc: usize, generator: usize, included: usize },
}

/// Band of relator `k`: the path starts at `start = upper·(1 − margin)`
/// and ends at `terminal = l_k`; the next band starts below
/// `next = l_k·(1 − margin)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Band {
    pub relator: usize,
    pub upper: f64,
    pub start: f64,
    pub terminal: f64,
    pub next: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct BandSchedule {
    pub top: f64,
    pub margin: f64,
    pub bands: Vec<Band>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct AttachedDisc {
    /// 0-based position in the presentation.
    pub relator: usize,
    pub word: Word,
    pub alpha: AlphaPath,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Scene {
    pub config: BuildConfig,
    pub presentation: Presentation,
    /// Number of inner-heights per vase covered by the coincidence check.
    pub independence_depth: usize,
    pub independence_margin: Option<f64>,
    pub bhv: BhvScene,
    pub schedule: BandSchedule,
    pub discs: Vec<AttachedDisc>,
}

impl Scene {
    pub fn wall_meshes(&self) -> Result<Vec<WallMesh>, VaseError> {
        self.bhv.sample_walls(self.config.wall, self.config.sample_budget)
    }

    pub fn disc_mesh(&self, k: usize, n: usize) -> Result<DiscMesh, DiscError> {
        let d = &self.discs[k];
        build_disc(&self.bhv, &d.alpha, n, d.relator)
    }

    pub fn disc_meshes(&self, n: usize) -> Result<Vec<DiscMesh>, DiscError> {
        (0..self.discs.len()).map(|k| self.disc_mesh(k, n)).collect()
    }
}

fn check_config(p: &Presentation, c: &BuildConfig) -> Result<(), RealizeError> {
    let n = p.generator_count();
    if !(c.z_min > 0.0 && c.z_min < 1.0 / n as f64) {
        return Err(RealizeError::Config(format!("z_min = {} must lie in (0, 1/{n})", c.z_min)));
    }
    if !(c.band_margin > 0.0 && c.band_margin < 1.0) {
        return Err(RealizeError::Config(format!("band margin {} must lie in (0, 1)", c.band_margin)));
    }
    if c.disc_resolution < 2 {
        return Err(RealizeError::Config(format!("disc resolution {} is below 2", c.disc_resolution)));
    }
    Ok(())
}

/// `X₀ = BHV` on one vase per generator, then one disc per relator, each
/// path starting just below the previous band.
pub fn build_space(p: &Presentation, config: &BuildConfig) -> Result<Scene, RealizeError> {
    check_config(p, config)?;
    if let Some(k) = p.relators().iter().position(|r| r.is_empty()) {
        return Err(RealizeError::EmptyRelator(k + 1));
    }
    let tol = config.tolerances;
    let mut ps = choose_p_sequence(p.generator_count());
    let depth = (1..=ps.len()).map(|i| inner_heights_above(&ps.vase(i), config.z_min).len()).max().unwrap_or(0);
    let report = verify_independence(&ps, depth, tol.coincidence);
    if !ps.mark_verified(&report) {
        return Err(RealizeError::Independence { min_gap: report.min_gap });
    }
    let profiles = build_w_profiles(&ps, config.z_min, tol.coincidence)?;
    let bhv = build_bhv(&ps, &profiles, config.z_min, tol.coincidence)?;

    let total = p.relators().len();
    let mut bands = Vec::with_capacity(total);
    let mut discs = Vec::with_capacity(total);
    let mut upper = 1.0;
    for (k, word) in p.relators().iter().enumerate() {
        let start = upper * (1.0 - config.band_margin);
        let alpha = build_alpha(&bhv, word, start, config.loop_samples)
            .map_err(|source| RealizeError::Headroom { placed: k, total, source })?;
        let next = alpha.terminal * (1.0 - config.band_margin);
        bands.push(Band { relator: k, upper, start, terminal: alpha.terminal, next });
        discs.push(AttachedDisc { relator: k, word: word.clone(), alpha });
        upper = next;
    }
    Ok(Scene {
        config: *config,
        presentation: p.clone(),
        independence_depth: depth,
        independence_margin: report.min_gap,
        bhv,
        schedule: BandSchedule { top: 1.0, margin: config.band_margin, bands },
        discs,
    })
}

/// `X ∩ {z ≥ ε}` as generator circles plus decoded attaching words.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruncationComplex {
    pub epsilon: f64,
    /// Generators `1..=generators` are included.
    pub generators: usize,
    pub generator_names: Vec<String>,
    /// Included discs (0-based relator positions).
    pub discs: Vec<usize>,
    /// Words read off the included discs' paths.
    pub words: Vec<Word>,
}

impl TruncationComplex {
    pub fn presentation(&self) -> Result<Presentation, PresentationError> {
        Presentation::new(self.generator_names.clone(), self.words.clone())
    }
}

pub fn truncate(scene: &Scene, epsilon: f64) -> Result<TruncationComplex, RealizeError> {
    let z_min = scene.config.z_min;
    if !(epsilon > z_min && epsilon <= 1.0) {
        return Err(RealizeError::Epsilon { epsilon, z_min });
    }
    let generators = (1..=scene.bhv.len()).filter(|&i| 1.0 / i as f64 >= epsilon).count();
    let mut discs = Vec::new();
    let mut words = Vec::new();
    for (k, d) in scene.discs.iter().enumerate() {
        if d.alpha.terminal < epsilon {
            continue;
        }
        let word = decode_path(&scene.bhv, &d.alpha)?;
        if word.max_generator() > generators {
            return Err(RealizeError::ForeignGenerator { disc: k, generator: word.max_generator(), included: generators });
        }
        discs.push(k);
        words.push(word);
    }
    Ok(TruncationComplex {
        epsilon,
        generators,
        generator_names: scene.presentation.generator_names()[..generators].to_vec(),
        discs,
        words,
    })
}

/// The input presentation cut down to what `tc` should realize: its first
/// `|discs|` relators over its included generators.
pub fn expected_truncation(p: &Presentation, tc: &TruncationComplex) -> Result<Presentation, PresentationError> {
    p.truncate(tc.discs.len())?.restrict_generators(tc.generators)
}

/// Targets for the hom-count comparison: S₃, Z/2, Z/4, D₄.
pub fn comparison_groups() -> Vec<FiniteGroupTable> {
    alloc::vec![
        FiniteGroupTable::symmetric(3),
        FiniteGroupTable::cyclic(2),
        FiniteGroupTable::cyclic(4),
        FiniteGroupTable::dihedral(4),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomCountRow {
    pub group: String,
    /// `None` when the enumeration budget is exceeded.
    pub actual: Option<u64>,
    pub expected: Option<u64>,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pi1Report {
    pub epsilon: f64,
    pub generators: usize,
    pub discs: usize,
    pub actual: Homology,
    pub expected: Homology,
    pub homology_agrees: bool,
    pub hom_counts: Vec<HomCountRow>,
    pub pass: bool,
}

/// Agreement of these invariants is evidence for, not a proof of,
/// isomorphism of the two groups.
pub const PI1_NOTE: &str = "H1 and finite hom-counts agree; this is evidence, not an isomorphism proof";

pub fn pi1_report(tc: &TruncationComplex, expected: &Presentation) -> Result<Pi1Report, PresentationError> {
    let actual_p = tc.presentation()?;
    let actual = first_homology(&actual_p);
    let expected_h = first_homology(expected);
    let homology_agrees = actual == expected_h && actual_p.generator_count() == expected.generator_count();
    let hom_counts: Vec<HomCountRow> = comparison_groups()
        .iter()
        .map(|g| {
            let a = count_homomorphisms(&actual_p, g).ok();
            let e = count_homomorphisms(expected, g).ok();
            // both over budget means there is nothing to compare, not a mismatch
            HomCountRow { group: String::from(g.name()), actual: a, expected: e, agree: a == e }
        })
        .collect();
    let pass = homology_agrees && hom_counts.iter().all(|r| r.agree);
    Ok(Pi1Report {
        epsilon: tc.epsilon,
        generators: tc.generators,
        discs: tc.discs.len(),
        actual,
        expected: expected_h,
        homology_agrees,
        hom_counts,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelCount {
    pub epsilon: f64,
    /// Wall meshes with a sample at `z ≥ ε`.
    pub walls: usize,
    /// `|{i ≤ N : 1/i ≥ ε}|`.
    pub expected_walls: usize,
    /// Disc meshes with a sample at `z ≥ ε`.
    pub discs: usize,
    /// Bands whose path starts at or above `ε`.
    pub expected_discs: usize,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompactnessReport {
    /// Every sample in `{r ≤ 3, 0 ≤ z ≤ 1, 0 ≤ w ≤ z}`.
    pub in_box: bool,
    pub box_violations: usize,
    pub max_r: f64,
    pub max_w_over_z: f64,
    pub levels: Vec<LevelCount>,
    pub levels_match: bool,
    /// Band intervals `[l_k, start_k]` and disc sample ranges pairwise disjoint.
    pub bands_disjoint: bool,
    /// Every wall and disc touches the axis line `{r = 2, φ = 0, w = 0}`.
    pub axis_contact: bool,
    pub samples: usize,
    pub unsampled: String,
    pub pass: bool,
}

pub fn compactness_report(scene: &Scene, epsilons: &[f64], disc_resolution: usize) -> Result<CompactnessReport, RealizeError> {
    let walls = scene.wall_meshes()?;
    let discs = scene.disc_meshes(disc_resolution)?;

    let mut violations = 0;
    let mut samples = 0;
    let mut max_r: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut visit = |r: f64, z: f64, w: f64| {
        samples += 1;
        max_r = max_r.max(r);
        if z > 0.0 {
            max_ratio = max_ratio.max(w / z);
        }
        if !(r <= 3.0 && (0.0..=1.0).contains(&z) && w >= 0.0 && w <= z) {
            violations += 1;
        }
    };
    for wall in &walls {
        for p in &wall.points {
            visit(p.r, p.z, p.w);
        }
    }
    for d in &discs {
        for p in &d.points {
            visit(libm::sqrt(p[0] * p[0] + p[1] * p[1]), p[2], p[3]);
        }
    }

    let top = |pts: &mut dyn Iterator<Item = f64>| pts.fold(f64::NEG_INFINITY, f64::max);
    let levels: Vec<LevelCount> = epsilons
        .iter()
        .map(|&eps| LevelCount {
            epsilon: eps,
            walls: walls.iter().filter(|w| top(&mut w.points.iter().map(|p| p.z)) >= eps).count(),
            expected_walls: (1..=scene.bhv.len()).filter(|&i| 1.0 / i as f64 >= eps).count(),
            discs: discs.iter().filter(|d| top(&mut d.points.iter().map(|p| p[2])) >= eps).count(),
            expected_discs: scene.schedule.bands.iter().filter(|b| b.start >= eps).count(),
        })
        .collect();
    let levels_match = levels.iter().all(|l| l.walls == l.expected_walls && l.discs == l.expected_discs);

    let bands = &scene.schedule.bands;
    let mut bands_disjoint = true;
    for (a, ba) in bands.iter().enumerate() {
        for bb in &bands[a + 1..] {
            if !(bb.start < ba.terminal || ba.start < bb.terminal) {
                bands_disjoint = false;
            }
        }
    }
    let ranges: Vec<(f64, f64)> = discs
        .iter()
        .map(|d| {
            let zs = d.points.iter().map(|p| p[2]);
            (zs.clone().fold(f64::INFINITY, f64::min), zs.fold(f64::NEG_INFINITY, f64::max))
        })
        .collect();
    for (a, ra) in ranges.iter().enumerate() {
        for rb in &ranges[a + 1..] {
            if !(rb.1 < ra.0 || ra.1 < rb.0) {
                bands_disjoint = false;
            }
        }
    }

    let on_axis = |r: f64, phi: f64, w: f64| r == 2.0 && phi == 0.0 && w == 0.0;
    let axis_contact = walls.iter().all(|w| w.points.iter().any(|p| on_axis(p.r, p.phi, p.w)))
        && discs.iter().all(|d| {
            let b = d.points[0];
            b[0] == 2.0 && b[1] == 0.0 && b[3] == 0.0
        });

    let in_box = violations == 0;
    let unsampled = format!(
        "heights in (0, {}) are not sampled; the pedestal (radius 3 at z = 0) is exact geometry",
        scene.config.z_min
    );
    Ok(CompactnessReport {
        in_box,
        box_violations: violations,
        max_r,
        max_w_over_z: max_ratio,
        pass: in_box && levels_match && bands_disjoint && axis_contact,
        levels,
        levels_match,
        bands_disjoint,
        axis_contact,
        samples,
        unsampled,
    })
}
