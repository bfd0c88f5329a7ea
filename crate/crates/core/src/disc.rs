//! The attaching map `f : I² → R⁴` of a relator disc, its quotient mesh, and
//! sample-level injectivity and disjointness checks.
//!
//! Along `t ∈ [0, 1/2]` the left edge `f(0, ·)` runs down `α`; along
//! `[1/2, 1]` it climbs back up the axis line. Both halves are parametrized
//! by the same height `z(t)`, so `z(1/2 − τ) = z(1/2 + τ)`. Each horizontal
//! segment `s ↦ f(s, t)` is straight, ends on the `z`-axis, and on the upper
//! half is pushed into `w > 0` by a bump `g`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::braid::BhvScene;
use crate::nearest::{closest_pair, GridIndex4};
use crate::relator_path::AlphaPath;
use crate::vase::{CylPoint4, WallMesh};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DiscError {
    #[error("the attaching path has zero length")]
    Degenerate,
    #[error("disc resolution must be at least 2 (got {0})")]
    TooCoarse(usize),
    #[error("({s}, {t}) is outside the unit square")]
    OutOfRange { s: f64, t: f64 },
    #[error("the attaching path does not cover height {0}")]
    Uncovered(f64),
}

/// `g(s, t) = A·s(1−s)·(t − 1/2)(1 − t)·z(t)` on the upper half, `A = 8·margin`.
///
/// Since `s(1−s) ≤ 1/4` and `(t − 1/2)(1 − t) ≤ 1/16`, `g ≤ margin·z/8 < z`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct BumpG {
    pub margin: f64,
}

impl Default for BumpG {
    fn default() -> Self {
        Self { margin: 0.5 }
    }
}

impl BumpG {
    /// The degenerate bump `g ≡ 0`.
    pub const FLAT: BumpG = BumpG { margin: 0.0 };

    pub fn amplitude(&self) -> f64 {
        8.0 * self.margin
    }

    pub fn eval(&self, s: f64, t: f64, z: f64) -> f64 {
        if t <= 0.5 {
            return 0.0;
        }
        self.amplitude() * s * (1.0 - s) * (t - 0.5) * (1.0 - t) * z
    }
}

/// Height of `f(·, t)`: down from `h` to `l` on `[0, 1/2]`, back up on `[1/2, 1]`.
/// Depends on `t` only through `|2t − 1|`, so the two halves agree exactly.
pub fn synchronized_height(h: f64, l: f64, t: f64) -> f64 {
    let d = libm::fabs(2.0 * t - 1.0);
    (h - (h - l) * (1.0 - d)).clamp(l, h)
}

/// `f(0, t)`.
pub fn left_edge(scene: &BhvScene, alpha: &AlphaPath, t: f64) -> Result<CylPoint4, DiscError> {
    let z = synchronized_height(alpha.start, alpha.terminal, t);
    if t <= 0.5 {
        alpha.point_at_height(scene, z).ok_or(DiscError::Uncovered(z))
    } else {
        Ok(CylPoint4::axis(z))
    }
}

/// `f(s, t)` in Cartesian coordinates.
pub fn disc_point_f(scene: &BhvScene, alpha: &AlphaPath, bump: &BumpG, s: f64, t: f64) -> Result<[f64; 4], DiscError> {
    if !((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t)) {
        return Err(DiscError::OutOfRange { s, t });
    }
    let edge = left_edge(scene, alpha, t)?.to_cartesian();
    Ok(blend(&edge, s, bump.eval(s, t, edge[2])))
}

fn blend(edge: &[f64; 4], s: f64, g: f64) -> [f64; 4] {
    let z = edge[2];
    [(1.0 - s) * edge[0], (1.0 - s) * edge[1], z, (1.0 - s) * edge[3] + g]
}

/// Samples of `f` on an `n × n` grid with the quotient welds recorded.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct DiscMesh {
    pub n: usize,
    /// `(l, h)`.
    pub band: (f64, f64),
    pub relator_index: usize,
    pub bump: BumpG,
    /// `points[j * n + i] = f(i/(n−1), j/(n−1))`.
    pub points: Vec<[f64; 4]>,
    /// Smallest grid index identified with each sample.
    pub representative: Vec<u32>,
}

impl DiscMesh {
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn s(&self, i: usize) -> f64 {
        i as f64 / (self.n - 1) as f64
    }

    /// Number of distinct samples after welding.
    pub fn welded_len(&self) -> usize {
        self.representative.iter().enumerate().filter(|&(k, &r)| r as usize == k).count()
    }

    /// The left edge `f(0, ·)`: `α` followed by `γ` back to the start.
    pub fn boundary(&self) -> Vec<[f64; 4]> {
        (0..self.n).map(|j| self.points[self.index(0, j)]).collect()
    }

    /// `V − E + F` of the welded quad grid; edges collapsed by a weld are
    /// dropped.
    pub fn euler_characteristic(&self) -> i64 {
        let n = self.n;
        let rep = |i: usize, j: usize| self.representative[j * n + i];
        let mut edges = BTreeSet::new();
        for j in 0..n {
            for i in 0..n {
                let a = rep(i, j);
                for (di, dj) in [(1, 0), (0, 1)] {
                    if i + di < n && j + dj < n {
                        let b = rep(i + di, j + dj);
                        if a != b {
                            edges.insert((a.min(b), a.max(b)));
                        }
                    }
                }
            }
        }
        let faces = ((n - 1) * (n - 1)) as i64;
        self.welded_len() as i64 - edges.len() as i64 + faces
    }
}

fn find(parent: &mut [u32], mut k: u32) -> u32 {
    while parent[k as usize] != k {
        let up = parent[parent[k as usize] as usize];
        parent[k as usize] = up;
        k = up;
    }
    k
}

fn union(parent: &mut [u32], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a as u32), find(parent, b as u32));
    let (lo, hi) = (ra.min(rb), ra.max(rb));
    parent[hi as usize] = lo;
}

/// Weld table for `(i, 0) ∼ (i, n−1)` and `(n−1, j) ∼ (n−1, n−1−j)`.
pub fn weld_table(n: usize) -> Vec<u32> {
    let mut parent: Vec<u32> = (0..(n * n) as u32).collect();
    for i in 0..n {
        union(&mut parent, i, (n - 1) * n + i);
    }
    for j in 0..n / 2 {
        union(&mut parent, j * n + n - 1, (n - 1 - j) * n + n - 1);
    }
    (0..parent.len() as u32).map(|k| find(&mut parent, k)).collect()
}

pub fn build_disc(scene: &BhvScene, alpha: &AlphaPath, n: usize, relator_index: usize) -> Result<DiscMesh, DiscError> {
    build_disc_with_bump(scene, alpha, n, relator_index, BumpG::default())
}

pub fn build_disc_with_bump(
    scene: &BhvScene,
    alpha: &AlphaPath,
    n: usize,
    relator_index: usize,
    bump: BumpG,
) -> Result<DiscMesh, DiscError> {
    if n < 2 {
        return Err(DiscError::TooCoarse(n));
    }
    if !(alpha.start > alpha.terminal) {
        return Err(DiscError::Degenerate);
    }
    let step = 1.0 / (n - 1) as f64;
    let mut points = alloc::vec![[0.0; 4]; n * n];
    for j in 0..n {
        let t = j as f64 * step;
        let edge = left_edge(scene, alpha, t)?.to_cartesian();
        for i in 0..n {
            let s = i as f64 * step;
            points[j * n + i] = blend(&edge, s, bump.eval(s, t, edge[2]));
        }
    }
    Ok(DiscMesh {
        n,
        band: (alpha.terminal, alpha.start),
        relator_index,
        bump,
        points,
        representative: weld_table(n),
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InjectivityReport {
    pub pass: bool,
    pub min_distance: Option<f64>,
    /// Grid indices of the closest pair.
    pub pair: Option<(usize, usize)>,
    pub samples: usize,
    pub floor: f64,
}

/// Closest pair among welded samples off the left edge (`s > 0`).
pub fn verify_injective(mesh: &DiscMesh, floor: f64) -> InjectivityReport {
    let ids: Vec<usize> = (0..mesh.points.len())
        .filter(|&k| mesh.representative[k] as usize == k && k % mesh.n != 0)
        .collect();
    let pts: Vec<[f64; 4]> = ids.iter().map(|&k| mesh.points[k]).collect();
    match closest_pair(&pts) {
        None => InjectivityReport { pass: true, min_distance: None, pair: None, samples: pts.len(), floor },
        Some((d, a, b)) => InjectivityReport {
            pass: d > floor,
            min_distance: Some(d),
            pair: Some((ids[a], ids[b])),
            samples: pts.len(),
            floor,
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DisjointReport {
    pub pass: bool,
    /// Smallest disc-to-wall distance found within `search_radius`; `None`
    /// means no wall sample came that close.
    pub min_distance: Option<f64>,
    /// `(disc grid index, vase, wall sample index)`.
    pub location: Option<(usize, usize, usize)>,
    /// Per row `j` of the disc grid.
    pub row_minima: Vec<Option<f64>>,
    pub s_min: f64,
    pub search_radius: f64,
    pub wall_samples: usize,
    pub floor: f64,
}

/// Distances from disc samples with `s ≥ s_min` to wall samples in the band.
pub fn verify_disjoint(mesh: &DiscMesh, walls: &[WallMesh], s_min: f64, search_radius: f64, floor: f64) -> DisjointReport {
    let (l, h) = mesh.band;
    let mut owners = Vec::new();
    let mut pts = Vec::new();
    for wall in walls {
        for (k, p) in wall.points.iter().enumerate() {
            if p.z >= l && p.z <= h {
                owners.push((wall.vase_index, k));
                pts.push(p.to_cartesian());
            }
        }
    }
    let wall_samples = pts.len();
    let grid = GridIndex4::new(pts, search_radius);
    let n = mesh.n;
    let mut row_minima = alloc::vec![None; n];
    let mut best: Option<f64> = None;
    let mut location = None;
    for j in 0..n {
        for i in 0..n {
            if mesh.s(i) < s_min {
                continue;
            }
            let k = mesh.index(i, j);
            if let Some((d, w)) = grid.nearest_within(&mesh.points[k], search_radius) {
                if row_minima[j].is_none_or(|m: f64| d < m) {
                    row_minima[j] = Some(d);
                }
                if best.is_none_or(|m| d < m) {
                    best = Some(d);
                    location = Some((k, owners[w].0, owners[w].1));
                }
            }
        }
    }
    DisjointReport {
        pass: best.is_none_or(|d| d > floor),
        min_distance: best,
        location,
        row_minima,
        s_min,
        search_radius,
        wall_samples,
        floor,
    }
}
