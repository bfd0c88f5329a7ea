//! A single harmonic vase: a flat pedestal of radius 3 and an oscillating
//! wall `r = (|φ|/π)·sin(πp/z) + 2` over `z ∈ (0, m]`.

use alloc::vec::Vec;

use crate::braid::WProfile;
use crate::config::Resolution;
use crate::PI;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum VaseError {
    #[error("height z = {0} must be positive")]
    NonPositiveHeight(f64),
    #[error("angle {0} outside [-π, π]")]
    AngleOutOfRange(f64),
    #[error("vase parameters must be positive (m = {m}, p = {p})")]
    BadParams { m: f64, p: f64 },
    #[error("height {c} outside (0, {m}]")]
    HeightOutOfRange { c: f64, m: f64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("invalid resolution: {0}")]
    BadResolution(&'static str),
    #[error("cutoff z_min = {z_min} must lie in (0, {m})")]
    BadCutoff { z_min: f64, m: f64 },
    #[error("wall mesh needs {required} samples, budget is {budget}")]
    SampleBudget { required: usize, budget: usize },
}

/// Height `m` and oscillation parameter `p` of `HV(m, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VaseParams {
    pub m: f64,
    pub p: f64,
}

impl VaseParams {
    pub fn new(m: f64, p: f64) -> Result<Self, VaseError> {
        if m > 0.0 && p > 0.0 && m.is_finite() && p.is_finite() {
            Ok(Self { m, p })
        } else {
            Err(VaseError::BadParams { m, p })
        }
    }
}

/// Cylindrical coordinates `(r, φ, z)` plus the fourth coordinate `w`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[f64; 4]", into = "[f64; 4]"))]
pub struct CylPoint4 {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
    pub w: f64,
}

impl CylPoint4 {
    pub const fn new(r: f64, phi: f64, z: f64, w: f64) -> Self {
        Self { r, phi, z, w }
    }

    /// The point `z_x = (r = 2, φ = 0, z = x, w = 0)` on the shared axis line.
    pub const fn axis(z: f64) -> Self {
        Self::new(2.0, 0.0, z, 0.0)
    }

    /// `(x, y, z, w)` with `x = r cos φ`, `y = r sin φ`.
    pub fn to_cartesian(self) -> [f64; 4] {
        let (s, c) = libm::sincos(self.phi);
        [self.r * c, self.r * s, self.z, self.w]
    }

    pub fn from_cartesian(p: [f64; 4]) -> Self {
        Self::new(libm::hypot(p[0], p[1]), libm::atan2(p[1], p[0]), p[2], p[3])
    }
}

impl From<[f64; 4]> for CylPoint4 {
    fn from(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl From<CylPoint4> for [f64; 4] {
    fn from(p: CylPoint4) -> Self {
        [p.r, p.phi, p.z, p.w]
    }
}

/// Euclidean distance in R⁴.
pub fn distance4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let d: f64 = (0..4).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum();
    libm::sqrt(d)
}

/// `(|φ|/π)·sin(πp/z) + 2` without argument checks.
#[inline]
pub(crate) fn radius_unchecked(p: f64, phi: f64, z: f64) -> f64 {
    libm::fabs(phi) / PI * libm::sin(PI * p / z) + 2.0
}

pub fn wall_radius(p: f64, phi: f64, z: f64) -> Result<f64, VaseError> {
    if !(z > 0.0) {
        return Err(VaseError::NonPositiveHeight(z));
    }
    if !(-PI..=PI).contains(&phi) {
        return Err(VaseError::AngleOutOfRange(phi));
    }
    Ok(radius_unchecked(p, phi, z))
}

/// Smallest `k ≥ 0` with `2p/(4k+3) ≤ m`.
fn first_inner_index(v: &VaseParams) -> u64 {
    let h = |k: u64| 2.0 * v.p / (4 * k + 3) as f64;
    let guess = libm::ceil((2.0 * v.p / v.m - 3.0) / 4.0);
    let mut k = if guess > 0.0 { guess as u64 } else { 0 };
    while k > 0 && h(k - 1) <= v.m {
        k -= 1;
    }
    while h(k) > v.m {
        k += 1;
    }
    k
}

/// The `n` largest inner-heights `2p/(4k+3) ≤ m`, descending. These are
/// exactly the solutions of `sin(πp/h) = −1`.
pub fn inner_heights(v: &VaseParams, n: usize) -> Vec<f64> {
    let k0 = first_inner_index(v);
    (0..n as u64).map(|k| 2.0 * v.p / (4 * (k0 + k) + 3) as f64).collect()
}

/// All inner-heights in `(floor, m]`, descending.
pub fn inner_heights_above(v: &VaseParams, floor: f64) -> Vec<f64> {
    let k0 = first_inner_index(v);
    (k0..)
        .map(|k| 2.0 * v.p / (4 * k + 3) as f64)
        .take_while(|&h| h > floor)
        .collect()
}

/// `S(m, p, c)` sampled at `n` evenly spaced angles from `−π` to `π`; the
/// first and last samples are the same point of R⁴.
pub fn inner_curve(v: &VaseParams, c: f64, n: usize) -> Result<Vec<CylPoint4>, VaseError> {
    if !(c > 0.0 && c <= v.m) {
        return Err(VaseError::HeightOutOfRange { c, m: v.m });
    }
    if n < 2 {
        return Err(VaseError::TooFewSamples { min: 2, got: n });
    }
    Ok((0..n)
        .map(|k| {
            let phi = if k == n - 1 { PI } else { -PI + 2.0 * PI * k as f64 / (n - 1) as f64 };
            CylPoint4::new(radius_unchecked(v.p, phi, c), phi, c, 0.0)
        })
        .collect())
}

pub fn pedestal_contains(pt: &CylPoint4) -> bool {
    pt.z == 0.0 && pt.w == 0.0 && pt.r <= 3.0
}

/// Angles `−π … π` in `steps` equal intervals; `steps` is even so that
/// `φ = 0` is hit exactly.
pub fn phi_grid(steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|k| {
            if 2 * k == steps {
                0.0
            } else if k == steps {
                PI
            } else {
                -PI + 2.0 * PI * k as f64 / steps as f64
            }
        })
        .collect()
}

/// Heights from `top` down to (but excluding) `z_min`, equally spaced in the
/// phase `πp/z`: consecutive samples differ by `2π/oversample` in phase, so
/// every local period `≈ 2z²/p` gets `oversample` samples.
pub fn phase_grid(top: f64, z_min: f64, p: f64, oversample: usize) -> Vec<f64> {
    let step = 2.0 / (p * oversample as f64);
    let mut out = Vec::new();
    let mut inv = 1.0 / top;
    let mut z = top;
    while z > z_min {
        out.push(z);
        inv += step;
        z = 1.0 / inv;
    }
    out
}

/// Predicted length of [`phase_grid`].
pub fn phase_grid_len(top: f64, z_min: f64, p: f64, oversample: usize) -> usize {
    let periods = (1.0 / z_min - 1.0 / top) * p * oversample as f64 / 2.0;
    libm::floor(periods.max(0.0)) as usize + 2
}

/// Sampled wall of one vase, rows ordered by decreasing `z`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WallMesh {
    pub vase_index: usize,
    pub params: VaseParams,
    pub z_min: f64,
    pub resolution: Resolution,
    /// `phi_steps + 1` angles; the first and last column (`±π`) are the same
    /// points and get welded on export.
    pub phis: Vec<f64>,
    pub zs: Vec<f64>,
    /// Row-major: `points[row * phis.len() + col]`.
    pub points: Vec<CylPoint4>,
}

impl WallMesh {
    pub fn columns(&self) -> usize {
        self.phis.len()
    }

    pub fn rows(&self) -> usize {
        self.zs.len()
    }

    pub fn at(&self, row: usize, col: usize) -> &CylPoint4 {
        &self.points[row * self.phis.len() + col]
    }

    /// Number of distinct vertices once `φ = −π` and `φ = π` are welded.
    pub fn welded_len(&self) -> usize {
        self.rows() * (self.columns() - 1)
    }
}

/// Samples `HV(m, p, |φ|·w_i)`; without a profile the wall sits in `w = 0`.
pub fn sample_wall(
    v: &VaseParams,
    profile: Option<&WProfile>,
    vase_index: usize,
    resolution: Resolution,
    z_min: f64,
    budget: usize,
) -> Result<WallMesh, VaseError> {
    if resolution.oversample < 4 {
        return Err(VaseError::BadResolution("oversample must be at least 4"));
    }
    if resolution.phi_steps < 4 || resolution.phi_steps % 2 != 0 {
        return Err(VaseError::BadResolution("phi_steps must be even and at least 4"));
    }
    if !(z_min > 0.0 && z_min < v.m) {
        return Err(VaseError::BadCutoff { z_min, m: v.m });
    }
    let columns = resolution.phi_steps + 1;
    let required = phase_grid_len(v.m, z_min, v.p, resolution.oversample).saturating_mul(columns);
    if required > budget {
        return Err(VaseError::SampleBudget { required, budget });
    }

    let phis = phi_grid(resolution.phi_steps);
    let zs = phase_grid(v.m, z_min, v.p, resolution.oversample);
    let mut points = Vec::with_capacity(zs.len() * columns);
    for &z in &zs {
        let wz = match profile {
            Some(pr) => pr.eval_unchecked(z),
            None => 0.0,
        };
        for &phi in &phis {
            points.push(CylPoint4::new(radius_unchecked(v.p, phi, z), phi, z, libm::fabs(phi) * wz));
        }
    }
    Ok(WallMesh { vase_index, params: *v, z_min, resolution, phis, zs, points })
}
