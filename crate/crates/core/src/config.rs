//! Build and verification knobs, with their defaults in one place.

/// Numerical tolerances shared by every verification routine.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Tolerances {
    /// Minimum gap between an inner-height and any intersection height, and
    /// minimum `|w_i − w_j|` at intersection heights.
    pub coincidence: f64,
    /// Re-evaluation tolerance for the wall equation.
    pub formula: f64,
    /// Pairwise distance floor for injectivity / disjointness checks.
    pub distance_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { coincidence: 1e-9, formula: 1e-12, distance_floor: 1e-9 }
    }
}

/// Wall sampling: `phi_steps` intervals over `[−π, π]` and `oversample`
/// samples per local oscillation period in `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Resolution {
    pub phi_steps: usize,
    pub oversample: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { phi_steps: 64, oversample: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct BuildConfig {
    /// Hard cutoff: nothing below this height is sampled or scheduled.
    pub z_min: f64,
    pub wall: Resolution,
    /// Grid size `n` of each attached disc (`n × n` samples of the square).
    pub disc_resolution: usize,
    /// Samples per inner-curve loop of an attaching path.
    pub loop_samples: usize,
    /// Relative gap between consecutive bands: `h_k = l_k · (1 − margin)`.
    pub band_margin: f64,
    /// Upper bound on samples per wall mesh.
    pub sample_budget: usize,
    pub tolerances: Tolerances,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            z_min: 0.01,
            wall: Resolution::default(),
            disc_resolution: 128,
            loop_samples: 64,
            band_margin: 0.05,
            sample_budget: 4_000_000,
            tolerances: Tolerances::default(),
        }
    }
}
