use std::fmt::Write;

use hvase_core::vase::{phase_grid, wall_radius, VaseError, VaseParams};

/// The planar curve `z ↦ (r(φ, z), z)` of one wall at a fixed angle.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionCurve {
    pub vase: usize,
    /// `(r, z)`, top down.
    pub points: Vec<(f64, f64)>,
}

/// One curve per vase, sampled phase-uniformly down to (not including) `z_min`.
pub fn cross_section(vases: &[(usize, VaseParams)], phi: f64, z_min: f64, oversample: usize) -> Result<Vec<SectionCurve>, VaseError> {
    vases
        .iter()
        .map(|&(vase, v)| {
            let points = phase_grid(v.m, z_min, v.p, oversample)
                .into_iter()
                .map(|z| wall_radius(v.p, phi, z).map(|r| (r, z)))
                .collect::<Result<_, _>>()?;
            Ok(SectionCurve { vase, points })
        })
        .collect()
}

/// Axes as `<line>` elements and exactly one `<path>` per curve.
pub fn section_svg(curves: &[SectionCurve], phi: f64) -> String {
    const W: f64 = 480.0;
    const H: f64 = 480.0;
    const PAD: f64 = 40.0;
    // r ∈ [0, 3], z ∈ [0, 1]
    let x = |r: f64| PAD + r / 3.0 * (W - 2.0 * PAD);
    let y = |z: f64| H - PAD - z * (H - 2.0 * PAD);
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(out, "<title>cross-section at phi = {phi}</title>").unwrap();
    writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, x(0.0), y(0.0), x(3.0), y(0.0)).unwrap();
    writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, x(0.0), y(0.0), x(0.0), y(1.0)).unwrap();
    for c in curves {
        let mut d = String::new();
        for (k, &(r, z)) in c.points.iter().enumerate() {
            write!(d, "{}{:.4},{:.4}", if k == 0 { "M" } else { " L" }, x(r), y(z)).unwrap();
        }
        writeln!(out, r#"<path id="vase_{}" d="{d}" fill="none" stroke="black" stroke-width="0.5"/>"#, c.vase).unwrap();
    }
    out.push_str("</svg>\n");
    out
}
