use std::collections::BTreeMap;
use std::fmt::Write;

use hvase_core::disc::DiscMesh;
use hvase_core::vase::WallMesh;
use hvase_core::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MeshFormat {
    Obj,
    Ply,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Projection {
    /// `(x, y, z)`; the fourth coordinate is dropped.
    DropW,
    /// `(x, y, z)` plus `w` as a per-vertex scalar.
    WColor,
}

/// One named surface piece: Cartesian 4D vertices and faces into them.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub name: String,
    pub vertices: Vec<[f64; 4]>,
    pub faces: Vec<Vec<usize>>,
}

/// Wall grid with the `φ = ±π` columns welded.
pub fn wall_patch(mesh: &WallMesh) -> Patch {
    let cols = mesh.columns() - 1;
    let rows = mesh.rows();
    let mut vertices = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            vertices.push(mesh.at(r, c).to_cartesian());
        }
    }
    let mut faces = Vec::new();
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols {
            let c1 = (c + 1) % cols;
            faces.push(vec![r * cols + c, r * cols + c1, (r + 1) * cols + c1, (r + 1) * cols + c]);
        }
    }
    Patch { name: format!("wall_{}", mesh.vase_index), vertices, faces }
}

/// Disc grid after welding; quads that lose a corner become triangles.
pub fn disc_patch(mesh: &DiscMesh) -> Patch {
    let n = mesh.n;
    let mut slot = BTreeMap::new();
    let mut vertices = Vec::new();
    for (k, &rep) in mesh.representative.iter().enumerate() {
        if rep as usize == k {
            slot.insert(k, vertices.len());
            vertices.push(mesh.points[k]);
        }
    }
    let at = |i: usize, j: usize| slot[&(mesh.representative[j * n + i] as usize)];
    let mut faces = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let mut f: Vec<usize> = Vec::with_capacity(4);
            for v in [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)] {
                if !f.contains(&v) {
                    f.push(v);
                }
            }
            if f.len() >= 3 {
                faces.push(f);
            }
        }
    }
    Patch { name: format!("disc_{}", mesh.relator_index + 1), vertices, faces }
}

/// The pedestal `{x² + y² ≤ 9, z = 0, w = 0}` as a triangle fan.
pub fn pedestal_patch(segments: usize) -> Patch {
    let mut vertices = vec![[0.0; 4]];
    for k in 0..segments {
        let a = 2.0 * PI * k as f64 / segments as f64;
        vertices.push([3.0 * a.cos(), 3.0 * a.sin(), 0.0, 0.0]);
    }
    let faces = (0..segments).map(|k| vec![0, 1 + k, 1 + (k + 1) % segments]).collect();
    Patch { name: "pedestal".into(), vertices, faces }
}

pub fn write_obj(patches: &[Patch], projection: Projection) -> String {
    let mut out = String::from("# hvase mesh export\n");
    if projection == Projection::WColor {
        out.push_str("# each vertex line is followed by '#w <value>'\n");
    }
    let mut base = 1;
    for p in patches {
        writeln!(out, "g {}", p.name).unwrap();
        for v in &p.vertices {
            writeln!(out, "v {} {} {}", v[0], v[1], v[2]).unwrap();
            if projection == Projection::WColor {
                writeln!(out, "#w {}", v[3]).unwrap();
            }
        }
        for f in &p.faces {
            out.push('f');
            for &i in f {
                write!(out, " {}", base + i).unwrap();
            }
            out.push('\n');
        }
        base += p.vertices.len();
    }
    out
}

pub fn write_ply(patches: &[Patch], projection: Projection) -> String {
    let nv: usize = patches.iter().map(|p| p.vertices.len()).sum();
    let nf: usize = patches.iter().map(|p| p.faces.len()).sum();
    let mut out = String::from("ply\nformat ascii 1.0\n");
    for p in patches {
        writeln!(out, "comment patch {} {} {}", p.name, p.vertices.len(), p.faces.len()).unwrap();
    }
    writeln!(out, "element vertex {nv}").unwrap();
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    if projection == Projection::WColor {
        out.push_str("property double w\n");
    }
    writeln!(out, "element face {nf}").unwrap();
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for p in patches {
        for v in &p.vertices {
            match projection {
                Projection::DropW => writeln!(out, "{} {} {}", v[0], v[1], v[2]).unwrap(),
                Projection::WColor => writeln!(out, "{} {} {} {}", v[0], v[1], v[2], v[3]).unwrap(),
            }
        }
    }
    let mut base = 0;
    for p in patches {
        for f in &p.faces {
            write!(out, "{}", f.len()).unwrap();
            for &i in f {
                write!(out, " {}", base + i).unwrap();
            }
            out.push('\n');
        }
        base += p.vertices.len();
    }
    out
}

pub fn write_mesh(patches: &[Patch], format: MeshFormat, projection: Projection) -> String {
    match format {
        MeshFormat::Obj => write_obj(patches, projection),
        MeshFormat::Ply => write_ply(patches, projection),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hvase_core::vase::{sample_wall, VaseParams};
    use hvase_core::Resolution;

    fn wall() -> WallMesh {
        let v = VaseParams::new(1.0, 1.0).unwrap();
        sample_wall(&v, None, 1, Resolution { phi_steps: 16, oversample: 4 }, 0.1, 100_000).unwrap()
    }

    #[test]
    fn wall_vertex_count_is_welded_grid() {
        let m = wall();
        let p = wall_patch(&m);
        assert_eq!(p.vertices.len(), m.welded_len());
        assert_eq!(p.vertices.len(), m.rows() * 16);
        let obj = write_obj(&[p], Projection::DropW);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), m.welded_len());
        for line in obj.lines().filter(|l| l.starts_with("v ")) {
            let z: f64 = line.split(' ').nth(3).unwrap().parse().unwrap();
            assert!(z > 0.1 && z <= 1.0);
        }
    }

    #[test]
    fn pedestal_is_a_radius_three_fan() {
        let p = pedestal_patch(32);
        assert_eq!(p.faces.len(), 32);
        for v in &p.vertices[1..] {
            assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - 3.0).abs() < 1e-12);
            assert_eq!((v[2], v[3]), (0.0, 0.0));
        }
    }

    #[test]
    fn ply_header_counts() {
        let patches = [wall_patch(&wall()), pedestal_patch(8)];
        let ply = write_ply(&patches, Projection::WColor);
        let nv: usize = patches.iter().map(|p| p.vertices.len()).sum();
        assert!(ply.contains(&format!("element vertex {nv}\n")));
        assert!(ply.contains("property double w\n"));
        let body = ply.split("end_header\n").nth(1).unwrap();
        assert_eq!(body.lines().take(nv).filter(|l| l.split(' ').count() == 4).count(), nv);
    }

    #[test]
    fn obj_groups_and_w_channel() {
        let obj = write_obj(&[wall_patch(&wall()), pedestal_patch(8)], Projection::WColor);
        assert_eq!(obj.lines().filter(|l| l.starts_with("g ")).collect::<Vec<_>>(), ["g wall_1", "g pedestal"]);
        let v = obj.lines().filter(|l| l.starts_with("v ")).count();
        assert_eq!(obj.lines().filter(|l| l.starts_with("#w ")).count(), v);
    }
}
