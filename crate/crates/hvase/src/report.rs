use hvase_core::braid::{min_wall_separation, verify_independence, verify_profile_conditions, PSequence, WProfile};
use hvase_core::config::Tolerances;
use hvase_core::disc::{verify_disjoint, verify_injective};
use hvase_core::realize::{compactness_report, expected_truncation, pi1_report, truncate, Scene, PI1_NOTE};
use hvase_core::relator_path::{decode_path, verify_monotone, wall_residual};
use serde::Serialize;
use serde_json::{json, Value};

use crate::scene_file::config_hash;

/// Wall-separation window: `|φ| ≥ SEPARATION_DELTA`, `z ≥ SEPARATION_Z_LO`.
pub const SEPARATION_DELTA: f64 = 0.05;
pub const SEPARATION_Z_LO: f64 = 0.02;
/// Disc samples with `s` below this hug `α` and are not compared with walls.
pub const DISJOINT_S_MIN: f64 = 1.0 / 16.0;
pub const DISJOINT_SEARCH_RADIUS: f64 = 0.1;
/// Bound on `|r − r_wall|` and `|w − w_wall|` along attaching paths.
pub const PATH_RESIDUAL_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_EPSILONS: [f64; 3] = [0.02, 0.1, 0.3];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub config_hash: String,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tolerances: Tolerances,
    pub disc_resolution: usize,
    pub epsilons: Vec<f64>,
}

impl VerifyOptions {
    pub fn for_scene(scene: &Scene) -> Self {
        Self {
            tolerances: scene.config.tolerances,
            disc_resolution: scene.config.disc_resolution,
            epsilons: DEFAULT_EPSILONS.iter().copied().filter(|&e| e > scene.config.z_min).collect(),
        }
    }
}

fn push(checks: &mut Vec<Check>, name: impl Into<String>, pass: bool, details: Value) {
    checks.push(Check { name: name.into(), pass, details });
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

/// Runs every check on `scene`. Build failures inside a check (for example a
/// sample budget overrun) are reported as failed checks, not errors.
pub fn verify_scene(scene: &Scene, opts: &VerifyOptions) -> VerificationReport {
    let tol = opts.tolerances;
    let bhv = &scene.bhv;
    let z_min = scene.config.z_min;
    let mut checks = Vec::new();

    let decimals: Vec<&str> = bhv.vases.iter().map(|v| v.p.decimal()).collect();
    match PSequence::from_decimals(&bhv.p_scheme, &decimals) {
        Ok(ps) => {
            let r = verify_independence(&ps, scene.independence_depth, tol.coincidence);
            push(
                &mut checks,
                "independence",
                r.pass,
                json!({"depth": r.depth, "min_gap": opt(r.min_gap), "worst": r.worst, "tolerance": r.tolerance}),
            );
            let profiles: Vec<WProfile> = bhv.vases.iter().map(|v| v.profile.clone()).collect();
            let r = verify_profile_conditions(&ps, &profiles, z_min, tol.coincidence);
            push(
                &mut checks,
                "profiles",
                r.pass,
                json!({
                    "below_diagonal": r.below_diagonal,
                    "max_w_over_z": r.max_w_over_z,
                    "separated": r.separated,
                    "min_separation": opt(r.min_separation),
                    "worst_separation": r.worst_separation,
                    "vanishes_near_inner_heights": r.vanishes_near_inner_heights,
                    "failures": r.failures,
                }),
            );
        }
        Err(e) => push(&mut checks, "independence", false, json!({"error": e.to_string()})),
    }

    let z_lo = SEPARATION_Z_LO.max(z_min);
    let sep = min_wall_separation(bhv, SEPARATION_DELTA, z_lo, 1.0, scene.config.wall);
    let sep_pass = bhv.len() < 2 || sep.min_distance.is_some_and(|d| d > 0.0);
    push(&mut checks, "wall_separation", sep_pass, serde_json::to_value(&sep).expect("serializes"));

    let walls = scene.wall_meshes();
    if let Err(e) = &walls {
        push(&mut checks, "wall_meshes", false, json!({"error": e.to_string()}));
    }
    for (k, d) in scene.discs.iter().enumerate() {
        let name = |what: &str| format!("disc_{}.{what}", k + 1);
        let m = verify_monotone(&d.alpha.polyline);
        push(&mut checks, name("monotone"), m.pass, json!({"first_violation": m.first_violation, "min_drop": opt(m.min_drop)}));
        let res = wall_residual(bhv, &d.alpha);
        push(
            &mut checks,
            name("on_wall"),
            res <= PATH_RESIDUAL_TOLERANCE,
            json!({"max_residual": res, "tolerance": PATH_RESIDUAL_TOLERANCE}),
        );
        let names = scene.presentation.generator_names();
        match decode_path(bhv, &d.alpha) {
            Ok(w) => push(
                &mut checks,
                name("decode"),
                w == d.word,
                json!({"decoded": w.display_with(names).to_string(), "expected": d.word.display_with(names).to_string()}),
            ),
            Err(e) => push(&mut checks, name("decode"), false, json!({"error": e.to_string()})),
        }
        match scene.disc_mesh(k, opts.disc_resolution) {
            Ok(mesh) => {
                let inj = verify_injective(&mesh, tol.distance_floor);
                push(&mut checks, name("injective"), inj.pass, serde_json::to_value(&inj).expect("serializes"));
                let chi = mesh.euler_characteristic();
                push(&mut checks, name("euler"), chi == 1, json!({"chi": chi, "welded_samples": mesh.welded_len()}));
                if let Ok(walls) = &walls {
                    let dj = verify_disjoint(&mesh, walls, DISJOINT_S_MIN, DISJOINT_SEARCH_RADIUS, tol.distance_floor);
                    let details = json!({
                        "min_distance": opt(dj.min_distance),
                        "location": dj.location,
                        "s_min": dj.s_min,
                        "search_radius": dj.search_radius,
                        "wall_samples": dj.wall_samples,
                        "floor": dj.floor,
                    });
                    push(&mut checks, name("disjoint"), dj.pass, details);
                }
            }
            Err(e) => push(&mut checks, name("mesh"), false, json!({"error": e.to_string()})),
        }
    }

    let levels: Vec<f64> = [0.9, 0.5, 0.3, 0.11].into_iter().filter(|&e| e > z_min).collect();
    match compactness_report(scene, &levels, opts.disc_resolution) {
        Ok(c) => push(&mut checks, "compactness", c.pass, serde_json::to_value(&c).expect("serializes")),
        Err(e) => push(&mut checks, "compactness", false, json!({"error": e.to_string()})),
    }

    for &eps in &opts.epsilons {
        let (pass, details) = pi1_check(scene, eps);
        push(&mut checks, format!("pi1@{eps}"), pass, details);
    }

    let pass = checks.iter().all(|c| c.pass);
    VerificationReport { config_hash: config_hash(&scene.config), tolerances: tol, checks, pass }
}

/// Compares the truncation at `eps` with the input presentation cut down
/// the same way.
pub fn pi1_check(scene: &Scene, eps: f64) -> (bool, Value) {
    pi1_against(scene, eps, &scene.presentation)
}

pub fn pi1_against(scene: &Scene, eps: f64, expected: &hvase_core::Presentation) -> (bool, Value) {
    let tc = match truncate(scene, eps) {
        Ok(tc) => tc,
        Err(e) => return (false, json!({"error": e.to_string()})),
    };
    let exp = match expected_truncation(expected, &tc) {
        Ok(p) => p,
        Err(e) => return (false, json!({"error": e.to_string()})),
    };
    match pi1_report(&tc, &exp) {
        Ok(r) => {
            let rows: Vec<Value> = r
                .hom_counts
                .iter()
                .map(|h| json!({"group": h.group, "actual": h.actual, "expected": h.expected, "agree": h.agree}))
                .collect();
            let names = &tc.generator_names;
            (
                r.pass,
                json!({
                    "epsilon": eps,
                    "generators": r.generators,
                    "discs": r.discs,
                    "words": tc.words.iter().map(|w| w.display_with(names).to_string()).collect::<Vec<_>>(),
                    "h1_actual": r.actual.to_string(),
                    "h1_expected": r.expected.to_string(),
                    "homology_agrees": r.homology_agrees,
                    "hom_counts": rows,
                    "note": PI1_NOTE,
                }),
            )
        }
        Err(e) => (false, json!({"error": e.to_string()})),
    }
}
