use hvase_core::braid::PValue;
use hvase_core::config::BuildConfig;
use hvase_core::disc::DiscMesh;
use hvase_core::presentation::Presentation;
use hvase_core::realize::Scene;
use hvase_core::vase::WallMesh;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCENE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meshes {
    pub walls: Vec<WallMesh>,
    pub discs: Vec<DiscMesh>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: u32,
    pub scene: Scene,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meshes: Option<Meshes>,
}

#[derive(Debug, thiserror::Error)]
pub enum SceneFileError {
    #[error("not JSON: {0}")]
    Syntax(serde_json::Error),
    #[error("missing version field")]
    MissingVersion,
    #[error("scene file version {found} is not supported (expected {SCENE_VERSION})")]
    Version { found: serde_json::Value },
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("inconsistent scene: {0}")]
    Invalid(String),
}

pub fn save_scene(scene: &Scene, meshes: Option<Meshes>) -> String {
    let file = SceneFile { version: SCENE_VERSION, scene: scene.clone(), meshes };
    let mut out = serde_json::to_string_pretty(&file).expect("scene serializes");
    out.push('\n');
    out
}

pub fn load_scene(text: &str) -> Result<SceneFile, SceneFileError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(SceneFileError::Syntax)?;
    match value.get("version") {
        None => return Err(SceneFileError::MissingVersion),
        Some(v) if v.as_u64() != Some(SCENE_VERSION as u64) => {
            return Err(SceneFileError::Version { found: v.clone() });
        }
        Some(_) => {}
    }
    let file: SceneFile = serde_path_to_error::deserialize(value).map_err(|e| SceneFileError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    validate(&file.scene)?;
    Ok(file)
}

fn validate(scene: &Scene) -> Result<(), SceneFileError> {
    let p = &scene.presentation;
    Presentation::new(p.generator_names().to_vec(), p.relators().to_vec())
        .map_err(|e| SceneFileError::Invalid(e.to_string()))?;
    if scene.bhv.len() != p.generator_count() {
        return Err(SceneFileError::Invalid(format!(
            "{} vases for {} generators",
            scene.bhv.len(),
            p.generator_count()
        )));
    }
    for (k, v) in scene.bhv.vases.iter().enumerate() {
        let reparsed = PValue::parse(v.p.decimal()).map_err(|e| SceneFileError::Invalid(e.to_string()))?;
        if v.index != k + 1 || v.params.p != reparsed.value() || v.params.m != 1.0 / v.index as f64 {
            return Err(SceneFileError::Invalid(format!("vase {} parameters disagree with its decimal", k + 1)));
        }
    }
    if scene.discs.len() != scene.schedule.bands.len() || scene.discs.len() > p.relators().len() {
        return Err(SceneFileError::Invalid("band schedule and disc list disagree".into()));
    }
    Ok(())
}

/// Hex SHA-256 of the build configuration's JSON form.
pub fn config_hash(config: &BuildConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hvase_core::presentation::parse_presentation;
    use hvase_core::realize::build_space;

    fn scene() -> Scene {
        let p = parse_presentation("gens: a b\nrel: a b a' b'").unwrap();
        build_space(&p, &BuildConfig { disc_resolution: 16, ..BuildConfig::default() }).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let s = scene();
        let text = save_scene(&s, None);
        let back = load_scene(&text).unwrap();
        assert_eq!(back.scene, s);
        assert_eq!(save_scene(&back.scene, None), text);
        assert_eq!(config_hash(&back.scene.config), config_hash(&s.config));
    }

    #[test]
    fn meshes_round_trip() {
        let s = scene();
        let meshes = Meshes { walls: s.wall_meshes().unwrap(), discs: s.disc_meshes(8).unwrap() };
        let text = save_scene(&s, Some(meshes.clone()));
        let back = load_scene(&text).unwrap();
        assert_eq!(back.meshes, Some(meshes));
        assert_eq!(save_scene(&back.scene, back.meshes), text);
    }

    #[test]
    fn truncated_file_names_the_missing_field() {
        let text = save_scene(&scene(), None);
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["scene"]["bhv"].as_object_mut().unwrap().remove("z_min");
        match load_scene(&value.to_string()) {
            Err(SceneFileError::Schema { path, message }) => {
                assert_eq!(path, "scene.bhv");
                assert!(message.contains("z_min"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(load_scene(&text[..text.len() / 2]), Err(SceneFileError::Syntax(_))));
    }

    #[test]
    fn versions_are_checked() {
        let text = save_scene(&scene(), None);
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["version"] = 2.into();
        assert!(matches!(load_scene(&value.to_string()), Err(SceneFileError::Version { .. })));
        value.as_object_mut().unwrap().remove("version");
        assert!(matches!(load_scene(&value.to_string()), Err(SceneFileError::MissingVersion)));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = save_scene(&scene(), None);
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["scene"]["config"]["future_knob"] = 1.into();
        assert!(matches!(load_scene(&value.to_string()), Err(SceneFileError::Schema { .. })));
    }

    #[test]
    fn tampered_parameters_are_caught() {
        let text = save_scene(&scene(), None);
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["scene"]["bhv"]["vases"][0]["p"] = "1.5".into();
        assert!(matches!(load_scene(&value.to_string()), Err(SceneFileError::Invalid(_))));
    }
}
