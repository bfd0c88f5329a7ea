//! Files, figures and the command line for `hvase-core`.
//!
//! Scenes are stored as versioned JSON ([`scene_file`]); meshes export to
//! OBJ or PLY ([`export`]); cross-sections render to SVG ([`section`]);
//! [`report`] runs every verification on a stored scene and produces a
//! machine-readable report.

pub mod cli;
pub mod export;
pub mod report;
pub mod scene_file;
pub mod section;
