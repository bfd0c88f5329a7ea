use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use hvase_core::braid::{build_bhv, build_w_profiles, choose_p_sequence, verify_independence};
use hvase_core::config::{BuildConfig, Resolution, Tolerances};
use hvase_core::presentation::{parse_presentation, Presentation};
use hvase_core::realize::build_space;
use hvase_core::vase::{inner_heights, inner_heights_above, VaseParams};
use hvase_core::PI;
use serde_json::json;

use crate::export::{disc_patch, pedestal_patch, wall_patch, write_mesh, MeshFormat, Projection};
use crate::report::{pi1_against, verify_scene, Check, VerificationReport, VerifyOptions};
use crate::scene_file::{config_hash, load_scene, save_scene, Meshes};
use crate::section::{cross_section, section_svg};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hvase", version, about = "Braided harmonic vases and realization spaces for group presentations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inner-heights table (CSV) and cross-section (SVG) of one vase.
    Vase(VaseArgs),
    /// Build the braided family for N generators and verify it.
    Braid(BraidArgs),
    /// Build the realization space of a presentation file.
    Realize(RealizeArgs),
    /// Run every check on a scene file.
    Verify(VerifyArgs),
    /// Compare a truncation of a scene with a presentation.
    Pi1(Pi1Args),
    /// Write the meshes stored in a scene file as OBJ or PLY.
    Export(ExportArgs),
}

#[derive(Args, Debug, Clone, Copy)]
pub struct ToleranceArgs {
    #[arg(long, default_value_t = Tolerances::default().coincidence)]
    pub tolerance_coincidence: f64,
    #[arg(long, default_value_t = Tolerances::default().formula)]
    pub tolerance_formula: f64,
    #[arg(long, default_value_t = Tolerances::default().distance_floor)]
    pub tolerance_distance: f64,
}

impl ToleranceArgs {
    fn get(self) -> Tolerances {
        Tolerances {
            coincidence: self.tolerance_coincidence,
            formula: self.tolerance_formula,
            distance_floor: self.tolerance_distance,
        }
    }
}

#[derive(Args, Debug)]
pub struct VaseArgs {
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Number of inner-heights in the table.
    #[arg(long, default_value_t = 30)]
    pub count: usize,
    /// Section angle; accepts `pi`, `-pi`, `pi/2` or a number.
    #[arg(long, default_value = "pi", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 0.01)]
    pub z_min: f64,
    #[arg(long, default_value_t = 64)]
    pub oversample: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BraidArgs {
    #[arg(long)]
    pub depth_gens: usize,
    #[arg(long, default_value_t = 0.01)]
    pub z_min: f64,
    #[arg(long, default_value_t = 64)]
    pub phi_steps: usize,
    #[arg(long, default_value_t = 8)]
    pub oversample: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
}

#[derive(Args, Debug)]
pub struct RealizeArgs {
    pub presentation: PathBuf,
    /// Keep only the first N generators.
    #[arg(long)]
    pub depth_gens: Option<usize>,
    /// Number of relators to attach, or `all`.
    #[arg(long, default_value = "all")]
    pub relators: RelatorCount,
    #[arg(long, default_value_t = BuildConfig::default().z_min)]
    pub z_min: f64,
    /// Disc grid size `n`.
    #[arg(long, default_value_t = BuildConfig::default().disc_resolution)]
    pub resolution: usize,
    #[arg(long, default_value_t = BuildConfig::default().wall.phi_steps)]
    pub phi_steps: usize,
    #[arg(long, default_value_t = BuildConfig::default().wall.oversample)]
    pub oversample: usize,
    #[arg(long, default_value_t = BuildConfig::default().loop_samples)]
    pub loop_samples: usize,
    #[arg(long, default_value_t = BuildConfig::default().band_margin)]
    pub band_margin: f64,
    #[arg(long, default_value_t = BuildConfig::default().sample_budget)]
    pub sample_budget: usize,
    /// Store wall and disc meshes in the scene file (needed by `export`).
    #[arg(long)]
    pub with_meshes: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelatorCount {
    All,
    First(usize),
}

impl std::str::FromStr for RelatorCount {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(Self::All);
        }
        s.parse().map(Self::First).map_err(|_| format!("expected a count or `all`, got `{s}`"))
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub scene: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Truncation levels for the fundamental-group checks.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub epsilon: Vec<f64>,
    /// Disc grid size for the checks; the scene's own when absent.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[command(flatten)]
    pub tolerances: Option<ToleranceOverride>,
}

#[derive(Args, Debug, Clone, Copy)]
#[group(required = false, multiple = true)]
pub struct ToleranceOverride {
    #[arg(long)]
    pub tolerance_coincidence: Option<f64>,
    #[arg(long)]
    pub tolerance_formula: Option<f64>,
    #[arg(long)]
    pub tolerance_distance: Option<f64>,
}

#[derive(Args, Debug)]
pub struct Pi1Args {
    pub scene: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    /// Presentation the truncation should agree with; the scene's own when absent.
    #[arg(long)]
    pub expect: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    pub scene: PathBuf,
    #[arg(long, value_enum, default_value = "obj")]
    pub format: MeshFormat,
    #[arg(long, value_enum, default_value = "drop-w")]
    pub projection: Projection,
    #[arg(long, default_value_t = 64)]
    pub pedestal_segments: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// `pi`, `-pi`, `pi/k`, `-pi/k` or a decimal.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let v = if body == "pi" {
        PI
    } else if let Some(d) = body.strip_prefix("pi/") {
        PI / d.parse::<f64>().map_err(|e| format!("bad angle `{s}`: {e}"))?
    } else {
        body.parse::<f64>().map_err(|e| format!("bad angle `{s}`: {e}"))?
    };
    Ok(if neg { -v } else { v })
}

/// A failure that maps to an exit status.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Checks,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

/// Parses `args` (program name first) and runs the command. Normal output
/// goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Vase(a) => vase(a, out),
        Command::Braid(a) => braid(a, out),
        Command::Realize(a) => realize(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Pi1(a) => pi1(a, out),
        Command::Export(a) => export(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Checks) => {
            let _ = writeln!(err, "verification failed");
            EXIT_FAILED
        }
        Err(Failure::Usage(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_file(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_presentation(path: &Path) -> anyhow::Result<Presentation> {
    parse_presentation(&read_file(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(report: &VerificationReport, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let text = report.to_json();
    match path {
        Some(p) => write_file(p, &text)?,
        None => out.write_all(text.as_bytes()).context("writing report")?,
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn vase(a: VaseArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let v = VaseParams::new(a.m, a.p).map_err(|e| anyhow!(e))?;
    if !(-PI..=PI).contains(&a.phi) {
        return Err(anyhow!("phi = {} is outside [-pi, pi]", a.phi).into());
    }
    let mut csv = String::from("k,height\n");
    for (k, h) in inner_heights(&v, a.count).into_iter().enumerate() {
        csv.push_str(&format!("{k},{h:e}\n"));
    }
    match &a.csv {
        Some(p) => write_file(p, &csv)?,
        None => out.write_all(csv.as_bytes()).context("writing table")?,
    }
    if let Some(p) = &a.svg {
        let curves = cross_section(&[(1, v)], a.phi, a.z_min, a.oversample).map_err(|e| anyhow!(e))?;
        write_file(p, &section_svg(&curves, a.phi))?;
    }
    Ok(())
}

fn braid(a: BraidArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let n = a.depth_gens;
    if n == 0 {
        return Err(anyhow!("--depth-gens must be at least 1").into());
    }
    if !(a.z_min > 0.0 && a.z_min < 1.0 / n as f64) {
        return Err(anyhow!("z_min = {} must lie in (0, 1/{n})", a.z_min).into());
    }
    let tol = a.tolerances.get();
    let mut ps = choose_p_sequence(n);
    let depth = (1..=n).map(|i| inner_heights_above(&ps.vase(i), a.z_min).len()).max().unwrap_or(0);
    let ind = verify_independence(&ps, depth, tol.coincidence);
    let mut checks = vec![Check {
        name: "independence".into(),
        pass: ind.pass,
        details: json!({"depth": depth, "min_gap": ind.min_gap, "worst": ind.worst}),
    }];
    ps.mark_verified(&ind);
    let built = build_w_profiles(&ps, a.z_min, tol.coincidence).and_then(|pr| build_bhv(&ps, &pr, a.z_min, tol.coincidence));
    match built {
        Ok(bhv) => {
            checks.push(Check { name: "profiles".into(), pass: true, details: json!({"vases": bhv.len()}) });
            let res = Resolution { phi_steps: a.phi_steps, oversample: a.oversample };
            let sep = hvase_core::braid::min_wall_separation(&bhv, crate::report::SEPARATION_DELTA, crate::report::SEPARATION_Z_LO.max(a.z_min), 1.0, res);
            checks.push(Check {
                name: "wall_separation".into(),
                pass: n < 2 || sep.min_distance.is_some_and(|d| d > 0.0),
                details: serde_json::to_value(&sep).expect("serializes"),
            });
        }
        Err(e) => checks.push(Check { name: "profiles".into(), pass: false, details: json!({"error": e.to_string()}) }),
    }
    let config = BuildConfig {
        z_min: a.z_min,
        wall: Resolution { phi_steps: a.phi_steps, oversample: a.oversample },
        tolerances: tol,
        ..BuildConfig::default()
    };
    let pass = checks.iter().all(|c| c.pass);
    let report = VerificationReport { config_hash: config_hash(&config), tolerances: tol, checks, pass };
    emit(&report, a.report.as_deref(), out)
}

fn realize(a: RealizeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut p = read_presentation(&a.presentation)?;
    if let RelatorCount::First(k) = a.relators {
        p = p.truncate(k).map_err(|e| anyhow!(e))?;
    }
    if let Some(n) = a.depth_gens {
        if n == 0 || n > p.generator_count() {
            return Err(anyhow!("--depth-gens {n} must lie in 1..={}", p.generator_count()).into());
        }
        p = p.restrict_generators(n).map_err(|e| anyhow!("--depth-gens {n}: {e}"))?;
    }
    let config = BuildConfig {
        z_min: a.z_min,
        wall: Resolution { phi_steps: a.phi_steps, oversample: a.oversample },
        disc_resolution: a.resolution,
        loop_samples: a.loop_samples,
        band_margin: a.band_margin,
        sample_budget: a.sample_budget,
        tolerances: a.tolerances.get(),
    };
    let scene = build_space(&p, &config).map_err(|e| anyhow!(e))?;
    let meshes = if a.with_meshes {
        Some(Meshes {
            walls: scene.wall_meshes().map_err(|e| anyhow!(e))?,
            discs: scene.disc_meshes(config.disc_resolution).map_err(|e| anyhow!(e))?,
        })
    } else {
        None
    };
    write_file(&a.out, &save_scene(&scene, meshes))?;
    writeln!(out, "{} vases, {} discs, config {}", scene.bhv.len(), scene.discs.len(), config_hash(&config)).context("writing summary")?;
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let file = load_scene(&read_file(&a.scene)?).with_context(|| format!("loading {}", a.scene.display()))?;
    let scene = file.scene;
    let mut opts = VerifyOptions::for_scene(&scene);
    if !a.epsilon.is_empty() {
        opts.epsilons = a.epsilon;
    }
    if let Some(n) = a.resolution {
        opts.disc_resolution = n;
    }
    if let Some(t) = a.tolerances {
        let tol = &mut opts.tolerances;
        tol.coincidence = t.tolerance_coincidence.unwrap_or(tol.coincidence);
        tol.formula = t.tolerance_formula.unwrap_or(tol.formula);
        tol.distance_floor = t.tolerance_distance.unwrap_or(tol.distance_floor);
    }
    emit(&verify_scene(&scene, &opts), a.report.as_deref(), out)
}

fn pi1(a: Pi1Args, out: &mut dyn Write) -> Result<(), Failure> {
    let scene = load_scene(&read_file(&a.scene)?).with_context(|| format!("loading {}", a.scene.display()))?.scene;
    let expected = match &a.expect {
        Some(p) => read_presentation(p)?,
        None => scene.presentation.clone(),
    };
    let (pass, details) = pi1_against(&scene, a.epsilon, &expected);
    if let Some(e) = details.get("error") {
        return Err(anyhow!("{}", e.as_str().unwrap_or_default()).into());
    }
    let report = VerificationReport {
        config_hash: config_hash(&scene.config),
        tolerances: scene.config.tolerances,
        checks: vec![Check { name: format!("pi1@{}", a.epsilon), pass, details }],
        pass,
    };
    emit(&report, a.report.as_deref(), out)
}

fn export(a: ExportArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let file = load_scene(&read_file(&a.scene)?).with_context(|| format!("loading {}", a.scene.display()))?;
    let Some(meshes) = file.meshes else {
        return Err(anyhow!("scene has no meshes; rebuild it with `realize --with-meshes`").into());
    };
    let mut patches = vec![pedestal_patch(a.pedestal_segments.max(3))];
    patches.extend(meshes.walls.iter().map(wall_patch));
    patches.extend(meshes.discs.iter().map(disc_patch));
    write_file(&a.out, &write_mesh(&patches, a.format, a.projection))?;
    let vertices: usize = patches.iter().map(|p| p.vertices.len()).sum();
    writeln!(out, "{} patches, {vertices} vertices", patches.len()).context("writing summary")?;
    Ok(())
}
