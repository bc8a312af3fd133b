use std::path::{Path, PathBuf};

use cgpt3d::cgpt::{transform_full, CgptBlockMatrix};
use cgpt3d::descriptors::{compute_descriptor, dict_build, dict_match, registration_point, DictSource, Dictionary, ShapeDescriptor};
use cgpt3d::harmonics::EulerAngles;
use cgpt3d::mesh::{load_mesh, make_primitive, save_mesh, write_mesh, MeshFormat, Primitive, RigidScaleTransform, TriangleMesh};
use cgpt3d::msr::{add_noise, estimate_cgpt, msr_from_cgpt, simulate_msr, MsrDataset, SensorArray};
use nalgebra::Vector3;
use serde::Serialize;
use serde_json::json;

use crate::args::{CgptCmd, Command, DescCmd, DictCmd, MeshCmd, MsrCmd, NoiseArgs, ShapeKind};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{emit, emit_text, from_value, read_json, read_value};

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<()> {
    match command {
        Command::Mesh(c) => mesh(c, cfg),
        Command::Cgpt(c) => cgpt(c, cfg),
        Command::Msr(c) => msr(c, cfg),
        Command::Desc(c) => desc(c, cfg),
        Command::Dict(c) => dict(c, cfg),
    }
}

fn primitive(kind: ShapeKind, size: &[f64]) -> Result<Primitive> {
    let p = match (kind, size) {
        (ShapeKind::Sphere, &[radius]) => Primitive::Sphere { radius },
        (ShapeKind::Ellipsoid, &[a, b, c]) => Primitive::Ellipsoid { a, b, c },
        (ShapeKind::Box, &[a, b, c]) => Primitive::Box { a, b, c },
        (ShapeKind::Torus, &[major, minor]) => Primitive::Torus { major, minor },
        _ => {
            let want = match kind {
                ShapeKind::Sphere => 1,
                ShapeKind::Torus => 2,
                _ => 3,
            };
            return Err(CliError::validation(format!("{kind:?} needs {want} size values, got {}", size.len())));
        }
    };
    Ok(p)
}

fn mesh(cmd: MeshCmd, cfg: &RunConfig) -> Result<()> {
    match cmd {
        MeshCmd::Info { path, reorient } => {
            let m = load_mesh(&path, None, reorient)?;
            emit(
                &json!({
                    "schema": 1,
                    "vertices": m.vertices().len(),
                    "faces": m.face_count(),
                    "area": m.area(),
                    "volume": m.volume(),
                    "circumradius": m.circumradius(),
                    "max_edge": m.max_edge(),
                }),
                None,
            )
        }
        MeshCmd::Make { kind, size, level, out } => {
            let m = make_primitive(&primitive(kind, &size)?, cfg.level(level))?;
            match cfg.output(&out.output) {
                Some(p) => Ok(save_mesh(&m, p, None)?),
                None => emit_text(&write_mesh(&m, MeshFormat::Off), None),
            }
        }
    }
}

fn read_cgpt(path: &Path) -> Result<CgptBlockMatrix> {
    read_json(path)
}

fn load(path: &Path, reorient: bool) -> Result<TriangleMesh> {
    Ok(load_mesh(path, None, reorient)?)
}

fn cgpt(cmd: CgptCmd, cfg: &RunConfig) -> Result<()> {
    match cmd {
        CgptCmd::Compute { mesh, contrast, order, solve, out } => {
            let lambda = cfg.contrast(&contrast)?;
            let order = cfg.order(order)?;
            let rule = cfg.rule(&solve)?;
            let m = cgpt3d::cgpt::compute_cgpt(&load(&mesh, solve.reorient)?, lambda, order, rule)?;
            emit(&m, cfg.output(&out.output).as_deref())
        }
        CgptCmd::Transform { input, scale, euler, shift, out } => {
            let m = read_cgpt(&input)?;
            let angles = euler.map(|e| EulerAngles::new(e[0], e[1], e[2])).unwrap_or_else(EulerAngles::identity);
            let shift = shift.map(|s| Vector3::new(s[0], s[1], s[2])).unwrap_or_else(Vector3::zeros);
            let t = RigidScaleTransform::new(scale, angles, shift)?;
            emit(&transform_full(&m, &t)?, cfg.output(&out.output).as_deref())
        }
        CgptCmd::Check { input, sphere_radius } => {
            let m = read_cgpt(&input)?;
            let mut report = json!({
                "schema": 1,
                "order": m.order(),
                "lambda": m.lambda(),
                "provenance": m.provenance(),
                "hermitian_residual": m.hermitian_defect(),
                "diagonal_conditions": m.diagonal_conditions(),
            });
            if let Some(r) = sphere_radius {
                if !(r > 0.0) {
                    return Err(CliError::validation(format!("sphere radius must be positive, got {r}")));
                }
                let (diag, off) = m.sphere_oracle_error(r);
                report["sphere_oracle"] = json!({ "radius": r, "diagonal_error": diag, "off_diagonal": off });
            }
            emit(&report, None)
        }
    }
}

fn with_noise(data: MsrDataset, noise: &NoiseArgs, cfg: &RunConfig) -> Result<MsrDataset> {
    let (sigma, seed) = cfg.noise(noise);
    if sigma == 0.0 {
        return Ok(data);
    }
    Ok(add_noise(&data, sigma, seed)?)
}

fn msr(cmd: MsrCmd, cfg: &RunConfig) -> Result<()> {
    match cmd {
        MsrCmd::Simulate { mesh, contrast, sensors, noise, solve, out } => {
            let lambda = cfg.contrast(&contrast)?;
            let (count, radius) = cfg.sensors(&sensors)?;
            let array = SensorArray::fibonacci(count, radius)?;
            let data = simulate_msr(&load(&mesh, solve.reorient)?, lambda, &array, cfg.rule(&solve)?)?;
            emit(&with_noise(data, &noise, cfg)?, cfg.output(&out.output).as_deref())
        }
        MsrCmd::Synthesize { cgpt, sensors, noise, out } => {
            let m = read_cgpt(&cgpt)?;
            let (count, radius) = cfg.sensors(&sensors)?;
            let data = msr_from_cgpt(&m, &SensorArray::fibonacci(count, radius)?);
            emit(&with_noise(data, &noise, cfg)?, cfg.output(&out.output).as_deref())
        }
        MsrCmd::Estimate { msr, contrast, order, rcond, out } => {
            let data: MsrDataset = read_json(&msr)?;
            let m = estimate_cgpt(&data, cfg.order(order)?, cfg.contrast(&contrast)?, rcond)?;
            emit(&m, cfg.output(&out.output).as_deref())
        }
    }
}

fn descriptor_of(path: &Path) -> Result<ShapeDescriptor> {
    let m = read_cgpt(path)?;
    let p = registration_point(&m)?;
    if !p.is_reliable() {
        eprintln!(
            "warning: {}: registration point has relative imaginary residual {:.3e}",
            path.display(),
            p.relative_residual()
        );
    }
    Ok(compute_descriptor(&m)?)
}

fn desc(cmd: DescCmd, cfg: &RunConfig) -> Result<()> {
    let DescCmd::Compute { cgpt, compare, tolerance, out } = cmd;
    let d = descriptor_of(&cgpt)?;
    let output = cfg.output(&out.output);
    match compare {
        None => emit(&d, output.as_deref()),
        Some(other) => {
            let diff = d.max_abs_diff(&descriptor_of(&other)?)?;
            emit(
                &json!({
                    "schema": 1,
                    "max_abs_diff": diff,
                    "tolerance": tolerance,
                    "within_tolerance": diff <= tolerance,
                }),
                output.as_deref(),
            )
        }
    }
}

enum Loaded {
    Mesh(TriangleMesh),
    Cgpt(CgptBlockMatrix),
}

#[derive(Serialize)]
struct MatchReport<'a> {
    schema: u32,
    lambda: f64,
    order: usize,
    matches: &'a [cgpt3d::descriptors::MatchResult],
}

fn dict(cmd: DictCmd, cfg: &RunConfig) -> Result<()> {
    match cmd {
        DictCmd::Build { entries, contrast, order, solve, out } => {
            let lambda = cfg.contrast(&contrast)?;
            let order = cfg.order(order)?;
            let rule = cfg.rule(&solve)?;
            let mut loaded = Vec::with_capacity(entries.len());
            for e in &entries {
                let (name, path) = e
                    .split_once('=')
                    .ok_or_else(|| CliError::validation(format!("entry {e:?} is not NAME=PATH")))?;
                let path = PathBuf::from(path);
                let is_json = path.extension().is_some_and(|x| x.eq_ignore_ascii_case("json"));
                let item = if is_json { Loaded::Cgpt(read_cgpt(&path)?) } else { Loaded::Mesh(load(&path, solve.reorient)?) };
                loaded.push((name.to_string(), path, item));
            }
            let sources = loaded
                .iter()
                .map(|(name, path, item)| {
                    let path = Some(path.display().to_string());
                    let src = match item {
                        Loaded::Mesh(mesh) => DictSource::Mesh { mesh, path },
                        Loaded::Cgpt(cgpt) => DictSource::Cgpt { cgpt, path },
                    };
                    (name.clone(), src)
                })
                .collect();
            let d = dict_build(sources, lambda, order, rule)?;
            emit(&d, cfg.output(&out.output).as_deref())
        }
        DictCmd::Match { dict, target, out } => {
            let d: Dictionary = read_json(&dict)?;
            let value = read_value(&target)?;
            let descriptor = if value.get("blocks").is_some() {
                descriptor_of(&target)?
            } else {
                from_value::<ShapeDescriptor>(value, &target)?
            };
            let matches = dict_match(&descriptor, &d)?;
            let report = MatchReport { schema: 1, lambda: d.lambda(), order: d.order(), matches: &matches };
            emit(&report, cfg.output(&out.output).as_deref())
        }
    }
}
