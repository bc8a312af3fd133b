use std::collections::HashMap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::TriangleMesh;
use crate::error::{Error, Result};

/// Parametrized test shapes, all centred at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Primitive {
    Sphere { radius: f64 },
    /// Semi-axes along x, y, z.
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// Edge lengths along x, y, z.
    Box { a: f64, b: f64, c: f64 },
    /// Ring of radius `major` around the z axis with tube radius `minor`.
    Torus { major: f64, minor: f64 },
}

const MAX_LEVEL: u32 = 7;

/// Tessellate a primitive. `level` is the subdivision depth: an icosahedron
/// split `level` times (20·4^level faces) for spheres and ellipsoids,
/// `2^level` cells per box edge, and `6·2^level × 3·2^level` cells on a torus.
pub fn make_primitive(kind: &Primitive, level: u32) -> Result<TriangleMesh> {
    if level > MAX_LEVEL {
        return Err(Error::invalid(format!("refinement level {level} exceeds {MAX_LEVEL}")));
    }
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("{name} must be positive, got {v}")))
        }
    };
    let (vertices, faces) = match *kind {
        Primitive::Sphere { radius } => {
            positive("radius", radius)?;
            let (v, f) = icosphere(level);
            (v.into_iter().map(|p| p * radius).collect(), f)
        }
        Primitive::Ellipsoid { a, b, c } => {
            positive("a", a)?;
            positive("b", b)?;
            positive("c", c)?;
            let (v, f) = icosphere(level);
            (v.into_iter().map(|p| Vector3::new(a * p.x, b * p.y, c * p.z)).collect(), f)
        }
        Primitive::Box { a, b, c } => {
            positive("a", a)?;
            positive("b", b)?;
            positive("c", c)?;
            cuboid(a, b, c, 1 << level)
        }
        Primitive::Torus { major, minor } => {
            positive("minor", minor)?;
            if !(major > minor && major.is_finite()) {
                return Err(Error::invalid(format!("torus needs major > minor, got {major} <= {minor}")));
            }
            torus(major, minor, 6 << level, 3 << level)
        }
    };
    TriangleMesh::new(vertices, faces)
}

fn icosphere(level: u32) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vector3<f64>> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |i: usize, j: usize, verts: &mut Vec<Vector3<f64>>| {
            *cache.entry((i.min(j), i.max(j))).or_insert_with(|| {
                verts.push(((verts[i] + verts[j]) / 2.0).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(4 * faces.len());
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (verts, faces)
}

fn cuboid(a: f64, b: f64, c: f64, n: usize) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    type Lattice = [usize; 3];
    let mut index: HashMap<Lattice, usize> = HashMap::new();
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    let ext = [a, b, c];
    let (ex, ey, ez) = ([1, 0, 0], [0, 1, 0], [0, 0, 1]);
    // (origin, u, v) with u × v pointing outward.
    let sides: [(Lattice, Lattice, Lattice); 6] = [
        ([0, 0, 0], ez, ey),
        ([n, 0, 0], ey, ez),
        ([0, 0, 0], ex, ez),
        ([0, n, 0], ez, ex),
        ([0, 0, 0], ey, ex),
        ([0, 0, n], ex, ey),
    ];
    for (o, u, v) in sides {
        let mut id = |i: usize, j: usize| {
            let p: Lattice = std::array::from_fn(|d| o[d] + i * u[d] + j * v[d]);
            *index.entry(p).or_insert_with(|| {
                verts.push(Vector3::from_fn(|d, _| (p[d] as f64 / n as f64 - 0.5) * ext[d]));
                verts.len() - 1
            })
        };
        for i in 0..n {
            for j in 0..n {
                let (p00, p10, p11, p01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                faces.push([p00, p10, p11]);
                faces.push([p00, p11, p01]);
            }
        }
    }
    (verts, faces)
}

fn torus(major: f64, minor: f64, nu: usize, nv: usize) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    use std::f64::consts::TAU;
    let mut verts = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let (su, cu) = (TAU * i as f64 / nu as f64).sin_cos();
        for j in 0..nv {
            let (sv, cv) = (TAU * j as f64 / nv as f64).sin_cos();
            let rho = major + minor * cv;
            verts.push(Vector3::new(rho * cu, rho * su, minor * sv));
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (verts, faces)
}
