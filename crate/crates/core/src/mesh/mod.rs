//! Closed triangulated surfaces and their quadrature data.

mod io;
mod primitives;
mod transform;

use std::collections::{HashMap, VecDeque};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, MeshInvariant, Result};

pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh, MeshFormat};
pub use primitives::{make_primitive, Primitive};
pub use transform::{apply_transform, euler_rotation_matrix, RigidScaleTransform};

/// Quadrature rule used to turn boundary integrals into weighted sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureRule {
    /// One node per face at the centroid, weighted by the face area.
    #[default]
    #[serde(rename = "1pt")]
    Centroid,
    /// Three interior nodes per face at barycentric (2/3, 1/6, 1/6) and its permutations.
    #[serde(rename = "3pt")]
    ThreePoint,
}

impl std::str::FromStr for QuadratureRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1pt" | "centroid" => Ok(QuadratureRule::Centroid),
            "3pt" | "three-point" => Ok(QuadratureRule::ThreePoint),
            other => Err(Error::invalid(format!("unknown quadrature rule {other:?} (expected 1pt or 3pt)"))),
        }
    }
}

/// Nodes, unit outward normals and weights of a surface quadrature.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub points: Vec<Vector3<f64>>,
    pub normals: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
    /// Face each node belongs to.
    pub faces: Vec<usize>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A watertight, consistently and outwardly oriented triangle mesh.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Vector3<f64>>,
    triangles: Vec<[usize; 3]>,
    centroids: Vec<Vector3<f64>>,
    areas: Vec<f64>,
    normals: Vec<Vector3<f64>>,
}

impl TriangleMesh {
    /// Build a mesh and check every closed-surface invariant.
    pub fn new(vertices: Vec<Vector3<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = Self::build(vertices, triangles)?;
        mesh.check_topology()?;
        mesh.check_outward()?;
        Ok(mesh)
    }

    /// Like [`TriangleMesh::new`] but reorients faces consistently and flips
    /// the whole surface if its normals point inward.
    pub fn new_reoriented(vertices: Vec<Vector3<f64>>, mut triangles: Vec<[usize; 3]>) -> Result<Self> {
        check_indices(&vertices, &triangles)?;
        orient_consistently(&mut triangles)?;
        let mut mesh = Self::build(vertices, triangles)?;
        mesh.check_topology()?;
        if mesh.volume() < 0.0 {
            let tris = mesh.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect();
            mesh = Self::build(mesh.vertices, tris)?;
        }
        mesh.check_outward()?;
        Ok(mesh)
    }

    fn build(vertices: Vec<Vector3<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        check_indices(&vertices, &triangles)?;
        let n = triangles.len();
        let mut centroids = Vec::with_capacity(n);
        let mut areas = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        for (f, &[a, b, c]) in triangles.iter().enumerate() {
            let (p, q, r) = (vertices[a], vertices[b], vertices[c]);
            let cross = (q - p).cross(&(r - p));
            let twice = cross.norm();
            let longest = (q - p).norm_squared().max((r - q).norm_squared()).max((p - r).norm_squared());
            if !(twice > 1e-12 * longest) || a == b || b == c || a == c {
                return Err(Error::mesh(MeshInvariant::DegenerateFace, format!("face {f} has zero area")));
            }
            centroids.push((p + q + r) / 3.0);
            areas.push(0.5 * twice);
            normals.push(cross / twice);
        }
        Ok(Self { vertices, triangles, centroids, areas, normals })
    }

    fn check_topology(&self) -> Result<()> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, &[a, b, c]) in self.triangles.iter().enumerate() {
            for e in [(a, b), (b, c), (c, a)] {
                if let Some(prev) = directed.insert(e, f) {
                    return Err(Error::mesh(
                        MeshInvariant::Orientation,
                        format!("edge ({}, {}) traversed in the same direction by faces {prev} and {f}", e.0, e.1),
                    ));
                }
            }
        }
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) {
                return Err(Error::mesh(MeshInvariant::Watertight, format!("edge ({a}, {b}) has a single adjacent face")));
            }
        }
        Ok(())
    }

    fn check_outward(&self) -> Result<()> {
        let vol = self.volume();
        if !(vol > 0.0) {
            return Err(Error::mesh(MeshInvariant::OutwardNormals, format!("signed volume {vol:e} is not positive")));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn centroids(&self) -> &[Vector3<f64>] {
        &self.centroids
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn normals(&self) -> &[Vector3<f64>] {
        &self.normals
    }

    pub fn face_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Enclosed volume from the divergence theorem.
    pub fn volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| self.vertices[a].dot(&self.vertices[b].cross(&self.vertices[c])))
            .sum::<f64>()
            / 6.0
    }

    /// `Σ area·normal`, zero for a closed surface.
    pub fn vector_area(&self) -> Vector3<f64> {
        self.areas.iter().zip(&self.normals).map(|(a, n)| n * *a).sum()
    }

    /// Largest distance of a vertex from the origin.
    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Longest edge length.
    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .fold(0.0, f64::max)
    }

    pub fn quadrature(&self, rule: QuadratureRule) -> Quadrature {
        match rule {
            QuadratureRule::Centroid => Quadrature {
                points: self.centroids.clone(),
                normals: self.normals.clone(),
                weights: self.areas.clone(),
                faces: (0..self.face_count()).collect(),
            },
            QuadratureRule::ThreePoint => {
                let n = 3 * self.face_count();
                let mut q = Quadrature {
                    points: Vec::with_capacity(n),
                    normals: Vec::with_capacity(n),
                    weights: Vec::with_capacity(n),
                    faces: Vec::with_capacity(n),
                };
                for (f, tri) in self.triangles.iter().enumerate() {
                    let [p0, p1, p2] = tri.map(|v| self.vertices[v]);
                    for (a, b, c) in [(p0, p1, p2), (p1, p2, p0), (p2, p0, p1)] {
                        q.points.push(a * (2.0 / 3.0) + (b + c) / 6.0);
                        q.normals.push(self.normals[f]);
                        q.weights.push(self.areas[f] / 3.0);
                        q.faces.push(f);
                    }
                }
                q
            }
        }
    }
}

fn check_indices(vertices: &[Vector3<f64>], triangles: &[[usize; 3]]) -> Result<()> {
    if vertices.is_empty() || triangles.is_empty() {
        return Err(Error::mesh(MeshInvariant::Empty, "no vertices or no faces"));
    }
    if let Some(v) = vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
        return Err(Error::invalid(format!("vertex {v} has a non-finite coordinate")));
    }
    for (f, tri) in triangles.iter().enumerate() {
        if let Some(&bad) = tri.iter().find(|&&i| i >= vertices.len()) {
            return Err(Error::mesh(
                MeshInvariant::VertexIndex,
                format!("face {f} references vertex {bad}, mesh has {}", vertices.len()),
            ));
        }
    }
    Ok(())
}

/// Flip faces so that every shared edge is traversed in opposite directions.
fn orient_consistently(triangles: &mut [[usize; 3]]) -> Result<()> {
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (f, &[a, b, c]) in triangles.iter().enumerate() {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            by_edge.entry((u.min(v), u.max(v))).or_default().push(f);
        }
    }
    if let Some((&(a, b), faces)) = by_edge.iter().find(|(_, fs)| fs.len() != 2) {
        return Err(Error::mesh(
            MeshInvariant::Watertight,
            format!("edge ({a}, {b}) has {} adjacent faces", faces.len()),
        ));
    }
    let has_directed = |t: &[usize; 3], u: usize, v: usize| (0..3).any(|i| t[i] == u && t[(i + 1) % 3] == v);
    let mut visited = vec![false; triangles.len()];
    for seed in 0..triangles.len() {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(f) = queue.pop_front() {
            let t = triangles[f];
            for (u, v) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let g = by_edge[&(u.min(v), u.max(v))].iter().copied().find(|&g| g != f).unwrap_or(f);
                let agrees = !has_directed(&triangles[g], u, v);
                if visited[g] {
                    if !agrees {
                        return Err(Error::mesh(
                            MeshInvariant::Orientation,
                            format!("surface is not orientable (faces {f} and {g})"),
                        ));
                    }
                    continue;
                }
                if !agrees {
                    triangles[g].swap(1, 2);
                }
                visited[g] = true;
                queue.push_back(g);
            }
        }
    }
    Ok(())
}
