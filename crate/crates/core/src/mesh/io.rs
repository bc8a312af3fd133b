use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;

use super::TriangleMesh;
use crate::error::{Error, Result};

/// ASCII mesh formats understood by [`load_mesh`] and [`save_mesh`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            _ => Err(Error::invalid(format!("cannot infer mesh format of {}", path.display()))),
        }
    }
}

/// Read a mesh from disk. With `reorient` set, inconsistent or inward
/// orientation is repaired instead of rejected.
pub fn load_mesh(path: impl AsRef<Path>, format: Option<MeshFormat>, reorient: bool) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh(&text, format, path, reorient)
}

pub fn parse_mesh(text: &str, format: MeshFormat, path: &Path, reorient: bool) -> Result<TriangleMesh> {
    let (v, f) = match format {
        MeshFormat::Off => parse_off(text, path)?,
        MeshFormat::Obj => parse_obj(text, path)?,
    };
    if reorient {
        TriangleMesh::new_reoriented(v, f)
    } else {
        TriangleMesh::new(v, f)
    }
}

pub fn save_mesh(mesh: &TriangleMesh, path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<()> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    std::fs::write(path, write_mesh(mesh, format)).map_err(|e| Error::io(path, e))
}

/// Serialize with shortest round-trip float formatting, so a reload
/// reproduces the vertices bit for bit.
pub fn write_mesh(mesh: &TriangleMesh, format: MeshFormat) -> String {
    let mut out = String::new();
    match format {
        MeshFormat::Off => {
            let _ = writeln!(out, "OFF\n{} {} 0", mesh.vertices().len(), mesh.face_count());
            for v in mesh.vertices() {
                let _ = writeln!(out, "{:?} {:?} {:?}", v.x, v.y, v.z);
            }
            for [a, b, c] in mesh.triangles() {
                let _ = writeln!(out, "3 {a} {b} {c}");
            }
        }
        MeshFormat::Obj => {
            for v in mesh.vertices() {
                let _ = writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z);
            }
            for [a, b, c] in mesh.triangles() {
                let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
            }
        }
    }
    out
}

struct Lines<'a> {
    path: PathBuf,
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, path: &Path) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Self { path: path.to_path_buf(), inner: it.peekable() }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse { path: self.path.clone(), line, message: message.into() }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.inner.peek().map(|&(l, _)| l).unwrap_or(0);
        self.inner.next().ok_or_else(|| self.err(last, format!("unexpected end of file, expected {what}")))
    }
}

fn parse_num<T: std::str::FromStr>(lines: &Lines, line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| lines.err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| lines.err(line, format!("cannot parse {what} from {tok:?}")))
}

fn fan(poly: &[usize], out: &mut Vec<[usize; 3]>) {
    for k in 1..poly.len() - 1 {
        out.push([poly[0], poly[k], poly[k + 1]]);
    }
}

fn parse_off(text: &str, path: &Path) -> Result<(Vec<Vector3<f64>>, Vec<[usize; 3]>)> {
    let mut lines = Lines::new(text, path);
    let (ln, header) = lines.next("OFF header")?;
    let rest = header
        .strip_prefix("OFF")
        .ok_or_else(|| lines.err(ln, format!("expected OFF header, found {header:?}")))?
        .trim();
    let (ln, counts) = if rest.is_empty() { lines.next("element counts")? } else { (ln, rest) };
    let mut toks = counts.split_whitespace();
    let nv: usize = parse_num(&lines, ln, toks.next(), "vertex count")?;
    let nf: usize = parse_num(&lines, ln, toks.next(), "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next("vertex")?;
        let mut t = l.split_whitespace();
        let x = parse_num(&lines, ln, t.next(), "x")?;
        let y = parse_num(&lines, ln, t.next(), "y")?;
        let z = parse_num(&lines, ln, t.next(), "z")?;
        vertices.push(Vector3::new(x, y, z));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next("face")?;
        let mut t = l.split_whitespace();
        let k: usize = parse_num(&lines, ln, t.next(), "face size")?;
        if k < 3 {
            return Err(lines.err(ln, format!("face with {k} vertices")));
        }
        let poly = (0..k).map(|_| parse_num(&lines, ln, t.next(), "vertex index")).collect::<Result<Vec<usize>>>()?;
        fan(&poly, &mut faces);
    }
    Ok((vertices, faces))
}

fn parse_obj(text: &str, path: &Path) -> Result<(Vec<Vector3<f64>>, Vec<[usize; 3]>)> {
    let lines = Lines::new(text, path);
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let body: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    for (ln, l) in body {
        let mut t = l.split_whitespace();
        match t.next() {
            Some("v") => {
                let x = parse_num(&lines, ln, t.next(), "x")?;
                let y = parse_num(&lines, ln, t.next(), "y")?;
                let z = parse_num(&lines, ln, t.next(), "z")?;
                vertices.push(Vector3::new(x, y, z));
            }
            Some("f") => {
                let mut poly = Vec::new();
                for tok in t {
                    let head = tok.split('/').next().unwrap_or("");
                    let i: i64 = parse_num(&lines, ln, Some(head), "vertex index")?;
                    let idx = match i {
                        i if i > 0 => (i - 1) as usize,
                        i if i < 0 && (-i) as usize <= vertices.len() => vertices.len() - (-i) as usize,
                        _ => return Err(lines.err(ln, format!("invalid vertex index {i}"))),
                    };
                    poly.push(idx);
                }
                if poly.len() < 3 {
                    return Err(lines.err(ln, format!("face with {} vertices", poly.len())));
                }
                fan(&poly, &mut faces);
            }
            // Normals, texture coordinates, groups and materials carry no geometry we use.
            _ => {}
        }
    }
    Ok((vertices, faces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::tests::octahedron;
    use crate::mesh::{make_primitive, Primitive};

    #[test]
    fn off_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = make_primitive(&Primitive::Ellipsoid { a: 0.5, b: 0.3, c: 0.25 }, 2).unwrap();
        for (name, fmt) in [("m.off", MeshFormat::Off), ("m.obj", MeshFormat::Obj)] {
            let p = dir.path().join(name);
            save_mesh(&mesh, &p, None).unwrap();
            let back = load_mesh(&p, Some(fmt), false).unwrap();
            assert_eq!(back.vertices(), mesh.vertices());
            assert_eq!(back.triangles(), mesh.triangles());
        }
    }

    #[test]
    fn octahedron_off_text() {
        let text = "OFF\n# unit octahedron\n6 8 12\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n\
                    3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n";
        let m = parse_mesh(text, MeshFormat::Off, Path::new("oct.off"), false).unwrap();
        assert!((m.volume() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.triangles(), octahedron().1.as_slice());
    }

    #[test]
    fn obj_with_quads_and_slashes() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
                    vn 0 0 1\nf 1/1/1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf -4 -1 -5 -8\n";
        let m = parse_mesh(text, MeshFormat::Obj, Path::new("cube.obj"), false).unwrap();
        assert_eq!(m.face_count(), 12);
        assert!((m.volume() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_mesh("OFF\n3 1 0\n0 0 0\n1 0 x\n", MeshFormat::Off, Path::new("bad.off"), false).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_mesh("PLY\n", MeshFormat::Off, Path::new("a.off"), false).is_err());
        assert!(MeshFormat::from_path(Path::new("a.stl")).is_err());
    }

    #[test]
    fn reorient_on_load() {
        let text = "OFF\n6 8 0\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n\
                    3 0 4 2\n3 2 4 1\n3 1 4 3\n3 3 4 0\n3 2 5 0\n3 1 5 2\n3 3 5 1\n3 0 5 3\n";
        assert!(parse_mesh(text, MeshFormat::Off, Path::new("inv.off"), false).is_err());
        let m = parse_mesh(text, MeshFormat::Off, Path::new("inv.off"), true).unwrap();
        assert!(m.volume() > 0.0);
    }
}
