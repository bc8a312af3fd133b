//! Transformation-invariant shape descriptors and dictionary matching.
//!
//! The registration point `u_D` is read off the first two CGPT degrees,
//! `J = M(D - u_D)` removes translation, `S_ln = J_nn⁻¹ J_nl J_ll⁻¹ J_ln`
//! removes scale, and `I_ln = ‖S_ln‖_F` removes rotation.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cgpt::{compute_cgpt, transform_shift, CgptBlockMatrix, Provenance};
use crate::error::{Error, Result};
use crate::mesh::{QuadratureRule, TriangleMesh};

/// Largest accepted condition number of an inverted block.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Relative imaginary residual above which a registration point is flagged.
pub const IMAG_RESIDUAL_LIMIT: f64 = 1e-6;

/// `U_D = M_21 M_11⁻¹`.
pub type UMatrix = SMatrix<Complex64, 5, 3>;

fn condition(b: &DMatrix<Complex64>) -> f64 {
    let sv = b.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn checked_inverse(b: &DMatrix<Complex64>, name: &str) -> Result<DMatrix<Complex64>> {
    let cond = condition(b);
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::numerical(format!("block {name} is ill-conditioned (condition number {cond:.3e})")));
    }
    b.clone()
        .try_inverse()
        .ok_or_else(|| Error::numerical(format!("block {name} is singular")))
}

fn require_order(m: &CgptBlockMatrix, min: usize) -> Result<()> {
    if m.order() < min {
        return Err(Error::invalid(format!("order {} is below the required {min}", m.order())));
    }
    Ok(())
}

pub fn compute_u_matrix(m: &CgptBlockMatrix) -> Result<UMatrix> {
    require_order(m, 2)?;
    let inv = checked_inverse(&m.block(1, 1), "M_11")?;
    let u = m.block(2, 1) * inv;
    Ok(UMatrix::from_fn(|i, j| u[(i, j)]))
}

/// The linear map `u` with `u(conj(G_21(z))) = z` and
/// `u(conj(Q_2) U Q_1^t) = R u(U)`.
pub fn u_map(u: &UMatrix) -> Vector3<Complex64> {
    let a = 0.3;
    let b = 3f64.sqrt() / (10.0 * 2f64.sqrt());
    let c = 3.0 / (10.0 * 2f64.sqrt());
    let i = Complex64::i();
    let e = |r: usize, col: usize| u[(r - 1, col - 1)];
    let x = -a * e(1, 1) + b * e(3, 1) - c * e(2, 2) + c * e(4, 2) - b * e(3, 3) + a * e(5, 3);
    let y = i * (a * e(1, 1) + b * e(3, 1) + c * e(2, 2) + c * e(4, 2) + b * e(3, 3) + a * e(5, 3));
    let z = a * e(2, 1) + 3f64.sqrt() / 5.0 * e(3, 2) + a * e(4, 3);
    Vector3::new(x, y, z).unscale(5f64.sqrt())
}

/// Registration point `u_D = Re u(U_D)` with its imaginary residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegistrationPoint {
    pub point: Vector3<f64>,
    pub imag_residual: f64,
    /// Length scale `‖M_11‖_F^{1/3}` of the inclusion, used as a floor when
    /// judging the residual of points near the origin.
    pub length_scale: f64,
}

impl RegistrationPoint {
    /// Residual relative to `max(|u_D|, length_scale)`.
    pub fn relative_residual(&self) -> f64 {
        let scale = self.point.norm().max(self.length_scale);
        if scale > 0.0 {
            self.imag_residual / scale
        } else {
            self.imag_residual
        }
    }

    /// Whether the residual is small enough for the point to be trusted.
    pub fn is_reliable(&self) -> bool {
        self.relative_residual() < IMAG_RESIDUAL_LIMIT
    }
}

pub fn registration_point(m: &CgptBlockMatrix) -> Result<RegistrationPoint> {
    let u = u_map(&compute_u_matrix(m)?);
    Ok(RegistrationPoint {
        point: u.map(|c| c.re),
        imag_residual: u.map(|c| c.im).norm(),
        length_scale: m.block(1, 1).norm().cbrt(),
    })
}

/// Translation-invariant tensor `J = M(D - u_D)`.
pub fn compute_j(m: &CgptBlockMatrix) -> Result<CgptBlockMatrix> {
    let u = registration_point(m)?.point;
    Ok(transform_shift(m, &-u).with_provenance(Provenance::Registered))
}

/// The family `S_ln`, `1 <= l, n <= order`, each of size `2n+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SBlocks {
    order: usize,
    blocks: Vec<DMatrix<Complex64>>,
}

impl SBlocks {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, l: usize, n: usize) -> &DMatrix<Complex64> {
        assert!((1..=self.order).contains(&l) && (1..=self.order).contains(&n));
        &self.blocks[(l - 1) * self.order + (n - 1)]
    }
}

/// `S_ln = J_nn⁻¹ J_nl J_ll⁻¹ J_ln`.
pub fn compute_s(j: &CgptBlockMatrix) -> Result<SBlocks> {
    let order = j.order();
    let inv: Vec<_> = (1..=order)
        .map(|n| checked_inverse(&j.block(n, n), &format!("J_{n}{n}")))
        .collect::<Result<_>>()?;
    let mut blocks = Vec::with_capacity(order * order);
    for l in 1..=order {
        for n in 1..=order {
            blocks.push(&inv[n - 1] * j.block(n, l) * &inv[l - 1] * j.block(l, n));
        }
    }
    Ok(SBlocks { order, blocks })
}

/// The grid `I_ln = ‖S_ln‖_F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DescriptorJson", into = "DescriptorJson")]
pub struct ShapeDescriptor {
    lambda: f64,
    provenance: Provenance,
    grid: DMatrix<f64>,
}

impl ShapeDescriptor {
    pub fn new(lambda: f64, provenance: Provenance, grid: DMatrix<f64>) -> Result<Self> {
        if !grid.is_square() || grid.nrows() == 0 {
            return Err(Error::invalid(format!("descriptor grid must be square, got {:?}", grid.shape())));
        }
        if grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("descriptor entries must be finite and nonnegative"));
        }
        Ok(Self { lambda, provenance, grid })
    }

    pub fn order(&self) -> usize {
        self.grid.nrows()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Row `l - 1`, column `n - 1` holds `I_ln`.
    pub fn grid(&self) -> &DMatrix<f64> {
        &self.grid
    }

    pub fn get(&self, l: usize, n: usize) -> f64 {
        self.grid[(l - 1, n - 1)]
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &ShapeDescriptor) -> Result<f64> {
        check_compatible(self, other.lambda, other.order())?;
        Ok((&self.grid - &other.grid).amax())
    }
}

pub fn compute_descriptor(m: &CgptBlockMatrix) -> Result<ShapeDescriptor> {
    let s = compute_s(&compute_j(m)?)?;
    let k = m.order();
    let grid = DMatrix::from_fn(k, k, |l, n| s.get(l + 1, n + 1).norm());
    ShapeDescriptor::new(m.lambda(), m.provenance(), grid)
}

fn grid_rows(grid: &DMatrix<f64>) -> Vec<Vec<f64>> {
    grid.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn grid_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let k = rows.len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::invalid("descriptor grid rows must form a square matrix"));
    }
    Ok(DMatrix::from_fn(k, k, |i, j| rows[i][j]))
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    schema: u32,
    order: usize,
    lambda: f64,
    provenance: Provenance,
    #[serde(rename = "I")]
    grid: Vec<Vec<f64>>,
}

impl From<ShapeDescriptor> for DescriptorJson {
    fn from(d: ShapeDescriptor) -> Self {
        Self { schema: 1, order: d.order(), lambda: d.lambda, provenance: d.provenance, grid: grid_rows(&d.grid) }
    }
}

impl TryFrom<DescriptorJson> for ShapeDescriptor {
    type Error = Error;

    fn try_from(j: DescriptorJson) -> Result<Self> {
        let grid = grid_from_rows(&j.grid)?;
        if grid.nrows() != j.order {
            return Err(Error::invalid(format!("descriptor order {} does not match its grid", j.order)));
        }
        ShapeDescriptor::new(j.lambda, j.provenance, grid)
    }
}

fn check_compatible(d: &ShapeDescriptor, lambda: f64, order: usize) -> Result<()> {
    if d.lambda != lambda {
        return Err(Error::invalid(format!("contrast mismatch: λ = {} against λ = {lambda}", d.lambda)));
    }
    if d.order() != order {
        return Err(Error::invalid(format!("order mismatch: K = {} against K = {order}", d.order())));
    }
    Ok(())
}

/// `‖(I_target - I_entry)_{l≠n}‖₂ / ‖I_entry‖_F`.
pub fn descriptor_distance(target: &ShapeDescriptor, entry: &DMatrix<f64>) -> f64 {
    let k = entry.nrows();
    let mut num = 0.0;
    for l in 0..k {
        for n in 0..k {
            if l != n {
                num += (target.grid[(l, n)] - entry[(l, n)]).powi(2);
            }
        }
    }
    num.sqrt() / entry.norm()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionaryEntry {
    pub name: String,
    #[serde(rename = "I", serialize_with = "ser_grid", deserialize_with = "de_grid")]
    pub grid: DMatrix<f64>,
    pub source: Option<String>,
}

fn ser_grid<S: serde::Serializer>(g: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    grid_rows(g).serialize(s)
}

fn de_grid<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<DMatrix<f64>, D::Error> {
    let rows = Vec::<Vec<f64>>::deserialize(d)?;
    grid_from_rows(&rows).map_err(serde::de::Error::custom)
}

/// Named descriptors sharing one contrast and order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DictionaryJson", into = "DictionaryJson")]
pub struct Dictionary {
    lambda: f64,
    order: usize,
    entries: Vec<DictionaryEntry>,
}

#[derive(Serialize, Deserialize)]
struct DictionaryJson {
    schema: u32,
    lambda: f64,
    order: usize,
    entries: Vec<DictionaryEntry>,
}

impl From<Dictionary> for DictionaryJson {
    fn from(d: Dictionary) -> Self {
        Self { schema: 1, lambda: d.lambda, order: d.order, entries: d.entries }
    }
}

impl TryFrom<DictionaryJson> for Dictionary {
    type Error = Error;

    fn try_from(j: DictionaryJson) -> Result<Self> {
        Dictionary::new(j.lambda, j.order, j.entries)
    }
}

/// A dictionary source shape.
pub enum DictSource<'a> {
    Mesh { mesh: &'a TriangleMesh, path: Option<String> },
    Cgpt { cgpt: &'a CgptBlockMatrix, path: Option<String> },
}

impl Dictionary {
    pub fn new(lambda: f64, order: usize, entries: Vec<DictionaryEntry>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for e in &entries {
            if !names.insert(e.name.as_str()) {
                return Err(Error::invalid(format!("duplicate dictionary entry {:?}", e.name)));
            }
            if e.grid.nrows() != order {
                return Err(Error::invalid(format!("entry {:?} has order {}, expected {order}", e.name, e.grid.nrows())));
            }
        }
        Ok(Self { lambda, order, entries })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[DictionaryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Descriptors of every source at contrast `lambda` and order `order`.
/// CGPT sources of higher order are truncated; meshes are solved in parallel.
pub fn dict_build(
    entries: Vec<(String, DictSource<'_>)>,
    lambda: f64,
    order: usize,
    rule: QuadratureRule,
) -> Result<Dictionary> {
    let built: Vec<DictionaryEntry> = entries
        .into_par_iter()
        .map(|(name, src)| {
            let (cgpt, source) = match src {
                DictSource::Mesh { mesh, path } => (compute_cgpt(mesh, lambda, order, rule)?, path),
                DictSource::Cgpt { cgpt, path } => {
                    if cgpt.lambda() != lambda {
                        return Err(Error::invalid(format!(
                            "entry {name:?} has λ = {}, dictionary uses λ = {lambda}",
                            cgpt.lambda()
                        )));
                    }
                    if cgpt.order() < order {
                        return Err(Error::invalid(format!(
                            "entry {name:?} has order {}, dictionary needs {order}",
                            cgpt.order()
                        )));
                    }
                    (cgpt.truncate(order)?, path)
                }
            };
            let d = compute_descriptor(&cgpt)
                .map_err(|e| Error::numerical(format!("entry {name:?}: {e}")))?;
            Ok(DictionaryEntry { name, grid: d.grid, source })
        })
        .collect::<Result<_>>()?;
    Dictionary::new(lambda, order, built)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub name: String,
    pub distance: f64,
}

/// Dictionary entries ranked by ascending distance to `target`, ties by name.
pub fn dict_match(target: &ShapeDescriptor, dict: &Dictionary) -> Result<Vec<MatchResult>> {
    if dict.is_empty() {
        return Err(Error::invalid("dictionary is empty"));
    }
    check_compatible(target, dict.lambda, dict.order)?;
    let mut out: Vec<MatchResult> = dict
        .entries
        .iter()
        .map(|e| MatchResult { name: e.name.clone(), distance: descriptor_distance(target, &e.grid) })
        .collect();
    out.sort_by(|a, b| a.distance.total_cmp(&b.distance).then_with(|| a.name.cmp(&b.name)));
    Ok(out)
}
