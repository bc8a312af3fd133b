//! Contracted generalized polarization tensors.
//!
//! `M_nmlk = ∫_{∂D} conj(r^l Y_l^k) (λI - K*_D)^{-1}[∂(r^n Y_n^m)/∂ν] dσ`,
//! stored as a block matrix with block `(l, n)` holding `M_nmlk` at row
//! `k + l`, column `m + n`.

mod compute;
mod transform;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{block_offset, harmonic_count};

pub use compute::{compute_cgpt, compute_gpt_monomial, harmonic_combine, GptProvider, GptSolver, MAX_MONOMIAL_DEGREE};
pub use transform::{
    rotation_matrix_q, shift_matrix_g, transform_full, transform_rotate, transform_scale, transform_shift,
};

/// Where a CGPT matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "computed")]
    Computed,
    #[serde(rename = "transformed")]
    Transformed,
    #[serde(rename = "estimated")]
    Estimated,
    /// Translation-normalized blocks `J_ln`.
    #[serde(rename = "J")]
    Registered,
}

/// One `(2l+1) x (2n+1)` block `M_ln`.
#[derive(Debug, Clone, PartialEq)]
pub struct CgptBlock {
    pub l: usize,
    pub n: usize,
    pub matrix: DMatrix<Complex64>,
}

/// CGPTs of all degrees `1..=order` as one `(K²+2K)`-square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CgptBlockMatrix {
    order: usize,
    lambda: f64,
    provenance: Provenance,
    full: DMatrix<Complex64>,
}

impl CgptBlockMatrix {
    pub fn from_full(order: usize, lambda: f64, provenance: Provenance, full: DMatrix<Complex64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("CGPT order must be at least 1"));
        }
        let dim = harmonic_count(order);
        if full.nrows() != dim || full.ncols() != dim {
            return Err(Error::invalid(format!(
                "order {order} needs a {dim}x{dim} matrix, got {}x{}",
                full.nrows(),
                full.ncols()
            )));
        }
        if full.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::numerical("CGPT matrix has non-finite entries"));
        }
        Ok(Self { order, lambda, provenance, full })
    }

    pub fn zeros(order: usize, lambda: f64, provenance: Provenance) -> Self {
        let dim = harmonic_count(order);
        Self { order, lambda, provenance, full: DMatrix::zeros(dim, dim) }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn full(&self) -> &DMatrix<Complex64> {
        &self.full
    }

    pub fn into_full(self) -> DMatrix<Complex64> {
        self.full
    }

    pub(crate) fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    fn check_degrees(&self, l: usize, n: usize) {
        assert!(
            (1..=self.order).contains(&l) && (1..=self.order).contains(&n),
            "block ({l}, {n}) outside order {}",
            self.order
        );
    }

    /// Copy of block `M_ln`.
    pub fn block(&self, l: usize, n: usize) -> DMatrix<Complex64> {
        self.check_degrees(l, n);
        self.full.view((block_offset(l), block_offset(n)), (2 * l + 1, 2 * n + 1)).into_owned()
    }

    pub fn set_block(&mut self, l: usize, n: usize, b: &DMatrix<Complex64>) {
        self.check_degrees(l, n);
        assert_eq!(b.shape(), (2 * l + 1, 2 * n + 1), "block ({l}, {n}) has the wrong shape");
        self.full.view_mut((block_offset(l), block_offset(n)), (2 * l + 1, 2 * n + 1)).copy_from(b);
    }

    pub fn blocks(&self) -> Vec<CgptBlock> {
        let mut out = Vec::with_capacity(self.order * self.order);
        for l in 1..=self.order {
            for n in 1..=self.order {
                out.push(CgptBlock { l, n, matrix: self.block(l, n) });
            }
        }
        out
    }

    /// `M_nmlk`; zero whenever either degree is 0.
    pub fn entry(&self, n: usize, m: i32, l: usize, k: i32) -> Complex64 {
        if n == 0 || l == 0 {
            return Complex64::default();
        }
        self.check_degrees(l, n);
        self.full[(block_offset(l) + (k + l as i32) as usize, block_offset(n) + (m + n as i32) as usize)]
    }

    /// Leading `order` degrees of this matrix.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order {
            return Err(Error::invalid(format!("cannot truncate order {} to {order}", self.order)));
        }
        let d = harmonic_count(order);
        Ok(Self { order, full: self.full.view((0, 0), (d, d)).into_owned(), ..self.clone() })
    }

    /// `‖M - M*‖_F / ‖M‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let norm = self.full.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.full - self.full.adjoint()).norm() / norm
    }

    /// 2-norm condition number of each diagonal block `M_nn`.
    pub fn diagonal_conditions(&self) -> Vec<f64> {
        (1..=self.order)
            .map(|n| {
                let sv = self.block(n, n).singular_values();
                let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
                if lo == 0.0 {
                    f64::INFINITY
                } else {
                    hi / lo
                }
            })
            .collect()
    }

    /// Worst relative deviation from the unit-sphere CGPT
    /// `n / (λ - 1/(2(2n+1))) δ_ln δ_km` scaled to radius `r`, split into
    /// (diagonal error, largest off-diagonal entry over the diagonal scale).
    pub fn sphere_oracle_error(&self, radius: f64) -> (f64, f64) {
        let mut diag_err = 0.0f64;
        let mut scale = 0.0f64;
        for n in 1..=self.order {
            let want = sphere_cgpt_diagonal(n, self.lambda) * radius.powi(2 * n as i32 + 1);
            scale = scale.max(want.abs());
            for m in -(n as i32)..=n as i32 {
                diag_err = diag_err.max((self.entry(n, m, n, m) - want).norm() / want.abs());
            }
        }
        let mut off = 0.0f64;
        let d = harmonic_count(self.order);
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    off = off.max(self.full[(i, j)].norm());
                }
            }
        }
        (diag_err, off / scale)
    }

    pub fn to_json(&self) -> CgptJson {
        CgptJson {
            schema: 1,
            order: self.order,
            lambda: self.lambda,
            blocks: self
                .blocks()
                .into_iter()
                .map(|b| BlockJson {
                    l: b.l,
                    n: b.n,
                    re: rows(&b.matrix, |z| z.re),
                    im: rows(&b.matrix, |z| z.im),
                })
                .collect(),
            provenance: self.provenance,
        }
    }

    pub fn from_json(j: &CgptJson) -> Result<Self> {
        if j.schema != 1 {
            return Err(Error::invalid(format!("unsupported CGPT schema {}", j.schema)));
        }
        let mut out = Self::zeros(j.order, j.lambda, j.provenance);
        let mut seen = vec![false; j.order * j.order];
        for b in &j.blocks {
            if !(1..=j.order).contains(&b.l) || !(1..=j.order).contains(&b.n) {
                return Err(Error::invalid(format!("block ({}, {}) outside order {}", b.l, b.n, j.order)));
            }
            let (r, c) = (2 * b.l + 1, 2 * b.n + 1);
            let shape_ok = |m: &Vec<Vec<f64>>| m.len() == r && m.iter().all(|row| row.len() == c);
            if !shape_ok(&b.re) || !shape_ok(&b.im) {
                return Err(Error::invalid(format!("block ({}, {}) must be {r}x{c}", b.l, b.n)));
            }
            let m = DMatrix::from_fn(r, c, |i, k| Complex64::new(b.re[i][k], b.im[i][k]));
            out.set_block(b.l, b.n, &m);
            seen[(b.l - 1) * j.order + b.n - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!(
                "block ({}, {}) missing",
                missing / j.order + 1,
                missing % j.order + 1
            )));
        }
        Self::from_full(j.order, j.lambda, j.provenance, out.full)
    }
}

/// `n / (λ - 1/(2(2n+1)))`, the unit-sphere CGPT diagonal.
pub fn sphere_cgpt_diagonal(n: usize, lambda: f64) -> f64 {
    n as f64 / (lambda - 1.0 / (2.0 * (2 * n + 1) as f64))
}

fn rows(m: &DMatrix<Complex64>, f: impl Fn(&Complex64) -> f64) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
}

/// On-disk form of a [`CgptBlockMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgptJson {
    pub schema: u32,
    pub order: usize,
    pub lambda: f64,
    pub blocks: Vec<BlockJson>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub l: usize,
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl Serialize for CgptBlockMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CgptBlockMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CgptJson::deserialize(d)?;
        Self::from_json(&j).map_err(serde::de::Error::custom)
    }
}
