//! Nyström discretization of the adjoint Neumann–Poincaré operator and its
//! resolvent.

use std::f64::consts::PI;

use faer::linalg::solvers::PartialPivLu;
use faer::prelude::*;
use faer::Mat;
use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{solid_harmonic_coeffs, HarmonicIndex, MonomialExpansion, MultiIndex};
use crate::mesh::{Quadrature, QuadratureRule, TriangleMesh};

/// Conductivity contrast, stored as `λ = (κ + 1) / (2(κ - 1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    lambda: f64,
}

impl Contrast {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda.abs() > 0.5) {
            return Err(Error::invalid(format!("contrast needs |lambda| > 1/2, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn from_kappa(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0 && kappa != 1.0) {
            return Err(Error::invalid(format!("conductivity ratio must be positive and != 1, got {kappa}")));
        }
        Self::new((kappa + 1.0) / (2.0 * (kappa - 1.0)))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kappa(&self) -> f64 {
        (2.0 * self.lambda + 1.0) / (2.0 * self.lambda - 1.0)
    }
}

/// Values of a surface density at the quadrature nodes, with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDensity {
    pub values: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl BoundaryDensity {
    pub fn new(values: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::invalid(format!(
                "density has {} values but the quadrature has {} nodes",
                values.len(),
                weights.len()
            )));
        }
        Ok(Self { values, weights })
    }

    pub fn zeros(weights: Vec<f64>) -> Self {
        Self { values: vec![Complex64::default(); weights.len()], weights }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `∫ φ dσ`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `∫ f φ dσ` for node samples `f`.
    pub fn integrate_against(&self, f: impl IntoIterator<Item = Complex64>) -> Complex64 {
        f.into_iter().zip(&self.values).zip(&self.weights).map(|((f, v), w)| f * v * w).sum()
    }

    /// Shift by a constant so that `∫ φ dσ` equals `target`.
    pub fn with_integral(mut self, target: Complex64) -> Self {
        let total: f64 = self.weights.iter().sum();
        let shift = (target - self.integral()) / total;
        for v in &mut self.values {
            *v += shift;
        }
        self
    }

    pub fn scale(mut self, a: Complex64) -> Self {
        for v in &mut self.values {
            *v *= a;
        }
        self
    }

    pub fn axpy(mut self, a: Complex64, other: &BoundaryDensity) -> Self {
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += a * o;
        }
        self
    }
}

/// Dense Nyström matrix of `K*_D` on a quadrature. Entry `(i, j)` is the
/// kernel `⟨x_i - x_j, ν_i⟩ / (4π |x_i - x_j|³)` times the weight `w_j`.
///
/// The diagonal comes from the `K_D` discretization: each of its rows is
/// made to sum to `1/2`, the value of `∫ ∂Γ(x - y)/∂ν(y) dσ(y)` on the
/// boundary, and `K*_D` is its weighted transpose. As a consequence
/// `wᵀ A = wᵀ / 2` holds to roundoff.
#[derive(Debug, Clone)]
pub struct NpOperator {
    quad: Quadrature,
    rule: QuadratureRule,
    /// Column-major.
    data: Vec<f64>,
}

impl NpOperator {
    pub fn assemble(mesh: &TriangleMesh, rule: QuadratureRule) -> Result<Self> {
        let quad = mesh.quadrature(rule);
        if let Some(f) = quad.weights.iter().position(|&w| !(w > 0.0)) {
            return Err(Error::invalid(format!("quadrature node {f} has zero weight")));
        }
        let n = quad.len();
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(j, col)| {
            let (xj, wj) = (quad.points[j], quad.weights[j]);
            let mut k_row = 0.0;
            for i in 0..n {
                if i == j {
                    continue;
                }
                let d = quad.points[i] - xj;
                let r2 = d.norm_squared();
                if r2 == 0.0 {
                    continue;
                }
                let k = d.dot(&quad.normals[i]) / (4.0 * PI * r2 * r2.sqrt());
                col[i] = k * wj;
                k_row += k * quad.weights[i];
            }
            col[j] = 0.5 - k_row;
        });
        Ok(Self { quad, rule, data })
    }

    pub fn len(&self) -> usize {
        self.quad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quad.is_empty()
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.len() + i]
    }

    /// `A φ`.
    pub fn apply(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let mut out = vec![Complex64::default(); n];
        for (j, col) in self.data.chunks(n).enumerate() {
            let p = phi[j];
            for (o, a) in out.iter_mut().zip(col) {
                *o += p * a;
            }
        }
        out
    }

    /// Largest deviation of a `K_D` row sum from `1/2`.
    pub fn calibration_defect(&self) -> f64 {
        let n = self.len();
        let w = &self.quad.weights;
        (0..n)
            .into_par_iter()
            .map(|j| {
                let col = &self.data[j * n..(j + 1) * n];
                let s: f64 = col.iter().zip(w).map(|(a, wi)| a * wi).sum::<f64>() / w[j];
                (s - 0.5).abs()
            })
            .reduce(|| 0.0, f64::max)
    }

    /// LU-factorize `λI - A` once for any number of right-hand sides.
    pub fn resolvent(&self, lambda: f64) -> Result<Resolvent<'_>> {
        let contrast = Contrast::new(lambda)?;
        let n = self.len();
        let m = Mat::from_fn(n, n, |i, j| if i == j { lambda } else { 0.0 } - self.data[j * n + i]);
        Ok(Resolvent { op: self, lambda: contrast.lambda(), lu: m.partial_piv_lu() })
    }

    /// Solve `(λI - A) φ = rhs`.
    pub fn solve(&self, lambda: f64, rhs: &BoundaryDensity) -> Result<BoundaryDensity> {
        Ok(self.resolvent(lambda)?.solve_many(std::slice::from_ref(rhs))?.remove(0))
    }
}

/// A factorized `λI - A`.
pub struct Resolvent<'a> {
    op: &'a NpOperator,
    lambda: f64,
    lu: PartialPivLu<f64>,
}

/// Relative residual accepted from the dense solve.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

impl Resolvent<'_> {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn operator(&self) -> &NpOperator {
        self.op
    }

    /// Solve for several complex right-hand sides, checking each residual.
    pub fn solve_many(&self, rhs: &[BoundaryDensity]) -> Result<Vec<BoundaryDensity>> {
        let n = self.op.len();
        if let Some(bad) = rhs.iter().position(|r| r.len() != n) {
            return Err(Error::invalid(format!("right-hand side {bad} has {} values, expected {n}", rhs[bad].len())));
        }
        let b = Mat::from_fn(n, 2 * rhs.len(), |i, c| {
            let v = rhs[c / 2].values[i];
            if c % 2 == 0 {
                v.re
            } else {
                v.im
            }
        });
        let x = self.lu.solve(&b);
        let out: Vec<BoundaryDensity> = rhs
            .iter()
            .enumerate()
            .map(|(c, r)| BoundaryDensity {
                values: (0..n).map(|i| Complex64::new(x[(i, 2 * c)], x[(i, 2 * c + 1)])).collect(),
                weights: r.weights.clone(),
            })
            .collect();
        out.par_iter().zip(rhs.par_iter()).enumerate().try_for_each(|(c, (phi, r))| self.check(c, phi, r))?;
        Ok(out)
    }

    fn check(&self, c: usize, phi: &BoundaryDensity, rhs: &BoundaryDensity) -> Result<()> {
        if phi.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::numerical(format!("resolvent solve produced non-finite values (lambda = {})", self.lambda)));
        }
        let ap = self.op.apply(&phi.values);
        let norm = |v: &mut dyn Iterator<Item = Complex64>| v.map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let res = norm(&mut ap.iter().zip(&phi.values).zip(&rhs.values).map(|((a, p), b)| self.lambda * p - a - b));
        let scale = norm(&mut rhs.values.iter().copied());
        if res > SOLVE_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::numerical(format!(
                "resolvent solve for right-hand side {c} has relative residual {:.3e} (lambda = {})",
                res / scale,
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Reject `x` if it lies within one mesh width `h` of a node or if its
/// discrete solid angle marks it as enclosed by the surface.
pub fn check_exterior(quad: &Quadrature, h: f64, x: &Vector3<f64>) -> Result<()> {
    let mut closest = f64::INFINITY;
    let mut winding = 0.0;
    for ((y, nu), w) in quad.points.iter().zip(&quad.normals).zip(&quad.weights) {
        let d = y - x;
        let r = d.norm();
        closest = closest.min(r);
        winding += w * d.dot(nu) / (4.0 * PI * r * r * r);
    }
    if closest <= h {
        return Err(Error::invalid(format!(
            "evaluation point {x:?} is {closest:.3e} from the surface, inside the mesh width {h:.3e}"
        )));
    }
    if winding > 0.5 {
        return Err(Error::invalid(format!("evaluation point {x:?} lies inside the surface")));
    }
    Ok(())
}

/// `S_D[φ](x) = Σ_j Γ(x - y_j) φ_j w_j` for `x` outside the surface, as
/// checked by [`check_exterior`].
pub fn single_layer_at(quad: &Quadrature, h: f64, phi: &BoundaryDensity, x: &Vector3<f64>) -> Result<Complex64> {
    if phi.len() != quad.len() {
        return Err(Error::invalid(format!("density has {} values, quadrature has {}", phi.len(), quad.len())));
    }
    check_exterior(quad, h, x)?;
    Ok(quad
        .points
        .iter()
        .zip(&phi.values)
        .zip(&quad.weights)
        .map(|((y, p), w)| -p * (w / (4.0 * PI * (x - y).norm())))
        .sum())
}

pub fn single_layer(mesh: &TriangleMesh, rule: QuadratureRule, phi: &BoundaryDensity, x: &Vector3<f64>) -> Result<Complex64> {
    single_layer_at(&mesh.quadrature(rule), mesh.max_edge(), phi, x)
}

fn neumann_values(quad: &Quadrature, grad: impl Fn(&Vector3<f64>) -> [Complex64; 3]) -> Vec<Complex64> {
    quad.points
        .iter()
        .zip(&quad.normals)
        .map(|(p, nu)| {
            let g = grad(p);
            g[0] * nu.x + g[1] * nu.y + g[2] * nu.z
        })
        .collect()
}

/// `∂(r^n Y_n^m)/∂ν` at the nodes, from exact differentiation of the
/// monomial expansion.
///
/// The constant part is adjusted so that the discrete flux `Σ w g` vanishes,
/// as the exact flux of a harmonic function does on any closed surface.
/// This keeps the densities in the range where `∫ φ = 0`, which the
/// translation formulas rely on.
pub fn solid_harmonic_neumann_data(quad: &Quadrature, idx: HarmonicIndex) -> BoundaryDensity {
    if idx.n == 0 {
        return BoundaryDensity::zeros(quad.weights.clone());
    }
    let e = solid_harmonic_coeffs(idx);
    BoundaryDensity { values: neumann_values(quad, |p| e.gradient(p)), weights: quad.weights.clone() }
        .with_integral(Complex64::default())
}

/// `∂(x^α)/∂ν` at the nodes, shifted so that its discrete flux equals the
/// exact flux of `∇x^α` through the polyhedral surface.
pub fn monomial_neumann_data(mesh: &TriangleMesh, quad: &Quadrature, alpha: MultiIndex) -> BoundaryDensity {
    let e = monomial(alpha);
    let g = BoundaryDensity { values: neumann_values(quad, |p| e.gradient(p)), weights: quad.weights.clone() };
    g.with_integral(Complex64::from(exact_monomial_flux(mesh, alpha)))
}

pub(crate) fn monomial(alpha: MultiIndex) -> MonomialExpansion {
    MonomialExpansion { degree: alpha.iter().sum(), terms: vec![(alpha, Complex64::new(1.0, 0.0))] }
}

/// Seven-point triangle rule exact for polynomials of degree five.
const TRI7: [(f64, f64, f64, f64); 7] = {
    const A1: f64 = 0.059_715_871_789_769_82;
    const B1: f64 = 0.470_142_064_105_115_1;
    const A2: f64 = 0.797_426_985_353_087_3;
    const B2: f64 = 0.101_286_507_323_456_35;
    const W0: f64 = 0.225;
    const W1: f64 = 0.132_394_152_788_506_18;
    const W2: f64 = 0.125_939_180_544_827_15;
    [
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, W0),
        (A1, B1, B1, W1),
        (B1, A1, B1, W1),
        (B1, B1, A1, W1),
        (A2, B2, B2, W2),
        (B2, A2, B2, W2),
        (B2, B2, A2, W2),
    ]
};

/// `∫_{∂D} ν · ∇x^α dσ` on the flat-faced mesh, exact for `|α| <= 6`.
pub fn exact_monomial_flux(mesh: &TriangleMesh, alpha: MultiIndex) -> f64 {
    let e = monomial(alpha);
    let v = mesh.vertices();
    mesh.triangles()
        .iter()
        .zip(mesh.areas())
        .zip(mesh.normals())
        .map(|((&[a, b, c], area), nu)| {
            let s: f64 = TRI7
                .iter()
                .map(|&(l0, l1, l2, w)| {
                    let g = e.gradient(&(v[a] * l0 + v[b] * l1 + v[c] * l2));
                    w * (g[0].re * nu.x + g[1].re * nu.y + g[2].re * nu.z)
                })
                .sum();
            s * area
        })
        .sum()
}

#[cfg(test)]
mod tests;
