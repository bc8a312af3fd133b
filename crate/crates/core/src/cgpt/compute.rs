use std::collections::HashMap;
use std::sync::Mutex;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{CgptBlockMatrix, Provenance};
use crate::error::{Error, Result};
use crate::harmonics::{
    harmonic_count, regular_solid_harmonic, solid_harmonic_coeffs, stacked_indices, MultiIndex, MAX_DEGREE,
};
use crate::mesh::{QuadratureRule, TriangleMesh};
use crate::np_solver::{
    monomial, monomial_neumann_data, solid_harmonic_neumann_data, BoundaryDensity, NpOperator, Resolvent,
};

/// Highest monomial degree for which the flux of `∇x^α` is integrated exactly.
pub const MAX_MONOMIAL_DEGREE: u32 = 6;

/// Source of monomial GPTs `M_αβ`.
pub trait GptProvider {
    fn lambda(&self) -> f64;
    fn monomial_gpt(&self, alpha: MultiIndex, beta: MultiIndex) -> Result<f64>;
}

/// One factorization of `λI - K*_D` serving both the harmonic and the
/// monomial definition of the CGPTs.
pub struct GptSolver<'a> {
    mesh: &'a TriangleMesh,
    resolvent: Resolvent<'a>,
    densities: Mutex<HashMap<MultiIndex, BoundaryDensity>>,
}

impl<'a> GptSolver<'a> {
    /// `op` must have been assembled on `mesh`.
    pub fn new(mesh: &'a TriangleMesh, op: &'a NpOperator, lambda: f64) -> Result<Self> {
        Ok(Self { mesh, resolvent: op.resolvent(lambda)?, densities: Mutex::new(HashMap::new()) })
    }

    pub fn resolvent(&self) -> &Resolvent<'a> {
        &self.resolvent
    }

    /// CGPTs of degrees `1..=order` from one batched solve.
    pub fn cgpt(&self, order: usize) -> Result<CgptBlockMatrix> {
        if order == 0 || order > MAX_DEGREE as usize {
            return Err(Error::invalid(format!("CGPT order must be in 1..={MAX_DEGREE}, got {order}")));
        }
        let quad = self.resolvent.operator().quadrature();
        let indices: Vec<_> = stacked_indices(order).collect();
        let rhs: Vec<_> = indices.par_iter().map(|&idx| solid_harmonic_neumann_data(quad, idx)).collect();
        let phi = self.resolvent.solve_many(&rhs)?;
        let nodes = quad.len();
        let d = harmonic_count(order);
        let tests = DMatrix::from_fn(nodes, d, |j, c| regular_solid_harmonic(indices[c], &quad.points[j]) * quad.weights[j]);
        let dens = DMatrix::from_fn(nodes, d, |j, c| phi[c].values[j]);
        CgptBlockMatrix::from_full(order, self.resolvent.lambda(), Provenance::Computed, tests.adjoint() * dens)
    }

    fn ensure_degree(&self, degree: u32) -> Result<()> {
        if degree == 0 || degree > MAX_MONOMIAL_DEGREE {
            return Err(Error::invalid(format!("monomial degree must be in 1..={MAX_MONOMIAL_DEGREE}, got {degree}")));
        }
        let quad = self.resolvent.operator().quadrature();
        let missing: Vec<MultiIndex> = multi_indices(degree)
            .filter(|a| !self.densities.lock().expect("density cache").contains_key(a))
            .collect();
        if missing.is_empty() {
            return Ok(());
        }
        let rhs: Vec<_> = missing.iter().map(|&a| monomial_neumann_data(self.mesh, quad, a)).collect();
        let phi = self.resolvent.solve_many(&rhs)?;
        self.densities.lock().expect("density cache").extend(missing.into_iter().zip(phi));
        Ok(())
    }
}

impl GptProvider for GptSolver<'_> {
    fn lambda(&self) -> f64 {
        self.resolvent.lambda()
    }

    fn monomial_gpt(&self, alpha: MultiIndex, beta: MultiIndex) -> Result<f64> {
        let deg_b: u32 = beta.iter().sum();
        if deg_b == 0 {
            return Err(Error::invalid("monomial GPTs need |beta| >= 1"));
        }
        self.ensure_degree(alpha.iter().sum())?;
        let quad = self.resolvent.operator().quadrature();
        let test = monomial(beta);
        let cache = self.densities.lock().expect("density cache");
        let phi = &cache[&alpha];
        Ok(phi.integrate_against(quad.points.iter().map(|p| test.eval(p))).re)
    }
}

/// All multi-indices of total degree `n`.
pub(crate) fn multi_indices(n: u32) -> impl Iterator<Item = MultiIndex> {
    (0..=n).rev().flat_map(move |a| (0..=n - a).rev().map(move |b| [a, b, n - a - b]))
}

/// `M_nmlk = Σ_{|α|=n, |β|=l} a_α^{mn} conj(a_β^{kl}) M_αβ`, where `a^{mn}`
/// are the monomial coefficients of `r^n Y_n^m`.
///
/// The conjugate sits on the test-side coefficients because the CGPT pairs
/// the density of `r^n Y_n^m` with `conj(r^l Y_l^k)`.
pub fn harmonic_combine(provider: &impl GptProvider, n: u32, m: i32, l: u32, k: i32) -> Result<Complex64> {
    use crate::harmonics::HarmonicIndex;
    let src = solid_harmonic_coeffs(HarmonicIndex::new(n, m)?);
    let dst = solid_harmonic_coeffs(HarmonicIndex::new(l, k)?);
    let mut sum = Complex64::default();
    for (alpha, a) in &src.terms {
        for (beta, b) in &dst.terms {
            sum += a * b.conj() * provider.monomial_gpt(*alpha, *beta)?;
        }
    }
    Ok(sum)
}

pub fn compute_cgpt(mesh: &TriangleMesh, lambda: f64, order: usize, rule: QuadratureRule) -> Result<CgptBlockMatrix> {
    let op = NpOperator::assemble(mesh, rule)?;
    GptSolver::new(mesh, &op, lambda)?.cgpt(order)
}

/// `M_αβ = ∫ y^β (λI - K*_D)^{-1}[ν·∇x^α] dσ`.
pub fn compute_gpt_monomial(
    mesh: &TriangleMesh,
    lambda: f64,
    alpha: MultiIndex,
    beta: MultiIndex,
    rule: QuadratureRule,
) -> Result<f64> {
    let op = NpOperator::assemble(mesh, rule)?;
    GptSolver::new(mesh, &op, lambda)?.monomial_gpt(alpha, beta)
}
