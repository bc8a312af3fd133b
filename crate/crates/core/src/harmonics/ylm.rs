use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::factorial::ln_factorial;
use super::legendre::legendre_unchecked;
use crate::error::{Error, Result};

/// Degree/order pair of a spherical harmonic, `|m| <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub n: u32,
    pub m: i32,
}

impl HarmonicIndex {
    pub fn new(n: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > n {
            return Err(Error::invalid(format!("harmonic order {m} exceeds degree {n}")));
        }
        Ok(Self { n, m })
    }

    /// Position of this order inside its degree block.
    pub fn position(&self) -> usize {
        (self.m + self.n as i32) as usize
    }
}

/// `x = r (cos φ sin θ, sin φ sin θ, cos θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn from_cartesian(x: &Vector3<f64>) -> Self {
        let r = x.norm();
        if r == 0.0 {
            return Self { r, theta: 0.0, phi: 0.0 };
        }
        let theta = (x.z / r).clamp(-1.0, 1.0).acos();
        let phi = x.y.atan2(x.x);
        Self { r, theta, phi }
    }

    pub fn to_cartesian(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(self.r * cp * st, self.r * sp * st, self.r * ct)
    }
}

fn normalization(n: u32, m: u32) -> f64 {
    let ratio = (ln_factorial((n - m) as usize) - ln_factorial((n + m) as usize)).exp();
    ((2 * n + 1) as f64 / (4.0 * PI) * ratio).sqrt()
}

/// Complex spherical harmonic `Y_n^m(θ, φ)`.
pub fn sph_harm(idx: HarmonicIndex, theta: f64, phi: f64) -> Complex64 {
    let m_abs = idx.m.unsigned_abs();
    let sign = if m_abs % 2 == 0 { 1.0 } else { -1.0 };
    let p = legendre_unchecked(idx.n, m_abs, theta.cos());
    let y = Complex64::from_polar(sign * normalization(idx.n, m_abs) * p, m_abs as f64 * phi);
    if idx.m >= 0 {
        y
    } else {
        sign * y.conj()
    }
}

/// Regular solid harmonic `r^n Y_n^m(θ, φ)` at a Cartesian point; well defined
/// at the origin.
pub fn regular_solid_harmonic(idx: HarmonicIndex, x: &Vector3<f64>) -> Complex64 {
    let sp = SphericalPoint::from_cartesian(x);
    if sp.r == 0.0 {
        return if idx.n == 0 {
            Complex64::new(1.0 / (4.0 * PI).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    sph_harm(idx, sp.theta, sp.phi) * sp.r.powi(idx.n as i32)
}
