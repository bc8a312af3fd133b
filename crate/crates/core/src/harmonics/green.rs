use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use super::ylm::{regular_solid_harmonic, sph_harm, HarmonicIndex, SphericalPoint};
use crate::error::{Error, Result};

/// `Γ(x - y) = -1 / (4π |x - y|)`.
pub fn fundamental_solution(x: &Vector3<f64>, y: &Vector3<f64>) -> Result<f64> {
    let d = (x - y).norm();
    if d == 0.0 {
        return Err(Error::invalid("fundamental solution evaluated at coincident points"));
    }
    Ok(-1.0 / (4.0 * PI * d))
}

/// Multipole expansion of `Γ(x - y)` truncated after degree `order`, valid
/// for `|y| < |x|`.
pub fn gamma_series(x: &Vector3<f64>, y: &Vector3<f64>, order: u32) -> Result<f64> {
    let (rx, ry) = (x.norm(), y.norm());
    if ry >= rx {
        return Err(Error::invalid(format!("expansion needs |y| < |x|, got |y|={ry}, |x|={rx}")));
    }
    let sx = SphericalPoint::from_cartesian(x);
    let mut sum = Complex64::default();
    for l in 0..=order {
        let mut shell = Complex64::default();
        for k in -(l as i32)..=l as i32 {
            let idx = HarmonicIndex { n: l, m: k };
            shell += sph_harm(idx, sx.theta, sx.phi) * regular_solid_harmonic(idx, y).conj();
        }
        sum += shell / ((2 * l + 1) as f64 * rx.powi(l as i32 + 1));
    }
    Ok(-sum.re)
}
