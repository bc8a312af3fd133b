use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::factorial::factorial;

/// Z-Y-Z Euler angles in radians: rotate by `alpha` about z, by `beta` about
/// the new y axis, then by `gamma` about the new z axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    /// Recover angles from a rotation matrix of the form
    /// `Rz(γ) · [[cβ,0,-sβ],[0,1,0],[sβ,0,cβ]] · Rz(α)`, with `β ∈ [0, π]`.
    pub fn from_rotation_matrix(r: &Matrix3<f64>) -> Self {
        let beta = r[(2, 0)].hypot(r[(2, 1)]).atan2(r[(2, 2)]);
        let sb = beta.sin();
        if sb > 1e-12 {
            let alpha = (-r[(2, 1)]).atan2(r[(2, 0)]);
            let gamma = (-r[(1, 2)]).atan2(-r[(0, 2)]);
            Self { alpha, beta, gamma }
        } else if r[(2, 2)] > 0.0 {
            Self { alpha: 0.0, beta: 0.0, gamma: r[(1, 0)].atan2(r[(0, 0)]) }
        } else {
            Self { alpha: 0.0, beta: std::f64::consts::PI, gamma: (-r[(1, 0)]).atan2(-r[(0, 0)]) }
        }
    }
}

/// Wigner small-d function `d_n^{m',m}(β)` from the explicit factorial sum.
pub fn wigner_d_small(n: u32, mp: i32, m: i32, beta: f64) -> f64 {
    let ni = n as i32;
    assert!(mp.abs() <= ni && m.abs() <= ni, "orders ({mp}, {m}) exceed degree {n}");
    let f = |k: i32| factorial(k as usize);
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let lo = 0.max(m - mp);
    let hi = (ni - mp).min(ni + m);
    let mut sum = 0.0;
    for k in lo..=hi {
        let sign = if (mp + m + k) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * c.powi(2 * (ni - k) + m - mp) * s.powi(2 * k - m + mp)
            / (f(ni + m - k) * f(k) * f(mp - m + k) * f(ni - mp - k));
    }
    (f(ni + mp) * f(ni - mp) * f(ni + m) * f(ni - m)).sqrt() * sum
}

/// Wigner D-matrix `Q_n` for the rotation `R(angles)` built by
/// [`crate::mesh::euler_rotation_matrix`]. Row `m + n`, column `m' + n` holds
/// `ρ_n^{m',m}`, chosen so that `Y_n^m(Rξ) = sum_{m'} ρ_n^{m',m} Y_n^{m'}(ξ)`.
///
/// With the rotation matrix composed as `Rz(γ) Ry'(β) Rz(α)` and the Legendre
/// phase convention of this crate, that identity holds for
/// `ρ_n^{m',m} = e^{i m' α} d_n^{m',m}(-β) e^{i m γ}`.
pub fn wigner_q_matrix(n: u32, angles: &EulerAngles) -> DMatrix<Complex64> {
    let ni = n as i32;
    let dim = 2 * n as usize + 1;
    DMatrix::from_fn(dim, dim, |row, col| {
        let m = row as i32 - ni;
        let mp = col as i32 - ni;
        let d = wigner_d_small(n, mp, m, -angles.beta);
        Complex64::from_polar(d, mp as f64 * angles.alpha + m as f64 * angles.gamma)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{regular_solid_harmonic, HarmonicIndex};
    use crate::mesh::euler_rotation_matrix;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_angles(rng: &mut ChaCha8Rng) -> EulerAngles {
        EulerAngles::new(rng.random_range(-PI..PI), rng.random_range(0.0..PI), rng.random_range(-PI..PI))
    }

    #[test]
    fn zero_rotation() {
        for n in 0..=4 {
            for mp in -n..=n {
                for m in -n..=n {
                    let want = if mp == m { 1.0 } else { 0.0 };
                    assert!((wigner_d_small(n as u32, mp, m, 0.0) - want).abs() < 1e-15);
                }
            }
            let q = wigner_q_matrix(n as u32, &EulerAngles::identity());
            assert!((q.clone() - DMatrix::identity(q.nrows(), q.ncols())).norm() < 1e-15);
        }
    }

    #[test]
    fn d1_00_is_cosine() {
        for &b in &[0.0, 0.3, 1.2, 2.9] {
            assert!((wigner_d_small(1, 0, 0, b) - f64::cos(b)).abs() < 1e-15);
        }
    }

    #[test]
    fn d_columns_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 0..=5i32 {
            let b = rng.random_range(0.0..PI);
            for m1 in -n..=n {
                for m2 in -n..=n {
                    let s: f64 = (-n..=n)
                        .map(|mp| wigner_d_small(n as u32, mp, m1, b) * wigner_d_small(n as u32, mp, m2, b))
                        .sum();
                    let want = if m1 == m2 { 1.0 } else { 0.0 };
                    assert!((s - want).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn q_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = random_angles(&mut rng);
            for n in 0..=5 {
                let q = wigner_q_matrix(n, &a);
                let qq = &q * q.adjoint();
                assert!((qq - DMatrix::identity(q.nrows(), q.ncols())).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random_angles(&mut rng);
            let r = euler_rotation_matrix(&a);
            let xi = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                .normalize();
            for n in 0..=5u32 {
                let q = wigner_q_matrix(n, &a);
                for m in -(n as i32)..=n as i32 {
                    let lhs = regular_solid_harmonic(HarmonicIndex { n, m }, &(r * xi));
                    let rhs: Complex64 = (-(n as i32)..=n as i32)
                        .map(|mp| q[((m + n as i32) as usize, (mp + n as i32) as usize)] * regular_solid_harmonic(HarmonicIndex { n, m: mp }, &xi))
                        .sum();
                    assert!((lhs - rhs).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn euler_angles_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let a = random_angles(&mut rng);
            let r = euler_rotation_matrix(&a);
            let back = euler_rotation_matrix(&EulerAngles::from_rotation_matrix(&r));
            assert!((r - back).norm() < 1e-12);
        }
        for r in [Matrix3::identity(), euler_rotation_matrix(&EulerAngles::new(0.4, PI, -0.9))] {
            let back = euler_rotation_matrix(&EulerAngles::from_rotation_matrix(&r));
            assert!((r - back).norm() < 1e-12);
        }
    }
}
