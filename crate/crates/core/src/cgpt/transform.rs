use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

use super::{CgptBlockMatrix, Provenance};
use crate::error::{Error, Result};
use crate::harmonics::{block_offset, g_matrix, harmonic_count, wigner_q_matrix, EulerAngles};
use crate::mesh::RigidScaleTransform;

/// Block lower-triangular `G(z)` with blocks `G_li(z)`, `1 <= i <= l <= order`.
pub fn shift_matrix_g(order: usize, z: &Vector3<f64>) -> DMatrix<Complex64> {
    let d = harmonic_count(order);
    let mut g = DMatrix::zeros(d, d);
    for l in 1..=order {
        for i in 1..=l {
            let b = g_matrix(l as u32, i as u32, z).expect("i <= l");
            g.view_mut((block_offset(l), block_offset(i)), b.shape()).copy_from(&b);
        }
    }
    g
}

/// Block diagonal `diag(s^n Q_n)`.
pub fn rotation_matrix_q(order: usize, angles: &EulerAngles, scale: f64) -> DMatrix<Complex64> {
    let d = harmonic_count(order);
    let mut q = DMatrix::zeros(d, d);
    for n in 1..=order {
        let b = wigner_q_matrix(n as u32, angles) * Complex64::from(scale.powi(n as i32));
        q.view_mut((block_offset(n), block_offset(n)), b.shape()).copy_from(&b);
    }
    q
}

fn sandwich(m: &CgptBlockMatrix, t: &DMatrix<Complex64>) -> CgptBlockMatrix {
    let full = t.conjugate() * m.full() * t.transpose();
    CgptBlockMatrix { full, ..m.clone() }.with_provenance(Provenance::Transformed)
}

/// `M_ln(sD) = s^{l+n+1} M_ln(D)`.
pub fn transform_scale(m: &CgptBlockMatrix, s: f64) -> Result<CgptBlockMatrix> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("scale must be positive, got {s}")));
    }
    let mut out = m.clone().with_provenance(Provenance::Transformed);
    for l in 1..=m.order() {
        for n in 1..=m.order() {
            let f = s.powi((l + n + 1) as i32);
            out.full.view_mut((block_offset(l), block_offset(n)), (2 * l + 1, 2 * n + 1)).scale_mut(f);
        }
    }
    Ok(out)
}

/// `M_ln(D + z) = Σ_{i<=l, ν<=n} conj(G_li(z)) M_iν(D) G_nν(z)^t`.
pub fn transform_shift(m: &CgptBlockMatrix, z: &Vector3<f64>) -> CgptBlockMatrix {
    sandwich(m, &shift_matrix_g(m.order(), z))
}

/// `M_ln(R D) = conj(Q_l) M_ln(D) Q_n^t`.
pub fn transform_rotate(m: &CgptBlockMatrix, angles: &EulerAngles) -> CgptBlockMatrix {
    sandwich(m, &rotation_matrix_q(m.order(), angles, 1.0))
}

/// CGPTs of `T(D) = {s R x + z : x ∈ D}`:
/// `s conj(G(z)) conj(Q(s,R)) M Q(s,R)^t G(z)^t` with `Q(s,R) = diag(s^n Q_n)`.
pub fn transform_full(m: &CgptBlockMatrix, t: &RigidScaleTransform) -> Result<CgptBlockMatrix> {
    if !(t.scale > 0.0 && t.scale.is_finite()) {
        return Err(Error::invalid(format!("scale must be positive, got {}", t.scale)));
    }
    let order = m.order();
    let gq = shift_matrix_g(order, &t.shift) * rotation_matrix_q(order, &t.angles, t.scale);
    let mut out = sandwich(m, &gq);
    out.full *= Complex64::from(t.scale);
    Ok(out)
}

