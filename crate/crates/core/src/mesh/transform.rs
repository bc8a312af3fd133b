use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::TriangleMesh;
use crate::error::{Error, Result};
use crate::harmonics::EulerAngles;

/// `R = Rz(γ) · [[cos β, 0, -sin β], [0, 1, 0], [sin β, 0, cos β]] · Rz(α)`.
pub fn euler_rotation_matrix(angles: &EulerAngles) -> Matrix3<f64> {
    let rz = |t: f64| {
        let (s, c) = t.sin_cos();
        Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
    };
    let (sb, cb) = angles.beta.sin_cos();
    let ry = Matrix3::new(cb, 0.0, -sb, 0.0, 1.0, 0.0, sb, 0.0, cb);
    rz(angles.gamma) * ry * rz(angles.alpha)
}

/// The map `x ↦ s R x + z`: rotate, then scale, then shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidScaleTransform {
    pub scale: f64,
    pub angles: EulerAngles,
    pub shift: Vector3<f64>,
}

impl Default for RigidScaleTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidScaleTransform {
    pub fn new(scale: f64, angles: EulerAngles, shift: Vector3<f64>) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { scale, angles, shift })
    }

    pub fn identity() -> Self {
        Self { scale: 1.0, angles: EulerAngles::identity(), shift: Vector3::zeros() }
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        euler_rotation_matrix(&self.angles)
    }

    pub fn apply(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.rotation() * x * self.scale + self.shift
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &RigidScaleTransform) -> RigidScaleTransform {
        let r = self.rotation();
        let rot = r * first.rotation();
        RigidScaleTransform {
            scale: self.scale * first.scale,
            angles: EulerAngles::from_rotation_matrix(&rot),
            shift: r * first.shift * self.scale + self.shift,
        }
    }

    pub fn inverse(&self) -> RigidScaleTransform {
        let rt = self.rotation().transpose();
        RigidScaleTransform {
            scale: 1.0 / self.scale,
            angles: EulerAngles::from_rotation_matrix(&rt),
            shift: -(rt * self.shift) / self.scale,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 1.0 && self.angles == EulerAngles::identity() && self.shift == Vector3::zeros()
    }
}

/// Map every vertex through `t`. Face connectivity and ordering are kept.
pub fn apply_transform(mesh: &TriangleMesh, t: &RigidScaleTransform) -> TriangleMesh {
    if t.is_identity() {
        return mesh.clone();
    }
    let r = t.rotation();
    let vertices = mesh.vertices().iter().map(|v| r * v * t.scale + t.shift).collect();
    // A similarity preserves every invariant the input already satisfied.
    TriangleMesh::build(vertices, mesh.triangles().to_vec()).expect("similarity of a valid mesh")
}
