//! Multistatic response matrices: simulation, synthesis from CGPTs and
//! least-squares CGPT estimation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cgpt::{CgptBlockMatrix, Provenance};
use crate::error::{Error, Result};
use crate::harmonics::{block_offset, harmonic_count, sph_harm, stacked_indices, SphericalPoint};
use crate::mesh::{QuadratureRule, TriangleMesh};
use crate::np_solver::{check_exterior, BoundaryDensity, NpOperator};

/// Coincident sources and receivers on a sphere centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorArray {
    positions: Vec<Vector3<f64>>,
    radius: f64,
}

impl SensorArray {
    /// `count` points on the sphere of radius `radius` along a Fibonacci spiral.
    pub fn fibonacci(count: usize, radius: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("sensor array needs at least one sensor"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("sensor radius must be positive, got {radius}")));
        }
        let golden = PI * (3.0 - 5f64.sqrt());
        let positions = (0..count)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / count as f64;
                let rho = (1.0 - z * z).sqrt();
                let (s, c) = (golden * i as f64).sin_cos();
                Vector3::new(rho * c, rho * s, z) * radius
            })
            .collect();
        Ok(Self { positions, radius })
    }

    /// Explicit positions, all at distance `radius` from the origin.
    pub fn from_positions(positions: Vec<Vector3<f64>>, radius: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("sensor array needs at least one sensor"));
        }
        if let Some(i) = positions.iter().position(|p| (p.norm() - radius).abs() > 1e-9 * radius) {
            return Err(Error::invalid(format!(
                "sensor {i} lies at distance {} from the origin, expected {radius}",
                positions[i].norm()
            )));
        }
        Ok(Self { positions, radius })
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// The multipole expansion behind `V = Y M Y*` needs every sensor
    /// farther from the origin than any point of the target.
    pub fn check_encloses(&self, mesh: &TriangleMesh) -> Result<()> {
        let r = mesh.circumradius();
        if self.radius <= r {
            return Err(Error::invalid(format!(
                "sensor radius {} does not exceed the target circumradius {r}",
                self.radius
            )));
        }
        Ok(())
    }
}

/// A measured or simulated response matrix, receiver-major: `V[(r, s)]` is
/// the field of source `s` at receiver `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct MsrDataset {
    pub sensors: SensorArray,
    pub v: DMatrix<f64>,
    pub sigma: f64,
    pub seed: Option<u64>,
}

impl MsrDataset {
    /// `‖V - Vᵗ‖_F / ‖V‖_F`.
    pub fn reciprocity_defect(&self) -> f64 {
        let n = self.v.norm();
        if n == 0.0 {
            0.0
        } else {
            (&self.v - self.v.transpose()).norm() / n
        }
    }

    pub fn to_json(&self) -> MsrJson {
        MsrJson {
            schema: 1,
            sensors: self.sensors.positions.iter().map(|p| [p.x, p.y, p.z]).collect(),
            radius: self.sensors.radius,
            v: (0..self.v.nrows()).map(|i| self.v.row(i).iter().copied().collect()).collect(),
            sigma: self.sigma,
            seed: self.seed,
        }
    }

    pub fn from_json(j: &MsrJson) -> Result<Self> {
        if j.schema != 1 {
            return Err(Error::invalid(format!("unsupported MSR schema {}", j.schema)));
        }
        let n = j.sensors.len();
        if j.v.len() != n || j.v.iter().any(|row| row.len() != n) {
            return Err(Error::invalid(format!("MSR matrix must be {n}x{n}")));
        }
        let sensors =
            SensorArray::from_positions(j.sensors.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect(), j.radius)?;
        Ok(Self { sensors, v: DMatrix::from_fn(n, n, |r, s| j.v[r][s]), sigma: j.sigma, seed: j.seed })
    }
}

/// On-disk form of an [`MsrDataset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsrJson {
    pub schema: u32,
    pub sensors: Vec<[f64; 3]>,
    pub radius: f64,
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
    pub sigma: f64,
    pub seed: Option<u64>,
}

impl Serialize for MsrDataset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MsrDataset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Self::from_json(&MsrJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `V_rs = S_D[φ_s](x_r)` with `(λI - K*_D) φ_s = ∂Γ(· - x_s)/∂ν`, one
/// factorization shared by all sources.
///
/// The source data are made flux-free before solving, as the exact normal
/// derivative of a function harmonic inside `D` is.
pub fn simulate_msr(mesh: &TriangleMesh, lambda: f64, sensors: &SensorArray, rule: QuadratureRule) -> Result<MsrDataset> {
    let op = NpOperator::assemble(mesh, rule)?;
    simulate_msr_with(&op, mesh.max_edge(), lambda, sensors)
}

/// [`simulate_msr`] on an already assembled operator with mesh width `h`.
pub fn simulate_msr_with(op: &NpOperator, h: f64, lambda: f64, sensors: &SensorArray) -> Result<MsrDataset> {
    let quad = op.quadrature();
    for x in sensors.positions() {
        check_exterior(quad, h, x)?;
    }
    let rhs: Vec<_> = sensors
        .positions()
        .iter()
        .map(|xs| {
            let values = quad
                .points
                .iter()
                .zip(&quad.normals)
                .map(|(y, nu)| {
                    let d = y - xs;
                    let r = d.norm();
                    Complex64::from(d.dot(nu) / (4.0 * PI * r * r * r))
                })
                .collect();
            BoundaryDensity { values, weights: quad.weights.clone() }.with_integral(Complex64::default())
        })
        .collect();
    let phi = op.resolvent(lambda)?.solve_many(&rhs)?;
    let nodes = quad.len();
    let n = sensors.len();
    let gamma = DMatrix::from_fn(n, nodes, |r, j| {
        -quad.weights[j] / (4.0 * PI * (sensors.positions()[r] - quad.points[j]).norm())
    });
    let dens = DMatrix::from_fn(nodes, n, |j, s| phi[s].values[j].re);
    Ok(MsrDataset { sensors: sensors.clone(), v: gamma * dens, sigma: 0.0, seed: None })
}

/// `Y[(r, (l,k))] = Y_l^k(θ_r, φ_r) / ((2l+1) r_r^{l+1})`, degree-major
/// columns.
pub fn build_y(sensors: &SensorArray, order: usize) -> DMatrix<Complex64> {
    let idx: Vec<_> = stacked_indices(order).collect();
    DMatrix::from_fn(sensors.len(), harmonic_count(order), |r, c| {
        let sp = SphericalPoint::from_cartesian(&sensors.positions()[r]);
        let l = idx[c].n;
        sph_harm(idx[c], sp.theta, sp.phi) / ((2 * l + 1) as f64 * sp.r.powi(l as i32 + 1))
    })
}

/// `V = Y M Y*`. The product is real for Hermitian `M`; its real part is kept.
pub fn msr_from_cgpt(m: &CgptBlockMatrix, sensors: &SensorArray) -> MsrDataset {
    let y = build_y(sensors, m.order());
    let v = &y * m.full() * y.adjoint();
    MsrDataset { sensors: sensors.clone(), v: v.map(|z| z.re), sigma: 0.0, seed: None }
}

/// Default relative singular-value cutoff of [`estimate_cgpt`].
pub const DEFAULT_RCOND: f64 = 1e-10;

/// Least-squares CGPTs `M̂ = Y⁺ V (Y*)⁺` of order `order` from an MSR matrix.
///
/// Singular values of `Y` below `rcond · s_max` count as lost rank; the
/// estimate is refused and the error names the degree block whose columns
/// the lost directions live in.
pub fn estimate_cgpt(data: &MsrDataset, order: usize, lambda: f64, rcond: f64) -> Result<CgptBlockMatrix> {
    let d = harmonic_count(order);
    let n = data.sensors.len();
    if n < d {
        return Err(Error::invalid(format!("order {order} needs at least {d} sensors, got {n}")));
    }
    if data.v.shape() != (n, n) {
        return Err(Error::invalid(format!("MSR matrix must be {n}x{n}")));
    }
    let y = build_y(&data.sensors, order);
    let svd = y.svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let s_max = svd.singular_values.max();
    if let Some(k) = svd.singular_values.iter().position(|&s| !(s > rcond * s_max)) {
        let dir = vt.row(k);
        let degree = (1..=order)
            .max_by(|&a, &b| {
                let e = |l: usize| (0..2 * l + 1).map(|i| dir[block_offset(l) + i].norm_sqr()).sum::<f64>();
                e(a).total_cmp(&e(b))
            })
            .expect("order >= 1");
        return Err(Error::numerical(format!(
            "sensor matrix is rank deficient (singular value {:.3e} below {rcond:e} x {s_max:.3e}); degree block {degree} cannot be resolved",
            svd.singular_values[k]
        )));
    }
    let s_inv = DMatrix::from_diagonal(&svd.singular_values.map(|s| Complex64::from(1.0 / s)));
    let pinv = vt.adjoint() * s_inv * u.adjoint();
    let vc = data.v.map(Complex64::from);
    let m = &pinv * vc * pinv.adjoint();
    CgptBlockMatrix::from_full(order, lambda, Provenance::Estimated, m)
}

/// `V + σ ‖V‖_F / N · G` with `G` i.i.d. standard normal drawn from a
/// seeded ChaCha stream.
pub fn add_noise(data: &MsrDataset, sigma: f64, seed: u64) -> Result<MsrDataset> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("noise level must be non-negative, got {sigma}")));
    }
    let n = data.sensors.len();
    let amp = sigma * data.v.norm() / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = data.v.clone();
    if sigma > 0.0 {
        for r in 0..n {
            for s in 0..n {
                let g: f64 = StandardNormal.sample(&mut rng);
                v[(r, s)] += amp * g;
            }
        }
    }
    Ok(MsrDataset { sensors: data.sensors.clone(), v, sigma, seed: Some(seed) })
}
