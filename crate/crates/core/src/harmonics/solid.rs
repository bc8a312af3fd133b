use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use super::factorial::{factorial, ln_factorial};
use super::ylm::HarmonicIndex;

/// Exponents `(a1, a2, a3)` of the monomial `x1^a1 x2^a2 x3^a3`.
pub type MultiIndex = [u32; 3];

/// A homogeneous polynomial `sum_α a_α x^α` of fixed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialExpansion {
    pub degree: u32,
    /// Nonzero coefficients sorted by multi-index.
    pub terms: Vec<(MultiIndex, Complex64)>,
}

fn binom(n: u32, k: u32) -> f64 {
    factorial(n as usize) / (factorial(k as usize) * factorial((n - k) as usize))
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Monomial coefficients of the regular solid harmonic `r^n Y_n^m`.
///
/// For `m >= 0`, `r^n Y_n^m = N (x + iy)^m sum_j c_j z^(n-m-2j) r^(2j)` where the
/// `c_j` are the coefficients of the m-th derivative of the Legendre
/// polynomial; negative orders follow from `Y_n^{-m} = (-1)^m conj(Y_n^m)`.
pub fn solid_harmonic_coeffs(idx: HarmonicIndex) -> MonomialExpansion {
    let n = idx.n;
    let m = idx.m.unsigned_abs();
    let norm = ((2 * n + 1) as f64 / (4.0 * PI)
        * (ln_factorial((n - m) as usize) - ln_factorial((n + m) as usize)).exp())
    .sqrt();

    let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    for j in 0..=(n - m) / 2 {
        let p = n - 2 * j;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let cj = sign * binom(n, j) * binom(2 * n - 2 * j, n) / 2f64.powi(n as i32) * factorial(p as usize)
            / factorial((p - m) as usize);
        let zpow = n - m - 2 * j;
        // (x + iy)^m
        for a in 0..=m {
            let xy = i_pow(m - a) * binom(m, a);
            // (x^2 + y^2 + z^2)^j
            for px in 0..=j {
                for py in 0..=(j - px) {
                    let pz = j - px - py;
                    let multinom =
                        factorial(j as usize) / (factorial(px as usize) * factorial(py as usize) * factorial(pz as usize));
                    let key = [a + 2 * px, (m - a) + 2 * py, zpow + 2 * pz];
                    *acc.entry(key).or_default() += xy * (cj * multinom);
                }
            }
        }
    }

    let scale = acc.values().map(|c| c.norm()).fold(0.0, f64::max);
    let mut terms: Vec<_> = acc
        .into_iter()
        .filter(|(_, c)| c.norm() > 1e-13 * scale)
        .map(|(k, c)| (k, c * norm))
        .collect();
    if idx.m < 0 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for (_, c) in terms.iter_mut() {
            *c = c.conj() * sign;
        }
    }
    MonomialExpansion { degree: n, terms }
}

fn powers(x: f64, max: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let mut v = 1.0;
    for _ in 0..=max {
        out.push(v);
        v *= x;
    }
    out
}

impl MonomialExpansion {
    pub fn coefficient(&self, alpha: MultiIndex) -> Complex64 {
        self.terms
            .binary_search_by(|(k, _)| k.cmp(&alpha))
            .map(|i| self.terms[i].1)
            .unwrap_or_default()
    }

    pub fn eval(&self, x: &Vector3<f64>) -> Complex64 {
        let d = self.degree;
        let (px, py, pz) = (powers(x.x, d), powers(x.y, d), powers(x.z, d));
        self.terms
            .iter()
            .map(|(a, c)| c * (px[a[0] as usize] * py[a[1] as usize] * pz[a[2] as usize]))
            .sum()
    }

    /// Exact polynomial gradient evaluated at `x`.
    pub fn gradient(&self, x: &Vector3<f64>) -> [Complex64; 3] {
        let d = self.degree;
        let p = [powers(x.x, d), powers(x.y, d), powers(x.z, d)];
        let mut g = [Complex64::default(); 3];
        for (a, c) in &self.terms {
            for (axis, slot) in g.iter_mut().enumerate() {
                if a[axis] == 0 {
                    continue;
                }
                let mut term = a[axis] as f64;
                for (b, pb) in p.iter().enumerate() {
                    let e = if b == axis { a[b] - 1 } else { a[b] };
                    term *= pb[e as usize];
                }
                *slot += c * term;
            }
        }
        g
    }

    pub fn conj(&self) -> Self {
        Self {
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
        }
    }
}

/// Solid harmonics `r^n Y_n^m` for all `1 <= n <= order`, in stacked order,
/// ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct SolidHarmonicTable {
    pub order: usize,
    pub expansions: Vec<MonomialExpansion>,
}

impl SolidHarmonicTable {
    pub fn new(order: usize) -> Self {
        let expansions = super::stacked_indices(order).map(solid_harmonic_coeffs).collect();
        Self { order, expansions }
    }

    pub fn len(&self) -> usize {
        self.expansions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expansions.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::regular_solid_harmonic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degree_zero_and_one() {
        let e = solid_harmonic_coeffs(HarmonicIndex::new(0, 0).unwrap());
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].0, [0, 0, 0]);
        assert!((e.terms[0].1.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);

        let e = solid_harmonic_coeffs(HarmonicIndex::new(1, 0).unwrap());
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].0, [0, 0, 1]);
        assert!((e.terms[0].1.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pointwise_agreement_with_sph_harm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 0..=4u32 {
            for m in -(n as i32)..=n as i32 {
                let idx = HarmonicIndex::new(n, m).unwrap();
                let e = solid_harmonic_coeffs(idx);
                for _ in 0..100 {
                    let x = Vector3::new(
                        rng.random_range(-1.5..1.5),
                        rng.random_range(-1.5..1.5),
                        rng.random_range(-1.5..1.5),
                    );
                    let want = regular_solid_harmonic(idx, &x);
                    let got = e.eval(&x);
                    assert!((got - want).norm() <= 1e-12 * want.norm().max(1e-3), "{idx:?} {x:?}");
                }
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let x = Vector3::new(0.3, -0.7, 0.45);
        let h = 1e-6;
        for idx in crate::harmonics::stacked_indices(4) {
            let e = solid_harmonic_coeffs(idx);
            let g = e.gradient(&x);
            for axis in 0..3 {
                let mut d = Vector3::zeros();
                d[axis] = h;
                let fd = (e.eval(&(x + d)) - e.eval(&(x - d))) / (2.0 * h);
                assert!((fd - g[axis]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn expansions_are_harmonic() {
        // The Laplacian of a homogeneous polynomial, collected coefficientwise.
        for n in 2..=8u32 {
            for m in -(n as i32)..=n as i32 {
                let e = solid_harmonic_coeffs(HarmonicIndex::new(n, m).unwrap());
                let mut lap: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
                for (a, c) in &e.terms {
                    for axis in 0..3 {
                        if a[axis] >= 2 {
                            let mut b = *a;
                            b[axis] -= 2;
                            *lap.entry(b).or_default() += c * (a[axis] * (a[axis] - 1)) as f64;
                        }
                    }
                }
                let scale = e.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
                for v in lap.values() {
                    assert!(v.norm() < 1e-12 * scale * (n * n) as f64, "n={n} m={m}");
                }
            }
        }
    }
}
