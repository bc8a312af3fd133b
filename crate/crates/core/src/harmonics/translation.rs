use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

use super::factorial::ln_factorial;
use super::ylm::{regular_solid_harmonic, HarmonicIndex};
use crate::error::{Error, Result};

fn in_window(nu: u32, mu: i32, n: u32, m: i32) -> bool {
    let (nu_i, n_i) = (nu as i32, n as i32);
    let lo = (-nu_i).max(nu_i - n_i + m);
    let hi = nu_i.min(-nu_i + n_i + m);
    nu <= n && m.abs() <= n_i && lo <= mu && mu <= hi
}

fn coeff_unchecked(nu: u32, mu: i32, n: u32, m: i32) -> f64 {
    let lf = |k: i32| ln_factorial(k as usize);
    let (nu, n) = (nu as i32, n as i32);
    let ln_num = (4.0 * PI * (2 * n + 1) as f64).ln() + lf(n - m) + lf(n + m);
    let ln_den = (((2 * n - 2 * nu + 1) * (2 * nu + 1)) as f64).ln()
        + lf(n - nu - m + mu)
        + lf(n - nu + m - mu)
        + lf(nu - mu)
        + lf(nu + mu);
    (0.5 * (ln_num - ln_den)).exp()
}

/// Coefficient `C_{νμnm}` of the addition theorem
/// `r'^n Y_n^m(y + z) = sum C_{νμnm} r_z^(n-ν) Y_{n-ν}^{m-μ}(z) r^ν Y_ν^μ(y)`.
///
/// Rejects `(ν, μ)` outside the summation window.
pub fn translation_coeff(nu: u32, mu: i32, n: u32, m: i32) -> Result<f64> {
    if !in_window(nu, mu, n, m) {
        return Err(Error::invalid(format!(
            "(nu, mu) = ({nu}, {mu}) outside the translation window of (n, m) = ({n}, {m})"
        )));
    }
    Ok(coeff_unchecked(nu, mu, n, m))
}

/// The `(2l+1) x (2i+1)` block `G_li(z)` with entries
/// `(G_li)_kj = C_{ijlk} r_z^(l-i) Y_{l-i}^{k-j}(z)`, zero outside the window.
pub fn g_matrix(l: u32, i: u32, z: &Vector3<f64>) -> Result<DMatrix<Complex64>> {
    if i > l {
        return Err(Error::invalid(format!("G_(l,i) needs l >= i, got l={l}, i={i}")));
    }
    let (li, ii) = (l as i32, i as i32);
    let mut g = DMatrix::zeros(2 * l as usize + 1, 2 * i as usize + 1);
    for k in -li..=li {
        for j in -ii..=ii {
            if !in_window(i, j, l, k) {
                continue;
            }
            let y = regular_solid_harmonic(HarmonicIndex { n: l - i, m: k - j }, z);
            g[((k + li) as usize, (j + ii) as usize)] = y * coeff_unchecked(i, j, l, k);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_coefficients() {
        for n in 0..=8u32 {
            for m in -(n as i32)..=n as i32 {
                let c = translation_coeff(n, m, n, m).unwrap();
                assert!((c - (4.0 * PI).sqrt()).abs() < 1e-13);
                let c0 = translation_coeff(0, 0, n, m).unwrap();
                assert!((c0 - (4.0 * PI).sqrt()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn window_violation_rejected() {
        assert!(translation_coeff(1, 1, 2, -2).is_err());
        assert!(translation_coeff(3, 0, 2, 0).is_err());
        assert!(g_matrix(1, 2, &Vector3::zeros()).is_err());
    }

    #[test]
    fn diagonal_blocks_are_identity() {
        let z = Vector3::new(0.3, -1.2, 0.8);
        for n in 0..=5 {
            let g = g_matrix(n, n, &z).unwrap();
            let id = DMatrix::<Complex64>::identity(g.nrows(), g.ncols());
            assert!((g - id).norm() < 1e-13);
        }
    }

    #[test]
    fn g21_on_the_z_axis() {
        let h = 0.7;
        let g = g_matrix(2, 1, &Vector3::new(0.0, 0.0, h)).unwrap();
        let mut want = DMatrix::<Complex64>::zeros(5, 3);
        want[(1, 0)] = Complex64::from(5f64.sqrt() * h);
        want[(2, 1)] = Complex64::from((20.0f64 / 3.0).sqrt() * h);
        want[(3, 2)] = Complex64::from(5f64.sqrt() * h);
        assert!((g - want).norm() < 1e-14);
    }

    fn exact_ratio(num: &[i32], den: &[i32]) -> f64 {
        use num_bigint::BigUint;
        let fact = |k: i32| (1..=k).fold(BigUint::from(1u32), |acc, j| acc * BigUint::from(j as u32));
        let (mut n, mut d) = (BigUint::from(1u32), BigUint::from(1u32));
        for &k in num {
            n *= fact(k);
        }
        for &k in den {
            d *= fact(k);
        }
        let digits = BigUint::from(10u32).pow(60);
        let q: f64 = ((n * digits) / d).to_string().parse().unwrap();
        q * 1e-60
    }

    #[test]
    fn matches_exact_factorials() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut checked = 0;
        while checked < 200 {
            let n = rng.random_range(0..=8u32);
            let nu = rng.random_range(0..=n);
            let m = rng.random_range(-(n as i32)..=n as i32);
            let mu = rng.random_range(-(nu as i32)..=nu as i32);
            let Ok(c) = translation_coeff(nu, mu, n, m) else { continue };
            let (n_i, nu_i) = (n as i32, nu as i32);
            let ratio = exact_ratio(
                &[n_i - m, n_i + m],
                &[n_i - nu_i - m + mu, n_i - nu_i + m - mu, nu_i - mu, nu_i + mu],
            );
            let want = (4.0 * PI * (2 * n + 1) as f64 / ((2 * n - 2 * nu + 1) * (2 * nu + 1)) as f64 * ratio).sqrt();
            assert!((c - want).abs() <= 1e-13 * want, "C({nu},{mu},{n},{m}) = {c}, exact {want}");
            checked += 1;
        }
    }

    #[test]
    fn g21_cartesian_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let i = Complex64::i();
        for _ in 0..100 {
            let z = Vector3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let (p, q, z3) = (z.x + i * z.y, z.x - i * z.y, Complex64::from(z.z));
            let zero = Complex64::default();
            let rows = [
                [-p, zero, zero],
                [z3, -p * 0.5f64.sqrt(), zero],
                [q * (1.0f64 / 6.0).sqrt(), z3 * (4.0f64 / 3.0).sqrt(), -p * (1.0f64 / 6.0).sqrt()],
                [zero, q * 0.5f64.sqrt(), z3],
                [zero, zero, q],
            ];
            let want = DMatrix::from_fn(5, 3, |r, c| rows[r][c] * 5f64.sqrt());
            let got = g_matrix(2, 1, &z).unwrap().map(|c| c.conj());
            assert!((got - want).camax() < 1e-13 * z.norm().max(1.0));
        }
    }

    #[test]
    fn addition_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let y = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let z = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            for n in 0..=4u32 {
                for m in -(n as i32)..=n as i32 {
                    let lhs = regular_solid_harmonic(HarmonicIndex { n, m }, &(y + z));
                    let mut rhs = Complex64::default();
                    for nu in 0..=n {
                        for mu in -(nu as i32)..=nu as i32 {
                            if let Ok(c) = translation_coeff(nu, mu, n, m) {
                                rhs += c
                                    * regular_solid_harmonic(HarmonicIndex { n: n - nu, m: m - mu }, &z)
                                    * regular_solid_harmonic(HarmonicIndex { n: nu, m: mu }, &y);
                            }
                        }
                    }
                    assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
                }
            }
        }
    }
}
