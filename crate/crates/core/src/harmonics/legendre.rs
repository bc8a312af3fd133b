use crate::error::{Error, Result};

/// Associated Legendre (Ferrers) function `P_n^m(x)` for `0 <= m <= n`,
/// including the Condon–Shortley phase `(-1)^m`.
///
/// Evaluated with the standard upward recurrence in degree, which is stable
/// for the degrees used here (`n <= 30`).
pub fn assoc_legendre(n: u32, m: u32, x: f64) -> Result<f64> {
    if m > n {
        return Err(Error::invalid(format!("order {m} exceeds degree {n}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("argument {x} outside [-1, 1]")));
    }
    Ok(legendre_unchecked(n, m, x))
}

pub(crate) fn legendre_unchecked(n: u32, m: u32, x: f64) -> f64 {
    // P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
    let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut odd = 1.0;
    for _ in 0..m {
        pmm *= -odd * s;
        odd += 2.0;
    }
    if n == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = x * (2 * m + 1) as f64 * pmm;
    for l in (m + 2)..=n {
        let next = ((2 * l - 1) as f64 * x * p - (l + m - 1) as f64 * p_prev) / (l - m) as f64;
        p_prev = p;
        p = next;
    }
    p
}
