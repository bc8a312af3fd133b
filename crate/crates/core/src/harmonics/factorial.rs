use std::sync::OnceLock;

const TABLE_LEN: usize = 171;

fn table() -> &'static ([f64; TABLE_LEN], [f64; TABLE_LEN]) {
    static TABLE: OnceLock<([f64; TABLE_LEN], [f64; TABLE_LEN])> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut fact = [1.0; TABLE_LEN];
        let mut ln = [0.0; TABLE_LEN];
        for k in 1..TABLE_LEN {
            fact[k] = fact[k - 1] * k as f64;
            ln[k] = fact[k].ln();
        }
        (fact, ln)
    })
}

/// `k!` as a float; finite for `k <= 170`.
pub fn factorial(k: usize) -> f64 {
    assert!(k < TABLE_LEN, "factorial argument {k} overflows f64");
    table().0[k]
}

/// `ln k!`, taken from the running-product table so each entry carries a
/// single rounding.
pub fn ln_factorial(k: usize) -> f64 {
    assert!(k < TABLE_LEN, "factorial argument {k} overflows f64");
    table().1[k]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_exact() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(factorial(20), 2_432_902_008_176_640_000.0);
        assert!((ln_factorial(10) - 3_628_800f64.ln()).abs() < 1e-15);
    }
}
