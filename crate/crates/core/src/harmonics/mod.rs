//! Spherical-harmonic machinery.
//!
//! Conventions used throughout the crate:
//!
//! * `Y_n^m(θ,φ) = (-1)^m sqrt((2n+1)/(4π) (n-m)!/(n+m)!) e^{imφ} P_n^m(cos θ)` where
//!   `P_n^m` is the Ferrers function *including* the Condon–Shortley phase, so
//!   the two signs cancel and `Y_1^1 = +sqrt(3/8π) sin θ e^{iφ}`.
//! * `Y_n^{-m} = (-1)^m conj(Y_n^m)`.
//! * Inside a degree-`n` block, order `m` lives at row/column `m + n`.
//! * Degree blocks `1..=K` are stacked degree-major, so block `l` starts at
//!   `l² - 1` and the stacked dimension is `K² + 2K`.

mod factorial;
mod green;
mod legendre;
mod solid;
mod translation;
mod wigner;
mod ylm;

pub use factorial::{factorial, ln_factorial};
pub use green::{fundamental_solution, gamma_series};
pub use legendre::assoc_legendre;
pub use solid::{solid_harmonic_coeffs, MonomialExpansion, MultiIndex, SolidHarmonicTable};
pub use translation::{g_matrix, translation_coeff};
pub use wigner::{wigner_d_small, wigner_q_matrix, EulerAngles};
pub use ylm::{regular_solid_harmonic, sph_harm, HarmonicIndex, SphericalPoint};

/// Highest degree for which the factorial-based formulas are supported.
pub const MAX_DEGREE: u32 = 30;

/// Number of harmonics with degree `1..=order`.
pub fn harmonic_count(order: usize) -> usize {
    order * order + 2 * order
}

/// Offset of degree block `l >= 1` in the stacked `1..=K` layout.
pub fn block_offset(l: usize) -> usize {
    debug_assert!(l >= 1);
    l * l - 1
}

/// Iterate `(n, m)` for degrees `1..=order` in stacked order.
pub fn stacked_indices(order: usize) -> impl Iterator<Item = HarmonicIndex> {
    (1..=order as u32).flat_map(|n| (-(n as i32)..=n as i32).map(move |m| HarmonicIndex { n, m }))
}
