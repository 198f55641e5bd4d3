//! Numeric constants. Everything involving sqrt(2) derives from the one
//! `SQRT_2` below.

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// `1 + 2 sqrt2`, the cross-term coefficient of the semidefinite form.
pub const CROSS_COEFF: f64 = 1.0 + 2.0 * SQRT_2;

pub const SQRT2_PLUS_HALF: f64 = SQRT_2 + 0.5;
pub const SQRT2_MINUS_HALF: f64 = SQRT_2 - 0.5;

/// Universal lower bound on the spectral gap, `(9 - 4 sqrt2) / 7`.
pub const GAP_FLOOR: f64 = (9.0 - 4.0 * SQRT_2) / 7.0;

/// Conjectured universal floor, proved for abelian Cayley graphs.
pub const TWO_THIRDS: f64 = 2.0 / 3.0;

/// Spectral-gap floor for abelian Cayley graphs of odd order.
pub const ODD_CAYLEY_FLOOR: f64 = 0.718;
