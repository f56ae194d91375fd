//! Special functions underpinning the capacity formulas: log-Gamma on the
//! complex plane, the confluent and Gauss hypergeometric series, and the
//! Tricomi function. Everything is written to survive the parameter ranges
//! the capacity paths actually visit (first parameters in the hundreds,
//! exponents of order 1e3), which is why most functions have a log-space
//! variant alongside the plain one.

pub mod gamma;
pub mod gauss;
pub mod kummer;
pub mod tricomi;

pub use gamma::{gamma, ln_gamma_pos, ln_gamma_sign, ln_pochhammer, log_gamma, pochhammer};
pub use gauss::gauss_2f1;
pub use kummer::{kummer_1f1, ln_kummer_1f1};
pub use tricomi::{ln_tricomi_u, tricomi_u};

/// How a series summation went: attached to results so callers can surface
/// term counts and residual magnitudes in diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct SeriesDiagnostics {
    pub terms_used: usize,
    pub last_term_magnitude: f64,
    pub converged: bool,
}
