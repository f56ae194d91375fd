//! Gauss hypergeometric function 2F1(a, b; c; z) for non-positive real z.
//!
//! Only the z <= 0 half-line is needed here (the asymptotic capacity formula
//! evaluates it at z = -mu kappa / m). The Pfaff transformation
//!
//! ```text
//! 2F1(a, b; c; z) = (1 - z)^(-a) 2F1(a, c - b; c; z / (z - 1))
//! ```
//!
//! maps z in (-inf, 0] onto w = z/(z-1) in [0, 1), where the defining series
//! converges geometrically for any parameter values, so no analytic
//! continuation machinery is required.

use crate::error::{Error, Result};
use crate::specfun::SeriesDiagnostics;

const MAX_TERMS: usize = 100_000;

/// 2F1(a, b; c; z) for z <= 0.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64, tol: f64) -> Result<(f64, SeriesDiagnostics)> {
    if !a.is_finite() || !b.is_finite() || !c.is_finite() || !z.is_finite() {
        return Err(Error::Domain(format!(
            "gauss_2f1 requires finite arguments, got a={a}, b={b}, c={c}, z={z}"
        )));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::Pole {
            function: "gauss_2f1",
            argument: c,
        });
    }
    if a == 0.0 || b == 0.0 {
        // Every term past n = 0 carries a factor (0)_n = 0.
        return Ok((
            1.0,
            SeriesDiagnostics {
                terms_used: 1,
                last_term_magnitude: 0.0,
                converged: true,
            },
        ));
    }
    if z > 0.0 {
        return Err(Error::Domain(format!(
            "gauss_2f1 is implemented for z <= 0 only, got z={z}"
        )));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!("gauss_2f1 requires tol > 0, got {tol}")));
    }

    // Pfaff: w in [0, 1); w -> 1 only as z -> -inf.
    let w = z / (z - 1.0);
    let b2 = c - b;
    let tol = tol.max(1e-16);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut small_streak = 0u32;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b2 + nf) / (c + nf) * w / (nf + 1.0);
        sum += term;
        if term.abs() <= tol * sum.abs() {
            small_streak += 1;
            if small_streak >= 2 {
                let prefactor = (1.0 - z).powf(-a);
                return Ok((
                    prefactor * sum,
                    SeriesDiagnostics {
                        terms_used: n + 1,
                        last_term_magnitude: (prefactor * term).abs(),
                        converged: true,
                    },
                ));
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::Convergence {
        context: "gauss_2f1 series",
        detail: format!("budget of {MAX_TERMS} terms exhausted (a={a}, b={b}, c={c}, z={z})"),
    })
}

// ---------------------------------------------------------------------------
