//! Log-Gamma for complex and real arguments.
//!
//! The Mellin-Barnes evaluator needs log Gamma(z) on vertical lines where
//! |Im z| reaches a few hundred, and the series paths need real log Gamma
//! with sign tracking for negative non-integer arguments. Both are served by
//! one scheme: upward recurrence until |z| >= 15, then the Stirling
//! asymptotic series
//!
//! ```text
//! ln Gamma(w) = (w - 1/2) ln w - w + ln(2 pi)/2 + sum_k c_k / w^(2k-1)
//! ```
//!
//! with ten Bernoulli-number coefficients (absolute error < 1e-22 on the
//! shifted argument), and the reflection formula for Re z < 1/2.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// c_k = B_{2k} / (2k (2k-1)) for the Stirling tail.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// |w| above which the Stirling series reaches full f64 accuracy.
const STIRLING_RADIUS: f64 = 15.0;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_74; // ln(2 pi)/2

// ---------------------------------------------------------------------------
// complex argument
// ---------------------------------------------------------------------------

/// Principal-branch log-Gamma of a complex argument.
///
/// Errors with `Pole` at nonpositive real integers and `Domain` for
/// non-finite input. `exp` of the result is Gamma(z) for every non-pole z.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!(
            "log_gamma requires a finite argument, got {z}"
        )));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole {
            function: "log_gamma",
            argument: z.re,
        });
    }
    if z.re < 0.5 {
        // Reflection: ln Gamma(z) = ln pi - ln sin(pi z) - ln Gamma(1 - z).
        let pi_ln = Complex64::new(std::f64::consts::PI.ln(), 0.0);
        return Ok(pi_ln - ln_sin_pi(z) - log_gamma_right(Complex64::new(1.0, 0.0) - z));
    }
    Ok(log_gamma_right(z))
}

/// Stirling-with-recurrence path; requires Re z >= 0.5.
fn log_gamma_right(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm_sqr() < STIRLING_RADIUS * STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

fn stirling(w: Complex64) -> Complex64 {
    let mut tail = Complex64::new(0.0, 0.0);
    let w2 = w * w;
    let mut p = w; // w^(2k-1)
    for (k, &c) in STIRLING.iter().enumerate() {
        if k > 0 {
            p *= w2;
        }
        tail += c / p;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_TWO_PI + tail
}

/// ln sin(pi z), stable for large |Im z| where sin overflows.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * std::f64::consts::PI;
    if w.im.abs() <= 1.0 {
        return w.sin().ln();
    }
    if w.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // Im w > 1: sin w = (i/2) e^{-iw} (1 - e^{2iw}), |e^{2iw}| <= e^{-2}.
    let i = Complex64::new(0.0, 1.0);
    let ln_i_half = Complex64::new(-std::f64::consts::LN_2, std::f64::consts::FRAC_PI_2);
    let correction = (Complex64::new(1.0, 0.0) - (2.0 * i * w).exp()).ln();
    ln_i_half - i * w + correction
}

// ---------------------------------------------------------------------------
// real argument
// ---------------------------------------------------------------------------

/// ln Gamma(x) for x > 0.
pub fn ln_gamma_pos(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "ln_gamma_pos requires x > 0, got {x}"
        )));
    }
    let mut w = x;
    let mut shift = 0.0;
    while w < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    let mut tail = 0.0;
    let w2 = w * w;
    let mut p = w;
    for (k, &c) in STIRLING.iter().enumerate() {
        if k > 0 {
            p *= w2;
        }
        tail += c / p;
    }
    Ok((w - 0.5) * w.ln() - w + HALF_LN_TWO_PI + tail - shift)
}

/// (ln |Gamma(x)|, sign of Gamma(x)) for any non-pole real x.
pub fn ln_gamma_sign(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "ln_gamma_sign requires a finite argument, got {x}"
        )));
    }
    if x > 0.0 {
        return Ok((ln_gamma_pos(x)?, 1.0));
    }
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(Error::Pole {
            function: "ln_gamma_sign",
            argument: x,
        });
    }
    // |Gamma(x)| = pi / (|sin(pi x)| Gamma(1-x)); sign(Gamma(x)) = sign(sin(pi x)).
    let s = sin_pi(x);
    let ln_abs = std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x)?;
    Ok((ln_abs, s.signum()))
}

/// Gamma(x) for non-pole real x; may overflow to +/-inf for large x.
pub fn gamma(x: f64) -> Result<f64> {
    let (ln_abs, sign) = ln_gamma_sign(x)?;
    Ok(sign * ln_abs.exp())
}

/// sin(pi x) with argument reduction so large |x| keeps full accuracy.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round(); // r in [-1, 1], x = 2k + r
    (std::f64::consts::PI * r).sin()
}

// ---------------------------------------------------------------------------
// Pochhammer symbols
// ---------------------------------------------------------------------------

/// Rising factorial (a)_n = a (a+1) ... (a+n-1); exact for n = 0 (-> 1).
pub fn pochhammer(a: f64, n: u32) -> f64 {
    let mut p = 1.0;
    for k in 0..n {
        p *= a + k as f64;
    }
    p
}

/// (ln |(a)_n|, sign), safe for large n where the product overflows.
pub fn ln_pochhammer(a: f64, n: u32) -> (f64, f64) {
    let mut ln_abs = 0.0;
    let mut sign = 1.0;
    for k in 0..n {
        let f = a + k as f64;
        if f == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        ln_abs += f.abs().ln();
        sign *= f.signum();
    }
    (ln_abs, sign)
}

// ---------------------------------------------------------------------------
