//! Bivariate Mellin-Barnes contour integration.
//!
//! The exact capacity path reduces the fading average to a double contour
//! integral of Gamma functions — a bivariate Meijer-type kernel
//!
//! ```text
//! K(s, t) = Gamma(mu+s+t) Gamma(-s) Gamma(A+s) Gamma(-t) Gamma(mu-m+t)
//!           / Gamma(mu+t) * x^s y^t
//! ```
//!
//! integrated over two vertical lines s = c_s + i sigma, t = c_t + i tau:
//!
//! ```text
//! G = 1/(4 pi^2) int int K(s, t) d sigma d tau.
//! ```
//!
//! The lines must separate the right pole families (Gamma(-s) at s >= 0,
//! Gamma(-t) at t >= 0) from the left ones (Gamma(A+s), Gamma(mu-m+t),
//! Gamma(mu+s+t)); such lines exist iff m < mu. When they do not — or the
//! separating strip is too thin for the trapezoid rule to converge — the
//! t-contour is closed rightward over the poles of Gamma(-t), turning G into
//! a residue series of one-dimensional line integrals; that series converges
//! when y < 1 and its divergence is detected by a ratio test rather than
//! assumed away.
//!
//! The double sum exploits separability: K = Gamma(mu+s+t) u(s) v(t), so on
//! a uniform grid all Gamma evaluations collapse into three precomputed
//! arrays (u on the s-line, v on the t-line, and the joint factor, which
//! depends only on sigma + tau) and the quadratic-cost inner loop is one
//! complex exponential per node pair. Everything is accumulated relative to
//! the peak log magnitude, so parameters like A = 1000 — where the kernel
//! scale dwarfs f64 range — stay representable.

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::logspace::SignedLog;
use crate::quad::integrate_segment;
use crate::specfun::gamma::{ln_gamma_pos, ln_gamma_sign, log_gamma};
use crate::specfun::SeriesDiagnostics;
use num_complex::Complex64;

/// Minimum distance from a contour to the nearest kernel pole; thinner
/// strips make the trapezoid rule converge too slowly to be worth running.
pub const MIN_POLE_DIST: f64 = 0.02;

/// mu - m closer than this to a nonpositive integer puts a Gamma pole onto
/// (or a near-pole next to) the residue structure, so such instances are
/// rejected; the capacity series handles them instead.
pub const PREFACTOR_POLE_GUARD: f64 = 1e-6;

/// Total kernel-pair budget across the refinement ladder.
const KERNEL_EVAL_BUDGET: u64 = 50_000_000;

/// Grid-doubling cap for the contour evaluation.
const MAX_REFINEMENTS: usize = 4;

/// Residue-series term budget.
const MAX_RESIDUE_TERMS: usize = 400;

/// Residue line integrals are truncated where the integrand has decayed; a
/// required span beyond this means the parameters (large A plus high order)
/// are outside this route's profile and the caller should use the series.
const RESIDUE_SPAN_LIMIT: f64 = 300.0;

const PI: f64 = std::f64::consts::PI;

// ---------------------------------------------------------------------------
// instance and contour
// ---------------------------------------------------------------------------

/// One fully validated (mu, m, A, x, y) kernel instance.
#[derive(Debug, Clone, Copy)]
pub struct EgbmgfInstance {
    mu: f64,
    m: f64,
    a_cap: f64,
    x: f64,
    y: f64,
}

impl EgbmgfInstance {
    pub fn new(mu: f64, m: f64, a_cap: f64, x: f64, y: f64) -> Result<Self> {
        for (name, v, min_open) in [
            ("mu", mu, 0.0),
            ("m", m, 0.0),
            ("A", a_cap, 0.0),
            ("x", x, 0.0),
            ("y", y, 0.0),
        ] {
            if !v.is_finite() || v <= min_open {
                return Err(Error::Domain(format!(
                    "kernel instance requires {name} finite and > {min_open}, got {v}"
                )));
            }
        }
        let d = mu - m;
        let nearest = d.round();
        if nearest <= 0.0 && (d - nearest).abs() < PREFACTOR_POLE_GUARD {
            return Err(Error::Domain(format!(
                "mu - m = {d} sits within {PREFACTOR_POLE_GUARD} of a nonpositive integer, \
                 where the kernel's pole structure degenerates; evaluate via the series route"
            )));
        }
        Ok(Self { mu, m, a_cap, x, y })
    }

    /// Instance for the capacity average of `params` at delay exponent `a_cap`:
    /// x = (mu kappa + m) gbar / (m mu (1+kappa)), y = mu kappa / m.
    pub fn from_channel(params: &ChannelParams, a_cap: f64) -> Result<Self> {
        let (kappa, mu, m) = (params.kappa(), params.mu(), params.m());
        let gbar = params.mean_snr();
        Self::new(
            mu,
            m,
            a_cap,
            (mu * kappa + m) * gbar / (m * mu * (1.0 + kappa)),
            mu * kappa / m,
        )
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn a_cap(&self) -> f64 {
        self.a_cap
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Placement and resolution of the two integration lines.
#[derive(Debug, Clone, Copy)]
pub struct ContourSpec {
    /// Real part of the s-line; must lie in (-A, 0).
    pub c_s: f64,
    /// Real part of the t-line; must lie in (m - mu, 0) with mu+c_s+c_t > 0.
    pub c_t: f64,
    /// Lines are truncated at |Im| = half_length.
    pub half_length: f64,
    /// Trapezoid nodes per unit of imaginary length (doubled on refinement).
    pub nodes_per_unit: u32,
}

impl ContourSpec {
    /// Default contour for an instance: each line bisects its separating
    /// strip. Fails with `PoleSeparation` when no strip of usable width
    /// exists (m >= mu, or A so small the strip collapses).
    pub fn for_instance(inst: &EgbmgfInstance) -> Result<Self> {
        let c_s = -0.5 * inst.a_cap.min(inst.mu);
        let left_t = (inst.m - inst.mu).max(-inst.mu - c_s);
        if left_t >= 0.0 {
            return Err(Error::PoleSeparation {
                detail: format!(
                    "no separating t-contour: left pole boundary {left_t} >= 0 \
                     (mu = {}, m = {}; requires m < mu)",
                    inst.mu, inst.m
                ),
            });
        }
        let spec = Self {
            c_s,
            c_t: 0.5 * left_t,
            half_length: 40.0,
            nodes_per_unit: 8,
        };
        spec.validate_for(inst)?;
        Ok(spec)
    }

    /// Check that this contour actually separates the pole families of the
    /// instance with at least `MIN_POLE_DIST` of clearance.
    pub fn validate_for(&self, inst: &EgbmgfInstance) -> Result<()> {
        if !self.c_s.is_finite() || !self.c_t.is_finite() || !self.half_length.is_finite() {
            return Err(Error::Domain("contour parameters must be finite".into()));
        }
        if self.half_length < 5.0 || self.nodes_per_unit < 2 {
            return Err(Error::Domain(format!(
                "contour resolution too coarse: half_length {} (need >= 5), \
                 nodes_per_unit {} (need >= 2)",
                self.half_length, self.nodes_per_unit
            )));
        }
        let clearances = [
            ("s-line to Gamma(-s) poles", -self.c_s),
            ("s-line to Gamma(A+s) poles", inst.a_cap + self.c_s),
            ("t-line to Gamma(-t) poles", -self.c_t),
            ("t-line to Gamma(mu-m+t) poles", self.c_t - (inst.m - inst.mu)),
            ("lines to Gamma(mu+s+t) poles", inst.mu + self.c_s + self.c_t),
        ];
        for (what, d) in clearances {
            if d < MIN_POLE_DIST {
                return Err(Error::PoleSeparation {
                    detail: format!("{what}: clearance {d:.4} below the minimum {MIN_POLE_DIST}"),
                });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// kernel
// ---------------------------------------------------------------------------

/// Complex log of the kernel at (s, t).
pub fn egbmgf_kernel_ln(inst: &EgbmgfInstance, s: Complex64, t: Complex64) -> Result<Complex64> {
    let mu = inst.mu;
    Ok(log_gamma(Complex64::new(mu, 0.0) + s + t)?
        + log_gamma(-s)?
        + log_gamma(Complex64::new(inst.a_cap, 0.0) + s)?
        + log_gamma(-t)?
        + log_gamma(Complex64::new(mu - inst.m, 0.0) + t)?
        - log_gamma(Complex64::new(mu, 0.0) + t)?
        + s * inst.x.ln()
        + t * inst.y.ln())
}

/// The kernel itself; overflows for scales beyond f64 — `egbmgf_kernel_ln`
/// is the robust form.
pub fn egbmgf_kernel(inst: &EgbmgfInstance, s: Complex64, t: Complex64) -> Result<Complex64> {
    Ok(egbmgf_kernel_ln(inst, s, t)?.exp())
}

// ---------------------------------------------------------------------------
// double-contour evaluation
// ---------------------------------------------------------------------------

/// How a contour evaluation went.
#[derive(Debug, Clone, Copy)]
pub struct EvalDiagnostics {
    /// Grid doublings performed beyond the initial grid.
    pub refinements: usize,
    /// Total kernel node pairs summed across all grids.
    pub kernel_evaluations: u64,
    /// |Im| / |Re| of the final double sum; should sit at round-off level,
    /// since the exact integral is real.
    pub imag_ratio: f64,
    /// Relative difference between the last two grids.
    pub last_delta: f64,
    pub converged: bool,
}

/// G in signed-log form, with grid refinement until two successive grids
/// agree to `tol` (relative).
pub fn egbmgf_eval_ln(
    inst: &EgbmgfInstance,
    contour: Option<&ContourSpec>,
    tol: f64,
) -> Result<(SignedLog, EvalDiagnostics)> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!("egbmgf_eval requires tol > 0, got {tol}")));
    }
    let base = match contour {
        Some(c) => {
            c.validate_for(inst)?;
            *c
        }
        None => ContourSpec::for_instance(inst)?,
    };
    let mut total_pairs = 0u64;
    let mut prev: Option<SignedLog> = None;
    let mut last_imag = f64::NAN;
    let mut last_delta = f64::INFINITY;
    for refinement in 0..=MAX_REFINEMENTS {
        let npu = base.nodes_per_unit << refinement;
        let n = (base.half_length * npu as f64).round() as i64;
        let pairs = (2 * n as u64 + 1).pow(2);
        if total_pairs + pairs > KERNEL_EVAL_BUDGET {
            break;
        }
        let (value, imag_ratio) = contour_grid_sum(inst, &base, npu)?;
        total_pairs += pairs;
        last_imag = imag_ratio;
        if let Some(p) = prev {
            last_delta = signed_log_rel_diff(value, p);
            if last_delta <= tol {
                return Ok((
                    value,
                    EvalDiagnostics {
                        refinements: refinement,
                        kernel_evaluations: total_pairs,
                        imag_ratio,
                        last_delta,
                        converged: true,
                    },
                ));
            }
        }
        prev = Some(value);
    }
    Err(Error::Convergence {
        context: "egbmgf contour refinement",
        detail: format!(
            "grids did not agree to {tol:.1e} within the evaluation budget \
             (last delta {last_delta:.3e}, imag ratio {last_imag:.3e}); \
             the pole clearance is likely too small for trapezoid convergence"
        ),
    })
}

/// Plain-f64 wrapper around [`egbmgf_eval_ln`].
pub fn egbmgf_eval(
    inst: &EgbmgfInstance,
    contour: Option<&ContourSpec>,
    tol: f64,
) -> Result<(f64, EvalDiagnostics)> {
    let (v, d) = egbmgf_eval_ln(inst, contour, tol)?;
    Ok((v.value(), d))
}

/// One trapezoid grid: separable precomputation, then the pairwise sum.
fn contour_grid_sum(
    inst: &EgbmgfInstance,
    spec: &ContourSpec,
    npu: u32,
) -> Result<(SignedLog, f64)> {
    let h = 1.0 / npu as f64;
    let n = (spec.half_length * npu as f64).round() as i64;
    let ln_x = inst.x.ln();
    let ln_y = inst.y.ln();
    let mu = Complex64::new(inst.mu, 0.0);
    let a_cap = Complex64::new(inst.a_cap, 0.0);
    let mu_minus_m = Complex64::new(inst.mu - inst.m, 0.0);

    // ln u(s) on the s-line, ln v(t) on the t-line, and the joint factor
    // ln Gamma(mu + s + t), which depends only on sigma + tau = (i + j) h.
    let mut lu = Vec::with_capacity((2 * n + 1) as usize);
    let mut lv = Vec::with_capacity((2 * n + 1) as usize);
    let mut lg = Vec::with_capacity((4 * n + 1) as usize);
    for i in -n..=n {
        let s = Complex64::new(spec.c_s, i as f64 * h);
        lu.push(log_gamma(-s)? + log_gamma(a_cap + s)? + s * ln_x);
        let t = Complex64::new(spec.c_t, i as f64 * h);
        lv.push(log_gamma(-t)? + log_gamma(mu_minus_m + t)? - log_gamma(mu + t)? + t * ln_y);
    }
    for q in -2 * n..=2 * n {
        lg.push(log_gamma(Complex64::new(
            inst.mu + spec.c_s + spec.c_t,
            q as f64 * h,
        ))?);
    }

    // Peak-relative scaling: max_i Re lu + max_j Re lv + max_q Re lg bounds
    // every pair's Re from above, so each exp stays in [0, 1].
    let peak = |xs: &[Complex64]| xs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let scale = peak(&lu) + peak(&lv) + peak(&lg);

    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &lui) in lu.iter().enumerate() {
        for (j, &lvj) in lv.iter().enumerate() {
            let e = lui + lvj + lg[i + j];
            acc += Complex64::from_polar((e.re - scale).exp(), e.im);
        }
    }
    let sum = acc * Complex64::new(h * h / (4.0 * PI * PI), 0.0);
    if !(sum.re > 0.0) {
        return Err(Error::Convergence {
            context: "egbmgf contour sum",
            detail: format!(
                "real part {:.3e} lost positivity (grid npu = {npu}); \
                 the value is dominated by cancellation at this resolution",
                sum.re
            ),
        });
    }
    let imag_ratio = sum.im.abs() / sum.re;
    Ok((SignedLog::from_value(sum.re).scale_ln(scale), imag_ratio))
}

/// |a/b - 1| for two signed-log values; infinite when the signs differ.
fn signed_log_rel_diff(a: SignedLog, b: SignedLog) -> f64 {
    if a.sign != b.sign {
        return f64::INFINITY;
    }
    if a.is_zero() && b.is_zero() {
        return 0.0;
    }
    ((a.ln_abs - b.ln_abs).exp() - 1.0).abs()
}

// ---------------------------------------------------------------------------
// residue series
// ---------------------------------------------------------------------------

/// G as a series of residues at the poles of Gamma(-t):
///
/// ```text
/// G = sum_n (-1)^n y^n / n! * Gamma(mu-m+n) / Gamma(mu+n) * S_n,
/// S_n = (1/pi) int_0^inf Re[ Gamma(mu+n+s) Gamma(-s) Gamma(A+s) x^s ],
/// ```
///
/// with s = c + i sigma. Converges for y < 1 (geometric ratio y); a ratio
/// test reports `Divergent` otherwise instead of summing garbage.
pub fn egbmgf_residue_series_ln(
    inst: &EgbmgfInstance,
    tol: f64,
) -> Result<(SignedLog, SeriesDiagnostics)> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!(
            "egbmgf_residue_series requires tol > 0, got {tol}"
        )));
    }
    let c = -0.5 * inst.a_cap.min(inst.mu);
    if -c < MIN_POLE_DIST {
        return Err(Error::PoleSeparation {
            detail: format!(
                "s-line clearance {:.4} below the minimum {MIN_POLE_DIST} (A = {})",
                -c, inst.a_cap
            ),
        });
    }
    let ln_y = inst.y.ln();
    let ln_tol = tol.max(1e-15).ln();
    let growth_trigger = 1.02f64.ln();
    let mut sum = SignedLog::ZERO;
    let mut prev_magnitude = f64::INFINITY;
    let mut growth_streak = 0u32;
    let mut small_streak = 0u32;
    for n in 0..MAX_RESIDUE_TERMS {
        let nf = n as f64;
        let s_n = residue_line_integral(inst, c, nf, tol * 0.1)?;
        let (ln_num, sign_num) = ln_gamma_sign(inst.mu - inst.m + nf)?;
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = SignedLog::from_ln(
            nf * ln_y - ln_gamma_pos(nf + 1.0)? + ln_num - ln_gamma_pos(inst.mu + nf)?,
            parity * sign_num,
        );
        let term = coeff.mul(s_n);
        sum = sum.add(term);
        // Geometric tail bound: the magnitude ratio approaches y (possibly
        // from below), so tail <= |term| * r / (1 - r) with r covering both
        // the observed ratio and y.
        let ratio = (term.ln_abs - prev_magnitude)
            .exp()
            .max(inst.y)
            .min(0.999);
        let ln_tail = term.ln_abs + (ratio / (1.0 - ratio)).ln();
        if ln_tail <= ln_tol + sum.ln_abs {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok((
                    sum,
                    SeriesDiagnostics {
                        terms_used: n + 1,
                        last_term_magnitude: (term.ln_abs - sum.ln_abs).exp(),
                        converged: true,
                    },
                ));
            }
        } else {
            small_streak = 0;
        }
        if n >= 8 && term.ln_abs - prev_magnitude > growth_trigger {
            growth_streak += 1;
            if growth_streak >= 3 {
                return Err(Error::Divergent {
                    context: "egbmgf residue series",
                    term_ratio: (term.ln_abs - prev_magnitude).exp(),
                });
            }
        } else {
            growth_streak = 0;
        }
        prev_magnitude = term.ln_abs;
    }
    Err(Error::Convergence {
        context: "egbmgf residue series",
        detail: format!(
            "no convergence within {MAX_RESIDUE_TERMS} terms (y = {}, tol = {tol:.1e})",
            inst.y
        ),
    })
}

/// Plain-f64 wrapper around [`egbmgf_residue_series_ln`].
pub fn egbmgf_residue_series(
    inst: &EgbmgfInstance,
    tol: f64,
) -> Result<(f64, SeriesDiagnostics)> {
    let (v, d) = egbmgf_residue_series_ln(inst, tol)?;
    Ok((v.value(), d))
}

/// S_n of the residue series, in signed-log form. The integrand is scaled by
/// its value at sigma = 0 (its modulus peak: every |Gamma| factor decreases
/// away from the real axis and |x^s| is constant), so the quadrature sees an
/// O(1) function.
fn residue_line_integral(
    inst: &EgbmgfInstance,
    c: f64,
    n: f64,
    rel_tol: f64,
) -> Result<SignedLog> {
    // The integrand decays like e^(-pi sigma) against growth ~ sigma^(A+mu+n),
    // putting its support within a few multiples of (A+mu+n)/pi.
    let load = (inst.a_cap + inst.mu + n) / PI;
    let span = load + 8.0 * load.max(1.0).sqrt() + 40.0;
    if span > RESIDUE_SPAN_LIMIT {
        return Err(Error::Convergence {
            context: "egbmgf residue line integral",
            detail: format!(
                "required integration span {span:.0} exceeds the profile limit \
                 {RESIDUE_SPAN_LIMIT} (A = {}, order n = {n}); use the series route",
                inst.a_cap
            ),
        });
    }
    let ln_x = inst.x.ln();
    let scale = ln_gamma_pos(inst.mu + n + c)?
        + ln_gamma_pos(-c)?
        + ln_gamma_pos(inst.a_cap + c)?
        + c * ln_x;
    let integrand = |sigma: f64| -> f64 {
        let s = Complex64::new(c, sigma);
        let g = log_gamma(Complex64::new(inst.mu + n, 0.0) + s)
            .and_then(|a| Ok(a + log_gamma(-s)?))
            .and_then(|a| Ok(a + log_gamma(Complex64::new(inst.a_cap, 0.0) + s)?));
        match g {
            Ok(g) => ((g + s * ln_x) - scale).exp().re,
            Err(_) => f64::NAN,
        }
    };
    let r = integrate_segment(integrand, 0.0, span, rel_tol, 1e-300)?;
    Ok(SignedLog::from_value(r.value / PI).scale_ln(scale))
}

// ---------------------------------------------------------------------------
