//! Effective capacity routes and the method router.
//!
//! Every route computes the same quantity,
//!
//! ```text
//! R = -(1/A) log2 E[(1 + gamma)^(-A)],    A = theta T B / ln 2,
//! ```
//!
//! the largest constant arrival rate (bit/s/Hz) a link can sustain under a
//! statistical delay constraint with exponent theta, block length T and
//! bandwidth B. A -> 0 recovers the ergodic capacity, A -> inf the outage
//! floor.
//!
//! The routes are deliberately redundant:
//!
//! - [`capacity_quadrature`]: the defining integral against the density.
//! - [`capacity_exact`]: the bivariate contour closed form
//!   (module [`crate::meijerg`]), falling back to its residue series when no
//!   separating contour exists.
//! - [`capacity_series`]: a single series of Tricomi U functions obtained by
//!   expanding the density's confluent factor term by term; converges for
//!   every valid parameter set with ratio mu kappa / (mu kappa + m).
//! - [`capacity_m_eq_mu`]: the two-parameter closed form on the m = mu line,
//!   where the density collapses to Gamma(mu) exactly and
//!   R = log2(gbar/m) - (1/A) log2 U(A, A+1-m, m/gbar).
//! - [`capacity_rician_shadowed`]: the mu = 1 family (shadowed line of
//!   sight with a single cluster), served by the exact chain.
//! - [`capacity_high_snr`] / [`capacity_high_snr_m_eq_mu`]: closed-form
//!   high-SNR asymptotes (valid for A < mu, resp. A < m), offset from the
//!   true curve by o(1) as gbar grows.
//! - [`capacity_monte_carlo`]: sample mean over the hierarchical fading
//!   representation, with a delta-method standard error.
//!
//! [`capacity`] with [`Method::Auto`] picks a route from the parameter
//! geometry and falls back in the documented order; with `paranoid` set it
//! re-derives the value by quadrature and fails loudly on disagreement.

use std::collections::BTreeMap;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::logspace::{ln_add_exp, SignedLog};
use crate::meijerg::{
    egbmgf_eval_ln, egbmgf_residue_series_ln, ContourSpec, EgbmgfInstance, PREFACTOR_POLE_GUARD,
};
use crate::quad::integrate_semi_infinite;
use crate::specfun::{gauss_2f1, ln_gamma_pos, ln_gamma_sign, ln_pochhammer, ln_tricomi_u};

const LN_2: f64 = std::f64::consts::LN_2;

/// Parameters within this distance of a structural boundary (m = mu,
/// mu = 1) are treated as being on it.
pub const BRANCH_EPS: f64 = 1e-9;

/// Term budget for the Tricomi series.
const SERIES_TERM_BUDGET: usize = 10_000;

// ---------------------------------------------------------------------------
// QoS parameters and method selection
// ---------------------------------------------------------------------------

/// The delay-QoS constraint, reduced to the single exponent A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosParams {
    exponent: f64,
}

impl QosParams {
    /// Directly from the normalized exponent A > 0.
    pub fn from_exponent(a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Domain(format!(
                "delay exponent A must be finite and > 0, got {a}"
            )));
        }
        Ok(Self { exponent: a })
    }

    /// From the physical triple: A = theta * T * B / ln 2.
    pub fn from_qos(theta: f64, block_len: f64, bandwidth: f64) -> Result<Self> {
        for (name, v) in [("theta", theta), ("block length", block_len), ("bandwidth", bandwidth)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Self::from_exponent(theta * block_len * bandwidth / LN_2)
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

/// Evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Pick from the parameter geometry, with documented fallbacks.
    Auto,
    /// Defining integral against the density.
    Quadrature,
    /// Bivariate contour closed form (residue series as its fallback).
    Exact,
    /// Tricomi U series.
    Series,
    /// Closed form on the m = mu line.
    MEqMu,
    /// The mu = 1 family.
    RicianShadowed,
    /// High-SNR asymptote.
    HighSnr,
    /// Sample mean over the fading representation.
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Quadrature => "quadrature",
            Method::Exact => "exact",
            Method::Series => "series",
            Method::MEqMu => "m-eq-mu",
            Method::RicianShadowed => "rician-shadowed",
            Method::HighSnr => "high-snr",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "quadrature" => Ok(Method::Quadrature),
            "exact" => Ok(Method::Exact),
            "series" => Ok(Method::Series),
            "m-eq-mu" => Ok(Method::MEqMu),
            "rician-shadowed" => Ok(Method::RicianShadowed),
            "high-snr" => Ok(Method::HighSnr),
            "monte-carlo" => Ok(Method::MonteCarlo),
            other => Err(Error::Domain(format!(
                "unknown method '{other}' (expected auto, quadrature, exact, series, \
                 m-eq-mu, rician-shadowed, high-snr, or monte-carlo)"
            ))),
        }
    }
}

/// Knobs shared by all routes.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Relative target for series / contour refinement.
    pub tol: f64,
    /// Relative target for quadrature routes.
    pub quad_rel: f64,
    /// Absolute floor for quadrature routes.
    pub quad_abs: f64,
    /// Draw count for Monte Carlo.
    pub mc_samples: usize,
    /// RNG stream for Monte Carlo.
    pub seed: u64,
    /// Re-derive every non-quadrature result by quadrature and fail on
    /// disagreement.
    pub paranoid: bool,
    /// Contour override for the exact route (None: auto placement).
    pub contour: Option<ContourSpec>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            quad_rel: 1e-10,
            quad_abs: 1e-14,
            mc_samples: 100_000,
            seed: 42,
            paranoid: false,
            contour: None,
        }
    }
}

/// A computed capacity with provenance.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    /// Effective capacity in bit/s/Hz.
    pub value: f64,
    /// Route that actually produced the value.
    pub method: Method,
    /// Estimated absolute error of `value` (statistical 1-sigma for Monte
    /// Carlo, last-refinement or truncation size elsewhere).
    pub error_estimate: f64,
    /// Route-specific details (term counts, grid sizes, residuals).
    pub diagnostics: BTreeMap<String, String>,
}

// ---------------------------------------------------------------------------
// shared pieces
// ---------------------------------------------------------------------------

/// ln E[(1+gamma)^-A] -> R, guarding the E in (0, 1] invariant. Values that
/// overshoot 1 by round-off clamp to R = 0; anything worse is an error.
fn expectation_to_rate(ln_e: f64, a: f64) -> Result<f64> {
    if ln_e == f64::NEG_INFINITY {
        return Err(Error::Convergence {
            context: "capacity assembly",
            detail: "the expectation underflowed to exactly zero; \
                     no rate can be resolved at this delay exponent"
                .into(),
        });
    }
    if !ln_e.is_finite() || ln_e > 1e-7 {
        return Err(Error::Convergence {
            context: "capacity assembly",
            detail: format!(
                "ln E = {ln_e:.3e} violates E <= 1; the evaluation is inconsistent"
            ),
        });
    }
    Ok((-ln_e / (a * LN_2)).max(0.0))
}

fn base_result(value: f64, method: Method, error_estimate: f64) -> CapacityResult {
    CapacityResult {
        value,
        method,
        error_estimate,
        diagnostics: BTreeMap::new(),
    }
}

// ---------------------------------------------------------------------------
// routes
// ---------------------------------------------------------------------------

/// R by direct quadrature of the defining integral. The integrand is
/// assembled in the log domain pointwise, so large A never overflows.
pub fn capacity_quadrature(
    params: &ChannelParams,
    qos: &QosParams,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    let a = qos.exponent();
    let r = integrate_semi_infinite(
        |g| match params.log_pdf(g) {
            Ok(lp) => (-a * g.ln_1p() + lp).exp(),
            Err(_) => f64::NAN,
        },
        opts.quad_rel,
        opts.quad_abs,
    )?;
    if !(r.value > 0.0) {
        return Err(Error::Convergence {
            context: "capacity quadrature",
            detail: format!("expectation integral came out nonpositive ({})", r.value),
        });
    }
    let value = expectation_to_rate(r.value.ln(), a)?;
    let mut out = base_result(value, Method::Quadrature, r.error_estimate / (r.value * a * LN_2));
    out.diagnostics.insert("route".into(), "defining-integral".into());
    out.diagnostics.insert("evaluations".into(), r.evaluations.to_string());
    out.diagnostics
        .insert("quad-error".into(), format!("{:.3e}", r.error_estimate));
    Ok(out)
}

/// R through the bivariate contour representation:
///
/// ```text
/// E = G / (Gamma(A) Gamma(mu-m)) * (m/(mu kappa + m))^(m-mu),
/// ```
///
/// with G from the double contour when m < mu and from the residue series
/// otherwise. All factors are carried in signed-log form; the assembled
/// expectation must come out positive or the route reports failure.
pub fn capacity_exact(
    params: &ChannelParams,
    qos: &QosParams,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    let a = qos.exponent();
    let (kappa, mu, m) = (params.kappa(), params.mu(), params.m());
    let inst = EgbmgfInstance::from_channel(params, a)?;
    let mut diagnostics = BTreeMap::new();
    let (g, rel_err) = match egbmgf_eval_ln(&inst, opts.contour.as_ref(), opts.tol) {
        Ok((g, d)) => {
            diagnostics.insert("route".into(), "contour".into());
            diagnostics.insert("refinements".into(), d.refinements.to_string());
            diagnostics.insert(
                "kernel-evaluations".into(),
                d.kernel_evaluations.to_string(),
            );
            diagnostics.insert("imag-ratio".into(), format!("{:.3e}", d.imag_ratio));
            diagnostics.insert("last-delta".into(), format!("{:.3e}", d.last_delta));
            (g, d.last_delta)
        }
        Err(Error::PoleSeparation { .. }) | Err(Error::Convergence { .. }) => {
            let (g, d) = egbmgf_residue_series_ln(&inst, opts.tol)?;
            diagnostics.insert("route".into(), "residue-series".into());
            diagnostics.insert("terms".into(), d.terms_used.to_string());
            diagnostics.insert(
                "last-term".into(),
                format!("{:.3e}", d.last_term_magnitude),
            );
            (g, d.last_term_magnitude)
        }
        Err(e) => return Err(e),
    };
    let (ln_gmm, sign_gmm) = ln_gamma_sign(mu - m)?;
    let e = g
        .div(SignedLog::from_ln(ln_gamma_pos(a)?, 1.0))
        .div(SignedLog::from_ln(ln_gmm, sign_gmm))
        .scale_ln((m - mu) * (m.ln() - (mu * kappa + m).ln()));
    if e.sign != 1.0 {
        return Err(Error::Convergence {
            context: "capacity exact assembly",
            detail: format!(
                "assembled expectation has sign {}; the contour value is inconsistent \
                 with the Gamma prefactors",
                e.sign
            ),
        });
    }
    let value = expectation_to_rate(e.ln_abs, a)?;
    let mut out = base_result(value, Method::Exact, rel_err / (a * LN_2));
    out.diagnostics = diagnostics;
    Ok(out)
}

/// R through a single series of Tricomi U functions: expanding the
/// confluent factor of the density term by term gives
///
/// ```text
/// E = C sum_n (m)_n / ((mu)_n n!) c^n Gamma(mu+n) U(mu+n, mu+n+1-A, beta),
/// beta = mu (1+kappa) / gbar,  c = mu^2 kappa (1+kappa) / ((mu kappa+m) gbar),
/// ```
///
/// a positive series with asymptotic term ratio mu kappa / (mu kappa + m),
/// so it converges for every valid parameter set. kappa = 0 collapses to the
/// single n = 0 term exactly.
pub fn capacity_series(
    params: &ChannelParams,
    qos: &QosParams,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    let a = qos.exponent();
    let (kappa, mu, m) = (params.kappa(), params.mu(), params.m());
    let gbar = params.mean_snr();
    let beta = mu * (1.0 + kappa) / gbar;
    let ln_front = params.ln_prefactor()? - (mu - 1.0) * gbar.ln();
    let ln_c = if kappa > 0.0 {
        (mu * mu * kappa * (1.0 + kappa) / ((mu * kappa + m) * gbar)).ln()
    } else {
        f64::NEG_INFINITY
    };
    let u_tol = (opts.tol * 1e-2).max(1e-13);
    let ln_tol = opts.tol.ln();
    let mut sum_ln = f64::NEG_INFINITY;
    let mut prev_term_ln = f64::NAN;
    let mut small_streak = 0u32;
    let mut terms = 0usize;
    let mut converged = false;
    let mut last_rel = f64::NAN;
    for n in 0..SERIES_TERM_BUDGET {
        let nf = n as f64;
        let ln_u = ln_tricomi_u(mu + nf, mu + nf + 1.0 - a, beta, u_tol)?;
        let (ln_pm, _) = ln_pochhammer(m, n as u32);
        let (ln_pmu, _) = ln_pochhammer(mu, n as u32);
        let ln_term = ln_front + ln_pm - ln_pmu - ln_gamma_pos(nf + 1.0)?
            + if n == 0 { 0.0 } else { nf * ln_c }
            + ln_gamma_pos(mu + nf)?
            + ln_u;
        sum_ln = ln_add_exp(sum_ln, ln_term);
        terms = n + 1;
        if kappa == 0.0 {
            // The confluent factor is identically 1: the n = 0 term is exact.
            converged = true;
            last_rel = 0.0;
            break;
        }
        // Geometric tail bound: the term ratio approaches
        // mu kappa / (mu kappa + m) (possibly from below, so the observed
        // ratio alone would understate the tail), giving
        // tail <= term * ratio / (1 - ratio).
        if n >= 1 {
            let asymptotic = mu * kappa / (mu * kappa + m);
            let ratio = (ln_term - prev_term_ln).exp().max(asymptotic).min(0.999);
            let ln_tail = ln_term + (ratio / (1.0 - ratio)).max(1e-300).ln();
            last_rel = (ln_tail - sum_ln).exp();
            if ln_tail <= sum_ln + ln_tol {
                small_streak += 1;
                if small_streak >= 2 {
                    converged = true;
                    break;
                }
            } else {
                small_streak = 0;
            }
        }
        prev_term_ln = ln_term;
    }
    if !converged {
        return Err(Error::Convergence {
            context: "capacity Tricomi series",
            detail: format!(
                "no convergence within {SERIES_TERM_BUDGET} terms \
                 (asymptotic ratio {:.6}); the parameter set is outside this \
                 route's practical profile",
                mu * kappa / (mu * kappa + m)
            ),
        });
    }
    let value = expectation_to_rate(sum_ln, a)?;
    let mut out = base_result(value, Method::Series, last_rel.abs() / (a * LN_2));
    out.diagnostics.insert("route".into(), "tricomi-series".into());
    out.diagnostics.insert("terms".into(), terms.to_string());
    Ok(out)
}

/// R on the m = mu line, where the density is exactly Gamma(mu) with scale
/// gbar/mu for every kappa and
///
/// ```text
/// R = log2(gbar/m) - (1/A) log2 U(A, A+1-m, m/gbar).
/// ```
pub fn capacity_m_eq_mu(
    params: &ChannelParams,
    qos: &QosParams,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    let (mu, m) = (params.mu(), params.m());
    if (m - mu).abs() > BRANCH_EPS {
        return Err(Error::Domain(format!(
            "the m = mu closed form requires m == mu (got m = {m}, mu = {mu})"
        )));
    }
    let a = qos.exponent();
    let gbar = params.mean_snr();
    let u_tol = (opts.tol * 1e-2).max(1e-13);
    let ln_u = ln_tricomi_u(a, a + 1.0 - m, m / gbar, u_tol)?;
    let raw = ((gbar / m).ln() - ln_u / a) / LN_2;
    if raw < -1e-9 {
        return Err(Error::Convergence {
            context: "capacity m = mu closed form",
            detail: format!("computed rate {raw:.3e} is negative beyond round-off"),
        });
    }
    let mut out = base_result(raw.max(0.0), Method::MEqMu, u_tol / (a * LN_2));
    out.diagnostics.insert("route".into(), "tricomi-closed-form".into());
    Ok(out)
}

/// R for the mu = 1 family (single-cluster line of sight with Nakagami-m
/// shadowing), handled by the exact chain with the series as its fallback
/// for degenerate m - mu gaps.
pub fn capacity_rician_shadowed(
    params: &ChannelParams,
    qos: &QosParams,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    let mu = params.mu();
    if (mu - 1.0).abs() > BRANCH_EPS {
        return Err(Error::Domain(format!(
            "the shadowed line-of-sight family requires mu == 1, got {mu}"
        )));
    }
    let mut out = match capacity_exact(params, qos, opts) {
        Ok(r) => r,
        Err(Error::Domain(_))
        | Err(Error::PoleSeparation { .. })
        | Err(Error::Divergent { .. })
        | Err(Error::Convergence { .. }) => capacity_series(params, qos, opts)?,
        Err(e) => return Err(e),
    };
    out.method = Method::RicianShadowed;
    out.diagnostics
        .insert("family".into(), "shadowed line of sight (mu = 1)".into());
    Ok(out)
}

/// High-SNR asymptote, valid for A < mu:
///
/// ```text
/// R ~ log2(gbar/(mu(1+kappa)))
///     - (1/A) log2[ Gamma(mu-A)/Gamma(mu) 2F1(m, A; mu; -mu kappa/m) ].
/// ```
///
/// This is an asymptote, not a bound: at low SNR it can undershoot zero.
pub fn capacity_high_snr(
    params: &ChannelParams,
    qos: &QosParams,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    let a = qos.exponent();
    let (kappa, mu, m) = (params.kappa(), params.mu(), params.m());
    if a >= mu {
        return Err(Error::Domain(format!(
            "the high-SNR closed form requires A < mu (got A = {a}, mu = {mu}); \
             the expectation's gamma -> 0 tail dominates otherwise"
        )));
    }
    let (f, diag) = gauss_2f1(m, a, mu, -(mu * kappa) / m, (opts.tol * 1e-2).max(1e-14))?;
    let ln_ratio = ln_gamma_pos(mu - a)? - ln_gamma_pos(mu)? + f.ln();
    let value = ((params.mean_snr() / (mu * (1.0 + kappa))).ln() - ln_ratio / a) / LN_2;
    let mut out = base_result(value, Method::HighSnr, opts.tol * (1.0 + value.abs()));
    out.diagnostics.insert("route".into(), "asymptote".into());
    out.diagnostics
        .insert("hypergeometric-terms".into(), diag.terms_used.to_string());
    Ok(out)
}

/// High-SNR asymptote on the m = mu line, valid for A < m:
///
/// ```text
/// R ~ log2(gbar/m) - (1/A) log2[ Gamma(m-A)/Gamma(m) ].
/// ```
pub fn capacity_high_snr_m_eq_mu(
    params: &ChannelParams,
    qos: &QosParams,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    let (mu, m) = (params.mu(), params.m());
    if (m - mu).abs() > BRANCH_EPS {
        return Err(Error::Domain(format!(
            "this asymptote requires m == mu (got m = {m}, mu = {mu})"
        )));
    }
    let a = qos.exponent();
    if a >= m {
        return Err(Error::Domain(format!(
            "the m = mu high-SNR form requires A < m (got A = {a}, m = {m})"
        )));
    }
    let _ = opts;
    let value =
        ((params.mean_snr() / m).ln() - (ln_gamma_pos(m - a)? - ln_gamma_pos(m)?) / a) / LN_2;
    let mut out = base_result(value, Method::HighSnr, 4.0 * f64::EPSILON * (1.0 + value.abs()));
    out.diagnostics.insert("route".into(), "asymptote-m-eq-mu".into());
    Ok(out)
}

/// R from a seeded sample mean of (1+gamma)^-A, with a delta-method
/// standard error as the error estimate.
pub fn capacity_monte_carlo(
    params: &ChannelParams,
    qos: &QosParams,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    if opts.mc_samples < 2 {
        return Err(Error::Domain(format!(
            "Monte Carlo needs at least 2 samples, got {}",
            opts.mc_samples
        )));
    }
    let a = qos.exponent();
    let batch = params.sample(opts.mc_samples, opts.seed)?;
    let weights: Vec<f64> = batch
        .values
        .iter()
        .map(|&g| (-a * g.ln_1p()).exp())
        .collect();
    let n = weights.len() as f64;
    let mean = weights.iter().sum::<f64>() / n;
    if !(mean > 0.0) {
        return Err(Error::Convergence {
            context: "capacity Monte Carlo",
            detail: format!(
                "all {} sample weights underflowed at A = {a}; the estimator \
                 carries no information here",
                opts.mc_samples
            ),
        });
    }
    let var = weights.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let value = expectation_to_rate(mean.ln(), a)?;
    let mut out = base_result(value, Method::MonteCarlo, se / (mean * a * LN_2));
    out.diagnostics.insert("route".into(), "sample-mean".into());
    out.diagnostics.insert("samples".into(), opts.mc_samples.to_string());
    out.diagnostics.insert("seed".into(), opts.seed.to_string());
    out.diagnostics.insert("weight-mean".into(), format!("{mean:.6e}"));
    out.diagnostics.insert("weight-se".into(), format!("{se:.3e}"));
    Ok(out)
}

/// Mean log rate E[log2(1+gamma)] — the A -> 0 limit of the effective
/// capacity — by quadrature.
pub fn ergodic_capacity(params: &ChannelParams, opts: &EvalOptions) -> Result<CapacityResult> {
    let r = integrate_semi_infinite(
        |g| match params.log_pdf(g) {
            Ok(lp) => g.ln_1p() * lp.exp(),
            Err(_) => f64::NAN,
        },
        opts.quad_rel,
        opts.quad_abs,
    )?;
    let mut out = base_result(r.value / LN_2, Method::Quadrature, r.error_estimate / LN_2);
    out.diagnostics.insert("route".into(), "ergodic-limit".into());
    out.diagnostics.insert("evaluations".into(), r.evaluations.to_string());
    Ok(out)
}

// ---------------------------------------------------------------------------
// router
// ---------------------------------------------------------------------------

/// Evaluate R by the requested route; `Method::Auto` dispatches on the
/// parameter geometry:
///
/// 1. m == mu: the exact Gamma reduction (any kappa).
/// 2. kappa == 0: the series, which is a single exact term there.
/// 3. mu == 1: the shadowed line-of-sight family (exact chain).
/// 4. mu - m within 1e-6 of a nonpositive integer: the series (the contour
///    representation degenerates).
/// 5. otherwise the exact chain, with the series as the final fallback.
///
/// With `opts.paranoid`, any non-quadrature result is cross-checked against
/// the defining integral and disagreement is a hard error (the high-SNR
/// asymptote is exempt — it never claims to match — and Monte Carlo is
/// checked at five standard errors).
pub fn capacity(
    params: &ChannelParams,
    qos: &QosParams,
    method: Method,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    let mut out = match method {
        Method::Auto => auto_route(params, qos, opts)?,
        Method::Quadrature => capacity_quadrature(params, qos, opts)?,
        Method::Exact => capacity_exact(params, qos, opts)?,
        Method::Series => capacity_series(params, qos, opts)?,
        Method::MEqMu => capacity_m_eq_mu(params, qos, opts)?,
        Method::RicianShadowed => capacity_rician_shadowed(params, qos, opts)?,
        Method::HighSnr => capacity_high_snr(params, qos, opts)?,
        Method::MonteCarlo => capacity_monte_carlo(params, qos, opts)?,
    };
    if opts.paranoid && out.method != Method::Quadrature {
        if out.method == Method::HighSnr {
            out.diagnostics
                .insert("paranoid".into(), "skipped: asymptote by design".into());
            return Ok(out);
        }
        let q = capacity_quadrature(params, qos, opts)?;
        let scale = out.value.abs().max(q.value.abs()).max(1e-9);
        let delta = (out.value - q.value).abs() / scale;
        let allowed = if out.method == Method::MonteCarlo {
            1e-6 + 5.0 * out.error_estimate / scale
        } else {
            1e-6
        };
        if delta > allowed {
            return Err(Error::Convergence {
                context: "paranoid cross-check",
                detail: format!(
                    "{} gave {:.12e} but quadrature gave {:.12e} \
                     (relative gap {delta:.3e}, allowed {allowed:.3e})",
                    out.method, out.value, q.value
                ),
            });
        }
        out.diagnostics
            .insert("paranoid".into(), format!("quadrature agrees to {delta:.2e}"));
    }
    Ok(out)
}

fn auto_route(
    params: &ChannelParams,
    qos: &QosParams,
    opts: &EvalOptions,
) -> Result<CapacityResult> {
    let (kappa, mu, m) = (params.kappa(), params.mu(), params.m());
    if (m - mu).abs() <= BRANCH_EPS {
        return capacity_m_eq_mu(params, qos, opts);
    }
    if kappa < 1e-12 {
        return capacity_series(params, qos, opts);
    }
    if (mu - 1.0).abs() <= BRANCH_EPS {
        return capacity_rician_shadowed(params, qos, opts);
    }
    let gap = mu - m;
    let nearest = gap.round();
    if nearest <= 0.0 && (gap - nearest).abs() < PREFACTOR_POLE_GUARD {
        return capacity_series(params, qos, opts);
    }
    match capacity_exact(params, qos, opts) {
        Ok(r) => Ok(r),
        Err(Error::PoleSeparation { .. })
        | Err(Error::Divergent { .. })
        | Err(Error::Convergence { .. }) => capacity_series(params, qos, opts),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
