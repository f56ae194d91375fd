//! Signed log-domain arithmetic.
//!
//! Several quantities in this crate (Gamma-function products along contours,
//! series terms with hundreds of factors, expectations at large delay
//! exponents) overflow or underflow f64 long before the final answer does.
//! `SignedLog` stores a real number as `sign * exp(ln_abs)` so products and
//! sums can be carried out safely and only collapsed to f64 at the edge.

/// A real number represented as `sign * exp(ln_abs)`.
///
/// `sign` is -1.0, 0.0, or +1.0. Zero is `ln_abs = -inf, sign = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub sign: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        ln_abs: f64::NEG_INFINITY,
        sign: 0.0,
    };

    pub const ONE: SignedLog = SignedLog {
        ln_abs: 0.0,
        sign: 1.0,
    };

    /// Wraps a finite f64.
    pub fn from_value(v: f64) -> SignedLog {
        if v == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog {
                ln_abs: v.abs().ln(),
                sign: v.signum(),
            }
        }
    }

    /// Builds from a log-magnitude and a sign (any nonzero sign is normalized).
    pub fn from_ln(ln_abs: f64, sign: f64) -> SignedLog {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            SignedLog::ZERO
        } else {
            SignedLog {
                ln_abs,
                sign: sign.signum(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        if self.is_zero() || other.is_zero() {
            SignedLog::ZERO
        } else {
            SignedLog {
                ln_abs: self.ln_abs + other.ln_abs,
                sign: self.sign * other.sign,
            }
        }
    }

    pub fn div(self, other: SignedLog) -> SignedLog {
        SignedLog {
            ln_abs: self.ln_abs - other.ln_abs,
            sign: self.sign * other.sign,
        }
    }

    /// Signed addition via log-sum-exp on the dominant magnitude.
    pub fn add(self, other: SignedLog) -> SignedLog {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let d = lo.ln_abs - hi.ln_abs; // <= 0
        if hi.sign == lo.sign {
            SignedLog {
                ln_abs: hi.ln_abs + d.exp().ln_1p(),
                sign: hi.sign,
            }
        } else {
            let r = (-d.exp()).ln_1p(); // ln(1 - e^d), d <= 0
            if r == f64::NEG_INFINITY {
                SignedLog::ZERO
            } else {
                SignedLog {
                    ln_abs: hi.ln_abs + r,
                    sign: hi.sign,
                }
            }
        }
    }

    /// Multiplies by exp(delta) in place of the magnitude.
    pub fn scale_ln(self, delta: f64) -> SignedLog {
        if self.is_zero() {
            SignedLog::ZERO
        } else {
            SignedLog {
                ln_abs: self.ln_abs + delta,
                sign: self.sign,
            }
        }
    }

    /// Collapses to f64; overflows to +/-inf, underflows to +/-0.
    pub fn value(self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// ln(e^a + e^b) without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln(sum exp(x_i)) with a single max-shift pass.
pub fn ln_sum_exp(xs: &[f64]) -> f64 {
    let mx = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - mx).exp()).sum();
    mx + s.ln()
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_finite_values() {
        // exp(ln x) loses up to ~|ln x| * eps relative, ~7e-14 at 1e+-280.
        for &v in &[1.0, -2.5, 1e-280, -1e280, 3.714] {
            let s = SignedLog::from_value(v);
            assert!(
                (s.value() - v).abs() <= 1e-13 * v.abs(),
                "round trip of {v} gave {}",
                s.value()
            );
        }
        assert_eq!(SignedLog::from_value(0.0).value(), 0.0);
    }

    #[test]
    fn add_handles_opposite_signs() {
        let a = SignedLog::from_value(5.0);
        let b = SignedLog::from_value(-3.0);
        let c = a.add(b);
        assert!((c.value() - 2.0).abs() < 1e-14, "5 - 3 gave {}", c.value());

        let cancel = a.add(SignedLog::from_value(-5.0));
        assert!(cancel.is_zero(), "exact cancellation should give zero");
    }

    #[test]
    fn mul_and_div_track_signs_beyond_f64_range() {
        let big = SignedLog::from_ln(800.0, -1.0); // -e^800, not representable
        let small = SignedLog::from_ln(-790.0, -1.0);
        let p = big.mul(small);
        assert_eq!(p.sign, 1.0);
        assert!((p.ln_abs - 10.0).abs() < 1e-12);
        let q = big.div(small);
        assert_eq!(q.sign, 1.0);
        assert!((q.ln_abs - 1590.0).abs() < 1e-12);
    }

    #[test]
    fn ln_sum_exp_matches_direct_sum() {
        let xs = [0.0f64, -1.0, -2.0, -50.0];
        let direct: f64 = xs.iter().map(|x| x.exp()).sum();
        assert!((ln_sum_exp(&xs) - direct.ln()).abs() < 1e-14);
        assert_eq!(ln_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_add_exp_is_symmetric_and_stable() {
        assert!((ln_add_exp(-1000.0, -1000.0) - (-1000.0 + std::f64::consts::LN_2)).abs() < 1e-12);
        assert_eq!(ln_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
    }
}
