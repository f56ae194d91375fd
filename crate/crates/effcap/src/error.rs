//! Crate-wide error type.
//!
//! Numerical routines here fail in a small number of well-defined ways:
//! inputs outside the supported domain, evaluation at a pole of a special
//! function, an iteration that exhausts its budget before meeting tolerance,
//! an integrand that turns non-finite, a Mellin-Barnes contour that cannot
//! separate the pole families, or a series whose terms grow without bound.
//! Callers that route between evaluation strategies match on the variant.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the supported domain (the message names the offending
    /// parameter and the constraint it violated).
    Domain(String),
    /// A special function was evaluated at one of its poles.
    Pole {
        function: &'static str,
        argument: f64,
    },
    /// An iterative computation exhausted its budget without meeting the
    /// requested tolerance.
    Convergence {
        context: &'static str,
        detail: String,
    },
    /// The integrand produced NaN or an infinity at the given abscissa.
    NonFiniteIntegrand { abscissa: f64 },
    /// No admissible straight vertical contour separates the left and right
    /// pole families of the Mellin-Barnes kernel for these parameters.
    PoleSeparation { detail: String },
    /// A series expansion whose terms grow without bound for these arguments.
    Divergent {
        context: &'static str,
        term_ratio: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Pole { function, argument } => {
                write!(f, "{function} evaluated at a pole (argument {argument})")
            }
            Error::Convergence { context, detail } => {
                write!(f, "{context} failed to converge: {detail}")
            }
            Error::NonFiniteIntegrand { abscissa } => {
                write!(f, "integrand is not finite at abscissa {abscissa}")
            }
            Error::PoleSeparation { detail } => {
                write!(f, "no separating contour: {detail}")
            }
            Error::Divergent {
                context,
                term_ratio,
            } => {
                write!(
                    f,
                    "{context} diverges for these arguments (term ratio {term_ratio:.3})"
                )
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
