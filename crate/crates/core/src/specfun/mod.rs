//! Real-order Bessel functions and the oscillatory quadrature kernels used
//! by the amplitude oracle and the identity-verification suite.
//!
//! Everything here is a pure function of its inputs; results are
//! deterministic (same inputs give bit-identical outputs on one platform).

mod bessel;
mod gamma;
mod quad;

pub use bessel::{bessel_j_derivative, MAX_ORDER};
pub(crate) use bessel::{bessel_j_unchecked, j_ladder};
pub use quad::{phi_integral, triple_bessel_integral};
pub(crate) use quad::{neville_to_zero, QuadGrid};

use std::fmt;

/// Errors from the special-function kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFunError {
    /// |nu| exceeds the supported order range.
    OrderOutOfRange { nu: f64 },
    /// Negative or non-finite argument.
    NegativeArgument { x: f64 },
    /// An iteration or extrapolation failed to converge.
    NoConvergence { what: &'static str },
    /// The result does not fit in f64.
    Overflow { nu: f64, x: f64 },
    /// Inputs violate the validity region of an identity or integral.
    OutsideRegime { detail: String },
    /// The quadrature error estimate exceeds the requested tolerance.
    ResidualAboveTolerance { residual: f64, tolerance: f64 },
    /// Invalid quadrature configuration.
    BadConfig { detail: String },
}

impl fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecFunError::OrderOutOfRange { nu } => {
                write!(f, "Bessel order {nu} outside supported range |nu| <= {MAX_ORDER}")
            }
            SpecFunError::NegativeArgument { x } => {
                write!(f, "argument {x} is negative or not finite")
            }
            SpecFunError::NoConvergence { what } => write!(f, "no convergence in {what}"),
            SpecFunError::Overflow { nu, x } => {
                write!(f, "J_{nu}({x}) overflows the working precision")
            }
            SpecFunError::OutsideRegime { detail } => write!(f, "outside validity regime: {detail}"),
            SpecFunError::ResidualAboveTolerance { residual, tolerance } => write!(
                f,
                "quadrature residual estimate {residual:e} above tolerance {tolerance:e}"
            ),
            SpecFunError::BadConfig { detail } => write!(f, "bad quadrature config: {detail}"),
        }
    }
}

impl std::error::Error for SpecFunError {}

/// A validated real Bessel order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self, SpecFunError> {
        if nu.is_finite() && nu.abs() <= MAX_ORDER {
            Ok(BesselOrder(nu))
        } else {
            Err(SpecFunError::OrderOutOfRange { nu })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Bessel function of the first kind J_nu(x), x >= 0.
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64, SpecFunError> {
    bessel::bessel_j(nu.get(), x)
}

/// Tolerances and tail-handling knobs for the oscillatory quadratures.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    /// Absolute tolerance on the certified error estimate of a
    /// quadrature; estimates are deliberately conservative.
    pub abs_tol: f64,
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Budget for panel-halving refinement rounds.
    pub max_subdivisions: u32,
    /// Damping strengths for the oscillatory tail, strictly decreasing
    /// toward zero; the damped tails are extrapolated polynomially to
    /// zero damping.
    pub damping_sequence: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_subdivisions: 8,
            // three extra halvings beyond the coarse schedule buy the
            // extrapolation the headroom that the 1e-8 identity checks need
            damping_sequence: vec![0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125, 0.0015625],
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), SpecFunError> {
        if !self.abs_tol.is_finite() || self.abs_tol <= 0.0 || !self.rel_tol.is_finite() || self.rel_tol <= 0.0 {
            return Err(SpecFunError::BadConfig {
                detail: "tolerances must be positive".into(),
            });
        }
        if self.max_subdivisions < 1 {
            return Err(SpecFunError::BadConfig {
                detail: "max_subdivisions must be >= 1".into(),
            });
        }
        if self.damping_sequence.is_empty() {
            return Err(SpecFunError::BadConfig {
                detail: "damping sequence must not be empty".into(),
            });
        }
        let mut prev = f64::INFINITY;
        for &e in &self.damping_sequence {
            if e <= 0.0 || e >= prev {
                return Err(SpecFunError::BadConfig {
                    detail: "damping sequence must be strictly decreasing and positive".into(),
                });
            }
            prev = e;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_order_bounds() {
        assert!(BesselOrder::new(199.9).is_ok());
        assert!(BesselOrder::new(-200.0).is_ok());
        assert!(BesselOrder::new(200.5).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let mut c = QuadratureConfig {
            damping_sequence: vec![0.1, 0.2],
            ..QuadratureConfig::default()
        };
        assert!(c.validate().is_err());
        c.damping_sequence = vec![0.1, 0.05];
        c.abs_tol = 0.0;
        assert!(c.validate().is_err());
    }
}
