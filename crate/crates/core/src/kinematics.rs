//! Flux decomposition, photon and pair kinematics, and conservation-law
//! solving. Natural units throughout: hbar = c = 1, momenta in units of the
//! created particle mass unless a mass is supplied explicitly.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum KinematicsError {
    /// Photon energy at or below the pair threshold 2M.
    BelowThreshold { kappa: f64, mass: f64 },
    /// No real solution for the antiparticle transverse momentum.
    Forbidden { detail: String },
    /// The closed form is only stated for photons at normal incidence.
    NotNormalIncidence { theta: f64 },
    /// A parameter failed basic validation.
    Invalid { detail: String },
}

impl fmt::Display for KinematicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KinematicsError::BelowThreshold { kappa, mass } => {
                write!(f, "below threshold: photon energy {kappa} <= 2M = {}", 2.0 * mass)
            }
            KinematicsError::Forbidden { detail } => {
                write!(f, "kinematically forbidden point: {detail}")
            }
            KinematicsError::NotNormalIncidence { theta } => {
                write!(f, "closed form requires normal incidence (theta = pi/2), got {theta}")
            }
            KinematicsError::Invalid { detail } => write!(f, "invalid input: {detail}"),
        }
    }
}

impl std::error::Error for KinematicsError {}

/// Magnetic flux in units of the flux quantum, split into integer part and
/// fractional remainder delta in [0, 1). Only delta affects observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParam {
    f: f64,
    int_part: i64,
    delta: f64,
}

impl FluxParam {
    /// Floor-based decomposition: f = int_part + delta with delta in [0, 1).
    pub fn new(f: f64) -> Result<FluxParam, KinematicsError> {
        if !f.is_finite() {
            return Err(KinematicsError::Invalid {
                detail: "flux must be finite".into(),
            });
        }
        let int_part = f.floor();
        let mut delta = f - int_part;
        let mut ip = int_part as i64;
        // guard against delta == 1 from rounding at huge negative f
        if delta >= 1.0 {
            delta = 0.0;
            ip += 1;
        }
        Ok(FluxParam {
            f,
            int_part: ip,
            delta,
        })
    }

    pub fn flux(&self) -> f64 {
        self.f
    }

    pub fn int_part(&self) -> i64 {
        self.int_part
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Convenience wrapper matching the operation vocabulary.
pub fn decompose_flux(f: f64) -> Result<FluxParam, KinematicsError> {
    FluxParam::new(f)
}

/// Linear photon polarization label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    /// Polarization normal to the plane of the photon momentum and the
    /// string axis.
    S,
    /// Polarization in that plane (along the string at normal incidence).
    P,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::S => write!(f, "s"),
            Polarization::P => write!(f, "p"),
        }
    }
}

/// Incident photon state. The closed-form amplitude is only available at
/// normal incidence (polar angle pi/2), which the constructor enforces.
#[derive(Debug, Clone, Copy)]
pub struct PhotonIn {
    kappa: f64,
    theta: f64,
    phi: f64,
    pub polarization: Polarization,
}

const THETA_TOL: f64 = 1e-12;

impl PhotonIn {
    pub fn normal_incidence(
        kappa: f64,
        phi: f64,
        polarization: Polarization,
    ) -> Result<PhotonIn, KinematicsError> {
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(KinematicsError::Invalid {
                detail: format!("photon momentum must be positive, got {kappa}"),
            });
        }
        Ok(PhotonIn {
            kappa,
            theta: FRAC_PI_2,
            phi: wrap_angle(phi),
            polarization,
        })
    }

    pub fn with_incidence(
        kappa: f64,
        theta: f64,
        phi: f64,
        polarization: Polarization,
    ) -> Result<PhotonIn, KinematicsError> {
        if (theta - FRAC_PI_2).abs() > THETA_TOL {
            return Err(KinematicsError::NotNormalIncidence { theta });
        }
        Self::normal_incidence(kappa, phi, polarization)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Transverse photon momentum kappa sin(theta); equals kappa here.
    pub fn kappa_perp(&self) -> f64 {
        self.kappa * self.theta.sin()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Created pair: particle (k_perp, phi_perp, k3, energy eps) and
/// antiparticle (kp_perp, phip_perp, kp3 = -k3, energy eps_bar), on shell
/// with eps + eps_bar equal to the photon energy.
#[derive(Debug, Clone, Copy)]
pub struct PairOut {
    pub k_perp: f64,
    pub phi_perp: f64,
    pub k3: f64,
    pub kp_perp: f64,
    pub phip_perp: f64,
    pub kp3: f64,
    pub eps: f64,
    pub eps_bar: f64,
    pub mass: f64,
}

/// Fix the antiparticle momenta from energy and z-momentum conservation:
/// kp3 = -k3 and eps_bar = kappa - eps.
pub fn solve_pair(
    kappa: f64,
    k_perp: f64,
    k3: f64,
    mass: f64,
    phi_perp: f64,
    phip_perp: f64,
) -> Result<PairOut, KinematicsError> {
    if !mass.is_finite() || mass <= 0.0 {
        return Err(KinematicsError::Invalid {
            detail: format!("mass must be positive, got {mass}"),
        });
    }
    if !k_perp.is_finite() || k_perp <= 0.0 {
        return Err(KinematicsError::Invalid {
            detail: format!("k_perp must be positive, got {k_perp}"),
        });
    }
    if kappa <= 2.0 * mass {
        return Err(KinematicsError::BelowThreshold { kappa, mass });
    }
    let eps = (k_perp * k_perp + k3 * k3 + mass * mass).sqrt();
    let eps_bar = kappa - eps;
    if eps_bar <= mass {
        return Err(KinematicsError::Forbidden {
            detail: format!(
                "particle energy {eps} leaves {eps_bar} for the antiparticle (need > {mass})"
            ),
        });
    }
    let kp_sq = eps_bar * eps_bar - k3 * k3 - mass * mass;
    if kp_sq <= 0.0 {
        return Err(KinematicsError::Forbidden {
            detail: format!("no real transverse momentum for the antiparticle (kp^2 = {kp_sq})"),
        });
    }
    Ok(PairOut {
        k_perp,
        phi_perp: wrap_angle(phi_perp),
        k3,
        kp_perp: kp_sq.sqrt(),
        phip_perp: wrap_angle(phip_perp),
        kp3: -k3,
        eps,
        eps_bar,
        mass,
    })
}

/// Momentum-excess condition: the photon's transverse momentum must exceed
/// the pair's combined transverse momenta, the surplus being absorbed by
/// the flux line. Automatically true at normal incidence for massive
/// on-shell pairs.
pub fn momentum_excess_ok(pair: &PairOut, photon: &PhotonIn) -> bool {
    photon.kappa_perp() > pair.k_perp + pair.kp_perp
}

pub fn wrap_angle(phi: f64) -> f64 {
    let mut p = phi % (2.0 * PI);
    if p < 0.0 {
        p += 2.0 * PI;
    }
    p
}
