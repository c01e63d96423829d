//! Polarization densities, the differential cross section, and the
//! near-threshold / high-energy limiting forms.
//!
//! The reduced polarization density Lambda_pol is the squared projection of
//! the reduced amplitude on the photon polarization vector, divided by the
//! product of the pair energies; the differential cross section is then
//!
//!   d sigma / (dk_perp dphi_perp dkp_perp dphip_perp dkp3)
//!     = (alpha / kappa) (2 pi)^-3 k_perp kp_perp Lambda_pol
//!
//! in natural units with e^2 = alpha.

use crate::amplitude::{
    structure_params, AmplitudeError, AmplitudeVector, StructureParams,
};
use crate::kinematics::{FluxParam, PairOut, PhotonIn, Polarization};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Reduced polarization densities for both linear polarizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationDensity {
    pub lambda_s: f64,
    pub lambda_p: f64,
}

/// One evaluated point of the differential cross section.
#[derive(Debug, Clone, Copy)]
pub struct XsecPoint {
    /// d sigma / (dk_perp dphi_perp dkp_perp dphip_perp dkp3), natural units.
    pub value: f64,
    pub polarization: Polarization,
    pub kinematics: PairOut,
    pub photon: PhotonIn,
    pub density: PolarizationDensity,
}

/// Expanded winding-sum algebra shared by the full and limiting densities:
/// |V+ +- V-|^2 written out as squared moduli plus the interference term.
fn density_braces(
    a: f64,
    b: f64,
    delta: f64,
    pi_plus: Complex64,
    pi_minus: Complex64,
) -> (f64, f64) {
    let ab = a * b;
    let sq = ab.powf(2.0 * delta) * pi_plus.norm_sqr()
        + ab.powf(-2.0 * delta) * pi_minus.norm_sqr();
    let cross =
        2.0 * (Complex64::from_polar(1.0, 2.0 * PI * delta) * pi_plus * pi_minus.conj()).re;
    (sq + cross, sq - cross)
}

/// Reduced Lambda^(s) and Lambda^(p) from the structure functions.
///
/// Lambda^(s) carries the A^2 weight of the in-plane transverse component,
/// Lambda^(p) the 4 (k3 - kp3)^2 weight of the axial component; both share
/// the D^2 sin^2(pi delta) / (kappa^4 eps eps') prefactor.
pub fn polarization_density(
    sp: &StructureParams,
    pair: &PairOut,
    flux: &FluxParam,
) -> PolarizationDensity {
    let delta = flux.delta();
    if delta == 0.0 {
        return PolarizationDensity {
            lambda_s: 0.0,
            lambda_p: 0.0,
        };
    }
    let (brace_s, brace_p) = density_braces(sp.a, sp.b, delta, sp.pi_plus(), sp.pi_minus());
    let kappa2 = sp.kappa_perp * sp.kappa_perp;
    let pref = sp.d_norm * sp.d_norm * (PI * delta).sin().powi(2)
        / (kappa2 * kappa2 * pair.eps * pair.eps_bar);
    let dz_w = 2.0 * (pair.k3 - pair.kp3);
    PolarizationDensity {
        lambda_s: pref * sp.a_coeff * sp.a_coeff * brace_s,
        lambda_p: pref * dz_w * dz_w * brace_p,
    }
}

/// Differential cross section at one kinematic point.
pub fn differential_xsec(
    flux: &FluxParam,
    photon: &PhotonIn,
    pair: &PairOut,
    alpha: f64,
) -> Result<XsecPoint, AmplitudeError> {
    crate::amplitude::validate_point(photon, pair)?;
    let sp = structure_params(
        pair.k_perp,
        pair.kp_perp,
        photon.kappa_perp(),
        pair.phi_perp,
        pair.phip_perp,
        photon.phi(),
    )?;
    let density = polarization_density(&sp, pair, flux);
    let lambda = match photon.polarization {
        Polarization::S => density.lambda_s,
        Polarization::P => density.lambda_p,
    };
    let value = alpha / photon.kappa() * (2.0 * PI).powi(-3) * pair.k_perp * pair.kp_perp * lambda;
    Ok(XsecPoint {
        value,
        polarization: photon.polarization,
        kinematics: *pair,
        photon: *photon,
        density,
    })
}

/// How far outside its asymptotic window a limiting form was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeCheck {
    Inside,
    /// Outside the nominal window but by less than a factor of ten:
    /// evaluated anyway, flagged as marginal.
    Marginal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeError {
    pub detail: String,
}

impl std::fmt::Display for RegimeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "regime violation: {}", self.detail)
    }
}

impl std::error::Error for RegimeError {}

/// Near-threshold limit of the amplitude and densities.
#[derive(Debug, Clone, Copy)]
pub struct NrLimit {
    pub amplitude: AmplitudeVector,
    pub density: PolarizationDensity,
    pub regime: RegimeCheck,
    /// Limiting structure values a -> k_perp / kappa, b -> kp_perp / kappa.
    pub a_nr: f64,
    pub b_nr: f64,
}

/// Limiting forms just above threshold: D -> 1, A -> -2 kappa, B -> 0, the
/// winding sums collapse to their leading windings, and the pair energies
/// sit at the mass. The transverse component multiplying B vanishes
/// identically here.
pub fn nr_limit(
    flux: &FluxParam,
    photon: &PhotonIn,
    pair: &PairOut,
) -> Result<NrLimit, RegimeError> {
    let m = pair.mass;
    let t = photon.kappa() / (2.0 * m) - 1.0;
    if t <= 0.0 {
        return Err(RegimeError {
            detail: format!(
                "photon energy {} at or below threshold {}",
                photon.kappa(),
                2.0 * m
            ),
        });
    }
    // inside the window up to 5% above threshold; tolerated with a warning
    // until the photon energy exceeds the window's edge tenfold
    let regime = if t <= 0.05 {
        RegimeCheck::Inside
    } else if photon.kappa() <= 10.0 * 2.0 * m * 1.05 {
        RegimeCheck::Marginal
    } else {
        return Err(RegimeError {
            detail: format!("kappa/2M - 1 = {t:.3} is far outside the near-threshold window"),
        });
    };
    let delta = flux.delta();
    let kappa = 2.0 * m; // threshold value; corrections are higher order
    let a_nr = pair.k_perp / kappa;
    let b_nr = pair.kp_perp / kappa;
    let ab = a_nr * b_nr;
    let phi_t = pair.phi_perp - photon.phi();
    let phi_tp = pair.phip_perp - photon.phi();
    let vp = Complex64::from_polar(ab.powf(delta), PI * delta);
    let vm = Complex64::from_polar(ab.powf(1.0 - delta), -PI * delta)
        * Complex64::from_polar(1.0, phi_tp - phi_t);
    let g = Complex64::from_polar(1.0, flux.int_part() as f64 * (pair.phip_perp - pair.phi_perp))
        * ((PI * delta).sin() / (kappa * kappa));
    let a_coeff_nr = -2.0 * kappa;
    let i = Complex64::new(0.0, 1.0);
    let amplitude = AmplitudeVector {
        d1: i * g * a_coeff_nr * (vp + vm),
        d2: Complex64::new(0.0, 0.0),
        dz: g * 2.0 * (pair.k3 - pair.kp3) * (vp - vm),
    };
    let pi_plus = Complex64::new(1.0, 0.0);
    let pi_minus = Complex64::from_polar(ab, phi_tp - phi_t);
    let (brace_s, brace_p) = density_braces(a_nr, b_nr, delta, pi_plus, pi_minus);
    let kappa2 = kappa * kappa;
    let pref = (PI * delta).sin().powi(2) / (kappa2 * kappa2 * m * m);
    let dz_w = 2.0 * (pair.k3 - pair.kp3);
    let density = PolarizationDensity {
        lambda_s: pref * a_coeff_nr * a_coeff_nr * brace_s,
        lambda_p: pref * dz_w * dz_w * brace_p,
    };
    Ok(NrLimit {
        amplitude,
        density,
        regime,
        a_nr,
        b_nr,
    })
}

/// High-energy (collinear) limit of the winding sums and densities.
#[derive(Debug, Clone, Copy)]
pub struct UrLimit {
    pub sigma_plus_ur: f64,
    pub sigma_minus_ur: f64,
    pub density: PolarizationDensity,
    pub regime: RegimeCheck,
}

/// Far above threshold the pair is emitted along the photon azimuth; with
/// all azimuths collinear the winding sums become real with
/// sigma_minus / sigma_plus = a / b exactly, and the pair energies are
/// kinetic: eps ~ k, eps' ~ k'.
pub fn ur_limit(
    sp: &StructureParams,
    flux: &FluxParam,
    pair: &PairOut,
) -> Result<UrLimit, RegimeError> {
    let m = pair.mass;
    let kappa = sp.kappa_perp;
    let ratio = kappa / (2.0 * m);
    let regime = if ratio >= 100.0 {
        RegimeCheck::Inside
    } else if ratio >= 10.0 {
        RegimeCheck::Marginal
    } else {
        return Err(RegimeError {
            detail: format!("kappa = {kappa} is only {ratio:.1}x the threshold"),
        });
    };
    let (a, b) = (sp.a, sp.b);
    let delta = flux.delta();
    let denom = (1.0 - a) * (1.0 - b);
    let sigma_plus_ur = b / denom;
    let sigma_minus_ur = a / denom;
    let pi_plus = Complex64::new(1.0 / denom, 0.0);
    let pi_minus = Complex64::new(a * b / denom, 0.0);
    let (brace_s, brace_p) = density_braces(a, b, delta, pi_plus, pi_minus);
    let k = (pair.k3 * pair.k3 + pair.k_perp * pair.k_perp).sqrt();
    let kp = (pair.kp3 * pair.kp3 + pair.kp_perp * pair.kp_perp).sqrt();
    let kappa2 = kappa * kappa;
    let pref = sp.d_norm * sp.d_norm * (PI * delta).sin().powi(2) / (kappa2 * kappa2 * k * kp);
    let dz_w = 2.0 * (pair.k3 - pair.kp3);
    let density = PolarizationDensity {
        lambda_s: pref * sp.a_coeff * sp.a_coeff * brace_s,
        lambda_p: pref * dz_w * dz_w * brace_p,
    };
    Ok(UrLimit {
        sigma_plus_ur,
        sigma_minus_ur,
        density,
        regime,
    })
}
