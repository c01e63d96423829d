//! Closed-form pair-creation amplitude and its partial-wave oracles.
//!
//! The amplitude for a photon at normal incidence on the flux line has an
//! exact closed form built from two structure functions a, b in (0, 1), a
//! normalization D, two momentum combinations A and B, and two geometric
//! sums over the windings of particle and antiparticle around the line.
//! The oracle in [`oracle`] recomputes it by brute force, term by term in
//! the winding indices, either from analytic radial integrals (tier A) or
//! by direct oscillatory quadrature (tier B).
//!
//! All amplitudes are the dimensionless reduced quantity: the raw matrix
//! element times L^2 sqrt(eps eps'), which removes the normalization-box
//! size from every observable downstream.

pub mod oracle;

use crate::kinematics::{FluxParam, KinematicsError, PairOut, PhotonIn};
use crate::specfun::SpecFunError;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum AmplitudeError {
    Kinematics(KinematicsError),
    SpecFun(SpecFunError),
    /// kappa_perp <= k_perp + kp_perp: nothing left for the flux line.
    MomentumExcessViolated { kappa_perp: f64, sum: f64 },
    /// Structure functions left (0, 1): inconsistent inputs.
    StructureOutOfRange { a: f64, b: f64 },
    /// Energy or z-momentum bookkeeping of the supplied pair is broken.
    NotOnShell { detail: String },
    /// The requested tolerance needs more partial waves than supported.
    MMaxTooSmall { required: usize, cap: usize },
}

impl fmt::Display for AmplitudeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmplitudeError::Kinematics(e) => write!(f, "{e}"),
            AmplitudeError::SpecFun(e) => write!(f, "{e}"),
            AmplitudeError::MomentumExcessViolated { kappa_perp, sum } => write!(
                f,
                "momentum excess violated: kappa_perp = {kappa_perp} <= k_perp + kp_perp = {sum}"
            ),
            AmplitudeError::StructureOutOfRange { a, b } => {
                write!(f, "structure functions out of (0,1): a = {a}, b = {b}")
            }
            AmplitudeError::NotOnShell { detail } => write!(f, "pair not on shell: {detail}"),
            AmplitudeError::MMaxTooSmall { required, cap } => write!(
                f,
                "winding cutoff {required} exceeds the supported maximum {cap}"
            ),
        }
    }
}

impl std::error::Error for AmplitudeError {}

impl From<KinematicsError> for AmplitudeError {
    fn from(e: KinematicsError) -> Self {
        AmplitudeError::Kinematics(e)
    }
}

impl From<SpecFunError> for AmplitudeError {
    fn from(e: SpecFunError) -> Self {
        AmplitudeError::SpecFun(e)
    }
}

/// Building blocks of the closed form.
///
/// `a` and `b` are the geometric-sum ratios of particle and antiparticle,
/// `d_norm` the shared normalization D, `a_coeff` / `b_coeff` the momentum
/// combinations multiplying the two transverse amplitude components, and
/// `sigma_plus` / `sigma_minus` the resummed winding sums.
#[derive(Debug, Clone, Copy)]
pub struct StructureParams {
    pub a: f64,
    pub b: f64,
    /// D = kappa_perp^2 a b / (k_perp kp_perp (1 - a^2 b^2)).
    pub d_norm: f64,
    /// A = k_perp (a - 1/a) + kp_perp (b - 1/b).
    pub a_coeff: f64,
    /// B = k_perp (a + 1/a) - kp_perp (b + 1/b).
    pub b_coeff: f64,
    pub sigma_plus: Complex64,
    pub sigma_minus: Complex64,
    // kept for the amplitude assembly
    pub(crate) kappa_perp: f64,
    /// phi_perp - phi_k
    pub(crate) phi_t: f64,
    /// phip_perp - phi_k
    pub(crate) phi_tp: f64,
}

/// Compute the structure functions for transverse momenta satisfying the
/// momentum-excess condition kappa_perp > k_perp + kp_perp.
pub fn structure_params(
    k_perp: f64,
    kp_perp: f64,
    kappa_perp: f64,
    phi_perp: f64,
    phip_perp: f64,
    phi_k: f64,
) -> Result<StructureParams, AmplitudeError> {
    if k_perp <= 0.0 || kp_perp <= 0.0 || kappa_perp <= 0.0
        || !(k_perp.is_finite() && kp_perp.is_finite() && kappa_perp.is_finite())
    {
        return Err(AmplitudeError::NotOnShell {
            detail: format!(
                "transverse momenta must be positive: {k_perp}, {kp_perp}, {kappa_perp}"
            ),
        });
    }
    let sum = k_perp + kp_perp;
    if kappa_perp <= sum {
        return Err(AmplitudeError::MomentumExcessViolated {
            kappa_perp,
            sum,
        });
    }
    let k2 = kappa_perp * kappa_perp;
    // radicand factors (kappa^2 - (k+k')^2)(kappa^2 - (k-k')^2), both
    // positive in this regime
    let q = ((k2 - sum * sum) * (k2 - (k_perp - kp_perp) * (k_perp - kp_perp))).sqrt();
    let a = 2.0 * k_perp * kappa_perp / ((k2 + k_perp * k_perp - kp_perp * kp_perp) + q);
    let b = 2.0 * kp_perp * kappa_perp / ((k2 + kp_perp * kp_perp - k_perp * k_perp) + q);
    let in_unit = |v: f64| v > 0.0 && v < 1.0;
    if !in_unit(a) || !in_unit(b) {
        return Err(AmplitudeError::StructureOutOfRange { a, b });
    }
    let d_norm = k2 * a * b / (k_perp * kp_perp * (1.0 - a * a * b * b));
    let a_coeff = k_perp * (a - 1.0 / a) + kp_perp * (b - 1.0 / b);
    let b_coeff = k_perp * (a + 1.0 / a) - kp_perp * (b + 1.0 / b);

    let phi_t = phi_perp - phi_k;
    let phi_tp = phip_perp - phi_k;
    let ep = |x: f64| Complex64::from_polar(1.0, x);
    let sigma_plus =
        1.0 / (1.0 - a * ep(phi_t)) * (b * ep(-phi_tp)) / (1.0 - b * ep(-phi_tp));
    let sigma_minus =
        (a * ep(-phi_t)) / (1.0 - a * ep(-phi_t)) * (1.0 / (1.0 - b * ep(phi_tp)));

    Ok(StructureParams {
        a,
        b,
        d_norm,
        a_coeff,
        b_coeff,
        sigma_plus,
        sigma_minus,
        kappa_perp,
        phi_t,
        phi_tp,
    })
}

impl StructureParams {
    /// Full winding sum for the co-rotating sector (the series starting at
    /// zero windings); equals sigma_plus with its leading factor divided out.
    pub(crate) fn pi_plus(&self) -> Complex64 {
        let ep = |x: f64| Complex64::from_polar(1.0, x);
        1.0 / ((1.0 - self.a * ep(self.phi_t)) * (1.0 - self.b * ep(-self.phi_tp)))
    }

    /// Counter-rotating winding sum, one full winding in each index.
    pub(crate) fn pi_minus(&self) -> Complex64 {
        let ep = |x: f64| Complex64::from_polar(1.0, x);
        (self.a * ep(-self.phi_t)) * (self.b * ep(self.phi_tp))
            / ((1.0 - self.a * ep(-self.phi_t)) * (1.0 - self.b * ep(self.phi_tp)))
    }

    /// The two winding combinations entering every amplitude component:
    /// e^{+i pi delta} (ab)^{+delta} Pi+ and e^{-i pi delta} (ab)^{-delta} Pi-.
    pub(crate) fn winding_combos(&self, delta: f64) -> (Complex64, Complex64) {
        let ab = self.a * self.b;
        let vp = Complex64::from_polar(ab.powf(delta), PI * delta) * self.pi_plus();
        let vm = Complex64::from_polar(ab.powf(-delta), -PI * delta) * self.pi_minus();
        (vp, vm)
    }
}

/// The three complex components of the reduced amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeVector {
    pub d1: Complex64,
    pub d2: Complex64,
    pub dz: Complex64,
}

impl AmplitudeVector {
    pub const ZERO: AmplitudeVector = AmplitudeVector {
        d1: Complex64::new(0.0, 0.0),
        d2: Complex64::new(0.0, 0.0),
        dz: Complex64::new(0.0, 0.0),
    };

    pub fn norm(&self) -> f64 {
        (self.d1.norm_sqr() + self.d2.norm_sqr() + self.dz.norm_sqr()).sqrt()
    }

    pub fn max_component(&self) -> f64 {
        self.d1.norm().max(self.d2.norm()).max(self.dz.norm())
    }
}

pub(crate) fn validate_point(
    photon: &PhotonIn,
    pair: &PairOut,
) -> Result<(), AmplitudeError> {
    if (pair.k3 + pair.kp3).abs() > 1e-10 * (1.0 + pair.k3.abs()) {
        return Err(AmplitudeError::NotOnShell {
            detail: format!("k3 + kp3 = {} must vanish", pair.k3 + pair.kp3),
        });
    }
    let de = (pair.eps + pair.eps_bar - photon.kappa()).abs();
    if de > 1e-9 * photon.kappa() {
        return Err(AmplitudeError::NotOnShell {
            detail: format!("energy mismatch eps + eps' - kappa = {de:e}"),
        });
    }
    Ok(())
}

/// Closed-form reduced amplitude for a photon at normal incidence.
///
/// The common prefactor is D sin(pi delta) e^{i n (phip - phi)} / (n the
/// integer flux part) kappa_perp^2; the components are
///
/// - d1 = i A (V+ + V-) x prefactor,
/// - d2 =   B (V+ - V-) x prefactor,
/// - dz = 2 (k3 - k3') (V+ - V-) x prefactor,
///
/// with V+- the two winding combinations. Integer flux (delta = 0) gives
/// the exact zero vector: the string is invisible then.
pub fn closed_form_amplitude(
    flux: &FluxParam,
    photon: &PhotonIn,
    pair: &PairOut,
) -> Result<AmplitudeVector, AmplitudeError> {
    validate_point(photon, pair)?;
    let sp = structure_params(
        pair.k_perp,
        pair.kp_perp,
        photon.kappa_perp(),
        pair.phi_perp,
        pair.phip_perp,
        photon.phi(),
    )?;
    Ok(closed_form_from_structure(flux, &sp, pair))
}

/// Closed form given precomputed structure functions.
pub fn closed_form_from_structure(
    flux: &FluxParam,
    sp: &StructureParams,
    pair: &PairOut,
) -> AmplitudeVector {
    let delta = flux.delta();
    if delta == 0.0 {
        return AmplitudeVector::ZERO;
    }
    let (vp, vm) = sp.winding_combos(delta);
    let dphi = pair.phip_perp - pair.phi_perp;
    let g = Complex64::from_polar(1.0, flux.int_part() as f64 * dphi)
        * (sp.d_norm * (PI * delta).sin() / (sp.kappa_perp * sp.kappa_perp));
    let i = Complex64::new(0.0, 1.0);
    AmplitudeVector {
        d1: i * g * sp.a_coeff * (vp + vm),
        d2: g * sp.b_coeff * (vp - vm),
        dz: g * 2.0 * (pair.k3 - pair.kp3) * (vp - vm),
    }
}

/// Winding classes of the partial-wave expansion, by the signs of the
/// reduced indices (m_bar, mp_bar).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermClass {
    /// both indices negative
    T1,
    /// m_bar < 0, mp_bar >= 0
    T2,
    /// m_bar >= 0, mp_bar < 0
    T3,
    /// both indices non-negative
    T4,
}

pub fn classify_term(m_bar: i64, mp_bar: i64) -> TermClass {
    match (m_bar < 0, mp_bar < 0) {
        (true, true) => TermClass::T1,
        (true, false) => TermClass::T2,
        (false, true) => TermClass::T3,
        (false, false) => TermClass::T4,
    }
}

/// Selection rule: the pair must wind around the string in opposite senses.
/// True exactly when the reduced indices have opposite signs (zero counts
/// as positive).
pub fn selection_rule(m_bar: i64, mp_bar: i64) -> bool {
    (mp_bar >= 0 && m_bar < 0) || (mp_bar < 0 && m_bar >= 0)
}
