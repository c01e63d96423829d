//! Brute-force partial-wave recomputation of the amplitude.
//!
//! The amplitude is a double sum over winding indices (m_bar for the
//! particle, mp_bar for the antiparticle). Each term couples Bessel
//! functions of orders shifted by the fractional flux delta through radial
//! integrals of three Bessel functions, all in the momentum-excess regime.
//!
//! Tier A evaluates those radial integrals from their closed forms:
//! zero when the large-momentum order equals the sum of the other two,
//! and a power form in the structure functions when it equals their
//! difference. Tier B evaluates every radial integral by oscillatory
//! quadrature instead, sharing one quadrature grid across all terms and
//! filling the needed Bessel orders by stable recurrences.
//!
//! The antiparticle winding index used here is chosen so that its sign
//! equals the sign of the shifted order (mp_bar >= 0 exactly when the
//! antiparticle order exceeds the flux defect); this makes the selection
//! rule a clean statement about index signs.

use super::{
    classify_term, selection_rule, structure_params, AmplitudeError, AmplitudeVector,
    StructureParams, TermClass,
};
use crate::kinematics::{FluxParam, PairOut, PhotonIn};
use crate::specfun::{j_ladder, triple_bessel_integral, QuadGrid, QuadratureConfig, SpecFunError};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which radial-integral backend the oracle uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleTier {
    /// Analytic per-term radial integrals.
    A,
    /// Direct oscillatory quadrature for every radial integral.
    B,
}

/// Largest winding cutoff the oracle supports (bounded by the Bessel-order
/// range).
pub const M_MAX_CAP: usize = 196;

/// Oracle output: the reduced amplitude, the winding cutoff used, and a
/// rigorous geometric bound on the truncation error of the vector norm.
#[derive(Debug, Clone, Copy)]
pub struct OracleResult {
    pub amplitude: AmplitudeVector,
    pub m_max: usize,
    pub truncation_bound: f64,
}

/// One term of the partial-wave double sum.
#[derive(Debug, Clone, Copy)]
pub struct PartialWaveTerm {
    pub m_bar: i64,
    pub mp_bar: i64,
    pub class: TermClass,
    /// Scattering coefficient of the particle partial wave.
    pub c_m: Complex64,
    /// Scattering coefficient of the antiparticle partial wave.
    pub c_mp: Complex64,
    /// Contribution to (d1, d2, dz).
    pub d1: Complex64,
    pub d2: Complex64,
    pub dz: Complex64,
}

/// Geometry shared by every term of one oracle evaluation.
struct OracleCtx {
    delta: f64,
    int_f: i64,
    k: f64,
    kp: f64,
    kappa: f64,
    k3: f64,
    kp3: f64,
    phi: f64,
    phip: f64,
    phik: f64,
    sp: StructureParams,
}

impl OracleCtx {
    fn new(
        flux: &FluxParam,
        photon: &PhotonIn,
        pair: &PairOut,
    ) -> Result<OracleCtx, AmplitudeError> {
        let sp = structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        )?;
        Ok(OracleCtx {
            delta: flux.delta(),
            int_f: flux.int_part(),
            k: pair.k_perp,
            kp: pair.kp_perp,
            kappa: photon.kappa_perp(),
            k3: pair.k3,
            kp3: pair.kp3,
            phi: pair.phi_perp,
            phip: pair.phip_perp,
            phik: photon.phi(),
            sp,
        })
    }

    /// Shifted orders and sign data for a term.
    fn orders(&self, m_bar: i64, mp_bar: i64) -> TermOrders {
        let mt = m_bar as f64 + self.delta;
        let mpt = mp_bar as f64 + 1.0 - self.delta;
        TermOrders {
            q0: m_bar + mp_bar + 1,
            s_pos: mt >= 0.0,
            sp_pos: mpt > 0.0,
            a0: mt.abs(),
            b0: mpt.abs(),
        }
    }

    /// Phase common to all three components of a term: the product of the
    /// scattering coefficients with the angular-integral phases stripped of
    /// the branch-dependent factors.
    fn base_phase(&self, m_bar: i64, mp_bar: i64, o: &TermOrders) -> Complex64 {
        let mp_old = (mp_bar + 1) as f64;
        let arg = -(o.q0 as f64) * PI
            + m_bar as f64 * self.phi
            + mp_old * self.phip
            + self.int_f as f64 * (self.phip - self.phi)
            + 0.5 * PI * (o.a0 + o.b0)
            - o.q0 as f64 * (self.phik + 0.5 * PI);
        Complex64::from_polar(1.0, arg)
    }

    /// Scattering coefficients of the two partial waves.
    fn coefficients(&self, m_bar: i64, mp_bar: i64, o: &TermOrders) -> (Complex64, Complex64) {
        let m = (m_bar - self.int_f) as f64;
        let mp = (mp_bar + 1 + self.int_f) as f64;
        let c_m = Complex64::from_polar(1.0, m * (PI - self.phi) - 0.5 * PI * o.a0);
        let c_mp = Complex64::from_polar(1.0, -mp * (PI - self.phip) + 0.5 * PI * o.b0);
        (c_m, c_mp)
    }
}

struct TermOrders {
    /// q0 = m + m' in the original (unreduced) indices.
    q0: i64,
    s_pos: bool,
    sp_pos: bool,
    /// |m_tilde|
    a0: f64,
    /// |mp_tilde|
    b0: f64,
}

/// Radial integral specs of one term: (k-order, kp-order, kappa-order,
/// weight). Two of the four ladder products survive in each transverse
/// branch; dz has a single product.
struct TermSpecs {
    plus: [(f64, f64, i64, f64); 2],
    minus: [(f64, f64, i64, f64); 2],
    z: (f64, f64, i64),
}

fn term_specs(ctx: &OracleCtx, o: &TermOrders) -> TermSpecs {
    let lam_p = 1 - o.q0;
    let lam_m = -1 - o.q0;
    let k = ctx.k;
    let kp = ctx.kp;
    // d+ branch: 2k Y(A-1, B) or -2k Y(A+1, B); -2k' Y(A, B-1) or +2k' Y(A, B+1)
    let k_plus = if o.s_pos {
        (o.a0 - 1.0, o.b0, lam_p, 2.0 * k)
    } else {
        (o.a0 + 1.0, o.b0, lam_p, -2.0 * k)
    };
    let kp_plus = if o.sp_pos {
        (o.a0, o.b0 - 1.0, lam_p, -2.0 * kp)
    } else {
        (o.a0, o.b0 + 1.0, lam_p, 2.0 * kp)
    };
    // d- branch: the opposite ladder choices
    let k_minus = if o.s_pos {
        (o.a0 + 1.0, o.b0, lam_m, -2.0 * k)
    } else {
        (o.a0 - 1.0, o.b0, lam_m, 2.0 * k)
    };
    let kp_minus = if o.sp_pos {
        (o.a0, o.b0 + 1.0, lam_m, 2.0 * kp)
    } else {
        (o.a0, o.b0 - 1.0, lam_m, -2.0 * kp)
    };
    TermSpecs {
        plus: [k_plus, kp_plus],
        minus: [k_minus, kp_minus],
        z: (o.a0, o.b0, -o.q0),
    }
}

/// Analytic value of the radial integral
/// int_0^inf x J_mu(k x) J_nu(kp x) J_lam(kappa x) dx in the
/// momentum-excess regime:
/// - zero when lam = +-(mu + nu),
/// - -(2 D / (pi kappa^2)) sin(pi nu) a^mu b^nu when lam = mu - nu,
/// - -(2 D / (pi kappa^2)) sin(pi mu) a^mu b^nu when lam = nu - mu.
fn radial_analytic(sp: &StructureParams, mu: f64, nu: f64, lam: i64) -> Result<f64, SpecFunError> {
    let l = lam as f64;
    let tol = 1e-9;
    if (l - (mu + nu)).abs() < tol || (l + (mu + nu)).abs() < tol {
        return Ok(0.0);
    }
    let base = -2.0 * sp.d_norm / (PI * sp.kappa_perp * sp.kappa_perp)
        * sp.a.powf(mu)
        * sp.b.powf(nu);
    if (l - (mu - nu)).abs() < tol {
        Ok(base * (PI * nu).sin())
    } else if (l - (nu - mu)).abs() < tol {
        Ok(base * (PI * mu).sin())
    } else {
        Err(SpecFunError::OutsideRegime {
            detail: format!("no closed form for orders ({mu}, {nu}, {lam})"),
        })
    }
}

/// Assemble one term's (d1, d2, dz) contribution from its radial values.
fn assemble_term(
    ctx: &OracleCtx,
    base: Complex64,
    r_plus: f64,
    r_minus: f64,
    r_z: f64,
) -> (Complex64, Complex64, Complex64) {
    // angular scalars relative to the common phase: the d+ branch carries
    // e^{+i pi/2} (+i), the d- branch e^{-i pi/2} (-i), dz carries 1
    let i = Complex64::new(0.0, 1.0);
    let quarter_i = i / 4.0;
    let two_pi = 2.0 * PI;
    let raw_dp = quarter_i * base * (two_pi * i) * r_plus;
    let raw_dm = quarter_i * base * (-two_pi * i) * r_minus;
    let raw_dz = 0.5 * (ctx.k3 - ctx.kp3) * base * two_pi * r_z;
    // relabel the raw frame into the output components
    let d1 = -((raw_dp - raw_dm) / (2.0 * i));
    let d2 = -((raw_dp + raw_dm) / 2.0);
    let dz = -raw_dz;
    (d1, d2, dz)
}

/// Smallest winding cutoff whose geometric tail is below `tol`, per the
/// default rule max(a, b)^m < tol (1 - max(a, b)).
pub fn default_m_max(sp: &StructureParams, tol: f64) -> Result<usize, AmplitudeError> {
    let mx = sp.a.max(sp.b);
    let required = ((tol * (1.0 - mx)).ln() / mx.ln()).ceil().max(1.0) as usize;
    if required > M_MAX_CAP {
        return Err(AmplitudeError::MMaxTooSmall {
            required,
            cap: M_MAX_CAP,
        });
    }
    Ok(required)
}

/// Rigorous bound on the vector-norm truncation error of the double sum at
/// winding cutoff m_max.
pub fn truncation_bound(sp: &StructureParams, delta: f64, k3: f64, kp3: f64, m_max: usize) -> f64 {
    let (a, b) = (sp.a, sp.b);
    let ab = a * b;
    // the outermost discarded winding feeds powers as low as m_max - 1
    // through its down-shifted ladder order
    let m1 = m_max as i32 - 1;
    let tail = (a.powi(m1) + b.powi(m1)) / ((1.0 - a) * (1.0 - b));
    let w = (ab.powf(delta) + ab.powf(1.0 - delta)) * tail;
    let g = sp.d_norm * (PI * delta).sin().abs() / (sp.kappa_perp * sp.kappa_perp);
    let coeff = (sp.a_coeff * sp.a_coeff
        + sp.b_coeff * sp.b_coeff
        + 4.0 * (k3 - kp3) * (k3 - kp3))
        .sqrt();
    g * coeff * w
}

/// Brute-force amplitude by summing partial waves up to |index| <= m_max.
pub fn oracle_amplitude(
    flux: &FluxParam,
    photon: &PhotonIn,
    pair: &PairOut,
    m_max: usize,
    tier: OracleTier,
    cfg: &QuadratureConfig,
) -> Result<OracleResult, AmplitudeError> {
    super::validate_point(photon, pair)?;
    if m_max < 1 {
        return Err(AmplitudeError::MMaxTooSmall {
            required: 1,
            cap: M_MAX_CAP,
        });
    }
    if m_max > M_MAX_CAP {
        return Err(AmplitudeError::MMaxTooSmall {
            required: m_max,
            cap: M_MAX_CAP,
        });
    }
    let ctx = OracleCtx::new(flux, photon, pair)?;
    let mm = m_max as i64;

    let mut d1 = Complex64::new(0.0, 0.0);
    let mut d2 = Complex64::new(0.0, 0.0);
    let mut dz = Complex64::new(0.0, 0.0);

    match tier {
        OracleTier::A => {
            for m_bar in -mm..=mm {
                for mp_bar in -mm..=mm {
                    let o = ctx.orders(m_bar, mp_bar);
                    let specs = term_specs(&ctx, &o);
                    let r_plus = radial_pair_analytic(&ctx.sp, &specs.plus)?;
                    let r_minus = radial_pair_analytic(&ctx.sp, &specs.minus)?;
                    let r_z = radial_analytic(&ctx.sp, specs.z.0, specs.z.1, specs.z.2)?;
                    let base = ctx.base_phase(m_bar, mp_bar, &o);
                    let (t1, t2, tz) = assemble_term(&ctx, base, r_plus, r_minus, r_z);
                    d1 += t1;
                    d2 += t2;
                    dz += tz;
                }
            }
        }
        OracleTier::B => {
            let table = quadrature_radial_table(&ctx, m_max, cfg)?;
            let mut idx = 0usize;
            for m_bar in -mm..=mm {
                for mp_bar in -mm..=mm {
                    if !selection_rule(m_bar, mp_bar) {
                        continue; // analytically zero classes are skipped
                    }
                    let o = ctx.orders(m_bar, mp_bar);
                    let specs = term_specs(&ctx, &o);
                    let r_plus = specs.plus[0].3 * table[idx] + specs.plus[1].3 * table[idx + 1];
                    let r_minus =
                        specs.minus[0].3 * table[idx + 2] + specs.minus[1].3 * table[idx + 3];
                    let r_z = table[idx + 4];
                    idx += 5;
                    let base = ctx.base_phase(m_bar, mp_bar, &o);
                    let (t1, t2, tz) = assemble_term(&ctx, base, r_plus, r_minus, r_z);
                    d1 += t1;
                    d2 += t2;
                    dz += tz;
                }
            }
        }
    }

    Ok(OracleResult {
        amplitude: AmplitudeVector { d1, d2, dz },
        m_max,
        truncation_bound: truncation_bound(&ctx.sp, ctx.delta, ctx.k3, ctx.kp3, m_max),
    })
}

fn radial_pair_analytic(
    sp: &StructureParams,
    specs: &[(f64, f64, i64, f64); 2],
) -> Result<f64, AmplitudeError> {
    let mut acc = 0.0;
    for &(mu, nu, lam, w) in specs {
        acc += w * radial_analytic(sp, mu, nu, lam)?;
    }
    Ok(acc)
}

/// One term of the oracle with full bookkeeping, for the selection-rule and
/// resummation checks. Tier B evaluates the term's radial integrals by
/// quadrature through `triple_bessel_integral`.
pub fn oracle_term(
    flux: &FluxParam,
    photon: &PhotonIn,
    pair: &PairOut,
    m_bar: i64,
    mp_bar: i64,
    tier: OracleTier,
    cfg: &QuadratureConfig,
) -> Result<PartialWaveTerm, AmplitudeError> {
    let ctx = OracleCtx::new(flux, photon, pair)?;
    let o = ctx.orders(m_bar, mp_bar);
    let specs = term_specs(&ctx, &o);
    let radial = |mu: f64, nu: f64, lam: i64| -> Result<f64, AmplitudeError> {
        match tier {
            OracleTier::A => Ok(radial_analytic(&ctx.sp, mu, nu, lam)?),
            OracleTier::B => {
                let sign = if lam < 0 && lam % 2 != 0 { -1.0 } else { 1.0 };
                Ok(sign
                    * triple_bessel_integral(
                        mu,
                        nu,
                        lam.unsigned_abs() as f64,
                        ctx.k,
                        ctx.kp,
                        ctx.kappa,
                        cfg,
                    )?)
            }
        }
    };
    let r_plus = specs.plus[0].3 * radial(specs.plus[0].0, specs.plus[0].1, specs.plus[0].2)?
        + specs.plus[1].3 * radial(specs.plus[1].0, specs.plus[1].1, specs.plus[1].2)?;
    let r_minus = specs.minus[0].3 * radial(specs.minus[0].0, specs.minus[0].1, specs.minus[0].2)?
        + specs.minus[1].3 * radial(specs.minus[1].0, specs.minus[1].1, specs.minus[1].2)?;
    let r_z = radial(specs.z.0, specs.z.1, specs.z.2)?;
    let base = ctx.base_phase(m_bar, mp_bar, &o);
    let (d1, d2, dz) = assemble_term(&ctx, base, r_plus, r_minus, r_z);
    let (c_m, c_mp) = ctx.coefficients(m_bar, mp_bar, &o);
    Ok(PartialWaveTerm {
        m_bar,
        mp_bar,
        class: classify_term(m_bar, mp_bar),
        c_m,
        c_mp,
        d1,
        d2,
        dz,
    })
}

/// Radial value of the representative term family with the
/// negative-winding ladder coefficient (1 - sgn) on the particle side:
/// coefficient times int x J_{A-1}(k x) J_B(kp x) J_{-(q0+1)}(kappa x) dx.
///
/// This family vanishes identically for every class except T2: the
/// coefficient kills T3 and T4 (positive shifted order), and the radial
/// integral is of the vanishing (order-sum) type throughout T1.
pub fn g1_family_term(
    flux: &FluxParam,
    photon: &PhotonIn,
    pair: &PairOut,
    m_bar: i64,
    mp_bar: i64,
    tier: OracleTier,
    cfg: &QuadratureConfig,
) -> Result<f64, AmplitudeError> {
    let ctx = OracleCtx::new(flux, photon, pair)?;
    let o = ctx.orders(m_bar, mp_bar);
    if o.s_pos {
        return Ok(0.0); // (1 - sgn) coefficient vanishes
    }
    let lam = -1 - o.q0;
    let (mu, nu) = (o.a0 - 1.0, o.b0);
    let r = match tier {
        OracleTier::A => radial_analytic(&ctx.sp, mu, nu, lam)?,
        OracleTier::B => {
            let sign = if lam < 0 && lam % 2 != 0 { -1.0 } else { 1.0 };
            sign * triple_bessel_integral(
                mu,
                nu,
                lam.unsigned_abs() as f64,
                ctx.k,
                ctx.kp,
                ctx.kappa,
                cfg,
            )?
        }
    };
    Ok(2.0 * ctx.k * r)
}

/// Partial sum of the T2-class sector only, for the geometric-resummation
/// check: the counter-rotating winding combination resummed in closed form
/// is i A V- for d1 (times the common prefactor).
pub fn t2_sector_partial_sum(
    flux: &FluxParam,
    photon: &PhotonIn,
    pair: &PairOut,
    m_max: usize,
) -> Result<Complex64, AmplitudeError> {
    let ctx = OracleCtx::new(flux, photon, pair)?;
    let mm = m_max as i64;
    let mut d1 = Complex64::new(0.0, 0.0);
    for m_bar in -mm..=-1 {
        for mp_bar in 0..=mm {
            let o = ctx.orders(m_bar, mp_bar);
            let specs = term_specs(&ctx, &o);
            let r_plus = radial_pair_analytic(&ctx.sp, &specs.plus)?;
            let r_minus = radial_pair_analytic(&ctx.sp, &specs.minus)?;
            let r_z = radial_analytic(&ctx.sp, specs.z.0, specs.z.1, specs.z.2)?;
            let base = ctx.base_phase(m_bar, mp_bar, &o);
            let (t1, _, _) = assemble_term(&ctx, base, r_plus, r_minus, r_z);
            d1 += t1;
        }
    }
    Ok(d1)
}

/// Closed form of the T2-class sector of d1 (the V- term alone).
pub fn t2_sector_closed_form(
    flux: &FluxParam,
    photon: &PhotonIn,
    pair: &PairOut,
) -> Result<Complex64, AmplitudeError> {
    let ctx = OracleCtx::new(flux, photon, pair)?;
    let delta = flux.delta();
    let (_, vm) = ctx.sp.winding_combos(delta);
    let dphi = pair.phip_perp - pair.phi_perp;
    let g = Complex64::from_polar(1.0, flux.int_part() as f64 * dphi)
        * (ctx.sp.d_norm * (PI * delta).sin() / (ctx.sp.kappa_perp * ctx.sp.kappa_perp));
    Ok(Complex64::new(0.0, 1.0) * g * ctx.sp.a_coeff * vm)
}

// ---------------------------------------------------------------------------
// tier-B batched quadrature
// ---------------------------------------------------------------------------

/// Evaluate all radial integrals of the selection-allowed terms on a shared
/// quadrature grid. Returns 5 values per allowed (m_bar, mp_bar) pair, in
/// loop order: the two d+ integrals, the two d- integrals, then dz.
fn quadrature_radial_table(
    ctx: &OracleCtx,
    m_max: usize,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>, AmplitudeError> {
    cfg.validate().map_err(AmplitudeError::SpecFun)?;
    let omega_slow = ctx.kappa - ctx.k - ctx.kp;
    if omega_slow < 0.05 {
        return Err(AmplitudeError::SpecFun(SpecFunError::OutsideRegime {
            detail: format!(
                "tier B needs a clear momentum excess (kappa - k - k' = {omega_slow:e})"
            ),
        }));
    }
    let mm = m_max as i64;
    let delta = ctx.delta;

    // ladder layouts per argument; see orders() for the families
    let n_k1 = m_max + 3; // delta - 1 + j
    let n_k2 = m_max + 2; // -delta + j
    let n_p1 = m_max + 3; // -delta + j
    let n_p2 = m_max + 2; // delta - 1 + j
    let n_int = 2 * m_max + 3; // integer orders at the photon argument

    // enumerate integral specs as ladder indices
    #[derive(Clone, Copy)]
    struct Spec {
        k_ladder: u8,
        k_idx: u16,
        p_ladder: u8,
        p_idx: u16,
        lam: i32,
    }
    let k_index = |mu: f64| -> (u8, u16) {
        // mu is either delta-1+j (ladder 0) or -delta+j (ladder 1)
        let j0 = mu - (delta - 1.0);
        let j1 = mu + delta;
        if (j0 - j0.round()).abs() < 1e-9 && j0.round() >= 0.0 {
            (0, j0.round() as u16)
        } else {
            debug_assert!((j1 - j1.round()).abs() < 1e-9 && j1.round() >= 0.0);
            (1, j1.round() as u16)
        }
    };
    let p_index = |nu: f64| -> (u8, u16) {
        let j0 = nu + delta; // -delta + j (ladder 0)
        let j1 = nu - (delta - 1.0); // delta - 1 + j (ladder 1)
        if (j0 - j0.round()).abs() < 1e-9 && j0.round() >= 0.0 {
            (0, j0.round() as u16)
        } else {
            debug_assert!((j1 - j1.round()).abs() < 1e-9 && j1.round() >= 0.0);
            (1, j1.round() as u16)
        }
    };

    let mut specs: Vec<Spec> = Vec::new();
    for m_bar in -mm..=mm {
        for mp_bar in -mm..=mm {
            if !selection_rule(m_bar, mp_bar) {
                continue;
            }
            let o = ctx.orders(m_bar, mp_bar);
            let ts = term_specs(ctx, &o);
            for (mu, nu, lam, _) in ts
                .plus
                .iter()
                .chain(ts.minus.iter())
                .copied()
                .chain(std::iter::once((ts.z.0, ts.z.1, ts.z.2, 1.0)))
            {
                let (kl, ki) = k_index(mu);
                let (pl, pi_) = p_index(nu);
                specs.push(Spec {
                    k_ladder: kl,
                    k_idx: ki,
                    p_ladder: pl,
                    p_idx: pi_,
                    lam: lam as i32,
                });
            }
        }
    }

    // grid sized by the fastest oscillation and the outermost turning point
    let top_order = m_max as f64 + 3.0;
    let turning = (top_order / ctx.k)
        .max(top_order / ctx.kp)
        .max((2.0 * top_order) / ctx.kappa);
    let x0 = (1.5 * turning + 20.0).max(40.0);
    let panel_len = PI / (2.0 * (ctx.kappa + ctx.k + ctx.kp));
    let grid = QuadGrid::build(x0, panel_len, &cfg.damping_sequence);

    let mut head_acc = vec![0.0f64; specs.len()];
    let mut tail_acc = vec![0.0f64; specs.len() * cfg.damping_sequence.len()];

    let mut lad_k1 = vec![0.0; n_k1];
    let mut lad_k2 = vec![0.0; n_k2];
    let mut lad_p1 = vec![0.0; n_p1];
    let mut lad_p2 = vec![0.0; n_p2];
    let mut lad_i = vec![0.0; n_int];

    let mut eval_block =
        |nodes: &[(f64, f64)], acc: &mut [f64]| -> Result<(), SpecFunError> {
            for &(x, w) in nodes {
                j_ladder(delta - 1.0, ctx.k * x, &mut lad_k1)?;
                j_ladder(-delta, ctx.k * x, &mut lad_k2)?;
                j_ladder(-delta, ctx.kp * x, &mut lad_p1)?;
                j_ladder(delta - 1.0, ctx.kp * x, &mut lad_p2)?;
                j_ladder(0.0, ctx.kappa * x, &mut lad_i)?;
                let wx = w * x;
                for (s, a) in specs.iter().zip(acc.iter_mut()) {
                    let jk = if s.k_ladder == 0 {
                        lad_k1[s.k_idx as usize]
                    } else {
                        lad_k2[s.k_idx as usize]
                    };
                    let jp = if s.p_ladder == 0 {
                        lad_p1[s.p_idx as usize]
                    } else {
                        lad_p2[s.p_idx as usize]
                    };
                    let jl = lad_i[s.lam.unsigned_abs() as usize];
                    let sign = if s.lam < 0 && s.lam % 2 != 0 { -1.0 } else { 1.0 };
                    *a += wx * jk * jp * sign * jl;
                }
            }
            Ok(())
        };

    eval_block(&grid.head, &mut head_acc).map_err(AmplitudeError::SpecFun)?;
    let n_eps = cfg.damping_sequence.len();
    for (ei, nodes) in grid.tails.iter().enumerate() {
        let mut block = vec![0.0f64; specs.len()];
        eval_block(nodes, &mut block).map_err(AmplitudeError::SpecFun)?;
        for (i, v) in block.into_iter().enumerate() {
            tail_acc[i * n_eps + ei] = v;
        }
    }

    let mut table = Vec::with_capacity(specs.len());
    for i in 0..specs.len() {
        let tails = &tail_acc[i * n_eps..(i + 1) * n_eps];
        let (tail, _) = crate::specfun::neville_to_zero(&cfg.damping_sequence, tails);
        table.push(head_acc[i] + tail);
    }
    Ok(table)
}
