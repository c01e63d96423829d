//! Self-contained identity suite pinning every analytic step the closed
//! form relies on:
//!
//! 1. the vanishing radial integral (sum-order case) in the
//!    momentum-excess regime,
//! 2. the closed-form radial integral (difference-order case) against its
//!    trigonometric parametrization,
//! 3. the angular integral against 2 pi e^{-i pi q/2} J_{-q}(z), with one
//!    global phase fitted across the whole grid and reported,
//! 4. geometric convergence of the counter-rotating winding sector to its
//!    resummed closed form,
//! 5. the algebraic structure functions against their trigonometric forms.
//!
//! Each check runs on a seeded grid and reports its worst residuals even
//! when it passes, so refactors that drift the numerics are visible.

use crate::amplitude::oracle::{t2_sector_closed_form, t2_sector_partial_sum, truncation_bound};
use crate::amplitude::structure_params;
use crate::kinematics::{solve_pair, FluxParam, PhotonIn, Polarization};
use crate::rng::SplitMix64;
use crate::specfun::{
    bessel_j_unchecked, phi_integral, triple_bessel_integral, QuadratureConfig,
};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default seed for the randomized grids.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Outcome of one identity check.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub identity_name: String,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub samples: usize,
    pub passed: bool,
    pub tolerance: f64,
    /// Extra findings, e.g. the fitted global phase of the angular check.
    pub note: Option<String>,
}

impl IdentityReport {
    fn against_abs(name: &str, abs: f64, rel: f64, samples: usize, tol: f64) -> IdentityReport {
        IdentityReport {
            identity_name: name.into(),
            max_abs_residual: abs,
            max_rel_residual: rel,
            samples,
            passed: abs <= tol,
            tolerance: tol,
            note: None,
        }
    }

    fn against_rel(name: &str, abs: f64, rel: f64, samples: usize, tol: f64) -> IdentityReport {
        IdentityReport {
            identity_name: name.into(),
            max_abs_residual: abs,
            max_rel_residual: rel,
            samples,
            passed: rel <= tol,
            tolerance: tol,
            note: None,
        }
    }
}

/// Suite configuration.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Multiplies every tolerance; < 1 tightens the suite.
    pub tol_scale: f64,
    pub quad: QuadratureConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            tol_scale: 1.0,
            quad: QuadratureConfig::default(),
        }
    }
}

/// Trigonometric parametrization of a momentum-excess triple
/// (b1 = c sin(eta) cos(zeta), b2 = c cos(eta) sin(zeta)) and the matching
/// structure values.
struct TrigPoint {
    b1: f64,
    b2: f64,
    c: f64,
    a: f64,
    b: f64,
    d: f64,
}

fn trig_point(eta: f64, zeta: f64, c: f64) -> TrigPoint {
    TrigPoint {
        b1: c * eta.sin() * zeta.cos(),
        b2: c * eta.cos() * zeta.sin(),
        c,
        a: eta.sin() / zeta.cos(),
        b: zeta.sin() / eta.cos(),
        d: 1.0 / ((eta + zeta).cos() * (eta - zeta).cos()),
    }
}

/// Vanishing radial integral: order sum equals the large-momentum order.
pub fn check_vanishing_integral(cfg: &VerifyConfig) -> IdentityReport {
    let tol = 1e-8 * cfg.tol_scale;
    let mut rng = SplitMix64::new(cfg.seed ^ 0x01);
    let mut points: Vec<(f64, f64, f64, f64, f64, f64)> = vec![
        // the reference point and a near-boundary stress case
        (1.0, 2.0, 3.0, 0.3, 0.4, 1.0),
        (1.0, 2.0, 3.0, 0.3, 0.4, 1.001 * 0.7),
    ];
    while points.len() < 20 {
        let mu = rng.uniform(0.2, 2.5);
        let nu = rng.uniform(0.2, 2.5);
        let b1 = rng.uniform(0.15, 0.55);
        let b2 = rng.uniform(0.15, 0.55);
        let c = (b1 + b2) * rng.uniform(1.05, 1.8);
        points.push((mu, nu, mu + nu, b1, b2, c));
    }
    let mut max_abs = 0.0f64;
    let mut note = None;
    for &(mu, nu, lam, b1, b2, c) in &points {
        match triple_bessel_integral(mu, nu, lam, b1, b2, c, &cfg.quad) {
            Ok(v) => max_abs = max_abs.max(v.abs()),
            Err(e) => {
                note = Some(format!("quadrature failure at ({mu},{nu},{lam}): {e}"));
                max_abs = f64::INFINITY;
            }
        }
    }
    let mut r = IdentityReport::against_abs("vanishing_integral", max_abs, f64::NAN, points.len(), tol);
    r.note = note;
    r
}

/// Closed-form radial integral against direct quadrature, including the
/// hand-checkable symmetric trigonometric point.
pub fn check_closed_integral(cfg: &VerifyConfig) -> IdentityReport {
    let tol = 1e-6 * cfg.tol_scale;
    let mut rng = SplitMix64::new(cfg.seed ^ 0x02);
    // (eta, zeta, mu, nu, c); mu is the order at b1, nu at b2, lam = mu - nu
    let mut points = vec![(PI / 6.0, PI / 6.0, 0.7, 0.3, 1.0)];
    while points.len() < 19 {
        let eta = rng.uniform(0.1, 0.6);
        let zeta = rng.uniform(0.1, 0.6);
        let mu = rng.uniform(0.3, 2.2);
        let nu = rng.uniform(-0.4, 1.8);
        let c = rng.uniform(0.5, 1.5);
        points.push((eta, zeta, mu, nu, c));
    }
    // integer nu: the closed form vanishes because the subtracted order's
    // sine does; quadrature confirms
    points.push((0.45, 0.3, 2.3, 1.0, 1.0));

    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut note = None;
    for &(eta, zeta, mu, nu, c) in &points {
        let t = trig_point(eta, zeta, c);
        let closed = -(2.0 / (PI * c * c)) * (PI * nu).sin() * t.a.powf(mu) * t.b.powf(nu) * t.d;
        match triple_bessel_integral(mu, nu, mu - nu, t.b1, t.b2, t.c, &cfg.quad) {
            Ok(v) => {
                let abs = (v - closed).abs();
                max_abs = max_abs.max(abs);
                // scale-relative: the sine zero makes |closed| itself vanish
                // at integer nu
                max_rel = max_rel.max(abs / closed.abs().max(2.0 / (PI * c * c) * t.d * 1e-2));
            }
            Err(e) => {
                note = Some(format!("quadrature failure at eta={eta}, zeta={zeta}: {e}"));
                max_rel = f64::INFINITY;
            }
        }
    }
    let mut r =
        IdentityReport::against_rel("closed_integral", max_abs, max_rel, points.len(), tol);
    r.note = note;
    r
}

/// Angular integral against its closed form, fitting one global phase
/// across the grid and reporting it.
pub fn check_phi_integral(cfg: &VerifyConfig) -> IdentityReport {
    let tol = 1e-10 * cfg.tol_scale;
    let scale_floor = 2.0 * PI * 1e-3; // keep Bessel zeros from inflating ratios
    let mut pairs: Vec<(f64, Complex64, Complex64)> = Vec::new();
    let mut note = None;
    for q in -10..=10i32 {
        for &z in &[0.5, 2.0, 10.0] {
            let quad = match phi_integral(q as f64, z, &cfg.quad) {
                Ok(v) => v,
                Err(e) => {
                    note = Some(format!("phi quadrature failure at q={q}, z={z}: {e}"));
                    continue;
                }
            };
            let j = bessel_j_unchecked(-(q as f64), z).unwrap_or(f64::NAN);
            let closed = 2.0 * PI * Complex64::from_polar(1.0, -PI * q as f64 / 2.0) * j;
            pairs.push((z, quad, closed));
        }
    }
    // one global phase: argmax over e^{i phi} of Re sum(quad * conj(e^{i phi} closed))
    let acc: Complex64 = pairs.iter().map(|(_, q, c)| q * c.conj()).sum();
    let phase = if acc.norm() > 0.0 {
        acc / acc.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    for &(_, quad, closed) in &pairs {
        let resid = (quad - phase * closed).norm();
        max_abs = max_abs.max(resid);
        max_rel = max_rel.max(resid / closed.norm().max(scale_floor));
    }
    let mut r = IdentityReport::against_rel("phi_integral", max_abs, max_rel, pairs.len(), tol);
    let fitted = phase.arg();
    r.note = Some(match note {
        Some(n) => n,
        None => format!("fitted global phase {fitted:+.3e} rad"),
    });
    r
}

/// Geometric convergence of the counter-rotating winding sector.
pub fn check_geometric_resummation(cfg: &VerifyConfig) -> IdentityReport {
    let tol = 1e-12 * cfg.tol_scale;
    let flux = FluxParam::new(2.3).unwrap();
    let photon = PhotonIn::normal_incidence(3.0, 1.0, Polarization::S).unwrap();
    let pair = solve_pair(3.0, 0.8, 0.2, 1.0, 0.4, 2.1).unwrap();
    let closed = match t2_sector_closed_form(&flux, &photon, &pair) {
        Ok(c) => c,
        Err(e) => {
            return IdentityReport {
                identity_name: "geometric_resummation".into(),
                max_abs_residual: f64::INFINITY,
                max_rel_residual: f64::INFINITY,
                samples: 0,
                passed: false,
                tolerance: tol,
                note: Some(format!("{e}")),
            }
        }
    };
    let schedule = [5usize, 10, 20, 40];
    let mut errs = Vec::new();
    for &m in &schedule {
        let s = t2_sector_partial_sum(&flux, &photon, &pair, m).unwrap();
        errs.push(((s - closed).norm() / closed.norm()).max(1e-300));
    }
    let rel40 = errs[3];
    // decay rate from the largest consecutive pair still clear of the
    // floating-point floor; early cutoffs are contaminated by the faster
    // geometric component
    let mut rate = f64::NAN;
    for w in (1..schedule.len()).rev() {
        if errs[w] > 1e-13 {
            let dm = (schedule[w] - schedule[w - 1]) as f64;
            rate = (errs[w] / errs[w - 1]).powf(1.0 / dm);
            break;
        }
    }
    let sp = structure_params(
        pair.k_perp,
        pair.kp_perp,
        photon.kappa_perp(),
        pair.phi_perp,
        pair.phip_perp,
        photon.phi(),
    )
    .unwrap();
    let expected_rate = sp.a.max(sp.b);
    let rate_ok = (rate - expected_rate).abs() <= 0.02;

    // stress: a close to 1 (transverse momenta nearly exhausting the
    // photon's) still converges within the truncation bound
    let stress_photon = PhotonIn::normal_incidence(30.0, 1.0, Polarization::S).unwrap();
    let stress_k = (15.0f64 * 15.0 - 0.04 - 1.0).sqrt();
    let stress_pair = solve_pair(30.0, stress_k, 0.2, 1.0, 0.4, 2.1).unwrap();
    let stress_flux = FluxParam::new(0.41).unwrap();
    let stress_closed = t2_sector_closed_form(&stress_flux, &stress_photon, &stress_pair).unwrap();
    let stress_sum =
        t2_sector_partial_sum(&stress_flux, &stress_photon, &stress_pair, 60).unwrap();
    let ssp = structure_params(
        stress_pair.k_perp,
        stress_pair.kp_perp,
        stress_photon.kappa_perp(),
        stress_pair.phi_perp,
        stress_pair.phip_perp,
        stress_photon.phi(),
    )
    .unwrap();
    let bound = truncation_bound(
        &ssp,
        stress_flux.delta(),
        stress_pair.k3,
        stress_pair.kp3,
        60,
    );
    let stress_ok = (stress_sum - stress_closed).norm() <= bound;

    IdentityReport {
        identity_name: "geometric_resummation".into(),
        max_abs_residual: rel40 * closed.norm(),
        max_rel_residual: rel40,
        samples: schedule.len() + 1,
        passed: rel40 <= tol && rate_ok && stress_ok,
        tolerance: tol,
        note: Some(format!(
            "measured rate {rate:.4} vs max(a,b) = {expected_rate:.4}; boundary stress within bound: {stress_ok}"
        )),
    }
}

/// Algebraic structure functions against the trigonometric parametrization.
pub fn check_structure_consistency(cfg: &VerifyConfig) -> IdentityReport {
    let tol = 1e-12 * cfg.tol_scale;
    let mut rng = SplitMix64::new(cfg.seed ^ 0x05);
    let mut max_rel = 0.0f64;
    let mut samples = 0usize;
    let mut note = None;

    let mut probe = |eta: f64, zeta: f64, c: f64, max_rel: &mut f64| {
        let t = trig_point(eta, zeta, c);
        match structure_params(t.b1, t.b2, t.c, 0.0, 0.0, 0.0) {
            Ok(sp) => {
                let ra = (sp.a - t.a).abs() / t.a;
                let rb = (sp.b - t.b).abs() / t.b;
                let rd = (sp.d_norm - t.d).abs() / t.d;
                *max_rel = max_rel.max(ra).max(rb).max(rd);
            }
            Err(e) => {
                note = Some(format!("structure rejection at eta={eta}, zeta={zeta}: {e}"));
                *max_rel = f64::INFINITY;
            }
        }
    };

    // hand-checkable points: the symmetric D = 2 case and the eta -> 0 edge
    probe(PI / 6.0, PI / 6.0, 1.0, &mut max_rel);
    samples += 1;
    let zeta_edge = 0.37;
    let t_edge = trig_point(1e-6, zeta_edge, 1.0);
    let d_expected = 1.0 / (zeta_edge.cos() * zeta_edge.cos());
    if (t_edge.d - d_expected).abs() > 1e-9 * d_expected {
        max_rel = f64::INFINITY;
    }
    samples += 1;

    for _ in 0..100 {
        let eta = rng.uniform(0.05, 0.7);
        let zeta = rng.uniform(0.05, 0.7);
        if eta + zeta > PI / 2.0 - 0.05 {
            continue;
        }
        let c = rng.uniform(0.5, 2.0);
        probe(eta, zeta, c, &mut max_rel);
        samples += 1;
    }
    let mut r = IdentityReport::against_rel(
        "structure_consistency",
        f64::NAN,
        max_rel,
        samples,
        tol,
    );
    r.note = note;
    r
}

/// Run the whole suite in declaration order.
pub fn run_all(cfg: &VerifyConfig) -> Vec<IdentityReport> {
    vec![
        check_vanishing_integral(cfg),
        check_closed_integral(cfg),
        check_phi_integral(cfg),
        check_geometric_resummation(cfg),
        check_structure_consistency(cfg),
    ]
}

/// Render the machine-readable report.
pub fn reports_to_json(reports: &[IdentityReport], seed: u64) -> String {
    let mut s = String::from("{\n");
    s.push_str(&format!("  \"seed\": {seed},\n"));
    s.push_str(&format!(
        "  \"all_passed\": {},\n  \"identities\": [\n",
        reports.iter().all(|r| r.passed)
    ));
    for (i, r) in reports.iter().enumerate() {
        s.push_str("    {");
        s.push_str(&format!(
            "\"identity_name\": \"{}\", \"max_abs_residual\": {}, \"max_rel_residual\": {}, \"samples\": {}, \"passed\": {}, \"tolerance\": {}",
            r.identity_name,
            json_f64(r.max_abs_residual),
            json_f64(r.max_rel_residual),
            r.samples,
            r.passed,
            json_f64(r.tolerance)
        ));
        if let Some(n) = &r.note {
            s.push_str(&format!(", \"note\": \"{}\"", n.replace('"', "'")));
        }
        s.push('}');
        if i + 1 < reports.len() {
            s.push(',');
        }
        s.push('\n');
    }
    s.push_str("  ]\n}\n");
    s
}

fn json_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "null".into()
    } else {
        "1e308".into()
    }
}

/// Render the human-readable table.
pub fn print_table(out: &mut dyn std::io::Write, reports: &[IdentityReport]) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<26} {:>12} {:>12} {:>8} {:>11}  result",
        "identity", "max |resid|", "max rel", "samples", "tolerance"
    )?;
    for r in reports {
        writeln!(
            out,
            "{:<26} {:>12.3e} {:>12.3e} {:>8} {:>11.1e}  {}",
            r.identity_name,
            r.max_abs_residual,
            r.max_rel_residual,
            r.samples,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        )?;
        if let Some(n) = &r.note {
            writeln!(out, "    {n}")?;
        }
    }
    Ok(())
}
