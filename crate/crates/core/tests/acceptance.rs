//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line with its runtime. Run with `--nocapture` to see the
//! per-criterion summaries.

use abpair::amplitude::oracle::{
    default_m_max, g1_family_term, oracle_amplitude, oracle_term, t2_sector_closed_form,
    t2_sector_partial_sum, OracleTier,
};
use abpair::amplitude::{closed_form_amplitude, selection_rule, structure_params};
use abpair::cross_section::{differential_xsec, nr_limit, polarization_density, ur_limit};
use abpair::kinematics::{solve_pair, FluxParam, PairOut, PhotonIn, Polarization};
use abpair::rng::SplitMix64;
use abpair::specfun::{bessel_j, bessel_j_derivative, BesselOrder, QuadratureConfig};
use abpair::verify::{
    check_closed_integral, check_phi_integral, check_structure_consistency,
    check_vanishing_integral, VerifyConfig,
};
use std::f64::consts::PI;
use std::time::Instant;

fn report(criterion: &str, start: Instant, passed: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} ({:.2} s) {detail}",
        if passed { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    assert!(passed, "criterion {criterion} failed: {detail}");
}

/// Random valid kinematic point at normal incidence with mass 1.
/// `ab_cap` bounds the structure functions so the winding cutoff stays
/// moderate.
fn random_point(
    rng: &mut SplitMix64,
    delta: f64,
    int_part: i64,
    ab_cap: f64,
) -> (FluxParam, PhotonIn, PairOut) {
    loop {
        let kappa = rng.uniform(2.2, 8.0);
        let eps = rng.uniform(1.05, kappa - 1.05);
        let kt2 = eps * eps - 1.0;
        let k3 = rng.uniform(-0.8, 0.8) * kt2.sqrt();
        let k_perp2 = kt2 - k3 * k3;
        if k_perp2 <= 1e-6 {
            continue;
        }
        let Ok(pair) = solve_pair(
            kappa,
            k_perp2.sqrt(),
            k3,
            1.0,
            rng.uniform(0.0, 2.0 * PI),
            rng.uniform(0.0, 2.0 * PI),
        ) else {
            continue;
        };
        let phi_k = rng.uniform(0.0, 2.0 * PI);
        let photon = PhotonIn::normal_incidence(kappa, phi_k, Polarization::S).unwrap();
        let Ok(sp) = structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            phi_k,
        ) else {
            continue;
        };
        if sp.a.max(sp.b) > ab_cap {
            continue;
        }
        let flux = FluxParam::new(int_part as f64 + delta).unwrap();
        return (flux, photon, pair);
    }
}

#[test]
fn criterion_01_integer_flux_nullity() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(0x005E_ED01);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let (flux, photon, pair) = random_point(&mut rng, 0.0, (i % 7) as i64 - 3, 0.97);
        let d = closed_form_amplitude(&flux, &photon, &pair).unwrap();
        let x = differential_xsec(&flux, &photon, &pair, 1.0 / 137.035999).unwrap();
        worst = worst
            .max(d.d1.norm())
            .max(d.d2.norm())
            .max(d.dz.norm())
            .max(x.value.abs())
            .max(x.density.lambda_s)
            .max(x.density.lambda_p);
    }
    report(
        "01 integer-flux nullity",
        t0,
        worst <= 1e-14,
        &format!("max |component| = {worst:.2e} over 100 points"),
    );
}

#[test]
fn criterion_02_closed_form_vs_tier_a() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(0x005E_ED02);
    let deltas = [0.1, 0.3, 0.5, 0.7, 0.9];
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let delta = deltas[i % deltas.len()];
        let (flux, photon, pair) = random_point(&mut rng, delta, (i % 5) as i64 - 2, 0.75);
        let sp = structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        )
        .unwrap();
        let m_max = default_m_max(&sp, 1e-14).unwrap();
        let closed = closed_form_amplitude(&flux, &photon, &pair).unwrap();
        let o = oracle_amplitude(&flux, &photon, &pair, m_max, OracleTier::A, &cfg).unwrap();
        let scale = closed.norm();
        for (c, t) in [
            (closed.d1, o.amplitude.d1),
            (closed.d2, o.amplitude.d2),
            (closed.dz, o.amplitude.dz),
        ] {
            if c.norm() > 1e-13 * scale {
                worst = worst.max((c - t).norm() / c.norm());
            }
        }
    }
    report(
        "02 closed form vs tier-A oracle",
        t0,
        worst < 1e-10,
        &format!("max componentwise rel deviation = {worst:.2e} over 100 points"),
    );
}

#[test]
fn criterion_03_tier_b_vs_tier_a() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(0x005E_ED03);
    let cfg = QuadratureConfig {
        damping_sequence: vec![0.2, 0.1, 0.05, 0.025, 0.0125],
        ..QuadratureConfig::default()
    };
    let deltas = [0.17, 0.3, 0.44, 0.58, 0.71, 0.83, 0.29, 0.5, 0.64, 0.37];
    let mut worst = 0.0f64;
    for (i, &delta) in deltas.iter().enumerate() {
        // small transverse momenta keep the winding cutoff and the
        // quadrature grids modest
        let (flux, photon, pair) = loop {
            let cand = random_point(&mut rng, delta, (i % 3) as i64 - 1, 0.34);
            if photon_excess_ok(&cand.1, &cand.2) {
                break cand;
            }
        };
        let sp = structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        )
        .unwrap();
        let m_max = default_m_max(&sp, 1e-10).unwrap().max(6);
        let a = oracle_amplitude(&flux, &photon, &pair, m_max, OracleTier::A, &cfg).unwrap();
        let b = oracle_amplitude(&flux, &photon, &pair, m_max, OracleTier::B, &cfg).unwrap();
        let scale = a.amplitude.norm();
        let dev = ((a.amplitude.d1 - b.amplitude.d1).norm_sqr()
            + (a.amplitude.d2 - b.amplitude.d2).norm_sqr()
            + (a.amplitude.dz - b.amplitude.dz).norm_sqr())
        .sqrt()
            / scale;
        worst = worst.max(dev);
    }
    report(
        "03 tier-B quadrature oracle vs tier-A",
        t0,
        worst < 1e-6,
        &format!("max rel deviation = {worst:.2e} over 10 points"),
    );
}

fn photon_excess_ok(photon: &PhotonIn, pair: &PairOut) -> bool {
    // comfortable momentum excess keeps the slow channel fast for tier B
    photon.kappa_perp() - pair.k_perp - pair.kp_perp > 0.4
}

#[test]
fn criterion_04_vanishing_integral() {
    let t0 = Instant::now();
    let r = check_vanishing_integral(&VerifyConfig::default());
    report(
        "04 vanishing radial integral",
        t0,
        r.passed,
        &format!(
            "max |I| = {:.2e} over {} points (tolerance {:.0e})",
            r.max_abs_residual, r.samples, r.tolerance
        ),
    );
}

#[test]
fn criterion_05_closed_integral() {
    let t0 = Instant::now();
    // the hand-checkable symmetric point first
    let eta = PI / 6.0;
    let a = eta.sin() / eta.cos();
    let d = 1.0 / ((2.0 * eta).cos());
    assert!((a - 1.0 / 3.0f64.sqrt()).abs() < 1e-15);
    assert!((d - 2.0).abs() < 1e-15);
    let r = check_closed_integral(&VerifyConfig::default());
    report(
        "05 closed-form radial integral",
        t0,
        r.passed,
        &format!(
            "max rel = {:.2e} over {} points (tolerance {:.0e}); trig point gives a = b = 3^-1/2, D = 2",
            r.max_rel_residual, r.samples, r.tolerance
        ),
    );
}

#[test]
fn criterion_06_angular_integral() {
    let t0 = Instant::now();
    let r = check_phi_integral(&VerifyConfig::default());
    report(
        "06 angular integral closed form",
        t0,
        r.passed,
        &format!(
            "max scaled rel = {:.2e} over {} points; {}",
            r.max_rel_residual,
            r.samples,
            r.note.as_deref().unwrap_or("")
        ),
    );
}

#[test]
fn criterion_07_selection_rule() {
    let t0 = Instant::now();
    let flux = FluxParam::new(2.3).unwrap();
    let photon = PhotonIn::normal_incidence(2.6, 0.9, Polarization::S).unwrap();
    let pair = solve_pair(2.6, 0.35, 0.11, 1.0, 5.2, 2.8).unwrap();
    let cfg = QuadratureConfig::default();

    // tier A: every selection-forbidden pair contributes exactly zero, and
    // the representative ladder family vanishes on T1, T3 and T4
    let mut max_forbidden = 0.0f64;
    let mut max_g1 = 0.0f64;
    for m_bar in -12..=12i64 {
        for mp_bar in -12..=12i64 {
            if !selection_rule(m_bar, mp_bar) {
                let t =
                    oracle_term(&flux, &photon, &pair, m_bar, mp_bar, OracleTier::A, &cfg).unwrap();
                max_forbidden = max_forbidden
                    .max(t.d1.norm())
                    .max(t.d2.norm())
                    .max(t.dz.norm());
            }
            // representative family: nonzero only on T2
            if m_bar >= 0 || mp_bar < 0 {
                let g =
                    g1_family_term(&flux, &photon, &pair, m_bar, mp_bar, OracleTier::A, &cfg)
                        .unwrap();
                max_g1 = max_g1.max(g.abs());
            }
        }
    }

    // tier B: quadrature confirms the vanishing on sampled low-order terms
    let mut max_b = 0.0f64;
    for (mb, mpb) in [(0i64, 0i64), (1, 1), (-1, -1), (-2, -1), (2, 1), (0, 2)] {
        let t = oracle_term(&flux, &photon, &pair, mb, mpb, OracleTier::B, &cfg).unwrap();
        max_b = max_b.max(t.d1.norm()).max(t.d2.norm()).max(t.dz.norm());
    }
    for (mb, mpb) in [(-1i64, -1i64), (-2, -2)] {
        let g = g1_family_term(&flux, &photon, &pair, mb, mpb, OracleTier::B, &cfg).unwrap();
        max_b = max_b.max(g.abs());
    }

    let passed = max_forbidden == 0.0 && max_g1 == 0.0 && max_b < 1e-8;
    report(
        "07 selection rule",
        t0,
        passed,
        &format!(
            "tier-A forbidden max = {max_forbidden:.1e}, ladder family T1/T3/T4 max = {max_g1:.1e}, tier-B samples max = {max_b:.2e}"
        ),
    );
}

#[test]
fn criterion_08_geometric_resummation() {
    let t0 = Instant::now();
    let flux = FluxParam::new(2.3).unwrap();
    let photon = PhotonIn::normal_incidence(3.0, 1.0, Polarization::S).unwrap();
    let pair = solve_pair(3.0, 0.8, 0.2, 1.0, 0.4, 2.1).unwrap();
    let closed = t2_sector_closed_form(&flux, &photon, &pair).unwrap();
    let sp = structure_params(
        pair.k_perp,
        pair.kp_perp,
        photon.kappa_perp(),
        pair.phi_perp,
        pair.phip_perp,
        photon.phi(),
    )
    .unwrap();
    let mut errs = Vec::new();
    for m in [5usize, 10, 20, 40] {
        let s = t2_sector_partial_sum(&flux, &photon, &pair, m).unwrap();
        errs.push((s - closed).norm() / closed.norm());
    }
    let rel40 = errs[3];
    // rate from the largest consecutive pair clear of the f64 floor; the
    // small cutoffs still feel the faster geometric component
    let rate = if errs[3] > 1e-13 {
        (errs[3] / errs[2]).powf(1.0 / 20.0)
    } else {
        (errs[2] / errs[1]).powf(1.0 / 10.0)
    };
    let expected = sp.a.max(sp.b);
    let passed = rel40 < 1e-12 && (rate - expected).abs() <= 0.02;
    report(
        "08 geometric resummation",
        t0,
        passed,
        &format!("rel err at m=40: {rel40:.2e}; measured rate {rate:.4} vs max(a,b) {expected:.4}"),
    );
}

#[test]
fn criterion_09_structure_consistency() {
    let t0 = Instant::now();
    let r = check_structure_consistency(&VerifyConfig::default());
    report(
        "09 structure-function consistency",
        t0,
        r.passed,
        &format!(
            "max rel = {:.2e} over {} points (tolerance {:.0e})",
            r.max_rel_residual, r.samples, r.tolerance
        ),
    );
}

#[test]
fn criterion_10_nr_limit() {
    let t0 = Instant::now();
    let m = 1.0f64;
    let flux = FluxParam::new(0.3).unwrap();
    let mut prev_dev = f64::INFINITY;
    let mut prev_ratio_dev = f64::INFINITY;
    let mut monotone = true;
    let mut d2_zero = true;
    for &t in &[1e-2f64, 1e-3, 1e-4] {
        let kappa = 2.0 * m * (1.0 + t);
        let ktot = m * (2.0 * t + t * t).sqrt();
        let k3 = 0.4 * ktot;
        let k_perp = (ktot * ktot - k3 * k3).sqrt();
        let photon = PhotonIn::normal_incidence(kappa, 1.3, Polarization::S).unwrap();
        let pair = solve_pair(kappa, k_perp, k3, m, 0.7, 2.9).unwrap();
        let sp = structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        )
        .unwrap();
        let full = polarization_density(&sp, &pair, &flux);
        let nr = nr_limit(&flux, &photon, &pair).unwrap();
        d2_zero &= nr.amplitude.d2.norm() == 0.0;
        let dev = (full.lambda_s - nr.density.lambda_s).abs() / full.lambda_s;
        if dev >= prev_dev {
            monotone = false;
        }
        prev_dev = dev;
        // the P/S ratio approaches its k3^2/M^2-weighted limit
        let ratio_full = full.lambda_p / full.lambda_s;
        let ratio_nr = nr.density.lambda_p / nr.density.lambda_s;
        let ratio_dev = (ratio_full / ratio_nr - 1.0).abs();
        if ratio_dev >= prev_ratio_dev {
            monotone = false;
        }
        prev_ratio_dev = ratio_dev;
        // and carries the explicit k3^2 suppression scale
        assert!(ratio_nr < 4.0 * k3 * k3 / (m * m) * 2.0);
    }
    // corrections to the limit scale like the pair momentum over the mass,
    // i.e. sqrt(2t); at t = 1e-4 that is ~1.4e-2
    let passed = monotone && d2_zero && prev_dev < 0.05;
    report(
        "10 near-threshold limit",
        t0,
        passed,
        &format!(
            "d2 = 0 in the limit: {d2_zero}; deviations decrease monotonically to {prev_dev:.2e}"
        ),
    );
}

#[test]
fn criterion_11_ur_limit() {
    let t0 = Instant::now();
    let m = 1.0f64;
    let kappa = 1000.0 * m;
    let flux = FluxParam::new(0.3).unwrap();
    let k3 = 0.8 * m;
    let eps = kappa / 2.0;
    let k_perp = (eps * eps - k3 * k3 - m * m).sqrt();
    let photon = PhotonIn::normal_incidence(kappa, 0.9, Polarization::S).unwrap();
    let pair = solve_pair(kappa, k_perp, k3, m, 0.9, 0.9).unwrap();
    let sp = structure_params(
        pair.k_perp,
        pair.kp_perp,
        photon.kappa_perp(),
        pair.phi_perp,
        pair.phip_perp,
        photon.phi(),
    )
    .unwrap();
    let full = polarization_density(&sp, &pair, &flux);
    let ur = ur_limit(&sp, &flux, &pair).unwrap();
    let sigma_dev = (ur.sigma_minus_ur / ur.sigma_plus_ur - sp.a / sp.b).abs();
    let dev_s = (full.lambda_s - ur.density.lambda_s).abs() / full.lambda_s;
    let dev_p = (full.lambda_p - ur.density.lambda_p).abs() / full.lambda_p;
    let passed = sigma_dev < 1e-3 && dev_s < 0.01 && dev_p < 0.01;
    report(
        "11 high-energy limit",
        t0,
        passed,
        &format!(
            "sigma ratio deviation {sigma_dev:.1e}; full-vs-limit rel dev (s, p) = ({dev_s:.2e}, {dev_p:.2e})"
        ),
    );
}

#[test]
fn criterion_12_bessel_hygiene() {
    let t0 = Instant::now();
    let xs: Vec<f64> = (0..14)
        .map(|i| 0.01 * (100.0f64 / 0.01).powf(i as f64 / 13.0))
        .collect();
    let mut worst_rec = 0.0f64;
    let mut worst_wr = 0.0f64;
    let mut nu = -29.81f64;
    while nu <= 29.9 {
        for &x in &xs {
            // three-term recurrence
            let jm = bessel_j(BesselOrder::new(nu - 1.0).unwrap(), x).unwrap();
            let j0 = bessel_j(BesselOrder::new(nu).unwrap(), x).unwrap();
            let jp = bessel_j(BesselOrder::new(nu + 1.0).unwrap(), x).unwrap();
            let resid = (jm + jp - 2.0 * nu / x * j0).abs();
            let scale = 1.0f64.max(j0.abs()).max(jm.abs()).max(jp.abs());
            worst_rec = worst_rec.max(resid / scale);

            // Wronskian with derivatives via the exact recurrence
            let jpos = j0;
            let jneg = bessel_j(BesselOrder::new(-nu).unwrap(), x).unwrap();
            let dpos = bessel_j_derivative(nu, x).unwrap();
            let dneg = bessel_j_derivative(-nu, x).unwrap();
            let lhs = jpos * dneg - jneg * dpos;
            let rhs = -2.0 * (PI * nu).sin() / (PI * x);
            worst_wr = worst_wr.max((lhs - rhs).abs() / rhs.abs());
        }
        nu += 0.73;
    }
    let passed = worst_rec < 1e-10 && worst_wr < 1e-9;
    report(
        "12 Bessel recurrence and Wronskian",
        t0,
        passed,
        &format!("recurrence max {worst_rec:.2e}; Wronskian max rel {worst_wr:.2e}"),
    );
}
