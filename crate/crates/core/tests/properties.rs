//! Property tests for the contract invariants that want large random
//! grids: conservation bookkeeping, automatic momentum excess, flux
//! periodicity, the density reflection symmetry, and the honesty of the
//! oracle's truncation bound.

use abpair::amplitude::oracle::{oracle_amplitude, truncation_bound, OracleTier};
use abpair::amplitude::{closed_form_amplitude, structure_params};
use abpair::cross_section::polarization_density;
use abpair::kinematics::{momentum_excess_ok, solve_pair, FluxParam, PhotonIn, Polarization};
use abpair::rng::SplitMix64;
use abpair::specfun::QuadratureConfig;
use std::f64::consts::PI;

fn sample_pair(
    rng: &mut SplitMix64,
) -> Option<(f64, abpair::kinematics::PairOut)> {
    let kappa = rng.uniform(2.05, 12.0);
    let eps = rng.uniform(1.0 + 1e-6, kappa - 1.0 - 1e-6);
    let kt2 = eps * eps - 1.0;
    let k3 = rng.uniform(-1.0, 1.0) * kt2.sqrt() * 0.999;
    let k_perp2 = kt2 - k3 * k3;
    if k_perp2 <= 0.0 {
        return None;
    }
    solve_pair(
        kappa,
        k_perp2.sqrt(),
        k3,
        1.0,
        rng.uniform(0.0, 2.0 * PI),
        rng.uniform(0.0, 2.0 * PI),
    )
    .ok()
    .map(|p| (kappa, p))
}

#[test]
fn energy_conservation_and_momentum_excess_hold_everywhere() {
    let mut rng = SplitMix64::new(0x005E_ED10);
    let mut n = 0usize;
    while n < 10_000 {
        let Some((kappa, pair)) = sample_pair(&mut rng) else {
            continue;
        };
        assert!(
            (pair.eps + pair.eps_bar - kappa).abs() < 1e-12 * kappa,
            "energy bookkeeping broken at kappa={kappa}"
        );
        let photon = PhotonIn::normal_incidence(kappa, 0.0, Polarization::S).unwrap();
        assert!(
            momentum_excess_ok(&pair, &photon),
            "momentum excess must hold automatically at normal incidence: kappa={kappa}, k={}, k'={}",
            pair.k_perp,
            pair.kp_perp
        );
        n += 1;
    }
}

#[test]
fn densities_nonnegative_everywhere() {
    // squared projections must survive the expanded quotient algebra
    let mut rng = SplitMix64::new(0x005E_ED14);
    let mut n = 0usize;
    while n < 10_000 {
        let Some((kappa, pair)) = sample_pair(&mut rng) else {
            continue;
        };
        let photon =
            PhotonIn::normal_incidence(kappa, rng.uniform(0.0, 2.0 * PI), Polarization::S).unwrap();
        let Ok(sp) = structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        ) else {
            continue;
        };
        let flux = FluxParam::new(rng.uniform(-4.0, 4.0)).unwrap();
        let d = polarization_density(&sp, &pair, &flux);
        assert!(d.lambda_s >= 0.0, "lambda_s = {} at kappa={kappa}", d.lambda_s);
        assert!(d.lambda_p >= 0.0, "lambda_p = {} at kappa={kappa}", d.lambda_p);
        n += 1;
    }
}

#[test]
fn densities_are_integer_flux_independent() {
    let mut rng = SplitMix64::new(0x005E_ED11);
    let mut n = 0usize;
    while n < 200 {
        let Some((kappa, pair)) = sample_pair(&mut rng) else {
            continue;
        };
        let photon =
            PhotonIn::normal_incidence(kappa, rng.uniform(0.0, 2.0 * PI), Polarization::S).unwrap();
        let Ok(sp) = structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        ) else {
            continue;
        };
        // binary-exact fractional part so the flux decomposition is exact
        // and the integer-part independence can be asserted bit for bit
        let delta = rng.int_in(1, 15) as f64 / 16.0;
        let base = polarization_density(&sp, &pair, &FluxParam::new(delta).unwrap());
        for shift in [-3i64, -1, 2, 5] {
            let d = polarization_density(
                &sp,
                &pair,
                &FluxParam::new(shift as f64 + delta).unwrap(),
            );
            assert_eq!(d, base, "Lambda must depend on the flux only through delta");
        }
        // and the amplitude shifts only by the winding phase
        let d0 =
            closed_form_amplitude(&FluxParam::new(delta).unwrap(), &photon, &pair).unwrap();
        let d1 =
            closed_form_amplitude(&FluxParam::new(delta + 1.0).unwrap(), &photon, &pair).unwrap();
        let phase = num_complex::Complex64::from_polar(1.0, pair.phip_perp - pair.phi_perp);
        assert!((d1.d1 - phase * d0.d1).norm() <= 1e-12 * d0.d1.norm().max(1e-300));
        n += 1;
    }
}

#[test]
fn density_reflection_symmetry() {
    // swapping particle and antiparticle data (a <-> b, angles mirrored
    // through the photon azimuth) swaps the two winding sums' weights and
    // leaves the densities' structure intact
    let mut rng = SplitMix64::new(0x005E_ED12);
    let mut n = 0usize;
    while n < 200 {
        let Some((kappa, pair)) = sample_pair(&mut rng) else {
            continue;
        };
        let photon =
            PhotonIn::normal_incidence(kappa, rng.uniform(0.0, 2.0 * PI), Polarization::S).unwrap();
        let Ok(sp) = structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        ) else {
            continue;
        };
        let Ok(swapped) = structure_params(
            pair.kp_perp,
            pair.k_perp,
            photon.kappa_perp(),
            pair.phip_perp,
            pair.phi_perp,
            photon.phi(),
        ) else {
            continue;
        };
        // |sigma+|^2 and |sigma-|^2 trade places under the swap: the
        // quotient forms b^2 / (P_a P_b) and a^2 / (P_a P_b) share their
        // denominators, and the swap exchanges the numerators
        assert!((swapped.a - sp.b).abs() < 1e-14);
        assert!((swapped.b - sp.a).abs() < 1e-14);
        let s_plus = sp.sigma_plus.norm_sqr();
        let s_minus = sp.sigma_minus.norm_sqr();
        let w_plus = swapped.sigma_plus.norm_sqr();
        let w_minus = swapped.sigma_minus.norm_sqr();
        assert!(
            (w_plus - s_minus).abs() <= 1e-12 * s_minus.max(1e-300),
            "swap must map |sigma+|^2 onto |sigma-|^2"
        );
        assert!(
            (w_minus - s_plus).abs() <= 1e-12 * s_plus.max(1e-300),
            "swap must map |sigma-|^2 onto |sigma+|^2"
        );
        n += 1;
    }
}

#[test]
fn xsec_matches_tier_b_recomputation() {
    // end to end: the cross-section value rebuilt from the quadrature
    // oracle's amplitude agrees with the closed-form path
    let flux = FluxParam::new(0.37).unwrap();
    let photon = PhotonIn::normal_incidence(2.2, 0.9, Polarization::S).unwrap();
    let k_perp = 0.21f64.sqrt(); // symmetric split, eps = kappa / 2
    let pair = solve_pair(2.2, k_perp, 0.0, 1.0, 5.2, 2.8).unwrap();
    let alpha = 1.0 / 137.035999;
    let x = abpair::cross_section::differential_xsec(&flux, &photon, &pair, alpha).unwrap();
    let cfg = QuadratureConfig {
        damping_sequence: vec![0.2, 0.1, 0.05, 0.025, 0.0125],
        ..QuadratureConfig::default()
    };
    let o = oracle_amplitude(&flux, &photon, &pair, 12, OracleTier::B, &cfg).unwrap();
    let lambda_s = o.amplitude.d1.norm_sqr() / (pair.eps * pair.eps_bar);
    let recomputed = alpha / photon.kappa() * (2.0 * std::f64::consts::PI).powi(-3)
        * pair.k_perp
        * pair.kp_perp
        * lambda_s;
    assert!(x.value > 0.0);
    assert!(
        (x.value - recomputed).abs() < 1e-6 * x.value,
        "{} vs {}",
        x.value,
        recomputed
    );
}

#[test]
fn truncation_bound_honest_over_random_points() {
    let mut rng = SplitMix64::new(0x005E_ED13);
    let cfg = QuadratureConfig::default();
    let mut n = 0usize;
    while n < 20 {
        let Some((kappa, pair)) = sample_pair(&mut rng) else {
            continue;
        };
        let photon =
            PhotonIn::normal_incidence(kappa, rng.uniform(0.0, 2.0 * PI), Polarization::S).unwrap();
        let Ok(sp) = structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        ) else {
            continue;
        };
        if sp.a.max(sp.b) > 0.8 {
            continue;
        }
        let flux = FluxParam::new(rng.uniform(-2.0, 3.0)).unwrap();
        if flux.delta() == 0.0 {
            continue;
        }
        let m = 6 + (n % 5);
        let coarse = oracle_amplitude(&flux, &photon, &pair, m, OracleTier::A, &cfg).unwrap();
        let fine = oracle_amplitude(&flux, &photon, &pair, 2 * m, OracleTier::A, &cfg).unwrap();
        let diff = ((coarse.amplitude.d1 - fine.amplitude.d1).norm_sqr()
            + (coarse.amplitude.d2 - fine.amplitude.d2).norm_sqr()
            + (coarse.amplitude.dz - fine.amplitude.dz).norm_sqr())
        .sqrt();
        let bound = truncation_bound(&sp, flux.delta(), pair.k3, pair.kp3, m);
        assert!(
            diff <= bound,
            "bound {bound:e} violated by measured {diff:e} at m={m}"
        );
        n += 1;
    }
}
