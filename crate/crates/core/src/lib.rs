//! Scalar pair creation by a linearly polarized photon on an idealized
//! magnetic flux line.
//!
//! The library computes the closed-form production amplitude and the exact
//! differential cross section for the process, and verifies every analytic
//! ingredient of the closed form against independent partial-wave and
//! quadrature oracles:
//!
//! - [`specfun`]: real-order Bessel functions and oscillatory quadrature,
//! - [`kinematics`]: flux decomposition and conservation-law solving,
//! - [`amplitude`]: the closed-form amplitude and its brute-force oracles,
//! - [`cross_section`]: polarization densities, the differential cross
//!   section, and the near-threshold / high-energy limiting forms,
//! - [`verify`]: the identity suite pinning each analytic step,
//! - [`cli`]: the command-line front end.
//!
//! Natural units (hbar = c = 1) are used everywhere; momenta and energies
//! are quoted in units of the created particle's mass unless a mass is
//! passed explicitly.

pub mod amplitude;
pub mod cli;
pub mod cross_section;
pub mod kinematics;
pub mod rng;
pub mod specfun;
pub mod verify;
