//! Error-rate analysis: closed-form and numeric bit-error rates, Monte Carlo
//! estimation, operating regions and spectral efficiency over Rayleigh fading.

pub mod dapsk_ber;
pub mod dpsk_ber;
pub mod monte_carlo;
pub mod pawula;
pub mod regions;
pub mod ring_study;
pub mod spectral;

pub use dapsk_ber::dapsk_ber_numeric;
pub use dpsk_ber::{dpsk_ber, dpsk_symbol_error};
pub use monte_carlo::{monte_carlo_ber, McEstimate, McPlan};
pub use pawula::{pawula_tail, phase_tail};
pub use regions::{analytic_ber, operating_regions, target_crossing_db, OperatingRegions};
pub use ring_study::{ring_ratio_study, RingRatioEntry};
pub use spectral::{region_probabilities, spectral_efficiency, spectral_efficiency_curve};
