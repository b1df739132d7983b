//! Shared system model and the closed-form secrecy/outage expressions.
//!
//! Model: an N-antenna transmitter beamforms towards a single-antenna
//! receiver over slow Rayleigh fading and radiates artificial noise in the
//! N-1 dimensional null space of the receiver's channel. A passive
//! eavesdropper with an independent Rayleigh channel and arbitrarily many
//! antennas-worth of noise advantage is modelled at the worst case: its own
//! receiver noise is taken to zero, which makes every expression here
//! independent of the eavesdropper's noise floor and distance.
//!
//! Under that worst case, the fraction `phi` of transmit power spent on the
//! message (the remaining 1-phi spread over the null space) fully determines
//! the eavesdropper's SNR distribution, and secrecy outage happens exactly
//! when the eavesdropper capacity exceeds the redundancy rate of the wiretap
//! code.

use crate::error::{Error, Result};
use crate::specfun;

/// Static description of one transmission scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    n_antennas: u32,
    power_linear: f64,
    eve_variance: f64,
    rng_seed: u64,
}

impl SystemConfig {
    /// A transmitter with `n_antennas >= 2` (at least one spatial dimension
    /// must remain for artificial noise) and average power `power_linear`
    /// in linear units.
    pub fn new(n_antennas: u32, power_linear: f64) -> Result<Self> {
        if n_antennas < 2 {
            return Err(Error::Config(format!(
                "need at least 2 transmit antennas for artificial noise, got {n_antennas}"
            )));
        }
        if !(power_linear > 0.0) || !power_linear.is_finite() {
            return Err(Error::Config(format!(
                "transmit power must be positive and finite, got {power_linear}"
            )));
        }
        Ok(SystemConfig {
            n_antennas,
            power_linear,
            eve_variance: 1.0,
            rng_seed: 0,
        })
    }

    /// Per-entry variance of the eavesdropper channel. Every design quantity
    /// is invariant to it (the worst-case eavesdropper SNR is a ratio), but
    /// the simulator samples with it to demonstrate exactly that.
    pub fn with_eve_variance(mut self, eve_variance: f64) -> Result<Self> {
        if !(eve_variance > 0.0) || !eve_variance.is_finite() {
            return Err(Error::Config(format!(
                "eavesdropper channel variance must be positive and finite, got {eve_variance}"
            )));
        }
        self.eve_variance = eve_variance;
        Ok(self)
    }

    pub fn with_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    pub fn n_antennas(&self) -> u32 {
        self.n_antennas
    }

    pub fn power_linear(&self) -> f64 {
        self.power_linear
    }

    pub fn eve_variance(&self) -> f64 {
        self.eve_variance
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }
}

/// A secrecy outage constraint together with the decay-rate quantity that
/// carries it through every design formula.
///
/// `lambda = (N-1) (epsilon^{1/(1-N)} - 1)` is zero exactly at epsilon = 1
/// (no constraint) and grows as the constraint tightens; for fixed epsilon
/// it strictly decreases in N towards ln(1/epsilon).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyBudget {
    epsilon: f64,
    n_antennas: u32,
    lambda: f64,
}

impl SecrecyBudget {
    /// Maximum tolerated secrecy outage probability `epsilon` in (0, 1]
    /// for an `n_antennas` transmitter.
    pub fn new(epsilon: f64, n_antennas: u32) -> Result<Self> {
        let lambda = lambda_quantity(epsilon, n_antennas)?;
        Ok(SecrecyBudget {
            epsilon,
            n_antennas,
            lambda,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n_antennas(&self) -> u32 {
        self.n_antennas
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// True when the outage constraint is vacuous (epsilon = 1).
    pub fn is_unconstrained(&self) -> bool {
        self.lambda == 0.0
    }
}

/// Rate pair of a wiretap code: the codeword (transmission) rate and the
/// confidential message rate it carries. The gap is redundancy spent on
/// confusing the eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WiretapRates {
    rate_codeword: f64,
    rate_message: f64,
}

impl WiretapRates {
    pub fn new(rate_codeword: f64, rate_message: f64) -> Result<Self> {
        if !rate_codeword.is_finite() || !rate_message.is_finite() {
            return Err(Error::Config(format!(
                "rates must be finite, got codeword {rate_codeword}, message {rate_message}"
            )));
        }
        if rate_message < 0.0 || rate_message > rate_codeword {
            return Err(Error::Config(format!(
                "need 0 <= message rate <= codeword rate, got codeword {rate_codeword}, \
                 message {rate_message}"
            )));
        }
        Ok(WiretapRates {
            rate_codeword,
            rate_message,
        })
    }

    pub fn rate_codeword(&self) -> f64 {
        self.rate_codeword
    }

    pub fn rate_message(&self) -> f64 {
        self.rate_message
    }

    /// Redundancy rate sacrificed for secrecy.
    pub fn rate_redundancy(&self) -> f64 {
        self.rate_codeword - self.rate_message
    }
}

/// The decay-rate quantity `(N-1) (epsilon^{1/(1-N)} - 1)` for an outage
/// budget epsilon in (0, 1] and N >= 2 antennas.
///
/// ```
/// let lambda = secrecylab_core::secrecy::lambda_quantity(1.0, 4).unwrap();
/// assert_eq!(lambda, 0.0);
/// ```
pub fn lambda_quantity(epsilon: f64, n_antennas: u32) -> Result<f64> {
    if n_antennas < 2 {
        return Err(Error::Config(format!(
            "need at least 2 transmit antennas, got {n_antennas}"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!(
            "outage budget must lie in (0, 1], got {epsilon}"
        )));
    }
    if epsilon == 1.0 {
        return Ok(0.0);
    }
    let nm1 = f64::from(n_antennas) - 1.0;
    // epsilon^{1/(1-N)} = exp(ln(1/epsilon)/(N-1)), kept in this form so
    // large N degrades gracefully towards lambda -> ln(1/epsilon).
    Ok(nm1 * ((-epsilon.ln() / nm1).exp() - 1.0))
}

/// Complementary c.d.f. of the worst-case eavesdropper SNR when a fraction
/// `phi` of power carries the message: P(SNR_eve > gamma) =
/// (1 + gamma (phi^{-1} - 1)/(N-1))^{1-N}. At phi = 1 no artificial noise
/// is radiated and the zero-noise eavesdropper SNR is unbounded, so the
/// c.c.d.f. is identically 1.
pub fn eve_snr_ccdf(gamma: f64, phi: f64, n_antennas: u32) -> Result<f64> {
    check_phi(phi)?;
    if n_antennas < 2 {
        return Err(Error::Config(format!(
            "need at least 2 transmit antennas, got {n_antennas}"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("SNR must be nonnegative, got {gamma}")));
    }
    let nm1 = f64::from(n_antennas) - 1.0;
    let base = 1.0 + gamma * (1.0 / phi - 1.0) / nm1;
    Ok(base.powf(-nm1))
}

/// Large-N limit of [`eve_snr_ccdf`]: exp(-gamma (1-phi)/phi).
pub fn eve_snr_ccdf_exponential_limit(gamma: f64, phi: f64) -> Result<f64> {
    check_phi(phi)?;
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("SNR must be nonnegative, got {gamma}")));
    }
    Ok((-gamma * (1.0 - phi) / phi).exp())
}

/// Secrecy outage probability of a rate pair under power fraction `phi`:
/// the probability that the worst-case eavesdropper capacity exceeds the
/// redundancy rate. Equals 1 whenever no redundancy is spent or no noise
/// is radiated.
pub fn secrecy_outage_probability(
    rates: &WiretapRates,
    phi: f64,
    n_antennas: u32,
) -> Result<f64> {
    let re = rates.rate_redundancy();
    // Outage iff log2(1 + SNR_eve) > R_e, i.e. SNR_eve > 2^{R_e} - 1.
    eve_snr_ccdf((re.exp2() - 1.0).max(0.0), phi, n_antennas)
}

/// On-off transmission probability for a gain threshold `mu`: the chance
/// that the squared channel norm of an N-antenna Rayleigh channel exceeds
/// the threshold.
pub fn transmit_probability(mu: f64, n_antennas: u32) -> Result<f64> {
    if n_antennas < 2 {
        return Err(Error::Config(format!(
            "need at least 2 transmit antennas, got {n_antennas}"
        )));
    }
    specfun::reg_upper_gamma(n_antennas, mu)
}

/// Capacity of the intended link when the squared channel norm is `gain`
/// and a fraction `phi` of power `power` carries the message.
pub fn capacity_bob(power: f64, phi: f64, gain: f64) -> Result<f64> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::Domain(format!(
            "power must be positive and finite, got {power}"
        )));
    }
    check_phi(phi)?;
    if !(gain >= 0.0) {
        return Err(Error::Domain(format!(
            "channel gain must be nonnegative, got {gain}"
        )));
    }
    Ok((1.0 + power * phi * gain).log2())
}

pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(Error::Domain(format!(
            "power fraction must lie in (0, 1], got {phi}"
        )));
    }
    Ok(())
}
