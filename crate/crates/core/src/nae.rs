//! Non-adaptive encoder design: wiretap-code rates, power split and on-off
//! threshold are fixed offline, before any channel realisation is seen.
//!
//! For a target message rate and outage budget there is a unique
//! delay-optimal choice: it meets the secrecy constraint with equality and
//! maximises the transmission probability by minimising the gain threshold
//! over the power split. Everything reduces to closed forms in the
//! decay-rate quantity lambda of the budget; the split and codeword rate
//! come out independent of transmit power, which only scales the threshold.

use crate::error::{Error, Result};
use crate::secrecy::{self, SecrecyBudget, SystemConfig, WiretapRates};
use crate::specfun;

const LN_2: f64 = std::f64::consts::LN_2;

/// A complete non-adaptive design: rate pair, power split, on-off gain
/// threshold, and the resulting transmission probability and throughput.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaeDesign {
    n_antennas: u32,
    rates: WiretapRates,
    phi: f64,
    threshold: f64,
    transmit_probability: f64,
    throughput: f64,
}

impl NaeDesign {
    /// Antenna count the design was computed for.
    pub fn n_antennas(&self) -> u32 {
        self.n_antennas
    }

    pub fn rates(&self) -> &WiretapRates {
        &self.rates
    }

    /// Fraction of power on the message stream.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// On-off threshold on the squared channel norm.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn transmit_probability(&self) -> f64 {
        self.transmit_probability
    }

    /// Message rate times transmission probability.
    pub fn throughput(&self) -> f64 {
        self.throughput
    }
}

/// High-SNR throughput approximation, split into the unconstrained part and
/// the secrecy loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaeThroughputApprox {
    /// Approximate throughput under the outage budget.
    pub eta: f64,
    /// Throughput without any secrecy constraint (budget 1).
    pub eta_unconstrained: f64,
    /// The gap between the two: 2 log2(sqrt(lambda) + 1).
    pub eta_loss: f64,
}

/// Additional power needed to tighten the outage budget, in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCost {
    /// Closed-form branch value: 20 log10(sqrt(lambda2) + 1) when starting
    /// from an unconstrained system, (10/(N-1)) log10(eps1/eps2) between
    /// two already-small budgets.
    pub approx_db: f64,
    /// Exact high-SNR form 20 log10((sqrt(lambda2)+1)/(sqrt(lambda1)+1)).
    pub exact_db: f64,
}

fn check_same_antennas(budget: &SecrecyBudget, config: &SystemConfig) -> Result<()> {
    if budget.n_antennas() != config.n_antennas() {
        return Err(Error::Config(format!(
            "budget is for {} antennas but the system has {}",
            budget.n_antennas(),
            config.n_antennas()
        )));
    }
    Ok(())
}

fn check_rate(rate_message: f64) -> Result<f64> {
    if !(rate_message > 0.0) || !rate_message.is_finite() {
        return Err(Error::Domain(format!(
            "message rate must be positive and finite, got {rate_message}"
        )));
    }
    let x = rate_message.exp2();
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "message rate {rate_message} overflows 2^rate"
        )));
    }
    Ok(x)
}

/// Delay-optimal non-adaptive design for a message rate under an outage
/// budget: meets the secrecy constraint with equality (or spends no
/// redundancy at all when the budget is vacuous) and transmits as often
/// as possible.
///
/// ```
/// use secrecylab_core::{nae, SecrecyBudget, SystemConfig};
/// let config = SystemConfig::new(4, 100.0).unwrap();
/// let budget = SecrecyBudget::new(0.01, 4).unwrap();
/// let design = nae::delay_optimal_design(2.0, &budget, &config).unwrap();
/// assert!((design.phi() - 0.2076).abs() < 1e-4);
/// assert!(design.transmit_probability() > 0.99);
/// ```
pub fn delay_optimal_design(
    rate_message: f64,
    budget: &SecrecyBudget,
    config: &SystemConfig,
) -> Result<NaeDesign> {
    check_same_antennas(budget, config)?;
    let x = check_rate(rate_message)?;
    let lambda = budget.lambda();
    let power = config.power_linear();

    let (phi, rate_codeword, threshold) = if budget.is_unconstrained() {
        // No artificial noise, no redundancy; threshold just guarantees
        // decodability at the message rate.
        (1.0, rate_message, (x - 1.0) / power)
    } else {
        let s_signal = (x - 1.0).sqrt();
        let s_noise = (x * lambda).sqrt();
        let phi = s_signal / (s_noise + s_signal);
        // Redundancy chosen so the outage constraint binds exactly.
        let rate_codeword = rate_message + ((1.0 - 1.0 / x) * lambda).sqrt().ln_1p() / LN_2;
        // Minimal gain threshold over all splits: (sqrt(x lambda) +
        // sqrt(x-1))^2 / P, attained at the phi above.
        let threshold = (s_noise + s_signal).powi(2) / power;
        (phi, rate_codeword, threshold)
    };

    let rates = WiretapRates::new(rate_codeword, rate_message)?;
    let p_tx = secrecy::transmit_probability(threshold, config.n_antennas())?;
    Ok(NaeDesign {
        n_antennas: config.n_antennas(),
        rates,
        phi,
        threshold,
        transmit_probability: p_tx,
        throughput: p_tx * rate_message,
    })
}

/// Throughput-optimal message rate: maximises rate times transmission
/// probability of the delay-optimal design. The objective rises from zero,
/// peaks once and decays, so the derivative changes sign exactly once;
/// bracket expansion followed by bisection on a central-difference
/// derivative, to 1e-8 on the rate.
pub fn optimal_message_rate(
    budget: &SecrecyBudget,
    config: &SystemConfig,
) -> Result<NaeDesign> {
    check_same_antennas(budget, config)?;
    let throughput = |rs: f64| -> Result<f64> {
        Ok(delay_optimal_design(rs, budget, config)?.throughput())
    };
    // Only the sign matters, so the difference is left unnormalised.
    let slope = |rs: f64| -> Result<f64> {
        let h = 1e-6 * rs.max(1.0);
        let lo = rs - h;
        if lo > 0.0 {
            Ok(throughput(rs + h)? - throughput(lo)?)
        } else {
            Ok(throughput(rs + h)? - throughput(rs)?)
        }
    };
    // Cap the search at the capacity of an absurdly strong channel.
    let rate_cap = (1.0 + config.power_linear() * 1e6).log2();

    let mut lo = 1e-6_f64;
    if slope(lo)? <= 0.0 {
        return Err(Error::Search(
            "throughput is not increasing at vanishing rate".into(),
        ));
    }
    let mut hi = 1.0_f64;
    while slope(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > rate_cap {
            return Err(Error::Search(format!(
                "no throughput peak below the rate cap {rate_cap}"
            )));
        }
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if slope(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    delay_optimal_design(0.5 * (lo + hi), budget, config)
}

/// High-SNR approximation of the throughput-optimal message rate, via the
/// principal Lambert W branch. The W argument e N! P^N / (sqrt(lambda)+1)^{2N}
/// overflows f64 quickly, so it is assembled and consumed in the log domain.
pub fn rs_high_snr_approx(budget: &SecrecyBudget, config: &SystemConfig) -> Result<f64> {
    let n = budget.n_antennas();
    let nf = f64::from(n);
    let power = config.power_linear();
    check_same_antennas(budget, config)?;
    let ln_arg = 1.0 + specfun::ln_factorial(n) + nf * power.ln()
        - 2.0 * nf * budget.lambda().sqrt().ln_1p();
    let w = specfun::lambert_w0_ln(ln_arg)?;
    Ok((w - 1.0) / (nf * LN_2))
}

/// High-SNR throughput approximation: the unconstrained throughput
/// log2(P) - log2(ln P)/N + log2((N-1)!)/N minus the secrecy loss
/// 2 log2(sqrt(lambda) + 1). Needs P > 1 for the iterated logarithm.
pub fn throughput_high_snr_approx(
    budget: &SecrecyBudget,
    config: &SystemConfig,
) -> Result<NaeThroughputApprox> {
    check_same_antennas(budget, config)?;
    let power = config.power_linear();
    if power <= 1.0 {
        return Err(Error::Domain(format!(
            "high-SNR throughput needs power > 1 (0 dB), got {power}"
        )));
    }
    let nf = f64::from(budget.n_antennas());
    let eta_unconstrained = power.log2() - power.ln().log2() / nf
        + specfun::ln_factorial(budget.n_antennas() - 1) / (nf * LN_2);
    let eta_loss = 2.0 * budget.lambda().sqrt().ln_1p() / LN_2;
    Ok(NaeThroughputApprox {
        eta: eta_unconstrained - eta_loss,
        eta_unconstrained,
        eta_loss,
    })
}

/// Additional power (dB) required to tighten the outage budget from `eps1`
/// to `eps2` at the same throughput, in the high-SNR regime. The branch
/// form matches how the cost is usually quoted; the exact form is returned
/// alongside for validation. Both agree when starting from eps1 = 1.
pub fn power_cost_db(eps1: f64, eps2: f64, n_antennas: u32) -> Result<PowerCost> {
    if !(eps2 <= eps1) {
        return Err(Error::Domain(format!(
            "power cost is for tightening the budget: need eps2 <= eps1, got {eps1} -> {eps2}"
        )));
    }
    let lambda1 = secrecy::lambda_quantity(eps1, n_antennas)?;
    let lambda2 = secrecy::lambda_quantity(eps2, n_antennas)?;
    let exact_db = 20.0 * ((lambda2.sqrt() + 1.0) / (lambda1.sqrt() + 1.0)).log10();
    let approx_db = if eps1 == 1.0 {
        20.0 * (lambda2.sqrt() + 1.0).log10()
    } else {
        10.0 / (f64::from(n_antennas) - 1.0) * (eps1 / eps2).log10()
    };
    Ok(PowerCost { approx_db, exact_db })
}

/// Minimum transmit power that sustains message rate `rate_message` under
/// the outage budget while transmitting at least a fraction `delta` of the
/// time: the delay-optimal threshold scales as 1/P, so P_min is the
/// numerator of that threshold over the gain quantile at delta.
pub fn min_power(rate_message: f64, budget: &SecrecyBudget, delta: f64) -> Result<f64> {
    let x = check_rate(rate_message)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "transmission-probability floor must lie in (0, 1), got {delta}"
        )));
    }
    let numerator = ((x * budget.lambda()).sqrt() + (x - 1.0).sqrt()).powi(2);
    let quantile = specfun::inv_reg_upper_gamma(budget.n_antennas(), delta)?;
    Ok(numerator / quantile)
}
