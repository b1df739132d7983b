//! Adaptive encoder design: the transmitter knows the realised intended
//! channel and adapts the codeword rate, power split and message rate to
//! it, subject to the same secrecy outage budget per transmission.
//!
//! Transmission happens whenever the effective SNR `tau = P ||h||^2`
//! exceeds the decay-rate quantity lambda. The codeword rate rides the
//! instantaneous capacity, the secrecy constraint binds with equality, and
//! the split maximising the message rate has a closed form.
//!
//! The textbook way to write that closed form,
//! (sqrt(lambda tau) - sqrt(tau - lambda + 1)) / (lambda - 1), loses all
//! precision near lambda = 1 where numerator and denominator vanish
//! together. Multiplying through by the conjugate gives the equivalent
//!   rate = 2 log2( (tau + 1) / (sqrt(lambda tau) + sqrt(tau - lambda + 1)) )
//!   phi  = (tau - lambda) / (sqrt(tau lambda (tau - lambda + 1)) + tau)
//! which is well conditioned on the whole feasible region, covers
//! lambda = 1 without a special branch, and collapses to the unconstrained
//! expressions at lambda = 0. These are the forms implemented here.

use crate::channel::sample_effective_gain;
use crate::error::{Error, Result};
use crate::quad;
use crate::secrecy::{self, SecrecyBudget, SystemConfig, WiretapRates};
use crate::specfun;

const LN_2: f64 = std::f64::consts::LN_2;

/// The adaptive design at one channel realisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeDesignPoint {
    effective_gain: f64,
    effective_snr: f64,
    phi: f64,
    rates: WiretapRates,
    transmitting: bool,
}

impl AeDesignPoint {
    /// Squared norm of the intended channel this point was designed for.
    pub fn effective_gain(&self) -> f64 {
        self.effective_gain
    }

    /// Power times effective gain.
    pub fn effective_snr(&self) -> f64 {
        self.effective_snr
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn rates(&self) -> &WiretapRates {
        &self.rates
    }

    pub fn transmitting(&self) -> bool {
        self.transmitting
    }
}

/// Throughput of the adaptive scheme evaluated several ways at once, for
/// cross-validation: exact quadrature, Monte Carlo over channel gains, and
/// the high-SNR expansions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeThroughputReport {
    /// Expected message rate by adaptive quadrature.
    pub eta_exact: f64,
    /// Monte Carlo estimate of the same expectation.
    pub eta_monte_carlo: f64,
    /// 95% confidence half-width of the Monte Carlo estimate.
    pub eta_monte_carlo_ci: f64,
    pub mc_samples: u64,
    /// Full high-SNR expansion; absent when the budget is vacuous.
    pub eta_approx_full: Option<f64>,
    /// Leading-order expansion; absent at powers of at most 0 dB.
    pub eta_approx_simple: Option<f64>,
    /// Secrecy loss 2 log2(sqrt(lambda) + 1).
    pub eta_loss: f64,
}

/// Message rate achievable with split `phi` at a given effective gain,
/// with the outage constraint binding: log2 of (1 + tau phi) over
/// (1 + lambda phi / (1 - phi)). Positive only on phi in (0, 1 - lambda/tau);
/// negative values signal an infeasible split. The maximiser of this
/// function is what [`adapt_design`] returns in closed form.
pub fn message_rate_for_split(
    effective_gain: f64,
    phi: f64,
    budget: &SecrecyBudget,
    config: &SystemConfig,
) -> Result<f64> {
    check_same_antennas(budget, config)?;
    check_gain(effective_gain)?;
    secrecy::check_phi(phi)?;
    let lambda = budget.lambda();
    if phi >= 1.0 && lambda > 0.0 {
        return Err(Error::Domain(
            "phi = 1 leaves no artificial noise and cannot meet a real outage budget".into(),
        ));
    }
    let tau = config.power_linear() * effective_gain;
    let denom = if lambda == 0.0 {
        1.0
    } else {
        1.0 + lambda * phi / (1.0 - phi)
    };
    Ok(((1.0 + tau * phi) / denom).log2())
}

/// The adaptive design at effective gain `effective_gain`: transmit iff
/// tau = P * gain exceeds lambda, with the message-rate-maximising split
/// and the codeword rate matched to the instantaneous capacity.
pub fn adapt_design(
    effective_gain: f64,
    budget: &SecrecyBudget,
    config: &SystemConfig,
) -> Result<AeDesignPoint> {
    check_same_antennas(budget, config)?;
    check_gain(effective_gain)?;
    let lambda = budget.lambda();
    let power = config.power_linear();
    let tau = power * effective_gain;

    let silent = AeDesignPoint {
        effective_gain,
        effective_snr: tau,
        phi: 1.0,
        rates: WiretapRates::new(0.0, 0.0)?,
        transmitting: false,
    };
    if tau <= lambda {
        // Channel too weak to carry any positive secrecy rate.
        return Ok(silent);
    }

    let phi = if lambda == 0.0 {
        1.0
    } else {
        (tau - lambda) / ((tau * lambda * (tau - lambda + 1.0)).sqrt() + tau)
    };
    let rate_codeword = secrecy::capacity_bob(power, phi, effective_gain)?;
    let rate_message = if lambda == 0.0 {
        // No redundancy spent; reuse the capacity value bit for bit.
        rate_codeword
    } else {
        2.0 * ((tau + 1.0) / ((lambda * tau).sqrt() + (tau - lambda + 1.0).sqrt())).log2()
    };
    if rate_message <= 0.0 {
        // So close to the threshold that the rate is lost to rounding;
        // keep `transmitting` synonymous with a positive message rate.
        return Ok(silent);
    }
    Ok(AeDesignPoint {
        effective_gain,
        effective_snr: tau,
        phi,
        rates: WiretapRates::new(rate_codeword, rate_message)?,
        transmitting: true,
    })
}

/// Expected message rate of the adaptive scheme over the fading
/// distribution, by adaptive quadrature against the Gamma(N, 1) gain
/// density. The integration window past the on-off threshold is extended
/// until the analytic tail bound drops below 1e-12.
pub fn throughput_exact(budget: &SecrecyBudget, config: &SystemConfig) -> Result<f64> {
    check_same_antennas(budget, config)?;
    let n = budget.n_antennas();
    let nf = f64::from(n);
    let lambda = budget.lambda();
    let power = config.power_linear();
    let lo = lambda / power;

    let mut span = 50.0 + 10.0 * nf;
    let mut hi = lo + span;
    for _ in 0..8 {
        if tail_bound(n, power, hi) < 1e-12 {
            break;
        }
        span *= 2.0;
        hi = lo + span;
    }
    if tail_bound(n, power, hi) >= 1e-12 {
        return Err(Error::Quadrature(
            "could not truncate the throughput integral tail below 1e-12".into(),
        ));
    }

    let ln_norm = specfun::ln_factorial(n - 1);
    let integrand = move |r: f64| {
        let tau = power * r;
        let rate = if lambda == 0.0 {
            (1.0 + tau).log2()
        } else {
            2.0 * ((tau + 1.0) / ((lambda * tau).sqrt() + (tau - lambda + 1.0).sqrt())).log2()
        };
        rate * ((nf - 1.0) * r.ln() - r - ln_norm).exp()
    };
    quad::integrate(integrand, lo, hi, 1e-9, 4000)
}

/// Upper bound on the neglected tail of the throughput integral past `r`:
/// the message rate is below the unconstrained capacity log2(1 + P t), and
/// log2(1 + P t) <= log2(1 + P r) + (t - r)/(r ln 2) for t >= r.
fn tail_bound(n: u32, power: f64, r: f64) -> f64 {
    let cap = (1.0 + power * r).log2();
    let tail_mass = specfun::reg_upper_gamma(n, r).unwrap_or(0.0);
    let tail_excess = f64::from(n) * specfun::reg_upper_gamma(n + 1, r).unwrap_or(0.0);
    cap * tail_mass + tail_excess / (r * LN_2)
}

/// Full high-SNR expansion of the adaptive throughput, including the
/// finite-power correction terms in lambda/P. Undefined for a vacuous
/// budget (lambda = 0), whose expansion is the unconstrained one.
pub fn throughput_approx_full(budget: &SecrecyBudget, config: &SystemConfig) -> Result<f64> {
    check_same_antennas(budget, config)?;
    if budget.is_unconstrained() {
        return Err(Error::Domain(
            "full expansion needs a binding budget; use the simple form at epsilon = 1".into(),
        ));
    }
    let n = budget.n_antennas();
    let nf = f64::from(n);
    let lambda = budget.lambda();
    let power = config.power_linear();
    let ratio = lambda / power;
    let sqrt_l = lambda.sqrt();

    let leading = (power / lambda).log2() + specfun::digamma_int(n)? / LN_2;
    let loss_term =
        2.0 * (sqrt_l / (sqrt_l + 1.0)).log2() * specfun::reg_upper_gamma(n, ratio)?;
    let correction = ratio.powi(n as i32) / (nf * nf * specfun::ln_factorial(n - 1).exp() * LN_2)
        * specfun::hyp2f2_nn(n, ratio)?;
    Ok(leading + loss_term + correction)
}

/// Leading-order high-SNR throughput: log2(P) + psi(N)/ln 2 minus the
/// secrecy loss 2 log2(sqrt(lambda) + 1). Needs P > 1 to be meaningful.
pub fn throughput_approx_simple(
    budget: &SecrecyBudget,
    config: &SystemConfig,
) -> Result<crate::nae::NaeThroughputApprox> {
    check_same_antennas(budget, config)?;
    let power = config.power_linear();
    if power <= 1.0 {
        return Err(Error::Domain(format!(
            "high-SNR throughput needs power > 1 (0 dB), got {power}"
        )));
    }
    let eta_unconstrained = power.log2() + specfun::digamma_int(budget.n_antennas())? / LN_2;
    let eta_loss = 2.0 * budget.lambda().sqrt().ln_1p() / LN_2;
    Ok(crate::nae::NaeThroughputApprox {
        eta: eta_unconstrained - eta_loss,
        eta_unconstrained,
        eta_loss,
    })
}

/// High-SNR throughput gain of adapting the encoder over the non-adaptive
/// design: log2(ln P)/N + psi(N)/ln 2 - log2((N-1)!)/N. Independent of the
/// outage budget, since the secrecy loss is the same on both sides.
pub fn throughput_gain_approx(config: &SystemConfig) -> Result<f64> {
    let power = config.power_linear();
    if power <= 1.0 {
        return Err(Error::Domain(format!(
            "high-SNR gain needs power > 1 (0 dB), got {power}"
        )));
    }
    let n = config.n_antennas();
    let nf = f64::from(n);
    Ok(power.ln().log2() / nf + specfun::digamma_int(n)? / LN_2
        - specfun::ln_factorial(n - 1) / (nf * LN_2))
}

/// Evaluate the adaptive throughput every way at once: exact quadrature,
/// a Monte Carlo average of [`adapt_design`] message rates over
/// `mc_samples` fresh channel gains (stream 0 of the config seed), and the
/// high-SNR expansions where they are defined.
pub fn throughput_report(
    budget: &SecrecyBudget,
    config: &SystemConfig,
    mc_samples: u64,
) -> Result<AeThroughputReport> {
    if mc_samples == 0 {
        return Err(Error::Config("need at least one Monte Carlo sample".into()));
    }
    let eta_exact = throughput_exact(budget, config)?;

    let mut rng = crate::channel::stream_rng(config.rng_seed(), 0);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..mc_samples {
        let gain = sample_effective_gain(&mut rng, config.n_antennas());
        let rate = adapt_design(gain, budget, config)?.rates().rate_message();
        sum += rate;
        sum_sq += rate * rate;
    }
    let m = mc_samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    let ci = 1.96 * (var / m).sqrt();

    let eta_approx_full = match throughput_approx_full(budget, config) {
        Ok(v) => Some(v),
        Err(Error::Domain(_)) | Err(Error::Convergence(_)) => None,
        Err(e) => return Err(e),
    };
    let eta_approx_simple = match throughput_approx_simple(budget, config) {
        Ok(a) => Some(a.eta),
        Err(Error::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(AeThroughputReport {
        eta_exact,
        eta_monte_carlo: mean,
        eta_monte_carlo_ci: ci,
        mc_samples,
        eta_approx_full,
        eta_approx_simple,
        eta_loss: 2.0 * budget.lambda().sqrt().ln_1p() / LN_2,
    })
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

fn check_gain(gain: f64) -> Result<()> {
    if !(gain >= 0.0) || !gain.is_finite() {
        return Err(Error::Domain(format!(
            "effective gain must be finite and nonnegative, got {gain}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secrecy::secrecy_outage_probability;

    fn cfg(n: u32, p: f64) -> SystemConfig {
        SystemConfig::new(n, p).unwrap()
    }

    fn budget(eps: f64, n: u32) -> SecrecyBudget {
        SecrecyBudget::new(eps, n).unwrap()
    }

    #[test]
    fn adapt_reference_point() {
        // gain 1, eps 0.01, N 4, P 100.
        let d = adapt_design(1.0, &budget(0.01, 4), &cfg(4, 100.0)).unwrap();
        assert!(d.transmitting());
        assert!((d.phi() - 0.2153157506).abs() < 1e-9, "phi {}", d.phi());
        assert!(
            (d.rates().rate_codeword() - 4.4938762628).abs() < 1e-9,
            "rb {}",
            d.rates().rate_codeword()
        );
        assert!(
            (d.rates().rate_message() - 2.4946939443).abs() < 1e-9,
            "rs {}",
            d.rates().rate_message()
        );
        assert_eq!(d.effective_snr(), 100.0);
    }

    #[test]
    fn codeword_rate_is_exactly_the_instantaneous_capacity() {
        let b = budget(0.01, 4);
        let c = cfg(4, 100.0);
        for gain in [0.2, 1.0, 3.7, 12.0] {
            let d = adapt_design(gain, &b, &c).unwrap();
            let cap = secrecy::capacity_bob(100.0, d.phi(), gain).unwrap();
            // Bitwise: the simulator's decode check relies on it.
            assert_eq!(d.rates().rate_codeword().to_bits(), cap.to_bits());
        }
    }

    #[test]
    fn outage_constraint_binds_exactly() {
        for (eps, n, p) in [(0.01, 4u32, 100.0), (0.3, 2, 5.0), (1e-4, 8, 1e4)] {
            let b = budget(eps, n);
            let c = cfg(n, p);
            for gain in [0.5, 1.0, 2.0, 8.0, 40.0] {
                let d = adapt_design(gain, &b, &c).unwrap();
                if !d.transmitting() {
                    continue;
                }
                let p_so = secrecy_outage_probability(d.rates(), d.phi(), n).unwrap();
                assert!(
                    (p_so - eps).abs() < 1e-9,
                    "eps={eps} n={n} gain={gain}: {p_so}"
                );
            }
        }
    }

    #[test]
    fn closed_form_split_beats_its_neighbours() {
        let b = budget(0.05, 6);
        let c = cfg(6, 30.0);
        for gain in [0.7, 1.3, 5.0] {
            let d = adapt_design(gain, &b, &c).unwrap();
            let best = message_rate_for_split(gain, d.phi(), &b, &c).unwrap();
            assert!((best - d.rates().rate_message()).abs() < 1e-12);
            for dphi in [-1e-4, 1e-4] {
                let near = message_rate_for_split(gain, d.phi() + dphi, &b, &c).unwrap();
                assert!(near <= best + 1e-12, "gain={gain} dphi={dphi}");
            }
        }
    }

    #[test]
    fn silent_below_threshold() {
        let b = budget(0.01, 4);
        let c = cfg(4, 100.0);
        let threshold = b.lambda() / 100.0;
        let d = adapt_design(threshold, &b, &c).unwrap();
        assert!(!d.transmitting());
        assert_eq!(d.rates().rate_message(), 0.0);
        assert_eq!(d.rates().rate_codeword(), 0.0);
        let d = adapt_design(threshold * (1.0 + 1e-5), &b, &c).unwrap();
        assert!(d.transmitting());
        assert!(d.rates().rate_message() > 0.0);
        assert!(d.rates().rate_message() < 1e-3);
        // Hairline above the threshold the rate can round away entirely;
        // whatever happens, transmitting must mean a positive rate.
        for bump in [1e-13, 1e-11, 1e-9, 1e-7] {
            let d = adapt_design(threshold * (1.0 + bump), &b, &c).unwrap();
            assert_eq!(d.transmitting(), d.rates().rate_message() > 0.0);
        }
    }

    #[test]
    fn unconstrained_budget_uses_full_power_and_capacity() {
        let b = budget(1.0, 4);
        let c = cfg(4, 100.0);
        let d = adapt_design(1.0, &b, &c).unwrap();
        assert!(d.transmitting());
        assert_eq!(d.phi(), 1.0);
        let cap = 101f64.log2();
        assert!((d.rates().rate_message() - cap).abs() < 1e-12);
        assert!((d.rates().rate_codeword() - cap).abs() < 1e-12);
        // Zero gain still means silence.
        assert!(!adapt_design(0.0, &b, &c).unwrap().transmitting());
    }

    #[test]
    fn conjugate_form_covers_the_unit_lambda_point() {
        // epsilon = ((N-1)/N)^{N-1} puts lambda at 1, where the textbook
        // expressions are 0/0; the conjugate form must land on the limit
        // values (tau-1)/(2 tau) and log2((tau+1)^2 / (4 tau)).
        let eps = 0.421875; // (3/4)^3, exact in f64
        let b = budget(eps, 4);
        assert!((b.lambda() - 1.0).abs() < 1e-12);
        let c = cfg(4, 100.0);
        for gain in [0.05, 0.4, 1.0, 9.0] {
            let tau = 100.0 * gain;
            let d = adapt_design(gain, &b, &c).unwrap();
            let phi_limit = (tau - 1.0) / (2.0 * tau);
            let rs_limit = ((tau + 1.0) * (tau + 1.0) / (4.0 * tau)).log2();
            assert!((d.phi() - phi_limit).abs() < 1e-9, "gain={gain}");
            assert!(
                (d.rates().rate_message() - rs_limit).abs() < 1e-9,
                "gain={gain}"
            );
        }
        // And it is continuous through lambda = 1.
        for eps_near in [0.4218, 0.4219] {
            let b_near = budget(eps_near, 4);
            let d = adapt_design(1.0, &b_near, &cfg(4, 100.0)).unwrap();
            let d_at = adapt_design(1.0, &b, &c).unwrap();
            assert!((d.phi() - d_at.phi()).abs() < 1e-3);
        }
    }

    #[test]
    fn message_rate_increases_with_gain() {
        let b = budget(0.01, 4);
        let c = cfg(4, 100.0);
        let mut prev = 0.0;
        for i in 1..200 {
            let gain = b.lambda() / 100.0 + i as f64 * 0.05;
            let d = adapt_design(gain, &b, &c).unwrap();
            assert!(d.rates().rate_message() >= prev);
            prev = d.rates().rate_message();
        }
    }

    #[test]
    fn split_rate_function_flags_infeasible_region() {
        let b = budget(0.01, 4);
        let c = cfg(4, 100.0);
        // Feasible edge: phi past 1 - lambda/tau yields nonpositive rate.
        let edge = 1.0 - b.lambda() / 100.0;
        assert!(message_rate_for_split(1.0, edge + 1e-6, &b, &c).unwrap() < 0.0);
        assert!(message_rate_for_split(1.0, edge - 1e-3, &b, &c).unwrap() > 0.0);
        assert!(message_rate_for_split(1.0, 1.0, &b, &c).is_err());
        // Unconstrained: phi = 1 is the optimum and allowed.
        let v = message_rate_for_split(1.0, 1.0, &budget(1.0, 4), &c).unwrap();
        assert!((v - 101f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn exact_throughput_reference_behaviour() {
        // Monotone in P, and the simple expansion closes in at high SNR.
        let b = budget(0.01, 4);
        let lo = throughput_exact(&b, &cfg(4, 100.0)).unwrap();
        let hi = throughput_exact(&b, &cfg(4, 1e4)).unwrap();
        assert!(hi > lo);
        let approx = throughput_approx_simple(&b, &cfg(4, 1e8)).unwrap().eta;
        let exact = throughput_exact(&b, &cfg(4, 1e8)).unwrap();
        assert!((approx - exact).abs() < 0.01, "{approx} vs {exact}");
    }

    #[test]
    fn full_expansion_reference_point() {
        let v = throughput_approx_full(&budget(0.01, 4), &cfg(4, 1e4)).unwrap();
        assert!((v - 10.8877).abs() < 1e-3, "{v}");
        let exact = throughput_exact(&budget(0.01, 4), &cfg(4, 1e4)).unwrap();
        assert!((v - exact).abs() < 0.05, "{v} vs {exact}");
        assert!(matches!(
            throughput_approx_full(&budget(1.0, 4), &cfg(4, 1e4)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn simple_expansion_reference_points() {
        let a = throughput_approx_simple(&budget(1.0, 4), &cfg(4, 100.0)).unwrap();
        assert!((a.eta - 8.456052).abs() < 1e-5, "{}", a.eta);
        let a = throughput_approx_simple(&budget(0.01, 4), &cfg(4, 1e4)).unwrap();
        assert!((a.eta - 10.88767).abs() < 1e-4, "{}", a.eta);
        // Identical secrecy loss to the non-adaptive expansion.
        let nae = crate::nae::throughput_high_snr_approx(&budget(0.01, 4), &cfg(4, 1e4)).unwrap();
        assert_eq!(a.eta_loss.to_bits(), nae.eta_loss.to_bits());
        assert!(matches!(
            throughput_approx_simple(&budget(0.01, 4), &cfg(4, 0.5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gain_reference_points() {
        let g = throughput_gain_approx(&cfg(4, 100.0)).unwrap();
        assert!((g - 1.7167677240).abs() < 1e-9, "{g}");
        let g = throughput_gain_approx(&cfg(2, 100.0)).unwrap();
        assert!((g - 1.7115761000).abs() < 1e-9, "{g}");
        let g = throughput_gain_approx(&cfg(4, 1e4)).unwrap();
        assert!((g - 1.9667677240).abs() < 1e-9, "{g}");
        assert!(throughput_gain_approx(&cfg(4, 1.0)).is_err());
    }

    #[test]
    fn report_is_internally_consistent() {
        let b = budget(0.01, 4);
        let c = cfg(4, 100.0).with_seed(5);
        let r = throughput_report(&b, &c, 200_000).unwrap();
        assert!(
            (r.eta_monte_carlo - r.eta_exact).abs() < 1.6 * r.eta_monte_carlo_ci,
            "mc {} vs exact {} (ci {})",
            r.eta_monte_carlo,
            r.eta_exact,
            r.eta_monte_carlo_ci
        );
        assert!(r.eta_approx_full.is_some());
        assert!(r.eta_approx_simple.is_some());
        // Vacuous budget: no full expansion, and the report still builds.
        let r = throughput_report(&budget(1.0, 4), &c, 50_000).unwrap();
        assert!(r.eta_approx_full.is_none());
        assert_eq!(r.eta_loss, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            adapt_design(-1.0, &budget(0.01, 4), &cfg(4, 1.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            adapt_design(1.0, &budget(0.01, 4), &cfg(6, 1.0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            throughput_report(&budget(0.01, 4), &cfg(4, 1.0), 0),
            Err(Error::Config(_))
        ));
    }
}
