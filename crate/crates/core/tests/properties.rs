//! Randomised structural invariants of the designs and distributions.

use proptest::prelude::*;
use secrecylab_core::{ae, nae, secrecy, SecrecyBudget, SystemConfig};

fn eps_strategy() -> impl Strategy<Value = f64> {
    // Log-uniform over [1e-5, 1); epsilon = 1 has dedicated branches.
    (1e-5f64.ln()..0.0f64).prop_map(f64::exp)
}

fn power_strategy() -> impl Strategy<Value = f64> {
    (0.01f64.ln()..1e5f64.ln()).prop_map(f64::exp)
}

proptest! {
    #[test]
    fn lambda_positive_and_decreasing(eps in eps_strategy(), n in 2u32..64) {
        let a = secrecy::lambda_quantity(eps, n).unwrap();
        let b = secrecy::lambda_quantity(eps, n + 1).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!(b < a);
        prop_assert!(b > -eps.ln());
    }

    #[test]
    fn matched_redundancy_hits_the_budget(
        eps in eps_strategy(),
        n in 2u32..32,
        phi in 1e-4f64..0.999,
        rs in 0.01f64..8.0,
    ) {
        // Spend exactly the redundancy the ccdf calls for: the outage
        // probability must come back as the budget.
        let lambda = secrecy::lambda_quantity(eps, n).unwrap();
        let re = (1.0 + lambda * phi / (1.0 - phi)).log2();
        let rates = secrecy::WiretapRates::new(rs + re, rs).unwrap();
        let p = secrecy::secrecy_outage_probability(&rates, phi, n).unwrap();
        prop_assert!((p - eps).abs() < 1e-9 * eps.max(1e-6), "{p} vs {eps}");
    }

    #[test]
    fn nae_split_and_codeword_rate_ignore_power(
        eps in eps_strategy(),
        n in 2u32..16,
        rs in 0.05f64..6.0,
        p1 in power_strategy(),
        p2 in power_strategy(),
    ) {
        let budget = SecrecyBudget::new(eps, n).unwrap();
        let d1 = nae::delay_optimal_design(rs, &budget, &SystemConfig::new(n, p1).unwrap()).unwrap();
        let d2 = nae::delay_optimal_design(rs, &budget, &SystemConfig::new(n, p2).unwrap()).unwrap();
        prop_assert_eq!(d1.phi().to_bits(), d2.phi().to_bits());
        prop_assert_eq!(
            d1.rates().rate_codeword().to_bits(),
            d2.rates().rate_codeword().to_bits()
        );
        // The threshold scales exactly like 1/P.
        prop_assert!((d1.threshold() * p1 - d2.threshold() * p2).abs()
            <= 1e-12 * (d1.threshold() * p1).abs());
    }

    #[test]
    fn nae_design_meets_budget_with_equality(
        eps in eps_strategy(),
        n in 2u32..16,
        rs in 0.05f64..6.0,
        p in power_strategy(),
    ) {
        let budget = SecrecyBudget::new(eps, n).unwrap();
        let config = SystemConfig::new(n, p).unwrap();
        let d = nae::delay_optimal_design(rs, &budget, &config).unwrap();
        let p_so = secrecy::secrecy_outage_probability(d.rates(), d.phi(), n).unwrap();
        prop_assert!((p_so - eps).abs() < 1e-9 * eps.max(1e-6));
        prop_assert!(d.phi() > 0.0 && d.phi() < 1.0);
        prop_assert!(d.rates().rate_redundancy() > 0.0);
    }

    #[test]
    fn ae_design_feasible_and_budget_tight(
        eps in eps_strategy(),
        n in 2u32..16,
        p in power_strategy(),
        gain_scale in 1.001f64..50.0,
    ) {
        let budget = SecrecyBudget::new(eps, n).unwrap();
        let config = SystemConfig::new(n, p).unwrap();
        let gain = budget.lambda() / p * gain_scale;
        let d = ae::adapt_design(gain, &budget, &config).unwrap();
        if !d.transmitting() {
            // Rounding swallowed a hairline margin; nothing more to check.
            return Ok(());
        }
        let tau = d.effective_snr();
        prop_assert!(d.phi() > 0.0);
        prop_assert!(d.phi() < 1.0 - budget.lambda() / tau + 1e-12);
        prop_assert!(d.rates().rate_message() <= d.rates().rate_codeword());
        let p_so = secrecy::secrecy_outage_probability(d.rates(), d.phi(), n).unwrap();
        prop_assert!((p_so - eps).abs() < 1e-8 * eps.max(1e-6), "{p_so} vs {eps}");
    }

    #[test]
    fn ae_rate_monotone_in_gain(
        eps in eps_strategy(),
        n in 2u32..16,
        p in power_strategy(),
        g1 in 1e-3f64..30.0,
        bump in 1.0001f64..4.0,
    ) {
        let budget = SecrecyBudget::new(eps, n).unwrap();
        let config = SystemConfig::new(n, p).unwrap();
        let lo = ae::adapt_design(g1, &budget, &config).unwrap();
        let hi = ae::adapt_design(g1 * bump, &budget, &config).unwrap();
        prop_assert!(hi.rates().rate_message() >= lo.rates().rate_message());
    }

    #[test]
    fn eve_ccdf_is_a_ccdf(
        n in 2u32..64,
        phi in 1e-4f64..1.0,
        g1 in 0.0f64..50.0,
        g2 in 0.0f64..50.0,
    ) {
        let a = secrecy::eve_snr_ccdf(g1, phi, n).unwrap();
        let b = secrecy::eve_snr_ccdf(g2, phi, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        if g1 < g2 {
            // Slack of a few ulp: powf is not correctly rounded.
            prop_assert!(a >= b - 1e-15);
        }
        prop_assert_eq!(secrecy::eve_snr_ccdf(0.0, phi, n).unwrap(), 1.0);
    }

    #[test]
    fn transmit_probability_is_monotone_tail(
        n in 2u32..64,
        mu1 in 0.0f64..80.0,
        mu2 in 0.0f64..80.0,
    ) {
        let a = secrecy::transmit_probability(mu1, n).unwrap();
        let b = secrecy::transmit_probability(mu2, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        if mu1 < mu2 {
            // Slack of a few ulp for rounding in the series recursion.
            prop_assert!(a >= b - 1e-15);
        }
    }
}
