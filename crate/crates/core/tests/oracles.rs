//! Grid-search oracles for the closed-form designs: exhaustively search
//! the power split (and message rate) the slow way and check the closed
//! forms are never beaten and sit where the search says they should.

use rand::Rng;
use secrecylab_core::channel::stream_rng;
use secrecylab_core::{ae, nae, secrecy, SecrecyBudget, SystemConfig};

struct Tuple {
    eps: f64,
    n: u32,
    power: f64,
}

fn random_tuples(seed: u64, count: usize) -> Vec<Tuple> {
    let mut rng = stream_rng(seed, 0);
    let ns = [2u32, 3, 4, 5, 6, 8, 16];
    (0..count)
        .map(|_| Tuple {
            eps: (1e-4f64.ln() + rng.random::<f64>() * (0.9f64.ln() - 1e-4f64.ln())).exp(),
            n: ns[rng.random_range(0..ns.len())],
            power: (0.1f64.ln() + rng.random::<f64>() * (1e4f64.ln() - 0.1f64.ln())).exp(),
        })
        .collect()
}

/// Threshold needed to decode a codeword at rate rs plus the redundancy
/// that meets the outage budget with split phi. The quantity the
/// non-adaptive design claims to minimise over phi.
fn nae_threshold_at(phi: f64, rs: f64, lambda: f64, power: f64) -> f64 {
    let redundancy = (1.0 + lambda * phi / (1.0 - phi)).log2();
    ((rs + redundancy).exp2() - 1.0) / (power * phi)
}

#[test]
fn nae_split_is_the_grid_minimiser() {
    let tuples = random_tuples(0x5eed_0001, 200);
    let mut rng = stream_rng(0x5eed_0002, 0);
    for t in &tuples {
        let budget = SecrecyBudget::new(t.eps, t.n).unwrap();
        let config = SystemConfig::new(t.n, t.power).unwrap();
        let rs = 0.2 + rng.random::<f64>() * 5.0;
        let design = nae::delay_optimal_design(rs, &budget, &config).unwrap();
        let lambda = budget.lambda();

        // Coarse pass over (0, 1), then a refinement around the winner.
        let mut best_phi = 0.0;
        let mut best = f64::INFINITY;
        for i in 1..1000 {
            let phi = i as f64 / 1000.0;
            let mu = nae_threshold_at(phi, rs, lambda, t.power);
            if mu < best {
                best = mu;
                best_phi = phi;
            }
        }
        for i in -1000i32..=1000 {
            let phi = best_phi + f64::from(i) * 1e-6;
            if phi <= 0.0 || phi >= 1.0 {
                continue;
            }
            let mu = nae_threshold_at(phi, rs, lambda, t.power);
            if mu < best {
                best = mu;
                best_phi = phi;
            }
        }

        assert!(
            design.threshold() <= best * (1.0 + 1e-9),
            "eps={} n={} P={} rs={rs}: closed form {} beaten by {} at phi={}",
            t.eps,
            t.n,
            t.power,
            design.threshold(),
            best,
            best_phi
        );
        // The valley is quadratic, so rounding noise in mu leaves the grid
        // argmin anywhere within ~sqrt(eps) of the true split.
        assert!(
            (design.phi() - best_phi).abs() <= 1e-4,
            "eps={} n={} P={} rs={rs}: phi {} vs grid {}",
            t.eps,
            t.n,
            t.power,
            design.phi(),
            best_phi
        );
        // Symmetrically, the grid never wins by more than rounding noise.
        let at_closed = nae_threshold_at(design.phi(), rs, lambda, t.power);
        assert!(at_closed <= best * (1.0 + 1e-12));
    }
}

#[test]
fn ae_split_is_the_grid_maximiser() {
    let tuples = random_tuples(0x5eed_0003, 200);
    let mut rng = stream_rng(0x5eed_0004, 0);
    for t in &tuples {
        let budget = SecrecyBudget::new(t.eps, t.n).unwrap();
        let config = SystemConfig::new(t.n, t.power).unwrap();
        let lambda = budget.lambda();
        // Gain comfortably above the on-off threshold.
        let gain = lambda / t.power * (1.2 + rng.random::<f64>() * 30.0) + 1e-3;
        let design = ae::adapt_design(gain, &budget, &config).unwrap();
        assert!(design.transmitting());

        let edge = 1.0 - lambda / (t.power * gain);
        let mut best_phi = 0.0;
        let mut best = f64::NEG_INFINITY;
        for i in 1..2000 {
            let phi = edge * i as f64 / 2000.0;
            let rate = ae::message_rate_for_split(gain, phi, &budget, &config).unwrap();
            if rate > best {
                best = rate;
                best_phi = phi;
            }
        }
        let step = edge / 2000.0;
        for i in -1000i32..=1000 {
            let phi = best_phi + f64::from(i) * step * 1e-3;
            if phi <= 0.0 || phi >= edge {
                continue;
            }
            let rate = ae::message_rate_for_split(gain, phi, &budget, &config).unwrap();
            if rate > best {
                best = rate;
                best_phi = phi;
            }
        }

        let rs = design.rates().rate_message();
        assert!(
            rs >= best - 1e-9 * best.abs().max(1.0),
            "eps={} n={} P={} gain={gain}: closed form {rs} below grid {best}",
            t.eps,
            t.n,
            t.power
        );
        assert!(
            (design.phi() - best_phi).abs() <= step.max(1e-7),
            "eps={} n={} P={} gain={gain}: phi {} vs grid {}",
            t.eps,
            t.n,
            t.power,
            design.phi(),
            best_phi
        );
        // And the grid never gets meaningfully above the closed form.
        assert!(best <= rs + 1e-9 * rs.abs().max(1.0));
    }
}

#[test]
fn optimal_message_rate_matches_golden_section_search() {
    for (eps, n, power) in [(0.01, 4u32, 100.0), (0.1, 2, 10.0), (1e-3, 8, 1e3), (1.0, 4, 50.0)] {
        let budget = SecrecyBudget::new(eps, n).unwrap();
        let config = SystemConfig::new(n, power).unwrap();
        let design = nae::optimal_message_rate(&budget, &config).unwrap();

        let eta = |rs: f64| -> f64 {
            let d = nae::delay_optimal_design(rs, &budget, &config).unwrap();
            secrecy::transmit_probability(d.threshold(), n).unwrap() * rs
        };
        // Bracket the peak with a coarse scan first: far past the optimum
        // the throughput plateaus at zero and golden section would stall.
        let mut coarse_best = 0.05;
        for i in 1..=400 {
            let rs = i as f64 * 0.05;
            if eta(rs) > eta(coarse_best) {
                coarse_best = rs;
            }
        }
        let invphi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = ((coarse_best - 0.1).max(1e-4), coarse_best + 0.1);
        let (mut c, mut d) = (b - invphi * (b - a), a + invphi * (b - a));
        for _ in 0..120 {
            if eta(c) > eta(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - invphi * (b - a);
            d = a + invphi * (b - a);
        }
        let rs_star = 0.5 * (a + b);

        assert!(
            (design.rates().rate_message() - rs_star).abs() < 1e-5,
            "eps={eps} n={n} P={power}: {} vs golden {rs_star}",
            design.rates().rate_message()
        );
        assert!(
            (design.throughput() - eta(rs_star)).abs() < 1e-10,
            "eps={eps} n={n} P={power}: eta {} vs golden {}",
            design.throughput(),
            eta(rs_star)
        );
    }
}

#[test]
fn ae_exact_throughput_matches_monte_carlo() {
    for (eps, n, power) in [(1.0, 4u32, 100.0), (0.01, 4, 100.0), (0.1, 2, 10.0)] {
        let budget = SecrecyBudget::new(eps, n).unwrap();
        let config = SystemConfig::new(n, power).unwrap().with_seed(99);
        let report = ae::throughput_report(&budget, &config, 400_000).unwrap();
        assert!(
            (report.eta_monte_carlo - report.eta_exact).abs()
                < 1.6 * report.eta_monte_carlo_ci,
            "eps={eps} n={n} P={power}: mc {} vs exact {} (ci {})",
            report.eta_monte_carlo,
            report.eta_exact,
            report.eta_monte_carlo_ci
        );
    }
}
