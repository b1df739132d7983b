//! Monte Carlo validation of the designs: run the actual transmission
//! protocol over fresh channel draws and count what happens, so the
//! closed-form outage and throughput claims can be checked against an
//! implementation that knows nothing about them.
//!
//! Reproducibility contract: trials are partitioned into fixed-size blocks
//! and block `i` always consumes RNG stream `i` of the campaign seed. The
//! worker count only decides how many blocks are in flight at once, and
//! block tallies are reduced in block order, so a report is bit-identical
//! for any `worker_streams` (and across reruns). `SECRECYLAB_THREADS`
//! caps the worker count from the environment.

use rayon::prelude::*;

use crate::ae;
use crate::channel::{eve_snr_sample, stream_rng, ChannelDraw, NoiseSplit};
use crate::error::{Error, Result};
use crate::nae::NaeDesign;
use crate::secrecy::{self, SecrecyBudget, SystemConfig};

/// Trials per RNG stream. Fixed so that the trial-to-stream mapping never
/// depends on the worker count.
const BLOCK_TRIALS: u64 = 8192;

/// Which transmission scheme a campaign exercises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Non-adaptive encoder: fixed rates and split, on-off threshold.
    Nae(NaeDesign),
    /// Adaptive encoder: redesigned at every channel draw for this budget.
    Ae(SecrecyBudget),
}

impl Scheme {
    fn n_antennas(&self) -> u32 {
        match self {
            Scheme::Nae(design) => design.n_antennas(),
            Scheme::Ae(budget) => budget.n_antennas(),
        }
    }
}

/// A full Monte Carlo run: scheme, trial count, system, parallelism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignSpec {
    scheme: Scheme,
    trials: u64,
    config: SystemConfig,
    worker_streams: usize,
}

impl CampaignSpec {
    pub fn new(scheme: Scheme, trials: u64, config: SystemConfig) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Config("campaign needs at least one trial".into()));
        }
        if scheme.n_antennas() != config.n_antennas() {
            return Err(Error::Config(format!(
                "scheme is designed for {} antennas but the system has {}",
                scheme.n_antennas(),
                config.n_antennas()
            )));
        }
        Ok(CampaignSpec {
            scheme,
            trials,
            config,
            worker_streams: 1,
        })
    }

    /// How many blocks may run concurrently. Does not affect the report.
    pub fn with_worker_streams(mut self, worker_streams: usize) -> Result<Self> {
        if worker_streams == 0 {
            return Err(Error::Config("worker_streams must be at least 1".into()));
        }
        self.worker_streams = worker_streams;
        Ok(self)
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn worker_streams(&self) -> usize {
        self.worker_streams
    }
}

/// Point estimate with a 95% normal-approximation confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub ci_half_width: f64,
}

impl Estimate {
    fn from_bernoulli(count: u64, total: u64) -> Estimate {
        if total == 0 {
            return Estimate {
                value: 0.0,
                ci_half_width: 0.0,
            };
        }
        let t = total as f64;
        let p = count as f64 / t;
        Estimate {
            value: p,
            ci_half_width: 1.96 * (p * (1.0 - p) / t).sqrt(),
        }
    }

    fn from_sums(sum: f64, sum_sq: f64, total: u64) -> Estimate {
        if total == 0 {
            return Estimate {
                value: 0.0,
                ci_half_width: 0.0,
            };
        }
        let t = total as f64;
        let mean = sum / t;
        let var = (sum_sq / t - mean * mean).max(0.0);
        Estimate {
            value: mean,
            ci_half_width: 1.96 * (var / t).sqrt(),
        }
    }
}

/// What a campaign observed. `secrecy_outage` is conditional on
/// transmission; `throughput` averages the delivered message rate over all
/// trials, silence included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationReport {
    pub trials: u64,
    pub transmissions: u64,
    pub secrecy_outages: u64,
    pub decode_failures: u64,
    pub transmit_probability: Estimate,
    pub secrecy_outage: Estimate,
    pub throughput: Estimate,
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockTally {
    transmissions: u64,
    secrecy_outages: u64,
    decode_failures: u64,
    rate_sum: f64,
    rate_sum_sq: f64,
}

/// Run the campaign and tally transmissions, secrecy outages (the
/// eavesdropper's instantaneous capacity exceeding the redundancy) and
/// decode failures (the codeword rate exceeding the intended channel's
/// instantaneous capacity).
pub fn simulate_campaign(spec: &CampaignSpec) -> Result<SimulationReport> {
    let blocks = spec.trials.div_ceil(BLOCK_TRIALS);
    let workers = effective_workers(spec.worker_streams);

    let tallies: Vec<BlockTally> = if workers == 1 {
        (0..blocks)
            .map(|b| run_block(spec, b))
            .collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(|b| run_block(spec, b))
                .collect::<Result<_>>()
        })?
    };

    let mut total = BlockTally::default();
    for t in &tallies {
        total.transmissions += t.transmissions;
        total.secrecy_outages += t.secrecy_outages;
        total.decode_failures += t.decode_failures;
        total.rate_sum += t.rate_sum;
        total.rate_sum_sq += t.rate_sum_sq;
    }

    Ok(SimulationReport {
        trials: spec.trials,
        transmissions: total.transmissions,
        secrecy_outages: total.secrecy_outages,
        decode_failures: total.decode_failures,
        transmit_probability: Estimate::from_bernoulli(total.transmissions, spec.trials),
        secrecy_outage: Estimate::from_bernoulli(total.secrecy_outages, total.transmissions),
        throughput: Estimate::from_sums(total.rate_sum, total.rate_sum_sq, spec.trials),
    })
}

fn effective_workers(requested: usize) -> usize {
    let cap = std::env::var("SECRECYLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(usize::MAX);
    requested.min(cap)
}

fn run_block(spec: &CampaignSpec, block: u64) -> Result<BlockTally> {
    let config = spec.config();
    let n = config.n_antennas();
    let power = config.power_linear();
    let first = block * BLOCK_TRIALS;
    let count = BLOCK_TRIALS.min(spec.trials - first);
    let mut rng = stream_rng(config.rng_seed(), block);
    let mut tally = BlockTally::default();

    match spec.scheme() {
        Scheme::Nae(design) => {
            let split = NoiseSplit::new(design.phi(), power, n)?;
            let rates = design.rates();
            let eve_gate = rates.rate_redundancy().exp2() - 1.0;
            for _ in 0..count {
                let draw = ChannelDraw::sample(&mut rng, n, config.eve_variance())?;
                if draw.effective_gain() <= design.threshold() {
                    continue;
                }
                tally.transmissions += 1;
                let capacity =
                    secrecy::capacity_bob(power, design.phi(), draw.effective_gain())?;
                if rates.rate_codeword() > capacity {
                    tally.decode_failures += 1;
                } else {
                    let rs = rates.rate_message();
                    tally.rate_sum += rs;
                    tally.rate_sum_sq += rs * rs;
                }
                if eve_snr_sample(&draw, &split) > eve_gate {
                    tally.secrecy_outages += 1;
                }
            }
        }
        Scheme::Ae(budget) => {
            for _ in 0..count {
                let draw = ChannelDraw::sample(&mut rng, n, config.eve_variance())?;
                let point = ae::adapt_design(draw.effective_gain(), budget, config)?;
                if !point.transmitting() {
                    continue;
                }
                tally.transmissions += 1;
                let split = NoiseSplit::new(point.phi(), power, n)?;
                let rates = point.rates();
                let capacity =
                    secrecy::capacity_bob(power, point.phi(), draw.effective_gain())?;
                if rates.rate_codeword() > capacity {
                    tally.decode_failures += 1;
                } else {
                    let rs = rates.rate_message();
                    tally.rate_sum += rs;
                    tally.rate_sum_sq += rs * rs;
                }
                let eve_gate = rates.rate_redundancy().exp2() - 1.0;
                if eve_snr_sample(&draw, &split) > eve_gate {
                    tally.secrecy_outages += 1;
                }
            }
        }
    }
    Ok(tally)
}

/// Largest absolute gap between the empirical eavesdropper-SNR ccdf and
/// the closed form, probed on a 200-point quantile grid over
/// [0.001, 0.999]. Needs phi in (0, 1): at phi = 1 the SNR is unbounded.
pub fn validate_eve_ccdf(phi: f64, n_antennas: u32, samples: u64, seed: u64) -> Result<f64> {
    let snrs = sorted_eve_snrs(phi, n_antennas, samples, seed)?;
    let nm1 = f64::from(n_antennas - 1);
    let scale = 1.0 / phi - 1.0;
    max_ccdf_gap(&snrs, |q| nm1 * (q.powf(-1.0 / nm1) - 1.0) / scale)
}

/// Same probe, but against the infinite-antenna exponential limit of the
/// ccdf. The gap shrinks with the antenna count; at small counts it
/// measures the limit's own error, not the sampler's.
pub fn validate_eve_ccdf_exponential_limit(
    phi: f64,
    n_antennas: u32,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    let snrs = sorted_eve_snrs(phi, n_antennas, samples, seed)?;
    let scale = phi / (1.0 - phi);
    max_ccdf_gap(&snrs, |q| -q.ln() * scale)
}

fn sorted_eve_snrs(phi: f64, n_antennas: u32, samples: u64, seed: u64) -> Result<Vec<f64>> {
    secrecy::check_phi(phi)?;
    if phi >= 1.0 {
        return Err(Error::Domain(
            "ccdf validation needs phi < 1; at phi = 1 the eavesdropper SNR is unbounded".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    let split = NoiseSplit::new(phi, 1.0, n_antennas)?;
    let mut rng = stream_rng(seed, 0);
    let mut snrs = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let draw = ChannelDraw::sample(&mut rng, n_antennas, 1.0)?;
        snrs.push(eve_snr_sample(&draw, &split));
    }
    snrs.sort_unstable_by(f64::total_cmp);
    Ok(snrs)
}

/// `quantile_to_gamma` maps a reference ccdf level q to its SNR abscissa;
/// the empirical ccdf there should then be close to q.
fn max_ccdf_gap(sorted: &[f64], quantile_to_gamma: impl Fn(f64) -> f64) -> Result<f64> {
    let m = sorted.len() as f64;
    let mut worst = 0.0f64;
    for i in 0..200 {
        let q = 0.001 + 0.998 * i as f64 / 199.0;
        let gamma = quantile_to_gamma(q);
        let below = sorted.partition_point(|&s| s <= gamma);
        let empirical = (sorted.len() - below) as f64 / m;
        worst = worst.max((empirical - q).abs());
    }
    Ok(worst)
}
