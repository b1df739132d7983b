//! Experiment grids and CSV emission. Each experiment resolves its axes
//! (defaults, then config file, then flags), walks the grid in row order
//! and prints one CSV per run with a `# meta:` header line.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use secrecylab_core::{ae, nae, sim, SecrecyBudget, Scheme, SystemConfig};

use crate::config::Overrides;
use crate::{CliError, ExperimentId, SchemeKind};

pub struct RunSummary {
    pub rows: usize,
    pub path: PathBuf,
}

pub fn run(experiment: ExperimentId, o: Overrides) -> Result<RunSummary, CliError> {
    let seed = o.seed.unwrap_or(42);
    let table = build(experiment, &o, seed)?;

    let path = o
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", experiment.name())));
    let mut text = String::new();
    let _ = write!(
        text,
        "# meta: experiment={} version={} seed={seed} {}",
        experiment.name(),
        env!("CARGO_PKG_VERSION"),
        table.echo
    );
    if !o.no_timestamp.unwrap_or(false) {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let _ = write!(text, " timestamp={now}");
    }
    text.push('\n');
    text.push_str(table.header);
    text.push('\n');
    for row in &table.rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(&path, text).map_err(|e| CliError::Io {
        path: path.clone(),
        source: e,
    })?;
    Ok(RunSummary {
        rows: table.rows.len(),
        path,
    })
}

#[derive(Debug)]
struct Table {
    header: &'static str,
    rows: Vec<String>,
    echo: String,
}

fn build(experiment: ExperimentId, o: &Overrides, seed: u64) -> Result<Table, CliError> {
    check_ranges(o)?;
    match experiment {
        ExperimentId::Fig1Tradeoff => fig1_tradeoff(o),
        ExperimentId::Fig2Pmin => fig2_pmin(o),
        ExperimentId::Fig3ThrVsRs => fig3_thr_vs_rs(o),
        ExperimentId::Fig4NaeThrVsP => fig4_nae_thr_vs_p(o),
        ExperimentId::Fig5AeThrVsP => fig5_ae_thr_vs_p(o),
        ExperimentId::Fig6GainVsEps => fig6_gain_vs_eps(o),
        ExperimentId::DesignNae => design_nae(o),
        ExperimentId::DesignAe => design_ae(o),
        ExperimentId::Campaign => campaign(o, seed),
        ExperimentId::Validate => validate(o, seed),
    }
}

/// Secrecy/delay tradeoff: max transmit probability against the outage
/// budget it is willing to tolerate.
fn fig1_tradeoff(o: &Overrides) -> Result<Table, CliError> {
    let ns = axis_u32(&o.n, &[2, 4, 8]);
    let eps_axis = axis_f64(&o.eps, &log_space(1e-3, 1.0, 25));
    let p_db = single_f64(&o.p_db, "p_db", 10.0)?;
    let rs = single_f64(&o.rs, "rs", 2.0)?;
    let power = db_to_linear(p_db);

    let mut rows = Vec::new();
    for &n in &ns {
        let config = SystemConfig::new(n, power)?;
        for &eps in &eps_axis {
            let budget = SecrecyBudget::new(eps, n)?;
            let design = nae::delay_optimal_design(rs, &budget, &config)?;
            rows.push(format!("{n},{},{}", f(eps), f(design.transmit_probability())));
        }
    }
    Ok(Table {
        header: "N,epsilon,p_tx",
        rows,
        echo: format!(
            "n={} eps={} p_db={p_db} rs={rs}",
            join_u32(&ns),
            join_f64(&eps_axis)
        ),
    })
}

/// Minimum power meeting a joint secrecy and delay constraint, versus the
/// antenna count.
fn fig2_pmin(o: &Overrides) -> Result<Table, CliError> {
    let ns = axis_u32(&o.n, &[2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64]);
    let deltas = axis_f64(&o.delta, &[0.5, 0.9, 0.99]);
    let eps = single_f64(&o.eps, "eps", 0.01)?;
    let rs = single_f64(&o.rs, "rs", 2.0)?;

    let mut rows = Vec::new();
    for &n in &ns {
        let budget = SecrecyBudget::new(eps, n)?;
        for &delta in &deltas {
            let p_min = nae::min_power(rs, &budget, delta)?;
            rows.push(format!("{n},{},{}", f(delta), f(10.0 * p_min.log10())));
        }
    }
    Ok(Table {
        header: "N,delta,p_min_dB",
        rows,
        echo: format!(
            "n={} delta={} eps={eps} rs={rs}",
            join_u32(&ns),
            join_f64(&deltas)
        ),
    })
}

/// Non-adaptive throughput against the message rate it is designed for.
fn fig3_thr_vs_rs(o: &Overrides) -> Result<Table, CliError> {
    let ns = axis_u32(&o.n, &[2, 4, 8]);
    let rs_axis = axis_f64(&o.rs, &lin_space(0.25, 10.0, 40));
    let eps = single_f64(&o.eps, "eps", 0.01)?;
    let p_db = single_f64(&o.p_db, "p_db", 20.0)?;
    let power = db_to_linear(p_db);

    let mut rows = Vec::new();
    for &n in &ns {
        let budget = SecrecyBudget::new(eps, n)?;
        let config = SystemConfig::new(n, power)?;
        for &rs in &rs_axis {
            let design = nae::delay_optimal_design(rs, &budget, &config)?;
            rows.push(format!("{n},{},{}", f(rs), f(design.throughput())));
        }
    }
    Ok(Table {
        header: "N,rs,eta",
        rows,
        echo: format!(
            "n={} rs={} eps={eps} p_db={p_db}",
            join_u32(&ns),
            join_f64(&rs_axis)
        ),
    })
}

/// Non-adaptive throughput (at the optimal message rate) against power,
/// with the high-SNR approximation alongside.
fn fig4_nae_thr_vs_p(o: &Overrides) -> Result<Table, CliError> {
    let p_db_axis = axis_f64(&o.p_db, &lin_space(0.0, 50.0, 11));
    let eps_axis = axis_f64(&o.eps, &[1.0, 0.1, 0.01]);
    let ns = axis_u32(&o.n, &[4]);

    let mut rows = Vec::new();
    for &p_db in &p_db_axis {
        let power = db_to_linear(p_db);
        for &eps in &eps_axis {
            for &n in &ns {
                let budget = SecrecyBudget::new(eps, n)?;
                let config = SystemConfig::new(n, power)?;
                let exact = nae::optimal_message_rate(&budget, &config)?.throughput();
                let approx = optional(nae::throughput_high_snr_approx(&budget, &config)
                    .map(|a| a.eta))?;
                rows.push(format!(
                    "{},{},{n},{},{}",
                    f(p_db),
                    f(eps),
                    f(exact),
                    opt(approx)
                ));
            }
        }
    }
    Ok(Table {
        header: "P_dB,epsilon,N,eta_exact,eta_approx",
        rows,
        echo: format!(
            "p_db={} eps={} n={}",
            join_f64(&p_db_axis),
            join_f64(&eps_axis),
            join_u32(&ns)
        ),
    })
}

/// Adaptive throughput (exact quadrature) against power, with both
/// high-SNR expansions alongside.
fn fig5_ae_thr_vs_p(o: &Overrides) -> Result<Table, CliError> {
    let p_db_axis = axis_f64(&o.p_db, &lin_space(0.0, 50.0, 11));
    let eps_axis = axis_f64(&o.eps, &[1.0, 0.1, 0.01]);
    let ns = axis_u32(&o.n, &[4]);

    let mut rows = Vec::new();
    for &p_db in &p_db_axis {
        let power = db_to_linear(p_db);
        for &eps in &eps_axis {
            for &n in &ns {
                let budget = SecrecyBudget::new(eps, n)?;
                let config = SystemConfig::new(n, power)?;
                let exact = ae::throughput_exact(&budget, &config)?;
                let approx =
                    optional(ae::throughput_approx_simple(&budget, &config).map(|a| a.eta))?;
                let full = optional(ae::throughput_approx_full(&budget, &config))?;
                rows.push(format!(
                    "{},{},{n},{},{},{}",
                    f(p_db),
                    f(eps),
                    f(exact),
                    opt(approx),
                    opt(full)
                ));
            }
        }
    }
    Ok(Table {
        header: "P_dB,epsilon,N,eta_exact,eta_approx,eta_approx_full",
        rows,
        echo: format!(
            "p_db={} eps={} n={}",
            join_f64(&p_db_axis),
            join_f64(&eps_axis),
            join_u32(&ns)
        ),
    })
}

/// Throughput gain of adapting the encoder, against the outage budget.
fn fig6_gain_vs_eps(o: &Overrides) -> Result<Table, CliError> {
    let ns = axis_u32(&o.n, &[2, 4, 8]);
    let eps_axis = axis_f64(&o.eps, &log_space(1e-4, 1e-1, 16));
    let p_db = single_f64(&o.p_db, "p_db", 40.0)?;
    let power = db_to_linear(p_db);

    let mut rows = Vec::new();
    for &n in &ns {
        let config = SystemConfig::new(n, power)?;
        let approx = ae::throughput_gain_approx(&config)?;
        for &eps in &eps_axis {
            let budget = SecrecyBudget::new(eps, n)?;
            let gain = ae::throughput_exact(&budget, &config)?
                - nae::optimal_message_rate(&budget, &config)?.throughput();
            rows.push(format!("{n},{},{},{}", f(eps), f(gain), f(approx)));
        }
    }
    Ok(Table {
        header: "N,epsilon,gain_exact,gain_approx",
        rows,
        echo: format!(
            "n={} eps={} p_db={p_db}",
            join_u32(&ns),
            join_f64(&eps_axis)
        ),
    })
}

/// One non-adaptive design, spelled out.
fn design_nae(o: &Overrides) -> Result<Table, CliError> {
    let n = single_u32(&o.n, "n", 4)?;
    let p_db = single_f64(&o.p_db, "p_db", 20.0)?;
    let eps = single_f64(&o.eps, "eps", 0.01)?;
    let rs = single_f64(&o.rs, "rs", 2.0)?;
    let power = db_to_linear(p_db);

    let budget = SecrecyBudget::new(eps, n)?;
    let config = SystemConfig::new(n, power)?;
    let d = nae::delay_optimal_design(rs, &budget, &config)?;
    let row = format!(
        "{n},{},{},{},{},{},{},{},{}",
        f(p_db),
        f(eps),
        f(rs),
        f(d.phi()),
        f(d.rates().rate_codeword()),
        f(d.threshold()),
        f(d.transmit_probability()),
        f(d.throughput())
    );
    Ok(Table {
        header: "N,P_dB,epsilon,rs,phi,rate_codeword,threshold,p_tx,eta",
        rows: vec![row],
        echo: format!("n={n} p_db={p_db} eps={eps} rs={rs}"),
    })
}

/// One adaptive design at a given realised channel gain.
fn design_ae(o: &Overrides) -> Result<Table, CliError> {
    let n = single_u32(&o.n, "n", 4)?;
    let p_db = single_f64(&o.p_db, "p_db", 20.0)?;
    let eps = single_f64(&o.eps, "eps", 0.01)?;
    let h2 = o.h2.unwrap_or(1.0);
    let power = db_to_linear(p_db);

    let budget = SecrecyBudget::new(eps, n)?;
    let config = SystemConfig::new(n, power)?;
    let d = ae::adapt_design(h2, &budget, &config)?;
    let row = format!(
        "{n},{},{},{},{},{},{},{},{}",
        f(p_db),
        f(eps),
        f(h2),
        f(d.effective_snr()),
        f(d.phi()),
        f(d.rates().rate_codeword()),
        f(d.rates().rate_message()),
        u8::from(d.transmitting())
    );
    Ok(Table {
        header: "N,P_dB,epsilon,h2,tau,phi,rate_codeword,rate_message,transmitting",
        rows: vec![row],
        echo: format!("n={n} p_db={p_db} eps={eps} h2={h2}"),
    })
}

/// A full Monte Carlo campaign for either scheme.
fn campaign(o: &Overrides, seed: u64) -> Result<Table, CliError> {
    let n = single_u32(&o.n, "n", 4)?;
    let p_db = single_f64(&o.p_db, "p_db", 20.0)?;
    let eps = single_f64(&o.eps, "eps", 0.01)?;
    let trials = o.trials.unwrap_or(100_000);
    let kind = o.scheme.unwrap_or(SchemeKind::Nae);
    let power = db_to_linear(p_db);

    let budget = SecrecyBudget::new(eps, n)?;
    let config = SystemConfig::new(n, power)?.with_seed(seed);
    let (scheme, rs_cell, rs_echo) = match kind {
        SchemeKind::Nae => {
            let rs = single_f64(&o.rs, "rs", 2.0)?;
            let design = nae::delay_optimal_design(rs, &budget, &config)?;
            (Scheme::Nae(design), f(rs), format!(" rs={rs}"))
        }
        SchemeKind::Ae => (Scheme::Ae(budget), String::new(), String::new()),
    };
    let spec = sim::CampaignSpec::new(scheme, trials, config)?
        .with_worker_streams(default_workers())?;
    let r = sim::simulate_campaign(&spec)?;

    let row = format!(
        "{},{n},{},{},{rs_cell},{trials},{},{},{},{},{},{},{},{},{}",
        kind.name(),
        f(p_db),
        f(eps),
        r.transmissions,
        r.secrecy_outages,
        r.decode_failures,
        f(r.transmit_probability.value),
        f(r.transmit_probability.ci_half_width),
        f(r.secrecy_outage.value),
        f(r.secrecy_outage.ci_half_width),
        f(r.throughput.value),
        f(r.throughput.ci_half_width)
    );
    Ok(Table {
        header: "scheme,N,P_dB,epsilon,rs,trials,transmissions,secrecy_outages,decode_failures,\
                 p_tx,p_tx_ci,p_so,p_so_ci,eta,eta_ci",
        rows: vec![row],
        echo: format!(
            "scheme={} n={n} p_db={p_db} eps={eps}{rs_echo} trials={trials}",
            kind.name()
        ),
    })
}

/// Empirical check of the eavesdropper SNR distribution.
fn validate(o: &Overrides, seed: u64) -> Result<Table, CliError> {
    let n = single_u32(&o.n, "n", 4)?;
    let phi = o.phi.unwrap_or(0.3);
    let samples = o.trials.unwrap_or(1_000_000);

    let dev = sim::validate_eve_ccdf(phi, n, samples, seed)?;
    Ok(Table {
        header: "phi,N,samples,max_abs_deviation",
        rows: vec![format!("{},{n},{samples},{}", f(phi), f(dev))],
        echo: format!("phi={phi} n={n} trials={samples}"),
    })
}

/// User-supplied values are checked up front so errors name the flag or
/// config key they came in through. Defaults are known good.
fn check_ranges(o: &Overrides) -> Result<(), CliError> {
    let bad = |field: &str, why: String| Err(CliError::Config(format!("{field}: {why}")));
    for &n in o.n.as_deref().unwrap_or_default() {
        if n < 2 {
            return bad("n", format!("need at least 2 transmit antennas, got {n}"));
        }
    }
    for &x in o.eps.as_deref().unwrap_or_default() {
        if !(x > 0.0 && x <= 1.0) {
            return bad("eps", format!("outage budget must lie in (0, 1], got {x}"));
        }
    }
    for &x in o.p_db.as_deref().unwrap_or_default() {
        if !x.is_finite() {
            return bad("p_db", format!("power must be finite, got {x}"));
        }
    }
    for &x in o.rs.as_deref().unwrap_or_default() {
        if !(x.is_finite() && x > 0.0) {
            return bad("rs", format!("message rate must be positive, got {x}"));
        }
    }
    for &x in o.delta.as_deref().unwrap_or_default() {
        if !(x > 0.0 && x < 1.0) {
            return bad("delta", format!("floor must lie in (0, 1), got {x}"));
        }
    }
    if let Some(x) = o.phi {
        if !(x > 0.0 && x < 1.0) {
            return bad("phi", format!("power fraction must lie in (0, 1), got {x}"));
        }
    }
    if let Some(x) = o.h2 {
        if !(x.is_finite() && x >= 0.0) {
            return bad("h2", format!("channel gain must be nonnegative, got {x}"));
        }
    }
    if o.trials == Some(0) {
        return bad("trials", "need at least 1 trial".into());
    }
    Ok(())
}

/// Worker streams default to the hardware parallelism; the simulator
/// itself applies the SECRECYLAB_THREADS cap.
fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Nine significant digits, as the CSV dialect pins.
fn f(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

/// Approximations that are undefined at this grid point produce an empty
/// cell; anything else is a real error.
fn optional(r: Result<f64, secrecylab_core::Error>) -> Result<Option<f64>, CliError> {
    use secrecylab_core::Error;
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Domain(_)) | Err(Error::Convergence(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn axis_u32(v: &Option<Vec<u32>>, default: &[u32]) -> Vec<u32> {
    v.clone().unwrap_or_else(|| default.to_vec())
}

fn axis_f64(v: &Option<Vec<f64>>, default: &[f64]) -> Vec<f64> {
    v.clone().unwrap_or_else(|| default.to_vec())
}

fn single_u32(v: &Option<Vec<u32>>, name: &str, default: u32) -> Result<u32, CliError> {
    match v.as_deref() {
        None => Ok(default),
        Some([one]) => Ok(*one),
        Some(_) => Err(CliError::Config(format!(
            "{name}: this experiment takes a single value, not a list"
        ))),
    }
}

fn single_f64(v: &Option<Vec<f64>>, name: &str, default: f64) -> Result<f64, CliError> {
    match v.as_deref() {
        None => Ok(default),
        Some([one]) => Ok(*one),
        Some(_) => Err(CliError::Config(format!(
            "{name}: this experiment takes a single value, not a list"
        ))),
    }
}

fn lin_space(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![start];
    }
    let step = (stop - start) / (count - 1) as f64;
    (0..count).map(|i| start + step * i as f64).collect()
}

fn log_space(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![start];
    }
    let step = (stop.ln() - start.ln()) / (count - 1) as f64;
    (0..count)
        .map(|i| (start.ln() + step * i as f64).exp())
        .collect()
}

fn join_u32(v: &[u32]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_f64(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
