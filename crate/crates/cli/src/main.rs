//! Command-line front end: design queries, figure-style sweeps and Monte
//! Carlo campaigns, all emitted as CSV with a `# meta:` header.

mod config;
mod experiments;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use config::Overrides;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] secrecylab_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentId {
    #[value(name = "fig1_tradeoff")]
    Fig1Tradeoff,
    #[value(name = "fig2_pmin")]
    Fig2Pmin,
    #[value(name = "fig3_thr_vs_rs")]
    Fig3ThrVsRs,
    #[value(name = "fig4_nae_thr_vs_p")]
    Fig4NaeThrVsP,
    #[value(name = "fig5_ae_thr_vs_p")]
    Fig5AeThrVsP,
    #[value(name = "fig6_gain_vs_eps")]
    Fig6GainVsEps,
    #[value(name = "design_nae")]
    DesignNae,
    #[value(name = "design_ae")]
    DesignAe,
    #[value(name = "campaign")]
    Campaign,
    #[value(name = "validate")]
    Validate,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        ExperimentId::Fig1Tradeoff,
        ExperimentId::Fig2Pmin,
        ExperimentId::Fig3ThrVsRs,
        ExperimentId::Fig4NaeThrVsP,
        ExperimentId::Fig5AeThrVsP,
        ExperimentId::Fig6GainVsEps,
        ExperimentId::DesignNae,
        ExperimentId::DesignAe,
        ExperimentId::Campaign,
        ExperimentId::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Fig1Tradeoff => "fig1_tradeoff",
            ExperimentId::Fig2Pmin => "fig2_pmin",
            ExperimentId::Fig3ThrVsRs => "fig3_thr_vs_rs",
            ExperimentId::Fig4NaeThrVsP => "fig4_nae_thr_vs_p",
            ExperimentId::Fig5AeThrVsP => "fig5_ae_thr_vs_p",
            ExperimentId::Fig6GainVsEps => "fig6_gain_vs_eps",
            ExperimentId::DesignNae => "design_nae",
            ExperimentId::DesignAe => "design_ae",
            ExperimentId::Campaign => "campaign",
            ExperimentId::Validate => "validate",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    Nae,
    Ae,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Nae => "nae",
            SchemeKind::Ae => "ae",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "nae" => Some(SchemeKind::Nae),
            "ae" => Some(SchemeKind::Ae),
            _ => None,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "secrecylab",
    version,
    about = "Design toolkit and Monte Carlo validator for artificial-noise secure transmission"
)]
struct Cli {
    /// Experiment to run
    #[arg(value_enum)]
    experiment: ExperimentId,

    /// INI-style config file; [global] plus one section per experiment
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Transmit antenna count
    #[arg(long)]
    n: Option<u32>,

    /// Total transmit power in dB
    #[arg(long = "p-db", value_name = "DB")]
    p_db: Option<f64>,

    /// Secrecy outage budget in (0, 1]
    #[arg(long)]
    eps: Option<f64>,

    /// Message rate in bits per channel use
    #[arg(long)]
    rs: Option<f64>,

    /// Transmit-probability floor for minimum-power queries
    #[arg(long)]
    delta: Option<f64>,

    /// Monte Carlo trials (or validation samples)
    #[arg(long)]
    trials: Option<u64>,

    /// RNG seed echoed into the output
    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV path (default: <experiment>.csv)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Omit the timestamp so reruns are byte-identical
    #[arg(long)]
    no_timestamp: bool,

    /// Realised channel gain for design_ae
    #[arg(long)]
    h2: Option<f64>,

    /// Power split probed by validate
    #[arg(long)]
    phi: Option<f64>,

    /// Campaign scheme
    #[arg(long, value_enum)]
    scheme: Option<SchemeKind>,
}

impl Cli {
    fn flag_overrides(&self) -> Overrides {
        Overrides {
            n: self.n.map(|v| vec![v]),
            p_db: self.p_db.map(|v| vec![v]),
            eps: self.eps.map(|v| vec![v]),
            rs: self.rs.map(|v| vec![v]),
            delta: self.delta.map(|v| vec![v]),
            trials: self.trials,
            seed: self.seed,
            h2: self.h2,
            phi: self.phi,
            scheme: self.scheme,
            out: self.out.clone(),
            no_timestamp: self.no_timestamp.then_some(true),
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let from_file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            config::parse_config(&text, cli.experiment)?
        }
        None => Overrides::default(),
    };
    let merged = cli.flag_overrides().over(from_file);
    let summary = experiments::run(cli.experiment, merged)?;
    println!("wrote {} rows to {}", summary.rows, summary.path.display());
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
