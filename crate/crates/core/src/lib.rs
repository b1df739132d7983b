//! Design rules and simulation tools for artificial-noise-aided secure
//! multi-antenna transmission over slow Rayleigh fading channels.
//!
//! A multi-antenna transmitter (Alice) sends confidential messages to a
//! single-antenna receiver (Bob) while an eavesdropper (Eve) of unknown
//! location listens in. Alice beamforms the message towards Bob and fills
//! the remaining spatial dimensions with artificial noise. Everything here
//! revolves around choosing the wiretap-code rates, the power split between
//! message and noise, and an on-off fading threshold so that the secrecy
//! outage probability stays below a target while throughput is maximised.
//!
//! Modules:
//! - [`specfun`]: the small special-function kernel everything else needs
//! - [`secrecy`]: shared system/threat-model types and outage expressions
//! - [`channel`]: Rayleigh channel sampling and null-space beamforming
//! - [`nae`]: non-adaptive encoder design (fixed rates, on-off threshold)
//! - [`ae`]: adaptive encoder design (rates adapted to the realised channel)
//! - [`sim`]: Monte Carlo validation of the closed-form designs

pub mod ae;
pub mod channel;
pub mod error;
pub mod nae;
pub mod secrecy;
pub mod sim;
pub mod specfun;

pub(crate) mod quad;

pub use ae::{AeDesignPoint, AeThroughputReport};
pub use channel::{ChannelDraw, NoiseSplit};
pub use error::{Error, Result};
pub use nae::{NaeDesign, NaeThroughputApprox, PowerCost};
pub use secrecy::{SecrecyBudget, SystemConfig, WiretapRates};
pub use sim::{CampaignSpec, Estimate, Scheme, SimulationReport};
pub use specfun::SpecfunTolerance;
