//! Rayleigh channel sampling and null-space beamforming.
//!
//! The transmitter sends the message along the matched direction of the
//! intended channel and spreads artificial noise isotropically over the
//! orthogonal complement. This module samples channels, completes the
//! matched direction to a unitary basis, and produces the worst-case
//! eavesdropper SNR of one realisation from the projected gains, which is
//! what the Monte Carlo simulator feeds on.
//!
//! Randomness is organised as counter-style streams of a seeded ChaCha
//! generator: every (seed, stream) pair is an independent, reproducible
//! sequence, so parallel workers never share state. Complex Gaussians come
//! from Box-Muller in polar form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::secrecy::check_phi;

/// Independent reproducible generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One circularly-symmetric complex Gaussian with unit variance
/// (E|c|^2 = 1), via Box-Muller in polar form.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    // random() is in [0, 1); flip to (0, 1] so the log stays finite.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    let modulus = (-u1.ln()).sqrt();
    let (sin, cos) = (std::f64::consts::TAU * u2).sin_cos();
    Complex64::new(modulus * cos, modulus * sin)
}

/// An n-entry channel with i.i.d. unit-variance complex Gaussian entries.
/// The squared norm is then Gamma(n, 1) distributed.
pub fn sample_unit_channel<R: Rng + ?Sized>(rng: &mut R, n: u32) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// Squared norm of a fresh unit-variance channel, without keeping the
/// vector. Useful when only the effective gain matters.
pub fn sample_effective_gain<R: Rng + ?Sized>(rng: &mut R, n: u32) -> f64 {
    (0..n).map(|_| complex_gaussian(rng).norm_sqr()).sum()
}

/// Unitary basis W = [w1 W2] adapted to an intended channel h: the first
/// column is the matched-filter direction w1 = conj(h)/||h|| (so that
/// h^T w1 = ||h|| is real), and the remaining columns span the null space
/// of h^T, where artificial noise lives.
///
/// Stored in Householder form (reflector H with H w1 = alpha e0): columns
/// j >= 1 are H e_j, materialised on demand, and projections of a row
/// vector cost O(n) instead of O(n^2).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryBasis {
    w1: Vec<Complex64>,
    v: Vec<Complex64>,
    beta: f64,
}

impl UnitaryBasis {
    pub fn dim(&self) -> usize {
        self.w1.len()
    }

    /// The matched-filter (message) direction, column 0 of W.
    pub fn message_direction(&self) -> &[Complex64] {
        &self.w1
    }

    /// Column j of W. Column 0 is the matched direction; columns 1..n are
    /// the Householder images H e_j spanning the orthogonal complement.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        let n = self.dim();
        assert!(j < n, "column index {j} out of range for dimension {n}");
        if j == 0 {
            return self.w1.clone();
        }
        // H e_j = e_j - beta * v * conj(v_j)
        let scale = self.beta * self.v[j].conj();
        let mut col: Vec<Complex64> = self.v.iter().map(|&vi| -scale * vi).collect();
        col[j] += 1.0;
        col
    }

    /// Gains of a row vector g projected on the basis: (|g^T w1|^2,
    /// ||g^T W2||^2). One O(n) Householder application; identical to
    /// materialising W and multiplying.
    pub fn project_gains(&self, g: &[Complex64]) -> Result<(f64, f64)> {
        let n = self.dim();
        if g.len() != n {
            return Err(Error::Config(format!(
                "vector length {} does not match basis dimension {n}",
                g.len()
            )));
        }
        let g1: Complex64 = g.iter().zip(&self.w1).map(|(&gi, &wi)| gi * wi).sum();
        // g^T H = g^T - beta (g^T v) conj(v)^T; components 1..n are g^T W2.
        let gv: Complex64 = g.iter().zip(&self.v).map(|(&gi, &vi)| gi * vi).sum();
        let scale = self.beta * gv;
        let g2: f64 = (1..n)
            .map(|i| (g[i] - scale * self.v[i].conj()).norm_sqr())
            .sum();
        Ok((g1.norm_sqr(), g2))
    }
}

/// Complete the matched direction of `h` to a unitary basis. Fails for a
/// numerically zero channel, which has no direction to match.
pub fn null_space_basis(h: &[Complex64]) -> Result<UnitaryBasis> {
    if h.len() < 2 {
        return Err(Error::Config(format!(
            "need at least 2 antennas, got {}",
            h.len()
        )));
    }
    let norm = h.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 1e-150) || !norm.is_finite() {
        return Err(Error::Domain(
            "degenerate channel: squared norm is zero or not finite".into(),
        ));
    }
    let w1: Vec<Complex64> = h.iter().map(|&c| c.conj() / norm).collect();
    // Householder reflector sending w1 onto alpha e0 with alpha = -e^{i
    // arg(w1_0)}: v = w1 - alpha e0, beta = 2/||v||^2 = 1/(1 + |w1_0|).
    let lead = w1[0];
    let phase = if lead.norm() > 0.0 {
        lead / lead.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut v = w1.clone();
    v[0] += phase;
    let beta = 1.0 / (1.0 + lead.norm());
    Ok(UnitaryBasis { w1, v, beta })
}

/// Transmit power split between the message stream and the artificial
/// noise spread over the n-1 null-space dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSplit {
    phi: f64,
    signal_variance: f64,
    an_variance_per_dim: f64,
}

impl NoiseSplit {
    /// Spend a fraction `phi` in (0, 1] of `power` on the message; the rest
    /// is divided evenly over the null-space dimensions.
    pub fn new(phi: f64, power: f64, n_antennas: u32) -> Result<Self> {
        check_phi(phi)?;
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::Config(format!(
                "power must be positive and finite, got {power}"
            )));
        }
        if n_antennas < 2 {
            return Err(Error::Config(format!(
                "need at least 2 transmit antennas, got {n_antennas}"
            )));
        }
        Ok(NoiseSplit {
            phi,
            signal_variance: phi * power,
            an_variance_per_dim: (1.0 - phi) * power / (f64::from(n_antennas) - 1.0),
        })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_variance
    }

    pub fn an_variance_per_dim(&self) -> f64 {
        self.an_variance_per_dim
    }
}

/// One joint realisation of the intended and eavesdropper channels,
/// with the gains needed by the protocol: the effective gain ||h||^2 of
/// the intended link, and the eavesdropper gains |g^T w1|^2, ||g^T W2||^2
/// projected on the beamforming basis.
///
/// The eavesdropper gains are computed from unit-variance draws and scaled
/// by the eavesdropper channel variance, so the variance cancels exactly
/// (bit for bit) in the SNR ratio whenever the scaling is a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    h: Vec<Complex64>,
    g: Vec<Complex64>,
    basis: UnitaryBasis,
    effective_gain: f64,
    g1_gain: f64,
    g2_gain: f64,
}

impl ChannelDraw {
    /// Sample both channels at dimension `n`; the eavesdropper entries have
    /// variance `eve_variance`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, n: u32, eve_variance: f64) -> Result<Self> {
        let h = sample_unit_channel(rng, n);
        let g_unit = sample_unit_channel(rng, n);
        Self::from_parts(h, g_unit, eve_variance)
    }

    /// Assemble a draw from an intended channel and a unit-variance
    /// eavesdropper draw, scaling the latter to `eve_variance`.
    pub fn from_parts(
        h: Vec<Complex64>,
        g_unit: Vec<Complex64>,
        eve_variance: f64,
    ) -> Result<Self> {
        if !(eve_variance > 0.0) || !eve_variance.is_finite() {
            return Err(Error::Config(format!(
                "eavesdropper channel variance must be positive and finite, got {eve_variance}"
            )));
        }
        if h.len() != g_unit.len() {
            return Err(Error::Config(format!(
                "channel dimensions differ: {} vs {}",
                h.len(),
                g_unit.len()
            )));
        }
        let basis = null_space_basis(&h)?;
        let effective_gain = h.iter().map(|c| c.norm_sqr()).sum();
        let (g1_unit, g2_unit) = basis.project_gains(&g_unit)?;
        let scale = eve_variance.sqrt();
        let g = g_unit.iter().map(|&c| c * scale).collect();
        Ok(ChannelDraw {
            h,
            g,
            basis,
            effective_gain,
            g1_gain: eve_variance * g1_unit,
            g2_gain: eve_variance * g2_unit,
        })
    }

    pub fn n_antennas(&self) -> usize {
        self.h.len()
    }

    pub fn intended(&self) -> &[Complex64] {
        &self.h
    }

    pub fn eavesdropper(&self) -> &[Complex64] {
        &self.g
    }

    pub fn basis(&self) -> &UnitaryBasis {
        &self.basis
    }

    /// Squared norm of the intended channel.
    pub fn effective_gain(&self) -> f64 {
        self.effective_gain
    }

    /// Eavesdropper gain along the message direction.
    pub fn g1_gain(&self) -> f64 {
        self.g1_gain
    }

    /// Total eavesdropper gain across the null-space directions.
    pub fn g2_gain(&self) -> f64 {
        self.g2_gain
    }
}

/// Worst-case (zero receiver noise) eavesdropper SNR of one realisation
/// under a given power split:
/// (N-1) / (phi^{-1} - 1) * |g1|^2 / ||g2||^2.
///
/// Unbounded when all power goes to the message (phi = 1) or when the
/// eavesdropper happens to lie entirely outside the noise subspace.
pub fn eve_snr_sample(draw: &ChannelDraw, split: &NoiseSplit) -> f64 {
    let phi = split.phi();
    if phi >= 1.0 || draw.g2_gain == 0.0 {
        return f64::INFINITY;
    }
    let nm1 = draw.n_antennas() as f64 - 1.0;
    nm1 / (1.0 / phi - 1.0) * draw.g1_gain / draw.g2_gain
}
