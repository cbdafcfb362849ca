//! Transmitter, channel, adaptive receiver and LT decoder chained together.
//!
//! Encoded bits are sent four per symbol pair in bursts. Every burst starts
//! with a reference symbol and spans one coherence block, so the receiver's
//! SNR is constant within a burst. The receiver picks β for the burst,
//! keeps the decided bits with their sequence indices and runs the peeling
//! decoder once `⌈(1+ε)k⌉` bits are buffered.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::channel::{
    apply_awgn, apply_rayleigh_block, db_to_linear, linear_to_db, seeded_rng, sigma2_from_snr, FadingSpec, NoiseSpec,
};
use crate::constellation::{dapsk_encode_with_reference, dpsk_encode, Bit, DapskMapping, DpskMapping, SymbolStream};
use crate::dapsk_demod::{self, DapskObservation};
use crate::dpsk_demod::{self, DpskObservation};
use crate::error::{Error, Result};
use crate::analysis::OperatingRegions;
use crate::verdict::{BitVerdict, Modulation, Variant};

use super::{peel_decode, DecodeOutcome, LtEncoder, LtParams};

/// Propagation model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ChannelModel {
    Noiseless,
    Awgn { snr_db: f64 },
    /// Independent Rayleigh gain per burst.
    Rayleigh { avg_snr_db: f64 },
}

/// How the receiver chooses β for a burst.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaPolicy {
    /// Always the same β (0 erases everything).
    Fixed(usize),
    /// From the burst SNR, known to the receiver.
    Adaptive(OperatingRegions),
}

/// Everything [`end_to_end_run`] needs besides the message.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub modulation: Modulation,
    pub variant: Variant,
    pub channel: ChannelModel,
    pub policy: BetaPolicy,
    pub lt: LtParams,
    /// Decoding starts once `⌈(1+ε)k⌉` bits are buffered.
    pub epsilon: f64,
    /// Symbols per burst including the reference (the coherence length).
    pub burst_len: usize,
    /// Give up after this many symbol pairs.
    pub max_pairs: u64,
    pub seed: u64,
}

/// One transcript line per received symbol pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranscriptRow {
    pub pair_index: u64,
    /// Burst SNR in dB.
    pub instantaneous_snr: f64,
    pub beta_used: usize,
    pub bits_decided: usize,
    pub buffer_fill: usize,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum E2eOutcome {
    Decoded,
    DecodeFailure,
    /// The pair budget ran out before the buffer filled.
    Timeout,
}

/// Summary and transcript of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct E2eReport {
    pub outcome: E2eOutcome,
    pub message_bits: usize,
    pub bursts: u64,
    pub pairs: u64,
    /// Coded bits carried by the transmitted pairs (four per pair).
    pub bits_sent: u64,
    pub bits_decided: u64,
    pub erasures: u64,
    /// Decided bits that differ from what was sent.
    pub decided_bit_errors: u64,
    /// Message bits wrong after a decode that reported success.
    pub message_bit_errors: Option<u64>,
    /// Decided bits per symbol pair.
    pub bits_per_pair: f64,
    #[serde(skip)]
    pub transcript: Vec<TranscriptRow>,
}

/// `k` uniformly random bits.
pub fn random_message(k: usize, seed: u64) -> Vec<Bit> {
    let mut rng = seeded_rng(seed, u64::MAX);
    (0..k).map(|_| rng.gen_range(0..2)).collect()
}

// Decorrelates the per-burst channel seeds from the LT seed.
fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

enum Receiver {
    Dpsk(DpskMapping),
    Dapsk(DapskMapping),
}

impl Receiver {
    fn new(modulation: Modulation) -> Result<Self> {
        Ok(match modulation {
            Modulation::Dpsk => Receiver::Dpsk(DpskMapping::canonical()),
            Modulation::Dapsk { ring_ratio } => Receiver::Dapsk(DapskMapping::new(ring_ratio)?),
        })
    }

    fn modulate(&self, bits: &[Bit], outer_reference: bool) -> Result<SymbolStream> {
        match self {
            Receiver::Dpsk(m) => dpsk_encode(bits, m),
            Receiver::Dapsk(m) => dapsk_encode_with_reference(bits, m, outer_reference),
        }
    }

    fn detect(&self, y0: Complex64, y1: Complex64, sigma2: f64, beta: usize, variant: Variant) -> Result<BitVerdict> {
        match self {
            Receiver::Dpsk(m) => dpsk_demod::demod_beta(&DpskObservation::new(y0, y1, sigma2), beta, m, variant),
            Receiver::Dapsk(m) => dapsk_demod::demod_beta(&DapskObservation::new(y0, y1, sigma2), beta, m, variant),
        }
    }
}

fn validate(message: &[Bit], cfg: &PipelineConfig) -> Result<()> {
    if message.len() != cfg.lt.k {
        return Err(Error::InvalidLtParams(format!(
            "message has {} bits, k = {}",
            message.len(),
            cfg.lt.k
        )));
    }
    if !(cfg.epsilon >= 0.0) {
        return Err(Error::InvalidLtParams(format!("epsilon must be non-negative, got {}", cfg.epsilon)));
    }
    if cfg.burst_len < 2 {
        return Err(Error::CoherenceTooShort(cfg.burst_len));
    }
    if let BetaPolicy::Fixed(b) = cfg.policy {
        if b > 4 {
            return Err(Error::InvalidBeta { got: b, min: 0, max: 4 });
        }
    }
    if let BetaPolicy::Adaptive(r) = &cfg.policy {
        if r.modulation != cfg.modulation {
            return Err(Error::InvalidParameter(
                "operating regions were computed for a different modulation".into(),
            ));
        }
    }
    Ok(())
}

/// Sends `message` through the whole chain and reports the outcome.
pub fn end_to_end_run(message: &[Bit], cfg: &PipelineConfig) -> Result<E2eReport> {
    validate(message, cfg)?;
    let dist = cfg.lt.distribution()?;
    let encoder = LtEncoder::new(message, cfg.seed, &dist)?;
    let rx = Receiver::new(cfg.modulation)?;
    let needed = ((1.0 + cfg.epsilon) * cfg.lt.k as f64).ceil() as usize;
    let pairs_per_burst = (cfg.burst_len - 1) as u64;
    let fading = match cfg.channel {
        ChannelModel::Rayleigh { avg_snr_db } => Some(FadingSpec::new(avg_snr_db, cfg.burst_len)?),
        _ => None,
    };

    let mut buffer: Vec<(u64, Bit)> = Vec::with_capacity(needed);
    let mut transcript = Vec::new();
    let (mut pairs, mut bursts, mut decided_errors) = (0u64, 0u64, 0u64);

    'bursts: while pairs < cfg.max_pairs && buffer.len() < needed {
        let burst_seed = mix(cfg.seed ^ mix(bursts));
        let n_pairs = pairs_per_burst.min(cfg.max_pairs - pairs);
        let first = 4 * pairs;
        let coded: Vec<Bit> = (first..first + 4 * n_pairs).map(|i| encoder.encode(i).value).collect();
        let outer_reference = seeded_rng(burst_seed, 1).gen::<bool>();
        let tx = rx.modulate(&coded, outer_reference)?;

        let (received, gamma) = match (cfg.channel, fading) {
            (ChannelModel::Noiseless, _) => (apply_awgn(&tx, &NoiseSpec::noiseless(), burst_seed), f64::INFINITY),
            (ChannelModel::Awgn { snr_db }, _) => (apply_awgn(&tx, &NoiseSpec::new(snr_db), burst_seed), db_to_linear(snr_db)),
            (ChannelModel::Rayleigh { avg_snr_db }, Some(spec)) => {
                let faded = apply_rayleigh_block(&tx, &spec, burst_seed)?;
                let g = faded.block_snr[0];
                // The receiver knows |h|; rescaling restores unit symbol energy.
                let scale = (db_to_linear(avg_snr_db) / g).sqrt();
                let samples = faded.stream.samples.iter().map(|&y| y * scale).collect();
                (SymbolStream::new(samples), g)
            }
            (ChannelModel::Rayleigh { .. }, None) => unreachable!("fading spec built above"),
        };
        let sigma2 = sigma2_from_snr(gamma);
        let beta = match &cfg.policy {
            BetaPolicy::Fixed(b) => *b,
            BetaPolicy::Adaptive(r) => r.beta_for(gamma),
        };
        bursts += 1;

        for (j, w) in received.samples.windows(2).enumerate() {
            let pair_index = pairs;
            pairs += 1;
            let mut decided = 0;
            if beta > 0 {
                let v = rx.detect(w[0], w[1], sigma2, beta, cfg.variant)?;
                for (slot, bit) in v.decided() {
                    let idx = first + 4 * j as u64 + slot as u64;
                    decided_errors += u64::from(bit != coded[4 * j + slot]);
                    if buffer.len() < needed {
                        buffer.push((idx, bit));
                    }
                    decided += 1;
                }
            }
            transcript.push(TranscriptRow {
                pair_index,
                instantaneous_snr: linear_to_db(gamma),
                beta_used: beta,
                bits_decided: decided,
                buffer_fill: buffer.len(),
            });
            if buffer.len() >= needed {
                break 'bursts;
            }
        }
    }

    let bits_decided: u64 = transcript.iter().map(|r| r.bits_decided as u64).sum();
    let (outcome, message_bit_errors) = if buffer.len() < needed {
        (E2eOutcome::Timeout, None)
    } else {
        match peel_decode(&buffer, cfg.seed, &dist)? {
            DecodeOutcome::Success(m) => (
                E2eOutcome::Decoded,
                Some(m.iter().zip(message).filter(|(a, b)| a != b).count() as u64),
            ),
            DecodeOutcome::Failure { .. } => (E2eOutcome::DecodeFailure, None),
        }
    };
    Ok(E2eReport {
        outcome,
        message_bits: cfg.lt.k,
        bursts,
        pairs,
        bits_sent: 4 * pairs,
        bits_decided,
        erasures: 4 * pairs - bits_decided,
        decided_bit_errors: decided_errors,
        message_bit_errors,
        bits_per_pair: if pairs == 0 { 0.0 } else { bits_decided as f64 / pairs as f64 },
        transcript,
    })
}
