//! AWGN and block-Rayleigh channels with seeded, reproducible noise.
//!
//! SNR is `Es/N0` with unit mean symbol energy, so the complex noise has
//! variance `N0 = 1/γ` and each quadrature component `σ² = 1/(2γ)`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::constellation::{ComplexSample, SymbolStream};
use crate::error::{Error, Result};

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Per-component noise variance for a linear `Es/N0` with unit symbol energy.
pub fn sigma2_from_snr(gamma: f64) -> f64 {
    1.0 / (2.0 * gamma)
}

/// Deterministic generator for `(seed, stream)`. Distinct streams are
/// independent, so work split by stream is reproducible regardless of how
/// it is scheduled.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Circularly symmetric Gaussian sample with variance `sigma2` per component.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(sigma * re, sigma * im)
}

/// Additive white Gaussian noise at a fixed `Es/N0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
}

impl NoiseSpec {
    pub fn new(snr_db: f64) -> Self {
        NoiseSpec { snr_db }
    }

    /// A channel without noise (`snr_db = +∞`).
    pub fn noiseless() -> Self {
        NoiseSpec {
            snr_db: f64::INFINITY,
        }
    }

    pub fn snr_linear(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    pub fn sigma2(&self) -> f64 {
        sigma2_from_snr(self.snr_linear())
    }
}

/// Block Rayleigh fading: the gain is constant over `coherence_len`
/// consecutive symbols and independent between blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec {
    pub avg_snr_db: f64,
    pub coherence_len: usize,
}

impl FadingSpec {
    pub fn new(avg_snr_db: f64, coherence_len: usize) -> Result<Self> {
        if coherence_len < 2 {
            return Err(Error::CoherenceTooShort(coherence_len));
        }
        Ok(FadingSpec {
            avg_snr_db,
            coherence_len,
        })
    }
}

/// Rotates the stream by one uniformly random phase and adds noise.
pub fn apply_awgn(stream: &SymbolStream, spec: &NoiseSpec, seed: u64) -> SymbolStream {
    let mut rng = seeded_rng(seed, 0);
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let rot = Complex64::from_polar(1.0, theta);
    let sigma = spec.sigma2().sqrt();
    let samples = stream
        .samples
        .iter()
        .map(|&s| {
            let n = if sigma > 0.0 {
                complex_gaussian(&mut rng, sigma)
            } else {
                Complex64::new(0.0, 0.0)
            };
            s * rot + n
        })
        .collect();
    SymbolStream::new(samples)
}

/// Output of [`apply_rayleigh_block`].
#[derive(Debug, Clone, PartialEq)]
pub struct FadedStream {
    pub stream: SymbolStream,
    /// Linear instantaneous SNR `|h|²·γ̄` of each block.
    pub block_snr: Vec<f64>,
}

/// Multiplies each block of `coherence_len` symbols by an independent
/// `h ~ CN(0, 1)` and adds noise at the average SNR. A trailing partial
/// block gets its own gain.
pub fn apply_rayleigh_block(
    stream: &SymbolStream,
    spec: &FadingSpec,
    seed: u64,
) -> Result<FadedStream> {
    if spec.coherence_len < 2 {
        return Err(Error::CoherenceTooShort(spec.coherence_len));
    }
    let mut rng = seeded_rng(seed, 0);
    let gamma = db_to_linear(spec.avg_snr_db);
    let sigma = sigma2_from_snr(gamma).sqrt();
    let mut samples: Vec<ComplexSample> = Vec::with_capacity(stream.len());
    let mut block_snr = Vec::new();
    for block in stream.samples.chunks(spec.coherence_len) {
        let h = complex_gaussian(&mut rng, std::f64::consts::FRAC_1_SQRT_2);
        block_snr.push(h.norm_sqr() * gamma);
        for &s in block {
            samples.push(h * s + complex_gaussian(&mut rng, sigma));
        }
    }
    Ok(FadedStream {
        stream: SymbolStream::new(samples),
        block_snr,
    })
}
