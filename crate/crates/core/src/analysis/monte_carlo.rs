//! Monte Carlo bit-error rates over AWGN with a random carrier phase.
//!
//! Pairs are simulated in fixed-size chunks, each drawn from its own RNG
//! stream, so an estimate depends only on the seed and the number of pairs,
//! not on how many worker threads run the chunks.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{complex_gaussian, db_to_linear, seeded_rng, sigma2_from_snr};
use crate::constellation::{Bit, DapskMapping, DpskMapping};
use crate::dapsk_demod::{self, threshold_set, DapskObservation, ThresholdSet};
use crate::dpsk_demod::{self, DpskObservation};
use crate::error::Result;
use crate::verdict::{check_beta, Modulation, Variant};

/// Pairs per RNG stream.
pub const CHUNK_PAIRS: u64 = 1 << 15;
const BATCH_CHUNKS: u64 = 32;

/// How many pairs to simulate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McPlan {
    pub seed: u64,
    /// Pairs always simulated.
    pub min_pairs: u64,
    /// Upper limit when extending towards `min_errors`.
    pub max_pairs: u64,
    /// Keep simulating, in batches, until every requested β has at least
    /// this many bit errors or `max_pairs` is reached.
    pub min_errors: u64,
}

impl McPlan {
    /// Exactly `pairs` pairs (rounded up to whole chunks).
    pub fn fixed(pairs: u64, seed: u64) -> Self {
        McPlan {
            seed,
            min_pairs: pairs,
            max_pairs: pairs,
            min_errors: 0,
        }
    }
}

/// Estimate for one β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub beta: usize,
    pub pairs: u64,
    pub decided_bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    /// Half-width of the 95% confidence interval (normal approximation;
    /// `3/n` when no error was observed).
    pub half_width: f64,
}

impl McEstimate {
    fn from_counts(beta: usize, pairs: u64, errors: u64) -> Self {
        let n = pairs * beta as u64;
        let p = errors as f64 / n as f64;
        let half_width = if errors == 0 {
            3.0 / n as f64
        } else {
            1.96 * (p * (1.0 - p) / n as f64).sqrt()
        };
        McEstimate {
            beta,
            pairs,
            decided_bits: n,
            bit_errors: errors,
            ber: p,
            half_width,
        }
    }
}

enum Detector {
    Dpsk(DpskMapping, Variant),
    Dapsk(DapskMapping, Variant, [Option<ThresholdSet>; 4]),
}

impl Detector {
    fn new(modulation: Modulation, variant: Variant) -> Result<Self> {
        Ok(match modulation {
            Modulation::Dpsk => Detector::Dpsk(DpskMapping::canonical(), variant),
            Modulation::Dapsk { ring_ratio } => {
                let m = DapskMapping::new(ring_ratio)?;
                let mut t = [None; 4];
                for beta in 1..=3 {
                    t[beta - 1] = Some(threshold_set(beta, ring_ratio)?);
                }
                Detector::Dapsk(m, variant, t)
            }
        })
    }

    fn ring(&self, outer: bool) -> f64 {
        match self {
            Detector::Dpsk(..) => 1.0,
            Detector::Dapsk(m, ..) => {
                if outer {
                    m.outer_radius()
                } else {
                    m.inner_radius()
                }
            }
        }
    }

    /// Kept-bit errors for β = 1..=4 at one received pair.
    fn errors(&self, y0: Complex64, y1: Complex64, sigma2: f64, truth: &[Bit; 4]) -> [u64; 4] {
        let mut out = [0u64; 4];
        match self {
            Detector::Dpsk(m, Variant::Exact) => {
                let llr = dpsk_demod::exact_bit_llrs(&DpskObservation::new(y0, y1, sigma2), m);
                out = ranked_errors(&llr_order(&llr), &llr.map(|v| Bit::from(v < 0.0)), truth);
            }
            Detector::Dpsk(m, _) => {
                let r = m.rank(DpskObservation::new(y0, y1, sigma2).phi());
                out = ranked_errors(&r.order(), &r.values, truth);
            }
            Detector::Dapsk(m, variant, t) => {
                let obs = DapskObservation::new(y0, y1, sigma2);
                match variant {
                    Variant::Exact => {
                        let llr = dapsk_demod::exact_bit_llrs(&obs, m);
                        out = ranked_errors(&llr_order(&llr), &llr.map(|v| Bit::from(v < 0.0)), truth);
                    }
                    Variant::Rule => {
                        let (order, values) = dapsk_demod::rule_ranking(obs.r_prime(), obs.psi(), m);
                        out = ranked_errors(&order, &values, truth);
                    }
                    Variant::Simple => {
                        let (rp, psi) = (obs.r_prime(), obs.psi());
                        for beta in 1..=4 {
                            let v = dapsk_demod::simple_verdict(rp, psi, beta, t[beta - 1].as_ref(), m)
                                .expect("threshold sets prepared for every beta");
                            out[beta - 1] = v.errors(truth) as u64;
                        }
                    }
                }
            }
        }
        out
    }
}

fn llr_order(llr: &[f64; 4]) -> [usize; 4] {
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| llr[b].abs().total_cmp(&llr[a].abs()).then(a.cmp(&b)));
    order
}

/// Errors among the first β positions of `order`, for β = 1..=4.
fn ranked_errors(order: &[usize; 4], values: &[Bit; 4], truth: &[Bit; 4]) -> [u64; 4] {
    let mut out = [0u64; 4];
    let mut acc = 0;
    for (j, &i) in order.iter().enumerate() {
        acc += u64::from(values[i] != truth[i]);
        out[j] = acc;
    }
    out
}

fn run_chunk(det: &Detector, sigma2: f64, seed: u64, chunk: u64, pairs: u64) -> [u64; 4] {
    let mut rng = seeded_rng(seed, chunk);
    let sigma = sigma2.sqrt();
    let mut errs = [0u64; 4];
    for _ in 0..pairs {
        let bits: [Bit; 4] = [rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2)];
        let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let outer: bool = rng.gen();
        let (a0, a1, dphi) = match det {
            Detector::Dpsk(m, _) => (1.0, 1.0, DpskMapping::angle(m.index_of(&bits))),
            Detector::Dapsk(m, ..) => {
                let idx = m.phase_index_of(&[bits[1], bits[2], bits[3]]);
                (det.ring(outer), det.ring(outer ^ (bits[0] == 1)), DapskMapping::angle(idx))
            }
        };
        let y0 = Complex64::from_polar(a0, theta) + complex_gaussian(&mut rng, sigma);
        let y1 = Complex64::from_polar(a1, theta + dphi) + complex_gaussian(&mut rng, sigma);
        let e = det.errors(y0, y1, sigma2, &bits);
        for i in 0..4 {
            errs[i] += e[i];
        }
    }
    errs
}

/// Estimates the kept-bit error rate of every β in `betas` from one shared
/// set of simulated pairs at `Es/N0 = snr_db`.
pub fn monte_carlo_ber(
    modulation: Modulation,
    variant: Variant,
    betas: &[usize],
    snr_db: f64,
    plan: &McPlan,
) -> Result<Vec<McEstimate>> {
    for &b in betas {
        check_beta(b, 1, 4)?;
    }
    let det = Detector::new(modulation, variant)?;
    let sigma2 = sigma2_from_snr(db_to_linear(snr_db));
    let chunks_for = |pairs: u64| pairs.div_ceil(CHUNK_PAIRS);
    let max_chunks = chunks_for(plan.max_pairs.max(plan.min_pairs));
    let mut done = 0u64;
    let mut errs = [0u64; 4];
    let mut target = chunks_for(plan.min_pairs).max(1);
    loop {
        let batch: Vec<[u64; 4]> = (done..target)
            .into_par_iter()
            .map(|c| run_chunk(&det, sigma2, plan.seed, c, CHUNK_PAIRS))
            .collect();
        for e in batch {
            for i in 0..4 {
                errs[i] += e[i];
            }
        }
        done = target;
        let enough = betas.iter().all(|&b| errs[b - 1] >= plan.min_errors);
        if enough || done >= max_chunks {
            break;
        }
        target = (done + BATCH_CHUNKS).min(max_chunks);
    }
    let pairs = done * CHUNK_PAIRS;
    Ok(betas
        .iter()
        .map(|&b| McEstimate::from_counts(b, pairs, errs[b - 1]))
        .collect())
}
