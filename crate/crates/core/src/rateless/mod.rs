//! LT codes over erasure channels and the end-to-end adaptive pipeline.
//!
//! Each encoded bit is the XOR of a random set of message bits. The set is
//! drawn from an RNG keyed by `(seed, sequence index)`, so a receiver that
//! knows the seed can rebuild it for any bit it happened to receive.

mod pipeline;

pub use pipeline::{
    end_to_end_run, random_message, BetaPolicy, ChannelModel, E2eOutcome, E2eReport, PipelineConfig,
    TranscriptRow,
};

use std::collections::{HashSet, VecDeque};

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::channel::seeded_rng;
use crate::constellation::Bit;
use crate::error::{Error, Result};

/// Robust-soliton parameters and message length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LtParams {
    pub k: usize,
    pub c: f64,
    pub delta: f64,
}

impl LtParams {
    /// `c = 0.1`, `δ = 0.5`.
    pub fn new(k: usize) -> Self {
        LtParams { k, c: 0.1, delta: 0.5 }
    }

    pub fn distribution(&self) -> Result<DegreeDistribution> {
        robust_soliton(self.k, self.c, self.delta)
    }
}

/// Degree distribution over `1..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    k: usize,
    c: f64,
    delta: f64,
    spike: usize,
    /// `probs[d - 1] = P(degree = d)`.
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl DegreeDistribution {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Degree carrying the extra robust-soliton mass.
    pub fn spike(&self) -> usize {
        self.spike
    }

    /// Probabilities of degrees `1..=k`.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, degree: usize) -> f64 {
        if degree == 0 || degree > self.k {
            0.0
        } else {
            self.probs[degree - 1]
        }
    }

    pub fn mean_degree(&self) -> f64 {
        self.probs.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let d = self.cdf.partition_point(|&c| c <= u) + 1;
        d.min(self.k)
    }
}

/// Robust soliton distribution for `k` message bits.
///
/// With `S = c ln(k/δ) √k` the ideal soliton `ρ(1) = 1/k`,
/// `ρ(d) = 1/(d(d−1))` is augmented by `τ(d) = S/(dk)` for `d < k/S` and
/// `τ(k/S) = S ln(S/δ)/k`, then normalised.
pub fn robust_soliton(k: usize, c: f64, delta: f64) -> Result<DegreeDistribution> {
    if k == 0 {
        return Err(Error::InvalidLtParams("k must be at least 1".into()));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidLtParams(format!("c must be positive, got {c}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidLtParams(format!("delta must lie in (0, 1), got {delta}")));
    }
    let kf = k as f64;
    let s = c * (kf / delta).ln() * kf.sqrt();
    let spike = ((kf / s).round() as usize).clamp(1, k);
    let mut w = vec![0.0; k];
    w[0] = 1.0 / kf;
    for d in 2..=k {
        w[d - 1] = 1.0 / (d as f64 * (d as f64 - 1.0));
    }
    for d in 1..spike {
        w[d - 1] += s / (d as f64 * kf);
    }
    w[spike - 1] += (s * (s / delta).ln() / kf).max(0.0);
    let total: f64 = w.iter().sum();
    let probs: Vec<f64> = w.iter().map(|x| x / total).collect();
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    cdf[k - 1] = 1.0;
    Ok(DegreeDistribution {
        k,
        c,
        delta,
        spike,
        probs,
        cdf,
    })
}

/// One encoded bit and the message positions it combines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedBit {
    pub index: u64,
    pub value: Bit,
    pub neighbors: Vec<usize>,
}

/// Sorted, distinct message positions of encoded bit `index`.
pub fn neighbors(seed: u64, index: u64, dist: &DegreeDistribution) -> Vec<usize> {
    let mut rng = seeded_rng(seed, index);
    let d = dist.sample(&mut rng);
    let mut v = index::sample(&mut rng, dist.k, d).into_vec();
    v.sort_unstable();
    v
}

/// Produces encoded bits on demand for one message.
#[derive(Debug, Clone)]
pub struct LtEncoder<'a> {
    message: &'a [Bit],
    seed: u64,
    dist: &'a DegreeDistribution,
}

impl<'a> LtEncoder<'a> {
    pub fn new(message: &'a [Bit], seed: u64, dist: &'a DegreeDistribution) -> Result<Self> {
        if message.len() != dist.k {
            return Err(Error::InvalidLtParams(format!(
                "message has {} bits but the distribution is for k={}",
                message.len(),
                dist.k
            )));
        }
        Ok(LtEncoder { message, seed, dist })
    }

    pub fn encode(&self, index: u64) -> EncodedBit {
        let nb = neighbors(self.seed, index, self.dist);
        let value = nb.iter().fold(0, |acc, &i| acc ^ self.message[i]);
        EncodedBit {
            index,
            value,
            neighbors: nb,
        }
    }
}

/// Encoded bits `0..count`.
pub fn lt_encode(message: &[Bit], count: usize, seed: u64, dist: &DegreeDistribution) -> Result<Vec<EncodedBit>> {
    if count == 0 {
        return Err(Error::InvalidLtParams("count must be at least 1".into()));
    }
    let enc = LtEncoder::new(message, seed, dist)?;
    Ok((0..count as u64).map(|i| enc.encode(i)).collect())
}

/// Result of [`peel_decode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Success(Vec<Bit>),
    /// Peeling stalled with `recovered` of the `k` bits known.
    Failure { recovered: usize },
}

impl DecodeOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, DecodeOutcome::Success(_))
    }
}

/// Peeling decoder: repeatedly resolves encoded bits with exactly one
/// unknown neighbour. `received` holds `(sequence index, value)` pairs with
/// distinct indices.
pub fn peel_decode(received: &[(u64, Bit)], seed: u64, dist: &DegreeDistribution) -> Result<DecodeOutcome> {
    let k = dist.k;
    let mut seen = HashSet::with_capacity(received.len());
    for &(i, _) in received {
        if !seen.insert(i) {
            return Err(Error::InvalidLtParams(format!("duplicate encoded index {i}")));
        }
    }

    let n = received.len();
    let mut value = Vec::with_capacity(n);
    let mut unknown = Vec::with_capacity(n);
    // XOR of the unknown neighbours; the last one left is read off directly.
    let mut xor_idx = Vec::with_capacity(n);
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); k];
    let mut queue = VecDeque::new();
    for (c, &(i, v)) in received.iter().enumerate() {
        let nb = neighbors(seed, i, dist);
        value.push(v);
        unknown.push(nb.len());
        xor_idx.push(nb.iter().fold(0usize, |a, &x| a ^ x));
        for &m in &nb {
            adj[m].push(c as u32);
        }
        if nb.len() == 1 {
            queue.push_back(c);
        }
    }

    let mut message: Vec<Option<Bit>> = vec![None; k];
    let mut recovered = 0;
    while let Some(c) = queue.pop_front() {
        if unknown[c] != 1 {
            continue;
        }
        let m = xor_idx[c];
        if message[m].is_some() {
            continue;
        }
        let bit = value[c];
        message[m] = Some(bit);
        recovered += 1;
        for &other in &adj[m] {
            let o = other as usize;
            value[o] ^= bit;
            xor_idx[o] ^= m;
            unknown[o] -= 1;
            if unknown[o] == 1 {
                queue.push_back(o);
            }
        }
        if recovered == k {
            break;
        }
    }

    if recovered == k {
        Ok(DecodeOutcome::Success(message.into_iter().map(|b| b.unwrap_or(0)).collect()))
    } else {
        Ok(DecodeOutcome::Failure { recovered })
    }
}
