//! Per-pair demodulator output and scheme selectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::Bit;
use crate::error::{Error, Result};

/// Outcome for one bit position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDecision {
    Decided(Bit),
    Erased,
}

/// Decisions for the four bits carried by one symbol pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitVerdict {
    pub bits: [BitDecision; 4],
}

impl BitVerdict {
    /// Keeps the bit positions in `kept` with the given values and erases
    /// the others.
    pub fn keep(values: [Bit; 4], kept: &[usize]) -> Self {
        let mut bits = [BitDecision::Erased; 4];
        for &i in kept {
            bits[i] = BitDecision::Decided(values[i]);
        }
        BitVerdict { bits }
    }

    /// Every bit decided.
    pub fn full(values: [Bit; 4]) -> Self {
        Self::keep(values, &[0, 1, 2, 3])
    }

    /// Number of decided bits.
    pub fn beta(&self) -> usize {
        self.bits.iter().filter(|b| matches!(b, BitDecision::Decided(_))).count()
    }

    /// `true` for each decided position.
    pub fn kept_mask(&self) -> [bool; 4] {
        self.bits.map(|b| matches!(b, BitDecision::Decided(_)))
    }

    /// `(position, value)` of each decided bit.
    pub fn decided(&self) -> impl Iterator<Item = (usize, Bit)> + '_ {
        self.bits.iter().enumerate().filter_map(|(i, b)| match b {
            BitDecision::Decided(v) => Some((i, *v)),
            BitDecision::Erased => None,
        })
    }

    /// Number of decided bits that disagree with `truth`.
    pub fn errors(&self, truth: &[Bit; 4]) -> usize {
        self.decided().filter(|&(i, v)| truth[i] != v).count()
    }
}

pub(crate) fn check_beta(beta: usize, min: usize, max: usize) -> Result<()> {
    if beta < min || beta > max {
        return Err(Error::InvalidBeta { got: beta, min, max });
    }
    Ok(())
}

/// How the kept set is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Largest exact log-likelihood ratio magnitudes.
    Exact,
    /// High-SNR reliability comparisons.
    Rule,
    /// Threshold table plus angular sectors (16-DAPSK). For 16-DPSK this
    /// coincides with [`Variant::Rule`].
    Simple,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Exact => "exact",
            Variant::Rule => "rule",
            Variant::Simple => "simple",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Variant::Exact),
            "rule" => Ok(Variant::Rule),
            "simple" => Ok(Variant::Simple),
            _ => Err(Error::InvalidParameter(format!("unknown variant {s:?}"))),
        }
    }
}

/// Modulation scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulation {
    Dpsk,
    Dapsk { ring_ratio: f64 },
}

impl Modulation {
    pub fn name(&self) -> &'static str {
        match self {
            Modulation::Dpsk => "dpsk",
            Modulation::Dapsk { .. } => "dapsk",
        }
    }

    pub fn ring_ratio(&self) -> Option<f64> {
        match self {
            Modulation::Dpsk => None,
            Modulation::Dapsk { ring_ratio } => Some(*ring_ratio),
        }
    }
}
