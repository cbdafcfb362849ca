//! Experiment configuration: a flat TOML file, an optional named preset and
//! command-line overrides, validated before anything runs.

use std::path::Path;

use adm_core::rateless::LtParams;
use adm_core::{Modulation, Variant};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Dpsk,
    Dapsk,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    MonteCarlo,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Noiseless,
    Awgn,
    Rayleigh,
}

/// Every knob of every subcommand. Unset keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub variant: Variant,
    pub method: Method,
    pub betas: Vec<usize>,
    /// Fixed β for `e2e`; adaptive when absent.
    pub beta: Option<usize>,
    pub ring_ratio: f64,
    /// Sweep of ring ratios for 16-DAPSK; replaces `ring_ratio` when set.
    pub ring_ratios: Option<Vec<f64>>,
    pub snr_db_start: f64,
    pub snr_db_stop: f64,
    pub snr_db_step: f64,
    /// Channel SNR of `e2e` (average SNR for Rayleigh).
    pub snr_db: f64,
    pub channel: ChannelKind,
    /// Symbol pairs per Monte Carlo point.
    pub trials: u64,
    pub seed: u64,
    pub target_ber: f64,
    pub lt_k: usize,
    pub lt_c: f64,
    pub lt_delta: f64,
    pub lt_epsilon: f64,
    /// Symbols per burst (one coherence block) in `e2e`.
    pub coherence_len: usize,
    pub max_pairs: u64,
    /// Output path; standard output when absent.
    pub out: Option<String>,
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scheme: Scheme::Dpsk,
            variant: Variant::Rule,
            method: Method::Analytic,
            betas: vec![1, 2, 3, 4],
            beta: None,
            ring_ratio: 2.0,
            ring_ratios: None,
            snr_db_start: 0.0,
            snr_db_stop: 30.0,
            snr_db_step: 2.0,
            snr_db: 15.0,
            channel: ChannelKind::Rayleigh,
            trials: 1_000_000,
            seed: 1,
            target_ber: 1e-4,
            lt_k: 1000,
            lt_c: 0.1,
            lt_delta: 0.5,
            lt_epsilon: 0.3,
            coherence_len: 100,
            max_pairs: 10_000_000,
            out: None,
            workers: None,
        }
    }
}

const PRESETS: &[(&str, &str)] = &[
    ("fig7_dpsk", include_str!("../presets/fig7_dpsk.toml")),
    ("fig7_dapsk", include_str!("../presets/fig7_dapsk.toml")),
    ("table1_r2", include_str!("../presets/table1_r2.toml")),
    ("fig9_ring_ratios", include_str!("../presets/fig9_ring_ratios.toml")),
    ("fig10_crossover", include_str!("../presets/fig10_crossover.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn load_preset(name: &str) -> Result<ExperimentConfig, CliError> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown preset {name:?}; available: {}",
            preset_names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    parse(text)
}

pub fn load_file(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

impl ExperimentConfig {
    /// Modulations selected by `scheme`, one per ring ratio for 16-DAPSK.
    pub fn modulations(&self) -> Vec<Modulation> {
        let mut out = Vec::new();
        if matches!(self.scheme, Scheme::Dpsk | Scheme::Both) {
            out.push(Modulation::Dpsk);
        }
        if matches!(self.scheme, Scheme::Dapsk | Scheme::Both) {
            for &r in self.ring_ratio_list() {
                out.push(Modulation::Dapsk { ring_ratio: r });
            }
        }
        out
    }

    pub fn ring_ratio_list(&self) -> &[f64] {
        match &self.ring_ratios {
            Some(v) => v,
            None => std::slice::from_ref(&self.ring_ratio),
        }
    }

    /// `snr_db_start, start + step, …` up to and including `snr_db_stop`.
    pub fn snr_grid(&self) -> Vec<f64> {
        let n = ((self.snr_db_stop - self.snr_db_start) / self.snr_db_step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.snr_db_start + i as f64 * self.snr_db_step).collect()
    }

    pub fn lt(&self) -> LtParams {
        LtParams {
            k: self.lt_k,
            c: self.lt_c,
            delta: self.lt_delta,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.betas.is_empty() || self.betas.iter().any(|b| !(1..=4).contains(b)) {
            return bad(format!("betas must be non-empty with values in 1..=4, got {:?}", self.betas));
        }
        if let Some(b) = self.beta {
            if b > 4 {
                return bad(format!("beta must lie in 0..=4, got {b}"));
            }
        }
        for &r in self.ring_ratio_list() {
            if !(r > 1.0) || !r.is_finite() {
                return bad(format!("ring ratio must be greater than 1, got {r}"));
            }
        }
        if self.ring_ratios.as_ref().is_some_and(|v| v.is_empty()) {
            return bad("ring_ratios must not be empty".into());
        }
        if !(self.snr_db_step > 0.0) || !(self.snr_db_stop >= self.snr_db_start) {
            return bad(format!(
                "SNR grid needs step > 0 and stop >= start, got {}..{} step {}",
                self.snr_db_start, self.snr_db_stop, self.snr_db_step
            ));
        }
        if self.snr_grid().len() > 100_000 {
            return bad("SNR grid has more than 100000 points".into());
        }
        if !(self.target_ber > 0.0 && self.target_ber < 0.5) {
            return bad(format!("target_ber must lie in (0, 0.5), got {}", self.target_ber));
        }
        if self.method != Method::Analytic && self.trials == 0 {
            return bad("Monte Carlo needs trials >= 1".into());
        }
        if let Err(e) = self.lt().distribution() {
            return bad(e.to_string());
        }
        if !(self.lt_epsilon >= 0.0) {
            return bad(format!("lt_epsilon must be non-negative, got {}", self.lt_epsilon));
        }
        if self.coherence_len < 2 {
            return bad(format!("coherence_len must be at least 2, got {}", self.coherence_len));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }

    /// SHA-256 of the resolved configuration, excluding the output path and
    /// worker count, which do not change results.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        c.workers = None;
        let json = serde_json::to_string(&c).expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
