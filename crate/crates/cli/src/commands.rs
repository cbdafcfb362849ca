//! One function per subcommand. Each takes a validated configuration and
//! returns the bytes to emit.

use std::path::{Path, PathBuf};

use adm_core::analysis::{
    analytic_ber, monte_carlo_ber, operating_regions, spectral_efficiency, McPlan,
};
use adm_core::channel::db_to_linear;
use adm_core::dapsk_demod::threshold_set;
use adm_core::rateless::{
    end_to_end_run, random_message, BetaPolicy, ChannelModel, PipelineConfig,
};
use adm_core::{DapskMapping, DpskMapping, Modulation, Variant};

use crate::config::{ChannelKind, ExperimentConfig, Method, Scheme};
use crate::error::CliError;
use crate::output::{emit, write_atomic, Table};

fn ring_column(m: &Modulation) -> Option<f64> {
    m.ring_ratio()
}

/// Variant whose error rate the analytic curve describes.
fn analytic_variant(m: &Modulation) -> Variant {
    match m {
        Modulation::Dpsk => Variant::Rule,
        Modulation::Dapsk { .. } => Variant::Simple,
    }
}

pub fn ber(cfg: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let mut t = Table::new(
        &cfg.hash(),
        &["scheme", "variant", "method", "beta", "R", "snr_db", "ber", "ci", "trials"],
    )?;
    let grid = cfg.snr_grid();
    for m in cfg.modulations() {
        if matches!(cfg.method, Method::Analytic | Method::Both) {
            let v = analytic_variant(&m);
            for &beta in &cfg.betas {
                for &snr in &grid {
                    let b = analytic_ber(m, beta, db_to_linear(snr))?;
                    t.row((m.name(), v.to_string(), "analytic", beta, ring_column(&m), snr, b, None::<f64>, 0u64))?;
                }
            }
        }
        if matches!(cfg.method, Method::MonteCarlo | Method::Both) {
            let plan = McPlan::fixed(cfg.trials, cfg.seed);
            let mut rows = Vec::new();
            for &snr in &grid {
                for est in monte_carlo_ber(m, cfg.variant, &cfg.betas, snr, &plan)? {
                    rows.push((est.beta, snr, est));
                }
            }
            rows.sort_by_key(|r| r.0);
            for (beta, snr, est) in rows {
                t.row((
                    m.name(),
                    cfg.variant.to_string(),
                    "monte_carlo",
                    beta,
                    ring_column(&m),
                    snr,
                    est.ber,
                    Some(est.half_width),
                    est.pairs,
                ))?;
            }
        }
    }
    t.into_bytes()
}

pub fn thresholds(cfg: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let mut t = Table::new(
        &cfg.hash(),
        &["R", "beta", "delta1", "delta2", "delta3", "delta4", "delta0"],
    )?;
    for &r in cfg.ring_ratio_list() {
        for beta in 1..=3 {
            let s = threshold_set(beta, r)?;
            t.row((r, beta, s.delta[0], s.delta[1], s.delta[2], s.delta[3], s.delta0))?;
        }
    }
    t.into_bytes()
}

pub fn regions(cfg: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let mut t = Table::new(
        &cfg.hash(),
        &[
            "scheme", "R", "target", "gamma1", "gamma2", "gamma3", "gamma4", "gamma1_db",
            "gamma2_db", "gamma3_db", "gamma4_db",
        ],
    )?;
    for m in cfg.modulations() {
        let reg = operating_regions(m, cfg.target_ber)?;
        let g = reg.breakpoints;
        let d = reg.breakpoints_db();
        t.row((m.name(), ring_column(&m), cfg.target_ber, g[0], g[1], g[2], g[3], d[0], d[1], d[2], d[3]))?;
    }
    t.into_bytes()
}

pub fn spec_eff(cfg: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let mut t = Table::new(&cfg.hash(), &["scheme", "R", "target", "avg_snr_db", "se"])?;
    let grid = cfg.snr_grid();
    for m in cfg.modulations() {
        let reg = operating_regions(m, cfg.target_ber)?;
        for &s in &grid {
            t.row((m.name(), ring_column(&m), cfg.target_ber, s, spectral_efficiency(&reg, s)))?;
        }
    }
    t.into_bytes()
}

pub fn mapping_dump(cfg: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let mut t = Table::new(
        &cfg.hash(),
        &["scheme", "R", "angle_index", "phase_rad", "b0", "b1", "b2", "b3"],
    )?;
    for m in cfg.modulations() {
        match m {
            Modulation::Dpsk => {
                let map = DpskMapping::canonical();
                for i in 0..16 {
                    let l = map.label(i);
                    t.row(("dpsk", None::<f64>, i, DpskMapping::angle(i), l[0], l[1], l[2], l[3]))?;
                }
            }
            Modulation::Dapsk { ring_ratio } => {
                let map = DapskMapping::new(ring_ratio)?;
                for b0 in 0..2u8 {
                    for i in 0..8 {
                        let l = map.phase_label(i);
                        t.row(("dapsk", Some(ring_ratio), i, DapskMapping::angle(i), b0, l[0], l[1], l[2]))?;
                    }
                }
            }
        }
    }
    t.into_bytes()
}

/// Path of the run summary written next to the transcript.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_summary.json"))
}

pub fn e2e(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let mods = cfg.modulations();
    if cfg.scheme == Scheme::Both || mods.len() != 1 {
        return Err(CliError::Config(
            "e2e needs a single scheme and a single ring ratio".into(),
        ));
    }
    let modulation = mods[0];
    let channel = match cfg.channel {
        ChannelKind::Noiseless => ChannelModel::Noiseless,
        ChannelKind::Awgn => ChannelModel::Awgn { snr_db: cfg.snr_db },
        ChannelKind::Rayleigh => ChannelModel::Rayleigh { avg_snr_db: cfg.snr_db },
    };
    let policy = match cfg.beta {
        Some(b) => BetaPolicy::Fixed(b),
        None => BetaPolicy::Adaptive(operating_regions(modulation, cfg.target_ber)?),
    };
    let pc = PipelineConfig {
        modulation,
        variant: cfg.variant,
        channel,
        policy,
        lt: cfg.lt(),
        epsilon: cfg.lt_epsilon,
        burst_len: cfg.coherence_len,
        max_pairs: cfg.max_pairs,
        seed: cfg.seed,
    };
    let message = random_message(cfg.lt_k, cfg.seed);
    let report = end_to_end_run(&message, &pc)?;

    let hash = cfg.hash();
    let mut t = Table::new(
        &hash,
        &["pair_index", "instantaneous_snr", "beta_used", "bits_decided", "buffer_fill"],
    )?;
    for r in &report.transcript {
        t.row((r.pair_index, r.instantaneous_snr, r.beta_used, r.bits_decided, r.buffer_fill))?;
    }
    let summary = serde_json::json!({ "config_hash": hash, "report": report });
    let summary = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Runtime(e.to_string()))? + "\n";
    let out = cfg.out.as_deref().map(Path::new);
    emit(&t.into_bytes()?, out)?;
    match out {
        Some(p) => {
            write_atomic(&summary_path(p), summary.as_bytes())?;
            print!("{summary}");
        }
        None => eprint!("{summary}"),
    }
    Ok(())
}
