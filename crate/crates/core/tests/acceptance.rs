//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Failing criteria are reported but do not fail `cargo test`; set
//! `ADM_ACCEPTANCE_STRICT=1` to turn any FAIL into a non-zero exit.

use std::f64::consts::PI;
use std::time::Instant;

use adm_core::analysis::{
    dpsk_ber, monte_carlo_ber, operating_regions, ring_ratio_study, spectral_efficiency, McEstimate,
    McPlan, OperatingRegions,
};
use adm_core::channel::{
    apply_awgn, apply_rayleigh_block, db_to_linear, linear_to_db, sigma2_from_snr, FadingSpec, NoiseSpec,
};
use adm_core::dapsk_demod::{bit_llrs_at, numeric_delta0, rule_ranking, simple_verdict, threshold_set, Band};
use adm_core::dpsk_demod::{demod_beta, exact_bit_llrs, DpskObservation};
use adm_core::rateless::{
    end_to_end_run, lt_encode, peel_decode, random_message, BetaPolicy, ChannelModel, DecodeOutcome, LtParams,
    PipelineConfig,
};
use adm_core::{ComplexSample, DapskMapping, DpskMapping, Modulation, SymbolStream, Variant};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

const DAPSK_R2: Modulation = Modulation::Dapsk { ring_ratio: 2.0 };

fn order_by_magnitude(llr: &[f64; 4]) -> [usize; 4] {
    let mut o = [0usize, 1, 2, 3];
    o.sort_by(|&a, &b| llr[b].abs().total_cmp(&llr[a].abs()).then(a.cmp(&b)));
    o
}

/// SNR (dB) where a log-BER curve sampled on `grid` crosses `target`,
/// by linear interpolation of `ln BER` in dB.
fn crossing(grid: &[f64], ber: &[f64], target: f64) -> Option<f64> {
    for i in 0..grid.len() - 1 {
        let (a, b) = (ber[i], ber[i + 1]);
        if a >= target && b < target && b > 0.0 {
            let t = (a.ln() - target.ln()) / (a.ln() - b.ln());
            return Some(grid[i] + t * (grid[i + 1] - grid[i]));
        }
    }
    None
}

fn threshold_table() -> Verdict {
    let expected = [
        [0.818, 0.745, 0.509, 0.364],
        [1.0, 0.910, 0.179, 0.0],
        [1.0, 1.0, 0.0, 0.0],
    ];
    let mut ok = true;
    let mut rows = Vec::new();
    for (beta, want) in [3usize, 2, 1].iter().zip(expected) {
        let t = threshold_set(*beta, 2.0).unwrap();
        let got = t.delta.map(|x| (x * 1000.0).round() / 1000.0);
        ok &= got.iter().zip(want).all(|(g, w)| (g - w).abs() < 1e-9);
        rows.push(format!("beta={beta}: {got:?}"));
    }
    verdict(ok, rows.join("; "))
}

fn delta0() -> Verdict {
    let ratios = [1.5, 1.75, 2.0, 2.25, 2.5];
    let mut ok = true;
    let mut parts = Vec::new();
    for snr in [25.0, 30.0, 20.0] {
        let s2 = sigma2_from_snr(db_to_linear(snr));
        let mut worst: f64 = 0.0;
        for &r in &ratios {
            let root = numeric_delta0(r, s2).unwrap();
            worst = worst.max((2.0 / (1.0 + r) - root).abs() / root);
        }
        let root2 = numeric_delta0(2.0, s2).unwrap();
        let in_bracket = (0.67..=0.69).contains(&root2);
        if snr == 25.0 {
            ok &= worst <= 0.02 && in_bracket;
        }
        parts.push(format!(
            "{snr} dB: worst rel. error {:.2}%, R=2 root {root2:.4}{}",
            100.0 * worst,
            if snr == 25.0 { "" } else { " (info)" }
        ));
    }
    verdict(ok, parts.join("; "))
}

fn simplified_vs_optimal() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();

    // β = 1, 2: both detectors see the same simulated pairs; the difference
    // must stay inside the narrower 95% interval.
    let grid = [6.0, 8.0, 10.0, 12.0, 14.0, 16.0];
    let mut worst_sep: f64 = 0.0;
    for &snr in &grid {
        let s = monte_carlo_ber(DAPSK_R2, Variant::Simple, &[1, 2], snr, &McPlan::fixed(1_000_000, 101)).unwrap();
        let r = monte_carlo_ber(DAPSK_R2, Variant::Rule, &[1, 2], snr, &McPlan::fixed(1_000_000, 101)).unwrap();
        for (a, b) in s.iter().zip(&r) {
            let sep = (a.ber - b.ber).abs() / a.half_width.min(b.half_width);
            worst_sep = worst_sep.max(sep);
            if sep > 1.0 {
                ok = false;
                parts.push(format!(
                    "beta={} {snr} dB: simple {:.3e}±{:.1e} vs rule {:.3e}±{:.1e}",
                    a.beta, a.ber, a.half_width, b.ber, b.half_width
                ));
            }
        }
    }
    parts.push(format!("beta=1,2 worst |diff|/half-width = {worst_sep:.2}"));

    // β = 3: loss at BER 1e-4.
    let grid3: Vec<f64> = (0..9).map(|i| 19.0 + 0.5 * i as f64).collect();
    let ber3 = |variant: Variant, pairs: u64, g: &[f64]| -> Vec<f64> {
        g.iter()
            .map(|&snr| monte_carlo_ber(DAPSK_R2, variant, &[3], snr, &McPlan::fixed(pairs, 303)).unwrap()[0].ber)
            .collect()
    };
    let simple = ber3(Variant::Simple, 10_000_000, &grid3);
    let rule = ber3(Variant::Rule, 10_000_000, &grid3);
    match (crossing(&grid3, &simple, 1e-4), crossing(&grid3, &rule, 1e-4)) {
        (Some(s), Some(r)) => {
            let loss = s - r;
            ok &= (0.3..=0.9).contains(&loss);
            parts.push(format!("beta=3 at 1e-4: simple {s:.2} dB, rule {r:.2} dB, loss {loss:.2} dB"));
        }
        _ => {
            ok = false;
            parts.push("beta=3: 1e-4 not bracketed by the SNR grid".into());
        }
    }
    let grid_exact: Vec<f64> = (0..7).map(|i| 18.0 + 0.5 * i as f64).collect();
    let exact = ber3(Variant::Exact, 2_000_000, &grid_exact);
    if let Some(x) = crossing(&grid_exact, &exact, 1e-4) {
        parts.push(format!("exact-LLR beta=3 reaches 1e-4 at {x:.2} dB (info)"));
    }
    verdict(ok, parts.join("; "))
}

fn dpsk_analytic_vs_mc() -> Verdict {
    let grid: Vec<f64> = (0..11).map(|i| 10.0 + 2.0 * i as f64).collect();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut notes = Vec::new();
    for &snr in &grid {
        let g = db_to_linear(snr);
        let analytic: Vec<f64> = (1..=4).map(|b| dpsk_ber(b, g).unwrap()).collect();
        if !analytic.windows(2).all(|w| w[0] < w[1]) {
            ok = false;
            notes.push(format!("ordering violated at {snr} dB: {analytic:?}"));
        }
        let betas: Vec<usize> = (1..=4).filter(|&b| analytic[b - 1] >= 1e-5).collect();
        if betas.is_empty() {
            continue;
        }
        let plan = McPlan {
            seed: 404,
            min_pairs: 10_000_000,
            max_pairs: 50_000_000,
            min_errors: 1000,
        };
        let est: Vec<McEstimate> = monte_carlo_ber(Modulation::Dpsk, Variant::Rule, &betas, snr, &plan).unwrap();
        for e in est {
            let a = analytic[e.beta - 1];
            let rel = (a - e.ber).abs() / e.ber;
            compared += 1;
            worst = worst.max(rel);
            if rel > 0.15 {
                ok = false;
                notes.push(format!("beta={} {snr} dB: analytic {a:.3e} vs MC {:.3e}", e.beta, e.ber));
            }
        }
    }
    notes.insert(0, format!("{compared} points with BER >= 1e-5, worst relative gap {:.1}%", 100.0 * worst));
    verdict(ok, notes.join("; "))
}

fn se_grid() -> Vec<f64> {
    (0..=1000).map(|i| i as f64 * 0.05).collect()
}

fn se_crossover(dpsk: &OperatingRegions, dapsk: &OperatingRegions) -> Verdict {
    let grid = se_grid();
    let a: Vec<f64> = grid.iter().map(|&s| spectral_efficiency(dpsk, s)).collect();
    let b: Vec<f64> = grid.iter().map(|&s| spectral_efficiency(dapsk, s)).collect();
    // First point where DAPSK overtakes DPSK.
    let Some(i) = (0..grid.len()).find(|&i| b[i] > a[i]) else {
        return verdict(false, "DAPSK never exceeds DPSK on 0..50 dB");
    };
    let se_cross = if i == 0 {
        a[0]
    } else {
        let (d0, d1) = (a[i - 1] - b[i - 1], a[i] - b[i]);
        let t = d0 / (d0 - d1);
        a[i - 1] + t * (a[i] - a[i - 1])
    };
    let after_ok = (i..grid.len()).all(|j| b[j] >= a[j] - 1e-12 || a[j] > 3.99);
    let ok = (2.0..=3.0).contains(&se_cross) && after_ok && i > 0;
    verdict(
        ok,
        format!(
            "crossover at {:.2} dB average SNR, {:.2} bits/symbol; DAPSK stays ahead afterwards: {after_ok}",
            grid[i], se_cross
        ),
    )
}

fn ring_study() -> Verdict {
    let ratios = [1.6, 1.8, 2.0, 2.2, 2.4];
    let t = ring_ratio_study(&[1, 2, 3, 4], &ratios, 20.0).unwrap();
    let row = |beta: usize| -> Vec<f64> { t.iter().filter(|e| e.beta == beta).map(|e| e.ber).collect() };
    let mut ok = t.iter().all(|e| (0.0..=0.5).contains(&e.ber));
    let mut parts = Vec::new();
    let b4 = row(4);
    let min_at_2 = b4.iter().all(|&x| b4[2] <= x);
    ok &= min_at_2;
    parts.push(format!("beta=4 {:?} minimum at R=2: {min_at_2}", b4.map_fmt()));
    for beta in 1..=3 {
        let r = row(beta);
        let mono = r.windows(2).all(|w| w[0] <= w[1]);
        ok &= mono;
        parts.push(format!("beta={beta} {:?} non-decreasing: {mono}", r.map_fmt()));
    }
    verdict(ok, parts.join("; "))
}

trait MapFmt {
    fn map_fmt(&self) -> Vec<String>;
}

impl MapFmt for Vec<f64> {
    fn map_fmt(&self) -> Vec<String> {
        self.iter().map(|x| format!("{x:.3e}")).collect()
    }
}

fn llr_symmetry() -> (bool, String) {
    let m = DapskMapping::new(2.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut state: u64 = 0x2545_F491_4F6C_DD1D;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..10_000 {
        let r = 0.02 + 0.98 * next();
        let psi = -PI + 2.0 * PI * next();
        let s2 = 10f64.powf(-3.0 + 2.0 * next());
        let a = bit_llrs_at(r, psi, s2, &m);
        let b = bit_llrs_at(1.0 / r, psi, s2, &m);
        for i in 0..4 {
            // Relative to |LLR|, with a floor of 1 for LLRs that vanish by symmetry.
            worst = worst.max((a[i] - b[i]).abs() / a[i].abs().max(b[i].abs()).max(1.0));
        }
    }
    (worst <= 1e-9, format!("worst relative difference {worst:.1e} over 1e4 points"))
}

fn dpsk_nesting() -> (bool, String) {
    let m = DpskMapping::canonical();
    let mut bad = 0;
    let n = 4096;
    for variant in [Variant::Rule, Variant::Exact] {
        for s2 in [0.1, 0.02] {
            for i in 0..n {
                let phi = -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64;
                let obs = DpskObservation::new(ComplexSample::new(1.0, 0.0), ComplexSample::from_polar(1.0, phi), s2);
                let masks: Vec<[bool; 4]> = (1..=4).map(|b| demod_beta(&obs, b, &m, variant).unwrap().kept_mask()).collect();
                for w in masks.windows(2) {
                    if (0..4).any(|k| w[0][k] && !w[1][k]) {
                        bad += 1;
                    }
                }
            }
        }
    }
    (bad == 0, format!("{bad} nesting violations over 16384 observations"))
}

fn partitions(dpsk: &OperatingRegions, dapsk: &OperatingRegions) -> (bool, String) {
    let mut ok = true;
    // Threshold ordering and band layout for R on a 100-point grid in (1, 3].
    for i in 1..=100 {
        let r = 1.0 + 0.02 * i as f64;
        for beta in 1..=3 {
            let t = threshold_set(beta, r).unwrap();
            let [d1, d2, d3, d4] = t.delta;
            ok &= 0.0 <= d4 && d4 <= d3 && d3 <= t.delta0 && t.delta0 <= d2 && d2 <= d1 && d1 <= 1.0;
            // Walking r' upwards visits reliable, transition, unreliable,
            // transition, reliable, skipping empty bands.
            let rank = |b: Band| match b {
                Band::B0Reliable => 0,
                Band::Transition => 1,
                Band::B0Unreliable => 2,
            };
            let seq: Vec<i32> = (1..=2000).map(|k| rank(t.band(k as f64 / 2000.0))).collect();
            let peak = seq.iter().position(|&x| x == *seq.iter().max().unwrap()).unwrap();
            ok &= seq[..=peak].windows(2).all(|w| w[0] <= w[1]) && seq[peak..].windows(2).all(|w| w[0] >= w[1]);
            for k in 1..=2000 {
                let x = k as f64 / 2000.0;
                let expect = if x > d1 || x <= d4 {
                    Band::B0Reliable
                } else if x > d2 || x <= d3 {
                    Band::Transition
                } else {
                    Band::B0Unreliable
                };
                ok &= t.band(x) == expect;
            }
        }
    }
    // Operating regions tile the SNR axis.
    for reg in [dpsk, dapsk] {
        ok &= reg.breakpoints.windows(2).all(|w| w[0] <= w[1]);
        for i in 0..=600 {
            let g = db_to_linear(-10.0 + 0.1 * i as f64);
            let beta = reg.beta_for(g);
            let inside = (1..=4).filter(|&b| {
                let (lo, hi) = reg.region(b);
                g >= lo && g < hi
            });
            let count = inside.clone().count();
            ok &= if beta == 0 { count == 0 && g < reg.breakpoints[0] } else { count == 1 && inside.last() == Some(beta) };
        }
        ok &= reg.residuals.iter().all(|&r| r < 1e-3);
    }
    (ok, "threshold ordering, band layout and region tiling".into())
}

fn dpsk_rank_agreement() -> (bool, String) {
    let m = DpskMapping::canonical();
    let n = 4096;
    let mut agree = [0usize; 3];
    for (k, s2) in [0.1, 0.05, 0.02].into_iter().enumerate() {
        for i in 0..n {
            let phi = -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64;
            let obs = DpskObservation::new(ComplexSample::new(1.0, 0.0), ComplexSample::from_polar(1.0, phi), s2);
            agree[k] += usize::from(order_by_magnitude(&exact_bit_llrs(&obs, &m)) == m.rank(phi).order());
        }
    }
    let frac = agree.map(|a| a as f64 / n as f64);
    let ok = frac[2] >= 0.999 && frac[0] <= frac[1] && frac[1] <= frac[2];
    (
        ok,
        format!(
            "agreement {:.4} at sigma2=0.02 (0.05: {:.4}, 0.1: {:.4})",
            frac[2], frac[1], frac[0]
        ),
    )
}

fn dapsk_rank_agreement() -> (bool, String) {
    let m = DapskMapping::new(2.0).unwrap();
    let s2 = sigma2_from_snr(db_to_linear(25.0));
    let n = 256;
    let mut full = 0;
    let mut kept = [0usize; 3];
    let mut simple_kept = [0usize; 3];
    let sets: Vec<_> = (1..=3).map(|b| threshold_set(b, 2.0).unwrap()).collect();
    for i in 0..n {
        let rp = (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let psi = -PI + (j as f64 + 0.5) * 2.0 * PI / n as f64;
            let exact = order_by_magnitude(&bit_llrs_at(rp, psi, s2, &m));
            let (rule, _) = rule_ranking(rp, psi, &m);
            full += usize::from(exact == rule);
            for b in 1..=3 {
                let mut x = exact[..b].to_vec();
                let mut y = rule[..b].to_vec();
                x.sort_unstable();
                y.sort_unstable();
                kept[b - 1] += usize::from(x == y);
                let mut mask = [false; 4];
                for &k in &rule[..b] {
                    mask[k] = true;
                }
                let s = simple_verdict(rp, psi, b, Some(&sets[b - 1]), &m).unwrap().kept_mask();
                simple_kept[b - 1] += usize::from(s == mask);
            }
        }
    }
    let t = (n * n) as f64;
    let full_frac = full as f64 / t;
    (
        full_frac >= 0.95,
        format!(
            "full-order agreement {:.4}; kept-set agreement per beta {:?} (info); simplified vs rule kept sets {:?} (info)",
            full_frac,
            kept.map(|k| (k as f64 / t * 1e4).round() / 1e4),
            simple_kept.map(|k| (k as f64 / t * 1e4).round() / 1e4)
        ),
    )
}

fn channel_bookkeeping() -> (bool, String) {
    let n = 1_000_000;
    let tx = SymbolStream::new(vec![ComplexSample::new(1.0, 0.0); n]);
    let mut worst: f64 = 0.0;
    for (k, snr_db) in [0.0, 10.0, 20.0].into_iter().enumerate() {
        let rx = apply_awgn(&tx, &NoiseSpec::new(snr_db), k as u64);
        // The stream is one rotated constant plus noise.
        let mean = rx.samples.iter().sum::<ComplexSample>() / n as f64;
        let n0 = rx.samples.iter().map(|y| (y - mean).norm_sqr()).sum::<f64>() / n as f64;
        let measured = linear_to_db(mean.norm_sqr() / n0);
        worst = worst.max((db_to_linear(measured) / db_to_linear(snr_db) - 1.0).abs());
    }
    let spec = FadingSpec::new(15.0, 2).unwrap();
    let faded = apply_rayleigh_block(&SymbolStream::new(vec![ComplexSample::new(1.0, 0.0); n]), &spec, 9).unwrap();
    let mean_snr = faded.block_snr.iter().sum::<f64>() / faded.block_snr.len() as f64;
    let fade_err = (mean_snr / db_to_linear(15.0) - 1.0).abs();
    (
        worst < 0.01 && fade_err < 0.01,
        format!(
            "AWGN Es/N0 worst relative error {:.2}%, Rayleigh mean block SNR error {:.2}%",
            100.0 * worst,
            100.0 * fade_err
        ),
    )
}

fn lt_success() -> (bool, String) {
    let p = LtParams::new(1000);
    let dist = p.distribution().unwrap();
    let n = (1.15 * 1000.0f64).ceil() as usize;
    let trials = 500;
    let mut ok = 0;
    let mut identity = true;
    for t in 0..trials as u64 {
        let msg = random_message(1000, t);
        let seed = 1000 + t;
        let enc = lt_encode(&msg, n, seed, &dist).unwrap();
        let rx: Vec<(u64, u8)> = enc.iter().map(|e| (e.index, e.value)).collect();
        if let DecodeOutcome::Success(m) = peel_decode(&rx, seed, &dist).unwrap() {
            ok += 1;
            let again = lt_encode(&m, n, seed, &dist).unwrap();
            identity &= again.iter().zip(&rx).all(|(e, &(_, v))| e.value == v);
        }
    }
    let rate = ok as f64 / trials as f64;
    (
        rate >= 0.99 && identity,
        format!("success {rate:.3} over {trials} trials at (1+0.15)k, re-encoding identity {identity}"),
    )
}

fn property_suites(dpsk: &OperatingRegions, dapsk: &OperatingRegions) -> Verdict {
    let items: Vec<(&str, (bool, String))> = vec![
        ("LLR r<->1/r symmetry", llr_symmetry()),
        ("DPSK kept-set nesting", dpsk_nesting()),
        ("band and region partitions", partitions(dpsk, dapsk)),
        ("DPSK exact-vs-rule ranking", dpsk_rank_agreement()),
        ("DAPSK exact-vs-rule ranking", dapsk_rank_agreement()),
        ("channel SNR bookkeeping", channel_bookkeeping()),
        ("LT decode success", lt_success()),
    ];
    let mut ok = true;
    for (name, (pass, detail)) in &items {
        ok &= pass;
        println!("    {} {name}: {detail}", if *pass { "ok  " } else { "FAIL" });
    }
    let failed: Vec<&str> = items.iter().filter(|(_, (p, _))| !p).map(|(n, _)| *n).collect();
    verdict(
        ok,
        if failed.is_empty() {
            "all items pass".to_string()
        } else {
            format!("failing items: {}", failed.join(", "))
        },
    )
}

fn end_to_end(dpsk: &OperatingRegions) -> Verdict {
    let k = 100_000;
    let cfg = PipelineConfig {
        modulation: Modulation::Dpsk,
        variant: Variant::Rule,
        channel: ChannelModel::Rayleigh { avg_snr_db: 15.0 },
        policy: BetaPolicy::Adaptive(*dpsk),
        lt: LtParams::new(k),
        epsilon: 0.3,
        burst_len: 20,
        max_pairs: 10_000_000,
        seed: 505,
    };
    let rep = end_to_end_run(&random_message(k, 7), &cfg).unwrap();
    let se = spectral_efficiency(dpsk, 15.0);
    let rel = (rep.bits_per_pair - se).abs() / se;
    verdict(
        rel <= 0.10,
        format!(
            "{:.4} bits/pair over {} pairs vs spectral efficiency {:.4} ({:.1}% apart); outcome {:?}, {} decided-bit errors",
            rep.bits_per_pair,
            rep.pairs,
            se,
            100.0 * rel,
            rep.outcome,
            rep.decided_bit_errors
        ),
    )
}

fn main() {
    let start = Instant::now();
    let dpsk = operating_regions(Modulation::Dpsk, 1e-4).unwrap();
    let dapsk = operating_regions(DAPSK_R2, 1e-4).unwrap();

    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("Threshold table regression", Box::new(threshold_table)),
        ("Delta0 accuracy", Box::new(delta0)),
        ("Simplified-vs-optimal DAPSK BER", Box::new(simplified_vs_optimal)),
        ("DPSK analytic-vs-simulation", Box::new(dpsk_analytic_vs_mc)),
        ("Cross-scheme spectral efficiency", Box::new(move || se_crossover(&dpsk, &dapsk))),
        ("Ring-ratio study", Box::new(ring_study)),
        ("Property suites", Box::new(move || property_suites(&dpsk, &dapsk))),
        ("End-to-end consistency", Box::new(move || end_to_end(&dpsk))),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let t = Instant::now();
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.0}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 && std::env::var("ADM_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
