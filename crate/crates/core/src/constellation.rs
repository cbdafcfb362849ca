//! Constellation maps for 16-DPSK and 16-DAPSK and differential encoding.
//!
//! Labels are stored as `[b0, b1, b2, b3]`. For 16-DPSK the label of the
//! phase difference `m·π/8` is a Gray cycle. For 16-DAPSK `b0` selects a ring
//! change and `b1 b2 b3` label the phase difference `m·π/4`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::wrap_angle;

/// A single bit, `0` or `1`.
pub type Bit = u8;

/// Complex baseband sample.
pub type ComplexSample = Complex64;

/// Sequence of transmitted or received complex samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolStream {
    pub samples: Vec<ComplexSample>,
}

impl SymbolStream {
    pub fn new(samples: Vec<ComplexSample>) -> Self {
        SymbolStream { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of `|s|²` over the stream.
    pub fn mean_energy(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Per-bit reliability information for an M-PSK Gray labelling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRanking<const B: usize> {
    /// Index of the nearest constellation angle.
    pub nearest: usize,
    /// Bits of the nearest angle's label.
    pub values: [Bit; B],
    /// Distance from the observed angle to the nearest angle whose label
    /// differs in that bit.
    pub distances: [f64; B],
}

impl<const B: usize> PhaseRanking<B> {
    /// Bit indices sorted from most to least reliable. Equal distances are
    /// broken towards the lower index.
    pub fn order(&self) -> [usize; B] {
        let mut idx = [0usize; B];
        for (i, v) in idx.iter_mut().enumerate() {
            *v = i;
        }
        idx.sort_by(|&a, &b| self.distances[b].total_cmp(&self.distances[a]).then(a.cmp(&b)));
        idx
    }
}

/// Angle of constellation point `m` out of `n`, in (−π, π].
pub(crate) fn psk_angle(m: usize, n: usize) -> f64 {
    let step = 2.0 * PI / n as f64;
    if 2 * m <= n {
        m as f64 * step
    } else {
        -((n - m) as f64) * step
    }
}

/// Reliability of each bit of an `N`-point PSK labelling at angle `psi`.
pub(crate) fn rank_psk<const N: usize, const B: usize>(
    psi: f64,
    labels: &[[Bit; B]; N],
) -> PhaseRanking<B> {
    let step = 2.0 * PI / N as f64;
    let nearest = ((psi / step).round() as i64).rem_euclid(N as i64) as usize;
    let values = labels[nearest];
    let mut distances = [f64::INFINITY; B];
    for (m, lab) in labels.iter().enumerate() {
        let d = wrap_angle(psi - psk_angle(m, N)).abs();
        for i in 0..B {
            if lab[i] != values[i] && d < distances[i] {
                distances[i] = d;
            }
        }
    }
    PhaseRanking {
        nearest,
        values,
        distances,
    }
}

fn bits_to_index<const B: usize>(bits: &[Bit]) -> [Bit; B] {
    let mut out = [0; B];
    out.copy_from_slice(bits);
    out
}

fn check_bits(bits: &[Bit]) -> Result<()> {
    if bits.len() % 4 != 0 {
        return Err(Error::BitCountNotMultipleOf4(bits.len()));
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidParameter(format!("bit value {b} is not 0 or 1")));
    }
    Ok(())
}

const DPSK_LABELS: [[Bit; 4]; 16] = [
    [0, 0, 0, 0],
    [1, 0, 0, 0],
    [1, 0, 0, 1],
    [1, 0, 1, 1],
    [1, 0, 1, 0],
    [1, 1, 1, 0],
    [1, 1, 1, 1],
    [1, 1, 0, 1],
    [1, 1, 0, 0],
    [0, 1, 0, 0],
    [0, 1, 0, 1],
    [0, 1, 1, 1],
    [0, 1, 1, 0],
    [0, 0, 1, 0],
    [0, 0, 1, 1],
    [0, 0, 0, 1],
];

const DAPSK_PHASE_LABELS: [[Bit; 3]; 8] = [
    [0, 0, 0],
    [0, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
    [1, 0, 1],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
];

/// Gray labelling of the sixteen 16-DPSK phase differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpskMapping {
    labels: [[Bit; 4]; 16],
}

impl Default for DpskMapping {
    fn default() -> Self {
        Self::canonical()
    }
}

impl DpskMapping {
    /// The labelling used throughout the crate.
    ///
    /// Seen from a phase difference just above zero, the nearest angle with
    /// a different `b0` is `π/8`, with a different `b3` is `−π/8`, `b2` is
    /// `−π/4` and `b1` is `−π/2`. Among the Gray cycles with that property
    /// this is the one whose 2- and 3-bit decision arcs are the same for
    /// every transmitted angle.
    pub fn canonical() -> Self {
        DpskMapping {
            labels: DPSK_LABELS,
        }
    }

    /// Builds a mapping from an arbitrary table, checking that it is a Gray
    /// cycle over all sixteen labels.
    pub fn from_labels(labels: [[Bit; 4]; 16]) -> Result<Self> {
        let mut seen = [false; 16];
        for (m, l) in labels.iter().enumerate() {
            if l.iter().any(|&b| b > 1) {
                return Err(Error::InvalidParameter("label bits must be 0 or 1".into()));
            }
            let v = label_value(l);
            if seen[v] {
                return Err(Error::InvalidParameter(format!("label {l:?} repeated")));
            }
            seen[v] = true;
            let next = &labels[(m + 1) % 16];
            let diff: u32 = l.iter().zip(next).map(|(a, b)| (a ^ b) as u32).sum();
            if diff != 1 {
                return Err(Error::InvalidParameter(format!(
                    "labels {m} and {} are not Gray neighbours",
                    (m + 1) % 16
                )));
            }
        }
        Ok(DpskMapping { labels })
    }

    pub fn labels(&self) -> &[[Bit; 4]; 16] {
        &self.labels
    }

    /// Label of phase difference `m·π/8`.
    pub fn label(&self, m: usize) -> [Bit; 4] {
        self.labels[m % 16]
    }

    /// Index `m` whose label equals `label`.
    pub fn index_of(&self, label: &[Bit; 4]) -> usize {
        self.labels
            .iter()
            .position(|l| l == label)
            .expect("every 4-bit label is present")
    }

    /// Phase difference for index `m`, in (−π, π].
    pub fn angle(m: usize) -> f64 {
        psk_angle(m % 16, 16)
    }

    /// Reliability ranking of the four bits at phase difference `phi`.
    pub fn rank(&self, phi: f64) -> PhaseRanking<4> {
        rank_psk(phi, &self.labels)
    }
}

fn label_value(l: &[Bit]) -> usize {
    l.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum()
}

/// 16-DAPSK constellation: two rings of eight phases each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DapskMapping {
    ring_ratio: f64,
    inner: f64,
    outer: f64,
    phase_labels: [[Bit; 3]; 8],
}

impl DapskMapping {
    /// Constellation with ring ratio `R = A2/A1` normalised to unit mean
    /// symbol energy.
    pub fn new(ring_ratio: f64) -> Result<Self> {
        if !(ring_ratio > 1.0) || !ring_ratio.is_finite() {
            return Err(Error::InvalidRingRatio(ring_ratio));
        }
        let inner = (2.0 / (1.0 + ring_ratio * ring_ratio)).sqrt();
        Ok(DapskMapping {
            ring_ratio,
            inner,
            outer: ring_ratio * inner,
            phase_labels: DAPSK_PHASE_LABELS,
        })
    }

    pub fn ring_ratio(&self) -> f64 {
        self.ring_ratio
    }

    /// Inner radius `A1`.
    pub fn inner_radius(&self) -> f64 {
        self.inner
    }

    /// Outer radius `A2`.
    pub fn outer_radius(&self) -> f64 {
        self.outer
    }

    /// `b1 b2 b3` label of phase difference `m·π/4`.
    pub fn phase_label(&self, m: usize) -> [Bit; 3] {
        self.phase_labels[m % 8]
    }

    pub fn phase_labels(&self) -> &[[Bit; 3]; 8] {
        &self.phase_labels
    }

    /// Index whose phase label equals `label`.
    pub fn phase_index_of(&self, label: &[Bit; 3]) -> usize {
        self.phase_labels
            .iter()
            .position(|l| l == label)
            .expect("every 3-bit label is present")
    }

    /// Phase difference for index `m`, in (−π, π].
    pub fn angle(m: usize) -> f64 {
        psk_angle(m % 8, 8)
    }

    /// Reliability ranking of `b1 b2 b3` at phase difference `psi`. Index 0
    /// of the result refers to `b1`.
    pub fn rank_phase(&self, psi: f64) -> PhaseRanking<3> {
        rank_psk(psi, &self.phase_labels)
    }

    /// High-SNR amplitude threshold `Δ₀ = 2/(1+R)`.
    pub fn delta0_estimate(&self) -> f64 {
        2.0 / (1.0 + self.ring_ratio)
    }
}

/// Differentially encodes `bits` four at a time. The stream starts with the
/// reference symbol `1`, so its length is `bits.len()/4 + 1`.
pub fn dpsk_encode(bits: &[Bit], mapping: &DpskMapping) -> Result<SymbolStream> {
    check_bits(bits)?;
    let mut acc = 0usize;
    let mut samples = Vec::with_capacity(bits.len() / 4 + 1);
    samples.push(Complex64::new(1.0, 0.0));
    for chunk in bits.chunks(4) {
        acc = (acc + mapping.index_of(&bits_to_index::<4>(chunk))) % 16;
        samples.push(Complex64::from_polar(1.0, acc as f64 * PI / 8.0));
    }
    Ok(SymbolStream::new(samples))
}

/// Hard differential detection: each phase difference is mapped to the
/// label of the nearest constellation angle.
pub fn dpsk_decode(stream: &SymbolStream, mapping: &DpskMapping) -> Vec<Bit> {
    let mut out = Vec::with_capacity(4 * stream.len().saturating_sub(1));
    for w in stream.samples.windows(2) {
        let phi = (w[1] * w[0].conj()).arg();
        out.extend_from_slice(&mapping.rank(phi).values);
    }
    out
}

/// 16-DAPSK encoding starting from an inner-ring reference symbol.
pub fn dapsk_encode(bits: &[Bit], mapping: &DapskMapping) -> Result<SymbolStream> {
    dapsk_encode_with_reference(bits, mapping, false)
}

/// 16-DAPSK encoding with the reference symbol on the outer ring when
/// `outer_reference` is set. `b0 = 1` switches ring, `b1 b2 b3` advance
/// the phase.
pub fn dapsk_encode_with_reference(
    bits: &[Bit],
    mapping: &DapskMapping,
    outer_reference: bool,
) -> Result<SymbolStream> {
    check_bits(bits)?;
    let mut outer = outer_reference;
    let mut acc = 0usize;
    let radius = |outer: bool| if outer { mapping.outer } else { mapping.inner };
    let mut samples = Vec::with_capacity(bits.len() / 4 + 1);
    samples.push(Complex64::new(radius(outer), 0.0));
    for chunk in bits.chunks(4) {
        if chunk[0] == 1 {
            outer = !outer;
        }
        acc = (acc + mapping.phase_index_of(&bits_to_index::<3>(&chunk[1..]))) % 8;
        samples.push(Complex64::from_polar(radius(outer), acc as f64 * PI / 4.0));
    }
    Ok(SymbolStream::new(samples))
}

/// Hard 16-DAPSK detection: ring change when `min(r, 1/r) < Δ₀`, phase bits
/// from the nearest angle.
pub fn dapsk_decode(stream: &SymbolStream, mapping: &DapskMapping) -> Vec<Bit> {
    let d0 = mapping.delta0_estimate();
    let mut out = Vec::with_capacity(4 * stream.len().saturating_sub(1));
    for w in stream.samples.windows(2) {
        let r = w[1].norm() / w[0].norm();
        let rp = r.min(1.0 / r);
        let psi = (w[1] * w[0].conj()).arg();
        out.push(Bit::from(rp < d0));
        out.extend_from_slice(&mapping.rank_phase(psi).values);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    // All Gray cycles through the 16 labels starting at 0000 for which, just
    // above angle 0, the nearest angle with a different b0 is +π/8, b3 is
    // −π/8, b2 is −π/4 and b1 is −π/2.
    fn constrained_cycles() -> Vec<[[Bit; 4]; 16]> {
        fn rec(path: &mut Vec<usize>, used: &mut [bool; 16], out: &mut Vec<Vec<usize>>) {
            if path.len() == 16 {
                if (path[15] ^ path[0]).count_ones() == 1 {
                    out.push(path.clone());
                }
                return;
            }
            let last = *path.last().unwrap();
            for bit in 0..4 {
                let n = last ^ (1 << bit);
                if !used[n] {
                    used[n] = true;
                    path.push(n);
                    rec(path, used, out);
                    path.pop();
                    used[n] = false;
                }
            }
        }
        let mut all = Vec::new();
        let mut used = [false; 16];
        used[0] = true;
        rec(&mut vec![0], &mut used, &mut all);
        assert_eq!(all.len(), 2688);
        let want = [PI / 8.0, -PI / 2.0, -PI / 4.0, -PI / 8.0];
        let phi = 1e-3;
        all.into_iter()
            .filter(|c| {
                (0..4).all(|i| {
                    let m = (0..16)
                        .filter(|&m| (c[m] >> i) & 1 != (c[0] >> i) & 1)
                        .min_by(|&a, &b| {
                            let da = wrap_angle(phi - a as f64 * PI / 8.0).abs();
                            let db = wrap_angle(phi - b as f64 * PI / 8.0).abs();
                            da.total_cmp(&db)
                        })
                        .unwrap();
                    (wrap_angle(m as f64 * PI / 8.0) - want[i]).abs() < 1e-9
                })
            })
            .map(|c| {
                let mut t = [[0; 4]; 16];
                for (m, v) in c.iter().enumerate() {
                    for i in 0..4 {
                        t[m][i] = ((v >> i) & 1) as Bit;
                    }
                }
                t
            })
            .collect()
    }

    #[test]
    fn canonical_mapping_is_a_constrained_gray_cycle() {
        let cycles = constrained_cycles();
        assert_eq!(cycles.len(), 4);
        assert!(cycles.contains(&DPSK_LABELS));
        assert!(DpskMapping::from_labels(DPSK_LABELS).is_ok());
    }

    #[test]
    fn from_labels_rejects_non_gray() {
        let mut t = DPSK_LABELS;
        t.swap(3, 4);
        assert!(DpskMapping::from_labels(t).is_err());
    }

    #[test]
    fn dapsk_phase_labels_flip_as_expected() {
        let m = DapskMapping::new(2.0).unwrap();
        let l = |i| m.phase_label(i);
        let diff = |a: [Bit; 3], b: [Bit; 3]| (0..3).filter(|&i| a[i] != b[i]).collect::<Vec<_>>();
        assert_eq!(diff(l(0), l(1)), vec![2]);
        assert_eq!(diff(l(0), l(7)), vec![1]);
        assert_eq!(diff(l(6), l(7)), vec![0]);
        for i in 0..8 {
            assert_eq!(diff(l(i), l(i + 1)).len(), 1);
        }
    }

    #[test]
    fn radii_normalised() {
        for r in [1.5, 2.0, 3.0] {
            let m = DapskMapping::new(r).unwrap();
            let e = 0.5 * (m.inner_radius().powi(2) + m.outer_radius().powi(2));
            assert!((e - 1.0).abs() < 1e-14);
            assert!((m.outer_radius() / m.inner_radius() - r).abs() < 1e-14);
        }
        assert!(DapskMapping::new(1.0).is_err());
        assert!(DapskMapping::new(f64::NAN).is_err());
    }

    #[test]
    fn round_trip_noiseless() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let bits: Vec<Bit> = (0..4000).map(|_| rng.gen_range(0..2)).collect();
        let dm = DpskMapping::canonical();
        let s = dpsk_encode(&bits, &dm).unwrap();
        assert_eq!(s.len(), 1001);
        assert_eq!(dpsk_decode(&s, &dm), bits);
        let am = DapskMapping::new(2.0).unwrap();
        for outer in [false, true] {
            let s = dapsk_encode_with_reference(&bits, &am, outer).unwrap();
            assert_eq!(dapsk_decode(&s, &am), bits);
        }
    }

    #[test]
    fn encode_rejects_partial_symbol() {
        let dm = DpskMapping::canonical();
        assert_eq!(dpsk_encode(&[0, 1, 0], &dm), Err(Error::BitCountNotMultipleOf4(3)));
        let am = DapskMapping::new(2.0).unwrap();
        assert!(dapsk_encode(&[1; 7], &am).is_err());
    }

    #[test]
    fn ranking_ties_prefer_lower_index() {
        let r = DpskMapping::canonical().rank(0.0);
        assert_eq!(r.distances[0], r.distances[3]);
        assert_eq!(r.order()[2..], [0, 3]);
    }
}
