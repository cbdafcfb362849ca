//! Adaptive demodulation for differential 16-ary modulations.
//!
//! A receiver that cannot afford to decide all four bits of a 16-DPSK or
//! 16-DAPSK symbol pair keeps only the `β` most reliable ones and erases the
//! rest; a rateless (LT) outer code absorbs the erasures. This crate holds the
//! constellations, channel models, the per-pair demodulators, closed-form and
//! numeric error analysis, and the LT code with an end-to-end pipeline.

pub mod analysis;
pub mod channel;
pub mod constellation;
pub mod dapsk_demod;
pub mod dpsk_demod;
pub mod error;
pub mod quad;
pub mod rateless;
pub mod special;
pub mod verdict;

pub use constellation::{Bit, ComplexSample, DapskMapping, DpskMapping, SymbolStream};
pub use error::{Error, Result};
pub use verdict::{BitDecision, BitVerdict, Modulation, Variant};
