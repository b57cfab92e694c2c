//! Garbled-circuit protocol: free-XOR, half-gates AND tables, streamed
//! garbling.
//!
//! The garbler assigns every wire a pair of 128-bit labels whose XOR is a
//! global secret delta (free-XOR); the label's least significant bit is the
//! public select bit (point-and-permute), so delta always has lsb 1. XOR and
//! INV gates are computed locally on labels and cost no communication; each
//! AND gate costs exactly one 32-byte table, streamed garbler-to-evaluator.
//!
//! Wire transcript, in order, all integers little-endian:
//!
//! 1. active labels for the garbler's input wires (16 bytes each);
//! 2. in [`EvaluatorInputMode::Direct`] mode only: active labels for the
//!    evaluator's input wires (the evaluator first sends its input bits,
//!    packed LSB-first, as one message in the other direction);
//! 3. AND tables in gate order, 32 bytes each, flushed every
//!    `flush_bytes`;
//! 4. one decode bit per output wire, packed LSB-first.
//!
//! Direct input delivery reveals the evaluator's inputs to the garbler. It
//! exists so that circuit-execution performance can be benchmarked without
//! an oblivious-transfer subprotocol and must not be used where inputs are
//! actually secret; [`EvaluatorInputMode::External`] accepts labels from a
//! caller-supplied delivery mechanism instead.

use rand::RngCore;
use thiserror::Error;

use crate::transport::TransportError;

mod evaluator;
mod exec;
mod garbler;
mod gates;
mod hash;

pub use evaluator::{run_evaluator, Evaluator};
pub use garbler::{run_garbler, Garbler};
pub use gates::{
    eval_and, eval_inv, eval_xor, garble_and, garble_inv, garble_xor, GarbledAndTable,
    AND_TABLE_BYTES,
};
pub use hash::{hash, hash_batch};

/// Default streaming flush threshold: large enough to amortize per-message
/// overhead, small enough to keep the evaluator busy.
pub const DEFAULT_FLUSH_BYTES: usize = 64 * 1024;

/// Upper bound on gates hashed per batch in the batched gate path.
pub(crate) const MAX_BATCH: usize = 1024;

#[derive(Debug, Error)]
pub enum GcError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("input length mismatch: expected {expected} bits, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("input label delivery failed: {0}")]
    Delivery(String),
}

/// A 128-bit wire label.
#[derive(Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct WireLabel(pub u128);

impl WireLabel {
    pub fn random<R: RngCore>(rng: &mut R) -> Self {
        let lo = rng.next_u64() as u128;
        let hi = rng.next_u64() as u128;
        WireLabel(hi << 64 | lo)
    }

    /// The point-and-permute select bit.
    #[inline]
    pub fn lsb(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn to_bytes(self) -> [u8; 16] {
        self.0.to_le_bytes()
    }

    #[inline]
    pub fn from_bytes(bytes: [u8; 16]) -> Self {
        WireLabel(u128::from_le_bytes(bytes))
    }
}

impl std::ops::BitXor for WireLabel {
    type Output = WireLabel;
    #[inline]
    fn bitxor(self, rhs: WireLabel) -> WireLabel {
        WireLabel(self.0 ^ rhs.0)
    }
}

impl std::ops::BitXorAssign for WireLabel {
    #[inline]
    fn bitxor_assign(&mut self, rhs: WireLabel) {
        self.0 ^= rhs.0;
    }
}

impl std::fmt::Debug for WireLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WireLabel({:032x})", self.0)
    }
}

/// The free-XOR offset between each wire's false and true label. Fixed for
/// a protocol run, lsb always 1, never transmitted.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GlobalDelta(WireLabel);

impl GlobalDelta {
    pub fn sample<R: RngCore>(rng: &mut R) -> Self {
        GlobalDelta(WireLabel(WireLabel::random(rng).0 | 1))
    }

    /// Wraps an existing label. Panics unless its lsb is 1.
    pub fn from_label(label: WireLabel) -> Self {
        assert!(label.lsb(), "delta must have lsb 1");
        GlobalDelta(label)
    }

    #[inline]
    pub fn label(self) -> WireLabel {
        self.0
    }
}

/// How the garbler hands the evaluator the labels for the evaluator's own
/// input wires.
pub enum GarblerInputMode<'a> {
    /// Insecure, benchmark-only: the evaluator reveals its input bits over
    /// the channel and the garbler returns the matching active labels.
    Direct,
    /// Label pairs are handed to a caller-supplied delivery mechanism (for
    /// example an oblivious-transfer component) and never cross the channel.
    External(&'a mut dyn DeliverInputLabels),
}

/// Evaluator-side counterpart of [`GarblerInputMode`].
pub enum EvaluatorInputMode<'a> {
    Direct,
    External(&'a mut dyn FetchInputLabels),
}

/// Garbler side of an external input-label delivery mechanism: called once
/// per run with the (false, true) label pair of every evaluator input wire.
pub trait DeliverInputLabels {
    fn deliver(&mut self, pairs: &[(WireLabel, WireLabel)]) -> Result<(), GcError>;
}

/// Evaluator side of an external delivery mechanism: returns the active
/// label for each of the evaluator's input bits.
pub trait FetchInputLabels {
    fn fetch(&mut self, bits: &[bool]) -> Result<Vec<WireLabel>, GcError>;
}

/// An in-process stand-in for an oblivious transfer: the receiving half
/// sees both labels of every pair, so this is for tests and benchmarks
/// only.
pub fn ideal_label_exchange() -> (IdealLabelSender, IdealLabelReceiver) {
    let (tx, rx) = std::sync::mpsc::channel();
    (IdealLabelSender(tx), IdealLabelReceiver(rx))
}

pub struct IdealLabelSender(std::sync::mpsc::Sender<Vec<(WireLabel, WireLabel)>>);

impl DeliverInputLabels for IdealLabelSender {
    fn deliver(&mut self, pairs: &[(WireLabel, WireLabel)]) -> Result<(), GcError> {
        self.0
            .send(pairs.to_vec())
            .map_err(|_| GcError::Delivery("label receiver dropped".into()))
    }
}

pub struct IdealLabelReceiver(std::sync::mpsc::Receiver<Vec<(WireLabel, WireLabel)>>);

impl FetchInputLabels for IdealLabelReceiver {
    fn fetch(&mut self, bits: &[bool]) -> Result<Vec<WireLabel>, GcError> {
        let pairs = self
            .0
            .recv()
            .map_err(|_| GcError::Delivery("label sender dropped".into()))?;
        if pairs.len() != bits.len() {
            return Err(GcError::Delivery(format!(
                "expected {} label pairs, got {}",
                bits.len(),
                pairs.len()
            )));
        }
        Ok(bits
            .iter()
            .zip(pairs)
            .map(|(&bit, (zero, one))| if bit { one } else { zero })
            .collect())
    }
}

/// Gate execution strategy for a protocol run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateApi {
    /// Independent AND gates are hashed in batches (default).
    Batched,
    /// One dynamically dispatched call per gate with scalar hashing.
    /// Deliberately naive; kept as a benchmark comparison point.
    PerGate,
}

#[derive(Clone, Copy, Debug)]
pub struct GarbleOptions {
    pub flush_bytes: usize,
    pub gate_api: GateApi,
}

impl Default for GarbleOptions {
    fn default() -> Self {
        Self {
            flush_bytes: DEFAULT_FLUSH_BYTES,
            gate_api: GateApi::Batched,
        }
    }
}

/// Packs bits LSB-first into bytes.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &bit) in bits.iter().enumerate() {
        if bit {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    bytes
}

/// Inverse of [`pack_bits`].
pub fn unpack_bits(bytes: &[u8], n: usize) -> Vec<bool> {
    (0..n).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect()
}

/// Exact number of bytes the garbler sends for `circuit`.
///
/// `direct_inputs` selects whether the evaluator's input labels cross the
/// channel ([`EvaluatorInputMode::Direct`]) or are delivered externally.
pub fn transcript_bytes_forward(circuit: &crate::circuit::BooleanCircuit, direct_inputs: bool) -> u64 {
    let inputs = if direct_inputs {
        circuit.input_count()
    } else {
        circuit.garbler_inputs()
    } as u64;
    let ands = circuit
        .gates()
        .iter()
        .filter(|g| g.kind() == crate::circuit::GateKind::And)
        .count() as u64;
    16 * inputs + 32 * ands + (circuit.outputs().len() as u64).div_ceil(8)
}

/// Exact number of bytes the evaluator sends: its packed input bits in
/// direct mode, nothing otherwise.
pub fn transcript_bytes_backward(circuit: &crate::circuit::BooleanCircuit, direct_inputs: bool) -> u64 {
    if direct_inputs {
        (circuit.evaluator_inputs() as u64).div_ceil(8)
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn delta_lsb_is_one() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(GlobalDelta::sample(&mut rng).label().lsb());
        }
    }

    #[test]
    fn bit_packing_round_trips() {
        let bits: Vec<bool> = (0..13).map(|i| i % 3 == 0).collect();
        assert_eq!(unpack_bits(&pack_bits(&bits), 13), bits);
        assert_eq!(pack_bits(&[]), Vec::<u8>::new());
    }

    #[test]
    fn label_bytes_round_trip() {
        let l = WireLabel(0x0123_4567_89ab_cdef_fedc_ba98_7654_3210);
        assert_eq!(WireLabel::from_bytes(l.to_bytes()), l);
    }
}
