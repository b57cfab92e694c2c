//! Gate-level garbling primitives.
//!
//! AND gates use the half-gates construction. For gate index `i` the tweaks
//! are `j = 2i` (generator half) and `j' = 2i + 1` (evaluator half); with
//! `pa = lsb(A0)`, `pb = lsb(B0)`:
//!
//! ```text
//! TG = H(A0, j)  ^ H(A0 ^ d, j)  ^ (pb ? d : 0)      WG = H(A0, j)  ^ (pa ? TG : 0)
//! TE = H(B0, j') ^ H(B0 ^ d, j') ^ A0                WE = H(B0, j') ^ (pb ? TE ^ A0 : 0)
//! table = (TG, TE)                                   C0 = WG ^ WE
//! ```
//!
//! XOR and INV are free: XOR of labels, and INV maps the garbler's false
//! label to `A0 ^ d` while the evaluator's active label passes through.

use super::hash::{hash, hash_batch_into};
use super::{GlobalDelta, WireLabel};

/// Serialized size of one AND-gate table.
pub const AND_TABLE_BYTES: usize = 32;

/// The two ciphertexts of one garbled AND gate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GarbledAndTable {
    pub generator: WireLabel,
    pub evaluator: WireLabel,
}

impl GarbledAndTable {
    pub fn to_bytes(self) -> [u8; AND_TABLE_BYTES] {
        let mut out = [0u8; AND_TABLE_BYTES];
        out[..16].copy_from_slice(&self.generator.to_bytes());
        out[16..].copy_from_slice(&self.evaluator.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8; AND_TABLE_BYTES]) -> Self {
        let mut g = [0u8; 16];
        let mut e = [0u8; 16];
        g.copy_from_slice(&bytes[..16]);
        e.copy_from_slice(&bytes[16..]);
        Self {
            generator: WireLabel::from_bytes(g),
            evaluator: WireLabel::from_bytes(e),
        }
    }
}

#[inline]
pub fn garble_xor(a0: WireLabel, b0: WireLabel) -> WireLabel {
    a0 ^ b0
}

#[inline]
pub fn eval_xor(a: WireLabel, b: WireLabel) -> WireLabel {
    a ^ b
}

#[inline]
pub fn garble_inv(a0: WireLabel, delta: GlobalDelta) -> WireLabel {
    a0 ^ delta.label()
}

#[inline]
pub fn eval_inv(a: WireLabel) -> WireLabel {
    a
}

const ZERO: WireLabel = WireLabel(0);

#[inline]
fn select(cond: bool, label: WireLabel) -> WireLabel {
    if cond {
        label
    } else {
        ZERO
    }
}

#[inline]
fn compose_garbled(
    a0: WireLabel,
    b0: WireLabel,
    delta: GlobalDelta,
    h_a0: WireLabel,
    h_a1: WireLabel,
    h_b0: WireLabel,
    h_b1: WireLabel,
) -> (GarbledAndTable, WireLabel) {
    let pa = a0.lsb();
    let pb = b0.lsb();
    let tg = h_a0 ^ h_a1 ^ select(pb, delta.label());
    let wg = h_a0 ^ select(pa, tg);
    let te = h_b0 ^ h_b1 ^ a0;
    let we = h_b0 ^ select(pb, te ^ a0);
    (
        GarbledAndTable {
            generator: tg,
            evaluator: te,
        },
        wg ^ we,
    )
}

/// Garbles one AND gate, returning the table to transmit and the output
/// false label.
pub fn garble_and(
    a0: WireLabel,
    b0: WireLabel,
    delta: GlobalDelta,
    gate_index: u64,
) -> (GarbledAndTable, WireLabel) {
    let j = 2 * gate_index;
    let jp = 2 * gate_index + 1;
    let d = delta.label();
    compose_garbled(
        a0,
        b0,
        delta,
        hash(a0, j),
        hash(a0 ^ d, j),
        hash(b0, jp),
        hash(b0 ^ d, jp),
    )
}

/// Evaluates one AND gate from the active input labels and the matching
/// table. Garbage in, garbage out: no authenticity check is performed.
pub fn eval_and(
    a: WireLabel,
    b: WireLabel,
    table: &GarbledAndTable,
    gate_index: u64,
) -> WireLabel {
    let sa = a.lsb();
    let sb = b.lsb();
    let g = hash(a, 2 * gate_index) ^ select(sa, table.generator);
    let e = hash(b, 2 * gate_index + 1) ^ select(sb, table.evaluator ^ a);
    g ^ e
}

/// Scratch buffers reused across AND batches.
#[derive(Default)]
pub(crate) struct AndScratch {
    inputs: Vec<WireLabel>,
    tweaks: Vec<u64>,
    hashes: Vec<WireLabel>,
}

/// Garbles a run of AND gates with consecutive gate indices starting at
/// `first_index`, batching all hash computations. Tables are appended to
/// `tables` (32 bytes per gate, gate order); output false labels are
/// appended to `labels_out`. Byte-for-byte identical to repeated
/// [`garble_and`].
pub(crate) fn garble_and_batch(
    pairs: &[(WireLabel, WireLabel)],
    delta: GlobalDelta,
    first_index: u64,
    scratch: &mut AndScratch,
    tables: &mut Vec<u8>,
    labels_out: &mut Vec<WireLabel>,
) {
    let n = pairs.len();
    let d = delta.label();
    scratch.inputs.clear();
    scratch.tweaks.clear();
    for (k, &(a0, b0)) in pairs.iter().enumerate() {
        let j = 2 * (first_index + k as u64);
        scratch.inputs.extend_from_slice(&[a0, a0 ^ d, b0, b0 ^ d]);
        scratch.tweaks.extend_from_slice(&[j, j, j + 1, j + 1]);
    }
    scratch.hashes.resize(4 * n, WireLabel::default());
    hash_batch_into(&scratch.inputs, &scratch.tweaks, &mut scratch.hashes);
    for (k, &(a0, b0)) in pairs.iter().enumerate() {
        let h = &scratch.hashes[4 * k..4 * k + 4];
        let (table, c0) = compose_garbled(a0, b0, delta, h[0], h[1], h[2], h[3]);
        tables.extend_from_slice(&table.to_bytes());
        labels_out.push(c0);
    }
}

/// Evaluator counterpart of [`garble_and_batch`]: `tables` holds the next
/// `32 * pairs.len()` transcript bytes.
pub(crate) fn eval_and_batch(
    pairs: &[(WireLabel, WireLabel)],
    tables: &[u8],
    first_index: u64,
    scratch: &mut AndScratch,
    labels_out: &mut Vec<WireLabel>,
) {
    let n = pairs.len();
    assert_eq!(tables.len(), AND_TABLE_BYTES * n);
    scratch.inputs.clear();
    scratch.tweaks.clear();
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let j = 2 * (first_index + k as u64);
        scratch.inputs.extend_from_slice(&[a, b]);
        scratch.tweaks.extend_from_slice(&[j, j + 1]);
    }
    scratch.hashes.resize(2 * n, WireLabel::default());
    hash_batch_into(&scratch.inputs, &scratch.tweaks, &mut scratch.hashes);
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let table_bytes: &[u8; AND_TABLE_BYTES] = tables
            [AND_TABLE_BYTES * k..AND_TABLE_BYTES * (k + 1)]
            .try_into()
            .unwrap();
        let table = GarbledAndTable::from_bytes(table_bytes);
        let g = scratch.hashes[2 * k] ^ select(a.lsb(), table.generator);
        let e = scratch.hashes[2 * k + 1] ^ select(b.lsb(), table.evaluator ^ a);
        labels_out.push(g ^ e);
    }
}
