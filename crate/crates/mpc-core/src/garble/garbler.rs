//! Garbler side of the protocol.

use rand::RngCore;

use crate::circuit::BooleanCircuit;
use crate::transport::Channel;

use super::exec::{run_gates_batched, run_gates_per_gate, GateExecutor};
use super::gates::{garble_and, garble_and_batch, garble_inv, garble_xor, AndScratch};
use super::{
    pack_bits, unpack_bits, GarbleOptions, GarblerInputMode, GateApi, GcError, GlobalDelta,
    WireLabel,
};

/// Streams garbled AND tables into a channel. Wire labels are managed by
/// the caller; the session owns the global delta, the AND gate counter and
/// the flush policy.
pub struct Garbler<'ch> {
    delta: GlobalDelta,
    channel: &'ch mut Channel,
    flush_bytes: usize,
    and_index: u64,
    scratch: AndScratch,
    batch_tables: Vec<u8>,
}

impl<'ch> Garbler<'ch> {
    pub fn new(delta: GlobalDelta, channel: &'ch mut Channel, flush_bytes: usize) -> Self {
        assert!(flush_bytes > 0, "flush_bytes must be positive");
        Self {
            delta,
            channel,
            flush_bytes,
            and_index: 0,
            scratch: AndScratch::default(),
            batch_tables: Vec::new(),
        }
    }

    pub fn delta(&self) -> GlobalDelta {
        self.delta
    }

    /// Garbles one AND gate and streams its table.
    pub fn and(&mut self, a0: WireLabel, b0: WireLabel) -> Result<WireLabel, GcError> {
        let (table, c0) = garble_and(a0, b0, self.delta, self.and_index);
        self.and_index += 1;
        self.channel.send(&table.to_bytes())?;
        self.maybe_flush()?;
        Ok(c0)
    }

    /// Garbles a batch of independent AND gates; the tables land on the
    /// wire contiguously, byte-identical to the same sequence of
    /// [`Garbler::and`] calls.
    pub fn and_many(
        &mut self,
        pairs: &[(WireLabel, WireLabel)],
    ) -> Result<Vec<WireLabel>, GcError> {
        let mut out = Vec::with_capacity(pairs.len());
        self.and_batch_into(pairs, &mut out)?;
        Ok(out)
    }

    fn and_batch_into(
        &mut self,
        pairs: &[(WireLabel, WireLabel)],
        out: &mut Vec<WireLabel>,
    ) -> Result<(), GcError> {
        self.batch_tables.clear();
        garble_and_batch(
            pairs,
            self.delta,
            self.and_index,
            &mut self.scratch,
            &mut self.batch_tables,
            out,
        );
        self.and_index += pairs.len() as u64;
        // Emit per table so message boundaries match the scalar path.
        let tables = std::mem::take(&mut self.batch_tables);
        for table in tables.chunks(super::gates::AND_TABLE_BYTES) {
            self.channel.send(table)?;
            self.maybe_flush()?;
        }
        self.batch_tables = tables;
        Ok(())
    }

    fn maybe_flush(&mut self) -> Result<(), GcError> {
        if self.channel.pending_bytes() >= self.flush_bytes {
            self.channel.flush()?;
        }
        Ok(())
    }
}

impl GateExecutor for Garbler<'_> {
    fn xor(&mut self, a: WireLabel, b: WireLabel) -> WireLabel {
        garble_xor(a, b)
    }

    fn inv(&mut self, a: WireLabel) -> WireLabel {
        garble_inv(a, self.delta)
    }

    fn and_scalar(&mut self, a: WireLabel, b: WireLabel) -> Result<WireLabel, GcError> {
        self.and(a, b)
    }

    fn and_batch(
        &mut self,
        pairs: &[(WireLabel, WireLabel)],
        out: &mut Vec<WireLabel>,
    ) -> Result<(), GcError> {
        self.and_batch_into(pairs, out)
    }
}

/// Runs the whole garbler side over `circuit`.
///
/// Samples the delta and all input labels from `rng` (a fixed seed gives a
/// byte-identical transcript), delivers input labels per `mode`, streams
/// AND tables in gate order flushing every `options.flush_bytes`, then
/// sends one decode bit per output wire.
pub fn run_garbler<R: RngCore>(
    circuit: &BooleanCircuit,
    inputs: &[bool],
    channel: &mut Channel,
    mode: GarblerInputMode<'_>,
    options: &GarbleOptions,
    rng: &mut R,
) -> Result<(), GcError> {
    if inputs.len() != circuit.garbler_inputs() {
        return Err(GcError::InputLength {
            expected: circuit.garbler_inputs(),
            got: inputs.len(),
        });
    }
    let delta = GlobalDelta::sample(rng);
    let plan = circuit.slot_plan();
    let mut labels = vec![WireLabel::default(); plan.slot_count()];

    // False labels for every input wire, in wire order.
    let g = circuit.garbler_inputs();
    let e = circuit.evaluator_inputs();
    for (w, &bit) in inputs.iter().enumerate() {
        let l0 = WireLabel::random(rng);
        labels[plan.slot(w as u32)] = l0;
        let active = if bit { l0 ^ delta.label() } else { l0 };
        channel.send(&active.to_bytes())?;
    }
    let mut eval_pairs = Vec::with_capacity(e);
    for w in g..g + e {
        let l0 = WireLabel::random(rng);
        labels[plan.slot(w as u32)] = l0;
        eval_pairs.push((l0, l0 ^ delta.label()));
    }
    match mode {
        GarblerInputMode::Direct => {
            let packed = channel.recv(e.div_ceil(8))?;
            let bits = unpack_bits(&packed, e);
            for (&bit, &(l0, l1)) in bits.iter().zip(&eval_pairs) {
                let active = if bit { l1 } else { l0 };
                channel.send(&active.to_bytes())?;
            }
        }
        GarblerInputMode::External(delivery) => delivery.deliver(&eval_pairs)?,
    }
    drop(eval_pairs);
    channel.flush()?;

    let mut garbler = Garbler::new(delta, channel, options.flush_bytes);
    match options.gate_api {
        GateApi::Batched => run_gates_batched(circuit, plan, &mut labels, &mut garbler)?,
        GateApi::PerGate => run_gates_per_gate(circuit, plan, &mut labels, &mut garbler)?,
    }

    let decode: Vec<bool> = circuit
        .outputs()
        .iter()
        .map(|&o| labels[plan.slot(o)].lsb())
        .collect();
    channel.send(&pack_bits(&decode))?;
    channel.flush()?;
    Ok(())
}
