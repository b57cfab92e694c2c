//! Evaluator side of the protocol.

use crate::circuit::BooleanCircuit;
use crate::transport::Channel;

use super::exec::{run_gates_batched, run_gates_per_gate, GateExecutor};
use super::gates::{eval_and, eval_and_batch, eval_inv, eval_xor, AndScratch, GarbledAndTable};
use super::{
    pack_bits, unpack_bits, EvaluatorInputMode, GarbleOptions, GateApi, GcError, WireLabel,
};

/// Consumes a garbled-table stream, computing on active labels.
pub struct Evaluator<'ch> {
    channel: &'ch mut Channel,
    and_index: u64,
    scratch: AndScratch,
    table_buf: Vec<u8>,
}

impl<'ch> Evaluator<'ch> {
    pub fn new(channel: &'ch mut Channel) -> Self {
        Self {
            channel,
            and_index: 0,
            scratch: AndScratch::default(),
            table_buf: Vec::new(),
        }
    }

    /// Evaluates one AND gate, reading its table from the stream.
    pub fn and(&mut self, a: WireLabel, b: WireLabel) -> Result<WireLabel, GcError> {
        let mut buf = [0u8; super::gates::AND_TABLE_BYTES];
        self.channel.recv_into(&mut buf)?;
        let table = GarbledAndTable::from_bytes(&buf);
        let c = eval_and(a, b, &table, self.and_index);
        self.and_index += 1;
        Ok(c)
    }

    /// Evaluates a batch of independent AND gates, reading their tables in
    /// one contiguous receive.
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
        self.table_buf
            .resize(super::gates::AND_TABLE_BYTES * pairs.len(), 0);
        self.channel.recv_into(&mut self.table_buf)?;
        eval_and_batch(pairs, &self.table_buf, self.and_index, &mut self.scratch, out);
        self.and_index += pairs.len() as u64;
        Ok(())
    }
}

impl GateExecutor for Evaluator<'_> {
    fn xor(&mut self, a: WireLabel, b: WireLabel) -> WireLabel {
        eval_xor(a, b)
    }

    fn inv(&mut self, a: WireLabel) -> WireLabel {
        eval_inv(a)
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

/// Runs the whole evaluator side over `circuit` and returns the output
/// bits. The result equals plaintext evaluation on the same inputs.
pub fn run_evaluator(
    circuit: &BooleanCircuit,
    inputs: &[bool],
    channel: &mut Channel,
    mode: EvaluatorInputMode<'_>,
    options: &GarbleOptions,
) -> Result<Vec<bool>, GcError> {
    if inputs.len() != circuit.evaluator_inputs() {
        return Err(GcError::InputLength {
            expected: circuit.evaluator_inputs(),
            got: inputs.len(),
        });
    }
    let plan = circuit.slot_plan();
    let mut labels = vec![WireLabel::default(); plan.slot_count()];
    let g = circuit.garbler_inputs();
    let e = circuit.evaluator_inputs();

    // In direct mode our input bits go out first; the garbler answers with
    // the matching active labels inside its input-label message.
    let external_labels = match mode {
        EvaluatorInputMode::Direct => {
            channel.send(&pack_bits(inputs))?;
            channel.flush()?;
            None
        }
        EvaluatorInputMode::External(fetch) => Some(fetch.fetch(inputs)?),
    };

    let mut label_bytes = [0u8; 16];
    for w in 0..g {
        channel.recv_into(&mut label_bytes)?;
        labels[plan.slot(w as u32)] = WireLabel::from_bytes(label_bytes);
    }
    match external_labels {
        None => {
            for w in g..g + e {
                channel.recv_into(&mut label_bytes)?;
                labels[plan.slot(w as u32)] = WireLabel::from_bytes(label_bytes);
            }
        }
        Some(fetched) => {
            if fetched.len() != e {
                return Err(GcError::Delivery(format!(
                    "expected {e} input labels, got {}",
                    fetched.len()
                )));
            }
            for (w, label) in (g..g + e).zip(fetched) {
                labels[plan.slot(w as u32)] = label;
            }
        }
    }

    let mut evaluator = Evaluator::new(channel);
    match options.gate_api {
        GateApi::Batched => run_gates_batched(circuit, plan, &mut labels, &mut evaluator)?,
        GateApi::PerGate => run_gates_per_gate(circuit, plan, &mut labels, &mut evaluator)?,
    }

    let out_count = circuit.outputs().len();
    let decode_bytes = channel.recv(out_count.div_ceil(8))?;
    let decode = unpack_bits(&decode_bytes, out_count);
    Ok(circuit
        .outputs()
        .iter()
        .zip(decode)
        .map(|(&o, d)| labels[plan.slot(o)].lsb() ^ d)
        .collect())
}
