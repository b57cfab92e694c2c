//! Circuit walk strategies shared by garbler and evaluator.
//!
//! The batched walk collects runs of AND gates whose inputs are already
//! available and hashes them together; it must materialize a pending run as
//! soon as a later gate reads one of its outputs. Because free gates emit no
//! bytes and tables are emitted in gate order, the transcript is identical
//! to the scalar walk.
//!
//! The per-gate walk issues one dynamically dispatched call per gate with
//! scalar hashing. It reproduces the classic extensible-framework execution
//! model and exists as a benchmark comparison point.

use crate::circuit::{BooleanCircuit, GateKind, SlotPlan};

use super::{GcError, WireLabel, MAX_BATCH};

pub(crate) trait GateExecutor {
    fn xor(&mut self, a: WireLabel, b: WireLabel) -> WireLabel;
    fn inv(&mut self, a: WireLabel) -> WireLabel;
    fn and_scalar(&mut self, a: WireLabel, b: WireLabel) -> Result<WireLabel, GcError>;
    fn and_batch(
        &mut self,
        pairs: &[(WireLabel, WireLabel)],
        out: &mut Vec<WireLabel>,
    ) -> Result<(), GcError>;
}

pub(crate) fn run_gates_batched<E: GateExecutor>(
    circuit: &BooleanCircuit,
    plan: &SlotPlan,
    labels: &mut [WireLabel],
    exec: &mut E,
) -> Result<(), GcError> {
    let mut pending: Vec<(WireLabel, WireLabel)> = Vec::with_capacity(MAX_BATCH);
    let mut pending_slots: Vec<usize> = Vec::with_capacity(MAX_BATCH);
    let mut batch_out: Vec<WireLabel> = Vec::with_capacity(MAX_BATCH);
    // Smallest wire id whose label is deferred; any read at or above it
    // forces materialization. Pending output wires are monotone, so one
    // bound is enough (conservative for interleaved free gates).
    let mut first_pending = u32::MAX;

    let materialize = |exec: &mut E,
                           pending: &mut Vec<(WireLabel, WireLabel)>,
                           pending_slots: &mut Vec<usize>,
                           batch_out: &mut Vec<WireLabel>,
                           labels: &mut [WireLabel]|
     -> Result<(), GcError> {
        if pending.is_empty() {
            return Ok(());
        }
        batch_out.clear();
        exec.and_batch(pending, batch_out)?;
        for (&slot, &label) in pending_slots.iter().zip(batch_out.iter()) {
            labels[slot] = label;
        }
        pending.clear();
        pending_slots.clear();
        Ok(())
    };

    for (i, gate) in circuit.gates().iter().enumerate() {
        if gate.a() >= first_pending || gate.b() >= first_pending {
            materialize(exec, &mut pending, &mut pending_slots, &mut batch_out, labels)?;
            first_pending = u32::MAX;
        }
        let a = labels[plan.slot(gate.a())];
        let out_wire = circuit.gate_output(i);
        let out_slot = plan.slot(out_wire);
        match gate.kind() {
            GateKind::Xor => labels[out_slot] = exec.xor(a, labels[plan.slot(gate.b())]),
            GateKind::Inv => labels[out_slot] = exec.inv(a),
            GateKind::And => {
                pending.push((a, labels[plan.slot(gate.b())]));
                pending_slots.push(out_slot);
                first_pending = first_pending.min(out_wire);
                if pending.len() == MAX_BATCH {
                    materialize(exec, &mut pending, &mut pending_slots, &mut batch_out, labels)?;
                    first_pending = u32::MAX;
                }
            }
        }
    }
    materialize(exec, &mut pending, &mut pending_slots, &mut batch_out, labels)
}

pub(crate) fn run_gates_per_gate(
    circuit: &BooleanCircuit,
    plan: &SlotPlan,
    labels: &mut [WireLabel],
    exec: &mut dyn GateExecutor,
) -> Result<(), GcError> {
    for (i, gate) in circuit.gates().iter().enumerate() {
        let a = labels[plan.slot(gate.a())];
        let out = match gate.kind() {
            GateKind::Xor => exec.xor(a, labels[plan.slot(gate.b())]),
            GateKind::Inv => exec.inv(a),
            GateKind::And => exec.and_scalar(a, labels[plan.slot(gate.b())])?,
        };
        labels[plan.slot(circuit.gate_output(i))] = out;
    }
    Ok(())
}
