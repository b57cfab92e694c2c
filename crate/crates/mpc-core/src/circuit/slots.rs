//! Wire-liveness slot assignment.
//!
//! Protocol executions keep one 16-byte label per live wire. Indexing label
//! stores by raw wire id would make memory proportional to circuit size, so
//! wires are mapped onto reusable slots instead: a wire's slot is freed
//! after the last gate that reads it and handed to a later wire. Output
//! wires stay pinned until the end (their labels feed output decoding).
//!
//! The plan depends only on circuit structure, so both parties share one
//! instance and perform identical stores.

use super::{BooleanCircuit, WireId};

pub struct SlotPlan {
    slot_of_wire: Vec<u32>,
    slot_count: usize,
}

/// Sentinel for wires whose slot must never be reused.
const PINNED: u32 = u32::MAX;

impl SlotPlan {
    pub fn build(circuit: &BooleanCircuit) -> Self {
        let wires = circuit.wire_count();
        let inputs = circuit.input_count();

        // last_use[w] = 1 + index of the last gate reading w (0 = never read).
        let mut last_use = vec![0u32; wires];
        for (i, gate) in circuit.gates().iter().enumerate() {
            last_use[gate.a() as usize] = i as u32 + 1;
            last_use[gate.b() as usize] = i as u32 + 1;
        }
        for &o in circuit.outputs() {
            last_use[o as usize] = PINNED;
        }

        let mut slot_of_wire = vec![0u32; wires];
        let mut free: Vec<u32> = Vec::new();
        let mut next: u32 = 0;
        let mut alloc = |free: &mut Vec<u32>| -> u32 {
            free.pop().unwrap_or_else(|| {
                let s = next;
                next += 1;
                s
            })
        };

        for slot in slot_of_wire.iter_mut().take(inputs) {
            *slot = alloc(&mut free);
        }
        for (i, gate) in circuit.gates().iter().enumerate() {
            let a = gate.a() as usize;
            let b = gate.b() as usize;
            if last_use[a] == i as u32 + 1 {
                free.push(slot_of_wire[a]);
            }
            if b != a && last_use[b] == i as u32 + 1 {
                free.push(slot_of_wire[b]);
            }
            // Dead gate outputs (never read, not circuit outputs) keep their
            // slot anyway: batched execution may write them after later
            // gates have run, so their slot must not be recycled.
            slot_of_wire[inputs + i] = alloc(&mut free);
        }

        SlotPlan {
            slot_of_wire,
            slot_count: next as usize,
        }
    }

    #[inline]
    pub fn slot(&self, wire: WireId) -> usize {
        self.slot_of_wire[wire as usize] as usize
    }

    /// Size a label store must have to run this plan.
    pub fn slot_count(&self) -> usize {
        self.slot_count
    }
}
