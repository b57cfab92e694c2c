//! Boolean circuits over XOR/AND/INV gates.
//!
//! Wires are numbered densely: garbler input wires first, then evaluator
//! input wires, then one output wire per gate in gate order. Every wire is
//! written exactly once, so a circuit is valid iff each gate only reads
//! wires defined before it (an input or an earlier gate's output).
//!
//! Circuits are immutable after construction and cheap to share between the
//! two parties of a protocol run.

use std::sync::OnceLock;

use thiserror::Error;

mod bristol;
mod build;
mod slots;

pub use bristol::{parse_bristol, serialize_bristol};
pub use build::{
    adder_and_count, build_adder, build_matvec, build_multiplier, matvec_and_count,
    multiplier_and_count, CircuitBuilder,
};
pub use slots::SlotPlan;

pub type WireId = u32;

/// Wire ids are packed into 31 bits.
pub const MAX_WIRE_ID: u32 = (1 << 31) - 1;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("unsupported bit width {0} (expected 8, 16, 32 or 64)")]
    UnsupportedBitwidth(u32),
    #[error("wire id space exhausted")]
    WireIdOverflow,
    #[error("gate {gate} reads wire {wire} before it is defined")]
    UndefinedWire { gate: usize, wire: WireId },
    #[error("wire {0} is written more than once")]
    WireRedefined(WireId),
    #[error("output wire {0} is not defined")]
    UndefinedOutput(WireId),
    #[error("input length mismatch: expected {expected} bits, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unknown opcode {opcode:?}")]
    UnknownOpcode { line: usize, opcode: String },
    #[error("circuit cannot be serialized: {0}")]
    Unserializable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Xor,
    And,
    Inv,
}

/// A gate packed into one word: 2 bits of opcode and two 31-bit input wire
/// ids. The output wire id is implicit: `input_count + gate_index`.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Gate(u64);

const KIND_XOR: u64 = 0;
const KIND_AND: u64 = 1;
const KIND_INV: u64 = 2;

impl Gate {
    fn pack(kind: u64, a: WireId, b: WireId) -> Self {
        debug_assert!(a <= MAX_WIRE_ID && b <= MAX_WIRE_ID);
        Gate(kind << 62 | (a as u64) << 31 | b as u64)
    }

    pub fn xor(a: WireId, b: WireId) -> Self {
        Self::pack(KIND_XOR, a, b)
    }

    pub fn and(a: WireId, b: WireId) -> Self {
        Self::pack(KIND_AND, a, b)
    }

    pub fn inv(a: WireId) -> Self {
        Self::pack(KIND_INV, a, a)
    }

    pub fn kind(self) -> GateKind {
        match self.0 >> 62 {
            KIND_XOR => GateKind::Xor,
            KIND_AND => GateKind::And,
            _ => GateKind::Inv,
        }
    }

    /// First input wire.
    pub fn a(self) -> WireId {
        (self.0 >> 31) as u32 & MAX_WIRE_ID
    }

    /// Second input wire (equal to [`Gate::a`] for INV gates).
    pub fn b(self) -> WireId {
        self.0 as u32 & MAX_WIRE_ID
    }
}

impl std::fmt::Debug for Gate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind() {
            GateKind::Xor => write!(f, "Xor({}, {})", self.a(), self.b()),
            GateKind::And => write!(f, "And({}, {})", self.a(), self.b()),
            GateKind::Inv => write!(f, "Inv({})", self.a()),
        }
    }
}

/// Gate census and multiplicative depth of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CircuitStats {
    pub and_count: u64,
    pub xor_count: u64,
    pub inv_count: u64,
    /// Length of the longest chain of AND gates.
    pub and_depth: u64,
}

/// A topologically ordered gate list with designated per-party input ranges
/// and output wires.
pub struct BooleanCircuit {
    garbler_inputs: u32,
    evaluator_inputs: u32,
    gates: Vec<Gate>,
    outputs: Vec<WireId>,
    plan: OnceLock<SlotPlan>,
}

impl BooleanCircuit {
    /// Validates topological order (every gate reads only defined wires) and
    /// output definedness.
    pub fn new(
        garbler_inputs: u32,
        evaluator_inputs: u32,
        gates: Vec<Gate>,
        outputs: Vec<WireId>,
    ) -> Result<Self, CircuitError> {
        let inputs = garbler_inputs as u64 + evaluator_inputs as u64;
        let wire_count = inputs + gates.len() as u64;
        if wire_count > MAX_WIRE_ID as u64 + 1 {
            return Err(CircuitError::WireIdOverflow);
        }
        for (i, gate) in gates.iter().enumerate() {
            let defined = inputs + i as u64;
            if (gate.a() as u64) >= defined {
                return Err(CircuitError::UndefinedWire {
                    gate: i,
                    wire: gate.a(),
                });
            }
            if (gate.b() as u64) >= defined {
                return Err(CircuitError::UndefinedWire {
                    gate: i,
                    wire: gate.b(),
                });
            }
        }
        for &o in &outputs {
            if (o as u64) >= wire_count {
                return Err(CircuitError::UndefinedOutput(o));
            }
        }
        Ok(Self {
            garbler_inputs,
            evaluator_inputs,
            gates,
            outputs,
            plan: OnceLock::new(),
        })
    }

    pub fn garbler_inputs(&self) -> usize {
        self.garbler_inputs as usize
    }

    pub fn evaluator_inputs(&self) -> usize {
        self.evaluator_inputs as usize
    }

    pub fn input_count(&self) -> usize {
        self.garbler_inputs() + self.evaluator_inputs()
    }

    pub fn wire_count(&self) -> usize {
        self.input_count() + self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[WireId] {
        &self.outputs
    }

    /// Output wire of the `i`-th gate.
    pub fn gate_output(&self, i: usize) -> WireId {
        (self.input_count() + i) as WireId
    }

    /// Wire-liveness slot assignment, built once on first use and shared by
    /// all protocol runs over this circuit.
    pub fn slot_plan(&self) -> &SlotPlan {
        self.plan.get_or_init(|| SlotPlan::build(self))
    }

    /// Full scan of the gate list.
    pub fn stats(&self) -> CircuitStats {
        let mut stats = CircuitStats::default();
        let mut depth = vec![0u32; self.wire_count()];
        let mut max_depth = 0u32;
        for (i, gate) in self.gates.iter().enumerate() {
            let da = depth[gate.a() as usize];
            let db = depth[gate.b() as usize];
            let out = match gate.kind() {
                GateKind::Xor => {
                    stats.xor_count += 1;
                    da.max(db)
                }
                GateKind::And => {
                    stats.and_count += 1;
                    da.max(db) + 1
                }
                GateKind::Inv => {
                    stats.inv_count += 1;
                    da
                }
            };
            depth[self.input_count() + i] = out;
            max_depth = max_depth.max(out);
        }
        stats.and_depth = max_depth as u64;
        stats
    }

    /// Gate-by-gate boolean evaluation; the reference semantics for all
    /// protocol tests.
    pub fn eval_plaintext(
        &self,
        garbler_bits: &[bool],
        evaluator_bits: &[bool],
    ) -> Result<Vec<bool>, CircuitError> {
        if garbler_bits.len() != self.garbler_inputs() {
            return Err(CircuitError::InputLength {
                expected: self.garbler_inputs(),
                got: garbler_bits.len(),
            });
        }
        if evaluator_bits.len() != self.evaluator_inputs() {
            return Err(CircuitError::InputLength {
                expected: self.evaluator_inputs(),
                got: evaluator_bits.len(),
            });
        }
        let mut values = vec![false; self.wire_count()];
        values[..garbler_bits.len()].copy_from_slice(garbler_bits);
        values[garbler_bits.len()..self.input_count()].copy_from_slice(evaluator_bits);
        for (i, gate) in self.gates.iter().enumerate() {
            let a = values[gate.a() as usize];
            let b = values[gate.b() as usize];
            values[self.input_count() + i] = match gate.kind() {
                GateKind::Xor => a ^ b,
                GateKind::And => a & b,
                GateKind::Inv => !a,
            };
        }
        Ok(self.outputs.iter().map(|&o| values[o as usize]).collect())
    }
}

impl Clone for BooleanCircuit {
    fn clone(&self) -> Self {
        Self {
            garbler_inputs: self.garbler_inputs,
            evaluator_inputs: self.evaluator_inputs,
            gates: self.gates.clone(),
            outputs: self.outputs.clone(),
            plan: OnceLock::new(),
        }
    }
}

impl PartialEq for BooleanCircuit {
    fn eq(&self, other: &Self) -> bool {
        self.garbler_inputs == other.garbler_inputs
            && self.evaluator_inputs == other.evaluator_inputs
            && self.gates == other.gates
            && self.outputs == other.outputs
    }
}

impl std::fmt::Debug for BooleanCircuit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BooleanCircuit")
            .field("garbler_inputs", &self.garbler_inputs)
            .field("evaluator_inputs", &self.evaluator_inputs)
            .field("gates", &self.gates.len())
            .field("outputs", &self.outputs.len())
            .finish()
    }
}

/// Unpacks `width` little-endian bits of `x`.
pub fn to_bits_le(x: u64, width: u32) -> Vec<bool> {
    (0..width).map(|i| (x >> i) & 1 == 1).collect()
}

/// Packs little-endian bits into an integer. Panics if given more than 64.
pub fn from_bits_le(bits: &[bool]) -> u64 {
    assert!(bits.len() <= 64);
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (b as u64) << i)
}
