//! Bristol Fashion circuit files (XOR/AND/INV subset).
//!
//! Layout: a counts line `ngates nwires`, an input-arity line
//! `niv n1 n2 ...`, an output-arity line `nov m1 m2 ...`, a blank line, then
//! one gate per line as `n_in n_out in.. out OP`. Input values occupy the
//! first wires in declaration order; output values occupy the last wires.
//! The first input value belongs to the garbler, any remaining input values
//! to the evaluator.
//!
//! Parsed circuits are renumbered to this crate's dense wire order (gate i's
//! output becomes wire `inputs + i`); serialization applies the inverse kind
//! of renumbering so that parse(serialize(c)) == c on gate structure.

use super::{BooleanCircuit, CircuitError, Gate, GateKind, WireId};

const UNDEFINED: u32 = u32::MAX;

fn parse_err(line: usize, msg: impl Into<String>) -> CircuitError {
    CircuitError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_counts(line: &str, lineno: usize) -> Result<Vec<u64>, CircuitError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>()
                .map_err(|_| parse_err(lineno, format!("expected integer, got {tok:?}")))
        })
        .collect()
}

/// Parses a Bristol Fashion circuit. Opcodes other than XOR, AND and INV
/// (e.g. MAND, EQ, EQW) are rejected.
pub fn parse_bristol(text: &str) -> Result<BooleanCircuit, CircuitError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (lineno, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty circuit file"))?;
    let counts = parse_counts(header, lineno)?;
    if counts.len() != 2 {
        return Err(parse_err(lineno, "expected `ngates nwires`"));
    }
    let (ngates, nwires) = (counts[0] as usize, counts[1] as usize);

    let (lineno, inputs_line) = lines
        .next()
        .ok_or_else(|| parse_err(lineno + 1, "missing input-arity line"))?;
    let inputs = parse_counts(inputs_line, lineno)?;
    if inputs.is_empty() || inputs.len() != inputs[0] as usize + 1 {
        return Err(parse_err(lineno, "malformed input-arity line"));
    }
    let input_sizes = &inputs[1..];
    let garbler_bits = input_sizes[0];
    let evaluator_bits: u64 = input_sizes[1..].iter().sum();
    let total_inputs = (garbler_bits + evaluator_bits) as usize;

    let (lineno, outputs_line) = lines
        .next()
        .ok_or_else(|| parse_err(lineno + 1, "missing output-arity line"))?;
    let outputs = parse_counts(outputs_line, lineno)?;
    if outputs.is_empty() || outputs.len() != outputs[0] as usize + 1 {
        return Err(parse_err(lineno, "malformed output-arity line"));
    }
    let total_outputs: u64 = outputs[1..].iter().sum();

    if total_inputs + ngates > nwires || (total_outputs as usize) > nwires {
        return Err(parse_err(lineno, "wire count inconsistent with header"));
    }

    // File wire id -> dense id. Inputs keep their position.
    let mut map = vec![UNDEFINED; nwires];
    for (w, entry) in map.iter_mut().enumerate().take(total_inputs) {
        *entry = w as u32;
    }

    let mut gates: Vec<Gate> = Vec::with_capacity(ngates);
    for (lineno, line) in lines {
        if gates.len() == ngates {
            return Err(parse_err(lineno, "more gate lines than declared"));
        }
        let mut toks = line.split_whitespace();
        let n_in: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(lineno, "malformed gate line"))?;
        let n_out: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(lineno, "malformed gate line"))?;
        let mut wires = Vec::with_capacity(n_in + n_out);
        for _ in 0..n_in + n_out {
            let w: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| parse_err(lineno, "missing wire id"))?;
            if w >= nwires {
                return Err(parse_err(lineno, format!("wire {w} out of range")));
            }
            wires.push(w);
        }
        let opcode = toks
            .next()
            .ok_or_else(|| parse_err(lineno, "missing opcode"))?;
        if toks.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens after opcode"));
        }
        let kind = match opcode {
            "XOR" => GateKind::Xor,
            "AND" => GateKind::And,
            "INV" => GateKind::Inv,
            other => {
                return Err(CircuitError::UnknownOpcode {
                    line: lineno,
                    opcode: other.to_string(),
                })
            }
        };
        let expected_in = if kind == GateKind::Inv { 1 } else { 2 };
        if n_in != expected_in || n_out != 1 {
            return Err(parse_err(lineno, format!("bad arity for {opcode}")));
        }

        let resolve = |w: usize| -> Result<WireId, CircuitError> {
            let mapped = map[w];
            if mapped == UNDEFINED {
                Err(CircuitError::UndefinedWire {
                    gate: gates.len(),
                    wire: w as WireId,
                })
            } else {
                Ok(mapped)
            }
        };
        let gate = match kind {
            GateKind::Xor => Gate::xor(resolve(wires[0])?, resolve(wires[1])?),
            GateKind::And => Gate::and(resolve(wires[0])?, resolve(wires[1])?),
            GateKind::Inv => Gate::inv(resolve(wires[0])?),
        };
        let out_wire = wires[n_in];
        if map[out_wire] != UNDEFINED {
            return Err(CircuitError::WireRedefined(out_wire as WireId));
        }
        map[out_wire] = (total_inputs + gates.len()) as u32;
        gates.push(gate);
    }
    if gates.len() != ngates {
        return Err(parse_err(
            0,
            format!("declared {ngates} gates, found {}", gates.len()),
        ));
    }

    // Output values are the last wires in file numbering.
    let mut outs = Vec::with_capacity(total_outputs as usize);
    for w in nwires - total_outputs as usize..nwires {
        if map[w] == UNDEFINED {
            return Err(CircuitError::UndefinedOutput(w as WireId));
        }
        outs.push(map[w]);
    }

    BooleanCircuit::new(garbler_bits as u32, evaluator_bits as u32, gates, outs)
}

/// Writes a circuit in the same format [`parse_bristol`] reads.
///
/// Bristol numbering requires the output values to occupy the last wires, so
/// every circuit output must be a distinct gate output; circuits that output
/// input wires directly (or the same wire twice) are not expressible.
pub fn serialize_bristol(circuit: &BooleanCircuit) -> Result<String, CircuitError> {
    use std::fmt::Write;

    let inputs = circuit.input_count();
    let nwires = circuit.wire_count();
    let tnow = circuit.outputs().len();

    // Renumber: inputs keep position, non-output gate wires fill the middle
    // in definition order, outputs take the last ids in list order.
    let mut file_id = vec![UNDEFINED; nwires];
    for (order, &o) in circuit.outputs().iter().enumerate() {
        if (o as usize) < inputs {
            return Err(CircuitError::Unserializable(format!(
                "output wire {o} is an input wire"
            )));
        }
        if file_id[o as usize] != UNDEFINED {
            return Err(CircuitError::Unserializable(format!(
                "output wire {o} listed twice"
            )));
        }
        file_id[o as usize] = (nwires - tnow + order) as u32;
    }
    for w in 0..inputs {
        file_id[w] = w as u32;
    }
    let mut next = inputs as u32;
    for g in 0..circuit.gates().len() {
        let w = inputs + g;
        if file_id[w] == UNDEFINED {
            file_id[w] = next;
            next += 1;
        }
    }

    let mut out = String::new();
    writeln!(out, "{} {}", circuit.gates().len(), nwires).unwrap();
    if circuit.evaluator_inputs() == 0 {
        writeln!(out, "1 {}", circuit.garbler_inputs()).unwrap();
    } else {
        writeln!(
            out,
            "2 {} {}",
            circuit.garbler_inputs(),
            circuit.evaluator_inputs()
        )
        .unwrap();
    }
    writeln!(out, "1 {tnow}").unwrap();
    writeln!(out).unwrap();
    for (i, gate) in circuit.gates().iter().enumerate() {
        let o = file_id[inputs + i];
        let a = file_id[gate.a() as usize];
        match gate.kind() {
            GateKind::Xor => writeln!(out, "2 1 {a} {} {o} XOR", file_id[gate.b() as usize]),
            GateKind::And => writeln!(out, "2 1 {a} {} {o} AND", file_id[gate.b() as usize]),
            GateKind::Inv => writeln!(out, "1 1 {a} {o} INV"),
        }
        .unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{build_adder, build_matvec, from_bits_le, to_bits_le};
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn one_gate_file() {
        let text = "1 3\n2 1 1\n1 1\n\n2 1 0 1 2 AND\n";
        let c = parse_bristol(text).unwrap();
        assert_eq!(c.stats().and_count, 1);
        assert_eq!(c.garbler_inputs(), 1);
        assert_eq!(c.evaluator_inputs(), 1);
        assert!(c.eval_plaintext(&[true], &[true]).unwrap()[0]);
        assert!(!c.eval_plaintext(&[true], &[false]).unwrap()[0]);
    }

    #[test]
    fn mand_opcode_is_rejected() {
        let text = "1 5\n2 2 2\n1 1\n\n2 1 0 1 4 MAND\n";
        let err = parse_bristol(text).unwrap_err();
        assert!(
            matches!(err, CircuitError::UnknownOpcode { ref opcode, .. } if opcode == "MAND"),
            "got {err:?}"
        );
    }

    #[test]
    fn malformed_header_is_rejected() {
        assert!(matches!(
            parse_bristol("banana\n"),
            Err(CircuitError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_bristol("1 3\n2 1\n1 1\n\n2 1 0 1 2 AND\n"),
            Err(CircuitError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn use_before_definition_is_rejected() {
        // Gate reads wire 3 which is only written by the following gate.
        let text = "2 4\n2 1 1\n1 1\n\n2 1 0 3 2 XOR\n2 1 0 1 3 AND\n";
        assert!(matches!(
            parse_bristol(text),
            Err(CircuitError::UndefinedWire { .. })
        ));
    }

    #[test]
    fn double_write_is_rejected() {
        let text = "2 4\n2 1 1\n1 1\n\n2 1 0 1 2 XOR\n2 1 0 1 2 AND\n";
        assert!(matches!(
            parse_bristol(text),
            Err(CircuitError::WireRedefined(2))
        ));
    }

    #[test]
    fn out_of_order_wire_numbering_is_remapped() {
        // Same function as one_gate_file but with a scrambled intermediate id.
        let text = "2 5\n2 1 1\n1 1\n\n2 1 0 1 3 AND\n1 1 3 4 INV\n";
        let c = parse_bristol(text).unwrap();
        assert_eq!(c.stats().and_count, 1);
        assert_eq!(c.stats().inv_count, 1);
        assert!(!c.eval_plaintext(&[true], &[true]).unwrap()[0]);
        assert!(c.eval_plaintext(&[false], &[true]).unwrap()[0]);
    }

    #[test]
    fn round_trip_preserves_gate_structure() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..20 {
            // Random circuits whose outputs are fresh gate wires, as the
            // format requires.
            let mut b = super::super::CircuitBuilder::new(3, 2).unwrap();
            let mut wires: Vec<WireId> = (0..5).collect();
            for _ in 0..rng.gen_range(1..40) {
                let a = wires[rng.gen_range(0..wires.len())];
                let bb = wires[rng.gen_range(0..wires.len())];
                let w = match rng.gen_range(0..3) {
                    0 => b.xor(a, bb).unwrap(),
                    1 => b.and(a, bb).unwrap(),
                    _ => b.inv(a).unwrap(),
                };
                wires.push(w);
            }
            let last = *wires.last().unwrap();
            b.mark_outputs(&[last]);
            let c = b.finish();
            let text = serialize_bristol(&c).unwrap();
            let reparsed = parse_bristol(&text).unwrap();
            assert_eq!(reparsed, c);
        }
    }

    #[test]
    fn adder_survives_round_trip_and_evaluates() {
        let c = build_adder(64).unwrap();
        let text = serialize_bristol(&c).unwrap();
        let c2 = parse_bristol(&text).unwrap();
        assert_eq!(c2, c);
        let mut rng = StdRng::seed_from_u64(33);
        for _ in 0..50 {
            let x: u64 = rng.gen();
            let y: u64 = rng.gen();
            let out = c2
                .eval_plaintext(&to_bits_le(x, 64), &to_bits_le(y, 64))
                .unwrap();
            assert_eq!(from_bits_le(&out), x.wrapping_add(y));
        }
    }

    #[test]
    fn passthrough_output_is_unserializable() {
        let c = BooleanCircuit::new(2, 0, vec![], vec![0, 1]).unwrap();
        assert!(matches!(
            serialize_bristol(&c),
            Err(CircuitError::Unserializable(_))
        ));
    }

    #[test]
    fn matvec_round_trips() {
        let c = build_matvec(2, 2, 8).unwrap();
        let text = serialize_bristol(&c).unwrap();
        assert_eq!(parse_bristol(&text).unwrap(), c);
    }
}
