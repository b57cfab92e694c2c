//! Circuit construction: word-level building blocks and the matrix-vector
//! benchmark workload.
//!
//! Integers are little-endian bit vectors of width 8, 16, 32 or 64, with
//! wrap-around (mod 2^width) semantics so that both protocol families
//! compute the same function. Adders are ripple-carry with one AND per
//! carry: a width-w addition with no carry-out costs exactly w-1 ANDs.
//! Multipliers are schoolbook, truncated to the operand width.

use super::{BooleanCircuit, CircuitError, Gate, WireId, MAX_WIRE_ID};

pub const SUPPORTED_BITWIDTHS: [u32; 4] = [8, 16, 32, 64];

fn check_bitwidth(bitwidth: u32) -> Result<(), CircuitError> {
    if SUPPORTED_BITWIDTHS.contains(&bitwidth) {
        Ok(())
    } else {
        Err(CircuitError::UnsupportedBitwidth(bitwidth))
    }
}

/// Incrementally assembles a circuit. Input wires are declared up front
/// (garbler range first, evaluator range second); gates append wires.
pub struct CircuitBuilder {
    garbler_inputs: u32,
    evaluator_inputs: u32,
    gates: Vec<Gate>,
    outputs: Vec<WireId>,
}

impl CircuitBuilder {
    pub fn new(garbler_inputs: u64, evaluator_inputs: u64) -> Result<Self, CircuitError> {
        if garbler_inputs + evaluator_inputs > MAX_WIRE_ID as u64 + 1 {
            return Err(CircuitError::WireIdOverflow);
        }
        Ok(Self {
            garbler_inputs: garbler_inputs as u32,
            evaluator_inputs: evaluator_inputs as u32,
            gates: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn garbler_input_wires(&self) -> std::ops::Range<WireId> {
        0..self.garbler_inputs
    }

    pub fn evaluator_input_wires(&self) -> std::ops::Range<WireId> {
        self.garbler_inputs..self.garbler_inputs + self.evaluator_inputs
    }

    fn push(&mut self, gate: Gate) -> Result<WireId, CircuitError> {
        let out = self.garbler_inputs as u64 + self.evaluator_inputs as u64 + self.gates.len() as u64;
        if out > MAX_WIRE_ID as u64 {
            return Err(CircuitError::WireIdOverflow);
        }
        self.gates.push(gate);
        Ok(out as WireId)
    }

    pub fn xor(&mut self, a: WireId, b: WireId) -> Result<WireId, CircuitError> {
        self.push(Gate::xor(a, b))
    }

    pub fn and(&mut self, a: WireId, b: WireId) -> Result<WireId, CircuitError> {
        self.push(Gate::and(a, b))
    }

    pub fn inv(&mut self, a: WireId) -> Result<WireId, CircuitError> {
        self.push(Gate::inv(a))
    }

    /// Ripple-carry addition mod 2^w of two equal-width words, w-1 ANDs.
    ///
    /// Carry recurrence: c' = c ^ ((a ^ c) & (b ^ c)).
    pub fn add_words(&mut self, a: &[WireId], b: &[WireId]) -> Result<Vec<WireId>, CircuitError> {
        assert_eq!(a.len(), b.len(), "adder operands must have equal width");
        let w = a.len();
        let mut sum = Vec::with_capacity(w);
        if w == 0 {
            return Ok(sum);
        }
        sum.push(self.xor(a[0], b[0])?);
        if w == 1 {
            return Ok(sum);
        }
        let mut carry = self.and(a[0], b[0])?;
        for i in 1..w {
            let a_xor_c = self.xor(a[i], carry)?;
            sum.push(self.xor(a_xor_c, b[i])?);
            if i + 1 < w {
                let b_xor_c = self.xor(b[i], carry)?;
                let t = self.and(a_xor_c, b_xor_c)?;
                carry = self.xor(carry, t)?;
            }
        }
        Ok(sum)
    }

    /// Schoolbook multiplication truncated to the operand width.
    pub fn mul_words(&mut self, a: &[WireId], b: &[WireId]) -> Result<Vec<WireId>, CircuitError> {
        assert_eq!(a.len(), b.len(), "multiplier operands must have equal width");
        let w = a.len();
        if w == 0 {
            return Ok(Vec::new());
        }
        // Row 0 initializes the accumulator; row i is added at offset i.
        let mut acc: Vec<WireId> = Vec::with_capacity(w);
        for j in 0..w {
            acc.push(self.and(a[j], b[0])?);
        }
        for i in 1..w {
            let mut row = Vec::with_capacity(w - i);
            for j in 0..w - i {
                row.push(self.and(a[j], b[i])?);
            }
            let upper = self.add_words(&acc[i..], &row)?;
            acc.truncate(i);
            acc.extend(upper);
        }
        Ok(acc)
    }

    pub fn mark_outputs(&mut self, wires: &[WireId]) {
        self.outputs.extend_from_slice(wires);
    }

    pub fn finish(self) -> BooleanCircuit {
        BooleanCircuit::new(
            self.garbler_inputs,
            self.evaluator_inputs,
            self.gates,
            self.outputs,
        )
        .expect("builder only emits defined wires")
    }
}

/// Sum (mod 2^bitwidth) of a garbler word and an evaluator word.
pub fn build_adder(bitwidth: u32) -> Result<BooleanCircuit, CircuitError> {
    check_bitwidth(bitwidth)?;
    let mut b = CircuitBuilder::new(bitwidth as u64, bitwidth as u64)?;
    let x: Vec<WireId> = b.garbler_input_wires().collect();
    let y: Vec<WireId> = b.evaluator_input_wires().collect();
    let sum = b.add_words(&x, &y)?;
    b.mark_outputs(&sum);
    Ok(b.finish())
}

/// Product (mod 2^bitwidth) of a garbler word and an evaluator word.
pub fn build_multiplier(bitwidth: u32) -> Result<BooleanCircuit, CircuitError> {
    check_bitwidth(bitwidth)?;
    let mut b = CircuitBuilder::new(bitwidth as u64, bitwidth as u64)?;
    let x: Vec<WireId> = b.garbler_input_wires().collect();
    let y: Vec<WireId> = b.evaluator_input_wires().collect();
    let prod = b.mul_words(&x, &y)?;
    b.mark_outputs(&prod);
    Ok(b.finish())
}

/// Matrix-vector product mod 2^bitwidth. The garbler supplies the matrix
/// (row-major, little-endian bits per element), the evaluator the vector;
/// output row r is sum_c M[r][c] * v[c].
pub fn build_matvec(rows: usize, cols: usize, bitwidth: u32) -> Result<BooleanCircuit, CircuitError> {
    check_bitwidth(bitwidth)?;
    assert!(rows >= 1 && cols >= 1, "matvec needs rows, cols >= 1");
    let w = bitwidth as u64;
    let matrix_bits = rows as u64 * cols as u64 * w;
    let vector_bits = cols as u64 * w;
    let mut b = CircuitBuilder::new(matrix_bits, vector_bits)?;

    let elem = |base: u64, index: u64| -> Vec<WireId> {
        let start = base + index * w;
        (start..start + w).map(|x| x as WireId).collect()
    };
    for r in 0..rows as u64 {
        let mut acc: Option<Vec<WireId>> = None;
        for c in 0..cols as u64 {
            let m = elem(0, r * cols as u64 + c);
            let v = elem(matrix_bits, c);
            let prod = b.mul_words(&m, &v)?;
            acc = Some(match acc {
                None => prod,
                Some(sum) => b.add_words(&sum, &prod)?,
            });
        }
        b.mark_outputs(&acc.expect("cols >= 1"));
    }
    Ok(b.finish())
}

/// AND gates in a width-w ripple-carry addition without carry-out.
pub fn adder_and_count(bitwidth: u32) -> u64 {
    bitwidth as u64 - 1
}

/// AND gates in a width-w truncated schoolbook multiplication:
/// w(w+1)/2 partial products plus (w-1)(w-2)/2 carries.
pub fn multiplier_and_count(bitwidth: u32) -> u64 {
    let w = bitwidth as u64;
    w * (w + 1) / 2 + (w - 1) * (w - 2) / 2
}

/// Closed-form AND count of [`build_matvec`].
pub fn matvec_and_count(rows: usize, cols: usize, bitwidth: u32) -> u64 {
    let (r, c) = (rows as u64, cols as u64);
    r * c * multiplier_and_count(bitwidth) + r * (c - 1) * adder_and_count(bitwidth)
}

#[cfg(test)]
mod tests {
    use super::super::{from_bits_le, to_bits_le};
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn eval_words(c: &BooleanCircuit, x: u64, y: u64, w: u32) -> u64 {
        let out = c
            .eval_plaintext(&to_bits_le(x, w), &to_bits_le(y, w))
            .unwrap();
        from_bits_le(&out)
    }

    fn mask(w: u32) -> u64 {
        if w == 64 {
            u64::MAX
        } else {
            (1u64 << w) - 1
        }
    }

    #[test]
    fn adder_32_has_31_ands() {
        let c = build_adder(32).unwrap();
        let stats = c.stats();
        assert_eq!(stats.and_count, 31);
        assert_eq!(stats.and_count, adder_and_count(32));
    }

    #[test]
    fn adder_matches_wrapping_add() {
        let mut rng = StdRng::seed_from_u64(5);
        for w in SUPPORTED_BITWIDTHS {
            let c = build_adder(w).unwrap();
            assert_eq!(c.stats().and_count, adder_and_count(w));
            for _ in 0..200 {
                let x: u64 = rng.gen::<u64>() & mask(w);
                let y: u64 = rng.gen::<u64>() & mask(w);
                assert_eq!(eval_words(&c, x, y, w), x.wrapping_add(y) & mask(w));
            }
            // Wrap boundary.
            assert_eq!(eval_words(&c, mask(w), 1, w), 0);
        }
    }

    #[test]
    fn multiplier_small_example() {
        let c = build_multiplier(8).unwrap();
        assert_eq!(eval_words(&c, 3, 2, 8), 6);
    }

    #[test]
    fn multiplier_and_counts_are_frozen() {
        // Regression constants for the schoolbook construction.
        assert_eq!(build_multiplier(8).unwrap().stats().and_count, 57);
        assert_eq!(build_multiplier(16).unwrap().stats().and_count, 241);
        assert_eq!(build_multiplier(32).unwrap().stats().and_count, 993);
        assert_eq!(multiplier_and_count(8), 57);
        assert_eq!(multiplier_and_count(16), 241);
        assert_eq!(multiplier_and_count(32), 993);
        // Same count as the published 64-bit multiplier circuit.
        assert_eq!(multiplier_and_count(64), 4033);
    }

    #[test]
    fn multiplier_matches_wrapping_mul() {
        let mut rng = StdRng::seed_from_u64(6);
        for w in [8, 16, 32, 64] {
            let c = build_multiplier(w).unwrap();
            assert_eq!(c.stats().and_count, multiplier_and_count(w));
            for _ in 0..100 {
                let x: u64 = rng.gen::<u64>() & mask(w);
                let y: u64 = rng.gen::<u64>() & mask(w);
                assert_eq!(
                    eval_words(&c, x, y, w),
                    x.wrapping_mul(y) & mask(w),
                    "w={w} x={x} y={y}"
                );
            }
        }
    }

    #[test]
    fn unsupported_bitwidth_is_rejected() {
        assert!(matches!(
            build_adder(12),
            Err(CircuitError::UnsupportedBitwidth(12))
        ));
        assert!(matches!(
            build_matvec(2, 2, 7),
            Err(CircuitError::UnsupportedBitwidth(7))
        ));
    }

    fn eval_matvec(
        c: &BooleanCircuit,
        matrix: &[u64],
        vector: &[u64],
        rows: usize,
        w: u32,
    ) -> Vec<u64> {
        let mbits: Vec<bool> = matrix.iter().flat_map(|&x| to_bits_le(x, w)).collect();
        let vbits: Vec<bool> = vector.iter().flat_map(|&x| to_bits_le(x, w)).collect();
        let out = c.eval_plaintext(&mbits, &vbits).unwrap();
        out.chunks(w as usize).map(from_bits_le).collect::<Vec<_>>()[..rows].to_vec()
    }

    #[test]
    fn matvec_1x1() {
        let c = build_matvec(1, 1, 8).unwrap();
        assert_eq!(eval_matvec(&c, &[5], &[7], 1, 8), vec![35]);
    }

    #[test]
    fn matvec_identity() {
        let c = build_matvec(2, 2, 16).unwrap();
        assert_eq!(
            eval_matvec(&c, &[1, 0, 0, 1], &[9, 4], 2, 16),
            vec![9, 4]
        );
    }

    #[test]
    fn matvec_matches_modular_oracle() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..12 {
            let rows = rng.gen_range(1..=8);
            let cols = rng.gen_range(1..=8);
            let w = if rng.gen() { 8 } else { 16 };
            let c = build_matvec(rows, cols, w).unwrap();
            let matrix: Vec<u64> = (0..rows * cols).map(|_| rng.gen::<u64>() & mask(w)).collect();
            let vector: Vec<u64> = (0..cols).map(|_| rng.gen::<u64>() & mask(w)).collect();
            let expected: Vec<u64> = (0..rows)
                .map(|r| {
                    (0..cols)
                        .fold(0u64, |acc, c_| {
                            acc.wrapping_add(matrix[r * cols + c_].wrapping_mul(vector[c_]))
                        })
                        & mask(w)
                })
                .collect();
            assert_eq!(eval_matvec(&c, &matrix, &vector, rows, w), expected);
        }
    }

    #[test]
    fn matvec_and_count_matches_closed_form() {
        for (rows, cols, w) in [(1, 1, 8), (3, 5, 8), (4, 4, 16), (2, 3, 32)] {
            let c = build_matvec(rows, cols, w).unwrap();
            assert_eq!(c.stats().and_count, matvec_and_count(rows, cols, w));
        }
        // The benchmark sizes are checked by closed form only.
        assert_eq!(matvec_and_count(1024, 1024, 32), 1_073_710_080);
    }

    #[test]
    fn matvec_input_layout() {
        let c = build_matvec(3, 2, 8).unwrap();
        assert_eq!(c.garbler_inputs(), 3 * 2 * 8);
        assert_eq!(c.evaluator_inputs(), 2 * 8);
        assert_eq!(c.outputs().len(), 3 * 8);
    }
}
