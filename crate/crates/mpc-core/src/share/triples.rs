//! Trusted-dealer Beaver triples.
//!
//! The dealer runs in-process before the timed online phase and stands in
//! for a cryptographic offline protocol; generation is deterministic per
//! seed and its cost is reported as preprocessing time by the benchmark
//! harness, never folded into online time.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::{Party, RingElem, ShareError};

/// One party's shares of a multiplication triple (a, b, c) with c = a*b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeaverTriple {
    pub a: RingElem,
    pub b: RingElem,
    pub c: RingElem,
}

/// An ordered sequence of triple shares with a consumption cursor. Both
/// parties must consume their stores in the same order; running out is an
/// error, never a silent reuse.
#[derive(Debug, Clone)]
pub struct TripleStore {
    party: Party,
    triples: Vec<BeaverTriple>,
    cursor: usize,
}

impl TripleStore {
    pub fn party(&self) -> Party {
        self.party
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn remaining(&self) -> usize {
        self.triples.len() - self.cursor
    }

    pub fn take(&mut self) -> Result<BeaverTriple, ShareError> {
        let t = self
            .triples
            .get(self.cursor)
            .copied()
            .ok_or(ShareError::TriplesExhausted)?;
        self.cursor += 1;
        Ok(t)
    }
}

/// Generates `n` valid triples, split between the two parties.
/// Deterministic for a fixed seed.
pub fn dealer_generate(n: usize, seed: u64) -> (TripleStore, TripleStore) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut p0 = Vec::with_capacity(n);
    let mut p1 = Vec::with_capacity(n);
    for _ in 0..n {
        let a = rng.next_u64();
        let b = rng.next_u64();
        let c = a.wrapping_mul(b);
        let a0 = rng.next_u64();
        let b0 = rng.next_u64();
        let c0 = rng.next_u64();
        p0.push(BeaverTriple {
            a: a0,
            b: b0,
            c: c0,
        });
        p1.push(BeaverTriple {
            a: a.wrapping_sub(a0),
            b: b.wrapping_sub(b0),
            c: c.wrapping_sub(c0),
        });
    }
    (
        TripleStore {
            party: Party::P0,
            triples: p0,
            cursor: 0,
        },
        TripleStore {
            party: Party::P1,
            triples: p1,
            cursor: 0,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_satisfy_multiplicative_relation() {
        let (mut p0, mut p1) = dealer_generate(500, 99);
        for _ in 0..500 {
            let t0 = p0.take().unwrap();
            let t1 = p1.take().unwrap();
            let a = t0.a.wrapping_add(t1.a);
            let b = t0.b.wrapping_add(t1.b);
            let c = t0.c.wrapping_add(t1.c);
            assert_eq!(c, a.wrapping_mul(b));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let (a0, a1) = dealer_generate(32, 7);
        let (b0, b1) = dealer_generate(32, 7);
        assert_eq!(a0.triples, b0.triples);
        assert_eq!(a1.triples, b1.triples);
        let (c0, _) = dealer_generate(32, 8);
        assert_ne!(a0.triples, c0.triples);
    }

    #[test]
    fn empty_store() {
        let (mut p0, p1) = dealer_generate(0, 1);
        assert!(p0.is_empty() && p1.is_empty());
        assert!(matches!(p0.take(), Err(ShareError::TriplesExhausted)));
    }

    #[test]
    fn exhaustion_is_an_error() {
        let (mut p0, _) = dealer_generate(2, 1);
        p0.take().unwrap();
        p0.take().unwrap();
        assert_eq!(p0.remaining(), 0);
        assert!(matches!(p0.take(), Err(ShareError::TriplesExhausted)));
    }
}
