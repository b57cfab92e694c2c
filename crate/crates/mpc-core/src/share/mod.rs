//! Additive secret sharing modulo 2^64 with Beaver-triple multiplication.
//!
//! A value `x` is split into two shares summing to `x` mod 2^64. Addition
//! (and scaling by public constants) is local and costs no communication;
//! multiplication consumes one preprocessed triple and one opening exchange
//! of 16 bytes per direction. Openings for a whole independent layer can be
//! coalesced into a single message per party ([`FlushPolicy::Batched`]) or
//! exchanged one multiplication at a time ([`FlushPolicy::Eager`]), which
//! makes the round structure of a computation directly visible in the
//! channel's flush counters.
//!
//! Every exchange is a dependent round initiated by party 0: party 0 sends
//! and flushes, party 1 receives and replies. One multiplication layer (or
//! one opening) therefore costs one full round trip, matching the cost
//! model's notion of a round.

use thiserror::Error;

use crate::transport::TransportError;

mod protocol;
mod triples;

pub use protocol::{matvec_ss, mul_beaver, mul_layer, open, FlushPolicy};
pub use triples::{dealer_generate, BeaverTriple, TripleStore};

/// Ring element: all arithmetic wraps modulo 2^64.
pub type RingElem = u64;

#[derive(Debug, Error)]
pub enum ShareError {
    #[error("operands belong to inconsistent parties")]
    PartyMismatch,
    #[error("triple store exhausted")]
    TriplesExhausted,
    #[error(transparent)]
    Transport(#[from] TransportError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    P0,
    P1,
}

impl Party {
    pub fn index(self) -> usize {
        match self {
            Party::P0 => 0,
            Party::P1 => 1,
        }
    }

    pub fn other(self) -> Party {
        match self {
            Party::P0 => Party::P1,
            Party::P1 => Party::P0,
        }
    }
}

/// One party's additive share of a ring element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Share {
    pub party: Party,
    pub value: RingElem,
}

impl Share {
    pub fn new(party: Party, value: RingElem) -> Self {
        Self { party, value }
    }
}

/// Splits `x` into a uniformly random share for party 0 and the matching
/// share for party 1.
pub fn share<R: rand::RngCore>(x: RingElem, rng: &mut R) -> (Share, Share) {
    let s0 = rng.next_u64();
    (
        Share::new(Party::P0, s0),
        Share::new(Party::P1, x.wrapping_sub(s0)),
    )
}

/// Recombines one share from each party.
pub fn reconstruct(a: Share, b: Share) -> Result<RingElem, ShareError> {
    if a.party == b.party {
        return Err(ShareError::PartyMismatch);
    }
    Ok(a.value.wrapping_add(b.value))
}

/// Share-wise addition; free of communication.
pub fn add_local(a: Share, b: Share) -> Result<Share, ShareError> {
    if a.party != b.party {
        return Err(ShareError::PartyMismatch);
    }
    Ok(Share::new(a.party, a.value.wrapping_add(b.value)))
}

/// Adds a public constant (applied by party 0 only).
pub fn add_const(s: Share, c: RingElem) -> Share {
    match s.party {
        Party::P0 => Share::new(s.party, s.value.wrapping_add(c)),
        Party::P1 => s,
    }
}

/// Multiplies by a public constant.
pub fn mul_const(s: Share, c: RingElem) -> Share {
    Share::new(s.party, s.value.wrapping_mul(c))
}
