//! Online phase: openings, Beaver multiplication, the matrix-vector kernel.
//!
//! Opening message layout (both directions): the sender's d-value shares as
//! little-endian 8-byte words, then its e-value shares, in layer order, with
//! no per-element framing. A plain opening sends just the share values.

use crate::transport::Channel;

use super::{add_local, BeaverTriple, Party, RingElem, Share, ShareError, TripleStore};

/// When openings are pushed to the peer: after every multiplication
/// ([`FlushPolicy::Eager`], one dependent round trip per multiplication) or
/// once per independent layer ([`FlushPolicy::Batched`]). Both parties must
/// be configured identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlushPolicy {
    Eager,
    Batched,
}

/// One dependent exchange: party 0 sends and flushes, party 1 receives
/// first and replies. Costs one full round trip of latency.
fn exchange(
    party: Party,
    channel: &mut Channel,
    payload: &[u8],
    response: &mut [u8],
) -> Result<(), ShareError> {
    match party {
        Party::P0 => {
            channel.send(payload)?;
            channel.flush()?;
            channel.recv_into(response)?;
        }
        Party::P1 => {
            channel.recv_into(response)?;
            channel.send(payload)?;
            channel.flush()?;
        }
    }
    Ok(())
}

fn uniform_party(shares: &[Share]) -> Result<Party, ShareError> {
    let party = shares[0].party;
    if shares.iter().any(|s| s.party != party) {
        return Err(ShareError::PartyMismatch);
    }
    Ok(party)
}

/// Multiplies one independent layer of share pairs, consuming one triple
/// per product. Batched policy opens the whole layer in a single exchange;
/// eager policy performs one exchange per product, waiting for the peer's
/// opening before moving on.
pub fn mul_layer(
    xs: &[Share],
    ys: &[Share],
    triples: &mut TripleStore,
    channel: &mut Channel,
    policy: FlushPolicy,
) -> Result<Vec<Share>, ShareError> {
    assert_eq!(xs.len(), ys.len(), "layer operands must pair up");
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let party = uniform_party(xs)?;
    if uniform_party(ys)? != party || triples.party() != party {
        return Err(ShareError::PartyMismatch);
    }
    match policy {
        FlushPolicy::Batched => mul_chunk(xs, ys, triples, channel, party),
        FlushPolicy::Eager => {
            let mut out = Vec::with_capacity(xs.len());
            for (&x, &y) in xs.iter().zip(ys) {
                out.extend(mul_chunk(&[x], &[y], triples, channel, party)?);
            }
            Ok(out)
        }
    }
}

fn mul_chunk(
    xs: &[Share],
    ys: &[Share],
    triples: &mut TripleStore,
    channel: &mut Channel,
    party: Party,
) -> Result<Vec<Share>, ShareError> {
    let n = xs.len();
    let mut layer: Vec<BeaverTriple> = Vec::with_capacity(n);
    for _ in 0..n {
        layer.push(triples.take()?);
    }

    // Our shares of d = x - a and e = y - b, d-values then e-values.
    let mut payload = Vec::with_capacity(16 * n);
    for (x, t) in xs.iter().zip(&layer) {
        payload.extend_from_slice(&x.value.wrapping_sub(t.a).to_le_bytes());
    }
    for (y, t) in ys.iter().zip(&layer) {
        payload.extend_from_slice(&y.value.wrapping_sub(t.b).to_le_bytes());
    }
    let mut response = vec![0u8; 16 * n];
    exchange(party, channel, &payload, &mut response)?;

    let word = |buf: &[u8], i: usize| -> RingElem {
        RingElem::from_le_bytes(buf[8 * i..8 * i + 8].try_into().unwrap())
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = word(&payload, i).wrapping_add(word(&response, i));
        let e = word(&payload, n + i).wrapping_add(word(&response, n + i));
        let t = &layer[i];
        let mut z = t
            .c
            .wrapping_add(d.wrapping_mul(t.b))
            .wrapping_add(e.wrapping_mul(t.a));
        if party == Party::P0 {
            z = z.wrapping_add(d.wrapping_mul(e));
        }
        out.push(Share::new(party, z));
    }
    Ok(out)
}

/// Multiplies a single pair of shares (a one-element layer).
pub fn mul_beaver(
    x: Share,
    y: Share,
    triples: &mut TripleStore,
    channel: &mut Channel,
    policy: FlushPolicy,
) -> Result<Share, ShareError> {
    Ok(mul_layer(&[x], &[y], triples, channel, policy)?
        .pop()
        .expect("one product"))
}

/// Reveals the listed shares to both parties in one exchange
/// (8 bytes per value per direction). An empty open sends nothing.
pub fn open(shares: &[Share], channel: &mut Channel) -> Result<Vec<RingElem>, ShareError> {
    if shares.is_empty() {
        return Ok(Vec::new());
    }
    let party = uniform_party(shares)?;
    let mut payload = Vec::with_capacity(8 * shares.len());
    for s in shares {
        payload.extend_from_slice(&s.value.to_le_bytes());
    }
    let mut response = vec![0u8; payload.len()];
    exchange(party, channel, &payload, &mut response)?;
    Ok(shares
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let peer = RingElem::from_le_bytes(response[8 * i..8 * i + 8].try_into().unwrap());
            s.value.wrapping_add(peer)
        })
        .collect())
}

/// Shared matrix (row-major, `rows * cols` entries) times shared vector
/// (`cols` entries) mod 2^64. All products form one independent layer and
/// consume exactly `rows * cols` triples; row sums are local.
pub fn matvec_ss(
    matrix_shares: &[Share],
    vector_shares: &[Share],
    rows: usize,
    cols: usize,
    triples: &mut TripleStore,
    channel: &mut Channel,
    policy: FlushPolicy,
) -> Result<Vec<Share>, ShareError> {
    assert_eq!(matrix_shares.len(), rows * cols, "matrix shape mismatch");
    assert_eq!(vector_shares.len(), cols, "vector shape mismatch");
    let ys: Vec<Share> = (0..rows * cols)
        .map(|i| vector_shares[i % cols])
        .collect();
    let products = mul_layer(matrix_shares, &ys, triples, channel, policy)?;
    let mut out = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut acc = products[r * cols];
        for c in 1..cols {
            acc = add_local(acc, products[r * cols + c])?;
        }
        out.push(acc);
    }
    Ok(out)
}
