//! Fixed-key AES hash for garbling.
//!
//! `H(X, i) = E(K) ^ K` with `K = rotl1(X) ^ i`, where `E` is AES-128 under
//! the all-zero key and the tweak `i` is zero-extended into the low bits.
//! The construction is deterministic and fixed here so that independent
//! implementations produce identical transcripts; blocks map to bytes
//! little-endian.

use std::sync::OnceLock;

use aes::cipher::generic_array::GenericArray;
use aes::cipher::{BlockEncrypt, KeyInit};
use aes::{Aes128, Block};

use super::WireLabel;

fn cipher() -> &'static Aes128 {
    static CIPHER: OnceLock<Aes128> = OnceLock::new();
    CIPHER.get_or_init(|| Aes128::new(&GenericArray::from([0u8; 16])))
}

#[inline]
fn tweaked_key(x: u128, tweak: u64) -> u128 {
    x.rotate_left(1) ^ tweak as u128
}

/// Hashes one label under a gate tweak.
pub fn hash(label: WireLabel, tweak: u64) -> WireLabel {
    let key = tweaked_key(label.0, tweak);
    let mut block = Block::from(key.to_le_bytes());
    cipher().encrypt_block(&mut block);
    WireLabel(u128::from_le_bytes(block.into()) ^ key)
}

/// Cipher-call batch width. The AES backend pipelines independent blocks,
/// so hashing many labels per invocation is substantially faster than
/// scalar calls.
const WIDTH: usize = 32;

/// Elementwise [`hash`] over equal-length slices, writing into `out`.
pub(crate) fn hash_batch_into(labels: &[WireLabel], tweaks: &[u64], out: &mut [WireLabel]) {
    assert_eq!(labels.len(), tweaks.len(), "hash_batch: length mismatch");
    assert_eq!(labels.len(), out.len(), "hash_batch: output length mismatch");
    let mut keys = [0u128; WIDTH];
    let mut blocks = [Block::default(); WIDTH];
    let mut i = 0;
    while i < labels.len() {
        let m = (labels.len() - i).min(WIDTH);
        for j in 0..m {
            keys[j] = tweaked_key(labels[i + j].0, tweaks[i + j]);
            blocks[j] = Block::from(keys[j].to_le_bytes());
        }
        cipher().encrypt_blocks(&mut blocks[..m]);
        for j in 0..m {
            out[i + j] = WireLabel(u128::from_le_bytes(blocks[j].into()) ^ keys[j]);
        }
        i += m;
    }
}

/// Elementwise [`hash`]. Panics if the slices have different lengths.
pub fn hash_batch(labels: &[WireLabel], tweaks: &[u64]) -> Vec<WireLabel> {
    let mut out = vec![WireLabel::default(); labels.len()];
    hash_batch_into(labels, tweaks, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use std::collections::HashSet;

    #[test]
    fn zero_input_matches_published_aes_vector() {
        // K = rotl1(0) ^ 0 = 0, so H(0,0) is the AES-128 all-zero-key,
        // all-zero-block ciphertext.
        let expected: [u8; 16] = [
            0x66, 0xe9, 0x4b, 0xd4, 0xef, 0x8a, 0x2c, 0x3b, 0x88, 0x4c, 0xfa, 0x59, 0xca, 0x34,
            0x2b, 0x2e,
        ];
        assert_eq!(hash(WireLabel(0), 0).to_bytes(), expected);
    }

    #[test]
    fn hash_is_deterministic() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..100 {
            let x = WireLabel::random(&mut rng);
            assert_eq!(hash(x, 77), hash(x, 77));
        }
    }

    #[test]
    fn adjacent_tweaks_never_collide() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..10_000 {
            let x = WireLabel::random(&mut rng);
            assert_ne!(hash(x, 5), hash(x, 6));
        }
    }

    #[test]
    fn distinct_inputs_spread() {
        // Coarse injectivity smoke test over a small sample.
        let mut rng = StdRng::seed_from_u64(4);
        let mut seen = HashSet::new();
        for i in 0..1000u64 {
            assert!(seen.insert(hash(WireLabel::random(&mut rng), i).0));
        }
    }

    #[test]
    fn batch_matches_scalar() {
        let mut rng = StdRng::seed_from_u64(5);
        for n in [0usize, 1, 7, 8, 9, 64, 100] {
            let labels: Vec<WireLabel> = (0..n).map(|_| WireLabel::random(&mut rng)).collect();
            let tweaks: Vec<u64> = (0..n as u64).collect();
            let batch = hash_batch(&labels, &tweaks);
            let scalar: Vec<WireLabel> = labels
                .iter()
                .zip(&tweaks)
                .map(|(&l, &t)| hash(l, t))
                .collect();
            assert_eq!(batch, scalar, "n={n}");
        }
    }

    #[test]
    #[should_panic]
    fn batch_length_mismatch_panics() {
        hash_batch(&[WireLabel(1)], &[1, 2]);
    }
}
