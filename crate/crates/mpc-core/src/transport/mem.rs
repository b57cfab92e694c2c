//! In-process channel pair, optionally emulating a network profile.

use std::sync::mpsc::{Receiver, SyncSender};
use std::time::Instant;

use super::{Channel, ChannelBackend, NetworkProfile, TransportError};

/// Bounded in-flight message count per direction. Gives the sender
/// network-buffer-like backpressure instead of unbounded queueing.
const CHANNEL_DEPTH: usize = 64;

struct Message {
    deliver_at: Option<Instant>,
    data: Vec<u8>,
}

struct MemBackend {
    tx: SyncSender<Message>,
    rx: Receiver<Message>,
    profile: Option<NetworkProfile>,
    /// When our direction of the link finishes serializing everything sent
    /// so far; consecutive messages queue behind each other.
    link_busy_until: Option<Instant>,
    inbox: Vec<u8>,
    inbox_pos: usize,
}

impl MemBackend {
    fn delivery_time(&mut self, bytes: usize) -> Option<Instant> {
        let profile = self.profile?;
        let now = Instant::now();
        let start = match self.link_busy_until {
            Some(t) if t > now => t,
            _ => now,
        };
        let done = start + profile.transfer_time(bytes);
        self.link_busy_until = Some(done);
        Some(done + profile.one_way())
    }
}

fn wait_until(deadline: Instant) {
    loop {
        let now = Instant::now();
        if now >= deadline {
            return;
        }
        std::thread::sleep(deadline - now);
    }
}

impl ChannelBackend for MemBackend {
    fn send_message(&mut self, data: &[u8]) -> Result<(), TransportError> {
        let msg = Message {
            deliver_at: self.delivery_time(data.len()),
            data: data.to_vec(),
        };
        self.tx.send(msg).map_err(|_| TransportError::Closed)
    }

    fn recv_exact(&mut self, buf: &mut [u8]) -> Result<(), TransportError> {
        let mut filled = 0;
        while filled < buf.len() {
            if self.inbox_pos < self.inbox.len() {
                let take = (buf.len() - filled).min(self.inbox.len() - self.inbox_pos);
                buf[filled..filled + take]
                    .copy_from_slice(&self.inbox[self.inbox_pos..self.inbox_pos + take]);
                self.inbox_pos += take;
                filled += take;
            } else {
                let msg = self.rx.recv().map_err(|_| TransportError::Closed)?;
                if let Some(at) = msg.deliver_at {
                    wait_until(at);
                }
                self.inbox = msg.data;
                self.inbox_pos = 0;
            }
        }
        Ok(())
    }
}

/// Creates two connected in-process endpoints.
///
/// Without a profile, messages become visible to the peer as soon as they
/// are flushed. With a profile, a flushed message of `B` bytes becomes
/// visible no earlier than `send_time + rtt/2 + B*8/bandwidth +
/// per_message_overhead`, enforced by real waiting on the receiving side;
/// messages in one direction serialize behind each other.
pub fn pair_in_memory(profile: Option<NetworkProfile>) -> (Channel, Channel) {
    let (tx_ab, rx_ab) = std::sync::mpsc::sync_channel(CHANNEL_DEPTH);
    let (tx_ba, rx_ba) = std::sync::mpsc::sync_channel(CHANNEL_DEPTH);
    let a = MemBackend {
        tx: tx_ab,
        rx: rx_ba,
        profile,
        link_busy_until: None,
        inbox: Vec::new(),
        inbox_pos: 0,
    };
    let b = MemBackend {
        tx: tx_ba,
        rx: rx_ab,
        profile,
        link_busy_until: None,
        inbox: Vec::new(),
        inbox_pos: 0,
    };
    (Channel::new(Box::new(a)), Channel::new(Box::new(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::time::Duration;

    #[test]
    fn byte_conservation() {
        let (mut a, mut b) = pair_in_memory(None);
        a.send(&[1, 2, 3, 4]).unwrap();
        a.flush().unwrap();
        let got = b.recv(4).unwrap();
        assert_eq!(got, vec![1, 2, 3, 4]);
        assert_eq!(a.stats().bytes_sent, 4);
        assert_eq!(b.stats().bytes_received, 4);
    }

    #[test]
    fn fresh_channel_stats_are_zero() {
        let (a, _b) = pair_in_memory(None);
        assert_eq!(a.stats(), ChannelStats::default());
    }

    use super::super::ChannelStats;

    #[test]
    fn zero_byte_send_is_noop() {
        let (mut a, _b) = pair_in_memory(None);
        a.send(&[]).unwrap();
        a.flush().unwrap();
        assert_eq!(a.stats(), ChannelStats::default());
    }

    #[test]
    fn empty_flush_does_not_count() {
        let (mut a, mut b) = pair_in_memory(None);
        a.flush().unwrap();
        assert_eq!(a.stats().flushes, 0);
        a.send(b"xy").unwrap();
        a.send(b"z").unwrap();
        a.flush().unwrap();
        a.flush().unwrap();
        assert_eq!(a.stats().messages_sent, 1);
        assert_eq!(a.stats().flushes, 1);
        assert_eq!(b.recv(3).unwrap(), b"xyz");
    }

    #[test]
    fn recv_zero_is_nonblocking() {
        let (_a, mut b) = pair_in_memory(None);
        assert_eq!(b.recv(0).unwrap(), Vec::<u8>::new());
        assert_eq!(b.stats().bytes_received, 0);
    }

    #[test]
    fn recv_after_peer_drop_reports_closed() {
        let (mut a, mut b) = pair_in_memory(None);
        a.send(&[7, 7, 7]).unwrap();
        a.flush().unwrap();
        drop(a);
        // The three delivered bytes are still readable, the fourth is not.
        let err = b.recv(4).unwrap_err();
        assert!(matches!(err, TransportError::Closed));
    }

    #[test]
    fn ordering_matches_concatenation_of_sends() {
        // Random segmentation on the sender, random read sizes on the
        // receiver; the byte sequence must be the concatenation.
        let mut rng = StdRng::seed_from_u64(11);
        let payload: Vec<u8> = (0..10_000).map(|_| rng.gen()).collect();
        let (mut a, mut b) = pair_in_memory(None);
        let expected = payload.clone();
        let sender = std::thread::spawn(move || {
            let mut rng = StdRng::seed_from_u64(12);
            let mut off = 0;
            while off < payload.len() {
                let n = rng.gen_range(1..=257).min(payload.len() - off);
                a.send(&payload[off..off + n]).unwrap();
                off += n;
                if rng.gen_bool(0.3) {
                    a.flush().unwrap();
                }
            }
            a.flush().unwrap();
            a.stats()
        });
        let mut got = Vec::new();
        let mut rng = StdRng::seed_from_u64(13);
        while got.len() < expected.len() {
            let n = rng.gen_range(1..=401).min(expected.len() - got.len());
            got.extend_from_slice(&b.recv(n).unwrap());
        }
        let sent = sender.join().unwrap();
        assert_eq!(got, expected);
        assert_eq!(sent.bytes_sent, b.stats().bytes_received);
    }

    #[test]
    fn emulated_echo_respects_rtt() {
        let profile = NetworkProfile::x710();
        let (mut a, mut b) = pair_in_memory(Some(profile));
        let echo = std::thread::spawn(move || {
            let byte = b.recv(1).unwrap();
            b.send(&byte).unwrap();
            b.flush().unwrap();
        });
        let start = Instant::now();
        a.send(&[42]).unwrap();
        a.flush().unwrap();
        assert_eq!(a.recv(1).unwrap(), vec![42]);
        let elapsed = start.elapsed();
        echo.join().unwrap();
        assert!(
            elapsed >= Duration::from_secs_f64(profile.rtt),
            "echo took {elapsed:?}, expected at least {} s",
            profile.rtt
        );
    }

    #[test]
    fn emulated_transfer_respects_bandwidth() {
        // 1 MiB at 8 Mbit/s is at least 2^20*8 / 8e6 = 1.048576 s, and the
        // one-shot transfer should land within 20% of that.
        let profile = NetworkProfile::new(0.0, 8e6, 0.0);
        let (mut a, mut b) = pair_in_memory(Some(profile));
        let payload = vec![0xabu8; 1 << 20];
        let lower = Duration::from_secs_f64((1u64 << 20) as f64 * 8.0 / 8e6);
        let start = Instant::now();
        let recv = std::thread::spawn(move || {
            b.recv(1 << 20).unwrap();
            start.elapsed()
        });
        a.send(&payload).unwrap();
        a.flush().unwrap();
        let elapsed = recv.join().unwrap();
        assert!(elapsed >= lower, "transfer took {elapsed:?} < {lower:?}");
        assert!(
            elapsed <= lower.mul_f64(1.2),
            "transfer took {elapsed:?} > 1.2 * {lower:?}"
        );
    }

    #[test]
    fn stats_do_not_depend_on_profile() {
        let run = |profile| {
            let (mut a, mut b) = pair_in_memory(profile);
            let t = std::thread::spawn(move || {
                let got = b.recv(6).unwrap();
                b.send(&got[..2]).unwrap();
                b.flush().unwrap();
                b.stats()
            });
            a.send(b"abc").unwrap();
            a.flush().unwrap();
            a.send(b"def").unwrap();
            a.flush().unwrap();
            a.recv(2).unwrap();
            (a.stats(), t.join().unwrap())
        };
        let fast = run(None);
        let slow = run(Some(NetworkProfile::new(2e-3, 1e6, 0.0)));
        assert_eq!(fast, slow);
    }
}
