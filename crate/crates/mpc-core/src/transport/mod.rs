//! Duplex, instrumented, flush-delimited byte channels between two parties.
//!
//! A [`Channel`] is one endpoint of a reliable, ordered byte stream. Writes
//! are buffered locally; [`Channel::flush`] hands the whole buffer to the
//! backend as one message and counts a message/flush. The stream itself is
//! raw: no length prefixes or other metadata are injected, so protocol
//! transcripts on the wire are exactly the bytes the protocol wrote.
//!
//! Three backends are provided:
//!
//! * [`pair_in_memory`] without a profile: a plain in-process queue pair.
//! * [`pair_in_memory`] with a [`NetworkProfile`]: every flushed message is
//!   withheld from the receiver until `send_time + rtt/2 + bytes/bandwidth +
//!   per_message_overhead`, by real waiting, so wall-clock measurements over
//!   the channel reflect the emulated network.
//! * [`connect_socket`] / [`listen_socket`]: a TCP stream with Nagle
//!   coalescing disabled.
//!
//! Within one endpoint, `send`/`flush` must be driven by a single logical
//! thread and `recv` by a single logical thread (which may be the same one);
//! the two endpoints of a pair may live on different threads or processes.

use std::time::Duration;

use thiserror::Error;

mod mem;
mod socket;

pub use mem::pair_in_memory;
pub use socket::{connect_socket, listen_socket, SocketListener};

/// Errors surfaced by channel operations.
#[derive(Debug, Error)]
pub enum TransportError {
    /// The peer endpoint was dropped or the connection was shut down before
    /// the requested bytes arrived.
    #[error("channel closed by peer")]
    Closed,
    /// Establishing an outgoing connection failed.
    #[error("connect failed: {0}")]
    Connect(#[source] std::io::Error),
    /// Binding or accepting on a listening address failed.
    #[error("bind/accept failed: {0}")]
    Bind(#[source] std::io::Error),
    /// Any other I/O error on an established channel.
    #[error("channel i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Emulated link characteristics: round-trip time in seconds, bandwidth in
/// bits per second, and a fixed per-message overhead in seconds.
///
/// `bandwidth` may be `f64::INFINITY` to disable the transfer-time term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkProfile {
    pub rtt: f64,
    pub bandwidth: f64,
    pub per_message_overhead: f64,
}

impl NetworkProfile {
    /// Creates a profile. Panics if `rtt < 0`, `bandwidth <= 0` or
    /// `per_message_overhead < 0`.
    pub fn new(rtt: f64, bandwidth: f64, per_message_overhead: f64) -> Self {
        assert!(rtt.is_finite() && rtt >= 0.0, "rtt must be finite and >= 0");
        assert!(bandwidth > 0.0, "bandwidth must be > 0");
        assert!(
            per_message_overhead.is_finite() && per_message_overhead >= 0.0,
            "per_message_overhead must be finite and >= 0"
        );
        Self {
            rtt,
            bandwidth,
            per_message_overhead,
        }
    }

    /// A directly cabled 10 Gbit/s NIC pair driven through the kernel
    /// network stack: ping reports roughly a 800 microsecond RTT.
    pub fn x710() -> Self {
        Self::new(800e-6, 10e9, 0.0)
    }

    /// A directly cabled 200 Gbit/s NIC pair with kernel bypass: roughly a
    /// 1 microsecond one-way latency, i.e. a 2 microsecond RTT.
    pub fn cx7() -> Self {
        Self::new(2e-6, 200e9, 0.0)
    }

    /// A wide-area profile: 40 ms RTT, 1 Gbit/s.
    pub fn wan() -> Self {
        Self::new(40e-3, 1e9, 0.0)
    }

    pub(crate) fn one_way(&self) -> Duration {
        Duration::from_secs_f64(self.rtt / 2.0)
    }

    /// Time the link is occupied serializing `bytes`, including the
    /// per-message overhead.
    pub(crate) fn transfer_time(&self, bytes: usize) -> Duration {
        let secs = self.per_message_overhead + bytes as f64 * 8.0 / self.bandwidth;
        Duration::from_secs_f64(secs)
    }
}

/// Monotonic traffic counters for one endpoint.
///
/// `flushes` counts non-empty flushes, i.e. message boundaries initiated by
/// this endpoint. Counters are protocol-structural: for a fixed protocol and
/// flush policy they are identical across runs regardless of timing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChannelStats {
    pub bytes_sent: u64,
    pub bytes_received: u64,
    pub messages_sent: u64,
    pub flushes: u64,
}

/// One side of a backend: delivers whole messages out, fills exact byte
/// counts in.
pub(crate) trait ChannelBackend: Send {
    fn send_message(&mut self, data: &[u8]) -> Result<(), TransportError>;
    fn recv_exact(&mut self, buf: &mut [u8]) -> Result<(), TransportError>;
}

/// One endpoint of a duplex byte channel.
pub struct Channel {
    backend: Box<dyn ChannelBackend>,
    sendbuf: Vec<u8>,
    stats: ChannelStats,
}

impl std::fmt::Debug for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Channel")
            .field("pending", &self.sendbuf.len())
            .field("stats", &self.stats)
            .finish()
    }
}

impl Channel {
    pub(crate) fn new(backend: Box<dyn ChannelBackend>) -> Self {
        Self {
            backend,
            sendbuf: Vec::new(),
            stats: ChannelStats::default(),
        }
    }

    /// Appends bytes to the outgoing buffer. A zero-length send is a no-op.
    /// Nothing is visible to the peer until [`Channel::flush`].
    pub fn send(&mut self, bytes: &[u8]) -> Result<(), TransportError> {
        self.sendbuf.extend_from_slice(bytes);
        Ok(())
    }

    /// Hands all buffered bytes to the backend as one message. A flush with
    /// an empty buffer does nothing and does not touch the counters.
    pub fn flush(&mut self) -> Result<(), TransportError> {
        if self.sendbuf.is_empty() {
            return Ok(());
        }
        self.backend.send_message(&self.sendbuf)?;
        self.stats.bytes_sent += self.sendbuf.len() as u64;
        self.stats.messages_sent += 1;
        self.stats.flushes += 1;
        self.sendbuf.clear();
        Ok(())
    }

    /// Number of bytes currently buffered and not yet flushed.
    pub fn pending_bytes(&self) -> usize {
        self.sendbuf.len()
    }

    /// Blocks until exactly `n` bytes are available and returns them.
    /// `recv(0)` returns immediately with an empty vector.
    pub fn recv(&mut self, n: usize) -> Result<Vec<u8>, TransportError> {
        let mut buf = vec![0u8; n];
        self.recv_into(&mut buf)?;
        Ok(buf)
    }

    /// Like [`Channel::recv`] but fills a caller-provided buffer exactly.
    pub fn recv_into(&mut self, buf: &mut [u8]) -> Result<(), TransportError> {
        if buf.is_empty() {
            return Ok(());
        }
        self.backend.recv_exact(buf)?;
        self.stats.bytes_received += buf.len() as u64;
        Ok(())
    }

    /// Current counter snapshot.
    pub fn stats(&self) -> ChannelStats {
        self.stats
    }
}
