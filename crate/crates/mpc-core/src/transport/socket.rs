//! TCP stream backend with per-message coalescing disabled.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};

use super::{Channel, ChannelBackend, TransportError};

struct SocketBackend {
    stream: TcpStream,
}

fn closed_kind(kind: std::io::ErrorKind) -> bool {
    matches!(
        kind,
        std::io::ErrorKind::UnexpectedEof
            | std::io::ErrorKind::ConnectionReset
            | std::io::ErrorKind::ConnectionAborted
            | std::io::ErrorKind::BrokenPipe
    )
}

fn map_io(err: std::io::Error) -> TransportError {
    if closed_kind(err.kind()) {
        TransportError::Closed
    } else {
        TransportError::Io(err)
    }
}

impl ChannelBackend for SocketBackend {
    fn send_message(&mut self, data: &[u8]) -> Result<(), TransportError> {
        self.stream.write_all(data).map_err(map_io)?;
        self.stream.flush().map_err(map_io)
    }

    fn recv_exact(&mut self, buf: &mut [u8]) -> Result<(), TransportError> {
        self.stream.read_exact(buf).map_err(map_io)
    }
}

fn channel_from_stream(stream: TcpStream) -> Result<Channel, TransportError> {
    // Lowest-latency configuration a kernel stream socket offers: every
    // flushed message goes out immediately instead of waiting for an ACK.
    stream.set_nodelay(true)?;
    Ok(Channel::new(Box::new(SocketBackend { stream })))
}

/// A bound, not yet connected listening endpoint. Useful when the peer needs
/// to learn the ephemeral port before connecting.
pub struct SocketListener {
    inner: TcpListener,
}

impl SocketListener {
    /// Binds to `addr` (`host:port`).
    pub fn bind<A: ToSocketAddrs>(addr: A) -> Result<Self, TransportError> {
        let inner = TcpListener::bind(addr).map_err(TransportError::Bind)?;
        Ok(Self { inner })
    }

    pub fn local_addr(&self) -> Result<SocketAddr, TransportError> {
        self.inner.local_addr().map_err(TransportError::Bind)
    }

    /// Accepts exactly one peer and returns the connected channel.
    pub fn accept(self) -> Result<Channel, TransportError> {
        let (stream, _) = self.inner.accept().map_err(TransportError::Bind)?;
        channel_from_stream(stream)
    }
}

/// Binds to `addr`, waits for one peer, and returns the connected channel.
pub fn listen_socket<A: ToSocketAddrs>(addr: A) -> Result<Channel, TransportError> {
    SocketListener::bind(addr)?.accept()
}

/// Connects to a listening peer at `addr`.
pub fn connect_socket<A: ToSocketAddrs>(addr: A) -> Result<Channel, TransportError> {
    let stream = TcpStream::connect(addr).map_err(TransportError::Connect)?;
    channel_from_stream(stream)
}
