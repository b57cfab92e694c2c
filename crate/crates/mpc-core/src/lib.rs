pub mod circuit;
pub mod garble;
pub mod transport;
