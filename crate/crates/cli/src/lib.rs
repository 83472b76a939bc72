//! Library surface of the CLI: serialization, targets, verification suites,
//! and sweeps. The binary in `main.rs` is a thin argument layer over these.

pub mod netfile;
pub mod sweep;
pub mod targets;
pub mod verify;
