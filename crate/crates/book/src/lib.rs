//! The guide under `book/src`, included chapter by chapter so its Rust
//! listings compile and run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/pauli.md")]
pub mod pauli {}

#[doc = include_str!("../../../book/src/encodings.md")]
pub mod encodings {}

#[doc = include_str!("../../../book/src/simulator.md")]
pub mod simulator {}

#[doc = include_str!("../../../book/src/ansatze.md")]
pub mod ansatze {}

#[doc = include_str!("../../../book/src/exact.md")]
pub mod exact {}

#[doc = include_str!("../../../book/src/scans.md")]
pub mod scans {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
