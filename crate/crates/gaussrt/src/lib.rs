//! File formats, brute-force oracles, verification suites and the command
//! line front end for [`gaussrt_core`].

pub mod cli;
pub mod document;
pub mod fock;
pub mod format;
pub mod harness;

pub use document::CmDocument;
