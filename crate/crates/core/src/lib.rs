//! Exact classical simulation of Simon's hidden-period algorithm and of the
//! superposition-query attacks it enables against Even-Mansour, three-round
//! Feistel, LRW/XEX, CBC-MAC, PMAC, GMAC, GCM, OCB and key-alternating slide
//! ciphers, at toy block widths (at most 24 bits) where every oracle can be
//! tabulated exhaustively.

pub mod attacks;
pub mod constructions;
pub mod gf2;
pub mod modes;
pub mod primitives;
pub mod qsim;
pub mod rng;

pub use gf2::{BitWord, FieldContext, Gf2Matrix};
pub use qsim::{FunctionTable, OracleFamily, SimonOutcome};
