//! QC-LDPC joint source-channel coding: construction, encoding, AWGN channel,
//! and layered joint decoding in double precision and 6-bit fixed point.

pub mod arith;
pub mod channel;
pub mod code;
pub mod codefile;
pub mod decoder;
pub mod encoder;
pub mod error;
pub mod fixed;
pub mod gf2;
pub mod graph;
pub mod interleaver;
pub mod pbm;
pub mod sweep;
pub mod textio;

pub use code::QcCode;
pub use decoder::{decode, decode_q6, DecodeConfig, DecodeResult, Engine, JointDecoder, Schedule};
pub use encoder::EncoderContext;
pub use error::{Error, Result};
pub use gf2::{BitVector, Gf2Matrix};
