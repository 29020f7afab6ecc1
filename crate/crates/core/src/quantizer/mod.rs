//! Polar-coded vector quantization of `X` to a sequence distributed close to
//! `p_{U|X}`, with single-decoder messages and a two-layer variant.

mod budget;
mod container;
mod kernel;
mod laws;
mod layered;
mod single;

pub use budget::{FillRule, RandomBudget};
pub use kernel::{Provenance, QuantizedBlocks, Quantizer};
pub use laws::{single_layer_laws, LayerLaws};
pub use layered::{layered_decode, layered_quantize, LayeredOutput};
pub use single::{decode_single, encode_single, frozen_mask, message_from_quantized, message_rate, SingleOutput};
