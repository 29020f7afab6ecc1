//! Block-Markov chaining: one quantization, several decoders. Each level
//! XORs the frame of the sets before it against the messages of the next
//! set, one super-block apart, so earlier sets decode forward and the new
//! set decodes backward.

mod codec;
mod frame;
mod layer;
mod plan;

pub use codec::{decode_backward, decode_forward, encode_chain, ChainCodec};
pub use frame::ChainFrame;
pub use layer::{layer_rates, LayerCode, LayerOptions};
pub use plan::{footnote_holds, footnote_k, plan_blocks, BlockPlan};
