//! Access structures, exact joint source laws, sampling and single-letter
//! information measures.

mod access;
mod info;
mod joint;
mod sample;

pub use access::{monotone_closure, AccessStructure, ParticipantSet};
pub use info::{exact_info, InfoExpr};
pub use joint::{
    binary_entropy, make_bss_source, BinaryChannel, JointModel, JointSource, Layer, TestChannel, Var,
};
pub use sample::{sample, SampleBlock};
