// Builds a single-layer chained code for two decoding sets, encodes a few
// source blocks and lets each qualified set decode.

use polarshare::chaining::{LayerCode, LayerOptions};
use polarshare::polar::{PolarParams, ProfileMethod};
use polarshare::privacy::Scheme;
use polarshare::quantizer::FillRule;
use polarshare::source::{make_bss_source, sample, AccessStructure, BinaryChannel, JointModel, ParticipantSet, TestChannel};

pub fn run_example() -> polarshare::Result<()> {
    let source = make_bss_source(&[0.05, 0.08])?;
    let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::identity()));
    let access = AccessStructure::new(2, &[vec![1], vec![2]], None)?;
    let order = [ParticipantSet(1), ParticipantSet(2)];
    let opts = LayerOptions {
        params: PolarParams::new(10, 0.4)?,
        method: ProfileMethod::MonteCarlo { samples: 5000 },
        delta: 0.2,
        epsilon: 0.1,
        rule: FillRule::Conditional,
        seed: 3,
    };
    let scheme = Scheme::Single(LayerCode::single(&model, &order, &opts)?);
    println!("N={} blocks={} levels={:?}", scheme.len(), scheme.blocks(), scheme.top().plan.levels);

    let blocks = sample(&source, scheme.len(), scheme.blocks(), 21)?;
    let (sequences, frames) = scheme.encode(&blocks, 22)?;
    println!("public rate {:.4}", Scheme::public_rate(&frames));
    for &set in access.qualified() {
        let estimate = scheme.decode(&frames, set, &blocks)?;
        println!("{set}: {}", if estimate == sequences { "recovered" } else { "decoding error" });
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarshare::Result<()> {
    run_example()
}
