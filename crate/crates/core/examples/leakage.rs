// Exact mutual information between a short secret and an eavesdropper's
// view, for eavesdroppers of decreasing quality.

use polarshare::chaining::{BlockPlan, LayerCode, LayerOptions};
use polarshare::polar::{PolarParams, ProfileMethod};
use polarshare::privacy::exact_leakage;
use polarshare::quantizer::FillRule;
use polarshare::source::{make_bss_source, BinaryChannel, JointModel, ParticipantSet, TestChannel};

pub fn run_example() -> polarshare::Result<()> {
    for flip in [0.0, 0.2, 0.4] {
        let source = make_bss_source(&[0.05, flip])?;
        let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::identity()));
        let opts = LayerOptions {
            params: PolarParams::new(2, 0.25)?,
            method: ProfileMethod::Exact,
            delta: 0.2,
            epsilon: 0.1,
            rule: FillRule::Conditional,
            seed: 8,
        };
        let mut code = LayerCode::single(&model, &[ParticipantSet(1)], &opts)?;
        code.plan = BlockPlan::fixed(4, vec![1])?;
        let bits = exact_leakage(&source, &code, ParticipantSet(2), 2)?;
        println!("eavesdropper flip {flip:.1}: I(S; view) = {bits:.4} bits");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarshare::Result<()> {
    run_example()
}
