// End-to-end secret sharing: quantize, publish, decode and hash.

use polarshare::chaining::{LayerCode, LayerOptions};
use polarshare::polar::{PolarParams, ProfileMethod};
use polarshare::privacy::{share_secret, Scheme};
use polarshare::quantizer::FillRule;
use polarshare::source::{make_bss_source, AccessStructure, BinaryChannel, JointModel, ParticipantSet, TestChannel};

pub fn run_example() -> polarshare::Result<()> {
    let source = make_bss_source(&[0.02, 0.3])?;
    let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::bsc(0.05)?));
    let access = AccessStructure::new(2, &[vec![1]], Some(&[vec![2]]))?;
    let opts = LayerOptions {
        params: PolarParams::new(10, 0.4)?,
        method: ProfileMethod::MonteCarlo { samples: 5000 },
        delta: 0.2,
        epsilon: 0.1,
        rule: FillRule::Conditional,
        seed: 5,
    };
    let scheme = Scheme::Single(LayerCode::single(&model, &[ParticipantSet(1)], &opts)?);
    let bundle = share_secret(&source, &access, &scheme, 2, 16, 99)?;
    println!("secret {} ({} bits)", bundle.secret_hex(), bundle.secret.len());
    println!("public rate {:.4}, secret rate {:.4}", bundle.public_rate(), bundle.secret_rate());
    for &set in access.qualified() {
        println!("{set} reconstructs: {}", bundle.secret_error(set) == Some(false));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarshare::Result<()> {
    run_example()
}
