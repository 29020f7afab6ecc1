// Entropy profile of a polarized Bernoulli source and the index sets it
// induces.

use polarshare::polar::{entropy_profile_exact, entropy_profile_mc, threshold, transform, PolarParams, SideLaw};

pub fn run_example() -> polarshare::Result<()> {
    let flip = 0.11;
    let law = SideLaw::from_joint(vec![[1.0 - flip, flip]])?;

    let exact = entropy_profile_exact(&law, 8)?;
    let rounded: Vec<String> = exact.values.iter().map(|h| format!("{h:.3}")).collect();
    println!("exact profile at N=8: [{}]", rounded.join(", "));
    println!("sum {:.6}", exact.values.iter().sum::<f64>());

    let params = PolarParams::new(8, 0.25)?;
    let estimated = entropy_profile_mc(&law, params.len, 4000, 17)?;
    let high = threshold(&estimated, params.delta_n);
    println!("N={} delta_N={:.3e}: {} high-entropy indices", params.len, params.delta_n, high.len());

    let word = vec![1, 0, 1, 1, 0, 0, 1, 0];
    assert_eq!(transform(&transform(&word)?)?, word);
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarshare::Result<()> {
    run_example()
}
