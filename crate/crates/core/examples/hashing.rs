// Two-universal hashing over a binary extension field.

use polarshare::privacy::{collision_profile, HashFamily, PairSelection};
use polarshare::seed;

pub fn run_example() -> polarshare::Result<()> {
    let family = HashFamily::new(300, 32)?;
    println!("field degree {} for 300 input bits", family.field().degree());
    let mut rng = seed::stream(1, "hash-example", 0);
    let key = family.draw_seed(&mut rng);
    let input: Vec<u8> = (0..300).map(|i| (i % 3 == 0) as u8).collect();
    let digest = family.hash(&key, &input)?;
    println!("digest {}", digest.iter().map(|b| b.to_string()).collect::<String>());

    let report = collision_profile(6, PairSelection::All)?;
    for (r, worst) in report.worst.iter().enumerate() {
        println!("r={r}: worst collision {worst:.5}, bound {:.5}", 0.5f64.powi(r as i32));
    }
    println!("two-universal: {}", report.holds());
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarshare::Result<()> {
    run_example()
}
