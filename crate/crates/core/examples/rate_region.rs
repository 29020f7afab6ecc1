// Public versus secret rate trade-off for the two-participant binary example,
// together with the unlimited-communication capacity.

use polarshare::rates::{capacity_cor1, flip_grid, sweep_example1};
use polarshare::source::make_bss_source;

pub fn run_example() -> polarshare::Result<()> {
    let sweep = sweep_example1(0.15, 0.15, &flip_grid(11))?;
    println!("{:>6} {:>8} {:>8}", "param", "R_p", "R_s");
    for point in &sweep.points {
        println!("{:>6.3} {:>8.4} {:>8.4}", point.param, point.public_rate, point.secret_rate);
    }
    let capacity = capacity_cor1(&make_bss_source(&[0.15, 0.15])?)?;
    println!("capacity {capacity:.4}, envelope maximum {:.4}", sweep.envelope.last().map_or(0.0, |p| p.secret_rate));
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarshare::Result<()> {
    run_example()
}
