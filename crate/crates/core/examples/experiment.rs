// Runs the `share` experiment from an inline configuration, as the command
// line tool does.

use polarshare::harness::{run, Command, ExperimentConfig, Overrides};

const CONFIG: &str = r#"
seed = 7
[source]
preset = "bss"
flips = [0.02, 0.02]
[access]
qualified = [[1], [2]]
[code]
n = 6
samples = 2000
[share]
trials = 10
secret_bits = 8
"#;

pub fn run_example() -> polarshare::Result<()> {
    let dir = std::env::temp_dir().join(format!("polarshare-example-{}", std::process::id()));
    let overrides = Overrides { out_dir: Some(dir.clone()), ..Overrides::default() };
    let config = ExperimentConfig::from_toml_with(CONFIG, &overrides)?;
    let output = run(Command::Share, &config)?;
    println!("{}", output.report);
    std::fs::remove_dir_all(dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarshare::Result<()> {
    run_example()
}
