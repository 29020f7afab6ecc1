macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(rate_region, "rate_region.rs");
example!(polar_sets, "polar_sets.rs");
example!(chained_code, "chained_code.rs");
example!(share, "share.rs");
example!(leakage, "leakage.rs");
example!(hashing, "hashing.rs");
example!(experiment, "experiment.rs");

#[test]
fn rate_region_runs() {
    rate_region::run_example().unwrap();
}

#[test]
fn polar_sets_runs() {
    polar_sets::run_example().unwrap();
}

#[test]
fn chained_code_runs() {
    chained_code::run_example().unwrap();
}

#[test]
fn share_runs() {
    share::run_example().unwrap();
}

#[test]
fn leakage_runs() {
    leakage::run_example().unwrap();
}

#[test]
fn hashing_runs() {
    hashing::run_example().unwrap();
}

#[test]
fn experiment_runs() {
    experiment::run_example().unwrap();
}
