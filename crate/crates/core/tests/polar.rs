use std::collections::BTreeMap;

use polarshare::polar::*;
use polarshare::seed;
use polarshare::source::*;
use rand::Rng as _;

fn bsc_side(flip: f64) -> SideLaw {
    SideLaw::from_joint(vec![[0.5 * (1.0 - flip), 0.5 * flip], [0.5 * flip, 0.5 * (1.0 - flip)]]).unwrap()
}

fn bernoulli(p: f64) -> SideLaw {
    SideLaw::from_joint(vec![[1.0 - p, p]]).unwrap()
}

#[test]
fn exact_uniform_profile_is_all_ones() {
    let p = entropy_profile_exact(&bernoulli(0.5), 16).unwrap();
    assert!(p.values.iter().all(|&h| (h - 1.0).abs() < 1e-12));
}

#[test]
fn exact_chain_rule() {
    let p = entropy_profile_exact(&bernoulli(0.2), 16).unwrap();
    assert!((p.sum() - 16.0 * binary_entropy(0.2)).abs() < 1e-9);
    let side = bsc_side(0.15);
    let p = entropy_profile_exact(&side, 8).unwrap();
    assert!((p.sum() - 8.0 * binary_entropy(0.15)).abs() < 1e-9);
    let three = SideLaw::from_joint(vec![[0.3, 0.05], [0.15, 0.1], [0.1, 0.3]]).unwrap();
    let p = entropy_profile_exact(&three, 4).unwrap();
    let h: f64 = (0..3)
        .map(|s| three.side_prob(s) * binary_entropy(three.conditional(s)[0]))
        .sum();
    assert!((p.sum() - 4.0 * h).abs() < 1e-9);
}

#[test]
fn exact_refuses_large_instances() {
    assert!(matches!(entropy_profile_exact(&bernoulli(0.2), 32), Err(polarshare::Error::TooLargeForExact(_))));
    assert!(matches!(entropy_profile_exact(&bsc_side(0.1), 16), Err(polarshare::Error::TooLargeForExact(_))));
}

#[test]
fn mc_uniform_and_chain_rule() {
    let p = entropy_profile_mc(&bernoulli(0.5), 256, 10_000, 1).unwrap();
    assert!(p.values.iter().all(|&h| (h - 1.0).abs() <= 0.02));
    let p = entropy_profile_mc(&bernoulli(0.2), 256, 10_000, 2).unwrap();
    assert!((p.sum() / 256.0 - binary_entropy(0.2)).abs() <= 0.02);
}

#[test]
fn mc_is_deterministic_given_seed() {
    let a = entropy_profile_mc(&bsc_side(0.1), 64, 500, 9).unwrap();
    let b = entropy_profile_mc(&bsc_side(0.1), 64, 500, 9).unwrap();
    assert_eq!(a, b);
}

fn within_sigma(mc: &EntropyProfile, exact: &EntropyProfile, k: f64) {
    for i in 0..exact.len() {
        let tol = (k * mc.std_err[i]).max(1e-9);
        assert!(
            (mc.values[i] - exact.values[i]).abs() <= tol,
            "index {i}: mc {} exact {} se {}",
            mc.values[i],
            exact.values[i],
            mc.std_err[i]
        );
    }
}

#[test]
fn mc_matches_exact_n4_with_side() {
    let law = bsc_side(0.15);
    let exact = entropy_profile_exact(&law, 4).unwrap();
    let mc = entropy_profile_mc(&law, 4, 20_000, 3).unwrap();
    within_sigma(&mc, &exact, 3.0);
}

#[test]
fn mc_matches_exact_n16_without_side() {
    let law = bernoulli(0.11);
    let exact = entropy_profile_exact(&law, 16).unwrap();
    let mc = entropy_profile_mc(&law, 16, 20_000, 4).unwrap();
    within_sigma(&mc, &exact, 4.0);
}

#[test]
fn conditioning_reduces_entropy_and_degradation_orders_sets() {
    let params = PolarParams::new(3, DEFAULT_BETA).unwrap();
    let none = entropy_profile_exact(&bernoulli(0.5), 8).unwrap();
    let mut previous = 0;
    for flip in [0.02, 0.1, 0.2, 0.35] {
        let side = entropy_profile_exact(&bsc_side(flip), 8).unwrap();
        for i in 0..8 {
            assert!(side.values[i] <= none.values[i] + 1e-12);
        }
        let h = threshold(&side, params.delta_n).len();
        assert!(h >= previous);
        previous = h;
    }
}

fn bss_model(flips: &[f64], channel: BinaryChannel) -> JointModel {
    JointModel::new(&make_bss_source(flips).unwrap(), &TestChannel::single(channel))
}

#[test]
fn uniform_source_sets_cover_everything() {
    let model = bss_model(&[0.1], BinaryChannel::identity());
    let params = PolarParams::new(3, DEFAULT_BETA).unwrap();
    let one = ParticipantSet::from_members(&[1], 1).unwrap();
    let sets = construct_index_sets(&model, &[one], params, ProfileMethod::Exact, 0).unwrap();
    assert_eq!(sets.v_u, (0..8).collect::<Vec<_>>());
    assert_eq!(sets.h_u, (0..8).collect::<Vec<_>>());
}

#[test]
fn independent_test_channel_keeps_v_given_x_equal_to_v() {
    let model = bss_model(&[0.1], BinaryChannel::independent());
    let params = PolarParams::new(3, DEFAULT_BETA).unwrap();
    let one = ParticipantSet::from_members(&[1], 1).unwrap();
    let sets = construct_index_sets(&model, &[one], params, ProfileMethod::Exact, 0).unwrap();
    assert_eq!(sets.v_u_given_x, sets.v_u);
}

#[test]
fn repair_shrinks_v_given_x() {
    let params = PolarParams::new(2, DEFAULT_BETA).unwrap();
    let ones = EntropyProfile { values: vec![1.0; 4], std_err: vec![0.0; 4], method: ProfileMethod::Exact };
    let mut decoder = ones.clone();
    decoder.values[1] = 0.0;
    let one = ParticipantSet::from_members(&[1], 1).unwrap();
    let profiles = ProfileSet { none: ones.clone(), given_x: ones.clone(), given_decoders: vec![(one, decoder)] };
    let sets = build_index_sets(&profiles, params).unwrap();
    assert_eq!(sets.v_u_given_x, vec![0, 2, 3]);
    assert_eq!(sets.repaired, vec![1]);

    let mut empty_decoder = ones.clone();
    empty_decoder.values = vec![0.0; 4];
    let profiles = ProfileSet { none: ones.clone(), given_x: ones, given_decoders: vec![(one, empty_decoder)] };
    assert!(matches!(build_index_sets(&profiles, params), Err(polarshare::Error::InclusionUnrepairable(_))));
}

#[test]
fn high_entropy_fraction_tracks_conditional_entropy() {
    let params = PolarParams::new(10, 0.1).unwrap();
    let p = entropy_profile_mc(&bsc_side(0.15), 1024, 10_000, 5).unwrap();
    let frac = threshold(&p, params.delta_n).len() as f64 / 1024.0;
    eprintln!("|H(U|Y1)|/N = {frac}, h_b(0.15) = {}", binary_entropy(0.15));
    assert!((frac - binary_entropy(0.15)).abs() <= 0.05);
}

#[test]
fn all_frozen_decodes_to_transform() {
    let law = bsc_side(0.2);
    let mut rng = seed::stream(6, "t", 0);
    let v: Vec<u8> = (0..16).map(|_| rng.gen_range(0..2)).collect();
    let frozen: BTreeMap<usize, u8> = v.iter().copied().enumerate().collect();
    let all: Vec<usize> = (0..16).collect();
    let side: Vec<usize> = (0..16).map(|_| rng.gen_range(0..2)).collect();
    assert_eq!(sc_decode(&law, &side, &all, &frozen).unwrap(), transform(&v).unwrap());
    let mut short = frozen.clone();
    short.remove(&3);
    assert!(matches!(sc_decode(&law, &side, &all, &short), Err(polarshare::Error::FrozenSetMismatch(_))));
}

fn decode_error_rate(flip: f64, beta: f64, trials: usize, seed_value: u64) -> (f64, usize) {
    let params = PolarParams::new(10, beta).unwrap();
    let law = bsc_side(flip);
    let profile = entropy_profile_mc(&law, 1024, 10_000, seed_value).unwrap();
    let h = threshold(&profile, params.delta_n);
    let mut errors = 0;
    for t in 0..trials {
        let mut rng = seed::stream(seed_value, "decode-trial", t as u64);
        let mut u = vec![0u8; 1024];
        let mut side = vec![0usize; 1024];
        for k in 0..1024 {
            let (s, b) = law.sample(&mut rng);
            side[k] = s;
            u[k] = b;
        }
        let v = transform(&u).unwrap();
        let frozen: BTreeMap<usize, u8> = h.iter().map(|&i| (i, v[i])).collect();
        if sc_decode(&law, &side, &h, &frozen).unwrap() != u {
            errors += 1;
        }
    }
    (errors as f64 / trials as f64, h.len())
}

#[test]
fn noiseless_decoding_never_fails() {
    assert_eq!(decode_error_rate(0.0, DEFAULT_BETA, 20, 7).0, 0.0);
}

#[test]
fn decoding_error_rate_at_1024() {
    let (rate, size) = decode_error_rate(0.15, 0.3, 200, 8);
    eprintln!("block error {rate} with |H| = {size}");
    assert!(rate <= 0.05);
}
