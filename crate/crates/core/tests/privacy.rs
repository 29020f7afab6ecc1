use polarshare::chaining::*;
use polarshare::polar::*;
use polarshare::privacy::*;
use polarshare::quantizer::FillRule;
use polarshare::seed;
use polarshare::source::*;
use proptest::prelude::*;
use rand::Rng as _;

/// Shift-and-add product reduced bit by bit.
fn schoolbook_mul(a: u64, b: u64, degree: usize, poly: u64) -> u64 {
    let mut acc = 0u128;
    for i in 0..64 {
        if b >> i & 1 == 1 {
            acc ^= (a as u128) << i;
        }
    }
    for i in (degree..128).rev() {
        if acc >> i & 1 == 1 {
            acc ^= (poly as u128) << (i - degree);
        }
    }
    acc as u64
}

fn poly_word(m: &Modulus) -> u64 {
    m.polynomial().words()[0]
}

fn trial_division_irreducible(f: u64) -> bool {
    let degree = 63 - f.leading_zeros() as usize;
    for d in 1..=degree / 2 {
        for g in (1u64 << d)..(1u64 << (d + 1)) {
            let mut r = f;
            while r != 0 && 63 - r.leading_zeros() as usize >= d {
                r ^= g << (63 - r.leading_zeros() as usize - d);
            }
            if r == 0 {
                return false;
            }
        }
    }
    degree >= 1
}

fn word_field(f: u64) -> Field {
    let degree = 63 - f.leading_zeros() as usize;
    let taps: Vec<usize> = (1..degree).rev().filter(|i| f >> i & 1 == 1).collect();
    Field::with_modulus(Modulus::Sparse { degree, taps })
}

#[test]
fn irreducibility_matches_trial_division() {
    for degree in 2..=11usize {
        for middle in 0..(1u64 << (degree - 1)) {
            let f = 1u64 << degree | middle << 1 | 1;
            let field = word_field(f);
            assert_eq!(field.modulus().polynomial().words()[0], f);
            assert_eq!(field.is_irreducible(), trial_division_irreducible(f), "{f:#b}");
        }
    }
}

#[test]
fn frozen_table_matches_search() {
    for (degree, taps) in FROZEN_TABLE {
        assert_eq!(search_sparse(degree).unwrap(), Modulus::Sparse { degree, taps: taps.to_vec() });
    }
}

#[test]
fn all_ones_irreducible_exactly_when_two_is_primitive() {
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 101, 131] {
        let field = Field::with_modulus(Modulus::AllOnes { degree: p as usize - 1 });
        assert_eq!(field.is_irreducible(), order_of_two(p) == p - 1, "p = {p}");
    }
}

#[test]
fn field_products_match_schoolbook_at_degree_eight() {
    let field = field_for_input(8).unwrap();
    let poly = poly_word(field.modulus());
    for a in 0..256u64 {
        for b in 0..256u64 {
            let fast = field.mul(&Poly::from_words(vec![a]), &Poly::from_words(vec![b]));
            assert_eq!(fast.words().first().copied().unwrap_or(0), schoolbook_mul(a, b, 8, poly));
        }
    }
}

#[test]
fn ring_axioms_at_degree_sixty_four() {
    let field = field_for_input(64).unwrap();
    let mut rng = seed::stream(1, "axioms", 0);
    let one = Poly::one();
    for _ in 0..200 {
        let [a, b, c]: [Poly; 3] = std::array::from_fn(|_| Poly::from_words(vec![rng.gen()]));
        assert_eq!(field.mul(&a, &field.mul(&b, &c)), field.mul(&field.mul(&a, &b), &c));
        assert_eq!(field.mul(&a, &b.add(&c)), field.mul(&a, &b).add(&field.mul(&a, &c)));
        assert_eq!(field.mul(&a, &one), a);
        assert!(field.mul(&a, &Poly::zero()).is_zero());
    }
}

#[test]
fn large_fields_multiply_consistently() {
    let bits = 3 * SEARCH_LIMIT;
    let field = field_for_input(bits).unwrap();
    assert!(matches!(field.modulus(), Modulus::AllOnes { .. }));
    assert!(field.degree() >= bits);
    let mut rng = seed::stream(2, "large", 0);
    let words = field.degree().div_ceil(64);
    let random = |rng: &mut seed::Rng| field.reduce(Poly::from_words((0..words).map(|_| rng.gen()).collect()));
    let (a, b, c) = (random(&mut rng), random(&mut rng), random(&mut rng));
    assert_eq!(field.mul(&a, &field.mul(&b, &c)), field.mul(&field.mul(&a, &b), &c));
    assert_eq!(field.mul(&a, &b), a.mul(&b).rem(&field.modulus().polynomial()));
}

#[test]
fn hash_trivial_cases() {
    for bits in [10usize, 16] {
        let family = HashFamily::new(bits, bits).unwrap();
        let mut rng = seed::stream(3, "trivial", bits as u64);
        let x: Vec<u8> = (0..bits).map(|_| rng.gen_range(0..2)).collect();
        assert_eq!(family.hash(&Poly::one(), &x).unwrap(), x);
        let r = family.draw_seed(&mut rng);
        assert_eq!(family.hash(&r, &vec![0; bits]).unwrap(), vec![0; bits]);
        assert!(matches!(family.hash(&Poly::zero(), &x), Err(polarshare::Error::ZeroSeed)));
    }
    assert!(HashFamily::new(8, 9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn hash_is_linear(bits in 1usize..300, out in 0usize..300, s in any::<u64>()) {
        let out = out.min(bits);
        let family = HashFamily::new(bits, out).unwrap();
        let mut rng = seed::stream(s, "linear", 0);
        let x: Vec<u8> = (0..bits).map(|_| rng.gen_range(0..2)).collect();
        let y: Vec<u8> = (0..bits).map(|_| rng.gen_range(0..2)).collect();
        let xy: Vec<u8> = x.iter().zip(&y).map(|(a, b)| a ^ b).collect();
        let r = family.draw_seed(&mut rng);
        let hx = family.hash(&r, &x).unwrap();
        let hy = family.hash(&r, &y).unwrap();
        let sum: Vec<u8> = hx.iter().zip(&hy).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(family.hash(&r, &xy).unwrap(), sum);
    }

    #[test]
    fn word_and_bit_hashes_agree(bits in 1usize..=20, s in any::<u64>()) {
        let family = HashFamily::new(bits, bits / 2).unwrap();
        let mut rng = seed::stream(s, "word", 0);
        let x: u64 = rng.gen_range(0..1u64 << bits);
        let r = family.draw_seed(&mut rng);
        let bits_of: Vec<u8> = (0..bits).map(|i| ((x >> (bits - 1 - i)) & 1) as u8).collect();
        let expect = family.hash(&r, &bits_of).unwrap().iter().fold(0u64, |a, &b| a << 1 | b as u64);
        prop_assert_eq!(family.hash_word(r.words()[0], x).unwrap(), expect);
    }
}

#[test]
fn two_universal_for_small_fields() {
    for m in 1..=6usize {
        let seeds = (1u64 << m) - 1;
        for r in 0..=m {
            let family = HashFamily::new(m, r).unwrap();
            for x in 0..1u64 << m {
                for y in x + 1..1u64 << m {
                    let collisions = (1..=seeds)
                        .filter(|&s| family.hash_word(s, x).unwrap() == family.hash_word(s, y).unwrap())
                        .count() as u64;
                    assert_eq!(collisions, (1u64 << (m - r)) - 1, "m {m} r {r}");
                }
            }
        }
    }
}

fn example1() -> (JointSource, JointModel, AccessStructure) {
    let source = make_bss_source(&[0.15, 0.15]).unwrap();
    let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::identity()));
    let access = AccessStructure::new(2, &[vec![1, 2]], Some(&[vec![1], vec![2]])).unwrap();
    (source, model, access)
}

#[test]
fn secret_length_positive_for_example_one() {
    let (source, model, access) = example1();
    let terms = EntropyTerms::compute(&model, &access, false).unwrap();
    let info = exact_info(&source, &TestChannel::single(BinaryChannel::identity()), &["H(U|Y1)", "H(U|Y1,Y2)"]).unwrap();
    assert!((terms.gap() - (info["H(U|Y1)"] - info["H(U|Y1,Y2)"])).abs() < 1e-12);
    assert!(secret_length(1024, 1, 1, terms, 0.0, 0.01) > 0);
    let closed = EntropyTerms { min_unqualified: terms.max_qualified, max_qualified: terms.min_unqualified };
    assert_eq!(secret_length(1024, 4, 3, closed, 0.0, 0.0), 0);
}

fn options(n: usize, beta: f64, method: ProfileMethod) -> LayerOptions {
    LayerOptions {
        params: PolarParams::new(n, beta).unwrap(),
        method,
        delta: 0.2,
        epsilon: 0.1,
        rule: FillRule::Conditional,
        seed: 11,
    }
}

#[test]
fn noiseless_sharing_recovers_the_secret() {
    let source = make_bss_source(&[0.0, 0.0, 0.4]).unwrap();
    let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::identity()));
    let access = AccessStructure::new(3, &[vec![1], vec![2]], None).unwrap();
    let order = vec![ParticipantSet(1), ParticipantSet(2)];
    let code = LayerCode::single(&model, &order, &options(6, 0.25, ProfileMethod::MonteCarlo { samples: 2000 })).unwrap();
    let scheme = Scheme::Single(code);
    let bundle = share_secret(&source, &access, &scheme, 3, 40, 17).unwrap();
    assert_eq!(bundle.secret.len(), 40);
    for a in access.qualified() {
        assert_eq!(bundle.secret_error(*a), Some(false), "{a}");
        assert!(!bundle.any_repetition_error(*a));
    }
    let restored = SecretBundle::from_bytes(&bundle.to_bytes()).unwrap();
    assert_eq!(restored, bundle);
    assert_eq!(bundle.secret_hex().len(), 10);
    let again = share_secret(&source, &access, &scheme, 3, 40, 17).unwrap();
    assert_eq!(again, bundle);
    let empty = share_secret(&source, &access, &scheme, 1, 0, 17).unwrap();
    assert!(empty.secret.is_empty() && empty.hash_seed.is_empty());
}

fn leakage_at(flip: f64) -> f64 {
    let source = make_bss_source(&[0.05, flip]).unwrap();
    let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::identity()));
    let order = vec![ParticipantSet(1)];
    let mut code = LayerCode::single(&model, &order, &options(2, 0.25, ProfileMethod::Exact)).unwrap();
    code.plan = BlockPlan::fixed(4, vec![1]).unwrap();
    exact_leakage(&source, &code, ParticipantSet(2), 2).unwrap()
}

#[test]
fn exact_leakage_trivial_cases() {
    let source = make_bss_source(&[0.05, 0.2]).unwrap();
    let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::independent()));
    let access = AccessStructure::new(2, &[vec![1]], Some(&[vec![2]])).unwrap();
    let terms = EntropyTerms::compute(&model, &access, false).unwrap();
    assert_eq!(secret_length(4, 1, 1, terms, 0.0, 0.0), 0);
    let mut code = LayerCode::single(&model, &[ParticipantSet(1)], &options(2, 0.25, ProfileMethod::Exact)).unwrap();
    code.plan = BlockPlan::fixed(4, vec![1]).unwrap();
    assert_eq!(exact_leakage(&source, &code, ParticipantSet(2), 0).unwrap(), 0.0);
    assert!(matches!(
        exact_leakage(&source, &code, ParticipantSet(2), 3),
        Err(polarshare::Error::TooLargeForExact(_))
    ));
}

#[test]
fn exact_leakage_falls_as_the_eavesdropper_degrades() {
    let flips = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let values: Vec<f64> = flips.iter().map(|&p| leakage_at(p)).collect();
    eprintln!("leakage by eavesdropper flip {flips:?}: {values:?}");
    for w in values.windows(2) {
        assert!(w[1] < w[0], "{values:?}");
    }
}
