use polarshare::bits::gather;
use polarshare::polar::*;
use polarshare::quantizer::*;
use polarshare::seed;
use polarshare::source::*;
use rand::Rng as _;

const LN2: f64 = std::f64::consts::LN_2;

/// `X ~ Bern(px)`, one participant observing `X` through BSC(flip).
fn skewed_source(px: f64, flip: f64) -> JointSource {
    let mut pmf = vec![0.0; 4];
    for x in 0..2 {
        for y in 0..2 {
            let p_x = if x == 1 { px } else { 1.0 - px };
            let p_y = if x == y { 1.0 - flip } else { flip };
            pmf[x + 2 * y] = p_x * p_y;
        }
    }
    JointSource::new(vec![2], pmf).unwrap()
}

struct Instance {
    model: JointModel,
    laws: LayerLaws,
    sets: IndexSets,
    len: usize,
}

fn instance(source: &JointSource, channel: BinaryChannel, n: usize, beta: f64) -> Instance {
    let model = JointModel::new(source, &TestChannel::single(channel));
    let one = ParticipantSet::from_members(&[1], source.participants()).unwrap();
    let params = PolarParams::new(n, beta).unwrap();
    let sets = construct_index_sets(&model, &[one], params, ProfileMethod::Exact, 0).unwrap();
    let laws = LayerLaws::single(&model, &[one]).unwrap();
    Instance { model, laws, sets, len: 1 << n }
}

fn word(bits: u32, len: usize) -> Vec<u8> {
    (0..len).map(|k| (bits >> k & 1) as u8).collect()
}

/// `P(V = v | X = x)` of the target law, straight from the product form.
fn true_kernel(model: &JointModel, x: &[u8], v: &[u8]) -> f64 {
    let table = model.pair_table(Var::U, &[Var::X]).unwrap();
    let u = transform(v).unwrap();
    x.iter()
        .zip(&u)
        .map(|(&xv, &uv)| {
            let row = table[xv as usize];
            row[uv as usize] / (row[0] + row[1])
        })
        .product()
}

fn x_marginal(model: &JointModel) -> [f64; 2] {
    let t = model.pair_table(Var::X, &[]).unwrap()[0];
    [t[0], t[1]]
}

/// `(D(p || p̃), V(p̃, p))` over `(x, u)` blocks by exhaustive enumeration.
fn divergence_and_distance(inst: &Instance, rule: FillRule, oracle: bool) -> (f64, f64) {
    let q = Quantizer::new(&inst.sets, &inst.laws.given_x, &inst.laws.given_base, rule);
    let px = x_marginal(&inst.model);
    let len = inst.len;
    let (mut d, mut tv) = (0.0, 0.0);
    for xw in 0..1u32 << len {
        let x = word(xw, len);
        let p_x: f64 = x.iter().map(|&b| px[b as usize]).product();
        let side_x = inst.laws.x_side(&x, None).unwrap();
        let side_base = inst.laws.base_side(len, None).unwrap();
        for vw in 0..1u32 << len {
            let v = word(vw, len);
            let p = true_kernel(&inst.model, &x, &v);
            let pt = q.kernel_probability(&side_x, &side_base, &v, oracle).unwrap();
            if p > 0.0 {
                d += p_x * p * (p / pt).log2();
            }
            tv += p_x * (p - pt).abs();
        }
    }
    (d, tv)
}

fn entropy_sum(profile: &EntropyProfile, positions: &[usize]) -> f64 {
    positions.iter().map(|&j| 1.0 - profile.values[j]).sum()
}

#[test]
fn relative_entropy_identity_n4() {
    for (source, channel) in [
        (skewed_source(0.2, 0.1), BinaryChannel::bsc(0.1).unwrap()),
        (skewed_source(0.35, 0.2), BinaryChannel::from_rows([[0.9, 0.1], [0.3, 0.7]]).unwrap()),
        (make_bss_source(&[0.15]).unwrap(), BinaryChannel::bsc(0.05).unwrap()),
    ] {
        let inst = instance(&source, channel, 2, DEFAULT_BETA);
        let law_x = SideLaw::from_model(&inst.model, Var::U, &[Var::X]).unwrap();
        let profile_x = entropy_profile_exact(&law_x, 4).unwrap();

        let (d_pub, _) = divergence_and_distance(&inst, FillRule::AsPublished, false);
        let want_pub = entropy_sum(&profile_x, &inst.sets.v_u);
        assert!((d_pub - want_pub).abs() < 1e-9, "published rule: {d_pub} vs {want_pub}");

        let (d, tv) = divergence_and_distance(&inst, FillRule::Conditional, false);
        let want = entropy_sum(&profile_x, &inst.sets.v_u_given_x);
        assert!((d - want).abs() < 1e-9, "conditional rule: {d} vs {want}");
        assert!(d <= 4.0 * inst.sets.params.delta_n + 1e-12);
        let bound = (2.0 * LN2).sqrt() * (4.0 * inst.sets.params.delta_n).sqrt();
        assert!(tv <= bound, "V = {tv} > {bound}");
        assert!(tv <= (2.0 * LN2 * d).sqrt() + 1e-12);
    }
}

#[test]
fn oracle_distance_bound_n4() {
    let inst = instance(&skewed_source(0.1, 0.1), BinaryChannel::bsc(0.05).unwrap(), 2, DEFAULT_BETA);
    let (_, tv) = divergence_and_distance(&inst, FillRule::Conditional, true);
    let p = inst.sets.params;
    assert!(tv <= p.delta1 + p.delta2);
}

#[test]
fn independent_channel_places_r1_verbatim() {
    let source = make_bss_source(&[0.1]).unwrap();
    let inst = instance(&source, BinaryChannel::independent(), 3, DEFAULT_BETA);
    assert_eq!(inst.sets.v_u_given_x.len(), 8);
    let q = Quantizer::new(&inst.sets, &inst.laws.given_x, &inst.laws.given_base, FillRule::Conditional);
    let blocks = sample(&source, 8, 5, 1).unwrap();
    let sides: Vec<Vec<usize>> = blocks.iter().map(|b| inst.laws.x_side(&b.x, None).unwrap()).collect();
    let base = vec![vec![0; 8]; 5];
    let budget = RandomBudget::draw(&inst.sets, 5, FillRule::Conditional, false, 3);
    let out = q.quantize(&sides, &base, &budget, 4, 0).unwrap();
    for (v, u) in out.transformed.iter().zip(&out.quantized) {
        assert_eq!(v, &budget.r1);
        assert_eq!(u, &transform(v).unwrap());
    }
}

#[test]
fn identity_channel_reproduces_x() {
    let source = make_bss_source(&[0.1]).unwrap();
    let inst = instance(&source, BinaryChannel::identity(), 3, DEFAULT_BETA);
    assert!(inst.sets.v_u_given_x.is_empty());
    let q = Quantizer::new(&inst.sets, &inst.laws.given_x, &inst.laws.given_base, FillRule::Conditional);
    let blocks = sample(&source, 8, 4, 2).unwrap();
    let sides: Vec<Vec<usize>> = blocks.iter().map(|b| inst.laws.x_side(&b.x, None).unwrap()).collect();
    let budget = RandomBudget::draw(&inst.sets, 4, FillRule::Conditional, false, 3);
    let out = q.quantize(&sides, &vec![vec![0; 8]; 4], &budget, 4, 0).unwrap();
    for (b, u) in blocks.iter().zip(&out.quantized) {
        assert_eq!(&b.x, u);
    }
}

#[test]
fn quantization_is_deterministic_and_checks_budget() {
    let source = make_bss_source(&[0.1]).unwrap();
    let inst = instance(&source, BinaryChannel::bsc(0.2).unwrap(), 3, DEFAULT_BETA);
    let q = Quantizer::new(&inst.sets, &inst.laws.given_x, &inst.laws.given_base, FillRule::Conditional);
    let blocks = sample(&source, 8, 6, 2).unwrap();
    let sides: Vec<Vec<usize>> = blocks.iter().map(|b| inst.laws.x_side(&b.x, None).unwrap()).collect();
    let base = vec![vec![0; 8]; 6];
    let budget = RandomBudget::draw(&inst.sets, 6, FillRule::Conditional, false, 3);
    let a = q.quantize(&sides, &base, &budget, 9, 0).unwrap();
    let b = q.quantize(&sides, &base, &budget, 9, 0).unwrap();
    assert_eq!(a, b);
    let mut bad = budget.clone();
    bad.r1.push(0);
    assert!(matches!(q.quantize(&sides, &base, &bad, 9, 0), Err(polarshare::Error::BudgetMismatch(_))));
    let published = RandomBudget::draw(&inst.sets, 5, FillRule::AsPublished, false, 3);
    let qp = Quantizer::new(&inst.sets, &inst.laws.given_x, &inst.laws.given_base, FillRule::AsPublished);
    assert!(matches!(qp.quantize(&sides, &base, &published, 9, 0), Err(polarshare::Error::BudgetMismatch(_))));
}

#[test]
fn sampled_blocks_follow_kernel() {
    let source = skewed_source(0.3, 0.1);
    let inst = instance(&source, BinaryChannel::from_rows([[0.85, 0.15], [0.25, 0.75]]).unwrap(), 2, DEFAULT_BETA);
    let q = Quantizer::new(&inst.sets, &inst.laws.given_x, &inst.laws.given_base, FillRule::Conditional);
    let x = vec![1u8, 0, 0, 1];
    let side = inst.laws.x_side(&x, None).unwrap();
    let trials = 40_000;
    let mut counts = vec![0usize; 16];
    for t in 0..trials {
        let budget = RandomBudget::draw(&inst.sets, 1, FillRule::Conditional, false, t as u64);
        let out = q.quantize(&[side.clone()], &[vec![0; 4]], &budget, 1000 + t as u64, 0).unwrap();
        let v = &out.transformed[0];
        counts[v.iter().enumerate().map(|(k, &b)| (b as usize) << k).sum::<usize>()] += 1;
    }
    for (w, &c) in counts.iter().enumerate() {
        let p = q.kernel_probability(&side, &[0; 4], &word(w as u32, 4), false).unwrap();
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let f = c as f64 / trials as f64;
        assert!((f - p).abs() <= 5.0 * sigma + 1e-12, "v={w}: freq {f} kernel {p}");
    }
}

#[test]
fn oracle_tail_depends_on_earlier_bits_only() {
    let source = skewed_source(0.05, 0.1);
    let inst = instance(&source, BinaryChannel::bsc(0.02).unwrap(), 3, DEFAULT_BETA);
    let tail = inst.sets.h_u_complement();
    assert!(!tail.is_empty());
    let q = Quantizer::new(&inst.sets, &inst.laws.given_x, &inst.laws.given_base, FillRule::Conditional);
    let blocks = sample(&source, 8, 50, 5).unwrap();
    let sides: Vec<Vec<usize>> = blocks.iter().map(|b| inst.laws.x_side(&b.x, None).unwrap()).collect();
    let base = vec![vec![0; 8]; 50];
    let budget = RandomBudget::draw(&inst.sets, 50, FillRule::Conditional, true, 6);
    let out = q.quantize_oracle(&sides, &base, &budget, 7, 0).unwrap();
    for v in &out.transformed {
        for &j in &tail {
            let p0 = sc_probability(&inst.laws.given_base, &[0; 8], v, j).unwrap();
            assert_eq!(v[j], u8::from(p0 < 0.5));
        }
    }
    let check_positions = &inst.sets.v_u_given_x;
    for (v, r) in out.transformed.iter().zip(&budget.rcheck) {
        assert_eq!(&gather(v, check_positions), r);
    }
}

#[test]
fn full_high_entropy_set_means_no_deterministic_tail() {
    let source = make_bss_source(&[0.1]).unwrap();
    let inst = instance(&source, BinaryChannel::bsc(0.1).unwrap(), 3, DEFAULT_BETA);
    assert_eq!(inst.sets.h_u.len(), 8);
    let q = Quantizer::new(&inst.sets, &inst.laws.given_x, &inst.laws.given_base, FillRule::Conditional);
    let x = vec![0u8, 1, 1, 0, 1, 0, 0, 0];
    let side = inst.laws.x_side(&x, None).unwrap();
    let mut rng = seed::stream(1, "t", 0);
    for _ in 0..20 {
        let v: Vec<u8> = (0..8).map(|_| rng.gen_range(0..2)).collect();
        let a = q.kernel_probability(&side, &[0; 8], &v, true).unwrap();
        let b = q.kernel_probability(&side, &[0; 8], &v, false).unwrap();
        assert!((a - b).abs() < 1e-15);
    }
}

fn single_setup(beta: f64, samples: usize) -> (JointSource, JointModel, IndexSets, LayerLaws, ParticipantSet) {
    let source = make_bss_source(&[0.15]).unwrap();
    let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::identity()));
    let one = ParticipantSet::from_members(&[1], 1).unwrap();
    let params = PolarParams::new(10, beta).unwrap();
    let sets = construct_index_sets(&model, &[one], params, ProfileMethod::MonteCarlo { samples }, 11).unwrap();
    let laws = LayerLaws::single(&model, &[one]).unwrap();
    (source, model, sets, laws, one)
}

#[test]
fn single_decoder_round_trip_and_rate() {
    let (source, model, sets, laws, one) = single_setup(0.1, 20_000);
    let q = Quantizer::new(&sets, &laws.given_x, &laws.given_base, FillRule::Conditional);
    let blocks = sample(&source, 1024, 8, 3).unwrap();
    let sides: Vec<Vec<usize>> = blocks.iter().map(|b| laws.x_side(&b.x, None).unwrap()).collect();
    let budget = RandomBudget::draw(&sets, 8, FillRule::Conditional, false, 4);
    let out = encode_single(&q, &sides, &vec![vec![0; 1024]; 8], one, &budget, 5).unwrap();
    let rate = message_rate(&sets, one, 8).unwrap();
    let target = exact_info(&source, &TestChannel::single(BinaryChannel::identity()), &["I(U;X|Y1)"]).unwrap()
        ["I(U;X|Y1)"]
        + sets.v_u_given_x.len() as f64 / (8.0 * 1024.0);
    eprintln!("rate {rate} target {target}");
    assert!((rate - target).abs() <= 0.05);
    let positions = sets.message_positions(one).unwrap();
    for (i, m) in out.messages.iter().enumerate() {
        assert_eq!(m, &gather(&out.blocks.transformed[i], &positions));
        assert_eq!(m, &message_from_quantized(&sets, one, &out.blocks.quantized[i]).unwrap());
        let mask = frozen_mask(&sets, one, m, &out.r1).unwrap();
        for &j in sets.decoder(one).unwrap() {
            assert_eq!(mask[j], Some(out.blocks.transformed[i][j]));
        }
    }
    let _ = model;
}

#[test]
fn noiseless_single_decoding_is_exact() {
    let source = make_bss_source(&[0.0]).unwrap();
    let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::identity()));
    let one = ParticipantSet::from_members(&[1], 1).unwrap();
    let params = PolarParams::new(8, DEFAULT_BETA).unwrap();
    let sets = construct_index_sets(&model, &[one], params, ProfileMethod::MonteCarlo { samples: 2000 }, 1).unwrap();
    let laws = LayerLaws::single(&model, &[one]).unwrap();
    let q = Quantizer::new(&sets, &laws.given_x, &laws.given_base, FillRule::Conditional);
    for s in 0..5 {
        let blocks = sample(&source, 256, 4, s).unwrap();
        let sides: Vec<Vec<usize>> = blocks.iter().map(|b| laws.x_side(&b.x, None).unwrap()).collect();
        let budget = RandomBudget::draw(&sets, 4, FillRule::Conditional, false, s + 10);
        let out = encode_single(&q, &sides, &vec![vec![0; 256]; 4], one, &budget, s + 20).unwrap();
        for (i, b) in blocks.iter().enumerate() {
            let side = laws.decoder_side(one, &b.y, None).unwrap();
            let law = laws.decoder(one).unwrap();
            let u = decode_single(&out.messages[i], &out.r1, &side, &sets, one, law).unwrap();
            assert_eq!(u, out.blocks.quantized[i]);
        }
    }
}

#[test]
fn empty_message_when_decoder_set_equals_shared_set() {
    let source = make_bss_source(&[0.1]).unwrap();
    let model = JointModel::new(&source, &TestChannel::single(BinaryChannel::independent()));
    let one = ParticipantSet::from_members(&[1], 1).unwrap();
    let sets = construct_index_sets(&model, &[one], PolarParams::new(3, 0.25).unwrap(), ProfileMethod::Exact, 0).unwrap();
    assert_eq!(sets.decoder(one).unwrap(), &sets.v_u_given_x[..]);
    assert!(sets.message_positions(one).unwrap().is_empty());
    assert_eq!(message_rate(&sets, one, 4).unwrap(), 8.0 / 32.0);
}

#[test]
fn single_decoding_error_rate_at_1024() {
    let (source, _, sets, laws, one) = single_setup(0.3, 20_000);
    let q = Quantizer::new(&sets, &laws.given_x, &laws.given_base, FillRule::Conditional);
    let law = laws.decoder(one).unwrap();
    let (mut errors, mut total) = (0usize, 0usize);
    for t in 0..200u64 {
        let blocks = sample(&source, 1024, 8, 100 + t).unwrap();
        let sides: Vec<Vec<usize>> = blocks.iter().map(|b| laws.x_side(&b.x, None).unwrap()).collect();
        let budget = RandomBudget::draw(&sets, 8, FillRule::Conditional, false, t);
        let out = encode_single(&q, &sides, &vec![vec![0; 1024]; 8], one, &budget, 500 + t).unwrap();
        for (i, b) in blocks.iter().enumerate() {
            let side = laws.decoder_side(one, &b.y, None).unwrap();
            let u = decode_single(&out.messages[i], &out.r1, &side, &sets, one, law).unwrap();
            total += 1;
            errors += usize::from(u != out.blocks.quantized[i]);
        }
    }
    let rate = errors as f64 / total as f64;
    eprintln!("block error {rate} over {total} blocks");
    assert!(rate <= 0.05);
}
