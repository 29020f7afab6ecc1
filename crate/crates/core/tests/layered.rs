use polarshare::chaining::*;
use polarshare::polar::*;
use polarshare::quantizer::*;
use polarshare::source::*;

fn opts(n: usize, beta: f64, method: ProfileMethod) -> LayerOptions {
    LayerOptions {
        params: PolarParams::new(n, beta).unwrap(),
        method,
        delta: 0.2,
        epsilon: 0.1,
        rule: FillRule::Conditional,
        seed: 5,
    }
}

fn run_trial(
    source: &JointSource,
    lower: &LayerCode,
    upper: &LayerCode,
    order: &[ParticipantSet],
    seed: u64,
) -> (LayeredOutput, Vec<bool>) {
    let k = lower.plan.total_blocks();
    let blocks = sample(source, lower.sets.len(), k, seed).unwrap();
    let budgets = (lower.draw_budget(seed + 1), upper.draw_budget(seed + 2));
    let out = layered_quantize(lower, upper, &blocks, (&budgets.0, &budgets.1), seed + 3).unwrap();
    let ok = order
        .iter()
        .map(|a| {
            let (u, v) = layered_decode(lower, upper, (&out.lower_frame, &out.upper_frame), *a, &blocks).unwrap();
            u == out.lower.quantized && v == out.upper.quantized
        })
        .collect();
    (out, ok)
}

#[test]
fn constant_lower_layer_reduces_to_single_layer() {
    let source = make_bss_source(&[0.1, 0.2]).unwrap();
    let v_given_x = BinaryChannel::bsc(0.05).unwrap();
    let order = vec![ParticipantSet(1), ParticipantSet(2)];
    let o = opts(3, 0.3, ProfileMethod::Exact);
    let layered = JointModel::new(&source, &TestChannel::layered(v_given_x.clone(), BinaryChannel::constant()));
    let single = JointModel::new(&source, &TestChannel::single(v_given_x));
    let (lower, upper) = LayerCode::layered(&layered, &order, &o).unwrap();
    let reference = LayerCode::single(&single, &order, &o).unwrap();
    assert!(lower.sets.v_u_given_x.is_empty());
    for a in &order {
        assert!(lower.sets.message_positions(*a).unwrap().is_empty());
        assert_eq!(upper.sets.message_positions(*a).unwrap(), reference.sets.message_positions(*a).unwrap());
    }
    assert_eq!(upper.sets.v_u_given_x, reference.sets.v_u_given_x);
    assert!(lower.sets.h_u_given_y.iter().all(|(_, h)| h.is_empty()));
    let (out, _) = run_trial(&source, &lower, &upper, &order, 40);
    assert!(out.lower.quantized.iter().all(|u| u.iter().all(|&b| b == 0)));
    assert_eq!(out.lower_frame.payload_bits(), 0);
}

#[test]
fn identical_upper_layer_sends_nothing() {
    let source = make_bss_source(&[0.1, 0.2]).unwrap();
    let order = vec![ParticipantSet(1), ParticipantSet(2)];
    let model = JointModel::new(
        &source,
        &TestChannel::layered(BinaryChannel::bsc(0.1).unwrap(), BinaryChannel::identity()),
    );
    let (lower, upper) = LayerCode::layered(&model, &order, &opts(3, 0.3, ProfileMethod::Exact)).unwrap();
    for a in &order {
        assert!(upper.sets.message_positions(*a).unwrap().is_empty());
    }
    assert!(upper.sets.v_u_given_x.is_empty());
    let (out, _) = run_trial(&source, &lower, &upper, &order, 50);
    assert_eq!(out.upper_frame.payload_bits(), 0);
    assert_eq!(out.rate(), out.lower_frame.rate());
    assert_eq!(out.upper.quantized, out.lower.quantized);
}

fn thm6_instance() -> (JointSource, JointModel) {
    let source = make_bss_source(&[0.05, 0.3]).unwrap();
    let channel = TestChannel::layered(BinaryChannel::bsc(0.05).unwrap(), BinaryChannel::bsc(0.2).unwrap());
    let model = JointModel::new(&source, &channel);
    (source, model)
}

fn layered_message_rate(model: &JointModel, n: usize) -> f64 {
    let order = vec![ParticipantSet(1)];
    let o = opts(n, 0.1, ProfileMethod::MonteCarlo { samples: 20_000 });
    let (lower, upper) = LayerCode::layered(model, &order, &o).unwrap();
    (lower.sets.message_positions(order[0]).unwrap().len() + upper.sets.message_positions(order[0]).unwrap().len())
        as f64
        / (1usize << n) as f64
}

#[test]
fn layered_message_sizes_approach_the_rate() {
    let (_, model) = thm6_instance();
    let target = model.mutual_info(&[Var::U], &[Var::X], &[Var::Y(1)]).unwrap()
        + model.mutual_info(&[Var::V], &[Var::X], &[Var::U, Var::Y(1)]).unwrap();
    let small = layered_message_rate(&model, 7);
    let large = layered_message_rate(&model, 10);
    eprintln!("message bits per symbol: N=128 {small:.4}, N=1024 {large:.4}, target {target:.4}");
    assert!(large >= target - 0.02);
    assert!(large - target < small - target);
}

#[test]
fn layered_reliability() {
    let (source, model) = thm6_instance();
    let order = vec![ParticipantSet(1)];
    let o = opts(10, 0.4, ProfileMethod::MonteCarlo { samples: 20_000 });
    let (lower, upper) = LayerCode::layered(&model, &order, &o).unwrap();
    let trials = 20;
    let mut failures = 0;
    for t in 0..trials {
        let (out, ok) = run_trial(&source, &lower, &upper, &order, 100 * t);
        assert_eq!(out.lower_frame.rate() + out.upper_frame.rate(), out.rate());
        failures += ok.iter().filter(|&&b| !b).count();
    }
    eprintln!("plan {:?}, failures {failures}/{trials}", lower.plan.levels);
    assert!(failures as f64 <= 0.1 * trials as f64 + 2.0);
}
