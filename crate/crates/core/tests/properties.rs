use mfscp_core::generate::{random_instance, RandomSpec};
use mfscp_core::mf::{solve, MfState, SolverParams};
use mfscp_core::{emit, parse, parse_auto, FormatKind, Overrides, PenaltyMode, ScpInstance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_instance(seed: u64) -> ScpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = RandomSpec {
        rows: rng.gen_range(1..=30),
        cols: rng.gen_range(2..=40),
        density: rng.gen_range(0.05..0.9),
        cost_min: 1,
        cost_max: rng.gen_range(1..=100),
    };
    random_instance(&mut rng, &spec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn round_trip_both_formats(seed in any::<u64>()) {
        let inst = small_instance(seed);
        for kind in [FormatKind::RowOrdering, FormatKind::ColumnOrdering] {
            let text = emit(&inst, kind);
            prop_assert_eq!(&parse(text.as_bytes(), kind).unwrap(), &inst);
            prop_assert!(text.lines().all(|l| l.split_whitespace().count() <= 12));
        }
    }

    #[test]
    fn parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_auto(&bytes);
    }

    #[test]
    fn parser_never_panics_on_digits(tokens in proptest::collection::vec(0u32..20, 0..60)) {
        let text: Vec<String> = tokens.iter().map(u32::to_string).collect();
        let _ = parse_auto(text.join(" ").as_bytes());
    }

    #[test]
    fn gradient_is_two_point_difference(seed in any::<u64>(), alpha in 0.1f64..3.0) {
        let inst = small_instance(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let v: Vec<f64> = (0..inst.n_cols()).map(|_| rng.gen_range(0.01..0.99)).collect();
        let i = rng.gen_range(0..inst.n_cols());
        for mode in [PenaltyMode::Multilinear, PenaltyMode::Piecewise] {
            let params = SolverParams { alpha, penalty_mode: mode, ..SolverParams::default() };
            let mut state = MfState::new(&inst, &params);
            state.set_v(&inst, &params, &v);
            let mut hi = v.clone();
            let mut lo = v.clone();
            hi[i] = 1.0;
            lo[i] = 0.0;
            let exact = inst.energy(&hi, alpha, mode).unwrap() - inst.energy(&lo, alpha, mode).unwrap();
            let de = state.delta_e(&inst, i, alpha, mode);
            let scale = exact.abs().max(1e-12);
            prop_assert!(((de - exact) / scale).abs() < 1e-8, "{de} vs {exact}");
        }
    }
}

#[test]
fn cache_survives_many_updates() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let spec = RandomSpec {
        rows: 60,
        cols: 300,
        density: 0.05,
        cost_min: 1,
        cost_max: 50,
    };
    let inst = random_instance(&mut rng, &spec);
    let params = SolverParams {
        alpha: 1.05,
        ..SolverParams::default()
    };
    let mut state = MfState::new(&inst, &params);
    for _ in 0..10_000 {
        state.temperature = rng.gen_range(0.005..5.0);
        let i = rng.gen_range(0..inst.n_cols());
        state.update_variable(&inst, i, &params);
    }
    assert!(state.cache_error(&inst) < 1e-9, "{}", state.cache_error(&inst));
}

#[test]
fn high_temperature_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..20 {
        let inst = small_instance(trial);
        let params = SolverParams {
            alpha: 1.05,
            ..SolverParams::default()
        };
        let mut state = MfState::new(&inst, &params);
        let v: Vec<f64> = (0..inst.n_cols()).map(|_| rng.gen::<f64>()).collect();
        state.set_v(&inst, &params, &v);
        state.temperature = 1e9;
        state.sweep(&inst, &params);
        let worst = state.v().iter().map(|x| (x - 0.5).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }
}

#[test]
fn seeded_solves_repeat() {
    for seed in 0..5 {
        let inst = small_instance(seed + 100);
        let a = solve(&inst, &Overrides::with_seed(seed)).unwrap();
        let b = solve(&inst, &Overrides::with_seed(seed)).unwrap();
        assert!(a.same_result(&b));
    }
}

#[test]
fn published_listings_agree() {
    let row = "4 5\n1 2 3 4 5\n3 1 3 5\n2 2 4\n3 1 2 5\n3 3 4 5\n";
    let col = "4 5\n1 2 1 3\n2 2 2 3\n3 2 1 4\n4 2 2 4\n5 3 1 3 4\n";
    let a = parse(row.as_bytes(), FormatKind::RowOrdering).unwrap();
    let b = parse(col.as_bytes(), FormatKind::ColumnOrdering).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, mfscp_core::example_instance());
}
