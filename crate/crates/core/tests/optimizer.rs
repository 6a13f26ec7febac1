use holo_core::testpattern::{centered_square, desk_set};
use holo_core::{
    generate, gs_optimize, psnr, reconstruct, Encoding, Geometry, GsConfig, InitialPhase, PropagationPlan,
    RealImage, Rendering,
};

const N: usize = 256;

fn desk() -> (Geometry, PropagationPlan) {
    let g = Geometry::reference().scaled_to(N);
    let plan = g.plan().unwrap();
    (g, plan)
}

fn score(target: &RealImage, holo: &holo_core::PhaseHologram, plan: &PropagationPlan) -> f64 {
    let rec = reconstruct(holo, plan, Rendering::Amplitude).unwrap();
    psnr(&target.to_gray8(), &rec).unwrap()
}

fn gs(iterations: usize, seed: u64) -> GsConfig {
    GsConfig {
        iterations,
        encoding: Encoding::PhaseOnly,
        initial_phase: InitialPhase::Random { seed },
        record_trace: true,
    }
}

/// Recorded PSNR (dB) on the 256^2 desk set, random seed 1:
/// (image, non-optimized, GS-10, convergent phase-only, convergent bleached).
const RECORDED: [(&str, f64, f64, f64, f64); 5] = [
    ("shapes", 9.7045, 13.8282, 8.5260, 14.8607),
    ("rings", 9.3113, 14.3746, 7.7215, 15.2604),
    ("bars", 9.3978, 12.7702, 8.7304, 14.6294),
    ("blobs", 13.8493, 18.4223, 11.9149, 20.6389),
    ("checker", 9.8670, 13.9401, 9.3544, 16.8278),
];
const RECORDED_TOL: f64 = 0.05;

#[test]
fn desk_set_scores_match_recorded_values() {
    let (g, plan) = desk();
    let convergent = InitialPhase::Convergent(g.convergent_spec().unwrap());
    for ((name, target), &(rec_name, base, opt, conv_po, conv_bl)) in desk_set(N).iter().zip(&RECORDED) {
        assert_eq!(*name, rec_name);
        let random = InitialPhase::Random { seed: 1 };
        let measured = [
            score(target, &generate(target, &plan, &random, Encoding::PhaseOnly).unwrap(), &plan),
            score(target, &gs_optimize(target, &plan, &gs(10, 1)).unwrap().0, &plan),
            score(target, &generate(target, &plan, &convergent, Encoding::PhaseOnly).unwrap(), &plan),
            score(target, &generate(target, &plan, &convergent, Encoding::Bleached).unwrap(), &plan),
        ];
        for (got, want) in measured.iter().zip([base, opt, conv_po, conv_bl]) {
            assert!((got - want).abs() <= RECORDED_TOL, "{name}: {got:.4} dB vs recorded {want:.4}");
        }
        assert!(measured[1] > measured[0], "{name}: GS did not improve");
        assert!(measured[3] > measured[2], "{name}: bleached not above phase-only");
    }
}

#[test]
fn residual_falls_and_trace_has_one_row_per_iteration() {
    let (_, plan) = desk();
    for (name, target) in desk_set(N) {
        let (_, trace) = gs_optimize(&target, &plan, &gs(10, 1)).unwrap();
        assert_eq!(trace.residuals.len(), 10);
        let (first, last) = (trace.residuals[0], trace.residuals[9]);
        assert!(last < first, "{name}: residual {first} -> {last}");
        assert!(trace.residuals.iter().all(|r| r.is_finite() && *r >= 0.0));
    }
}

#[test]
fn zero_iterations_is_plain_generation() {
    let (_, plan) = desk();
    let target = centered_square(N, 96);
    let (holo, trace) = gs_optimize(&target, &plan, &gs(0, 5)).unwrap();
    let plain = generate(&target, &plan, &InitialPhase::Random { seed: 5 }, Encoding::PhaseOnly).unwrap();
    assert!(trace.residuals.is_empty());
    assert_eq!(holo, plain);
}

#[test]
fn optimization_is_deterministic_and_seeded() {
    let (_, plan) = desk();
    let target = centered_square(N, 64);
    let a = gs_optimize(&target, &plan, &gs(3, 11)).unwrap();
    let b = gs_optimize(&target, &plan, &gs(3, 11)).unwrap();
    assert_eq!(a, b);
    let c = gs_optimize(&target, &plan, &gs(3, 12)).unwrap();
    assert_ne!(a.0, c.0);
}

#[test]
fn trace_can_be_disabled() {
    let (_, plan) = desk();
    let target = centered_square(N, 64);
    let cfg = GsConfig { record_trace: false, ..gs(2, 1) };
    let (holo, trace) = gs_optimize(&target, &plan, &cfg).unwrap();
    assert!(trace.residuals.is_empty());
    assert_eq!(holo, gs_optimize(&target, &plan, &gs(2, 1)).unwrap().0);
}
