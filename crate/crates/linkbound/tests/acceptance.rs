//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines; any failure fails the build either way.

use linkbound::cli::validation::{self, CheckResult};
use linkbound::closed_form::{approx_error, d_inf_1, d_inf_1_lower, error_envelope, SeriesOptions};
use linkbound::LinkBudget;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(criterion: usize, r: &CheckResult) {
    println!(
        "ACCEPTANCE {criterion:2} ({name}): {status} (observed {observed:.3e}, threshold {threshold:.3e}) — {detail}",
        name = r.name,
        status = if r.passed { "PASS" } else { "FAIL" },
        observed = r.observed,
        threshold = r.threshold,
        detail = r.detail,
    );
    assert!(r.passed, "criterion {criterion} failed: {r:?}");
}

#[test]
fn criterion_01_oracle_equivalence() {
    report(1, &validation::check_oracle_equivalence());
}

#[test]
fn criterion_02_consistency_triangle() {
    report(2, &validation::check_consistency_triangle());
}

#[test]
fn criterion_03_loose_envelope_reference() {
    report(3, &validation::check_loose_envelope_reference());
}

#[test]
fn criterion_04_one_hour_endurance() {
    report(4, &validation::check_one_hour_endurance());
}

#[test]
fn criterion_05_corollary1_chain() {
    // deterministic-sequence variant
    report(5, &validation::check_corollary1_chain());

    // independent draw: 1000 seeded pseudo-random (S, alpha, v) samples
    let mut rng = ChaCha8Rng::seed_from_u64(0x11af_2026);
    let opts = SeriesOptions {
        max_terms: 50_000,
        target_abs_error: 1e-24,
    };
    for i in 0..1000 {
        let s = 10f64.powf(rng.gen_range(0.01..=9.0));
        let alpha = rng.gen_range(2.0..=6.0);
        let v = 10f64.powf(rng.gen_range(-1.0..=2.0));
        let budget = LinkBudget::default().with_transmit_snr(s).with_alpha(alpha);
        let err = approx_error(&budget, v, &opts).unwrap();
        let env = error_envelope(&budget, v).unwrap();
        let upper = d_inf_1(&budget, v, &opts).unwrap().value_nats;
        let lower = d_inf_1_lower(&budget, v).unwrap().value_nats;
        assert!(
            err > 0.0,
            "sample {i}: error not positive at S={s} alpha={alpha}"
        );
        assert!(
            err <= env.tight_nats * (1.0 + 1e-12),
            "sample {i}: error above tight envelope at S={s} alpha={alpha}"
        );
        assert!(
            env.tight_nats <= env.loose_nats * (1.0 + 1e-15),
            "sample {i}: tight above loose at S={s} alpha={alpha}"
        );
        assert!(
            ((upper - lower) - err).abs() <= 1e-12 * upper.abs().max(1.0),
            "sample {i}: subtraction route disagrees with direct error"
        );
    }
    println!("ACCEPTANCE  5 (corollary1_chain, seeded redraw): PASS (1000 samples)");
}

#[test]
fn criterion_06_series_truncation() {
    report(6, &validation::check_series_truncation());
}

#[test]
fn criterion_07_planner_round_trips() {
    report(7, &validation::check_planner_round_trips());
}

#[test]
fn criterion_08_scaling_laws() {
    report(8, &validation::check_scaling_laws());
}

#[test]
fn criterion_09_literature_value_regression() {
    report(9, &validation::check_literature_value_regression());
}

#[test]
fn criterion_10_determinism() {
    report(10, &validation::check_determinism());
}
