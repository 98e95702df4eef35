//! Closed-form-versus-oracle validation checks.
//!
//! Each check pins one quantitative claim the library is expected to
//! satisfy — oracle equivalence, internal consistency identities,
//! reference figures, inversion round trips, scaling laws and output
//! determinism — at a fixed tolerance. The `validate` subcommand prints
//! the results as a machine-readable table, and the acceptance test
//! suite asserts every check passes.

use crate::cli::output::{emit, OutputFormat};
use crate::closed_form::{
    approx_error, d_inf_1, d_inf_1_lower, d_inf_2, d_inf_3, d_t_closed_alpha2, error_envelope,
    series_sum, SeriesOptions,
};
use crate::error::Result;
use crate::link_model::{LinkBudget, MobilityProfile};
use crate::planner::{
    solve_power, solve_speed, sweep, Axis, AxisParam, FixedParameter, PlanQuery, Spacing,
    SweepFormula, SweepSpec,
};
use crate::quadrature::{integrate_finite, integrate_infinite, QuadratureSpec};
use crate::units::{InfoQuantity, Unit};

/// Outcome of one validation check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Headline observed metric (meaning given in `detail`).
    pub observed: f64,
    /// Limit the metric is held to.
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn from_max(
        name: &'static str,
        observed: f64,
        threshold: f64,
        detail: impl Into<String>,
    ) -> Self {
        CheckResult {
            name,
            passed: observed.is_finite() && observed <= threshold,
            observed,
            threshold,
            detail: detail.into(),
        }
    }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

fn tight_series() -> SeriesOptions {
    SeriesOptions {
        max_terms: 50_000,
        target_abs_error: 1e-24,
    }
}

// Deterministic 64-bit generator (splitmix64) so `validate` output is
// reproducible without a dependency on an RNG crate.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Criterion 1: the general-alpha closed form and the semi-infinite
/// quadrature oracle agree to 1e-6 relative over the S x alpha x v grid.
pub fn check_oracle_equivalence() -> CheckResult {
    let opts = SeriesOptions::default();
    let qspec = QuadratureSpec::default();
    let mut max_dev: f64 = 0.0;
    let mut worst = String::new();
    for &s in &[10.0, 1e3, 1e5, 1e7, 1e8] {
        for &alpha in &[2.0, 2.5, 3.0, 4.0] {
            for &v in &[1.0, 5.0, 50.0] {
                let budget = LinkBudget::default().with_transmit_snr(s).with_alpha(alpha);
                let profile = MobilityProfile::default().with_speed(v);
                let closed = match d_inf_1(&budget, v, &opts) {
                    Ok(r) => r.value_nats,
                    Err(e) => {
                        return CheckResult::from_max(
                            "oracle_equivalence",
                            f64::NAN,
                            1e-6,
                            e.to_string(),
                        )
                    }
                };
                let oracle = match integrate_infinite(&budget, &profile, &qspec) {
                    Ok(q) => q.value_nats,
                    Err(e) => {
                        return CheckResult::from_max(
                            "oracle_equivalence",
                            f64::NAN,
                            1e-6,
                            e.to_string(),
                        )
                    }
                };
                let dev = rel_dev(closed, oracle);
                if dev > max_dev {
                    max_dev = dev;
                    worst = format!("S={s} alpha={alpha} v={v}");
                }
            }
        }
    }
    CheckResult::from_max(
        "oracle_equivalence",
        max_dev,
        1e-6,
        format!("max |closed - quadrature| / value over 60-point grid, worst at {worst}"),
    )
}

/// Criterion 2: d_inf_1(alpha=2), d_inf_3 and d_inf_2(z0=0, x0=d0) agree
/// pairwise to 1e-10 relative.
pub fn check_consistency_triangle() -> CheckResult {
    let opts = SeriesOptions::default();
    let mut max_dev: f64 = 0.0;
    for &s in &[10.0, 1e3, 1e5, 1e8] {
        let budget = LinkBudget::default().with_transmit_snr(s);
        let profile = MobilityProfile::default();
        let general = d_inf_1(&budget, 5.0, &opts).unwrap().value_nats;
        let special = d_inf_3(&budget, 5.0).unwrap().value_nats;
        let offset_form = d_inf_2(&budget, &profile).unwrap().value_nats;
        max_dev = max_dev
            .max(rel_dev(general, special))
            .max(rel_dev(offset_form, special));
    }
    CheckResult::from_max(
        "consistency_triangle",
        max_dev,
        1e-10,
        "max pairwise relative deviation of the three alpha=2 routes",
    )
}

/// Criterion 3: the S=1 loose error envelope with default parameters is
/// 1.5e-3 MB within 4% (the reference value rounds to 1.5).
pub fn check_loose_envelope_reference() -> CheckResult {
    let env = error_envelope(&LinkBudget::default(), 5.0).unwrap();
    let mb = InfoQuantity::from_nats(env.loose_nats)
        .unwrap()
        .in_unit(Unit::Megabytes);
    let dev = (mb - 1.5e-3).abs() / 1.5e-3;
    CheckResult::from_max(
        "loose_envelope_reference",
        dev,
        0.04,
        format!("loose envelope = {mb:.6e} MB vs reference 1.5e-3 MB"),
    )
}

/// Criterion 4: with default parameters over 80% of the transmittable
/// data moves within one hour; the exact ratio is 0.831 +/- 0.005, and
/// the closed form and the quadrature oracle must both land there.
pub fn check_one_hour_endurance() -> CheckResult {
    let budget = LinkBudget::default();
    let profile = MobilityProfile::default();
    let total = d_inf_3(&budget, 5.0).unwrap().value_nats;
    let closed = d_t_closed_alpha2(&budget, &profile, 3600.0)
        .unwrap()
        .value_nats
        / total;
    let qspec = QuadratureSpec::default();
    let quad = integrate_finite(&budget, &profile, 3600.0, &qspec)
        .unwrap()
        .value_nats
        / integrate_infinite(&budget, &profile, &qspec)
            .unwrap()
            .value_nats;
    let dev = (closed - 0.831).abs().max((quad - 0.831).abs());
    let passed = closed > 0.80 && quad > 0.80 && dev <= 0.005;
    CheckResult {
        name: "one_hour_endurance",
        passed,
        observed: dev,
        threshold: 0.005,
        detail: format!(
            "|ratio - 0.831| with ratio {closed:.6} (closed) / {quad:.6} (oracle), both > 0.80"
        ),
    }
}

/// Criterion 5: over 1000 sampled (S, alpha, v), the error chain
/// 0 < error <= tight envelope <= loose envelope holds, the error equals
/// the tight envelope at alpha = 2 to 1e-12 relative, and the error
/// decays monotonically to zero along increasing-S chains.
pub fn check_corollary1_chain() -> CheckResult {
    let opts = tight_series();
    let mut rng = SplitMix64(0x1d_ab5eed);
    let mut worst_ratio: f64 = 0.0; // err / tight, must stay in (0, 1]
    let mut failures = 0usize;
    for _ in 0..1000 {
        let s = 10f64.powf(rng.uniform(0.01, 9.0));
        let alpha = rng.uniform(2.0, 6.0);
        let v = 10f64.powf(rng.uniform(-1.0, 2.0));
        let budget = LinkBudget::default().with_transmit_snr(s).with_alpha(alpha);
        let err = approx_error(&budget, v, &opts).unwrap();
        let env = error_envelope(&budget, v).unwrap();
        let upper = d_inf_1(&budget, v, &opts).unwrap().value_nats;
        let lower = d_inf_1_lower(&budget, v).unwrap().value_nats;
        let chain_ok = err > 0.0
            && err <= env.tight_nats * (1.0 + 1e-12)
            && env.tight_nats <= env.loose_nats * (1.0 + 1e-15)
            // the subtracted difference agrees with the direct error up
            // to the cancellation floor of the two big evaluations
            && ((upper - lower) - err).abs() <= 1e-12 * upper.abs().max(1.0);
        if !chain_ok {
            failures += 1;
        }
        worst_ratio = worst_ratio.max(err / env.tight_nats);
    }

    // alpha = 2: error and tight envelope are the same quantity
    let mut max_eq_dev: f64 = 0.0;
    for &s in &[1.5, 10.0, 1e3, 1e6, 1e9] {
        let budget = LinkBudget::default().with_transmit_snr(s);
        let err = approx_error(&budget, 5.0, &opts).unwrap();
        let env = error_envelope(&budget, 5.0).unwrap();
        max_eq_dev = max_eq_dev.max(rel_dev(err, env.tight_nats));
    }

    // monotone decay to zero along increasing S
    let mut monotone = true;
    for &alpha in &[2.0, 3.0, 6.0] {
        let mut prev = f64::INFINITY;
        for i in 0..=9 {
            let s = 10f64.powf(0.02 + i as f64);
            let budget = LinkBudget::default().with_transmit_snr(s).with_alpha(alpha);
            let err = approx_error(&budget, 5.0, &opts).unwrap();
            monotone &= err < prev;
            prev = err;
        }
        monotone &= prev < 1e-3;
    }

    let passed = failures == 0 && max_eq_dev <= 1e-12 && monotone;
    CheckResult {
        name: "corollary1_chain",
        passed,
        observed: max_eq_dev,
        threshold: 1e-12,
        detail: format!(
            "alpha=2 error/tight deviation; chain failures {failures}/1000, max err/tight {worst_ratio:.6}, monotone decay {monotone}"
        ),
    }
}

/// Criterion 6: truncating the series at 100 terms differs from 10^4
/// terms by less than the reported remainder bound.
pub fn check_series_truncation() -> CheckResult {
    let exhaustive = SeriesOptions {
        max_terms: 10_000,
        target_abs_error: 1e-300,
    };
    let hundred = SeriesOptions {
        max_terms: 100,
        target_abs_error: 1e-300,
    };
    let mut worst: f64 = 0.0;
    for &s in &[1.05, 1.5, 2.0, 5.0, 10.0, 1e2, 1e4, 1e8] {
        for &alpha in &[2.0, 3.0, 4.0, 6.0] {
            let short = series_sum(s, alpha, &hundred).unwrap();
            let long = series_sum(s, alpha, &exhaustive).unwrap();
            let diff = (short.value - long.value).abs();
            if short.remainder_bound > 0.0 {
                worst = worst.max(diff / short.remainder_bound);
            } else {
                worst = worst.max(if diff > 0.0 { f64::INFINITY } else { 0.0 });
            }
        }
    }
    CheckResult::from_max(
        "series_truncation",
        worst,
        1.0,
        "max |sum_100 - sum_10000| / remainder_bound over the S x alpha sample",
    )
}

/// Criterion 7: inversion round trips. solve_speed reproduces the target
/// to 1e-12, solve_power to 1e-9, and the two are mutually consistent on
/// a 10 x 10 (P, M) grid.
pub fn check_planner_round_trips() -> CheckResult {
    let opts = SeriesOptions::default();
    let mut max_speed_dev: f64 = 0.0;
    let mut max_power_dev: f64 = 0.0;
    let mut max_mutual_dev: f64 = 0.0;
    for i in 0..10 {
        let power = 10f64.powf(-3.0 + 5.0 * i as f64 / 9.0);
        for j in 0..10 {
            let m = 10f64.powf(5.0 + 4.0 * j as f64 / 9.0);
            let target = InfoQuantity::from_nats(m).unwrap();
            let q = PlanQuery::new(target, FixedParameter::PowerW(power), 2.0);
            let v = solve_speed(&q).unwrap();
            let budget = LinkBudget::default().with_tx_power(power);
            let back = d_inf_1(&budget, v, &opts).unwrap().value_nats;
            max_speed_dev = max_speed_dev.max(rel_dev(back, m));

            let pq = PlanQuery::new(target, FixedParameter::SpeedMps(v), 2.0);
            let solved_power = solve_power(&pq).unwrap();
            let back_budget = LinkBudget::default().with_tx_power(solved_power);
            let back_m = d_inf_1(&back_budget, v, &opts).unwrap().value_nats;
            max_power_dev = max_power_dev.max(rel_dev(back_m, m));
            max_mutual_dev = max_mutual_dev.max(rel_dev(solved_power, power));
        }
    }
    let passed = max_speed_dev <= 1e-12 && max_power_dev <= 1e-9 && max_mutual_dev <= 1e-9;
    CheckResult {
        name: "planner_round_trips",
        passed,
        observed: max_power_dev,
        threshold: 1e-9,
        detail: format!(
            "power round trip (speed round trip {max_speed_dev:.3e} <= 1e-12, mutual {max_mutual_dev:.3e} <= 1e-9)"
        ),
    }
}

/// Criterion 8: exact scaling laws — v * bound is v-invariant and bounds
/// are linear in B, both to 1e-14 relative.
pub fn check_scaling_laws() -> CheckResult {
    let opts = SeriesOptions::default();
    let mut max_dev: f64 = 0.0;
    for &s in &[10.0, 1e5, 1e8] {
        for &alpha in &[2.0, 3.0] {
            let budget = LinkBudget::default().with_transmit_snr(s).with_alpha(alpha);
            let reference = d_inf_1(&budget, 1.0, &opts).unwrap().value_nats;
            for &v in &[1.0, 2.0, 10.0, 100.0] {
                let scaled = v * d_inf_1(&budget, v, &opts).unwrap().value_nats;
                max_dev = max_dev.max(rel_dev(scaled, reference));
            }
            for &factor in &[2.0, 10.0] {
                let wide = LinkBudget {
                    bandwidth_hz: factor * budget.bandwidth_hz,
                    ..budget
                };
                let scaled = d_inf_1(&wide, 1.0, &opts).unwrap().value_nats;
                max_dev = max_dev.max(rel_dev(scaled, factor * reference));
            }
        }
    }
    CheckResult::from_max(
        "scaling_laws",
        max_dev,
        1e-14,
        "max relative deviation of v-invariance and B-linearity",
    )
}

/// Criterion 9: regression guard for known literature-value mismatches.
/// The computed error values (0.1333 nats at S=1e5, v=5; 0.6667 nats at
/// v=1) relate to the published 0.333 by the alpha factor and to the
/// published 3.33e-6 through the bare series value; the published 0.278
/// nats matches nothing and must stay unreproduced.
pub fn check_literature_value_regression() -> CheckResult {
    let opts = tight_series();
    let budget = LinkBudget::default().with_tx_power(1e-3); // S = 1e5
    let err_v5 = approx_error(&budget, 5.0, &opts).unwrap();
    let err_v1 = approx_error(&budget, 1.0, &opts).unwrap();
    let series = series_sum(1e5, 2.0, &opts).unwrap().value;

    let frozen_ok = rel_dev(err_v5, 0.133_332_533_339_047_57) <= 1e-9
        && rel_dev(err_v1, 0.666_662_666_695_237_9) <= 1e-9;
    // the published 0.333 is the v=1 error without the alpha factor
    let alpha_relation = (err_v1 / 2.0 - 0.333).abs() <= 1e-3;
    // the published "3.33e-6 MB" coincides with the dimensionless series value
    let series_relation = (series - 3.33e-6).abs() <= 5e-9;
    // the published 0.278 nats is NOT reproduced by the computed error; a
    // "fix" that makes them agree would be wrong
    let stays_unreproduced = (err_v5 - 0.278).abs() > 0.1;

    let passed = frozen_ok && alpha_relation && series_relation && stays_unreproduced;
    CheckResult {
        name: "literature_value_regression",
        passed,
        observed: err_v1 / 2.0,
        threshold: 0.334,
        detail: format!(
            "err(v=1)/alpha vs published 0.333; err(v=5) = {err_v5:.6} stays distinct from published 0.278 ({})",
            if stays_unreproduced { "yes" } else { "NO" }
        ),
    }
}

fn fig2_sweep_spec() -> SweepSpec {
    SweepSpec::new(
        vec![
            Axis {
                param: AxisParam::Speed,
                min: 1.0,
                max: 100.0,
                count: 50,
                spacing: Spacing::Log,
            },
            Axis {
                param: AxisParam::Power,
                min: 1e-3,
                max: 100.0,
                count: 50,
                spacing: Spacing::Log,
            },
        ],
        SweepFormula::Thm1,
    )
}

/// Criterion 10: emitting the speed x power sweep twice is byte
/// identical, and the CSV and JSON encodings decode to exactly the same
/// values.
pub fn check_determinism() -> CheckResult {
    let spec = fig2_sweep_spec();
    let render = |fmt: OutputFormat| -> Result<Vec<u8>> {
        let table = sweep(&spec)?;
        let out = crate::cli::sweep_output_table(&table);
        let mut buf = Vec::new();
        emit(&mut buf, &out, fmt).expect("write to Vec cannot fail");
        Ok(buf)
    };
    let csv_a = match render(OutputFormat::Csv) {
        Ok(b) => b,
        Err(e) => return CheckResult::from_max("determinism", f64::NAN, 0.0, e.to_string()),
    };
    let csv_b = render(OutputFormat::Csv).unwrap();
    let json = render(OutputFormat::Json).unwrap();

    let byte_identical = csv_a == csv_b;

    // cross-format value equality, bit for bit
    let mut mismatches = 0usize;
    let text = String::from_utf8(csv_a.clone()).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let parsed: Vec<serde_json::Value> = serde_json::from_slice(&json).unwrap();
    for (line, obj) in lines.zip(&parsed) {
        for (name, field) in header.iter().zip(line.split(',')) {
            match &obj[*name] {
                serde_json::Value::Number(n) => {
                    let csv_val: f64 = field.parse().unwrap();
                    let json_val = n.as_f64().unwrap();
                    if csv_val.to_bits() != json_val.to_bits() {
                        mismatches += 1;
                    }
                }
                serde_json::Value::String(s) => {
                    if s != field {
                        mismatches += 1;
                    }
                }
                _ => mismatches += 1,
            }
        }
    }

    let passed = byte_identical && mismatches == 0 && parsed.len() == 2500;
    CheckResult {
        name: "determinism",
        passed,
        observed: mismatches as f64,
        threshold: 0.0,
        detail: format!(
            "byte-identical repeat emit: {byte_identical}; CSV/JSON bit mismatches over {} rows",
            parsed.len()
        ),
    }
}

/// Runs every check in criterion order.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check_oracle_equivalence(),
        check_consistency_triangle(),
        check_loose_envelope_reference(),
        check_one_hour_endurance(),
        check_corollary1_chain(),
        check_series_truncation(),
        check_planner_round_trips(),
        check_scaling_laws(),
        check_literature_value_regression(),
        check_determinism(),
    ]
}
