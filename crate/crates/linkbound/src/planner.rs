//! Design inversion and parameter sweeps over the bounds: admissible
//! (power, speed) pairs for a data target, finite-time endurance curves,
//! and deterministic grids for figure-style output.

use serde::{Deserialize, Serialize};

use crate::closed_form::{
    d_inf_1, d_inf_1_lower, d_inf_2, d_inf_3, d_t_closed_alpha2, series_sum, thm1_bracket,
    BoundResult, FormulaTag, SeriesOptions,
};
use crate::error::{Error, Result};
use crate::link_model::{LinkBudget, MobilityProfile};
use crate::quadrature::{integrate_adaptive, integrate_finite, integrate_infinite, QuadratureSpec};
use crate::units::{InfoQuantity, Unit};

/// The parameter held fixed while the other is solved for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedParameter {
    /// Transmit power in W; [`solve_speed`] finds the matching speed.
    PowerW(f64),
    /// Speed in m/s; [`solve_power`] finds the matching power.
    SpeedMps(f64),
}

/// A data-target inversion query against the 1D bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanQuery {
    /// Data target M.
    pub target: InfoQuantity,
    /// Which of (P, v) is fixed.
    pub fixed: FixedParameter,
    /// Path loss exponent.
    pub alpha: f64,
    /// Radio parameters (bandwidth, noise, reference distance, gain);
    /// the transmit power field is ignored.
    pub template: LinkBudget,
    /// Series truncation used for every bound evaluation in the solve,
    /// so that round trips against the same options are exact.
    pub series: SeriesOptions,
}

impl PlanQuery {
    pub fn new(target: InfoQuantity, fixed: FixedParameter, alpha: f64) -> Self {
        PlanQuery {
            target,
            fixed,
            alpha,
            template: LinkBudget::default(),
            series: SeriesOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.target.nats() <= 0.0 {
            return Err(Error::invalid("target", "must be > 0"));
        }
        if !self.alpha.is_finite() || self.alpha < 2.0 {
            return Err(Error::invalid(
                "alpha",
                format!("must be finite and >= 2, got {}", self.alpha),
            ));
        }
        Ok(())
    }

    fn budget_with_power(&self, power_w: f64) -> LinkBudget {
        LinkBudget {
            tx_power_w: power_w,
            path_loss_exp: self.alpha,
            ..self.template
        }
    }
}

/// Bracketed factor of the 1D bound at (S, alpha) under the query's
/// series options: D = (B d0 / v) * C(S, alpha).
fn bracket_factor(s: f64, alpha: f64, opts: &SeriesOptions) -> Result<f64> {
    let series = series_sum(s, alpha, opts)?;
    Ok(thm1_bracket(s, alpha, series.value))
}

/// S -> 1+ infimum of the bracketed factor. The series limit
/// sum (-1)^{n+1}/(alpha n + 1) converges too slowly to sum directly, so
/// it is evaluated through its integral form
/// int_0^1 t^alpha / (1 + t^alpha) dt.
fn bracket_infimum(alpha: f64) -> Result<f64> {
    let spec = QuadratureSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        ..QuadratureSpec::default()
    };
    let f = |t: f64| {
        let p = t.powf(alpha);
        p / (1.0 + p)
    };
    let series_limit = integrate_adaptive(&f, 0.0, 1.0, &spec)?.value_nats;
    Ok(thm1_bracket(1.0, alpha, series_limit))
}

/// Speed that makes the 1D bound hit the target at the query's fixed
/// power: v = B d0 C(S, alpha) / M. Exact inversion, no iteration.
pub fn solve_speed(query: &PlanQuery) -> Result<f64> {
    query.validate()?;
    let power_w = match query.fixed {
        FixedParameter::PowerW(p) => p,
        FixedParameter::SpeedMps(_) => {
            return Err(Error::invalid(
                "fixed",
                "solve_speed needs a query with fixed power",
            ))
        }
    };
    let budget = query.budget_with_power(power_w);
    budget.validate()?;
    let s = budget.transmit_snr();
    if s <= 1.0 {
        return Err(Error::SnrNotAboveOne { s });
    }
    let c = bracket_factor(s, query.alpha, &query.series)?;
    Ok(budget.bandwidth_hz * budget.ref_distance_m * c / query.target.nats())
}

/// Transmit power that makes the 1D bound hit the target at the query's
/// fixed speed. Root-finds S on the strictly increasing bracket factor
/// by bisection in ln S, then converts back through P = S sigma^2 / G.
pub fn solve_power(query: &PlanQuery) -> Result<f64> {
    query.validate()?;
    let v = match query.fixed {
        FixedParameter::SpeedMps(v) => v,
        FixedParameter::PowerW(_) => {
            return Err(Error::invalid(
                "fixed",
                "solve_power needs a query with fixed speed",
            ))
        }
    };
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::invalid("fixed_speed_mps", "must be finite and > 0"));
    }
    let template = query.budget_with_power(query.template.tx_power_w);
    template.validate()?;
    let b = template.bandwidth_hz;
    let d0 = template.ref_distance_m;
    let target_nats = query.target.nats();
    let c_target = target_nats * v / (b * d0);

    let infimum = bracket_infimum(query.alpha)?;
    if c_target <= infimum {
        return Err(Error::InfeasibleTarget {
            target_nats,
            infimum_nats: b * d0 / v * infimum,
            speed_mps: v,
        });
    }

    let eval = |ln_s: f64| bracket_factor(ln_s.exp(), query.alpha, &query.series);

    // bracket: C is strictly increasing in S and unbounded above;
    // ln S is capped below f64 overflow of exp
    let mut ln_lo = 1e-9f64; // S barely above 1
    let mut ln_hi = 10f64.ln();
    while eval(ln_hi)? < c_target {
        if ln_hi >= 700.0 {
            return Err(Error::BracketExpansionFailed {
                target_nats,
                s_hi: ln_hi.exp(),
            });
        }
        ln_lo = ln_hi;
        ln_hi = (ln_hi + (100f64).ln()).min(700.0);
    }

    // bisection to 1e-12 relative in S (ln-space width is relative width)
    for _ in 0..80 {
        if ln_hi - ln_lo <= 1e-13 * ln_hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (ln_lo + ln_hi);
        if eval(mid)? < c_target {
            ln_lo = mid;
        } else {
            ln_hi = mid;
        }
    }
    let s = (0.5 * (ln_lo + ln_hi)).exp();
    Ok(s * template.noise_power_w / template.antenna_gain)
}

/// One point of a finite-time endurance curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteTimePoint {
    pub horizon_s: f64,
    pub value_nats: f64,
    /// D_T / D_infinity, in [0, 1).
    pub ratio: f64,
}

fn infinite_bound(
    budget: &LinkBudget,
    profile: &MobilityProfile,
    qspec: &QuadratureSpec,
) -> Result<f64> {
    if budget.path_loss_exp == 2.0 {
        Ok(d_inf_2(budget, profile)?.value_nats)
    } else {
        Ok(integrate_infinite(budget, profile, qspec)?.value_nats)
    }
}

fn finite_bound(
    budget: &LinkBudget,
    profile: &MobilityProfile,
    horizon_s: f64,
    qspec: &QuadratureSpec,
) -> Result<f64> {
    if budget.path_loss_exp == 2.0 {
        Ok(d_t_closed_alpha2(budget, profile, horizon_s)?.value_nats)
    } else {
        Ok(integrate_finite(budget, profile, horizon_s, qspec)?.value_nats)
    }
}

/// D_T and its proportion of the infinite-horizon bound at each horizon.
/// Horizons must be non-negative and ascending. Uses the closed form at
/// alpha = 2 and the quadrature oracle otherwise.
pub fn finite_time_curve(
    budget: &LinkBudget,
    profile: &MobilityProfile,
    horizons_s: &[f64],
    qspec: &QuadratureSpec,
) -> Result<Vec<FiniteTimePoint>> {
    let mut prev = -1.0f64;
    for &t in horizons_s {
        if !t.is_finite() || t < 0.0 || t < prev {
            return Err(Error::invalid(
                "times",
                "horizons must be finite, non-negative and ascending",
            ));
        }
        prev = t;
    }
    let total = infinite_bound(budget, profile, qspec)?;
    horizons_s
        .iter()
        .map(|&t| {
            let value_nats = finite_bound(budget, profile, t, qspec)?;
            Ok(FiniteTimePoint {
                horizon_s: t,
                value_nats,
                ratio: value_nats / total,
            })
        })
        .collect()
}

/// Smallest horizon T at which D_T / D_infinity reaches `ratio`,
/// found by monotone bisection on T.
pub fn time_to_ratio(
    budget: &LinkBudget,
    profile: &MobilityProfile,
    ratio: f64,
    qspec: &QuadratureSpec,
) -> Result<f64> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid("ratio", "must be strictly inside (0, 1)"));
    }
    let total = infinite_bound(budget, profile, qspec)?;
    let target = ratio * total;
    let mut hi = 1.0f64;
    let mut iterations = 0;
    while finite_bound(budget, profile, hi, qspec)? < target {
        hi *= 4.0;
        iterations += 1;
        if iterations > 120 {
            return Err(Error::invalid(
                "ratio",
                "no finite horizon reaches the ratio",
            ));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        if hi - lo <= 1e-9 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if finite_bound(budget, profile, mid, qspec)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Parameter varied by a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    Power,
    Speed,
    Alpha,
    Z0,
    X0,
    Snr,
}

impl AxisParam {
    /// Column header used in emitted tables.
    pub fn label(self) -> &'static str {
        match self {
            AxisParam::Power => "P",
            AxisParam::Speed => "v",
            AxisParam::Alpha => "alpha",
            AxisParam::Z0 => "z0",
            AxisParam::X0 => "x0",
            AxisParam::Snr => "S",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "power" | "P" => Ok(AxisParam::Power),
            "speed" | "v" => Ok(AxisParam::Speed),
            "alpha" => Ok(AxisParam::Alpha),
            "z0" => Ok(AxisParam::Z0),
            "x0" => Ok(AxisParam::X0),
            "snr" | "S" => Ok(AxisParam::Snr),
            other => Err(Error::invalid(
                "axis",
                format!("unknown axis parameter `{other}` (power|speed|alpha|z0|x0|snr)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

/// One sweep axis: `count` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::invalid("axis.count", "must be >= 1"));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::invalid("axis", "bounds must be finite"));
        }
        if self.count >= 2 && self.min >= self.max {
            return Err(Error::invalid("axis", "min must be < max"));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::invalid("axis", "log spacing requires min > 0"));
        }
        let domain_ok = match self.param {
            AxisParam::Power | AxisParam::Speed | AxisParam::Snr => self.min > 0.0,
            AxisParam::Alpha => self.min >= 2.0,
            AxisParam::Z0 | AxisParam::X0 => self.min >= 0.0,
        };
        if !domain_ok {
            return Err(Error::invalid(
                "axis",
                format!(
                    "axis {} leaves the model domain at min={}",
                    self.param.label(),
                    self.min
                ),
            ));
        }
        Ok(())
    }

    fn point(&self, i: usize) -> f64 {
        if self.count == 1 {
            return self.min;
        }
        let frac = i as f64 / (self.count - 1) as f64;
        match self.spacing {
            Spacing::Linear => self.min + frac * (self.max - self.min),
            Spacing::Log => (self.min.ln() + frac * (self.max.ln() - self.min.ln())).exp(),
        }
    }
}

/// Formula evaluated at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepFormula {
    #[default]
    Thm1,
    Cor1Lower,
    Thm2,
    Cor2,
    FiniteAlpha2,
    Quadrature,
}

/// A rectangular sweep: axes in declaration order (first axis outermost),
/// one formula, one output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub formula: SweepFormula,
    pub unit: Unit,
    pub base_budget: LinkBudget,
    pub base_profile: MobilityProfile,
    /// Horizon for the finite-time formula.
    pub horizon_s: Option<f64>,
    pub series: SeriesOptions,
    pub quadrature: QuadratureSpec,
}

impl SweepSpec {
    pub fn new(axes: Vec<Axis>, formula: SweepFormula) -> Self {
        SweepSpec {
            axes,
            formula,
            unit: Unit::Nats,
            base_budget: LinkBudget::default(),
            base_profile: MobilityProfile::default(),
            horizon_s: None,
            series: SeriesOptions::default(),
            quadrature: QuadratureSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::invalid("axes", "at least one axis is required"));
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        let alpha_swept = self.axes.iter().any(|a| a.param == AxisParam::Alpha);
        let needs_alpha2 = matches!(
            self.formula,
            SweepFormula::Thm2 | SweepFormula::Cor2 | SweepFormula::FiniteAlpha2
        );
        if needs_alpha2 {
            if alpha_swept {
                return Err(Error::invalid(
                    "axes",
                    "alpha cannot be swept with an alpha=2 closed form; use thm1 or quadrature",
                ));
            }
            if self.base_budget.path_loss_exp != 2.0 {
                return Err(Error::AlphaNotTwo {
                    alpha: self.base_budget.path_loss_exp,
                });
            }
        }
        if self.formula == SweepFormula::FiniteAlpha2 && self.horizon_s.is_none() {
            return Err(Error::invalid(
                "T",
                "the finite-time formula needs a horizon",
            ));
        }
        // the whole grid must stay outside the reference distance
        let min_x0 = self
            .axes
            .iter()
            .filter(|a| a.param == AxisParam::X0)
            .map(|a| a.min)
            .fold(self.base_profile.x0_m, f64::min);
        let min_z0 = self
            .axes
            .iter()
            .filter(|a| a.param == AxisParam::Z0)
            .map(|a| a.min)
            .fold(self.base_profile.z0_m, f64::min);
        if min_x0.hypot(min_z0) < self.base_budget.ref_distance_m {
            return Err(Error::InsideReferenceDistance {
                distance: min_x0.hypot(min_z0),
                d0: self.base_budget.ref_distance_m,
                t: 0.0,
            });
        }
        Ok(())
    }

    /// Total number of grid points.
    pub fn row_count(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// Coordinates in axis order.
    pub coords: Vec<f64>,
    /// Bound value in the sweep's output unit.
    pub value: f64,
    /// Formula that actually produced the value; differs from the
    /// requested one on S <= 1 fallback rows.
    pub formula: FormulaTag,
    /// Truncation/error estimate in the output unit.
    pub truncation_error: f64,
}

/// Sweep output: rows plus the header metadata needed to emit them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub labels: Vec<String>,
    pub unit: Unit,
    pub rows: Vec<SweepRow>,
}

fn apply_coord(budget: &mut LinkBudget, profile: &mut MobilityProfile, param: AxisParam, x: f64) {
    match param {
        AxisParam::Power => budget.tx_power_w = x,
        AxisParam::Speed => profile.speed_mps = x,
        AxisParam::Alpha => budget.path_loss_exp = x,
        AxisParam::Z0 => profile.z0_m = x,
        AxisParam::X0 => profile.x0_m = x,
        AxisParam::Snr => budget.tx_power_w = x * budget.noise_power_w / budget.antenna_gain,
    }
}

fn evaluate_point(
    spec: &SweepSpec,
    budget: &LinkBudget,
    profile: &MobilityProfile,
) -> Result<BoundResult> {
    let oracle = |b: &LinkBudget, p: &MobilityProfile| -> Result<BoundResult> {
        let q = integrate_infinite(b, p, &spec.quadrature)?;
        Ok(BoundResult {
            value_nats: q.value_nats,
            formula: FormulaTag::Quadrature,
            series_terms_used: 0,
            truncation_error_nats: q.error_estimate,
        })
    };
    match spec.formula {
        SweepFormula::Thm1 => match d_inf_1(budget, profile.speed_mps, &spec.series) {
            Err(Error::SnrNotAboveOne { .. }) => oracle(budget, profile),
            other => other,
        },
        SweepFormula::Cor1Lower => match d_inf_1_lower(budget, profile.speed_mps) {
            Err(Error::SnrNotAboveOne { .. }) => oracle(budget, profile),
            other => other,
        },
        SweepFormula::Thm2 => d_inf_2(budget, profile),
        SweepFormula::Cor2 => d_inf_3(budget, profile.speed_mps),
        SweepFormula::FiniteAlpha2 => {
            d_t_closed_alpha2(budget, profile, spec.horizon_s.unwrap_or(0.0))
        }
        SweepFormula::Quadrature => oracle(budget, profile),
    }
}

/// Evaluates the full grid in row-major order over the axes as declared.
/// Output ordering is deterministic; rows on which the requested closed
/// form's S > 1 hypothesis fails carry the quadrature fallback value and
/// the `quadrature` formula tag.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let labels: Vec<String> = spec
        .axes
        .iter()
        .map(|a| a.param.label().to_string())
        .collect();
    let total = spec.row_count();
    let mut rows = Vec::with_capacity(total);
    let mut index = vec![0usize; spec.axes.len()];
    let per_nat = spec.unit.per_nat();
    for _ in 0..total {
        let mut budget = spec.base_budget;
        let mut profile = spec.base_profile;
        let coords: Vec<f64> = spec
            .axes
            .iter()
            .zip(&index)
            .map(|(axis, &i)| axis.point(i))
            .collect();
        for (axis, &x) in spec.axes.iter().zip(&coords) {
            apply_coord(&mut budget, &mut profile, axis.param, x);
        }
        let bound = evaluate_point(spec, &budget, &profile)?;
        rows.push(SweepRow {
            coords,
            value: bound.value_nats * per_nat,
            formula: bound.formula,
            truncation_error: bound.truncation_error_nats * per_nat,
        });
        // odometer increment, last axis fastest
        for pos in (0..index.len()).rev() {
            index[pos] += 1;
            if index[pos] < spec.axes[pos].count {
                break;
            }
            index[pos] = 0;
        }
    }
    Ok(SweepTable {
        labels,
        unit: spec.unit,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        (a - b).abs() / a.abs().max(b.abs())
    }

    fn nats(x: f64) -> InfoQuantity {
        InfoQuantity::from_nats(x).unwrap()
    }

    const M_1MW_V5: f64 = 1.959_891_795_562_633e7;

    #[test]
    fn solve_speed_reproduces_reference_point() {
        let q = PlanQuery::new(nats(M_1MW_V5), FixedParameter::PowerW(1e-3), 2.0);
        let v = solve_speed(&q).unwrap();
        assert!(rel_err(v, 5.0) < 1e-10, "v = {v}");
    }

    #[test]
    fn solve_speed_halves_when_target_doubles() {
        let q1 = PlanQuery::new(nats(M_1MW_V5), FixedParameter::PowerW(1e-3), 2.0);
        let q2 = PlanQuery::new(nats(2.0 * M_1MW_V5), FixedParameter::PowerW(1e-3), 2.0);
        let v1 = solve_speed(&q1).unwrap();
        let v2 = solve_speed(&q2).unwrap();
        assert!(rel_err(v1, 2.0 * v2) < 1e-14);
    }

    #[test]
    fn solve_speed_round_trip() {
        for &(p, v0, alpha) in &[(1e-3, 5.0, 2.0), (1.0, 12.0, 2.0), (0.1, 3.0, 3.5)] {
            let budget = LinkBudget::default().with_tx_power(p).with_alpha(alpha);
            let m = d_inf_1(&budget, v0, &SeriesOptions::default())
                .unwrap()
                .value_nats;
            let q = PlanQuery::new(nats(m), FixedParameter::PowerW(p), alpha);
            let v = solve_speed(&q).unwrap();
            let back = d_inf_1(&budget, v, &SeriesOptions::default())
                .unwrap()
                .value_nats;
            assert!(rel_err(back, m) < 1e-12, "p={p} alpha={alpha}");
            assert!(rel_err(v, v0) < 1e-12);
        }
    }

    #[test]
    fn solve_speed_rejects_low_snr() {
        let q = PlanQuery::new(nats(1e6), FixedParameter::PowerW(1e-9), 2.0);
        assert!(matches!(solve_speed(&q), Err(Error::SnrNotAboveOne { .. })));
    }

    #[test]
    fn solve_power_reproduces_reference_points() {
        let q = PlanQuery::new(nats(M_1MW_V5), FixedParameter::SpeedMps(5.0), 2.0);
        let p = solve_power(&q).unwrap();
        assert!(rel_err(p, 1e-3) < 1e-9, "P = {p}");

        let m_full = d_inf_1(&LinkBudget::default(), 5.0, &SeriesOptions::default())
            .unwrap()
            .value_nats;
        let q = PlanQuery::new(nats(m_full), FixedParameter::SpeedMps(5.0), 2.0);
        let p = solve_power(&q).unwrap();
        assert!(rel_err(p, 1.0) < 1e-9, "P = {p}");
    }

    #[test]
    fn solve_power_round_trip() {
        let q = PlanQuery::new(nats(M_1MW_V5), FixedParameter::SpeedMps(5.0), 2.0);
        let p = solve_power(&q).unwrap();
        let budget = LinkBudget::default().with_tx_power(p);
        let back = d_inf_1(&budget, 5.0, &SeriesOptions::default())
            .unwrap()
            .value_nats;
        assert!(rel_err(back, M_1MW_V5) < 1e-9);
    }

    #[test]
    fn solve_power_reports_infeasible_target() {
        // c_target = 0.1 is below the S -> 1 infimum (~0.878 at alpha 2)
        let m = 0.1 * 1e5 * 1.0 / 5.0;
        let q = PlanQuery::new(nats(m), FixedParameter::SpeedMps(5.0), 2.0);
        match solve_power(&q) {
            Err(Error::InfeasibleTarget { infimum_nats, .. }) => {
                // infimum = (B d0 / v) * 0.87764914623495131
                assert!(rel_err(infimum_nats, 2e4 * 0.877_649_146_234_951_3) < 1e-8);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn solvers_mutually_consistent() {
        for &p0 in &[1e-3, 1.0, 50.0] {
            for &m_scale in &[0.5, 1.0, 4.0] {
                let m = m_scale * M_1MW_V5;
                let sq = PlanQuery::new(nats(m), FixedParameter::PowerW(p0), 2.0);
                let v = solve_speed(&sq).unwrap();
                let pq = PlanQuery::new(nats(m), FixedParameter::SpeedMps(v), 2.0);
                let p = solve_power(&pq).unwrap();
                assert!(rel_err(p, p0) < 1e-9, "p0={p0} m={m}: got {p}");
            }
        }
    }

    #[test]
    fn bracket_factor_strictly_increasing_in_snr() {
        let opts = SeriesOptions {
            max_terms: 10_000,
            target_abs_error: 1e-20,
        };
        for &alpha in &[2.0, 2.5, 3.0, 4.0, 6.0] {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..400 {
                let s = 10f64.powf(0.005 + i as f64 * (9.0 - 0.005) / 399.0);
                let c = bracket_factor(s, alpha, &opts).unwrap();
                assert!(c > prev, "C not increasing at S={s}, alpha={alpha}");
                prev = c;
            }
        }
    }

    #[test]
    fn d_inf_1_decreasing_in_alpha() {
        let opts = SeriesOptions::default();
        let qspec = QuadratureSpec::default();
        let profile = MobilityProfile::default();
        for &s in &[10.0, 1e3, 1e8] {
            let mut prev = f64::INFINITY;
            let mut prev_oracle = f64::INFINITY;
            for &alpha in &[2.0, 2.5, 3.0, 4.0, 5.0] {
                let b = LinkBudget::default().with_transmit_snr(s).with_alpha(alpha);
                let v = d_inf_1(&b, 5.0, &opts).unwrap().value_nats;
                assert!(v < prev, "not decreasing at S={s} alpha={alpha}");
                prev = v;
                let o = integrate_infinite(&b, &profile, &qspec).unwrap().value_nats;
                assert!(o < prev_oracle, "oracle disagrees at S={s} alpha={alpha}");
                prev_oracle = o;
            }
        }
    }

    #[test]
    fn sweep_rows_agree_with_quadrature_subsample() {
        // 1% of the speed x power figure grid, spot-checked against the
        // oracle at 1e-8 relative
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;

        let spec = SweepSpec::new(
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
        );
        let table = sweep(&spec).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xf1f2);
        let qspec = QuadratureSpec::default();
        for _ in 0..25 {
            let row = &table.rows[rng.gen_range(0..table.rows.len())];
            assert_ne!(row.formula, FormulaTag::Quadrature);
            let (v, p) = (row.coords[0], row.coords[1]);
            let budget = LinkBudget::default().with_tx_power(p);
            let profile = MobilityProfile::default().with_speed(v);
            let oracle = integrate_infinite(&budget, &profile, &qspec)
                .unwrap()
                .value_nats;
            assert!(
                rel_err(row.value, oracle) < 1e-8,
                "row (v={v}, P={p}): {} vs oracle {oracle}",
                row.value
            );
        }
    }

    #[test]
    fn sweep_rejects_alpha_axis_with_alpha2_formulas() {
        let alpha_axis = Axis {
            param: AxisParam::Alpha,
            min: 2.0,
            max: 5.0,
            count: 4,
            spacing: Spacing::Linear,
        };
        for formula in [
            SweepFormula::Thm2,
            SweepFormula::Cor2,
            SweepFormula::FiniteAlpha2,
        ] {
            assert!(sweep(&SweepSpec::new(vec![alpha_axis], formula)).is_err());
        }
        assert!(sweep(&SweepSpec::new(vec![alpha_axis], SweepFormula::Thm1)).is_ok());
    }

    #[test]
    fn time_to_ratio_inverts_the_curve() {
        let b = LinkBudget::default();
        let p = MobilityProfile::default();
        let qspec = QuadratureSpec::default();
        let t = time_to_ratio(&b, &p, 0.831_189_781_571_026_4, &qspec).unwrap();
        assert!(rel_err(t, 3600.0) < 1e-6, "t = {t}");
        assert!(time_to_ratio(&b, &p, 0.0, &qspec).is_err());
        assert!(time_to_ratio(&b, &p, 1.0, &qspec).is_err());
    }

    #[test]
    fn finite_curve_shape() {
        let b = LinkBudget::default();
        let p = MobilityProfile::default();
        let qspec = QuadratureSpec::default();
        let pts = finite_time_curve(&b, &p, &[0.0, 60.0, 600.0, 3600.0, 36000.0], &qspec).unwrap();
        assert_eq!(pts[0].ratio, 0.0);
        for w in pts.windows(2) {
            assert!(w[1].ratio >= w[0].ratio);
        }
        let last = pts.last().unwrap();
        assert!(last.ratio < 1.0);
        let hour = &pts[3];
        assert!(rel_err(hour.ratio, 0.831_189_781_571_026_4) < 1e-9);
    }

    #[test]
    fn finite_curve_rejects_unsorted_times() {
        let b = LinkBudget::default();
        let p = MobilityProfile::default();
        assert!(finite_time_curve(&b, &p, &[10.0, 5.0], &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn faster_terminals_reach_ratio_sooner() {
        let b = LinkBudget::default();
        let qspec = QuadratureSpec::default();
        let mut prev = f64::INFINITY;
        for &v in &[1.0, 5.0, 20.0, 100.0] {
            let p = MobilityProfile::default().with_speed(v);
            let t = time_to_ratio(&b, &p, 0.8, &qspec).unwrap();
            assert!(t < prev, "t({v}) = {t} not below {prev}");
            prev = t;
        }
    }

    #[test]
    fn sweep_fig2_grid_is_finite() {
        let spec = SweepSpec::new(
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
        );
        let table = sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 2500);
        assert!(table.rows.iter().all(|r| r.value.is_finite()));
        // all Fig. 2 powers have S >= 1e5: no fallback rows
        assert!(table.rows.iter().all(|r| r.formula == FormulaTag::Thm1));
    }

    #[test]
    fn sweep_single_point_equals_scalar() {
        let spec = SweepSpec::new(
            vec![Axis {
                param: AxisParam::Power,
                min: 1e-3,
                max: 1e-3,
                count: 1,
                spacing: Spacing::Log,
            }],
            SweepFormula::Thm1,
        );
        let table = sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 1);
        let scalar = d_inf_1(
            &LinkBudget::default().with_tx_power(1e-3),
            5.0,
            &SeriesOptions::default(),
        )
        .unwrap();
        assert_eq!(table.rows[0].value.to_bits(), scalar.value_nats.to_bits());
    }

    #[test]
    fn sweep_low_snr_rows_fall_back_to_quadrature() {
        let spec = SweepSpec::new(
            vec![Axis {
                param: AxisParam::Snr,
                min: 0.5,
                max: 10.0,
                count: 5,
                spacing: Spacing::Log,
            }],
            SweepFormula::Thm1,
        );
        let table = sweep(&spec).unwrap();
        let tags: Vec<FormulaTag> = table.rows.iter().map(|r| r.formula).collect();
        assert_eq!(tags[0], FormulaTag::Quadrature); // S = 0.5
        assert_eq!(*tags.last().unwrap(), FormulaTag::Thm1); // S = 10
        assert!(table
            .rows
            .iter()
            .all(|r| r.value.is_finite() && r.value > 0.0));
    }

    #[test]
    fn sweep_gap_shape_matches_figure_one() {
        // gap between the bound and its series-free estimate is widest
        // near S -> 1+ and vanishes as S grows
        let axis = Axis {
            param: AxisParam::Snr,
            min: 1.01,
            max: 1e8,
            count: 30,
            spacing: Spacing::Log,
        };
        let upper = sweep(&SweepSpec::new(vec![axis], SweepFormula::Thm1)).unwrap();
        let lower = sweep(&SweepSpec::new(vec![axis], SweepFormula::Cor1Lower)).unwrap();
        let gaps: Vec<f64> = upper
            .rows
            .iter()
            .zip(&lower.rows)
            .map(|(u, l)| u.value - l.value)
            .collect();
        let max_gap = gaps.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(gaps[0], max_gap, "gap should peak at the smallest S");
        assert!(*gaps.last().unwrap() < 1e-4 * max_gap);
    }

    #[test]
    fn sweep_rejects_invalid_axes() {
        let bad = SweepSpec::new(
            vec![Axis {
                param: AxisParam::Power,
                min: 1.0,
                max: 0.1,
                count: 10,
                spacing: Spacing::Log,
            }],
            SweepFormula::Thm1,
        );
        assert!(sweep(&bad).is_err());

        let inside_d0 = SweepSpec::new(
            vec![Axis {
                param: AxisParam::X0,
                min: 0.0,
                max: 10.0,
                count: 3,
                spacing: Spacing::Linear,
            }],
            SweepFormula::Quadrature,
        );
        assert!(sweep(&inside_d0).is_err());
    }

    proptest! {
        // inverting an arbitrary reachable target and evaluating the bound
        // at the solved speed returns the target
        #[test]
        fn solve_speed_round_trip_property(
            log_s in 1.0f64..9.0,
            alpha in 2.0f64..5.0,
            log_m in 3.0f64..9.0,
        ) {
            let s = 10f64.powf(log_s);
            let m = 10f64.powf(log_m);
            let power = s * 1e-8;
            let q = PlanQuery::new(nats(m), FixedParameter::PowerW(power), alpha);
            let v = solve_speed(&q).unwrap();
            let budget = LinkBudget::default().with_tx_power(power).with_alpha(alpha);
            let back = d_inf_1(&budget, v, &SeriesOptions::default()).unwrap().value_nats;
            prop_assert!(rel_err(back, m) < 1e-12);
        }
    }
}
