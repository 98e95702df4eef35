//! Channel and trajectory model: link budget, mobility profile,
//! distance and SNR as functions of time.
//!
//! The channel is line-of-sight path loss: a terminal at distance `d`
//! sees SNR(t) = S (d0/d(t))^alpha with transmit SNR S = P G / sigma^2.
//! The mobile terminal recedes on a straight line, x(t) = x0 + v t at
//! constant lateral offset z0, so d(t) = sqrt(z0^2 + (x0 + v t)^2).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Static radio parameters of the link.
///
/// All fields are strictly positive and finite; the path loss exponent
/// is at least 2 (free space). Defaults are the simulation values used
/// throughout the validation suite: B = 1e5 Hz, sigma^2 = 1e-8 W,
/// d0 = 1 m, G = 1, P = 1 W, alpha = 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Channel bandwidth B in Hz.
    pub bandwidth_hz: f64,
    /// Receiver noise power sigma^2 in W.
    pub noise_power_w: f64,
    /// Reference distance d0 in m; the model is valid for d >= d0.
    pub ref_distance_m: f64,
    /// Unitless antenna gain / path-loss normalization G at d0.
    pub antenna_gain: f64,
    /// Transmit power P in W.
    pub tx_power_w: f64,
    /// Path loss exponent alpha >= 2.
    pub path_loss_exp: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget {
            bandwidth_hz: 1e5,
            noise_power_w: 1e-8,
            ref_distance_m: 1.0,
            antenna_gain: 1.0,
            tx_power_w: 1.0,
            path_loss_exp: 2.0,
        }
    }
}

impl LinkBudget {
    /// Validates field invariants: positivity, finiteness, alpha >= 2.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_power_w", self.noise_power_w),
            ("ref_distance_m", self.ref_distance_m),
            ("antenna_gain", self.antenna_gain),
            ("tx_power_w", self.tx_power_w),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and > 0, got {value}"),
                ));
            }
        }
        if !self.path_loss_exp.is_finite() || self.path_loss_exp < 2.0 {
            return Err(Error::invalid(
                "path_loss_exp",
                format!("must be finite and >= 2, got {}", self.path_loss_exp),
            ));
        }
        let s = self.transmit_snr();
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::invalid(
                "tx_power_w",
                format!("derived transmit SNR S = {s} is not finite and positive"),
            ));
        }
        Ok(())
    }

    /// Transmit SNR S = P G / sigma^2: the SNR at the reference distance.
    pub fn transmit_snr(&self) -> f64 {
        self.tx_power_w * self.antenna_gain / self.noise_power_w
    }

    /// Copy with a different transmit power.
    pub fn with_tx_power(mut self, tx_power_w: f64) -> Self {
        self.tx_power_w = tx_power_w;
        self
    }

    /// Copy with the transmit power that realizes a given transmit SNR.
    pub fn with_transmit_snr(mut self, s: f64) -> Self {
        self.tx_power_w = s * self.noise_power_w / self.antenna_gain;
        self
    }

    /// Copy with a different path loss exponent.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.path_loss_exp = alpha;
        self
    }
}

/// Trajectory parameters of the receding terminal.
///
/// The terminal starts at lateral position `x0_m >= 0` with constant
/// offset `z0_m >= 0` and moves at `speed_mps > 0`, so it only recedes.
/// The default matches the validation suite: x0 = 1 m, z0 = 0, v = 5 m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityProfile {
    /// Initial lateral position x0 in m.
    pub x0_m: f64,
    /// Constant lateral/longitudinal offset z0 in m.
    pub z0_m: f64,
    /// Speed v in m/s.
    pub speed_mps: f64,
}

impl Default for MobilityProfile {
    fn default() -> Self {
        MobilityProfile {
            x0_m: 1.0,
            z0_m: 0.0,
            speed_mps: 5.0,
        }
    }
}

impl MobilityProfile {
    /// Validates field invariants: x0, z0 >= 0 and v > 0, all finite.
    pub fn validate(&self) -> Result<()> {
        if !self.x0_m.is_finite() || self.x0_m < 0.0 {
            return Err(Error::invalid(
                "x0_m",
                format!("must be finite and >= 0, got {}", self.x0_m),
            ));
        }
        if !self.z0_m.is_finite() || self.z0_m < 0.0 {
            return Err(Error::invalid(
                "z0_m",
                format!("must be finite and >= 0, got {}", self.z0_m),
            ));
        }
        if !self.speed_mps.is_finite() || self.speed_mps <= 0.0 {
            return Err(Error::invalid(
                "speed_mps",
                format!("must be finite and > 0, got {}", self.speed_mps),
            ));
        }
        Ok(())
    }

    /// Initial distance sqrt(x0^2 + z0^2).
    pub fn initial_distance_m(&self) -> f64 {
        self.x0_m.hypot(self.z0_m)
    }

    /// Copy with a different speed.
    pub fn with_speed(mut self, speed_mps: f64) -> Self {
        self.speed_mps = speed_mps;
        self
    }
}

/// Distance between the terminals at time `t >= 0` seconds:
/// d(t) = sqrt(z0^2 + (x0 + v t)^2). Strictly increasing in t.
pub fn distance(profile: &MobilityProfile, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(
            "t",
            format!("time must be finite and >= 0, got {t}"),
        ));
    }
    Ok(profile.z0_m.hypot(profile.x0_m + profile.speed_mps * t))
}

/// Receiver SNR at time `t`: S (d0/d(t))^alpha.
///
/// Errors if d(t) < d0, where the path-loss model is invalid. Since d is
/// non-decreasing for x0 >= 0, checking the pair once at t = 0 (see
/// [`check_geometry`]) guarantees validity for all later times.
pub fn snr(budget: &LinkBudget, profile: &MobilityProfile, t: f64) -> Result<f64> {
    let d = distance(profile, t)?;
    let d0 = budget.ref_distance_m;
    if d < d0 {
        return Err(Error::InsideReferenceDistance { distance: d, d0, t });
    }
    Ok(budget.transmit_snr() * (d0 / d).powf(budget.path_loss_exp))
}

/// Transmit SNR S = P G / sigma^2.
pub fn transmit_snr(budget: &LinkBudget) -> f64 {
    budget.transmit_snr()
}

/// Validates a (budget, profile) pair: field invariants plus the model
/// precondition d(0) >= d0. Monotonicity of d makes the t = 0 check
/// sufficient for the whole trajectory.
pub fn check_geometry(budget: &LinkBudget, profile: &MobilityProfile) -> Result<()> {
    budget.validate()?;
    profile.validate()?;
    let d_start = profile.initial_distance_m();
    if d_start < budget.ref_distance_m {
        return Err(Error::InsideReferenceDistance {
            distance: d_start,
            d0: budget.ref_distance_m,
            t: 0.0,
        });
    }
    Ok(())
}
