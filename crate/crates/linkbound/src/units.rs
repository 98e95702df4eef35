//! Information-quantity representation and unit conversion.
//!
//! Everything internal is computed and stored in nats; conversion to
//! bits, bytes or megabytes happens only at output boundaries. MB means
//! decimal megabytes (10^6 bytes), the convention under which the
//! figure-level numbers in the validation suite come out right.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nats per bit: ln 2.
pub const NATS_PER_BIT: f64 = std::f64::consts::LN_2;

/// Output unit for information quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Nats,
    Bits,
    Bytes,
    /// Decimal megabytes, 10^6 bytes.
    #[serde(rename = "MB")]
    Megabytes,
}

impl Unit {
    /// Conversion factor from nats to this unit (linear in the value).
    pub fn per_nat(self) -> f64 {
        match self {
            Unit::Nats => 1.0,
            Unit::Bits => 1.0 / NATS_PER_BIT,
            Unit::Bytes => 1.0 / NATS_PER_BIT / 8.0,
            Unit::Megabytes => 1.0 / NATS_PER_BIT / 8.0 / 1e6,
        }
    }

    /// Column/label suffix for this unit.
    pub fn label(self) -> &'static str {
        match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
            Unit::Bytes => "bytes",
            Unit::Megabytes => "MB",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" | "nat" => Ok(Unit::Nats),
            "bits" | "bit" => Ok(Unit::Bits),
            "bytes" | "byte" => Ok(Unit::Bytes),
            "MB" | "mb" | "megabytes" => Ok(Unit::Megabytes),
            other => Err(Error::invalid(
                "unit",
                format!("unknown unit `{other}` (expected nats|bits|bytes|MB)"),
            )),
        }
    }
}

/// Convert a raw nat value (possibly signed, e.g. a lower-bound estimate
/// that dips negative near S = 1) to `unit`. Linear, total.
pub fn nats_in(value_nats: f64, unit: Unit) -> f64 {
    value_nats * unit.per_nat()
}

/// An amount of information, stored canonically in nats.
///
/// Always finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InfoQuantity {
    value_nats: f64,
}

impl InfoQuantity {
    /// Wraps a nat value, rejecting non-finite or negative input.
    pub fn from_nats(value_nats: f64) -> Result<Self> {
        if !value_nats.is_finite() || value_nats < 0.0 {
            return Err(Error::invalid(
                "value_nats",
                format!("must be finite and non-negative, got {value_nats}"),
            ));
        }
        Ok(InfoQuantity { value_nats })
    }

    /// Builds a quantity from a value expressed in `unit`.
    pub fn from_value(value: f64, unit: Unit) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::invalid(
                "target",
                format!("must be finite and non-negative, got {value}"),
            ));
        }
        Ok(InfoQuantity {
            value_nats: value / unit.per_nat(),
        })
    }

    pub fn nats(self) -> f64 {
        self.value_nats
    }

    /// Value of this quantity expressed in `unit`.
    pub fn in_unit(self, unit: Unit) -> f64 {
        nats_in(self.value_nats, unit)
    }
}
