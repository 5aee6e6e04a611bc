//! Structured pass/fail records for inequality checks.

use serde::Serialize;
use serde_json::Value;

/// One inequality `lhs <= rhs`, both sides as natural logarithms.
#[derive(Debug, Clone, Serialize)]
pub struct Inequality {
    pub name: String,
    pub params: Value,
    pub lhs: f64,
    pub rhs: f64,
    /// `exp(rhs - lhs)`.
    pub ratio: f64,
    pub ok: bool,
    /// `rhs - lhs`; positive means strict slack.
    pub margin_log: f64,
}

/// Relative slack allowed for floating-point rounding in `ok`.
pub const ROUNDING_TOLERANCE: f64 = 1e-12;

impl Inequality {
    pub fn new(name: impl Into<String>, params: Value, lhs: f64, rhs: f64) -> Self {
        let margin_log = rhs - lhs;
        let scale = 1f64.max(lhs.abs()).max(rhs.abs());
        Inequality {
            name: name.into(),
            params,
            lhs,
            rhs,
            ratio: margin_log.exp(),
            ok: margin_log >= -ROUNDING_TOLERANCE * scale,
            margin_log,
        }
    }

    pub fn strict(&self) -> bool {
        self.margin_log > 0.0
    }
}

pub fn all_ok(items: &[Inequality]) -> bool {
    items.iter().all(|i| i.ok)
}
