//! Ledger entries.
//!
//! Every line of a check ledger is one [`CheckRecord`] with the fields
//!
//! | field | type | meaning |
//! |-------|------|---------|
//! | `check_id` | string | dotted identifier, first segment is the suite |
//! | `parameters` | object | grid size, seed and other inputs |
//! | `computed` | array of numbers | measured values |
//! | `expected` | array of numbers | reference values or bounds |
//! | `relation` | string | `approx`, `at_most`, `at_least` or `exact` |
//! | `tolerance` | number | tolerance used by `approx` and `at_most` |
//! | `abs_err` | number | max absolute difference of computed and expected |
//! | `rel_err` | number | `abs_err / max(|expected|)`, or `abs_err` when expected is zero |
//! | `pass` | bool | outcome |
//! | `wall_time_s` | number | seconds spent in the check |

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `rel_err ≤ tolerance`, or `abs_err ≤ tolerance` for zero expected.
    Approx,
    /// Every computed value is at most `tolerance`; expected is empty.
    AtMost,
    /// Every computed value is at least the matching expected value.
    AtLeast,
    /// Bitwise equality, used for integers and flags.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub parameters: BTreeMap<String, Value>,
    pub computed: Vec<f64>,
    pub expected: Vec<f64>,
    pub relation: Relation,
    pub tolerance: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
    pub wall_time_s: f64,
}

/// Field names in serialization order.
pub const RECORD_FIELDS: [&str; 10] = [
    "check_id",
    "parameters",
    "computed",
    "expected",
    "relation",
    "tolerance",
    "abs_err",
    "rel_err",
    "pass",
    "wall_time_s",
];

impl CheckRecord {
    fn build(
        check_id: &str,
        computed: Vec<f64>,
        expected: Vec<f64>,
        relation: Relation,
        tolerance: f64,
    ) -> Self {
        let (abs_err, rel_err, pass) = match relation {
            Relation::Approx | Relation::Exact => {
                let abs = computed
                    .iter()
                    .zip(&expected)
                    .map(|(c, e)| (c - e).abs())
                    .fold(0.0, f64::max);
                let scale = expected.iter().fold(0.0f64, |m, e| m.max(e.abs()));
                let rel = if scale == 0.0 { abs } else { abs / scale };
                let same_len = computed.len() == expected.len();
                let pass = same_len
                    && match relation {
                        Relation::Exact => computed
                            .iter()
                            .zip(&expected)
                            .all(|(c, e)| c.to_bits() == e.to_bits()),
                        _ => rel <= tolerance,
                    };
                (abs, rel, pass)
            }
            Relation::AtMost => {
                let worst = computed.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                let pass = computed.iter().all(|c| c.is_finite() && *c <= tolerance);
                (worst, worst, pass)
            }
            Relation::AtLeast => {
                let short = computed
                    .iter()
                    .zip(&expected)
                    .map(|(c, e)| (e - c).max(0.0))
                    .fold(0.0, f64::max);
                let pass =
                    computed.len() == expected.len() && computed.iter().zip(&expected).all(|(c, e)| c >= e);
                (short, short, pass)
            }
        };
        CheckRecord {
            check_id: check_id.to_string(),
            parameters: BTreeMap::new(),
            computed,
            expected,
            relation,
            tolerance,
            abs_err: finite_or_max(abs_err),
            rel_err: finite_or_max(rel_err),
            pass,
            wall_time_s: 0.0,
        }
    }

    pub fn approx(check_id: &str, computed: Vec<f64>, expected: Vec<f64>, tol: f64) -> Self {
        Self::build(check_id, computed, expected, Relation::Approx, tol)
    }

    /// An upper bound on an error measure.
    pub fn at_most(check_id: &str, computed: f64, tol: f64) -> Self {
        Self::build(
            check_id,
            vec![finite_or_max(computed)],
            Vec::new(),
            Relation::AtMost,
            tol,
        )
    }

    /// A lower bound, used for negative controls and gap ratios.
    pub fn at_least(check_id: &str, computed: f64, min: f64) -> Self {
        Self::build(
            check_id,
            vec![finite_or_max(computed)],
            vec![min],
            Relation::AtLeast,
            0.0,
        )
    }

    pub fn exact(check_id: &str, computed: Vec<f64>, expected: Vec<f64>) -> Self {
        Self::build(check_id, computed, expected, Relation::Exact, 0.0)
    }

    pub fn flag(check_id: &str, ok: bool) -> Self {
        Self::exact(check_id, vec![ok as u8 as f64], vec![1.0])
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.wall_time_s = start.elapsed().as_secs_f64();
        self
    }

    pub fn suite(&self) -> &str {
        self.check_id.split('.').next().unwrap_or("")
    }

    /// The record with `wall_time_s` zeroed, for determinism comparisons.
    pub fn without_time(&self) -> Self {
        CheckRecord {
            wall_time_s: 0.0,
            ..self.clone()
        }
    }
}

/// JSON has no infinities; failed measurements are clamped to `f64::MAX`.
fn finite_or_max(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}
