//! Weather-context acquisition and the weather-to-interference-threshold
//! mapping that governs each run.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeatherCondition {
    Sunny,
    Rainy,
}

/// One frozen weather snapshot. `condition` follows from the rain rate
/// (rainy iff above 0 mm/h), so `Sunny` always carries a zero rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherContext {
    pub condition: WeatherCondition,
    pub rain_rate_mm_h: f64,
    pub i_th_db: f64,
    pub timestamp_s: i64,
}

impl WeatherContext {
    /// Builds a context from a rain rate, inferring the condition and the
    /// default threshold. Negative rates are treated as dry air.
    pub fn from_rain_rate(rain_rate_mm_h: f64, timestamp_s: i64) -> Self {
        let rate = rain_rate_mm_h.max(0.0);
        let condition = if rate > 0.0 {
            WeatherCondition::Rainy
        } else {
            WeatherCondition::Sunny
        };
        WeatherContext {
            condition,
            rain_rate_mm_h: rate,
            i_th_db: ThresholdPolicy::default().threshold_for(condition),
            timestamp_s,
        }
    }
}

/// Interference thresholds by weather, with an optional override that
/// wins regardless of condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdPolicy {
    pub sunny_db: f64,
    pub rainy_db: f64,
    pub override_db: Option<f64>,
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy {
            sunny_db: -8.5,
            rainy_db: -12.0,
            override_db: None,
        }
    }
}

impl ThresholdPolicy {
    pub fn threshold_for(&self, condition: WeatherCondition) -> f64 {
        if let Some(v) = self.override_db {
            return v;
        }
        match condition {
            WeatherCondition::Sunny => self.sunny_db,
            WeatherCondition::Rainy => self.rainy_db,
        }
    }
}

/// Governing threshold for a context under a policy.
pub fn select_interference_threshold(ctx: &WeatherContext, policy: &ThresholdPolicy) -> f64 {
    policy.threshold_for(ctx.condition)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextError {
    /// The document is not valid JSON; `byte_offset` locates the failure.
    Parse { byte_offset: usize, message: String },
    /// The document parses but violates the snapshot schema.
    Schema { field: &'static str, message: String },
}

impl core::fmt::Display for ContextError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ContextError::Parse {
                byte_offset,
                message,
            } => write!(f, "weather snapshot parse error at byte {byte_offset}: {message}"),
            ContextError::Schema { field, message } => {
                write!(f, "weather snapshot field {field}: {message}")
            }
        }
    }
}

impl core::error::Error for ContextError {}

#[derive(Deserialize)]
struct RawRain {
    #[serde(rename = "1h")]
    one_h: Option<f64>,
}

#[derive(Deserialize)]
struct RawSnapshot {
    condition: Option<String>,
    rain: Option<RawRain>,
    dt: Option<i64>,
}

fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0usize;
    let mut remaining = line.saturating_sub(1);
    for (i, b) in input.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if *b == b'\n' {
            remaining -= 1;
            offset = i + 1;
        }
    }
    (offset + column.saturating_sub(1)).min(input.len())
}

/// Parses a weather snapshot document: optional `condition` string,
/// `rain.1h` in mm/h, `dt` seconds. The condition is inferred from the
/// rain rate; a document claiming "Rain" without a rain amount is
/// rejected rather than guessed at.
pub fn load_weather_snapshot(input: &[u8]) -> Result<WeatherContext, ContextError> {
    let raw: RawSnapshot =
        serde_json::from_slice(input).map_err(|e| ContextError::Parse {
            byte_offset: byte_offset(input, e.line(), e.column()),
            message: e.to_string(),
        })?;

    let rain = raw.rain.and_then(|r| r.one_h);
    let rate = match rain {
        Some(x) if !x.is_finite() => {
            return Err(ContextError::Schema {
                field: "rain.1h",
                message: "must be finite".to_string(),
            })
        }
        Some(x) if x < 0.0 => {
            return Err(ContextError::Schema {
                field: "rain.1h",
                message: "must be >= 0 mm/h".to_string(),
            })
        }
        Some(x) => x,
        None => {
            if raw.condition.as_deref() == Some("Rain") {
                return Err(ContextError::Schema {
                    field: "rain",
                    message: "condition is Rain but no rain amount is present".to_string(),
                });
            }
            0.0
        }
    };
    Ok(WeatherContext::from_rain_rate(rate, raw.dt.unwrap_or(0)))
}

/// Replays a list of recorded snapshot documents, standing in for a live
/// provider endpoint with the identical schema and error behavior.
pub struct SnapshotProvider {
    documents: Vec<Vec<u8>>,
    next: usize,
}

impl SnapshotProvider {
    pub fn new(documents: Vec<Vec<u8>>) -> Self {
        SnapshotProvider { documents, next: 0 }
    }

    /// Next recorded snapshot, cycling when exhausted. `None` only when
    /// constructed empty.
    pub fn fetch(&mut self) -> Option<Result<WeatherContext, ContextError>> {
        if self.documents.is_empty() {
            return None;
        }
        let doc = &self.documents[self.next % self.documents.len()];
        self.next += 1;
        Some(load_weather_snapshot(doc))
    }
}
