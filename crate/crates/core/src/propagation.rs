//! LOS/NLOS classification against extruded building footprints and the
//! deterministic urban-macro path-loss chain (distance law, frozen
//! lognormal shadowing, rain attenuation).

use serde::{Deserialize, Serialize};

use crate::context::{WeatherCondition, WeatherContext};
use crate::geom::{point_in_polygon, segment_crossing_t};
use crate::scenario::{Building, GeoPoint, ShadowFadingParams};

/// Whether a link has a clear line of sight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LosClass {
    Los,
    Nlos,
}

/// Stable identity of a radio link, the key of its frozen shadow-fading
/// draw. The BS->incumbent link is per station: all sectors share the
/// mast, so they share the draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkId {
    BsToFss { bs: u32 },
    BsToUe { bs: u32, sector: u8, ue: u32 },
}

impl LinkId {
    /// Stable mixing key for the shadow-fading draw.
    fn code(self) -> u64 {
        let (tag, a, b, c) = match self {
            LinkId::BsToFss { bs } => (1u64, u64::from(bs), 0, 0),
            LinkId::BsToUe { bs, sector, ue } => {
                (2u64, u64::from(bs), u64::from(sector), u64::from(ue))
            }
        };
        let mut h = tag;
        for v in [a, b, c] {
            h = (h ^ v).wrapping_mul(0x0000_0100_0000_01B3);
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropagationError {
    /// Path loss is undefined at zero (or negative) distance.
    InvalidDistance,
    /// The rain fit only covers 10..100 GHz.
    FrequencyOutOfRange,
    /// Rain rates are non-negative by definition.
    NegativeRainRate,
}

impl core::fmt::Display for PropagationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PropagationError::InvalidDistance => write!(f, "link distance must be > 0"),
            PropagationError::FrequencyOutOfRange => {
                write!(f, "carrier frequency outside the (10, 100) GHz rain-model range")
            }
            PropagationError::NegativeRainRate => write!(f, "rain rate must be >= 0"),
        }
    }
}

impl core::error::Error for PropagationError {}

/// NLOS iff the 3D segment tx->rx passes through any building volume:
/// either a footprint-edge crossing whose interpolated segment height is
/// below the roof, or an endpoint standing inside a footprint below the
/// roof. Symmetric in its endpoints.
pub fn classify_los(tx: &GeoPoint, rx: &GeoPoint, buildings: &[Building]) -> LosClass {
    for b in buildings {
        let poly = b.footprint_2d();
        for (p, _other) in [(tx, rx), (rx, tx)] {
            if p.z < b.height_m && point_in_polygon((p.x, p.y), &poly) {
                return LosClass::Nlos;
            }
        }
        let n = poly.len();
        for i in 0..n {
            let e0 = poly[i];
            let e1 = poly[(i + 1) % n];
            if let Some(t) = segment_crossing_t((tx.x, tx.y), (rx.x, rx.y), e0, e1) {
                let z = tx.z + t * (rx.z - tx.z);
                if z < b.height_m {
                    return LosClass::Nlos;
                }
            }
        }
    }
    LosClass::Los
}

fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    *state = z ^ (z >> 31);
}

/// Uniform draw in (0, 1] from the current state.
fn unit_open(state: u64) -> f64 {
    ((state >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Zero-mean Gaussian shadow-fading term in dB, frozen per (seed, link).
/// A zero sigma contributes exactly 0.
pub fn shadow_fading_db(sf: &ShadowFadingParams, los: LosClass, link: LinkId) -> f64 {
    let sigma = match los {
        LosClass::Los => sf.sigma_los_db,
        LosClass::Nlos => sf.sigma_nlos_db,
    };
    if sigma == 0.0 {
        return 0.0;
    }
    let mut state = sf.seed ^ link.code().wrapping_mul(0xA076_1D64_78BD_642F);
    splitmix64(&mut state);
    let s1 = state;
    splitmix64(&mut state);
    let u1 = unit_open(s1);
    let u2 = unit_open(state);
    let z = libm::sqrt(-2.0 * libm::log(u1))
        * libm::cos(2.0 * core::f64::consts::PI * u2);
    sigma * z
}

/// Urban-macro distance law in dB: the LOS pre-breakpoint expression, or
/// for NLOS the max of the LOS value and the NLOS fit (1.5 m terminals).
fn uma_distance_loss_db(d3d_m: f64, freq_ghz: f64, los: LosClass) -> f64 {
    let los_db = 28.0 + 22.0 * libm::log10(d3d_m) + 20.0 * libm::log10(freq_ghz);
    match los {
        LosClass::Los => los_db,
        LosClass::Nlos => {
            let nlos_db = 13.54 + 39.08 * libm::log10(d3d_m) + 20.0 * libm::log10(freq_ghz);
            los_db.max(nlos_db)
        }
    }
}

/// Clear-sky path loss in dB including the frozen shadow-fading draw.
/// Deterministic: identical inputs always return the identical value.
pub fn path_loss_db(
    d3d_m: f64,
    freq_ghz: f64,
    los: LosClass,
    sf: &ShadowFadingParams,
    link: LinkId,
) -> Result<f64, PropagationError> {
    if !(d3d_m > 0.0) {
        return Err(PropagationError::InvalidDistance);
    }
    Ok(uma_distance_loss_db(d3d_m, freq_ghz, los) + shadow_fading_db(sf, los, link))
}

/// Rain-rate-dependent cubic coefficients of the specific-attenuation fit
/// A = a f^3 + b f^2 + c f + d (f in GHz), x the rain rate in mm/h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RainModel {
    pub rain_rate_mm_h: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RainModel {
    pub fn new(rain_rate_mm_h: f64) -> Result<Self, PropagationError> {
        if !(rain_rate_mm_h >= 0.0) {
            return Err(PropagationError::NegativeRainRate);
        }
        let x = rain_rate_mm_h;
        let x2 = x * x;
        let x3 = x2 * x;
        Ok(RainModel {
            rain_rate_mm_h: x,
            a: -5.52e-12 * x3 + 3.26e-9 * x2 - 1.21e-7 * x - 6e-6,
            b: 8e-10 * x3 - 4.522e-7 * x2 - 3.03e-5 * x + 0.001,
            c: -5.71e-9 * x3 + 6e-7 * x2 + 8.707e-3 * x - 0.018,
            d: -1.073e-7 * x3 + 1.068e-4 * x2 - 5.98e-5 * x + 0.0442,
        })
    }

    /// Specific attenuation in dB/km, clamped at 0 where the raw fit dips
    /// negative. Valid for carriers strictly inside 10..100 GHz.
    pub fn attenuation_db_per_km(&self, freq_ghz: f64) -> Result<f64, PropagationError> {
        if !(freq_ghz > 10.0 && freq_ghz < 100.0) {
            return Err(PropagationError::FrequencyOutOfRange);
        }
        let f = freq_ghz;
        let raw = self.a * f * f * f + self.b * f * f + self.c * f + self.d;
        Ok(raw.max(0.0))
    }
}

/// One-shot form of [`RainModel::attenuation_db_per_km`].
pub fn rain_attenuation_db_per_km(
    rain_rate_mm_h: f64,
    freq_ghz: f64,
) -> Result<f64, PropagationError> {
    RainModel::new(rain_rate_mm_h)?.attenuation_db_per_km(freq_ghz)
}

/// Applies the weather adjustment to a clear-sky path loss: sunny links
/// pass through unchanged, rainy links gain the specific attenuation
/// times the link length.
pub fn path_loss_weather_db(
    d_km: f64,
    base_pl_db: f64,
    weather: &WeatherContext,
    freq_ghz: f64,
) -> Result<f64, PropagationError> {
    match weather.condition {
        WeatherCondition::Sunny => Ok(base_pl_db),
        WeatherCondition::Rainy => {
            let per_km = rain_attenuation_db_per_km(weather.rain_rate_mm_h, freq_ghz)?;
            Ok(base_pl_db + per_km * d_km)
        }
    }
}
