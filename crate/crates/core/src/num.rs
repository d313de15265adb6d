//! Decibel/linear conversions shared across the crate.
//!
//! Gains and powers travel in dB (dBi/dBm) and are only linearized to be
//! summed. Exact zeros in the linear domain have no dB representation, so
//! anything at or below [`LINEAR_FLOOR`] maps to the [`DB_FLOOR`] sentinel
//! instead of `-inf`, keeping downstream sums finite.

/// Linear power-gain values at or below this are treated as zero.
pub const LINEAR_FLOOR: f64 = 1e-20;

/// dB value reported for linear values at or below [`LINEAR_FLOOR`].
pub const DB_FLOOR: f64 = -200.0;

/// dB (or dBm) to linear power ratio (or mW).
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Linear power ratio (or mW) to dB (or dBm), flooring tiny values at
/// [`DB_FLOOR`] instead of returning `-inf`.
pub fn linear_to_db(linear: f64) -> f64 {
    if linear <= LINEAR_FLOOR {
        DB_FLOOR
    } else {
        10.0 * libm::log10(linear)
    }
}

/// Loss from splitting one transmit power equally over three sectors.
pub fn three_sector_split_db() -> f64 {
    10.0 * libm::log10(3.0)
}

/// Thermal noise over `bandwidth_mhz` plus a receiver noise figure, in dBm.
///
/// Uses the conventional -174 dBm/Hz thermal floor.
pub fn thermal_noise_dbm(bandwidth_mhz: f64, noise_figure_db: f64) -> f64 {
    -174.0 + 10.0 * libm::log10(bandwidth_mhz * 1e6) + noise_figure_db
}
