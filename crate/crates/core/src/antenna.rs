//! Transmit-side planar-array gains, the steering codebook, and the
//! protected dish's off-axis receive pattern.
//!
//! Directions are expressed in each panel's local spherical frame:
//! `theta` from the boresight axis, `phi` around it. All gain outputs are
//! dBi with the global -200 dB floor standing in for nulls.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::Vec3;
use crate::num::linear_to_db;
use crate::scenario::{ArrayConfig, FssReceiver, GeoPoint};

/// Look direction in a panel frame. `theta` in [0, pi] from boresight,
/// `phi` in [-pi, pi] around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta_rad: f64,
    pub phi_rad: f64,
}

/// The N progressive phase-shift pairs (beta_x, beta_y) a sub-array can
/// apply, in a fixed row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamCodebook {
    pub entries: Vec<(f64, f64)>,
}

impl BeamCodebook {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, n: usize) -> (f64, f64) {
        self.entries[n]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodebookError {
    /// Codebooks must hold at least one steering vector.
    EmptyCodebook,
}

impl core::fmt::Display for CodebookError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CodebookError::EmptyCodebook => write!(f, "codebook size must be >= 1"),
        }
    }
}

impl core::error::Error for CodebookError {}

/// One normalized axis factor of the rectangular array:
/// sin^2(m*psi/2) / (m * sin^2(psi/2)), with the removable singularity at
/// sin(psi/2) = 0 evaluating to its limit m.
fn axis_factor(psi: f64, m: usize) -> f64 {
    let mf = m as f64;
    let half = libm::sin(0.5 * psi);
    if libm::fabs(half) < 1e-12 {
        return mf;
    }
    let num = libm::sin(0.5 * mf * psi);
    (num * num) / (mf * half * half)
}

/// Power gain (linear, dimensionless) of an M x L array steered by
/// `beam = (beta_x, beta_y)` toward `dir`. Bounded by `0 <= AF <= M*L`;
/// the unsteered boresight evaluates to exactly `M*L`.
pub fn array_factor(cfg: &ArrayConfig, beam: (f64, f64), dir: Direction) -> f64 {
    let sin_t = libm::sin(dir.theta_rad);
    let two_pi = 2.0 * core::f64::consts::PI;
    let psi_x = two_pi * cfg.dx_wavelengths * sin_t * libm::cos(dir.phi_rad) + beam.0;
    let psi_y = two_pi * cfg.dy_wavelengths * sin_t * libm::sin(dir.phi_rad) + beam.1;
    axis_factor(psi_x, cfg.rows) * axis_factor(psi_y, cfg.cols)
}

/// `array_factor` in dBi; nulls map to the -200 dB floor.
pub fn beam_gain_dbi(cfg: &ArrayConfig, beam: (f64, f64), dir: Direction) -> f64 {
    linear_to_db(array_factor(cfg, beam, dir))
}

/// Builds the uniform phase-space codebook: `n_beams` factored into the
/// squarest gx x gy grid (gx the largest divisor <= sqrt(n)), each axis
/// sampling [-pi, pi) evenly. A one-point axis degenerates to the
/// broadside shift 0. Row-major, so entry 0 of an 8x8 book is (-pi, -pi).
pub fn build_codebook(n_beams: usize) -> Result<BeamCodebook, CodebookError> {
    if n_beams == 0 {
        return Err(CodebookError::EmptyCodebook);
    }
    let mut gx = 1;
    let mut d = 1;
    while d * d <= n_beams {
        if n_beams % d == 0 {
            gx = d;
        }
        d += 1;
    }
    let gy = n_beams / gx;

    let axis = |g: usize| -> Vec<f64> {
        if g == 1 {
            return alloc::vec![0.0];
        }
        (0..g)
            .map(|i| -core::f64::consts::PI + 2.0 * core::f64::consts::PI * i as f64 / g as f64)
            .collect()
    };
    let ax = axis(gx);
    let ay = axis(gy);
    let mut entries = Vec::with_capacity(n_beams);
    for &bx in &ax {
        for &by in &ay {
            entries.push((bx, by));
        }
    }
    Ok(BeamCodebook { entries })
}

/// Unit vector for a geographic azimuth (degrees clockwise from north)
/// and elevation above the horizon (degrees).
fn unit_from_az_el(azimuth_deg: f64, elevation_deg: f64) -> Vec3 {
    let az = azimuth_deg.to_radians();
    let el = elevation_deg.to_radians();
    let horiz = libm::cos(el);
    Vec3::new(horiz * libm::sin(az), horiz * libm::cos(az), libm::sin(el))
}

/// Orthonormal frame of one sector panel: `ez` is the boresight (azimuth
/// plus down-tilt below the horizon), `ex`/`ey` span the aperture plane.
#[derive(Debug, Clone, Copy)]
pub struct SectorFrame {
    ex: Vec3,
    ey: Vec3,
    ez: Vec3,
}

impl SectorFrame {
    pub fn new(azimuth_deg: f64, down_tilt_deg: f64) -> Self {
        let ez = unit_from_az_el(azimuth_deg, -down_tilt_deg);
        let up = Vec3::new(0.0, 0.0, 1.0);
        // Boresight straight up/down leaves no horizontal cross product;
        // fall back to a deterministic horizontal axis from the azimuth.
        let ex = up
            .cross(ez)
            .normalized()
            .unwrap_or_else(|| unit_from_az_el(azimuth_deg + 90.0, 0.0));
        let ey = ez.cross(ex);
        SectorFrame { ex, ey, ez }
    }

    /// Local look angles from `from` toward `to`. Coincident points map
    /// to boresight.
    pub fn direction_to(&self, from: &GeoPoint, to: &GeoPoint) -> Direction {
        let d = Vec3::new(to.x - from.x, to.y - from.y, to.z - from.z);
        let Some(u) = d.normalized() else {
            return Direction {
                theta_rad: 0.0,
                phi_rad: 0.0,
            };
        };
        let ct = u.dot(self.ez).clamp(-1.0, 1.0);
        Direction {
            theta_rad: libm::acos(ct),
            phi_rad: libm::atan2(u.dot(self.ey), u.dot(self.ex)),
        }
    }
}

/// Angle (degrees, [0, 180]) between the dish boresight and the line of
/// sight from the dish to `target`.
pub fn fss_offaxis_angle_deg(fss: &FssReceiver, target: &GeoPoint) -> f64 {
    let bore = unit_from_az_el(fss.boresight_azimuth_deg, fss.elevation_deg);
    let d = Vec3::new(
        target.x - fss.position.x,
        target.y - fss.position.y,
        target.z - fss.position.z,
    );
    let Some(u) = d.normalized() else {
        return 0.0;
    };
    libm::acos(u.dot(bore).clamp(-1.0, 1.0)).to_degrees()
}

const ENVELOPE_END_DEG: f64 = 48.0;

/// Receive pattern of the protected dish: a parabolic mainlobe
/// `max_gain - 2.5e-3 (D/lambda * phi)^2` out to its first intersection
/// with the `32 - 25 log10(phi)` sidelobe envelope, the envelope through
/// 48 degrees, then the constant 48-degree value. The pattern is
/// continuous and non-increasing over the whole off-axis range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FssPattern {
    pub max_gain_dbi: f64,
    d_over_lambda: f64,
    mainlobe_end_deg: f64,
    far_gain_dbi: f64,
}

impl FssPattern {
    pub fn new(max_gain_dbi: f64) -> Self {
        // Aperture ratio implied by the peak gain, G = 20 log10(D/l) + 7.7.
        let d_over_lambda = libm::pow(10.0, (max_gain_dbi - 7.7) / 20.0);
        let mainlobe = |phi: f64| max_gain_dbi - 2.5e-3 * (d_over_lambda * phi) * (d_over_lambda * phi);
        let envelope = |phi: f64| 32.0 - 25.0 * libm::log10(phi);
        let diff = |phi: f64| mainlobe(phi) - envelope(phi);

        // First crossing of mainlobe and envelope; past it the envelope is
        // the lower (hence monotone) branch. The envelope diverges to +inf
        // at 0, so diff starts negative.
        let mut mainlobe_end_deg = ENVELOPE_END_DEG;
        let step = 0.01;
        let mut prev = step;
        let mut phi = 2.0 * step;
        while phi <= ENVELOPE_END_DEG {
            if diff(prev) < 0.0 && diff(phi) >= 0.0 {
                let (mut lo, mut hi) = (prev, phi);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if diff(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                mainlobe_end_deg = 0.5 * (lo + hi);
                break;
            }
            prev = phi;
            phi += step;
        }

        let far_gain_dbi = if mainlobe_end_deg < ENVELOPE_END_DEG {
            envelope(ENVELOPE_END_DEG)
        } else {
            mainlobe(ENVELOPE_END_DEG)
        };
        FssPattern {
            max_gain_dbi,
            d_over_lambda,
            mainlobe_end_deg,
            far_gain_dbi,
        }
    }

    pub fn gain_dbi(&self, off_axis_deg: f64) -> f64 {
        let a = libm::fabs(off_axis_deg).min(180.0);
        if a <= self.mainlobe_end_deg {
            let x = self.d_over_lambda * a;
            self.max_gain_dbi - 2.5e-3 * x * x
        } else if a <= ENVELOPE_END_DEG {
            32.0 - 25.0 * libm::log10(a)
        } else {
            self.far_gain_dbi
        }
    }
}

/// One-shot convenience over [`FssPattern`]; evaluators should cache the
/// pattern instead of rebuilding it per call.
pub fn fss_gain_dbi(fss: &FssReceiver, off_axis_deg: f64) -> f64 {
    FssPattern::new(fss.max_gain_dbi).gain_dbi(off_axis_deg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::DB_FLOOR;

    fn cfg(rows: usize, cols: usize) -> ArrayConfig {
        ArrayConfig {
            rows,
            cols,
            ..ArrayConfig::default()
        }
    }

    #[test]
    fn boresight_hits_the_element_count() {
        let dir = Direction {
            theta_rad: 0.0,
            phi_rad: 1.234,
        };
        assert_eq!(array_factor(&cfg(4, 4), (0.0, 0.0), dir), 16.0);
        let g = beam_gain_dbi(&cfg(4, 4), (0.0, 0.0), dir);
        assert!((g - 10.0 * 16.0f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn single_element_is_isotropic() {
        for (theta, phi) in [(0.0, 0.0), (1.0, -2.0), (core::f64::consts::PI, 3.0)] {
            let dir = Direction {
                theta_rad: theta,
                phi_rad: phi,
            };
            assert!((array_factor(&cfg(1, 1), (0.3, -0.7), dir) - 1.0).abs() < 1e-12);
            assert!(beam_gain_dbi(&cfg(1, 1), (0.0, 0.0), dir).abs() < 1e-12);
        }
    }

    #[test]
    fn grating_null_floors_the_gain() {
        // theta = pi/2, phi = 0 puts psi_x at exactly pi for 0.5-wavelength
        // spacing: sin^2(2 pi) / sin^2(pi / 2) = 0.
        let dir = Direction {
            theta_rad: core::f64::consts::FRAC_PI_2,
            phi_rad: 0.0,
        };
        let af = array_factor(&cfg(4, 4), (0.0, 0.0), dir);
        assert!(af.abs() < 1e-20, "af = {af}");
        assert_eq!(beam_gain_dbi(&cfg(4, 4), (0.0, 0.0), dir), DB_FLOOR);
    }

    #[test]
    fn array_factor_stays_within_peak_bound() {
        let c = cfg(4, 4);
        let book = build_codebook(64).unwrap();
        let mut t = 0.0;
        while t <= core::f64::consts::PI {
            let mut p = -core::f64::consts::PI;
            while p <= core::f64::consts::PI {
                for &beam in &book.entries {
                    let af = array_factor(
                        &c,
                        beam,
                        Direction {
                            theta_rad: t,
                            phi_rad: p,
                        },
                    );
                    assert!((0.0..=16.0 + 1e-9).contains(&af), "af = {af} at ({t}, {p})");
                }
                p += 0.37;
            }
            t += 0.29;
        }
    }

    #[test]
    fn codebook_grids_match_the_construction_rule() {
        let book = build_codebook(64).unwrap();
        assert_eq!(book.len(), 64);
        assert_eq!(
            book.entry(0),
            (-core::f64::consts::PI, -core::f64::consts::PI)
        );

        let four = build_codebook(4).unwrap();
        let expect = [
            (-core::f64::consts::PI, -core::f64::consts::PI),
            (-core::f64::consts::PI, 0.0),
            (0.0, -core::f64::consts::PI),
            (0.0, 0.0),
        ];
        assert_eq!(four.entries.as_slice(), &expect);

        let one = build_codebook(1).unwrap();
        assert_eq!(one.entries.as_slice(), &[(0.0, 0.0)]);

        assert!(build_codebook(0).is_err());
    }

    #[test]
    fn codebook_entries_are_distinct() {
        for n in [1, 2, 4, 6, 7, 64] {
            let book = build_codebook(n).unwrap();
            for i in 0..book.len() {
                for j in (i + 1)..book.len() {
                    assert_ne!(book.entry(i), book.entry(j), "n={n}");
                }
            }
        }
    }

    #[test]
    fn sector_frame_boresight_maps_to_theta_zero() {
        let frame = SectorFrame::new(0.0, 10.0);
        let bs = GeoPoint::new(0.0, 0.0, 25.0);
        // 10 degrees below horizon due north.
        let d = 100.0;
        let target = GeoPoint::new(
            0.0,
            d * libm::cos(10.0f64.to_radians()),
            25.0 - d * libm::sin(10.0f64.to_radians()),
        );
        let dir = frame.direction_to(&bs, &target);
        // acos loses half the bits near 1, so boresight theta lands at
        // ~1e-8 rather than 0.
        assert!(dir.theta_rad.abs() < 1e-7, "theta = {}", dir.theta_rad);
    }

    #[test]
    fn fss_pattern_matches_its_closed_forms() {
        let p = FssPattern::new(32.5);
        assert_eq!(p.gain_dbi(0.0), 32.5);
        let env48 = 32.0 - 25.0 * 48.0f64.log10();
        assert!((p.gain_dbi(48.0) - env48).abs() < 1e-12);
        assert!((env48 + 10.031).abs() < 1e-3);
        assert_eq!(p.gain_dbi(90.0), p.gain_dbi(48.0));
        assert_eq!(p.gain_dbi(180.0), p.gain_dbi(48.0));
    }

    #[test]
    fn fss_pattern_is_non_increasing() {
        let p = FssPattern::new(32.5);
        let mut prev = p.gain_dbi(0.0);
        let mut a = 0.01;
        while a <= 180.0 {
            let g = p.gain_dbi(a);
            assert!(g <= prev + 1e-12, "increase at {a}: {prev} -> {g}");
            prev = g;
            a += 0.01;
        }
    }

    #[test]
    fn offaxis_angle_is_zero_on_boresight() {
        let fss = FssReceiver {
            position: GeoPoint::new(0.0, 0.0, 3.0),
            boresight_azimuth_deg: 0.0,
            elevation_deg: 30.0,
            max_gain_dbi: 32.5,
            noise_power_dbm: -80.0,
        };
        let up_north = GeoPoint::new(
            0.0,
            1000.0 * libm::cos(30.0f64.to_radians()),
            3.0 + 1000.0 * libm::sin(30.0f64.to_radians()),
        );
        assert!(fss_offaxis_angle_deg(&fss, &up_north) < 1e-9);
        let horizon_north = GeoPoint::new(0.0, 1000.0, 3.0);
        assert!((fss_offaxis_angle_deg(&fss, &horizon_north) - 30.0).abs() < 1e-9);
    }
}
