//! World-state types, scenario validation, and the synthetic deployment
//! generator.
//!
//! Geometry lives in a local planar frame in meters: `x` east, `y` north,
//! `z` height above ground. Azimuths are geographic degrees (0 = north,
//! clockwise). Scenario values are immutable once built and safe to share
//! read-only across evaluation workers.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geom::point_in_polygon;
use crate::num::thermal_noise_dbm;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A point in the local planar frame: meters east (`x`), north (`y`), and
/// height above ground (`z`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GeoPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        GeoPoint { x, y, z }
    }

    /// Ground-plane distance, ignoring heights.
    pub fn distance_2d(&self, other: &GeoPoint) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }

    /// Full 3D separation.
    pub fn distance_3d(&self, other: &GeoPoint) -> f64 {
        let dz = self.z - other.z;
        libm::sqrt(
            (self.x - other.x) * (self.x - other.x)
                + (self.y - other.y) * (self.y - other.y)
                + dz * dz,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// One independently fed antenna panel within a sector. Panels are
/// identical; the id only disambiguates which panel a decision selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubArray {
    pub id: u32,
}

/// A user terminal served by one sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserEquipment {
    pub id: u32,
    pub position: GeoPoint,
}

/// One 120-degree sector of a base station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    /// Azimuth of the sector boresight, geographic degrees.
    pub azimuth_center_deg: f64,
    pub subarrays: Vec<SubArray>,
    /// Whether this sector transmits co-channel with the protected receiver
    /// and therefore counts toward aggregate interference.
    pub cochannel: bool,
    pub ues: Vec<UserEquipment>,
}

/// A three-sector macro base station. The antenna height is `position.z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: u32,
    pub position: GeoPoint,
    pub nominal_power_dbm: f64,
    /// Mechanical down-tilt applied to every sector boresight, degrees.
    pub down_tilt_deg: f64,
    pub sectors: Vec<Sector>,
}

impl BaseStation {
    pub fn height_m(&self) -> f64 {
        self.position.z
    }
}

/// The protected satellite ground receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FssReceiver {
    pub position: GeoPoint,
    /// Azimuth the dish points toward (geographic degrees).
    pub boresight_azimuth_deg: f64,
    /// Elevation of the dish boresight above the horizon, degrees.
    pub elevation_deg: f64,
    pub max_gain_dbi: f64,
    pub noise_power_dbm: f64,
}

/// An extruded building footprint. Vertices are ground-level corners in
/// order (closed ring, last implicitly connects to first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub footprint: Vec<GeoPoint>,
    pub height_m: f64,
}

impl Building {
    pub(crate) fn footprint_2d(&self) -> Vec<(f64, f64)> {
        self.footprint.iter().map(|p| (p.x, p.y)).collect()
    }
}

/// Discrete transmit-power search window, as offsets around each base
/// station's nominal power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerRange {
    pub min_offset_db: f64,
    pub max_offset_db: f64,
    pub step_db: f64,
}

impl Default for PowerRange {
    fn default() -> Self {
        PowerRange {
            min_offset_db: -2.0,
            max_offset_db: 2.0,
            step_db: 0.5,
        }
    }
}

impl PowerRange {
    /// The offset grid, ascending. Empty when the range is malformed.
    pub fn offsets_db(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.step_db <= 0.0 || self.min_offset_db > self.max_offset_db {
            return out;
        }
        let mut i = 0u32;
        loop {
            let v = self.min_offset_db + f64::from(i) * self.step_db;
            if v > self.max_offset_db + 1e-9 {
                break;
            }
            out.push(v);
            i += 1;
        }
        out
    }
}

/// Rectangular planar-array geometry plus the codebook size it carries.
/// Element spacing is in wavelength units, so the carrier cancels out of
/// the phase terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub rows: usize,
    pub cols: usize,
    pub dx_wavelengths: f64,
    pub dy_wavelengths: f64,
    /// Number of steering entries in each sub-array's codebook.
    pub beams: usize,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        ArrayConfig {
            rows: 4,
            cols: 4,
            dx_wavelengths: 0.5,
            dy_wavelengths: 0.5,
            beams: 64,
        }
    }
}

impl ArrayConfig {
    pub fn label(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }
}

/// Parameters of the frozen per-link shadow-fading draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowFadingParams {
    pub sigma_los_db: f64,
    pub sigma_nlos_db: f64,
    pub seed: u64,
}

impl Default for ShadowFadingParams {
    fn default() -> Self {
        // Urban-macro lognormal spreads from the 3GPP table the path-loss
        // formulas come from.
        ShadowFadingParams {
            sigma_los_db: 4.0,
            sigma_nlos_db: 6.0,
            seed: 0,
        }
    }
}

/// Full world state evaluated by the link and control modules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub base_stations: Vec<BaseStation>,
    pub buildings: Vec<Building>,
    pub fss: FssReceiver,
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    /// Radius of each base station's service disc; UEs lie inside it.
    pub coverage_radius_m: f64,
    pub power_range: PowerRange,
    pub antenna: ArrayConfig,
    /// Minimum per-UE downlink rate (bps/Hz) a serving beam must deliver.
    pub rate_qos_bps_hz: f64,
    /// Objective weight between total capacity (w=0) and served-UE count
    /// (w=1).
    pub weight: f64,
    /// Noise level UEs see, dBm over the full bandwidth.
    pub ue_noise_dbm: f64,
    pub shadow: ShadowFadingParams,
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// One violated invariant, with a path to the offending entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

/// All invariant violations found in a scenario. Empty means every
/// downstream module can consume the scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn flag(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

/// Checks every type invariant and returns the full list of violations.
pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let mut report = ValidationReport::default();

    if s.power_range.step_db <= 0.0 {
        report.flag("power_range.step_db", "step must be > 0");
    }
    if s.power_range.min_offset_db > s.power_range.max_offset_db {
        report.flag("power_range", "min offset exceeds max offset");
    }
    if !(s.carrier_ghz > 10.0 && s.carrier_ghz < 100.0) {
        report.flag(
            "carrier_ghz",
            "outside the (10, 100) GHz validity range of the rain model",
        );
    }
    if !(s.bandwidth_mhz > 0.0) {
        report.flag("bandwidth_mhz", "must be > 0");
    }
    if !(s.coverage_radius_m > 0.0) {
        report.flag("coverage_radius_m", "must be > 0");
    }
    if !(s.weight > 0.0 && s.weight < 1.0) {
        report.flag("weight", "must lie in the open interval (0, 1)");
    }
    if !(s.rate_qos_bps_hz >= 0.0) || !s.rate_qos_bps_hz.is_finite() {
        report.flag("rate_qos_bps_hz", "must be finite and >= 0");
    }
    if !s.ue_noise_dbm.is_finite() {
        report.flag("ue_noise_dbm", "must be finite");
    }
    if s.antenna.rows < 1 || s.antenna.cols < 1 {
        report.flag("antenna", "array needs at least one row and column");
    }
    if !(s.antenna.dx_wavelengths > 0.0 && s.antenna.dy_wavelengths > 0.0) {
        report.flag("antenna", "element spacing must be > 0");
    }
    if s.antenna.beams < 1 {
        report.flag("antenna.beams", "codebook needs at least one entry");
    }
    if s.shadow.sigma_los_db < 0.0 || s.shadow.sigma_nlos_db < 0.0 {
        report.flag("shadow", "sigmas must be >= 0");
    }

    if !s.fss.position.is_finite() || s.fss.position.z < 0.0 {
        report.flag("fss.position", "must be finite with z >= 0");
    }
    if !(0.0..=90.0).contains(&s.fss.elevation_deg) {
        report.flag("fss.elevation_deg", "must lie in [0, 90]");
    }
    if !s.fss.noise_power_dbm.is_finite() {
        report.flag("fss.noise_power_dbm", "must be finite");
    }
    if !s.fss.max_gain_dbi.is_finite() {
        report.flag("fss.max_gain_dbi", "must be finite");
    }

    for (k, bs) in s.base_stations.iter().enumerate() {
        let at = |rest: &str| format!("base_stations[{k}]{rest}");
        if !bs.position.is_finite() {
            report.flag(at(".position"), "must be finite");
        }
        if !(bs.height_m() > 0.0) {
            report.flag(at(".position.z"), "antenna height must be > 0");
        }
        if !bs.nominal_power_dbm.is_finite() {
            report.flag(at(".nominal_power_dbm"), "must be finite");
        }
        if bs.sectors.len() != 3 {
            report.flag(
                at(".sectors"),
                format!("expected exactly 3 sectors, found {}", bs.sectors.len()),
            );
        } else {
            // The three boresights must partition azimuth into 120° spans.
            let mut centers: Vec<f64> = bs
                .sectors
                .iter()
                .map(|sec| {
                    let mut a = sec.azimuth_center_deg % 360.0;
                    if a < 0.0 {
                        a += 360.0;
                    }
                    a
                })
                .collect();
            centers.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
            let ok = (centers[1] - centers[0] - 120.0).abs() < 1e-6
                && (centers[2] - centers[1] - 120.0).abs() < 1e-6;
            if !ok {
                report.flag(
                    at(".sectors"),
                    "sector azimuth spans must partition 360 degrees in 120-degree steps",
                );
            }
        }
        for (j, sec) in bs.sectors.iter().enumerate() {
            let at = |rest: &str| format!("base_stations[{k}].sectors[{j}]{rest}");
            if sec.subarrays.is_empty() {
                report.flag(at(".subarrays"), "at least one sub-array required");
            }
            if !sec.azimuth_center_deg.is_finite() {
                report.flag(at(".azimuth_center_deg"), "must be finite");
            }
            for (u, ue) in sec.ues.iter().enumerate() {
                let at = |rest: &str| {
                    format!("base_stations[{k}].sectors[{j}].ues[{u}]{rest}")
                };
                if !ue.position.is_finite() || ue.position.z < 0.0 {
                    report.flag(at(".position"), "must be finite with z >= 0");
                } else if ue.position.distance_2d(&bs.position)
                    > s.coverage_radius_m + 1e-6
                {
                    report.flag(at(".position"), "outside the owning BS coverage disc");
                }
            }
        }
    }

    for (b, building) in s.buildings.iter().enumerate() {
        let at = |rest: &str| format!("buildings[{b}]{rest}");
        if building.footprint.len() < 3 {
            report.flag(
                at(".footprint"),
                "polygon needs at least 3 vertices to be simple (non-self-intersecting)",
            );
            continue;
        }
        if building.footprint.iter().any(|p| !p.is_finite()) {
            report.flag(at(".footprint"), "vertices must be finite");
            continue;
        }
        if crate::geom::polygon_self_intersects(&building.footprint_2d()) {
            report.flag(at(".footprint"), "polygon must be simple (non-self-intersecting)");
        }
        if !(building.height_m > 0.0) {
            report.flag(at(".height_m"), "must be > 0");
        }
    }

    report
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

/// Knobs of the synthetic deployment generator. Defaults reproduce the
/// reference evaluation layout: 33 three-sector macro BSs uniform in a
/// 5 km disc around the receiver, 25 m masts with 10-degree down-tilt,
/// 4 panels per sector carrying 4x4 arrays with 64 beams, and 10 UEs per
/// sector inside a 1 km service disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorParams {
    pub bs_count: usize,
    pub region_radius_m: f64,
    pub bs_height_m: f64,
    /// Base stations are rejected closer to the receiver than this.
    pub min_bs_fss_distance_m: f64,
    pub coverage_radius_m: f64,
    pub ues_per_sector: usize,
    pub ue_height_m: f64,
    pub ue_min_distance_m: f64,
    pub building_count: usize,
    pub building_side_m: (f64, f64),
    pub building_height_m: (f64, f64),
    pub subarrays_per_sector: usize,
    pub antenna: ArrayConfig,
    pub nominal_power_dbm: f64,
    pub power_range: PowerRange,
    pub down_tilt_deg: f64,
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    pub fss_height_m: f64,
    pub fss_max_gain_dbi: f64,
    pub fss_elevation_deg: f64,
    pub fss_boresight_azimuth_deg: f64,
    /// Receiver noise floor; `None` derives thermal noise over the band
    /// plus a 7 dB noise figure.
    pub fss_noise_dbm: Option<f64>,
    /// UE noise floor; same `None` rule as `fss_noise_dbm`.
    pub ue_noise_dbm: Option<f64>,
    pub rate_qos_bps_hz: f64,
    pub weight: f64,
    pub shadow_sigma_los_db: f64,
    pub shadow_sigma_nlos_db: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            bs_count: 33,
            region_radius_m: 5000.0,
            bs_height_m: 25.0,
            min_bs_fss_distance_m: 100.0,
            coverage_radius_m: 1000.0,
            ues_per_sector: 10,
            ue_height_m: 1.5,
            ue_min_distance_m: 10.0,
            building_count: 120,
            building_side_m: (20.0, 60.0),
            building_height_m: (10.0, 40.0),
            subarrays_per_sector: 4,
            antenna: ArrayConfig::default(),
            nominal_power_dbm: 38.0,
            power_range: PowerRange::default(),
            down_tilt_deg: 10.0,
            carrier_ghz: 12.45,
            bandwidth_mhz: 500.0,
            fss_height_m: 3.0,
            fss_max_gain_dbi: 32.5,
            fss_elevation_deg: 30.0,
            fss_boresight_azimuth_deg: 0.0,
            // Dish receivers run a quieter front end than handsets: about
            // 4 dB of noise figure over the 500 MHz band instead of 7.
            fss_noise_dbm: Some(-83.0),
            ue_noise_dbm: None,
            rate_qos_bps_hz: 0.5,
            weight: 0.5,
            shadow_sigma_los_db: 4.0,
            shadow_sigma_nlos_db: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    /// A parameter makes placement impossible (zero-area region, inverted
    /// ranges, minimum distances larger than the region, ...).
    InfeasibleParams(String),
    /// Rejection sampling could not place an entity; the region is too
    /// crowded for the requested counts.
    PlacementFailed(String),
}

impl core::fmt::Display for GeneratorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GeneratorError::InfeasibleParams(m) => write!(f, "infeasible generator params: {m}"),
            GeneratorError::PlacementFailed(m) => write!(f, "placement failed: {m}"),
        }
    }
}

impl core::error::Error for GeneratorError {}

const PLACEMENT_ATTEMPTS: u32 = 1000;

/// Builds a synthetic scenario. Identical `(params, seed)` produce a
/// bit-identical scenario; every generated entity is placed outdoors and
/// satisfies the type invariants checked by [`validate_scenario`].
pub fn generate_scenario(
    params: &GeneratorParams,
    seed: u64,
) -> Result<Scenario, GeneratorError> {
    check_params(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let fss = FssReceiver {
        position: GeoPoint::new(0.0, 0.0, params.fss_height_m),
        boresight_azimuth_deg: params.fss_boresight_azimuth_deg,
        elevation_deg: params.fss_elevation_deg,
        max_gain_dbi: params.fss_max_gain_dbi,
        noise_power_dbm: params
            .fss_noise_dbm
            .unwrap_or_else(|| thermal_noise_dbm(params.bandwidth_mhz, 7.0)),
    };

    // Buildings first so stations and UEs can be placed outside them.
    let mut buildings = Vec::with_capacity(params.building_count);
    for b in 0..params.building_count {
        let building = place_building(params, &mut rng, b)?;
        buildings.push(building);
    }

    let mut base_stations = Vec::with_capacity(params.bs_count);
    let mut next_ue_id = 0u32;
    for k in 0..params.bs_count {
        let position = place_outdoor_point(
            &mut rng,
            &buildings,
            params.bs_height_m,
            &format!("base station {k}"),
            |rng| {
                let (x, y) = disc_point(rng, params.region_radius_m);
                if libm::hypot(x, y) < params.min_bs_fss_distance_m {
                    None
                } else {
                    Some((x, y))
                }
            },
        )?;

        let mut sectors = Vec::with_capacity(3);
        for j in 0..3 {
            let azimuth_center_deg = 120.0 * j as f64;
            let mut ues = Vec::with_capacity(params.ues_per_sector);
            for u in 0..params.ues_per_sector {
                let ue_pos = place_outdoor_point(
                    &mut rng,
                    &buildings,
                    params.ue_height_m,
                    &format!("UE {u} of BS {k} sector {j}"),
                    |rng| {
                        let span = params.coverage_radius_m - params.ue_min_distance_m;
                        let r = params.ue_min_distance_m
                            + span * libm::sqrt(rng.gen::<f64>());
                        let az = azimuth_center_deg + rng.gen_range(-60.0..60.0);
                        let az_rad = az.to_radians();
                        Some((
                            position.x + r * libm::sin(az_rad),
                            position.y + r * libm::cos(az_rad),
                        ))
                    },
                )?;
                ues.push(UserEquipment {
                    id: next_ue_id,
                    position: ue_pos,
                });
                next_ue_id += 1;
            }
            sectors.push(Sector {
                azimuth_center_deg,
                subarrays: (0..params.subarrays_per_sector)
                    .map(|m| SubArray { id: m as u32 })
                    .collect(),
                cochannel: true,
                ues,
            });
        }

        base_stations.push(BaseStation {
            id: k as u32,
            position,
            nominal_power_dbm: params.nominal_power_dbm,
            down_tilt_deg: params.down_tilt_deg,
            sectors,
        });
    }

    Ok(Scenario {
        base_stations,
        buildings,
        fss,
        carrier_ghz: params.carrier_ghz,
        bandwidth_mhz: params.bandwidth_mhz,
        coverage_radius_m: params.coverage_radius_m,
        power_range: params.power_range,
        antenna: params.antenna,
        rate_qos_bps_hz: params.rate_qos_bps_hz,
        weight: params.weight,
        ue_noise_dbm: params
            .ue_noise_dbm
            .unwrap_or_else(|| thermal_noise_dbm(params.bandwidth_mhz, 7.0)),
        shadow: ShadowFadingParams {
            sigma_los_db: params.shadow_sigma_los_db,
            sigma_nlos_db: params.shadow_sigma_nlos_db,
            seed,
        },
    })
}

fn check_params(p: &GeneratorParams) -> Result<(), GeneratorError> {
    let bad = |m: &str| Err(GeneratorError::InfeasibleParams(m.into()));
    if !(p.region_radius_m > 0.0) {
        return bad("region_radius_m must be > 0");
    }
    if p.bs_count > 0 && p.min_bs_fss_distance_m >= p.region_radius_m {
        return bad("min_bs_fss_distance_m leaves no room inside region_radius_m");
    }
    if !(p.coverage_radius_m > 0.0) {
        return bad("coverage_radius_m must be > 0");
    }
    if p.ue_min_distance_m >= p.coverage_radius_m {
        return bad("ue_min_distance_m leaves no room inside coverage_radius_m");
    }
    if p.building_count > 0
        && !(p.building_side_m.0 > 0.0 && p.building_side_m.1 >= p.building_side_m.0)
    {
        return bad("building_side_m range is inverted or non-positive");
    }
    if p.building_count > 0
        && !(p.building_height_m.0 > 0.0 && p.building_height_m.1 >= p.building_height_m.0)
    {
        return bad("building_height_m range is inverted or non-positive");
    }
    if !(p.bs_height_m > 0.0) {
        return bad("bs_height_m must be > 0");
    }
    if p.bs_count > 0 && p.subarrays_per_sector == 0 {
        return bad("subarrays_per_sector must be >= 1");
    }
    Ok(())
}

/// Uniform point in a disc of `radius` around the origin.
fn disc_point(rng: &mut ChaCha8Rng, radius: f64) -> (f64, f64) {
    let r = radius * libm::sqrt(rng.gen::<f64>());
    let az = rng.gen_range(0.0..360.0f64).to_radians();
    (r * libm::sin(az), r * libm::cos(az))
}

/// Draws candidate ground positions from `draw` until one lands outside
/// every building footprint.
fn place_outdoor_point(
    rng: &mut ChaCha8Rng,
    buildings: &[Building],
    height: f64,
    what: &str,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Option<(f64, f64)>,
) -> Result<GeoPoint, GeneratorError> {
    for _ in 0..PLACEMENT_ATTEMPTS {
        let Some((x, y)) = draw(rng) else { continue };
        let indoors = buildings
            .iter()
            .any(|b| point_in_polygon((x, y), &b.footprint_2d()));
        if !indoors {
            return Ok(GeoPoint::new(x, y, height));
        }
    }
    Err(GeneratorError::PlacementFailed(format!(
        "no outdoor spot for {what} after {PLACEMENT_ATTEMPTS} attempts"
    )))
}

/// Random rectangular building that does not cover the receiver site at
/// the origin.
fn place_building(
    params: &GeneratorParams,
    rng: &mut ChaCha8Rng,
    index: usize,
) -> Result<Building, GeneratorError> {
    for _ in 0..PLACEMENT_ATTEMPTS {
        let (cx, cy) = disc_point(rng, params.region_radius_m);
        let (lo, hi) = params.building_side_m;
        let half_w = 0.5 * if hi > lo { rng.gen_range(lo..hi) } else { lo };
        let half_l = 0.5 * if hi > lo { rng.gen_range(lo..hi) } else { lo };
        let rot = rng.gen_range(0.0..core::f64::consts::PI);
        let (hlo, hhi) = params.building_height_m;
        let height = if hhi > hlo { rng.gen_range(hlo..hhi) } else { hlo };

        let (s, c) = (libm::sin(rot), libm::cos(rot));
        let corner = |dx: f64, dy: f64| {
            GeoPoint::new(cx + dx * c - dy * s, cy + dx * s + dy * c, 0.0)
        };
        let footprint = alloc::vec![
            corner(-half_w, -half_l),
            corner(half_w, -half_l),
            corner(half_w, half_l),
            corner(-half_w, half_l),
        ];
        let building = Building {
            footprint,
            height_m: height,
        };
        if !point_in_polygon((0.0, 0.0), &building.footprint_2d()) {
            return Ok(building);
        }
    }
    Err(GeneratorError::PlacementFailed(format!(
        "building {index} kept covering the receiver site"
    )))
}
