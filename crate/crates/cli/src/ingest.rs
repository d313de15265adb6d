//! Parsers for external datasets: building footprints from GeoJSON and
//! cell-site lists from CSV, both projected into the scenario's local
//! planar frame.
//!
//! Parsers are total: any byte input yields either a value or a reported
//! error, and a bad feature or row never takes down the rest of the
//! document.

use std::fmt;

use coex_core::scenario::{BaseStation, Building, GeoPoint, Sector, SubArray};
use serde::Deserialize;

/// Geographic coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct LatLon {
    pub lat_deg: f64,
    pub lon_deg: f64,
}

const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Equirectangular projection anchored at an origin; x points east and
/// y north, in meters. Adequate for the few-kilometer frames used here
/// (round-trips recover coordinates within 1e-6 degrees at 10 km).
#[derive(Debug, Clone, Copy)]
pub struct LocalFrame {
    origin: LatLon,
    cos_lat0: f64,
}

impl LocalFrame {
    pub fn new(origin: LatLon) -> Self {
        LocalFrame {
            origin,
            cos_lat0: origin.lat_deg.to_radians().cos(),
        }
    }

    pub fn project(&self, p: LatLon) -> (f64, f64) {
        let x = (p.lon_deg - self.origin.lon_deg).to_radians() * self.cos_lat0 * EARTH_RADIUS_M;
        let y = (p.lat_deg - self.origin.lat_deg).to_radians() * EARTH_RADIUS_M;
        (x, y)
    }

    pub fn unproject(&self, x: f64, y: f64) -> LatLon {
        LatLon {
            lat_deg: self.origin.lat_deg + (y / EARTH_RADIUS_M).to_degrees(),
            lon_deg: self.origin.lon_deg + (x / (EARTH_RADIUS_M * self.cos_lat0)).to_degrees(),
        }
    }
}

#[derive(Debug)]
pub enum IngestError {
    /// The document as a whole is unreadable (not JSON, not a
    /// FeatureCollection, no usable CSV header).
    Parse(String),
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::Parse(msg) => write!(f, "unreadable document: {msg}"),
        }
    }
}

impl std::error::Error for IngestError {}

/// A feature or row that was skipped, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemIssue {
    /// Feature index (GeoJSON) or 1-based data row (CSV).
    pub index: usize,
    pub message: String,
}

#[derive(Debug)]
pub struct BuildingsImport {
    pub buildings: Vec<Building>,
    pub issues: Vec<ItemIssue>,
}

/// Building height used when a feature carries no height property:
/// the midpoint of the 10-40 m band the generator also draws from.
pub const DEFAULT_BUILDING_HEIGHT_M: f64 = 25.0;

#[derive(Deserialize)]
struct RawFeatureCollection {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    features: Vec<RawFeature>,
}

#[derive(Deserialize)]
struct RawFeature {
    geometry: Option<RawGeometry>,
    #[serde(default)]
    properties: Option<serde_json::Map<String, serde_json::Value>>,
}

#[derive(Deserialize)]
struct RawGeometry {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    coordinates: serde_json::Value,
}

fn height_from_properties(props: Option<&serde_json::Map<String, serde_json::Value>>) -> f64 {
    let Some(v) = props.and_then(|p| p.get("height")) else {
        return DEFAULT_BUILDING_HEIGHT_M;
    };
    match v {
        serde_json::Value::Number(n) => n.as_f64().unwrap_or(DEFAULT_BUILDING_HEIGHT_M),
        // OSM exports often carry numeric tags as strings.
        serde_json::Value::String(s) => s.trim().parse().unwrap_or(DEFAULT_BUILDING_HEIGHT_M),
        _ => DEFAULT_BUILDING_HEIGHT_M,
    }
}

fn ring_positions(coords: &serde_json::Value) -> Option<Vec<(f64, f64)>> {
    // Polygon coordinates: array of rings, each ring an array of
    // [lon, lat, ...] positions. Only the outer ring is used.
    let outer = coords.as_array()?.first()?.as_array()?;
    let mut out = Vec::with_capacity(outer.len());
    for pos in outer {
        let nums = pos.as_array()?;
        let lon = nums.first()?.as_f64()?;
        let lat = nums.get(1)?.as_f64()?;
        out.push((lon, lat));
    }
    Some(out)
}

/// Parses a GeoJSON FeatureCollection of Polygon features into buildings
/// in the local frame anchored at `origin`. Features that are not
/// polygons or have degenerate rings are skipped and reported.
pub fn parse_buildings_geojson(
    doc: &[u8],
    origin: LatLon,
) -> Result<BuildingsImport, IngestError> {
    let fc: RawFeatureCollection =
        serde_json::from_slice(doc).map_err(|e| IngestError::Parse(e.to_string()))?;
    if fc.kind != "FeatureCollection" {
        return Err(IngestError::Parse(format!(
            "expected a FeatureCollection, got {:?}",
            fc.kind
        )));
    }

    let frame = LocalFrame::new(origin);
    let mut buildings = Vec::new();
    let mut issues = Vec::new();
    for (index, feature) in fc.features.iter().enumerate() {
        let Some(geometry) = &feature.geometry else {
            issues.push(ItemIssue {
                index,
                message: String::from("skipped: no geometry"),
            });
            continue;
        };
        if geometry.kind != "Polygon" {
            issues.push(ItemIssue {
                index,
                message: format!("skipped: geometry type {:?}", geometry.kind),
            });
            continue;
        }
        let Some(mut ring) = ring_positions(&geometry.coordinates) else {
            issues.push(ItemIssue {
                index,
                message: String::from("skipped: malformed polygon coordinates"),
            });
            continue;
        };
        // GeoJSON rings repeat the first position at the end.
        if ring.len() >= 2 && ring.first() == ring.last() {
            ring.pop();
        }
        if ring.len() < 3 {
            issues.push(ItemIssue {
                index,
                message: format!("skipped: degenerate ring with {} vertices", ring.len()),
            });
            continue;
        }
        let footprint = ring
            .into_iter()
            .map(|(lon, lat)| {
                let (x, y) = frame.project(LatLon {
                    lat_deg: lat,
                    lon_deg: lon,
                });
                GeoPoint::new(x, y, 0.0)
            })
            .collect();
        buildings.push(Building {
            footprint,
            height_m: height_from_properties(feature.properties.as_ref()),
        });
    }
    Ok(BuildingsImport { buildings, issues })
}

/// One parsed cell-site row before it becomes a station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawCellSite {
    pub lat_deg: f64,
    pub lon_deg: f64,
    /// Mast height in meters; rows without one get 25 m.
    pub height_m: f64,
}

pub const DEFAULT_SITE_HEIGHT_M: f64 = 25.0;

/// Station-level parameters the CSV does not carry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteDefaults {
    pub nominal_power_dbm: f64,
    pub down_tilt_deg: f64,
    pub subarrays_per_sector: usize,
}

impl Default for SiteDefaults {
    fn default() -> Self {
        SiteDefaults {
            nominal_power_dbm: 38.0,
            down_tilt_deg: 10.0,
            subarrays_per_sector: 4,
        }
    }
}

#[derive(Debug)]
pub struct CellSitesImport {
    pub base_stations: Vec<BaseStation>,
    pub issues: Vec<ItemIssue>,
}

fn site_to_station(id: u32, site: RawCellSite, frame: &LocalFrame, d: &SiteDefaults) -> BaseStation {
    let (x, y) = frame.project(LatLon {
        lat_deg: site.lat_deg,
        lon_deg: site.lon_deg,
    });
    let sectors = [0.0, 120.0, 240.0]
        .into_iter()
        .map(|azimuth_center_deg| Sector {
            azimuth_center_deg,
            subarrays: (0..d.subarrays_per_sector)
                .map(|i| SubArray { id: i as u32 })
                .collect(),
            cochannel: true,
            ues: Vec::new(),
        })
        .collect();
    BaseStation {
        id,
        position: GeoPoint::new(x, y, site.height_m),
        nominal_power_dbm: d.nominal_power_dbm,
        down_tilt_deg: d.down_tilt_deg,
        sectors,
    }
}

/// Parses a cell-site CSV (`lat,lon[,height]`, first row header) into
/// three-sector stations in the frame anchored at `origin`. Malformed
/// rows are skipped and reported by their 1-based data row number.
pub fn parse_cell_sites_csv(
    doc: &[u8],
    origin: LatLon,
    defaults: &SiteDefaults,
) -> Result<CellSitesImport, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(doc);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Parse(e.to_string()))?;
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
    };
    let lat_col = find("lat").ok_or_else(|| IngestError::Parse(String::from("no lat column")))?;
    let lon_col = find("lon").ok_or_else(|| IngestError::Parse(String::from("no lon column")))?;
    let height_col = find("height");

    let frame = LocalFrame::new(origin);
    let mut base_stations = Vec::new();
    let mut issues = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let mut skip = |message: String| issues.push(ItemIssue { index: row, message });
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                skip(format!("unreadable row: {e}"));
                continue;
            }
        };
        let field = |col: usize| record.get(col).unwrap_or("");
        let lat_deg: f64 = match field(lat_col).parse() {
            Ok(v) => v,
            Err(_) => {
                skip(format!("bad lat {:?}", field(lat_col)));
                continue;
            }
        };
        let lon_deg: f64 = match field(lon_col).parse() {
            Ok(v) => v,
            Err(_) => {
                skip(format!("bad lon {:?}", field(lon_col)));
                continue;
            }
        };
        if !(lat_deg.is_finite() && lat_deg.abs() <= 90.0) {
            skip(format!("lat {lat_deg} outside [-90, 90]"));
            continue;
        }
        if !(lon_deg.is_finite() && lon_deg.abs() <= 180.0) {
            skip(format!("lon {lon_deg} outside [-180, 180]"));
            continue;
        }
        let height_m = match height_col {
            Some(col) if !field(col).is_empty() => match field(col).parse() {
                Ok(v) => v,
                Err(_) => {
                    skip(format!("bad height {:?}", field(col)));
                    continue;
                }
            },
            _ => DEFAULT_SITE_HEIGHT_M,
        };
        let site = RawCellSite {
            lat_deg,
            lon_deg,
            height_m,
        };
        base_stations.push(site_to_station(row as u32, site, &frame, defaults));
    }
    Ok(CellSitesImport {
        base_stations,
        issues,
    })
}
