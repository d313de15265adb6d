//! Link-level metrics over a frozen scenario and weather context:
//! sector-to-incumbent interference, per-BS and aggregate interference,
//! UE SNR, and downlink capacity.
//!
//! The [`Evaluator`] front-loads every propagation and geometry result so
//! the control policies only do dB arithmetic per candidate. All caches
//! are built in a fixed order and the aggregate is summed in canonical
//! (station, sector, beam) order, keeping every reported dB bit-stable.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::antenna::{
    array_factor, beam_gain_dbi, build_codebook, fss_offaxis_angle_deg, BeamCodebook,
    CodebookError, Direction, FssPattern, SectorFrame,
};
use crate::context::WeatherContext;
use crate::num::{DB_FLOOR, LINEAR_FLOOR};
use crate::propagation::{
    classify_los, path_loss_db, path_loss_weather_db, LinkId, PropagationError,
};
use crate::scenario::Scenario;

/// One selected beam: which panel transmits and which codebook entry
/// steers it. Panels are identical, so metrics depend only on `codebook`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamChoice {
    pub subarray: usize,
    pub codebook: usize,
}

/// Per-station slice of a network state. An inactive station carries no
/// power and no beams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsAssignment {
    pub active: bool,
    pub power_dbm: Option<f64>,
    /// Selected beams per sector; well-formed states hold at most one
    /// entry per sector (constraint checks flag anything else).
    pub sector_beams: Vec<Vec<BeamChoice>>,
}

impl BsAssignment {
    pub fn off(sector_count: usize) -> Self {
        BsAssignment {
            active: false,
            power_dbm: None,
            sector_beams: alloc::vec![Vec::new(); sector_count],
        }
    }

    /// Inactive stations must carry no beams and no power.
    pub fn consistent(&self) -> bool {
        self.active
            || (self.power_dbm.is_none() && self.sector_beams.iter().all(Vec::is_empty))
    }
}

/// Activation, beam, and power choices for every station in a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkState {
    pub assignments: Vec<BsAssignment>,
}

impl NetworkState {
    pub fn all_off(scenario: &Scenario) -> Self {
        NetworkState {
            assignments: scenario
                .base_stations
                .iter()
                .map(|bs| BsAssignment::off(bs.sectors.len()))
                .collect(),
        }
    }

    pub fn active_bs_count(&self) -> u32 {
        self.assignments.iter().filter(|a| a.active).count() as u32
    }
}

/// Decomposed budget of one sector-to-incumbent link, kept alongside the
/// combined level so the additive identity is checkable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub path_loss_db: f64,
    pub sector_split_db: f64,
    pub resulting_level_dbm: f64,
}

impl LinkBudget {
    pub fn new(tx_power_dbm: f64, tx_gain_dbi: f64, rx_gain_dbi: f64, path_loss_db: f64) -> Self {
        let sector_split_db = crate::num::three_sector_split_db();
        LinkBudget {
            tx_power_dbm,
            tx_gain_dbi,
            rx_gain_dbi,
            path_loss_db,
            sector_split_db,
            resulting_level_dbm: tx_power_dbm + tx_gain_dbi + rx_gain_dbi
                - path_loss_db
                - sector_split_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    Codebook(CodebookError),
    Propagation(PropagationError),
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::Codebook(e) => write!(f, "codebook: {e}"),
            EvalError::Propagation(e) => write!(f, "propagation: {e}"),
        }
    }
}

impl core::error::Error for EvalError {}

impl From<CodebookError> for EvalError {
    fn from(e: CodebookError) -> Self {
        EvalError::Codebook(e)
    }
}

impl From<PropagationError> for EvalError {
    fn from(e: PropagationError) -> Self {
        EvalError::Propagation(e)
    }
}

struct SectorCache {
    cochannel: bool,
    /// Beam gain toward the incumbent per codebook entry, dBi.
    fss_beam_gain_dbi: Vec<f64>,
    /// Sector-to-incumbent level per codebook entry at 0 dBm transmit
    /// power; the level at power P is this plus P.
    interference0_dbm: Vec<f64>,
    ue_dir: Vec<Direction>,
    ue_path_loss_db: Vec<f64>,
    /// Codebook entry serving each UE (max gain toward it, lowest index
    /// on ties).
    ue_beam: Vec<usize>,
    /// UE SNR on its serving beam at 0 dBm transmit power.
    ue_snr0_db: Vec<f64>,
    /// UEs served by each codebook entry.
    beam_ues: Vec<Vec<u32>>,
    /// Worst served-UE SNR at 0 dBm per entry; +inf for unloaded beams.
    beam_min_snr0_db: Vec<f64>,
}

struct BsCache {
    fss_path_loss_db: f64,
    fss_rx_gain_dbi: f64,
    sectors: Vec<SectorCache>,
}

/// Precomputed link metrics for one (scenario, weather) pair.
pub struct Evaluator<'a> {
    pub scenario: &'a Scenario,
    pub weather: WeatherContext,
    codebook: BeamCodebook,
    split_db: f64,
    /// SNR needed for the per-UE rate floor; -inf when the floor is 0.
    snr_req_db: f64,
    bs: Vec<BsCache>,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, weather: WeatherContext) -> Result<Self, EvalError> {
        let codebook = build_codebook(scenario.antenna.beams)?;
        let pattern = FssPattern::new(scenario.fss.max_gain_dbi);
        let split_db = crate::num::three_sector_split_db();
        let f_ghz = scenario.carrier_ghz;

        let lin_req = libm::pow(2.0, scenario.rate_qos_bps_hz) - 1.0;
        let snr_req_db = if lin_req > 0.0 {
            10.0 * libm::log10(lin_req)
        } else {
            f64::NEG_INFINITY
        };

        let mut bs_caches = Vec::with_capacity(scenario.base_stations.len());
        for bs in &scenario.base_stations {
            let d3d = bs.position.distance_3d(&scenario.fss.position);
            let los = classify_los(&bs.position, &scenario.fss.position, &scenario.buildings);
            let clear =
                path_loss_db(d3d, f_ghz, los, &scenario.shadow, LinkId::BsToFss { bs: bs.id })?;
            let fss_path_loss_db = path_loss_weather_db(d3d / 1000.0, clear, &weather, f_ghz)?;
            let fss_rx_gain_dbi =
                pattern.gain_dbi(fss_offaxis_angle_deg(&scenario.fss, &bs.position));

            let mut sectors = Vec::with_capacity(bs.sectors.len());
            for (j, sector) in bs.sectors.iter().enumerate() {
                let frame = SectorFrame::new(sector.azimuth_center_deg, bs.down_tilt_deg);
                let fss_dir = frame.direction_to(&bs.position, &scenario.fss.position);
                let fss_beam_gain_dbi: Vec<f64> = codebook
                    .entries
                    .iter()
                    .map(|&beam| beam_gain_dbi(&scenario.antenna, beam, fss_dir))
                    .collect();
                let interference0_dbm: Vec<f64> = fss_beam_gain_dbi
                    .iter()
                    .map(|g| g + fss_rx_gain_dbi - fss_path_loss_db - split_db)
                    .collect();

                let n_ues = sector.ues.len();
                let mut ue_dir = Vec::with_capacity(n_ues);
                let mut ue_path_loss_db = Vec::with_capacity(n_ues);
                let mut ue_beam = Vec::with_capacity(n_ues);
                let mut ue_snr0_db = Vec::with_capacity(n_ues);
                let mut beam_ues = alloc::vec![Vec::new(); codebook.len()];
                let mut beam_min_snr0_db = alloc::vec![f64::INFINITY; codebook.len()];

                for (u, ue) in sector.ues.iter().enumerate() {
                    let d_ue = bs.position.distance_3d(&ue.position);
                    let los_ue = classify_los(&bs.position, &ue.position, &scenario.buildings);
                    let clear_ue = path_loss_db(
                        d_ue,
                        f_ghz,
                        los_ue,
                        &scenario.shadow,
                        LinkId::BsToUe {
                            bs: bs.id,
                            sector: j as u8,
                            ue: ue.id,
                        },
                    )?;
                    let pl_ue =
                        path_loss_weather_db(d_ue / 1000.0, clear_ue, &weather, f_ghz)?;
                    let dir = frame.direction_to(&bs.position, &ue.position);

                    let mut best = 0usize;
                    let mut best_af = f64::NEG_INFINITY;
                    for (n, &beam) in codebook.entries.iter().enumerate() {
                        let af = array_factor(&scenario.antenna, beam, dir);
                        if af > best_af {
                            best_af = af;
                            best = n;
                        }
                    }
                    let snr0 = beam_gain_dbi(&scenario.antenna, codebook.entry(best), dir)
                        - pl_ue
                        - scenario.ue_noise_dbm
                        - split_db;

                    ue_dir.push(dir);
                    ue_path_loss_db.push(pl_ue);
                    ue_beam.push(best);
                    ue_snr0_db.push(snr0);
                    beam_ues[best].push(u as u32);
                    if snr0 < beam_min_snr0_db[best] {
                        beam_min_snr0_db[best] = snr0;
                    }
                }

                sectors.push(SectorCache {
                    cochannel: sector.cochannel,
                    fss_beam_gain_dbi,
                    interference0_dbm,
                    ue_dir,
                    ue_path_loss_db,
                    ue_beam,
                    ue_snr0_db,
                    beam_ues,
                    beam_min_snr0_db,
                });
            }
            bs_caches.push(BsCache {
                fss_path_loss_db,
                fss_rx_gain_dbi,
                sectors,
            });
        }

        Ok(Evaluator {
            scenario,
            weather,
            codebook,
            split_db,
            snr_req_db,
            bs: bs_caches,
        })
    }

    pub fn codebook(&self) -> &BeamCodebook {
        &self.codebook
    }

    pub fn n_beams(&self) -> usize {
        self.codebook.len()
    }

    pub fn sector_count(&self, k: usize) -> usize {
        self.bs[k].sectors.len()
    }

    pub fn sector_cochannel(&self, k: usize, j: usize) -> bool {
        self.bs[k].sectors[j].cochannel
    }

    /// Level introduced at the incumbent by sector `j` of station `k` on
    /// codebook entry `n` at transmit power `p_dbm`, in dBm.
    pub fn sector_interference_dbm(&self, k: usize, j: usize, n: usize, p_dbm: f64) -> f64 {
        self.bs[k].sectors[j].interference0_dbm[n] + p_dbm
    }

    /// The same level at 0 dBm transmit power (add P to shift).
    pub fn interference0_dbm(&self, k: usize, j: usize, n: usize) -> f64 {
        self.bs[k].sectors[j].interference0_dbm[n]
    }

    /// Full budget decomposition of one sector-to-incumbent link.
    pub fn fss_link_budget(&self, k: usize, j: usize, n: usize, p_dbm: f64) -> LinkBudget {
        let bs = &self.bs[k];
        LinkBudget::new(
            p_dbm,
            bs.sectors[j].fss_beam_gain_dbi[n],
            bs.fss_rx_gain_dbi,
            bs.fss_path_loss_db,
        )
    }

    /// Linear interference (milliwatts) station `k` contributes under the
    /// given assignment: the sum of its co-channel sectors' selected
    /// beams, zero when inactive.
    pub fn bs_interference_mw(&self, k: usize, a: &BsAssignment) -> f64 {
        if !a.active {
            return 0.0;
        }
        let p = match a.power_dbm {
            Some(p) => p,
            None => return 0.0,
        };
        let sectors = &self.bs[k].sectors;
        let mut total = 0.0;
        for (j, beams) in a.sector_beams.iter().enumerate() {
            if j >= sectors.len() || !sectors[j].cochannel {
                continue;
            }
            for b in beams {
                total += libm::pow(10.0, (sectors[j].interference0_dbm[b.codebook] + p) / 10.0);
            }
        }
        total
    }

    /// Aggregate linear interference in canonical station order.
    pub fn aggregate_mw(&self, state: &NetworkState) -> f64 {
        let mut total = 0.0;
        for (k, a) in state.assignments.iter().enumerate() {
            if k >= self.bs.len() {
                break;
            }
            total += self.bs_interference_mw(k, a);
        }
        total
    }

    /// Aggregate interference-to-noise ratio in dB, floored at -200 when
    /// nothing (meaningfully) interferes.
    pub fn aggregate_in_db(&self, state: &NetworkState) -> f64 {
        self.in_db_from_mw(self.aggregate_mw(state))
    }

    /// I/N in dB for an already-summed linear interference value.
    pub fn in_db_from_mw(&self, total_mw: f64) -> f64 {
        if total_mw <= LINEAR_FLOOR {
            return DB_FLOOR;
        }
        let in_db = 10.0 * libm::log10(total_mw) - self.scenario.fss.noise_power_dbm;
        in_db.max(DB_FLOOR)
    }

    /// SNR of UE `u` in sector `j` of station `k` when served by codebook
    /// entry `n` at power `p_dbm`.
    pub fn ue_snr_db(&self, k: usize, j: usize, u: usize, n: usize, p_dbm: f64) -> f64 {
        let sec = &self.bs[k].sectors[j];
        let gain = beam_gain_dbi(&self.scenario.antenna, self.codebook.entry(n), sec.ue_dir[u]);
        p_dbm + gain - sec.ue_path_loss_db[u] - self.scenario.ue_noise_dbm - self.split_db
    }

    /// Codebook entry serving UE `u` (max gain, lowest index on ties).
    pub fn ue_assigned_beam(&self, k: usize, j: usize, u: usize) -> usize {
        self.bs[k].sectors[j].ue_beam[u]
    }

    /// UEs served by entry `n` of sector `j`.
    pub fn beam_ues(&self, k: usize, j: usize, n: usize) -> &[u32] {
        &self.bs[k].sectors[j].beam_ues[n]
    }

    /// Capacity sum (bps/Hz) and served-UE count of entry `n` at power
    /// `p_dbm`, over the UEs it serves.
    pub fn beam_load(&self, k: usize, j: usize, n: usize, p_dbm: f64) -> (f64, u32) {
        let sec = &self.bs[k].sectors[j];
        let mut cap = 0.0;
        for &u in &sec.beam_ues[n] {
            let snr = sec.ue_snr0_db[u as usize] + p_dbm;
            cap += libm::log2(1.0 + libm::pow(10.0, snr / 10.0));
        }
        (cap, sec.beam_ues[n].len() as u32)
    }

    /// Whether every UE served by entry `n` clears the per-UE rate floor
    /// at power `p_dbm`. Vacuously true for unloaded beams.
    pub fn beam_qos_ok(&self, k: usize, j: usize, n: usize, p_dbm: f64) -> bool {
        let min = self.bs[k].sectors[j].beam_min_snr0_db[n];
        min == f64::INFINITY || min + p_dbm >= self.snr_req_db
    }

    /// Total downlink capacity of station `k` under an assignment.
    pub fn bs_capacity_bps_hz(&self, k: usize, a: &BsAssignment) -> f64 {
        if !a.active {
            return 0.0;
        }
        let p = match a.power_dbm {
            Some(p) => p,
            None => return 0.0,
        };
        let mut cap = 0.0;
        for (j, beams) in a.sector_beams.iter().enumerate() {
            if j >= self.bs[k].sectors.len() {
                continue;
            }
            for b in beams {
                cap += self.beam_load(k, j, b.codebook, p).0;
            }
        }
        cap
    }

    /// Network totals under a state: capacity (bps/Hz) and served UEs.
    pub fn totals(&self, state: &NetworkState) -> (f64, u32) {
        let mut cap = 0.0;
        let mut served = 0u32;
        for (k, a) in state.assignments.iter().enumerate() {
            if k >= self.bs.len() || !a.active {
                continue;
            }
            cap += self.bs_capacity_bps_hz(k, a);
            if a.power_dbm.is_some() {
                for (j, beams) in a.sector_beams.iter().enumerate() {
                    if j >= self.bs[k].sectors.len() {
                        continue;
                    }
                    for b in beams {
                        served += self.bs[k].sectors[j].beam_ues[b.codebook].len() as u32;
                    }
                }
            }
        }
        (cap, served)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::WeatherContext;
    use crate::num::db_to_linear;
    use crate::scenario::{generate_scenario, GeneratorParams};

    fn tiny_params() -> GeneratorParams {
        GeneratorParams {
            bs_count: 2,
            region_radius_m: 1500.0,
            min_bs_fss_distance_m: 300.0,
            coverage_radius_m: 400.0,
            ues_per_sector: 2,
            building_count: 0,
            antenna: crate::scenario::ArrayConfig {
                beams: 16,
                ..Default::default()
            },
            shadow_sigma_los_db: 0.0,
            shadow_sigma_nlos_db: 0.0,
            ..GeneratorParams::default()
        }
    }

    fn sunny() -> WeatherContext {
        WeatherContext::from_rain_rate(0.0, 0)
    }

    fn one_beam_state(scenario: &Scenario, k: usize, j: usize, n: usize, p: f64) -> NetworkState {
        let mut state = NetworkState::all_off(scenario);
        state.assignments[k].active = true;
        state.assignments[k].power_dbm = Some(p);
        state.assignments[k].sector_beams[j].push(BeamChoice {
            subarray: 0,
            codebook: n,
        });
        state
    }

    #[test]
    fn link_budget_identity_and_example_level() {
        let b = LinkBudget::new(30.0, 10.0 * 16.0f64.log10(), 0.0, 93.9034);
        let expect = b.tx_power_dbm + b.tx_gain_dbi + b.rx_gain_dbi
            - b.path_loss_db
            - b.sector_split_db;
        assert!((b.resulting_level_dbm - expect).abs() < 1e-9);
        assert!((b.resulting_level_dbm + 56.63).abs() < 0.01, "{}", b.resulting_level_dbm);
    }

    #[test]
    fn sector_level_shifts_linearly_with_power() {
        let s = generate_scenario(&tiny_params(), 11).unwrap();
        let eval = Evaluator::new(&s, sunny()).unwrap();
        let base = eval.sector_interference_dbm(0, 0, 3, 0.0);
        let shifted = eval.sector_interference_dbm(0, 0, 3, 7.5);
        assert!((shifted - base - 7.5).abs() < 1e-12);

        let budget = eval.fss_link_budget(0, 0, 3, 7.5);
        assert!((budget.resulting_level_dbm - shifted).abs() < 1e-9);
    }

    #[test]
    fn inactive_and_gated_stations_contribute_nothing() {
        let s = generate_scenario(&tiny_params(), 12).unwrap();
        let eval = Evaluator::new(&s, sunny()).unwrap();
        let off = NetworkState::all_off(&s);
        assert_eq!(eval.aggregate_mw(&off), 0.0);
        assert_eq!(eval.aggregate_in_db(&off), DB_FLOOR);
        assert_eq!(eval.bs_interference_mw(0, &off.assignments[0]), 0.0);
    }

    #[test]
    fn aggregate_is_the_linear_sum_of_stations() {
        let s = generate_scenario(&tiny_params(), 13).unwrap();
        let eval = Evaluator::new(&s, sunny()).unwrap();
        let mut state = one_beam_state(&s, 0, 0, 1, 38.0);
        state.assignments[1].active = true;
        state.assignments[1].power_dbm = Some(36.5);
        state.assignments[1].sector_beams[2].push(BeamChoice {
            subarray: 1,
            codebook: 5,
        });

        let by_parts: f64 = (0..2)
            .map(|k| eval.bs_interference_mw(k, &state.assignments[k]))
            .sum();
        let total = eval.aggregate_mw(&state);
        assert!((total - by_parts).abs() <= 1e-12 * by_parts.abs());

        // Two equal levels combine 3.01 dB above one.
        let single = eval.sector_interference_dbm(0, 0, 1, 38.0);
        let combined = 10.0 * (2.0 * db_to_linear(single)).log10();
        assert!((combined - single - 10.0 * 2.0f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn deactivating_a_station_never_raises_aggregate() {
        let s = generate_scenario(&tiny_params(), 14).unwrap();
        let eval = Evaluator::new(&s, sunny()).unwrap();
        let mut state = one_beam_state(&s, 0, 0, 1, 38.0);
        state.assignments[1].active = true;
        state.assignments[1].power_dbm = Some(38.0);
        state.assignments[1].sector_beams[0].push(BeamChoice {
            subarray: 0,
            codebook: 2,
        });
        let full = eval.aggregate_in_db(&state);
        state.assignments[1] = BsAssignment::off(3);
        let reduced = eval.aggregate_in_db(&state);
        assert!(reduced <= full);
    }

    #[test]
    fn noise_level_interference_is_zero_in_ratio() {
        let s = generate_scenario(&tiny_params(), 15).unwrap();
        let eval = Evaluator::new(&s, sunny()).unwrap();
        let mw = db_to_linear(s.fss.noise_power_dbm);
        assert!(eval.in_db_from_mw(mw).abs() < 1e-9);
    }

    #[test]
    fn ue_snr_is_linear_in_power_and_capacity_monotone() {
        let s = generate_scenario(&tiny_params(), 16).unwrap();
        let eval = Evaluator::new(&s, sunny()).unwrap();
        let n = eval.ue_assigned_beam(0, 0, 0);
        let s0 = eval.ue_snr_db(0, 0, 0, n, 0.0);
        let s3 = eval.ue_snr_db(0, 0, 0, n, 10.0 * 2.0f64.log10());
        assert!((s3 - s0 - 10.0 * 2.0f64.log10()).abs() < 1e-12);

        let (cap_lo, served) = eval.beam_load(0, 0, n, 0.0);
        let (cap_hi, served_hi) = eval.beam_load(0, 0, n, 10.0);
        assert_eq!(served, served_hi);
        assert!(served >= 1);
        assert!(cap_hi > cap_lo);
    }

    #[test]
    fn assigned_beam_maximizes_gain() {
        let s = generate_scenario(&tiny_params(), 17).unwrap();
        let eval = Evaluator::new(&s, sunny()).unwrap();
        for j in 0..3 {
            for u in 0..s.base_stations[0].sectors[j].ues.len() {
                let best = eval.ue_assigned_beam(0, j, u);
                let best_snr = eval.ue_snr_db(0, j, u, best, 0.0);
                for n in 0..eval.n_beams() {
                    assert!(
                        eval.ue_snr_db(0, j, u, n, 0.0) <= best_snr + 1e-12,
                        "beam {n} beats assigned {best} for ue {u}"
                    );
                }
            }
        }
    }

    #[test]
    fn capacity_example_arithmetic() {
        // One UE at SNR 0 dB contributes exactly 1 bps/Hz, a 10 dB one
        // adds log2(11).
        let c0 = libm::log2(1.0 + libm::pow(10.0, 0.0));
        let c10 = libm::log2(1.0 + libm::pow(10.0, 1.0));
        assert!((c0 - 1.0).abs() < 1e-12);
        assert!((c0 + c10 - 4.45943).abs() < 1e-5);
    }

    #[test]
    fn totals_count_served_ues_once_per_selected_beam() {
        let s = generate_scenario(&tiny_params(), 18).unwrap();
        let eval = Evaluator::new(&s, sunny()).unwrap();
        let n = eval.ue_assigned_beam(0, 1, 0);
        let state = one_beam_state(&s, 0, 1, n, 38.0);
        let (cap, served) = eval.totals(&state);
        assert_eq!(served as usize, eval.beam_ues(0, 1, n).len());
        assert!(cap > 0.0);
        assert!((cap - eval.bs_capacity_bps_hz(0, &state.assignments[0])).abs() < 1e-12);
    }

    #[test]
    fn rainy_weather_strictly_raises_path_loss_based_levels() {
        let s = generate_scenario(&tiny_params(), 19).unwrap();
        let sunny_eval = Evaluator::new(&s, sunny()).unwrap();
        let rainy_eval =
            Evaluator::new(&s, WeatherContext::from_rain_rate(25.0, 0)).unwrap();
        let state = one_beam_state(&s, 0, 0, 0, 38.0);
        assert!(rainy_eval.aggregate_in_db(&state) < sunny_eval.aggregate_in_db(&state));
    }
}
