//! Beam-and-power control policies over a prebuilt [`Evaluator`]: the
//! two-loop greedy controller, an exact enumeration oracle for tiny
//! instances, and two static baseline policies.
//!
//! All policies are deterministic. The greedy commit gate and the final
//! reported interference go through the evaluator's one canonical
//! aggregate, so a decision's achieved I/N never drifts from the value
//! the gate approved.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::mem;

use serde::{Deserialize, Serialize};

use crate::link::{BeamChoice, BsAssignment, Evaluator, NetworkState};
use crate::num::{db_to_linear, LINEAR_FLOOR};

/// Default keep-out radius of the exclusion-zone baseline, meters.
pub const EXCLUSION_ZONE_RADIUS_M: f64 = 3000.0;
/// Default per-station I/N cutoff of the individual-threshold baseline.
pub const PER_BS_THRESHOLD_DB: f64 = -15.0;

/// Output of a control policy: the chosen network state plus its scored
/// summary. `iterations` reports (outer, inner) loop counts for the
/// greedy controller and (0, 0) for the one-shot policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlDecision {
    pub state: NetworkState,
    pub objective_value: f64,
    pub achieved_in_db: f64,
    pub total_capacity_bps_hz: f64,
    pub served_ues: u32,
    pub iterations: (u32, u32),
}

/// Priority of activating one (station, sector, panel, codebook entry)
/// combination at the power under consideration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub bs: usize,
    pub sector: usize,
    pub subarray: usize,
    pub codebook: usize,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub pass: bool,
    pub detail: String,
}

/// Per-constraint verdicts for a state: aggregate interference (C1),
/// served-UE rate QoS (C2), transmit-power limit (C3), and beam
/// exclusivity plus structural consistency (C4).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub c1_interference: CheckOutcome,
    pub c2_rate_qos: CheckOutcome,
    pub c3_power_limit: CheckOutcome,
    pub c4_beam_exclusivity: CheckOutcome,
    pub achieved_in_db: f64,
    pub threshold_db: f64,
}

impl ConstraintReport {
    pub fn all_pass(&self) -> bool {
        self.c1_interference.pass
            && self.c2_rate_qos.pass
            && self.c3_power_limit.pass
            && self.c4_beam_exclusivity.pass
    }
}

/// Weighted network objective: (1-w) * total capacity + w * served UEs.
pub fn evaluate_objective(eval: &Evaluator<'_>, state: &NetworkState, w: f64) -> f64 {
    let (cap, served) = eval.totals(state);
    (1.0 - w) * cap + w * f64::from(served)
}

fn decision_from_state(
    eval: &Evaluator<'_>,
    state: NetworkState,
    iterations: (u32, u32),
) -> ControlDecision {
    let achieved_in_db = eval.aggregate_in_db(&state);
    let (total_capacity_bps_hz, served_ues) = eval.totals(&state);
    let w = eval.scenario.weight;
    ControlDecision {
        objective_value: (1.0 - w) * total_capacity_bps_hz + w * f64::from(served_ues),
        achieved_in_db,
        total_capacity_bps_hz,
        served_ues,
        iterations,
        state,
    }
}

/// Structural problems that make a state unscorable (indices outside the
/// scenario, extra stations).
fn structural_issue(eval: &Evaluator<'_>, state: &NetworkState) -> Option<String> {
    let scenario = eval.scenario;
    if state.assignments.len() != scenario.base_stations.len() {
        return Some(format!(
            "state covers {} stations, scenario has {}",
            state.assignments.len(),
            scenario.base_stations.len()
        ));
    }
    for (k, a) in state.assignments.iter().enumerate() {
        let bs = &scenario.base_stations[k];
        if a.sector_beams.len() != bs.sectors.len() {
            return Some(format!("station {k}: sector count mismatch"));
        }
        for (j, beams) in a.sector_beams.iter().enumerate() {
            for b in beams {
                if b.codebook >= eval.n_beams() {
                    return Some(format!(
                        "station {k} sector {j}: codebook index {} out of range",
                        b.codebook
                    ));
                }
                if b.subarray >= bs.sectors[j].subarrays.len() {
                    return Some(format!(
                        "station {k} sector {j}: sub-array index {} out of range",
                        b.subarray
                    ));
                }
            }
        }
    }
    None
}

/// Checks C1 through C4 for a state against the governing threshold.
pub fn check_constraints(
    eval: &Evaluator<'_>,
    state: &NetworkState,
    i_th_db: f64,
) -> ConstraintReport {
    if let Some(issue) = structural_issue(eval, state) {
        let skipped = |what: &str| CheckOutcome {
            pass: false,
            detail: format!("not evaluated ({what}): {issue}"),
        };
        return ConstraintReport {
            c1_interference: skipped("C1"),
            c2_rate_qos: skipped("C2"),
            c3_power_limit: skipped("C3"),
            c4_beam_exclusivity: CheckOutcome {
                pass: false,
                detail: issue,
            },
            achieved_in_db: f64::NAN,
            threshold_db: i_th_db,
        };
    }

    let total_mw = eval.aggregate_mw(state);
    let achieved_in_db = eval.in_db_from_mw(total_mw);
    let c1_pass = total_mw <= LINEAR_FLOOR || achieved_in_db <= i_th_db;
    let c1 = CheckOutcome {
        pass: c1_pass,
        detail: format!("aggregate I/N {achieved_in_db:.3} dB vs threshold {i_th_db:.3} dB"),
    };

    let mut qos_failures = 0u32;
    let mut power_excess: f64 = 0.0;
    let mut exclusivity_issue: Option<String> = None;
    for (k, a) in state.assignments.iter().enumerate() {
        if !a.consistent() {
            exclusivity_issue
                .get_or_insert_with(|| format!("station {k}: inactive but carries beams or power"));
        }
        for (j, beams) in a.sector_beams.iter().enumerate() {
            if beams.len() > 1 {
                exclusivity_issue.get_or_insert_with(|| {
                    format!("station {k} sector {j}: {} beams selected", beams.len())
                });
            }
        }
        if !a.active {
            continue;
        }
        let Some(p) = a.power_dbm else { continue };
        let bs = &eval.scenario.base_stations[k];
        let p_max = bs.nominal_power_dbm + eval.scenario.power_range.max_offset_db;
        if p > p_max + 1e-9 {
            power_excess = power_excess.max(p - p_max);
        }
        for (j, beams) in a.sector_beams.iter().enumerate() {
            for b in beams {
                if !eval.beam_qos_ok(k, j, b.codebook, p) {
                    qos_failures += 1;
                }
            }
        }
    }

    let c2 = CheckOutcome {
        pass: qos_failures == 0,
        detail: if qos_failures == 0 {
            String::from("every served UE meets the rate floor")
        } else {
            format!("{qos_failures} selected beams serve a UE below the rate floor")
        },
    };
    let c3 = CheckOutcome {
        pass: power_excess == 0.0,
        detail: if power_excess == 0.0 {
            String::from("all powers within the grid limit")
        } else {
            format!("worst excess over the power limit: {power_excess:.3} dB")
        },
    };
    let c4 = match exclusivity_issue {
        None => CheckOutcome {
            pass: true,
            detail: String::from("at most one beam per sector"),
        },
        Some(detail) => CheckOutcome {
            pass: false,
            detail,
        },
    };

    ConstraintReport {
        c1_interference: c1,
        c2_rate_qos: c2,
        c3_power_limit: c3,
        c4_beam_exclusivity: c4,
        achieved_in_db,
        threshold_db: i_th_db,
    }
}

/// A sector clears the QoS gate at power `p` when it has no UEs or some
/// beam that serves at least one UE serves all of its UEs at the rate
/// floor.
fn sector_qos_feasible(eval: &Evaluator<'_>, k: usize, j: usize, p_dbm: f64) -> bool {
    if !eval.sector_cochannel(k, j) {
        return true;
    }
    let n_ues = eval.scenario.base_stations[k].sectors[j].ues.len();
    if n_ues == 0 {
        return true;
    }
    (0..eval.n_beams())
        .any(|n| !eval.beam_ues(k, j, n).is_empty() && eval.beam_qos_ok(k, j, n, p_dbm))
}

/// Smallest grid power letting every sector of station `k` serve UEs
/// within the rate floor, or `None` when even the top of the grid cannot
/// (the station then stays off).
pub fn min_power_for_qos(eval: &Evaluator<'_>, k: usize) -> Option<f64> {
    let bs = &eval.scenario.base_stations[k];
    for offset in eval.scenario.power_range.offsets_db() {
        let p = bs.nominal_power_dbm + offset;
        let ok = (0..bs.sectors.len()).all(|j| sector_qos_feasible(eval, k, j, p));
        if ok {
            return Some(p);
        }
    }
    None
}

/// Band-utilization-per-interference priority of one candidate at power
/// `p_dbm`: [(1-w) * capacity + w * served] / linearized interference,
/// denominator floored at 1e-20.
pub fn priority_score(
    eval: &Evaluator<'_>,
    k: usize,
    j: usize,
    m: usize,
    n: usize,
    p_dbm: f64,
    w: f64,
) -> CandidateScore {
    let (cap, served) = eval.beam_load(k, j, n, p_dbm);
    let denom = db_to_linear(eval.sector_interference_dbm(k, j, n, p_dbm)).max(LINEAR_FLOOR);
    CandidateScore {
        bs: k,
        sector: j,
        subarray: m,
        codebook: n,
        rho: ((1.0 - w) * cap + w * f64::from(served)) / denom,
    }
}

/// Best-scoring eligible candidate of one sector at power `p`, if any.
/// Panels are identical, so panel 0 always wins the lexicographic
/// tie-break and is the only one materialized.
fn sector_best_candidate(
    eval: &Evaluator<'_>,
    k: usize,
    j: usize,
    p_dbm: f64,
    w: f64,
) -> Option<CandidateScore> {
    if !eval.sector_cochannel(k, j) {
        return None;
    }
    let mut best: Option<CandidateScore> = None;
    for n in 0..eval.n_beams() {
        if !eval.beam_qos_ok(k, j, n, p_dbm) {
            continue;
        }
        let cand = priority_score(eval, k, j, 0, n, p_dbm, w);
        let better = match &best {
            None => true,
            Some(b) => cand.rho > b.rho,
        };
        if better {
            best = Some(cand);
        }
    }
    best
}

/// The greedy two-loop controller. The outer loop walks the power grid
/// upward from the QoS minimum; the first inner pass activates stations
/// and beams while the aggregate stays under `i_th_db`, later passes
/// re-steer the fixed active set at each higher power, committing each
/// sector swap only if the recomputed aggregate still fits and rolling
/// it back otherwise. Returns the all-off decision when nothing fits.
pub fn cat3s_control(eval: &Evaluator<'_>, i_th_db: f64) -> ControlDecision {
    let scenario = eval.scenario;
    let n_bs = scenario.base_stations.len();
    let offsets = scenario.power_range.offsets_db();
    let mut state = NetworkState::all_off(scenario);
    if n_bs == 0 || offsets.is_empty() {
        return decision_from_state(eval, state, (0, 0));
    }

    // Per-station QoS floor over the grid; stations with none stay off.
    let mut min_offset_idx: Vec<Option<usize>> = Vec::with_capacity(n_bs);
    for k in 0..n_bs {
        let bs = &scenario.base_stations[k];
        let idx = offsets.iter().position(|&o| {
            let p = bs.nominal_power_dbm + o;
            (0..bs.sectors.len()).all(|j| sector_qos_feasible(eval, k, j, p))
        });
        min_offset_idx.push(idx);
    }
    let operable: Vec<usize> = (0..n_bs).filter(|&k| min_offset_idx[k].is_some()).collect();
    let Some(start_idx) = operable
        .iter()
        .map(|&k| min_offset_idx[k].expect("operable"))
        .max()
    else {
        return decision_from_state(eval, state, (0, 0));
    };

    let w = scenario.weight;
    let mut outer = 0u32;
    let mut inner = 0u32;
    let mut commits_total = 0u64;
    let mut first_iteration = true;

    for idx in start_idx..offsets.len() {
        outer += 1;
        let commits_before = commits_total;

        let eligible: Vec<usize> = if first_iteration {
            operable.clone()
        } else {
            (0..n_bs).filter(|&k| state.assignments[k].active).collect()
        };
        if eligible.is_empty() {
            break;
        }

        // One static score table per outer iteration: each sector's best
        // eligible candidate at this power. Processing them in descending
        // score order (ties to the lowest station/sector) reproduces the
        // repeated global argmax over remaining sectors.
        let mut candidates: Vec<CandidateScore> = Vec::new();
        for &k in &eligible {
            let p = scenario.base_stations[k].nominal_power_dbm + offsets[idx];
            for j in 0..scenario.base_stations[k].sectors.len() {
                if let Some(c) = sector_best_candidate(eval, k, j, p, w) {
                    candidates.push(c);
                }
            }
        }
        candidates.sort_by(|a, b| {
            b.rho
                .partial_cmp(&a.rho)
                .expect("scores are finite")
                .then(a.bs.cmp(&b.bs))
                .then(a.sector.cmp(&b.sector))
        });

        let mut broke_inner = false;
        for cand in &candidates {
            inner += 1;
            let k = cand.bs;
            let p = scenario.base_stations[k].nominal_power_dbm + offsets[idx];

            let a = &mut state.assignments[k];
            let prev_active = a.active;
            let prev_power = a.power_dbm;
            let prev_beams = mem::take(&mut a.sector_beams[cand.sector]);
            a.active = true;
            a.power_dbm = Some(p);
            a.sector_beams[cand.sector].push(BeamChoice {
                subarray: cand.subarray,
                codebook: cand.codebook,
            });

            let tentative_in_db = eval.aggregate_in_db(&state);
            if tentative_in_db <= i_th_db {
                commits_total += 1;
            } else {
                let a = &mut state.assignments[k];
                a.sector_beams[cand.sector] = prev_beams;
                a.power_dbm = prev_power;
                a.active = prev_active;
                if first_iteration {
                    // No further sector fits at this power; stop the pass.
                    broke_inner = true;
                    break;
                }
            }
        }
        let _ = broke_inner;

        first_iteration = false;
        if commits_total == commits_before {
            break;
        }
    }

    decision_from_state(eval, state, (outer, inner))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BruteForceError {
    /// The instance has more states than the enumeration cap allows.
    SpaceExceedsCap { states: f64, cap: f64 },
}

impl core::fmt::Display for BruteForceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BruteForceError::SpaceExceedsCap { states, cap } => {
                write!(f, "brute-force space of {states:.3e} states exceeds cap {cap:.3e}")
            }
        }
    }
}

impl core::error::Error for BruteForceError {}

/// Default enumeration cap of the brute-force oracle.
pub const BRUTE_FORCE_CAP: f64 = 1e7;

struct BruteChoice {
    beam: Option<usize>,
    mw: f64,
    cap: f64,
    served: u32,
}

struct BruteSearch<'e, 'a> {
    eval: &'e Evaluator<'a>,
    i_th_db: f64,
    /// tables[k][power_idx][j] lists the QoS-passing choices of sector j.
    tables: Vec<Vec<Vec<Vec<BruteChoice>>>>,
    offsets: Vec<f64>,
    stack: Vec<BsPick>,
    best_state: Option<NetworkState>,
    best_objective: f64,
}

#[derive(Clone)]
struct BsPick {
    on: bool,
    power_idx: usize,
    beams: Vec<Option<usize>>,
}

impl BruteSearch<'_, '_> {
    fn leaf(&mut self, mw: f64, cap: f64, served: u32) {
        let in_db = self.eval.in_db_from_mw(mw);
        if mw > LINEAR_FLOOR && in_db > self.i_th_db {
            return;
        }
        let w = self.eval.scenario.weight;
        let objective = (1.0 - w) * cap + w * f64::from(served);
        if objective > self.best_objective {
            self.best_objective = objective;
            self.best_state = Some(self.materialize());
        }
    }

    fn materialize(&self) -> NetworkState {
        let scenario = self.eval.scenario;
        let mut state = NetworkState::all_off(scenario);
        for (k, pick) in self.stack.iter().enumerate() {
            if !pick.on {
                continue;
            }
            let a = &mut state.assignments[k];
            a.active = true;
            a.power_dbm =
                Some(scenario.base_stations[k].nominal_power_dbm + self.offsets[pick.power_idx]);
            for (j, beam) in pick.beams.iter().enumerate() {
                if let Some(n) = beam {
                    a.sector_beams[j].push(BeamChoice {
                        subarray: 0,
                        codebook: *n,
                    });
                }
            }
        }
        state
    }

    fn descend_sectors(&mut self, k: usize, power_idx: usize, j: usize, mw: f64, cap: f64, served: u32) {
        if mw > LINEAR_FLOOR && self.eval.in_db_from_mw(mw) > self.i_th_db {
            return; // adding stations or beams only raises interference
        }
        let sector_count = self.tables[k][power_idx].len();
        if j == sector_count {
            self.next_station(k + 1, mw, cap, served);
            return;
        }
        for c in 0..self.tables[k][power_idx][j].len() {
            let (beam, c_mw, c_cap, c_served) = {
                let choice = &self.tables[k][power_idx][j][c];
                (choice.beam, choice.mw, choice.cap, choice.served)
            };
            self.stack[k].beams[j] = beam;
            self.descend_sectors(k, power_idx, j + 1, mw + c_mw, cap + c_cap, served + c_served);
        }
        self.stack[k].beams[j] = None;
    }

    fn next_station(&mut self, k: usize, mw: f64, cap: f64, served: u32) {
        if k == self.tables.len() {
            self.leaf(mw, cap, served);
            return;
        }
        self.stack[k].on = false;
        self.next_station(k + 1, mw, cap, served);

        self.stack[k].on = true;
        for power_idx in 0..self.offsets.len() {
            self.stack[k].power_idx = power_idx;
            self.descend_sectors(k, power_idx, 0, mw, cap, served);
        }
        self.stack[k].on = false;
    }
}

/// Exhaustive argmax of the objective over every activation, grid power,
/// and per-sector beam combination satisfying C1-C4. Enumeration is
/// lexicographic (off before on, lower powers and beam indices first)
/// and a strict improvement test keeps the lexicographically smallest
/// optimum. Only usable on tiny instances; larger spaces are rejected.
pub fn brute_force_control(
    eval: &Evaluator<'_>,
    i_th_db: f64,
    cap: Option<f64>,
) -> Result<ControlDecision, BruteForceError> {
    let scenario = eval.scenario;
    let offsets = scenario.power_range.offsets_db();
    let cap = cap.unwrap_or(BRUTE_FORCE_CAP);

    let mut states = 1.0f64;
    for bs in &scenario.base_stations {
        let mut per_power = 1.0f64;
        for sector in &bs.sectors {
            let choices = if sector.cochannel {
                eval.n_beams() as f64 + 1.0
            } else {
                1.0
            };
            per_power *= choices;
        }
        states *= 1.0 + offsets.len() as f64 * per_power;
    }
    if states > cap {
        return Err(BruteForceError::SpaceExceedsCap { states, cap });
    }

    let n_bs = scenario.base_stations.len();
    let mut tables = Vec::with_capacity(n_bs);
    for (k, bs) in scenario.base_stations.iter().enumerate() {
        let mut by_power = Vec::with_capacity(offsets.len());
        for &offset in &offsets {
            let p = bs.nominal_power_dbm + offset;
            let mut by_sector = Vec::with_capacity(bs.sectors.len());
            for j in 0..bs.sectors.len() {
                let mut choices = Vec::new();
                choices.push(BruteChoice {
                    beam: None,
                    mw: 0.0,
                    cap: 0.0,
                    served: 0,
                });
                if bs.sectors[j].cochannel {
                    for n in 0..eval.n_beams() {
                        if !eval.beam_qos_ok(k, j, n, p) {
                            continue;
                        }
                        let (c, served) = eval.beam_load(k, j, n, p);
                        choices.push(BruteChoice {
                            beam: Some(n),
                            mw: db_to_linear(eval.sector_interference_dbm(k, j, n, p)),
                            cap: c,
                            served,
                        });
                    }
                }
                by_sector.push(choices);
            }
            by_power.push(by_sector);
        }
        tables.push(by_power);
    }

    let stack = scenario
        .base_stations
        .iter()
        .map(|bs| BsPick {
            on: false,
            power_idx: 0,
            beams: alloc::vec![None; bs.sectors.len()],
        })
        .collect();
    let mut search = BruteSearch {
        eval,
        i_th_db,
        tables,
        offsets,
        stack,
        best_state: None,
        best_objective: 0.0,
    };
    search.next_station(0, 0.0, 0.0, 0);

    let state = search
        .best_state
        .unwrap_or_else(|| NetworkState::all_off(scenario));
    Ok(decision_from_state(eval, state, (0, 0)))
}

/// Per-sector beam a station uses when it ignores the incumbent: the
/// highest-capacity loaded entry at nominal power (lowest index on
/// ties), or entry 0 for sectors with nothing to serve.
fn conventional_assignment(eval: &Evaluator<'_>, k: usize) -> BsAssignment {
    let bs = &eval.scenario.base_stations[k];
    let p = bs.nominal_power_dbm;
    let mut sector_beams = Vec::with_capacity(bs.sectors.len());
    for j in 0..bs.sectors.len() {
        if !eval.sector_cochannel(k, j) {
            sector_beams.push(Vec::new());
            continue;
        }
        let mut best_n = 0usize;
        let mut best_cap = f64::NEG_INFINITY;
        for n in 0..eval.n_beams() {
            if eval.beam_ues(k, j, n).is_empty() {
                continue;
            }
            let (c, _) = eval.beam_load(k, j, n, p);
            if c > best_cap {
                best_cap = c;
                best_n = n;
            }
        }
        sector_beams.push(alloc::vec![BeamChoice {
            subarray: 0,
            codebook: best_n,
        }]);
    }
    BsAssignment {
        active: true,
        power_dbm: Some(p),
        sector_beams,
    }
}

fn baseline_decision(
    eval: &Evaluator<'_>,
    keep: impl Fn(usize, f64) -> bool,
) -> ControlDecision {
    let scenario = eval.scenario;
    let mut state = NetworkState::all_off(scenario);
    for k in 0..scenario.base_stations.len() {
        let assignment = conventional_assignment(eval, k);
        let individual_in_db = eval.in_db_from_mw(eval.bs_interference_mw(k, &assignment));
        if keep(k, individual_in_db) {
            state.assignments[k] = assignment;
        }
    }
    decision_from_state(eval, state, (0, 0))
}

/// Exclusion-zone baseline: stations within `radius_m` of the incumbent
/// shut down; the rest stay on at nominal power with conventional beams
/// unless their individual I/N exceeds `i_th_db`. The aggregate of the
/// survivors is not checked.
pub fn baseline_exclusion_zone(
    eval: &Evaluator<'_>,
    i_th_db: f64,
    radius_m: f64,
) -> ControlDecision {
    let fss = eval.scenario.fss.position;
    baseline_decision(eval, |k, individual_in_db| {
        let d = eval.scenario.base_stations[k].position.distance_2d(&fss);
        d > radius_m && individual_in_db <= i_th_db
    })
}

/// Individual-threshold baseline: a station stays on (nominal power,
/// conventional beams) only when its own I/N is strictly below
/// `per_bs_threshold_db`. The aggregate of the survivors is not checked.
pub fn baseline_in_threshold(eval: &Evaluator<'_>, per_bs_threshold_db: f64) -> ControlDecision {
    baseline_decision(eval, |_, individual_in_db| {
        individual_in_db < per_bs_threshold_db
    })
}
