//! Replicated experiments and parameter sweeps.
//!
//! Every replicate draws its own network, long-range links, seed nodes and
//! update order. The random streams for replicate `i` are derived from
//! `(master_seed, i)` only, so results do not depend on thread count or
//! execution order, and all cells of a sweep see the same backbone
//! realizations (common random numbers across parameter values).

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{self, CascadeParams};
use crate::energy::{self, EnergyModel};
use crate::error::{Error, Result};
use crate::geom::{self, BoundaryMode};
use crate::graph;
use crate::smallworld::{self, LinkKind, LinkScheme};

pub const DEFAULT_N_NODES: usize = 10_000;
pub const DEFAULT_SIDE: f64 = 1000.0;
pub const DEFAULT_N_RUNS: usize = 1000;

/// Independent random streams used inside one replicate.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum Stream {
    Points = 1,
    Links = 2,
    Seed = 3,
    Schedule = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn stream_rng(master_seed: u64, replicate: usize, stream: Stream) -> ChaCha8Rng {
    let s = splitmix64(splitmix64(splitmix64(master_seed) ^ replicate as u64) ^ stream as u64);
    ChaCha8Rng::seed_from_u64(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_nodes: usize,
    pub side: f64,
    pub boundary: BoundaryMode,
    pub range: f64,
    pub scheme: LinkScheme,
    pub cascade: CascadeParams,
    /// Energy coefficient `c`.
    pub energy_c: f64,
    pub n_runs: usize,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_nodes: DEFAULT_N_NODES,
            side: DEFAULT_SIDE,
            boundary: BoundaryMode::Torus,
            range: 16.0,
            scheme: LinkScheme::none(),
            cascade: CascadeParams::new(0.12),
            energy_c: 1.0,
            n_runs: DEFAULT_N_RUNS,
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes == 0 {
            return Err(Error::invalid("n_nodes", "need at least one node"));
        }
        geom::check_side(self.side)?;
        if !(self.range > 0.0) || !self.range.is_finite() {
            return Err(Error::invalid("R", format!("radio range must be > 0, got {}", self.range)));
        }
        if self.n_runs == 0 {
            return Err(Error::invalid("n_runs", "need at least one run"));
        }
        self.scheme.validate()?;
        self.cascade.validate()?;
        EnergyModel::new(self.energy_c, self.range)?;
        Ok(())
    }

    pub fn energy_model(&self) -> Result<EnergyModel> {
        EnergyModel::new(self.energy_c, self.range)
    }

    /// Builds the (possibly augmented) network of replicate `i`.
    pub fn network(&self, replicate: usize) -> Result<graph::Network> {
        let mut rng = stream_rng(self.master_seed, replicate, Stream::Points);
        let pts = geom::sample_points(self.n_nodes, self.side, &mut rng)?;
        let net = graph::build_rgg(pts, self.range, self.side, self.boundary)?;
        let mut rng = stream_rng(self.master_seed, replicate, Stream::Links);
        smallworld::add_long_range_links(&net, &self.scheme, &mut rng)
    }

    /// Runs replicate `i` in full, returning its network as well.
    pub fn replicate(&self, replicate: usize) -> Result<(graph::Network, cascade::CascadeOutcome)> {
        let net = self.network(replicate)?;
        let mut seed_rng = stream_rng(self.master_seed, replicate, Stream::Seed);
        let seed = cascade::select_seed(&net, &self.cascade.seed, &mut seed_rng)?;
        let mut sched_rng = stream_rng(self.master_seed, replicate, Stream::Schedule);
        let outcome = cascade::run_from_seed(&net, &self.cascade, seed, &mut sched_rng)?;
        Ok((net, outcome))
    }

    fn record(&self, replicate: usize) -> Result<Record> {
        let (net, outcome) = match self.replicate(replicate) {
            Ok(r) => r,
            Err(Error::InfeasibleSeed(_)) => return Ok(Record::Infeasible),
            Err(e) => return Err(e),
        };
        let report = energy::account_cascade(&net, &outcome, &self.energy_model()?);
        Ok(Record::Ran {
            is_global: outcome.is_global,
            time: outcome.time,
            time_to_cutoff: outcome.time_to_cutoff,
            final_fraction: outcome.final_fraction,
            energy: report.e_total,
            predicted: report.e_predicted,
            d_bar: smallworld::mean_long_range_length(&net).ok(),
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Record {
    Infeasible,
    Ran {
        is_global: bool,
        time: usize,
        time_to_cutoff: Option<usize>,
        final_fraction: f64,
        energy: f64,
        predicted: f64,
        d_bar: Option<f64>,
    },
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    fn of(values: &[f64]) -> Option<Estimate> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Estimate { mean, se })
    }
}

/// Aggregates over the replicates of one parameter point. Time and energy
/// averages only cover successful global cascades and are absent when
/// there were none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateStats {
    pub n_runs: usize,
    pub n_success: usize,
    /// Replicates whose seed could not be placed; they count as failures.
    pub n_infeasible: usize,
    pub p_global: f64,
    pub p_global_se: f64,
    pub time: Option<Estimate>,
    pub time_to_cutoff: Option<Estimate>,
    pub energy: Option<Estimate>,
    pub predicted_energy: Option<Estimate>,
    pub final_fraction: Option<Estimate>,
    pub long_link_length: Option<Estimate>,
}

impl ReplicateStats {
    fn aggregate(records: &[Record]) -> ReplicateStats {
        let n_runs = records.len();
        let mut n_infeasible = 0;
        let (mut times, mut cut_times, mut energies, mut predicted) = (vec![], vec![], vec![], vec![]);
        let (mut fractions, mut d_bars) = (vec![], vec![]);
        for rec in records {
            match *rec {
                Record::Infeasible => n_infeasible += 1,
                Record::Ran { is_global, time, time_to_cutoff, final_fraction, energy, predicted: pred, d_bar } => {
                    fractions.push(final_fraction);
                    d_bars.extend(d_bar);
                    if is_global {
                        times.push(time as f64);
                        cut_times.extend(time_to_cutoff.map(|t| t as f64));
                        energies.push(energy);
                        predicted.push(pred);
                    }
                }
            }
        }
        let n_success = times.len();
        let p = n_success as f64 / n_runs as f64;
        ReplicateStats {
            n_runs,
            n_success,
            n_infeasible,
            p_global: p,
            p_global_se: (p * (1.0 - p) / n_runs as f64).sqrt(),
            time: Estimate::of(&times),
            time_to_cutoff: Estimate::of(&cut_times),
            energy: Estimate::of(&energies),
            predicted_energy: Estimate::of(&predicted),
            final_fraction: Estimate::of(&fractions),
            long_link_length: Estimate::of(&d_bars),
        }
    }

    pub fn mean_time(&self) -> Option<f64> {
        self.time.map(|e| e.mean)
    }

    pub fn mean_energy(&self) -> Option<f64> {
        self.energy.map(|e| e.mean)
    }
}

/// Runs `cfg.n_runs` independent replicates and aggregates them.
pub fn run_replicates(cfg: &ExperimentConfig) -> Result<ReplicateStats> {
    cfg.validate()?;
    let records = (0..cfg.n_runs)
        .into_par_iter()
        .map(|i| cfg.record(i))
        .collect::<Result<Vec<_>>>()?;
    let stats = ReplicateStats::aggregate(&records);
    if stats.n_infeasible == stats.n_runs {
        return Err(Error::ExperimentInfeasible {
            failures: stats.n_infeasible,
        });
    }
    Ok(stats)
}

/// A sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Phi,
    #[serde(rename = "R")]
    Range,
    #[serde(rename = "p_r")]
    LinkDensity,
    #[serde(rename = "d_c")]
    CutoffDistance,
    Delta,
    CutoffFraction,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Phi => "phi",
            SweepParam::Range => "R",
            SweepParam::LinkDensity => "p_r",
            SweepParam::CutoffDistance => "d_c",
            SweepParam::Delta => "delta",
            SweepParam::CutoffFraction => "cutoff_fraction",
        }
    }

    /// Writes `value` into a copy of `cfg`. Setting `d_c` or `delta`
    /// switches the link scheme to the matching kind.
    pub fn apply(self, cfg: &ExperimentConfig, value: f64) -> ExperimentConfig {
        let mut c = cfg.clone();
        match self {
            SweepParam::Phi => c.cascade.phi = value,
            SweepParam::Range => c.range = value,
            SweepParam::LinkDensity => c.scheme.p_r = value,
            SweepParam::CutoffDistance => c.scheme.kind = LinkKind::Cutoff { d_c: value },
            SweepParam::Delta => c.scheme.kind = LinkKind::PowerLaw { delta: value },
            SweepParam::CutoffFraction => c.cascade.cutoff_fraction = value,
        }
        c
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "phi" => SweepParam::Phi,
            "R" | "range" => SweepParam::Range,
            "p_r" => SweepParam::LinkDensity,
            "d_c" => SweepParam::CutoffDistance,
            "delta" => SweepParam::Delta,
            "cutoff_fraction" => SweepParam::CutoffFraction,
            other => {
                return Err(Error::invalid(
                    "axis",
                    format!("unknown sweep parameter `{other}` (phi, R, p_r, d_c, delta, cutoff_fraction)"),
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Self {
        Axis { param, values }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("axis", format!("grid for `{}` is empty", self.param)));
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid(
                "axis",
                format!("grid for `{}` must be strictly increasing", self.param),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub base: ExperimentConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        if let Some(a2) = &self.axis2 {
            a2.validate()?;
            if a2.param == self.axis1.param {
                return Err(Error::invalid("axis", "both axes sweep the same parameter"));
            }
        }
        if self.base.n_runs == 0 {
            return Err(Error::invalid("n_runs", "need at least one run"));
        }
        Ok(())
    }

    /// Grid cells in row-major order (axis1 outer).
    pub fn cells(&self) -> Vec<(f64, Option<f64>)> {
        let mut out = Vec::new();
        for &a in &self.axis1.values {
            match &self.axis2 {
                Some(ax) => out.extend(ax.values.iter().map(|&b| (a, Some(b)))),
                None => out.push((a, None)),
            }
        }
        out
    }

    pub fn config_for(&self, a1: f64, a2: Option<f64>) -> ExperimentConfig {
        let cfg = self.axis1.param.apply(&self.base, a1);
        match (&self.axis2, a2) {
            (Some(ax), Some(v)) => ax.param.apply(&cfg, v),
            _ => cfg,
        }
    }
}

#[derive(Debug)]
pub struct SweepRow {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub result: Result<ReplicateStats>,
}

/// One [`run_replicates`] per grid cell. Failing cells are reported in
/// their row; they never abort the sweep.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok(spec
        .cells()
        .into_par_iter()
        .map(|(a1, a2)| SweepRow {
            axis1: a1,
            axis2: a2,
            result: run_replicates(&spec.config_for(a1, a2)),
        })
        .collect())
}

fn crossing(x0: f64, p0: f64, x1: f64, p1: f64) -> f64 {
    x0 + (0.5 - p0) * (x1 - x0) / (p1 - p0)
}

/// Range at which `p_global` first rises through 0.5, linearly interpolated
/// between grid points. `curve` holds `(R, p_global)` sorted by `R`.
pub fn estimate_transition_i(curve: &[(f64, f64)]) -> Result<f64> {
    curve
        .windows(2)
        .find(|w| w[0].1 < 0.5 && w[1].1 >= 0.5)
        .map(|w| crossing(w[0].0, w[0].1, w[1].0, w[1].1))
        .ok_or_else(|| Error::EstimateUnavailable("p_global never rises through 0.5 on this grid".into()))
}

/// Upper edge of the cascade window: the last descending 0.5 crossing.
pub fn estimate_upper_boundary(curve: &[(f64, f64)]) -> Result<f64> {
    curve
        .windows(2)
        .rev()
        .find(|w| w[0].1 >= 0.5 && w[1].1 < 0.5)
        .map(|w| crossing(w[0].0, w[0].1, w[1].0, w[1].1))
        .ok_or_else(|| Error::EstimateUnavailable("p_global never falls through 0.5 on this grid".into()))
}

/// Least-squares slope of `ln R_c` against `ln phi`; about -1/2 when the
/// upper boundary scales as `1 / sqrt(phi)`.
pub fn fit_transition_ii_scaling(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::EstimateUnavailable(format!(
            "scaling fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(phi, rc)) = points.iter().find(|(p, r)| !(*p > 0.0 && *r > 0.0)) {
        return Err(Error::invalid("points", format!("log fit needs positive values, got ({phi}, {rc})")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    Ok(least_squares_slope(&xs, &ys))
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Transition estimates for one threshold of a `(phi, R)` sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionRow {
    pub phi: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// Extracts the lower and upper window edges per `phi` from sweep rows with
/// `phi` on one axis and `R` on the other, then fits the upper-boundary
/// scaling exponent when at least three edges were found.
pub fn transition_analysis(spec: &SweepSpec, rows: &[SweepRow]) -> Result<(Vec<TransitionRow>, Result<f64>)> {
    let Some(axis2) = &spec.axis2 else {
        return Err(Error::invalid("axis", "transition analysis needs a phi axis and an R axis"));
    };
    let (phi_first, phis) = match (spec.axis1.param, axis2.param) {
        (SweepParam::Phi, SweepParam::Range) => (true, &spec.axis1.values),
        (SweepParam::Range, SweepParam::Phi) => (false, &axis2.values),
        _ => return Err(Error::invalid("axis", "transition analysis needs a phi axis and an R axis")),
    };
    let mut out = Vec::with_capacity(phis.len());
    for &phi in phis {
        let curve: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| {
                let (p, range) = if phi_first { (r.axis1, r.axis2?) } else { (r.axis2?, r.axis1) };
                (p == phi).then(|| Some((range, r.result.as_ref().ok()?.p_global)))?
            })
            .collect();
        out.push(TransitionRow {
            phi,
            lower: estimate_transition_i(&curve).ok(),
            upper: estimate_upper_boundary(&curve).ok(),
        });
    }
    let edges: Vec<(f64, f64)> = out.iter().filter_map(|r| Some((r.phi, r.upper?))).collect();
    let fit = fit_transition_ii_scaling(&edges);
    Ok((out, fit))
}
