use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::realize::RealizedSurface;
use super::rng::InitStream;
use super::trace::{sample_initial, trace, CrossingEvent, FlowState};
use crate::error::{Error, Result};
use crate::hyperbolic::Isometry;
use crate::surface::Side;

/// Largest tolerated fraction of discarded tangential trajectories.
pub const MAX_TANGENTIAL_FRACTION: f64 = 1e-4;

/// Trajectory ids at and above this offset are reserved for sphere sampling.
const SPHERE_STREAMS: u64 = 1 << 48;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially. Results are identical either way.
    #[default]
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub trajectories: usize,
    /// Length of every trajectory.
    pub trajectory_length: f64,
    /// Scheduling only; never changes results, so it is not serialized.
    #[serde(skip)]
    pub execution: Execution,
}

impl SamplePlan {
    pub fn new(trajectories: usize, trajectory_length: f64) -> Self {
        Self {
            trajectories,
            trajectory_length,
            execution: Execution::default(),
        }
    }

    pub fn with_execution(self, execution: Execution) -> Self {
        Self { execution, ..self }
    }

    pub fn budget(&self) -> f64 {
        self.trajectories as f64 * self.trajectory_length
    }
}

fn map_indices<T, F>(range: std::ops::Range<u64>, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if execution == Execution::Parallel {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    let _ = execution;
    range.map(f).collect()
}

/// Mean and standard error of the mean.
fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideRate {
    pub curve: String,
    pub side: Side,
    pub count: u64,
    /// Crossings per unit trajectory length.
    pub rate: f64,
    pub std_error: f64,
    /// `−ln p` of a crossing from this side.
    pub cost: f64,
    /// `deg · length / (π · mass)`.
    pub flux_prediction: f64,
    /// `0.5 · deg · length / mass`.
    pub half_constant_prediction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereEstimate {
    pub radius: f64,
    pub directions: usize,
    pub discarded: usize,
    pub sheet: String,
    pub degree: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// `estimate × degree`.
    pub degree_weighted: f64,
    /// `2π sinh R · exp(mean Σ −ln p)`.
    pub jensen_lower: f64,
    pub jensen_holds: bool,
    pub circle_length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimEstimates {
    pub seed: u64,
    pub trajectories: usize,
    pub discarded: usize,
    pub trajectory_length: f64,
    pub total_length: f64,
    pub crossings: u64,
    pub crossing_rates: Vec<SideRate>,
    /// Mean accumulated `−ln p` per unit length.
    pub entropy_rate: f64,
    pub entropy_std_error: f64,
    /// `Σ rate · cost` over all curve sides, from the same event stream.
    pub entropy_from_crossings: f64,
    /// Entropy rate predicted by the `1/π` flux.
    pub flux_entropy_prediction: f64,
    /// Entropy rate predicted by the `0.5` flux constant.
    pub half_constant_entropy_prediction: f64,
    pub sphere: Vec<SphereEstimate>,
    pub warnings: Vec<String>,
}

impl SimEstimates {
    pub fn rate(&self, curve: &str, side: Side) -> Option<&SideRate> {
        self.crossing_rates
            .iter()
            .find(|r| r.curve == curve && r.side == side)
    }

    pub fn total_rate(&self) -> f64 {
        self.crossing_rates.iter().map(|r| r.rate).sum()
    }
}

struct Sample {
    length: f64,
    neg_log_prob: f64,
    counts: Vec<u64>,
    events: Vec<CrossingEvent>,
}

fn slot(curve: usize, side: Side) -> usize {
    2 * curve
        + match side {
            Side::Left => 0,
            Side::Right => 1,
        }
}

fn run_trajectory(
    surface: &RealizedSurface,
    seed: u64,
    trajectory: u64,
    length: f64,
    keep_events: bool,
) -> Result<Option<Sample>> {
    let start = sample_initial(surface, seed, trajectory)?;
    let end = match trace(surface, start, length, seed) {
        Ok(end) => end,
        Err(Error::Tangential { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let ids = &surface.spec.branch_curves;
    let mut counts = vec![0; 2 * ids.len()];
    for event in &end.history {
        let k = ids.iter().position(|c| c.id == event.curve).expect("event curve exists");
        counts[slot(k, event.side)] += 1;
    }
    Ok(Some(Sample {
        length: end.elapsed,
        neg_log_prob: end.neg_log_prob,
        counts,
        events: if keep_events { end.history } else { Vec::new() },
    }))
}

fn check_discards(discarded: usize, total: usize) -> Result<()> {
    if total > 0 && discarded as f64 > MAX_TANGENTIAL_FRACTION * total as f64 {
        return Err(Error::TangentialOverrun { discarded, total });
    }
    Ok(())
}

fn collect(
    surface: &RealizedSurface,
    plan: &SamplePlan,
    seed: u64,
    keep_events: bool,
) -> Result<(Vec<Sample>, usize)> {
    if !(plan.trajectory_length > 0.0) {
        return Err(Error::NonPositiveTarget(plan.trajectory_length));
    }
    let results = map_indices(0..plan.trajectories as u64, plan.execution, |j| {
        run_trajectory(surface, seed, j, plan.trajectory_length, keep_events)
    });
    let mut samples = Vec::with_capacity(results.len());
    let mut discarded = 0;
    for r in results {
        match r? {
            Some(s) => samples.push(s),
            None => discarded += 1,
        }
    }
    check_discards(discarded, plan.trajectories)?;
    Ok((samples, discarded))
}

fn summarize(surface: &RealizedSurface, plan: &SamplePlan, seed: u64, samples: &[Sample], discarded: usize) -> Result<SimEstimates> {
    let spec = &surface.spec;
    let total_length: f64 = samples.iter().map(|s| s.length).sum();
    let mut crossing_rates = Vec::with_capacity(2 * spec.branch_curves.len());
    let mut crossings = 0;
    let mut entropy_from_crossings = 0.0;
    let mut flux_entropy = 0.0;
    let mut half_entropy = 0.0;
    for (k, curve) in spec.branch_curves.iter().enumerate() {
        let length = spec.curve_length(curve)?;
        for side in [Side::Left, Side::Right] {
            let count: u64 = samples.iter().map(|s| s.counts[slot(k, side)]).sum();
            let per: Vec<f64> = samples
                .iter()
                .map(|s| s.counts[slot(k, side)] as f64 / s.length)
                .collect();
            let (_, std_error) = mean_se(&per);
            let rate = if total_length > 0.0 { count as f64 / total_length } else { 0.0 };
            let end = curve.end(side);
            let total_degree: f64 = spec
                .incident_curves(end)
                .iter()
                .map(|&(j, _)| spec.branch_curves[j].degree)
                .sum();
            let cost = -(curve.degree / total_degree).ln();
            let flux_prediction = curve.degree * length / (PI * surface.mass);
            let half_constant_prediction = 0.5 * curve.degree * length / surface.mass;
            crossings += count;
            entropy_from_crossings += rate * cost;
            flux_entropy += flux_prediction * cost;
            half_entropy += half_constant_prediction * cost;
            crossing_rates.push(SideRate {
                curve: curve.id.clone(),
                side,
                count,
                rate,
                std_error,
                cost,
                flux_prediction,
                half_constant_prediction,
            });
        }
    }
    let per_entropy: Vec<f64> = samples.iter().map(|s| s.neg_log_prob / s.length).collect();
    let (_, entropy_std_error) = mean_se(&per_entropy);
    let entropy_rate = if total_length > 0.0 {
        samples.iter().map(|s| s.neg_log_prob).sum::<f64>() / total_length
    } else {
        0.0
    };

    let mut warnings = Vec::new();
    let scale = surface.diameter_heuristic();
    if plan.budget() < 10.0 * scale {
        warnings.push(format!(
            "budget {} is below 10 x diameter heuristic {}",
            plan.budget(),
            scale
        ));
    }
    if discarded > 0 {
        warnings.push(format!("{discarded} tangential trajectories discarded"));
    }
    Ok(SimEstimates {
        seed,
        trajectories: samples.len(),
        discarded,
        trajectory_length: plan.trajectory_length,
        total_length,
        crossings,
        crossing_rates,
        entropy_rate,
        entropy_std_error,
        entropy_from_crossings,
        flux_entropy_prediction: flux_entropy,
        half_constant_entropy_prediction: half_entropy,
        sphere: Vec::new(),
        warnings,
    })
}

/// One-sided crossing rates per curve from `plan.trajectories` stationary
/// trajectories, with batch-means standard errors.
pub fn estimate_crossing_rates(surface: &RealizedSurface, plan: &SamplePlan, seed: u64) -> Result<SimEstimates> {
    let (samples, discarded) = collect(surface, plan, seed, false)?;
    summarize(surface, plan, seed, &samples, discarded)
}

/// Same run as [`estimate_crossing_rates`]; the entropy fields are filled
/// from the identical event stream.
pub fn estimate_entropy_rate(surface: &RealizedSurface, plan: &SamplePlan, seed: u64) -> Result<SimEstimates> {
    estimate_crossing_rates(surface, plan, seed)
}

/// Crossing and entropy estimates together with the event log of every
/// trajectory, in trajectory order.
pub fn estimate_with_events(
    surface: &RealizedSurface,
    plan: &SamplePlan,
    seed: u64,
) -> Result<(SimEstimates, Vec<CrossingEvent>)> {
    let (mut samples, discarded) = collect(surface, plan, seed, true)?;
    let events = samples.iter_mut().flat_map(|s| std::mem::take(&mut s.events)).collect();
    Ok((summarize(surface, plan, seed, &samples, discarded)?, events))
}

/// The base point used for sphere estimates of a run.
pub fn sphere_base(surface: &RealizedSurface, seed: u64) -> Result<FlowState> {
    sample_initial(surface, seed, SPHERE_STREAMS - 1)
}

/// Length of the branched sphere of radius `r` about `base`:
/// `2π sinh r` times the mean over uniform directions and branch choices
/// of `Π 1/p`.
pub fn estimate_sphere_length(
    surface: &RealizedSurface,
    base: &FlowState,
    r: f64,
    directions: usize,
    seed: u64,
    execution: Execution,
) -> Result<SphereEstimate> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveTarget(r));
    }
    let point = base.position();
    let results = map_indices(0..directions as u64, execution, |j| {
        let trajectory = SPHERE_STREAMS + j;
        let angle = 2.0 * PI * InitStream::new(seed, trajectory).uniform();
        let mut start = FlowState::new(trajectory, base.tile, Isometry::frame_at(point, angle));
        start.record_history = false;
        match trace(surface, start, r, seed) {
            Ok(end) => Ok(Some(end.neg_log_prob)),
            Err(Error::Tangential { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut logs = Vec::with_capacity(directions);
    let mut discarded = 0;
    for res in results {
        match res? {
            Some(y) => logs.push(y),
            None => discarded += 1,
        }
    }
    check_discards(discarded, directions)?;
    let circle_length = 2.0 * PI * r.sinh();
    let weights: Vec<f64> = logs.iter().map(|y| y.exp()).collect();
    let (mean_weight, se_weight) = mean_se(&weights);
    let mean_log = logs.iter().sum::<f64>() / logs.len().max(1) as f64;
    let estimate = circle_length * mean_weight;
    let jensen_lower = circle_length * mean_log.exp();
    let sheet = surface.sheet_of_tile(base.tile);
    Ok(SphereEstimate {
        radius: r,
        directions: logs.len(),
        discarded,
        sheet: sheet.id.clone(),
        degree: sheet.degree,
        estimate,
        std_error: circle_length * se_weight,
        degree_weighted: estimate * sheet.degree,
        jensen_lower,
        jensen_holds: estimate >= jensen_lower * (1.0 - 1e-12),
        circle_length,
    })
}

fn add_spheres(surface: &RealizedSurface, plan: &SamplePlan, radii: &[f64], seed: u64, out: &mut SimEstimates) -> Result<()> {
    if radii.is_empty() {
        return Ok(());
    }
    let base = sphere_base(surface, seed)?;
    for &r in radii {
        out.sphere.push(estimate_sphere_length(
            surface,
            &base,
            r,
            plan.trajectories,
            seed,
            plan.execution,
        )?);
    }
    Ok(())
}

/// Crossing rates, entropy rate and a sphere estimate for each radius, all
/// from one seed.
pub fn simulate(
    surface: &RealizedSurface,
    plan: &SamplePlan,
    radii: &[f64],
    seed: u64,
) -> Result<SimEstimates> {
    let mut out = estimate_crossing_rates(surface, plan, seed)?;
    add_spheres(surface, plan, radii, seed, &mut out)?;
    Ok(out)
}

/// [`simulate`] plus the crossing events of every trajectory.
pub fn simulate_with_events(
    surface: &RealizedSurface,
    plan: &SamplePlan,
    radii: &[f64],
    seed: u64,
) -> Result<(SimEstimates, Vec<CrossingEvent>)> {
    let (mut out, events) = estimate_with_events(surface, plan, seed)?;
    add_spheres(surface, plan, radii, seed, &mut out)?;
    Ok((out, events))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::realize;
    use crate::surface::{duck, BranchedSurfaceSpec, Length, SheetSpec};

    fn lone_torus() -> RealizedSurface {
        let spec = BranchedSurfaceSpec {
            sheets: vec![SheetSpec {
                id: "T".into(),
                genus: 1,
                boundary_ends: vec!["e".into()],
                boundary_lengths: vec![Length::Value(3.0)],
                cycle_degree: 1.0,
            }],
            ..Default::default()
        };
        realize(&spec).unwrap()
    }

    #[test]
    fn mean_se_oracle() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // Sample variance 5/3, so se = sqrt(5/12).
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn no_branch_rates_vanish() {
        let surface = lone_torus();
        let est = estimate_crossing_rates(&surface, &SamplePlan::new(20, 30.0), 0).unwrap();
        assert!(est.crossing_rates.is_empty());
        assert_eq!(est.entropy_rate, 0.0);
        assert_eq!(est.crossings, 0);
    }

    #[test]
    fn no_branch_sphere_is_circle() {
        let surface = lone_torus();
        let base = sphere_base(&surface, 2).unwrap();
        for r in [0.5, 2.0, 5.0] {
            let s = estimate_sphere_length(&surface, &base, r, 64, 2, Execution::Sequential).unwrap();
            assert_eq!(s.estimate, 2.0 * PI * r.sinh());
            assert_eq!(s.std_error, 0.0);
            assert!(s.jensen_holds);
        }
    }

    #[test]
    fn identity_and_determinism() {
        let surface = realize(&duck().with_bindings([("a", 6.0)])).unwrap();
        let plan = SamplePlan::new(24, 40.0);
        let seq = estimate_crossing_rates(&surface, &plan.with_execution(Execution::Sequential), 4).unwrap();
        let par = estimate_crossing_rates(&surface, &plan, 4).unwrap();
        assert_eq!(seq, par);
        let scale = seq.entropy_rate.abs().max(1.0);
        assert!((seq.entropy_rate - seq.entropy_from_crossings).abs() <= 1e-12 * scale);
        assert!(
            (seq.entropy_rate - seq.total_rate() * 2f64.ln()).abs() <= 1e-12 * scale,
            "{} vs {}",
            seq.entropy_rate,
            seq.total_rate() * 2f64.ln()
        );
        assert!(seq.crossing_rates.iter().all(|r| r.std_error >= 0.0));
    }

    #[test]
    fn duck_predictions() {
        let surface = realize(&duck().with_bindings([("a", 6.0)])).unwrap();
        let est = estimate_crossing_rates(&surface, &SamplePlan::new(2, 10.0), 0).unwrap();
        for r in &est.crossing_rates {
            assert!((r.flux_prediction - 6.0 / (12.0 * PI * PI)).abs() < 1e-15);
            assert!((r.half_constant_prediction - 0.5 * 6.0 / (12.0 * PI)).abs() < 1e-15);
            assert!((r.cost - 2f64.ln()).abs() < 1e-15);
        }
        assert!(!est.warnings.is_empty());
    }
}
