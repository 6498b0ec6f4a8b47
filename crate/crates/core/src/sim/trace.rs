use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::realize::{CircleLink, Passage, RealizedSurface};
use super::rng::{decision_uniform, InitStream};
use crate::error::{Error, Result};
use crate::hyperbolic::{crossing_isometry, ray_hit, Isometry, UhpPoint};
use crate::surface::Side;

/// Endpoint slack when intersecting the ray with tile sides.
const HIT_SLACK: f64 = 1e-9;
/// Minimum incidence angle and minimum segment length before a crossing
/// is reported as tangential.
pub const TANGENTIAL_TOLERANCE: f64 = 1e-9;
const MAX_REJECTIONS: usize = 1_000_000;

/// One branch decision taken by a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub trajectory: u64,
    pub curve: String,
    /// Side of the curve the trajectory came from.
    pub side: Side,
    pub from_sheet: String,
    pub to_sheet: String,
    /// Elapsed length along the trajectory at the crossing.
    pub arclength: f64,
    /// Angle between the outgoing direction and the boundary, in `(0, π)`.
    pub incidence_angle: f64,
    pub probability: f64,
}

/// A unit tangent vector of the branched surface plus the trajectory's
/// accumulated length and branch choices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub trajectory: u64,
    pub tile: usize,
    /// Frame in the coordinates of `tile`.
    pub frame: Isometry,
    pub elapsed: f64,
    /// Sum of in-tile segment lengths, each measured as the distance
    /// between its end points.
    pub path_length: f64,
    /// `Σ −ln p` over branch decisions so far.
    pub neg_log_prob: f64,
    pub decisions: u64,
    /// Side of `tile` the trajectory last entered through.
    pub entered_side: Option<usize>,
    pub history: Vec<CrossingEvent>,
    pub record_history: bool,
}

impl FlowState {
    pub fn new(trajectory: u64, tile: usize, frame: Isometry) -> Self {
        Self {
            trajectory,
            tile,
            frame,
            elapsed: 0.0,
            path_length: 0.0,
            neg_log_prob: 0.0,
            decisions: 0,
            entered_side: None,
            history: Vec::new(),
            record_history: true,
        }
    }

    pub fn position(&self) -> UhpPoint {
        self.frame.base_point()
    }

    pub fn direction(&self) -> f64 {
        self.frame.direction_angle()
    }

    pub fn sheet<'a>(&self, surface: &'a RealizedSurface) -> &'a str {
        &surface.sheet_of_tile(self.tile).id
    }
}

fn pick(weights: impl Iterator<Item = f64> + Clone, u: f64) -> usize {
    let total: f64 = weights.clone().sum();
    let mut acc = 0.0;
    let mut last = 0;
    for (k, w) in weights.enumerate() {
        acc += w;
        last = k;
        if u * total < acc {
            return k;
        }
    }
    last
}

/// Samples a starting state for `trajectory`: sheet with probability
/// `deg · area / mass`, tile by area, point uniform by area within the
/// tile, direction uniform.
pub fn sample_initial(surface: &RealizedSurface, seed: u64, trajectory: u64) -> Result<FlowState> {
    let mut rng = InitStream::new(seed, trajectory);
    let sheet = pick(surface.sheets.iter().map(|s| s.degree * s.area), rng.uniform());
    let tiles = &surface.sheets[sheet].tiles;
    let tile = tiles[pick(tiles.iter().map(|&t| surface.tiles[t].area), rng.uniform())];
    let polygon = &surface.tiles[tile].polygon;
    let center = Isometry::frame_at(polygon.center(), 0.0);
    let spread = polygon.circumradius().cosh() - 1.0;
    for _ in 0..MAX_REJECTIONS {
        // Uniform by area in the disk of the circumradius.
        let r = (1.0 + rng.uniform() * spread).acosh();
        let theta = 2.0 * PI * rng.uniform();
        let p = (center * Isometry::rotation(theta) * Isometry::translation(r)).base_point();
        if polygon.contains(p, 0.0) {
            let angle = 2.0 * PI * rng.uniform();
            return Ok(FlowState::new(trajectory, tile, Isometry::frame_at(p, angle)));
        }
    }
    Err(Error::Geometry(format!("rejection sampling failed in tile {tile}")))
}

/// Flows `state` forward until its elapsed length reaches `target`.
///
/// Branch decisions draw from the counter-based stream of `seed`, so the
/// result depends only on the state and the seed.
pub fn trace(surface: &RealizedSurface, mut state: FlowState, target: f64, seed: u64) -> Result<FlowState> {
    loop {
        let remaining = target - state.elapsed;
        if remaining <= 0.0 {
            return Ok(state);
        }
        let polygon = &surface.tiles[state.tile].polygon;
        let mut exit: Option<(f64, usize, f64)> = None;
        for (k, side) in polygon.sides.iter().enumerate() {
            if Some(k) == state.entered_side {
                continue;
            }
            if let Some((t, s)) = ray_hit(&state.frame, side, HIT_SLACK) {
                if t > -HIT_SLACK && exit.is_none_or(|(best, _, _)| t < best) {
                    exit = Some((t, k, s));
                }
            }
        }
        let (t, k, s) = exit.ok_or_else(|| {
            Error::Geometry(format!(
                "trajectory {} found no exit from tile {}",
                state.trajectory, state.tile
            ))
        })?;
        let t = t.max(0.0);
        let from = state.position();
        if t >= remaining {
            state.frame = state.frame * Isometry::translation(remaining);
            state.elapsed = target;
            state.path_length += from.distance(&state.position());
            return Ok(state);
        }
        if state.entered_side.is_some() && t < TANGENTIAL_TOLERANCE {
            return Err(Error::Tangential {
                trajectory: state.trajectory,
                arclength: state.elapsed,
            });
        }
        state.frame = state.frame * Isometry::translation(t);
        state.elapsed += t;
        state.path_length += from.distance(&state.position());

        let side = &polygon.sides[k];
        // Direction relative to the side: negative means outward.
        let phi = (side.frame_at(s).inverse() * state.frame).rotation_angle();
        let incidence = -phi;
        if !(TANGENTIAL_TOLERANCE..=PI - TANGENTIAL_TOLERANCE).contains(&incidence) {
            return Err(Error::Tangential {
                trajectory: state.trajectory,
                arclength: state.elapsed,
            });
        }

        match surface.tiles[state.tile].passages[k] {
            Passage::Seam { tile, side: other } => {
                let dst = surface.side(tile, other);
                state.frame = crossing_isometry(side, s, dst, dst.length - s) * state.frame;
                state.tile = tile;
                state.entered_side = Some(other);
            }
            Passage::Circle { circle, offset } => {
                let sigma = offset + s;
                let (target_circle, twist) = match &surface.circles[circle].link {
                    CircleLink::Internal { partner, twist } => (*partner, *twist),
                    CircleLink::End { branches, .. } if branches.is_empty() => {
                        // Free end: reflect.
                        state.frame = side.frame_at(s) * Isometry::rotation(-phi);
                        state.entered_side = Some(k);
                        continue;
                    }
                    CircleLink::End { branches, .. } => {
                        let u = decision_uniform(seed, state.trajectory, state.decisions);
                        let branch = &branches[pick(branches.iter().map(|b| b.weight), u)];
                        state.decisions += 1;
                        state.neg_log_prob -= branch.probability.ln();
                        if state.record_history {
                            let from = surface.circles[circle].sheet;
                            let to = surface.circles[branch.target_circle].sheet;
                            state.history.push(CrossingEvent {
                                trajectory: state.trajectory,
                                curve: surface.spec.branch_curves[branch.curve].id.clone(),
                                side: branch.side,
                                from_sheet: surface.sheets[from].id.clone(),
                                to_sheet: surface.sheets[to].id.clone(),
                                arclength: state.elapsed,
                                incidence_angle: incidence,
                                probability: branch.probability,
                            });
                        }
                        (branch.target_circle, branch.twist)
                    }
                };
                let (arc, s_dst) = surface.circles[target_circle].locate(twist - sigma);
                let dst = surface.arc_segment(&arc);
                state.frame = crossing_isometry(side, s, dst, s_dst) * state.frame;
                state.tile = arc.tile;
                state.entered_side = Some(arc.side);
            }
        }
        state.frame = state.frame.renormalized(1e-12);
    }
}
