//! Behavior-mode reachability.
//!
//! Historical trajectories are cut into fixed-length chunks, each labeled
//! by a pluggable [`LabelingOracle`]. For a detected pedestrian, every mode
//! keeps only the chunks that carry its label, start inside the estimated
//! position set and start with a heading close to the pedestrian's. The
//! kept chunks supply both the model set and the per-step input zonotopes
//! `<mean, diag(max deviation)>` used to propagate the reachable sets.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use nalgebra::DVector;
use rayon::prelude::*;
use thiserror::Error;

use crate::reach::{
    build_data_matrices, compute_model_set, reach_step, ModelSet, NoiseSpec, ReachError,
    StateInputTrajectory,
};
use crate::zonoset::{ZonoError, Zonotope};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModalError {
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error(transparent)]
    Zono(#[from] ZonoError),
    #[error("chunk size must be at least 2, got {0}")]
    InvalidChunkSize(usize),
    #[error("chunking needs planar trajectories, got dimension {0}")]
    NotPlanar(usize),
    #[error("no chunk matched mode '{mode}'")]
    EmptySelection { mode: String },
    #[error("input step {step} out of range; chunks carry {available} inputs")]
    StepOutOfRange { step: usize, available: usize },
    #[error("horizon {horizon} exceeds the {available} inputs available per chunk")]
    HorizonTooLong { horizon: usize, available: usize },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

/// A behavior mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeLabel {
    pub id: u32,
    pub name: String,
}

impl ModeLabel {
    pub fn new(id: u32, name: impl Into<String>) -> Self {
        Self {
            id,
            name: name.into(),
        }
    }

    pub fn crossing() -> Self {
        Self::new(1, "crossing")
    }

    pub fn walking_along() -> Self {
        Self::new(2, "walking-along")
    }

    pub fn other() -> Self {
        Self::new(3, "other")
    }
}

/// The mode set produced by [`CrossingOracle`], in id order.
pub fn default_modes() -> Vec<ModeLabel> {
    vec![
        ModeLabel::crossing(),
        ModeLabel::walking_along(),
        ModeLabel::other(),
    ]
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

/// Shortest signed rotation taking `reference` to `heading`, in `(-pi, pi]`.
pub fn angular_offset(heading: f64, reference: f64) -> f64 {
    wrap_angle(heading - reference)
}

/// `heading = reference + phi` for some `-limit < phi <= limit`.
pub fn heading_within(heading: f64, reference: f64, limit: f64) -> bool {
    let phi = angular_offset(heading, reference);
    -limit < phi && phi <= limit
}

/// Per-point headings: direction of travel to the next point, with the last
/// point repeating the previous heading.
pub fn chunk_headings(points: &[DVector<f64>]) -> Vec<f64> {
    let mut headings: Vec<f64> = points
        .windows(2)
        .map(|w| {
            let d = &w[1] - &w[0];
            wrap_angle(d[1].atan2(d[0]))
        })
        .collect();
    if let Some(&last) = headings.last() {
        headings.push(last);
    } else if !points.is_empty() {
        headings.push(0.0);
    }
    headings
}

/// A fixed-length labeled trajectory segment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryChunk {
    points: Vec<DVector<f64>>,
    inputs: Vec<DVector<f64>>,
    headings: Vec<f64>,
    label: ModeLabel,
    sample_period: f64,
}

impl TrajectoryChunk {
    /// Builds a chunk from `c_s` planar points and the `c_s - 1` inputs
    /// between them; headings are derived from the points.
    pub fn new(
        points: Vec<DVector<f64>>,
        inputs: Vec<DVector<f64>>,
        label: ModeLabel,
        sample_period: f64,
    ) -> Result<Self, ModalError> {
        if points.len() < 2 {
            return Err(ModalError::InvalidChunkSize(points.len()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != 2) {
            return Err(ModalError::NotPlanar(p.len()));
        }
        // Validates lengths, finiteness and the sample period.
        StateInputTrajectory::new(points.clone(), inputs.clone(), sample_period)?;
        let headings = chunk_headings(&points);
        Ok(Self {
            points,
            inputs,
            headings,
            label,
            sample_period,
        })
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn inputs(&self) -> &[DVector<f64>] {
        &self.inputs
    }

    pub fn headings(&self) -> &[f64] {
        &self.headings
    }

    pub fn label(&self) -> &ModeLabel {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> &DVector<f64> {
        &self.points[0]
    }

    pub fn initial_heading(&self) -> f64 {
        self.headings[0]
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn to_trajectory(&self) -> StateInputTrajectory {
        StateInputTrajectory::new(self.points.clone(), self.inputs.clone(), self.sample_period)
            .expect("validated on construction")
    }
}

/// Assigns a behavior mode to a chunk given its points and headings.
pub trait LabelingOracle: Sync {
    fn label(&self, points: &[DVector<f64>], headings: &[f64]) -> ModeLabel;
}

impl<F> LabelingOracle for F
where
    F: Fn(&[DVector<f64>], &[f64]) -> ModeLabel + Sync,
{
    fn label(&self, points: &[DVector<f64>], headings: &[f64]) -> ModeLabel {
        self(points, headings)
    }
}

/// Cuts every trajectory into consecutive non-overlapping windows of
/// `chunk_size` points. A trailing window shorter than `chunk_size` is
/// dropped, as is the input joining two windows.
pub fn chunk_trajectories(
    trajectories: &[StateInputTrajectory],
    chunk_size: usize,
    oracle: &dyn LabelingOracle,
) -> Result<Vec<TrajectoryChunk>, ModalError> {
    if chunk_size < 2 {
        return Err(ModalError::InvalidChunkSize(chunk_size));
    }
    let mut chunks = Vec::new();
    for t in trajectories {
        let states = t.states();
        if let Some(s) = states.iter().find(|s| s.len() != 2) {
            return Err(ModalError::NotPlanar(s.len()));
        }
        let mut start = 0;
        while start + chunk_size <= states.len() {
            let points = states[start..start + chunk_size].to_vec();
            let inputs = t.inputs()[start..start + chunk_size - 1].to_vec();
            let headings = chunk_headings(&points);
            let label = oracle.label(&points, &headings);
            chunks.push(TrajectoryChunk::new(points, inputs, label, t.sample_period())?);
            start += chunk_size;
        }
    }
    Ok(chunks)
}

/// Axis-aligned crossing area and the heading of the crossing direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingRegion {
    pub min: [f64; 2],
    pub max: [f64; 2],
    /// Heading of travel across the road, radians.
    pub axis: f64,
}

impl CrossingRegion {
    pub fn contains(&self, p: &DVector<f64>) -> bool {
        self.min[0] <= p[0] && p[0] <= self.max[0] && self.min[1] <= p[1] && p[1] <= self.max[1]
    }
}

/// Undirected angular distance between a heading and a line direction, in `[0, pi/2]`.
fn line_distance(heading: f64, line: f64) -> f64 {
    let d = angular_offset(heading, line).abs();
    d.min(PI - d)
}

/// Labels a chunk by where it starts and which way it initially heads.
///
/// - `crossing`: starts inside the region and heads within pi/4 of the
///   crossing axis, either direction (boundary included).
/// - `walking-along`: otherwise, heads within pi/4 of the perpendicular axis.
/// - `other`: everything else.
pub fn default_crossing_oracle(
    points: &[DVector<f64>],
    headings: &[f64],
    region: &CrossingRegion,
) -> ModeLabel {
    let heading = headings.first().copied().unwrap_or(0.0);
    let inside = points.first().is_some_and(|p| region.contains(p));
    if inside && line_distance(heading, region.axis) <= FRAC_PI_4 {
        ModeLabel::crossing()
    } else if line_distance(heading, region.axis + FRAC_PI_2) <= FRAC_PI_4 {
        ModeLabel::walking_along()
    } else {
        ModeLabel::other()
    }
}

/// [`default_crossing_oracle`] packaged as a [`LabelingOracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingOracle {
    pub region: CrossingRegion,
}

impl LabelingOracle for CrossingOracle {
    fn label(&self, points: &[DVector<f64>], headings: &[f64]) -> ModeLabel {
        default_crossing_oracle(points, headings, &self.region)
    }
}

/// What is known about the detected pedestrian.
#[derive(Debug, Clone, PartialEq)]
pub struct PedestrianQuery {
    start_set: Zonotope,
    heading: f64,
    heading_limit: f64,
    horizon: usize,
}

impl PedestrianQuery {
    pub fn new(
        start_set: Zonotope,
        heading: f64,
        heading_limit: f64,
        horizon: usize,
    ) -> Result<Self, ModalError> {
        if start_set.dim() != 2 {
            return Err(ModalError::InvalidQuery(format!(
                "position set must be 2-D, got dimension {}",
                start_set.dim()
            )));
        }
        if !heading.is_finite() {
            return Err(ModalError::InvalidQuery("heading must be finite".into()));
        }
        if !(0.0..=PI).contains(&heading_limit) {
            return Err(ModalError::InvalidQuery(format!(
                "heading limit must lie in [0, pi], got {heading_limit}"
            )));
        }
        if horizon == 0 {
            return Err(ModalError::InvalidQuery("horizon must be at least 1".into()));
        }
        Ok(Self {
            start_set,
            heading,
            heading_limit,
            horizon,
        })
    }

    pub fn start_set(&self) -> &Zonotope {
        &self.start_set
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn heading_limit(&self) -> f64 {
        self.heading_limit
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn with_heading(&self, heading: f64) -> Self {
        Self {
            heading,
            ..self.clone()
        }
    }
}

/// The three relevance criteria for one chunk.
pub fn chunk_is_relevant(
    chunk: &TrajectoryChunk,
    mode: &ModeLabel,
    query: &PedestrianQuery,
) -> Result<bool, ModalError> {
    if chunk.label() != mode {
        return Ok(false);
    }
    if !heading_within(chunk.initial_heading(), query.heading, query.heading_limit) {
        return Ok(false);
    }
    Ok(query.start_set.contains_point(chunk.start())?)
}

/// Chunks relevant to `mode` for this pedestrian, in input order.
pub fn select_chunks<'a>(
    chunks: &'a [TrajectoryChunk],
    mode: &ModeLabel,
    query: &PedestrianQuery,
) -> Result<Vec<&'a TrajectoryChunk>, ModalError> {
    let mut kept = Vec::new();
    for chunk in chunks {
        if chunk_is_relevant(chunk, mode, query)? {
            kept.push(chunk);
        }
    }
    Ok(kept)
}

/// `<mu_k, diag(sigma_k)>` from the `step`-th input of every kept chunk.
pub fn estimate_input_zonotope(kept: &[&TrajectoryChunk], step: usize) -> Result<Zonotope, ModalError> {
    let first = kept.first().ok_or_else(|| ModalError::EmptySelection {
        mode: String::from("(input estimate)"),
    })?;
    let available = kept.iter().map(|c| c.inputs.len()).min().unwrap_or(0);
    if step >= available {
        return Err(ModalError::StepOutOfRange { step, available });
    }
    let dim = first.inputs[step].len();
    let mut mean = DVector::zeros(dim);
    for c in kept {
        mean += &c.inputs[step];
    }
    mean /= kept.len() as f64;
    let mut spread = DVector::zeros(dim);
    for c in kept {
        for i in 0..dim {
            spread[i] = f64::max(spread[i], (c.inputs[step][i] - mean[i]).abs());
        }
    }
    Ok(Zonotope::from_center_radius(mean, &spread)?)
}

/// Model set and per-step input sets for one selection of chunks.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePlan {
    pub model: ModelSet,
    pub inputs: Vec<Zonotope>,
}

pub fn plan_mode(
    kept: &[&TrajectoryChunk],
    query: &PedestrianQuery,
    noise: &NoiseSpec,
) -> Result<ModePlan, ModalError> {
    let inputs = (0..query.horizon)
        .map(|k| estimate_input_zonotope(kept, k))
        .collect::<Result<Vec<_>, _>>()?;
    let trajectories: Vec<StateInputTrajectory> = kept.iter().map(|c| c.to_trajectory()).collect();
    let data = build_data_matrices(&trajectories)?;
    let model = compute_model_set(&data, noise)?;
    Ok(ModePlan { model, inputs })
}

/// Reachable sets of one mode. `sets[0]` is the start set, `sets[k]` the
/// set after `k` steps; `inputs[k]` drove step `k -> k+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeReach {
    pub sets: Vec<Zonotope>,
    pub inputs: Vec<Zonotope>,
}

/// Runs the propagation for an explicit selection of chunks.
pub fn reach_from_selection(
    kept: &[&TrajectoryChunk],
    query: &PedestrianQuery,
    noise: &NoiseSpec,
    max_order: f64,
) -> Result<ModeReach, ModalError> {
    let plan = plan_mode(kept, query, noise)?;
    let mut sets = Vec::with_capacity(query.horizon + 1);
    sets.push(query.start_set.clone());
    for input_set in &plan.inputs {
        let last = sets.last().expect("start set pushed");
        let next = reach_step(&plan.model, last, input_set, noise)?.reduce_order(max_order)?;
        sets.push(next);
    }
    Ok(ModeReach {
        sets,
        inputs: plan.inputs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeOutcome {
    pub label: ModeLabel,
    pub kept_chunks: usize,
    pub result: Result<ModeReach, ModalError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalReachResult {
    /// One entry per requested mode, in ascending mode-id order.
    pub modes: Vec<ModeOutcome>,
}

impl ModalReachResult {
    pub fn mode(&self, id: u32) -> Option<&ModeOutcome> {
        self.modes.iter().find(|m| m.label.id == id)
    }
}

fn check_horizon(chunks: &[TrajectoryChunk], query: &PedestrianQuery) -> Result<(), ModalError> {
    if let Some(available) = chunks.iter().map(|c| c.inputs.len()).min() {
        if query.horizon > available {
            return Err(ModalError::HorizonTooLong {
                horizon: query.horizon,
                available,
            });
        }
    }
    Ok(())
}

/// Modal data-driven reachability for every mode in `modes`.
///
/// Per mode: select chunks, estimate `U_k` from their inputs, build the
/// model set once from their data and propagate `horizon` steps from the
/// query's start set. Failures (empty selection, rank-deficient data) are
/// recorded per mode.
pub fn modal_reach(
    chunks: &[TrajectoryChunk],
    modes: &[ModeLabel],
    query: &PedestrianQuery,
    noise: &NoiseSpec,
    max_order: f64,
) -> Result<ModalReachResult, ModalError> {
    check_horizon(chunks, query)?;
    let mut ordered: Vec<&ModeLabel> = modes.iter().collect();
    ordered.sort_by_key(|m| m.id);

    let modes = ordered
        .par_iter()
        .map(|mode| {
            let kept = match select_chunks(chunks, mode, query) {
                Ok(kept) => kept,
                Err(e) => {
                    return ModeOutcome {
                        label: (*mode).clone(),
                        kept_chunks: 0,
                        result: Err(e),
                    }
                }
            };
            let result = if kept.is_empty() {
                Err(ModalError::EmptySelection {
                    mode: mode.name.clone(),
                })
            } else {
                reach_from_selection(&kept, query, noise, max_order)
            };
            ModeOutcome {
                label: (*mode).clone(),
                kept_chunks: kept.len(),
                result,
            }
        })
        .collect();
    Ok(ModalReachResult { modes })
}

/// Baseline: the same pipeline with every chunk kept regardless of label,
/// start or heading.
pub fn pooled_reach(
    chunks: &[TrajectoryChunk],
    query: &PedestrianQuery,
    noise: &NoiseSpec,
    max_order: f64,
) -> Result<ModeReach, ModalError> {
    check_horizon(chunks, query)?;
    let all: Vec<&TrajectoryChunk> = chunks.iter().collect();
    if all.is_empty() {
        return Err(ModalError::EmptySelection {
            mode: "pooled".into(),
        });
    }
    reach_from_selection(&all, query, noise, max_order)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AreaComparison {
    pub step: usize,
    pub modal_area: f64,
    pub pooled_area: f64,
    /// `modal / pooled`; `None` when the pooled area is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AreaReport {
    pub steps: Vec<AreaComparison>,
}

impl AreaReport {
    pub fn final_ratio(&self) -> Option<f64> {
        self.steps.last().and_then(|s| s.ratio)
    }
}

/// Per-step polygon areas of two set sequences of equal length.
pub fn area_report(modal: &ModeReach, pooled: &ModeReach) -> Result<AreaReport, ModalError> {
    let steps = modal
        .sets
        .iter()
        .zip(&pooled.sets)
        .enumerate()
        .map(|(step, (m, p))| {
            let modal_area = m.to_polygon()?.area();
            let pooled_area = p.to_polygon()?.area();
            let ratio = (pooled_area > 0.0).then(|| modal_area / pooled_area);
            Ok(AreaComparison {
                step,
                modal_area,
                pooled_area,
                ratio,
            })
        })
        .collect::<Result<Vec<_>, ModalError>>()?;
    Ok(AreaReport { steps })
}

/// Modal reachable sets of `mode` against the pooled baseline.
pub fn compare_modal_vs_pooled(
    chunks: &[TrajectoryChunk],
    mode: &ModeLabel,
    query: &PedestrianQuery,
    noise: &NoiseSpec,
    max_order: f64,
) -> Result<AreaReport, ModalError> {
    check_horizon(chunks, query)?;
    let kept = select_chunks(chunks, mode, query)?;
    if kept.is_empty() {
        return Err(ModalError::EmptySelection {
            mode: mode.name.clone(),
        });
    }
    let modal = reach_from_selection(&kept, query, noise, max_order)?;
    let pooled = pooled_reach(chunks, query, noise, max_order)?;
    area_report(&modal, &pooled)
}
