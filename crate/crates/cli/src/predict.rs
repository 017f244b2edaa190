//! Modal prediction and its JSON document.

use pedreach_core::modal::{
    area_report, chunk_trajectories, default_modes, modal_reach, pooled_reach, CrossingOracle, ModalError,
    ModalReachResult, ModeOutcome, ModeReach, PedestrianQuery, TrajectoryChunk,
};
use pedreach_core::reach::{NoiseSpec, ReachError, StateInputTrajectory};
use pedreach_core::zonoset::Zonotope;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    EmptySelection,
    RankDeficient,
    Failed,
}

impl Status {
    pub fn of(error: &ModalError) -> Self {
        match error {
            ModalError::EmptySelection { .. } => Status::EmptySelection,
            ModalError::Reach(ReachError::RankDeficientData { .. }) => Status::RankDeficient,
            _ => Status::Failed,
        }
    }
}

/// Process exit code for a set of per-mode statuses: 0 if any mode
/// succeeded, else 3 if any was rank deficient, else 2 if every selection
/// was empty, else 1.
pub fn exit_code(statuses: &[Status]) -> i32 {
    if statuses.contains(&Status::Ok) {
        0
    } else if statuses.contains(&Status::RankDeficient) {
        3
    } else if statuses.iter().all(|s| *s == Status::EmptySelection) {
        2
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDocument {
    pub k: usize,
    pub center: [f64; 2],
    pub generators: Vec<[f64; 2]>,
    pub polygon: Vec<[f64; 2]>,
    pub area: f64,
}

impl StepDocument {
    pub fn new(k: usize, set: &Zonotope) -> Result<Self> {
        let polygon = set.to_polygon().map_err(ModalError::from)?;
        let g = set.generators();
        Ok(Self {
            k,
            center: [set.center()[0], set.center()[1]],
            generators: (0..g.ncols()).map(|j| [g[(0, j)], g[(1, j)]]).collect(),
            polygon: polygon.vertices().to_vec(),
            area: polygon.area(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDocument {
    pub k: usize,
    pub mu: [f64; 2],
    pub sigma: [f64; 2],
}

impl InputDocument {
    pub fn new(k: usize, set: &Zonotope) -> Self {
        let g = set.generators();
        let radius = |i: usize| g.row(i).iter().map(|v| v.abs()).sum();
        Self {
            k,
            mu: [set.center()[0], set.center()[1]],
            sigma: [radius(0), radius(1)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonDocument {
    pub k: usize,
    pub modal_area: f64,
    pub pooled_area: f64,
    /// `modal_area / pooled_area`; null when the pooled area is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDocument {
    pub id: u32,
    pub name: String,
    pub kept_chunks: usize,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub steps: Vec<StepDocument>,
    pub inputs: Vec<InputDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Vec<ComparisonDocument>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledDocument {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub kept_chunks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictDocument {
    pub meta: Meta,
    pub modes: Vec<ModeDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pooled: Option<PooledDocument>,
}

impl PredictDocument {
    pub fn exit_code(&self) -> i32 {
        exit_code(&self.modes.iter().map(|m| m.status).collect::<Vec<_>>())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Chunks, query and noise model shared by `predict` and `evaluate`.
#[derive(Debug, Clone)]
pub struct Scene {
    pub chunks: Vec<TrajectoryChunk>,
    pub query: PedestrianQuery,
    pub noise: NoiseSpec,
    pub max_order: f64,
}

impl Scene {
    pub fn new(config: &RunConfig, trajectories: &[StateInputTrajectory]) -> Result<Self> {
        let oracle = CrossingOracle {
            region: config.modes.crossing_region.to_region(),
        };
        Ok(Self {
            chunks: chunk_trajectories(trajectories, config.chunk_size, &oracle)?,
            query: config.query()?,
            noise: config.noise_spec()?,
            max_order: config.max_order,
        })
    }

    pub fn modal(&self) -> Result<ModalReachResult> {
        Ok(modal_reach(&self.chunks, &default_modes(), &self.query, &self.noise, self.max_order)?)
    }

    pub fn pooled(&self) -> Result<std::result::Result<ModeReach, ModalError>> {
        match pooled_reach(&self.chunks, &self.query, &self.noise, self.max_order) {
            Err(e @ ModalError::HorizonTooLong { .. }) => Err(e.into()),
            other => Ok(other),
        }
    }
}

pub fn comparison(modal: &ModeReach, pooled: &ModeReach) -> Result<Vec<ComparisonDocument>> {
    let report = area_report(modal, pooled)?;
    Ok(report
        .steps
        .into_iter()
        .skip(1)
        .map(|s| ComparisonDocument {
            k: s.step,
            modal_area: s.modal_area,
            pooled_area: s.pooled_area,
            ratio: s.ratio,
        })
        .collect())
}

fn mode_document(outcome: &ModeOutcome, pooled: Option<&ModeReach>) -> Result<ModeDocument> {
    let mut doc = ModeDocument {
        id: outcome.label.id,
        name: outcome.label.name.clone(),
        kept_chunks: outcome.kept_chunks,
        status: Status::Ok,
        message: None,
        steps: Vec::new(),
        inputs: Vec::new(),
        comparison: None,
    };
    match &outcome.result {
        Ok(reach) => {
            for (k, set) in reach.sets.iter().enumerate().skip(1) {
                doc.steps.push(StepDocument::new(k, set)?);
            }
            doc.inputs = reach.inputs.iter().enumerate().map(|(k, u)| InputDocument::new(k, u)).collect();
            if let Some(pooled) = pooled {
                doc.comparison = Some(comparison(reach, pooled)?);
            }
        }
        Err(e) => {
            doc.status = Status::of(e);
            doc.message = Some(e.to_string());
        }
    }
    Ok(doc)
}

/// Everything `predict` computes, before serialization.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub modal: ModalReachResult,
    pub pooled: Option<std::result::Result<ModeReach, ModalError>>,
    pub pooled_chunks: usize,
}

pub fn predict(scene: &Scene, compare_pooled: bool) -> Result<Prediction> {
    let modal = scene.modal()?;
    let pooled = if compare_pooled { Some(scene.pooled()?) } else { None };
    Ok(Prediction {
        modal,
        pooled,
        pooled_chunks: scene.chunks.len(),
    })
}

impl Prediction {
    pub fn document(&self, meta: Meta) -> Result<PredictDocument> {
        let pooled_ok = self.pooled.as_ref().and_then(|p| p.as_ref().ok());
        let modes = self
            .modal
            .modes
            .iter()
            .map(|m| mode_document(m, pooled_ok))
            .collect::<Result<Vec<_>>>()?;
        let pooled = self.pooled.as_ref().map(|p| PooledDocument {
            status: p.as_ref().map_or_else(Status::of, |_| Status::Ok),
            message: p.as_ref().err().map(|e| e.to_string()),
            kept_chunks: self.pooled_chunks,
        });
        Ok(PredictDocument { meta, modes, pooled })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn exit_codes() {
        use Status::*;
        assert_eq!(exit_code(&[Ok, EmptySelection, RankDeficient]), 0);
        assert_eq!(exit_code(&[EmptySelection, RankDeficient]), 3);
        assert_eq!(exit_code(&[EmptySelection, EmptySelection, EmptySelection]), 2);
        assert_eq!(exit_code(&[EmptySelection, Failed]), 1);
    }

    #[test]
    fn status_of_errors() {
        assert_eq!(Status::of(&ModalError::EmptySelection { mode: "x".into() }), Status::EmptySelection);
        assert_eq!(
            Status::of(&ModalError::Reach(ReachError::RankDeficientData { rank: 3, required: 4 })),
            Status::RankDeficient
        );
        assert_eq!(Status::of(&ModalError::InvalidChunkSize(1)), Status::Failed);
    }

    #[test]
    fn input_document_reads_box_radius() {
        let u = Zonotope::from_center_radius(DVector::from_vec(vec![1.0, -2.0]), &DVector::from_vec(vec![0.25, 0.0])).unwrap();
        let doc = InputDocument::new(3, &u);
        assert_eq!((doc.k, doc.mu, doc.sigma), (3, [1.0, -2.0], [0.25, 0.0]));
    }

    #[test]
    fn step_document_of_unit_square() {
        let z = Zonotope::new(DVector::from_vec(vec![1.0, 1.0]), DMatrix::identity(2, 2)).unwrap();
        let doc = StepDocument::new(1, &z).unwrap();
        assert_eq!(doc.generators, vec![[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(doc.polygon.len(), 4);
        assert_eq!(doc.area, 4.0);
    }
}
