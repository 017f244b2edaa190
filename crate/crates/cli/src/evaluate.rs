//! Empirical soundness check of the modal reachable sets against the
//! ground truth of a synthetic corpus.
//!
//! Continuations start in the query set and follow the true dynamics with
//! inputs drawn from each step's input zonotope and noise resampled from
//! the recorded `w`. Half of the rollouts draw coefficients uniformly; the
//! other half track the support point in a random direction, which hits the
//! extremes of the true reachable set.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use pedreach_core::modal::{default_modes, plan_mode, select_chunks, ModalError, ModeReach};
use pedreach_core::reach::reach_step;
use pedreach_core::zonoset::Zonotope;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::predict::{comparison, exit_code, ComparisonDocument, Scene, Status};
use crate::synthetic::{sample_in, GroundTruth};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsMeta {
    pub config_hash: String,
    pub seed: u64,
    pub rollouts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub k: usize,
    pub area: f64,
    /// Fraction of rollouts inside the step-`k` set.
    pub containment: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeMetrics {
    pub id: u32,
    pub name: String,
    pub kept_chunks: usize,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// Fraction of rollouts that stay inside every step's set.
    pub containment_rate: Option<f64>,
    pub model_runtime_ms: f64,
    pub steps: Vec<StepMetrics>,
    pub comparison: Vec<ComparisonDocument>,
    /// Modal over pooled area at `k = N`.
    pub area_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDocument {
    pub meta: MetricsMeta,
    pub modes: Vec<ModeMetrics>,
    pub pooled_status: Status,
}

impl MetricsDocument {
    pub fn exit_code(&self) -> i32 {
        exit_code(&self.modes.iter().map(|m| m.status).collect::<Vec<_>>())
    }

    pub fn mode(&self, name: &str) -> Option<&ModeMetrics> {
        self.modes.iter().find(|m| m.name == name)
    }
}

/// `c + sum sign(d . g_j) g_j`.
fn support_point(z: &Zonotope, d: &DVector<f64>) -> DVector<f64> {
    let beta = DVector::from_fn(z.num_generators(), |j, _| {
        let s = z.generators().column(j).dot(d);
        if s > 0.0 {
            1.0
        } else if s < 0.0 {
            -1.0
        } else {
            0.0
        }
    });
    z.point_at(&beta)
}

fn draw(rng: &mut impl Rng, z: &Zonotope, direction: Option<&DVector<f64>>) -> DVector<f64> {
    match direction {
        Some(d) => support_point(z, d),
        None => sample_in(rng, z),
    }
}

struct Dynamics<'a> {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    noise: &'a [DVector<f64>],
}

/// Per-step inside flags of one rollout, `k = 1..N`.
fn rollout(rng: &mut impl Rng, reach: &ModeReach, dyn_: &Dynamics, extremal: bool) -> Result<Vec<bool>> {
    let direction = if extremal {
        let angle: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        Some(DVector::from_vec(vec![angle.cos(), angle.sin()]))
    } else {
        None
    };
    let extreme_w = direction.as_ref().and_then(|d| {
        dyn_.noise
            .iter()
            .max_by(|p, q| p.dot(d).total_cmp(&q.dot(d)))
            .cloned()
    });

    let mut x = draw(rng, &reach.sets[0], direction.as_ref());
    let mut inside = Vec::with_capacity(reach.inputs.len());
    for (k, u_set) in reach.inputs.iter().enumerate() {
        let u = draw(rng, u_set, direction.as_ref());
        let w = match &extreme_w {
            Some(w) => w.clone(),
            None if dyn_.noise.is_empty() => DVector::zeros(2),
            None => dyn_.noise[rng.gen_range(0..dyn_.noise.len())].clone(),
        };
        x = &dyn_.a * &x + &dyn_.b * &u + w;
        inside.push(reach.sets[k + 1].contains_point(&x).map_err(ModalError::from)?);
    }
    Ok(inside)
}

fn empty_metrics(id: u32, name: String, kept: usize, error: &ModalError) -> ModeMetrics {
    ModeMetrics {
        id,
        name,
        kept_chunks: kept,
        status: Status::of(error),
        message: Some(error.to_string()),
        containment_rate: None,
        model_runtime_ms: 0.0,
        steps: Vec::new(),
        comparison: Vec::new(),
        area_ratio: None,
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn evaluate(scene: &Scene, truth: &GroundTruth, meta: MetricsMeta) -> Result<MetricsDocument> {
    let dynamics = Dynamics {
        a: truth.a_matrix()?,
        b: truth.b_matrix()?,
        noise: &truth.noise.iter().map(|r| DVector::from_column_slice(&r.w)).collect::<Vec<_>>(),
    };
    let pooled = scene.pooled()?;
    let mut rng = ChaCha8Rng::seed_from_u64(meta.seed);
    let query = &scene.query;

    let mut modes = Vec::new();
    for mode in default_modes() {
        let kept = select_chunks(&scene.chunks, &mode, query)?;
        if kept.is_empty() {
            let e = ModalError::EmptySelection { mode: mode.name.clone() };
            modes.push(empty_metrics(mode.id, mode.name, 0, &e));
            continue;
        }
        let started = Instant::now();
        let plan = match plan_mode(&kept, query, &scene.noise) {
            Ok(plan) => plan,
            Err(e) => {
                modes.push(empty_metrics(mode.id, mode.name, kept.len(), &e));
                continue;
            }
        };
        let model_runtime_ms = ms(started);

        let mut sets = vec![query.start_set().clone()];
        let mut runtimes = Vec::new();
        let mut failure = None;
        for u in &plan.inputs {
            let started = Instant::now();
            let last = sets.last().expect("start set present");
            match reach_step(&plan.model, last, u, &scene.noise)
                .map_err(ModalError::from)
                .and_then(|z| Ok(z.reduce_order(scene.max_order)?))
            {
                Ok(next) => sets.push(next),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
            runtimes.push(ms(started));
        }
        if let Some(e) = failure {
            modes.push(empty_metrics(mode.id, mode.name, kept.len(), &e));
            continue;
        }
        let reach = ModeReach { sets, inputs: plan.inputs };

        let horizon = reach.inputs.len();
        let mut inside_counts = vec![0usize; horizon];
        let mut all_inside = 0usize;
        for r in 0..meta.rollouts {
            let flags = rollout(&mut rng, &reach, &dynamics, r % 2 == 1)?;
            for (count, flag) in inside_counts.iter_mut().zip(&flags) {
                *count += usize::from(*flag);
            }
            all_inside += usize::from(flags.iter().all(|f| *f));
        }
        let rate = |n: usize| if meta.rollouts == 0 { 1.0 } else { n as f64 / meta.rollouts as f64 };

        let mut steps = Vec::with_capacity(horizon);
        for k in 1..=horizon {
            steps.push(StepMetrics {
                k,
                area: reach.sets[k].to_polygon().map_err(ModalError::from)?.area(),
                containment: rate(inside_counts[k - 1]),
                runtime_ms: runtimes[k - 1],
            });
        }
        let comparison = match &pooled {
            Ok(p) => comparison(&reach, p)?,
            Err(_) => Vec::new(),
        };
        let area_ratio = comparison.last().and_then(|c| c.ratio);
        modes.push(ModeMetrics {
            id: mode.id,
            name: mode.name,
            kept_chunks: kept.len(),
            status: Status::Ok,
            message: None,
            containment_rate: Some(rate(all_inside)),
            model_runtime_ms,
            steps,
            comparison,
            area_ratio,
        });
    }

    Ok(MetricsDocument {
        meta,
        modes,
        pooled_status: pooled.as_ref().map_or_else(Status::of, |_| Status::Ok),
    })
}
