//! Synthetic two-population corpus from the integrator
//! `x(k+1) = x(k) + dt u(k) + w(k)`.
//!
//! Crossing pedestrians start in `crossing_start` and head along the region
//! axis; walking pedestrians start in `walking_start` and head along
//! `axis - pi/2`. Each step's input is the nominal velocity plus uniform
//! jitter; `w(k)` is drawn inside the configured noise zonotope.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use pedreach_core::zonoset::Zonotope;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{BoxConfig, RunConfig};
use crate::data::{write_tracks, PositionTrack};
use crate::error::{CliError, Result};
use crate::io::write_atomic;

/// Ground truth behind a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    pub noise: Vec<NoiseRecord>,
}

/// `w` applied between samples `t` and `t + 1` of trajectory `traj`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseRecord {
    pub traj: String,
    pub t: usize,
    pub w: [f64; 2],
}

impl GroundTruth {
    pub fn a_matrix(&self) -> Result<DMatrix<f64>> {
        rows_to_matrix(&self.a, "A")
    }

    pub fn b_matrix(&self) -> Result<DMatrix<f64>> {
        rows_to_matrix(&self.b, "B")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::data(path, e.to_string()))
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(CliError::Config(format!("ground truth {name} must be 2x2")));
    }
    Ok(DMatrix::from_fn(2, 2, |i, j| rows[i][j]))
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub tracks: Vec<PositionTrack>,
    pub truth: GroundTruth,
}

/// Where the sidecar for a corpus at `data` lives: `<stem>.truth.json`.
pub fn truth_path(data: &Path) -> PathBuf {
    let stem = data.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    data.with_file_name(format!("{stem}.truth.json"))
}

fn sample_box(rng: &mut impl Rng, b: &BoxConfig) -> [f64; 2] {
    std::array::from_fn(|i| if b.min[i] < b.max[i] { rng.gen_range(b.min[i]..=b.max[i]) } else { b.min[i] })
}

fn symmetric(rng: &mut impl Rng, r: f64) -> f64 {
    if r > 0.0 {
        rng.gen_range(-r..=r)
    } else {
        0.0
    }
}

/// A point of `z` with coefficients uniform in `[-1, 1]`.
pub fn sample_in(rng: &mut impl Rng, z: &Zonotope) -> DVector<f64> {
    let beta = DVector::from_fn(z.num_generators(), |_, _| rng.gen_range(-1.0..=1.0));
    z.point_at(&beta)
}

pub fn generate_synthetic(config: &RunConfig, seed: u64) -> Result<SyntheticCorpus> {
    let s = &config.synthetic;
    let dt = config.sample_period;
    let noise = config.noise.to_zonotope()?;
    let a = DMatrix::<f64>::identity(2, 2);
    let b = DMatrix::<f64>::identity(2, 2) * dt;
    let axis = config.modes.crossing_region.axis;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let groups = [
        ("c", s.crossing_trajectories, &s.crossing_start, axis),
        ("w", s.walking_trajectories, &s.walking_start, axis - FRAC_PI_2),
    ];
    let mut tracks = Vec::new();
    let mut records = Vec::new();
    for (prefix, count, start, heading) in groups {
        let direction = DVector::from_vec(vec![heading.cos(), heading.sin()]);
        for n in 0..count {
            let id = format!("{prefix}{n:03}");
            let speed = if s.speed[0] < s.speed[1] { rng.gen_range(s.speed[0]..=s.speed[1]) } else { s.speed[0] };
            let mut x = DVector::from_column_slice(&sample_box(&mut rng, start));
            let mut points = vec![[x[0], x[1]]];
            for t in 0..s.points_per_trajectory.saturating_sub(1) {
                let u = &direction * speed
                    + DVector::from_vec(vec![symmetric(&mut rng, s.input_jitter), symmetric(&mut rng, s.input_jitter)]);
                let w = sample_in(&mut rng, &noise);
                x = &a * &x + &b * &u + &w;
                points.push([x[0], x[1]]);
                records.push(NoiseRecord {
                    traj: id.clone(),
                    t,
                    w: [w[0], w[1]],
                });
            }
            tracks.push(PositionTrack { id, points });
        }
    }
    Ok(SyntheticCorpus {
        tracks,
        truth: GroundTruth {
            a: matrix_rows(&a),
            b: matrix_rows(&b),
            noise: records,
        },
    })
}

/// Writes the corpus CSV at `path` and its sidecar at [`truth_path`].
pub fn write_corpus(path: &Path, corpus: &SyntheticCorpus) -> Result<PathBuf> {
    write_tracks(path, &corpus.tracks)?;
    let sidecar = truth_path(path);
    let mut json = serde_json::to_string_pretty(&corpus.truth)?;
    json.push('\n');
    write_atomic(&sidecar, json.as_bytes())?;
    Ok(sidecar)
}
