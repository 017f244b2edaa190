//! Trajectory CSV: header `trajectory_id,t,x,y`, one row per sample.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::DVector;
use pedreach_core::reach::StateInputTrajectory;

use crate::error::{CliError, Result};
use crate::io::write_atomic;

const HEADER: [&str; 4] = ["trajectory_id", "t", "x", "y"];

/// Positions of one trajectory, indexed by `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionTrack {
    pub id: String,
    pub points: Vec<[f64; 2]>,
}

impl PositionTrack {
    /// States plus forward-difference velocities `(x(k+1) - x(k)) / dt`.
    pub fn to_trajectory(&self, dt: f64) -> std::result::Result<StateInputTrajectory, pedreach_core::reach::ReachError> {
        let states: Vec<DVector<f64>> = self.points.iter().map(|p| DVector::from_column_slice(p)).collect();
        let inputs = states.windows(2).map(|w| (&w[1] - &w[0]) / dt).collect();
        StateInputTrajectory::new(states, inputs, dt)
    }
}

/// Reads tracks in order of first appearance; rows within a track may come in any order.
pub fn read_tracks(path: &Path) -> Result<Vec<PositionTrack>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_tracks(&text).map_err(|m| CliError::data(path, m))
}

pub fn parse_tracks(text: &str) -> std::result::Result<Vec<PositionTrack>, String> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| e.to_string())?;
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(format!("expected header {}, got {}", HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")));
    }

    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(u64, [f64; 2])>> = HashMap::new();
    for (line, record) in reader.records().enumerate() {
        let row = line + 2;
        let record = record.map_err(|e| format!("row {row}: {e}"))?;
        if record.len() != 4 {
            return Err(format!("row {row}: expected 4 fields, got {}", record.len()));
        }
        let id = record[0].trim().to_string();
        if id.is_empty() {
            return Err(format!("row {row}: empty trajectory_id"));
        }
        let t: u64 = record[1].trim().parse().map_err(|_| format!("row {row}: bad t '{}'", &record[1]))?;
        let mut p = [0.0; 2];
        for (i, field) in [&record[2], &record[3]].into_iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| format!("row {row}: bad coordinate '{field}'"))?;
            if !v.is_finite() {
                return Err(format!("row {row}: non-finite coordinate"));
            }
            p[i] = v;
        }
        rows.entry(id.clone())
            .or_insert_with(|| {
                order.push(id.clone());
                Vec::new()
            })
            .push((t, p));
    }

    let mut tracks = Vec::with_capacity(order.len());
    for id in order {
        let mut samples = rows.remove(&id).unwrap_or_default();
        samples.sort_by_key(|s| s.0);
        for (expected, (t, _)) in samples.iter().enumerate() {
            if *t != expected as u64 {
                return Err(if *t < expected as u64 {
                    format!("trajectory '{id}': duplicate t = {t}")
                } else {
                    format!("trajectory '{id}': t jumps to {t}, expected {expected}")
                });
            }
        }
        if samples.len() < 2 {
            return Err(format!("trajectory '{id}' has {} point(s), need at least 2", samples.len()));
        }
        tracks.push(PositionTrack {
            id,
            points: samples.into_iter().map(|s| s.1).collect(),
        });
    }
    Ok(tracks)
}

/// Loads a CSV and derives inputs with sample period `dt`.
pub fn load_trajectories(path: &Path, dt: f64) -> Result<Vec<StateInputTrajectory>> {
    read_tracks(path)?
        .iter()
        .map(|t| t.to_trajectory(dt).map_err(|e| CliError::data(path, format!("trajectory '{}': {e}", t.id))))
        .collect()
}

/// CSV text for the given tracks. Coordinates use the shortest representation
/// that parses back to the same `f64`.
pub fn format_tracks(tracks: &[PositionTrack]) -> String {
    let mut out = String::from("trajectory_id,t,x,y\n");
    for track in tracks {
        for (t, p) in track.points.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", track.id, t, p[0], p[1]));
        }
    }
    out
}

pub fn write_tracks(path: &Path, tracks: &[PositionTrack]) -> Result<()> {
    write_atomic(path, format_tracks(tracks).as_bytes())
}
