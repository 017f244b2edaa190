//! Run configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! chunk_size = 20
//! heading_limit = 0.5235987755982988
//! horizon = 10
//! max_order = 20.0
//! sample_period = 0.1
//!
//! [noise]
//! center = [0.0, 0.0]
//! generators = [[0.005, 0.0], [0.0, 0.005]]
//!
//! [modes.crossing_region]
//! min = [-2.0, -4.0]
//! max = [2.0, 4.0]
//! axis = 1.5707963267948966
//!
//! [query]
//! center = [0.0, -3.5]
//! generators = [[0.5, 0.0], [0.0, 0.5]]
//! heading = 1.5707963267948966
//! ```
//!
//! Angles are radians. Generators are listed as columns.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use pedreach_core::modal::{CrossingRegion, PedestrianQuery};
use pedreach_core::reach::{NoiseSpec, DEFAULT_MAX_ORDER};
use pedreach_core::zonoset::Zonotope;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_chunk_size")]
    pub chunk_size: usize,
    #[serde(default = "default_heading_limit")]
    pub heading_limit: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_max_order")]
    pub max_order: f64,
    #[serde(default = "default_sample_period")]
    pub sample_period: f64,
    pub noise: SetSpec,
    pub modes: ModesConfig,
    pub query: QueryConfig,
    #[serde(default)]
    pub synthetic: SyntheticConfig,
    #[serde(default)]
    pub evaluate: EvaluateConfig,
}

fn default_chunk_size() -> usize {
    20
}

fn default_heading_limit() -> f64 {
    PI / 6.0
}

fn default_horizon() -> usize {
    10
}

fn default_max_order() -> f64 {
    DEFAULT_MAX_ORDER
}

fn default_sample_period() -> f64 {
    0.1
}

/// A 2-D zonotope written as a center and generator columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub center: [f64; 2],
    #[serde(default)]
    pub generators: Vec<[f64; 2]>,
}

impl SetSpec {
    pub fn to_zonotope(&self) -> Result<Zonotope> {
        let g = DMatrix::from_fn(2, self.generators.len(), |i, j| self.generators[j][i]);
        Zonotope::new(DVector::from_column_slice(&self.center), g)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    pub crossing_region: RegionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub axis: f64,
}

impl RegionConfig {
    pub fn to_region(&self) -> CrossingRegion {
        CrossingRegion {
            min: self.min,
            max: self.max,
            axis: self.axis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryConfig {
    pub center: [f64; 2],
    #[serde(default)]
    pub generators: Vec<[f64; 2]>,
    pub heading: f64,
}

/// Axis-aligned box `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticConfig {
    pub crossing_trajectories: usize,
    pub walking_trajectories: usize,
    pub points_per_trajectory: usize,
    /// Walking speed range in m/s.
    pub speed: [f64; 2],
    /// Per-step input perturbation, uniform in `[-jitter, jitter]` per axis.
    pub input_jitter: f64,
    pub crossing_start: BoxConfig,
    pub walking_start: BoxConfig,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            crossing_trajectories: 12,
            walking_trajectories: 12,
            points_per_trajectory: 40,
            speed: [1.1, 1.5],
            input_jitter: 0.3,
            crossing_start: BoxConfig {
                min: [-1.0, -4.0],
                max: [1.0, -3.0],
            },
            walking_start: BoxConfig {
                min: [-8.0, 5.0],
                max: [-6.0, 6.0],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateConfig {
    pub rollouts: usize,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self { rollouts: 1000 }
    }
}

/// A parsed config together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub hash: String,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config = Self::parse(&text)?;
        Ok(LoadedConfig {
            config,
            hash: hex::encode(Sha256::digest(text.as_bytes())),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CliError::Config(m));
        if self.chunk_size < 2 {
            return fail(format!("chunk_size must be at least 2, got {}", self.chunk_size));
        }
        if self.horizon == 0 {
            return fail("horizon must be at least 1".into());
        }
        if self.horizon > self.chunk_size - 1 {
            return fail(format!(
                "horizon {} exceeds chunk_size - 1 = {}",
                self.horizon,
                self.chunk_size - 1
            ));
        }
        if !(0.0..=PI).contains(&self.heading_limit) {
            return fail(format!("heading_limit must lie in [0, pi], got {}", self.heading_limit));
        }
        if !(self.sample_period.is_finite() && self.sample_period > 0.0) {
            return fail(format!("sample_period must be positive, got {}", self.sample_period));
        }
        if !(self.max_order.is_finite() && self.max_order >= 1.0) {
            return fail(format!("max_order must be at least 1, got {}", self.max_order));
        }
        let region = &self.modes.crossing_region;
        if region.min[0] > region.max[0] || region.min[1] > region.max[1] {
            return fail("crossing_region min exceeds max".into());
        }
        let s = &self.synthetic;
        if !(s.speed[0] <= s.speed[1] && s.input_jitter >= 0.0) {
            return fail("synthetic speed range or jitter invalid".into());
        }
        for b in [&s.crossing_start, &s.walking_start] {
            if b.min[0] > b.max[0] || b.min[1] > b.max[1] {
                return fail("synthetic start box min exceeds max".into());
            }
        }
        self.noise.to_zonotope()?;
        self.query()?;
        Ok(())
    }

    pub fn noise_spec(&self) -> Result<NoiseSpec> {
        Ok(NoiseSpec::new(self.noise.to_zonotope()?))
    }

    pub fn query(&self) -> Result<PedestrianQuery> {
        let start = SetSpec {
            center: self.query.center,
            generators: self.query.generators.clone(),
        }
        .to_zonotope()?;
        PedestrianQuery::new(start, self.query.heading, self.heading_limit, self.horizon)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}
