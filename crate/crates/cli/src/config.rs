//! Run defaults. Every value is echoed into the report headers so that an
//! output file records exactly how it was produced.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub ball_size_cap: usize,
    pub length_radius_cap: usize,
    /// Largest Gram truncation handed to the SDP solver.
    pub sdp_size_cap: usize,
    /// Certificates are checked on `B_verify_radius^d`.
    pub verify_radius: usize,
    pub verify_tol: f64,
    pub exhaustive_cap: usize,
    pub samples: usize,
    /// Character grid per axis for ℤ, ℤ², ℤ³.
    pub density_nodes: [usize; 3],
    /// Truncation radius of the tree representations behind averaged bounds.
    pub family_radius: usize,
    pub window_radius: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol: 1e-6,
            max_iter: 500,
            seed: 0,
            ball_size_cap: 2_000_000,
            length_radius_cap: 12,
            sdp_size_cap: 400,
            verify_radius: 2,
            verify_tol: 1e-9,
            exhaustive_cap: 1 << 21,
            samples: 50_000,
            density_nodes: [1 << 16, 256, 32],
            family_radius: 6,
            window_radius: 3,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Validation(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.verify_tol >= 0.0 && self.verify_tol.is_finite()) {
            return Err(CliError::Validation(format!("verify_tol must be nonnegative, got {}", self.verify_tol)));
        }
        if self.max_iter == 0 || self.sdp_size_cap == 0 || self.density_nodes.contains(&0) {
            return Err(CliError::Validation("caps and node counts must be positive".into()));
        }
        Ok(())
    }

    pub fn header(&self) -> Vec<(String, String)> {
        let v = serde_json::to_value(self).expect("config serializes");
        let serde_json::Value::Object(map) = v else { unreachable!("config is a struct") };
        map.into_iter().map(|(k, v)| (k, v.to_string())).collect()
    }
}
