//! JSON manifests describing a run or supplying CDDR inputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_file, write_file};
use crate::error::Result;
use crate::metrics::MetricConfig;
use crate::synth::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    Dist {
        metric: MetricConfig,
        #[serde(default)]
        breakdown: bool,
    },
    Sweep {
        config: ExperimentConfig,
    },
    Rdr {
        metric: MetricConfig,
        splits: usize,
        seed: u64,
    },
    Cddr,
    Bench {
        metrics: Vec<MetricConfig>,
        sizes: Vec<usize>,
        d: usize,
        repeats: usize,
        seed: u64,
    },
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub task: Task,
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = read_file(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_json().as_bytes())
    }
}

/// One evaluation setting: within- and cross-domain performance plus any
/// number of named distances measured for that setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CddrEntry {
    pub setting: String,
    pub m_within: f64,
    pub m_cross: f64,
    #[serde(default)]
    pub distances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CddrManifest {
    pub settings: Vec<CddrEntry>,
}

impl CddrManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = read_file(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}
