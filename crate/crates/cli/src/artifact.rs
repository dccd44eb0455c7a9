use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use treecover::generators::GenSpec;

use crate::{Dedupe, KindArg, SepMode, StrategyArg};

pub const TOOL: &str = "treecover";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything that determines an artifact's content. Thread count is not
/// part of it: outputs are the same for any `--threads`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GenSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub td: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dedupe: Option<Dedupe>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sep_mode: Option<SepMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyArg>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict_tz: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forest_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
}

impl RunConfig {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.into(),
            seed,
            ..Default::default()
        }
    }
}

/// Header shared by every artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
}

impl Header {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            config: config.clone(),
        }
    }

    /// One-line form for comment lines of text formats.
    pub fn line(&self) -> String {
        serde_json::to_string(self).expect("header serializes")
    }
}

#[derive(Serialize)]
pub struct Artifact<'a, T: Serialize> {
    #[serde(flatten)]
    pub header: Header,
    #[serde(flatten)]
    pub payload: &'a T,
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, config: &RunConfig, payload: &T) -> Result<()> {
    let a = Artifact {
        header: Header::new(config),
        payload,
    };
    let mut text = serde_json::to_string_pretty(&a)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
