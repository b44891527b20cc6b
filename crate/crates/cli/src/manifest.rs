use serde::Serialize;

use pasflab_core::search::SubsetPolicy;
use pasflab_core::Field;

/// Everything needed to replay a run. Worker count is deliberately absent.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameParams>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsets: Option<SubsetPolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<Budget>,
    pub version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Gen,
    Verify,
    Analyze,
    Search,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameParams {
    pub p: f64,
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub field: Field,
    pub parseval: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub tol_rel: f64,
    pub parseval_tol_rel: f64,
    pub path_tol: f64,
    pub lemma_tol: f64,
    pub bound_slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Budget {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restricted: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_init: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_step: Option<f64>,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Verify => "verify",
            Command::Analyze => "analyze",
            Command::Search => "search",
        }
    }
}

impl RunManifest {
    pub fn new(command: Command, seed: u64) -> Self {
        Self {
            command,
            input: None,
            output: None,
            frame: None,
            seed,
            subsets: None,
            tolerances: None,
            budget: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}
