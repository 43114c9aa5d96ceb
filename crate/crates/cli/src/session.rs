use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;
use tfse_core::specfun::KernelOptions;

use crate::output::RunManifest;

/// Per-invocation facts that go into every manifest.
pub struct Session {
    /// Effective arguments after the subcommand name was reached, config merged.
    pub arguments: Vec<String>,
    pub threads: usize,
}

impl Session {
    pub fn manifest(&self, command: &str, params: &impl Serialize, opts: &KernelOptions) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            arguments: self.arguments.clone(),
            parameters: serde_json::to_value(params).expect("parameters serialize"),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances: json!({
                "kernel_tol": opts.tol,
                "singularity_margin": opts.singularity_margin,
                "max_intervals": opts.max_intervals,
                "replay_agreement": 1e-12,
            }),
            threads: self.threads,
            outputs: Vec::new(),
        }
    }
}

/// Raised for flag combinations that parse but make no sense together.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// `--config FILE`; merged into the arguments before parsing, so by the
/// time this is populated it is always `None`.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArg {
    /// key = value file of flags; explicit flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}
