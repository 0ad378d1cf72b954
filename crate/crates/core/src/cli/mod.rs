//! Config-driven batch front end behind the `dyndeg` binary.
//!
//! Exit codes: 0 on success, 2 when the config or the model it describes
//! fails validation, 3 when an analysis fails on a valid model (or the report
//! cannot be written). Errors go to stderr as JSON.

mod config;
mod report;

use std::path::PathBuf;

use serde_json::json;

pub use config::{
    config_from_value, config_to_value, parse_config, rational_json, serialize_config, Analysis, CustomConfig,
    MapConfig, ModelConfig, ProductEntry, RunConfig, Violation, ViolationKind, DEFAULT_MAX_POWER, DEFAULT_TOL,
    SCHEMA_VERSION,
};
pub use report::{
    build, model_summary, run, BoundPairJson, BoundsJson, BuiltModel, ChainJson, ComponentJson, DegreeRadiusJson,
    DeltaTableJson, GraphClassJson, GromovJson, GrowthJson, ModelSummary, RadiusJson, Rat, Report, RunError,
    TimingJson, ToleranceJson,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// All requested analyses.
    Report,
    /// Parse and build the model only.
    Validate,
    /// Dynamical-degree table and growth rates only.
    Delta,
}

#[derive(Clone, Debug)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub max_power: Option<usize>,
    pub tol: Option<f64>,
    pub timing: bool,
}

/// What the binary prints and returns.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn failure(err: &RunError) -> Outcome {
    let body = match err {
        RunError::Invalid(v) => json!({"error": "validation", "violations": v}),
        RunError::Analysis(m) => json!({"error": "analysis", "message": m}),
    };
    Outcome {
        code: err.exit_code(),
        stdout: String::new(),
        stderr: serde_json::to_string_pretty(&body).expect("error serializes") + "\n",
    }
}

/// Applies command-line overrides to a parsed config.
pub fn apply_overrides(cfg: &mut RunConfig, inv: &Invocation) -> Result<(), RunError> {
    let mut violations = Vec::new();
    if let Some(m) = inv.max_power {
        if m == 0 {
            violations.push(Violation::new("/M", ViolationKind::SchemaError, "--max-power must be at least 1"));
        }
        cfg.max_power = m;
    }
    if let Some(t) = inv.tol {
        if !(t > 0.0 && t.is_finite()) {
            violations.push(Violation::new("/tol", ViolationKind::SchemaError, "--tol must be positive"));
        }
        cfg.tol = t;
    }
    if inv.command == Command::Delta {
        cfg.analyses = vec![Analysis::DeltaTable];
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(RunError::Invalid(violations))
    }
}

pub fn execute(inv: &Invocation) -> Outcome {
    let text = match std::fs::read_to_string(&inv.config) {
        Ok(t) => t,
        Err(e) => {
            return failure(&RunError::Invalid(vec![Violation::new(
                "",
                ViolationKind::SchemaError,
                format!("cannot read {}: {e}", inv.config.display()),
            )]))
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(v) => return failure(&RunError::Invalid(v)),
    };
    if let Err(e) = apply_overrides(&mut cfg, inv) {
        return failure(&e);
    }
    let body = match inv.command {
        Command::Validate => match build(&cfg) {
            Ok(built) => {
                let v = json!({
                    "schema_version": SCHEMA_VERSION,
                    "valid": true,
                    "config": config_to_value(&cfg),
                    "model": model_summary(&built),
                });
                serde_json::to_string_pretty(&v).expect("summary serializes")
            }
            Err(e) => return failure(&e),
        },
        Command::Report | Command::Delta => match run(&cfg, inv.timing) {
            Ok(r) => r.to_json(),
            Err(e) => return failure(&e),
        },
    };
    let target = inv.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from));
    match target {
        Some(path) => match std::fs::write(&path, body + "\n") {
            Ok(()) => Outcome {
                code: 0,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => failure(&RunError::Analysis(format!("cannot write {}: {e}", path.display()))),
        },
        None => Outcome {
            code: 0,
            stdout: body + "\n",
            stderr: String::new(),
        },
    }
}
