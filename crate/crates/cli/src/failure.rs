//! Exit-code classification and the JSON error report written to stderr.

use std::fmt;

use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Data,
    Numerical,
}

impl Stage {
    pub fn exit_code(self) -> u8 {
        match self {
            Stage::Config => 2,
            Stage::Data => 3,
            Stage::Numerical => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Data => "data",
            Stage::Numerical => "numerical",
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub stage: Stage,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.stage.name(),
                "code": self.stage.exit_code(),
                "message": format!("{:#}", self.error),
            }
        })
        .to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:#}", self.stage.name(), self.error)
    }
}

/// Stage implied by a library error when the call site has no better idea.
pub fn stage_of(e: &hedge_core::Error) -> Stage {
    use hedge_core::Error as E;
    match e {
        E::NoConvergence(_) | E::NoSignChange { .. } | E::NonFinite(_) => Stage::Numerical,
        E::Data(_) | E::Schema(_) | E::Io(_) | E::Csv(_) => Stage::Data,
        _ => Stage::Config,
    }
}

pub trait Tag<T> {
    fn at(self, stage: Stage) -> Result<T, Failure>;

    fn config(self) -> Result<T, Failure>
    where
        Self: Sized,
    {
        self.at(Stage::Config)
    }

    fn data(self) -> Result<T, Failure>
    where
        Self: Sized,
    {
        self.at(Stage::Data)
    }
}

impl<T, E: Into<anyhow::Error>> Tag<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            stage,
            error: e.into(),
        })
    }
}

/// Classifies a library error by its variant.
pub fn core<T>(r: hedge_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure {
        stage: stage_of(&e),
        error: e.into(),
    })
}
