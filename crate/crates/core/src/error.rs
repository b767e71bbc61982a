use thiserror::Error;

/// Errors produced anywhere in the solver pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid potential model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("division strategy {strategy} is not applicable: {reason}")]
    StrategyInapplicable {
        strategy: &'static str,
        reason: String,
    },

    /// The homographic map hit a pole (denominator vanished).
    #[error(
        "impedance pole{}{}",
        energy.map(|e| format!(" at E = {e} eV")).unwrap_or_default(),
        region.map(|r| format!(" in region {r}")).unwrap_or_default()
    )]
    Pole {
        energy: Option<f64>,
        region: Option<usize>,
    },

    #[error("no propagating channel: E = {energy} eV does not exceed u_left = {u_left} eV")]
    NoPropagatingChannel { energy: f64, u_left: f64 },

    #[error("unsupported configuration: asymmetric leads (u_left = {u_left} eV, u_right = {u_right} eV)")]
    AsymmetricLeads { u_left: f64, u_right: f64 },

    #[error("E = {energy} eV is outside the bound window ({lo} eV, {hi} eV)")]
    OutsideBoundWindow { energy: f64, lo: f64, hi: f64 },

    #[error("no bound window: potential minimum {u_min} eV is not below the lowest lead {u_lead} eV")]
    NoBoundWindow { u_min: f64, u_lead: f64 },

    #[error("bound-state condition is not purely imaginary at E = {energy} eV (Re F = {re}, |F| = {abs})")]
    NonImaginaryCondition { energy: f64, re: f64, abs: f64 },

    #[error("all {count} sweep energies failed")]
    AllEnergiesFailed { count: usize },

    #[error("level count changed at N = {n}: {previous:?} -> {current:?}")]
    LevelCountUnstable {
        n: usize,
        previous: Vec<f64>,
        current: Vec<f64>,
    },

    #[error("region {region} has {count} profile samples, at least 3 required")]
    TooFewSamples { region: usize, count: usize },

    #[error("no bound state: delta strength {g} eV nm is not attractive")]
    NoBoundState { g: f64 },

    #[error("transfer-matrix flux check failed: R + T = {sum}")]
    FluxMismatch { sum: f64 },

    #[error("{}", match line { Some(l) => format!("config line {l}: {message}"), None => format!("config: {message}") })]
    Config { line: Option<usize>, message: String },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 1 = input error, 2 = physics/configuration error, 3 = numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidModel(_)
            | Error::InvalidParameter { .. }
            | Error::TooFewSamples { .. }
            | Error::Config { .. }
            | Error::Io { .. } => 1,
            Error::StrategyInapplicable { .. }
            | Error::NoPropagatingChannel { .. }
            | Error::AsymmetricLeads { .. }
            | Error::OutsideBoundWindow { .. }
            | Error::NoBoundWindow { .. }
            | Error::NoBoundState { .. } => 2,
            Error::Pole { .. }
            | Error::NonImaginaryCondition { .. }
            | Error::AllEnergiesFailed { .. }
            | Error::LevelCountUnstable { .. }
            | Error::FluxMismatch { .. } => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
