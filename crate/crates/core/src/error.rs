use thiserror::Error;

/// Errors raised anywhere in the engine.
///
/// Variants are grouped by the exit-code class the CLI maps them to: input
/// problems, domain failures (gluing, missing colimits, unswitchable steps),
/// and negative analysis outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // input / validation
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid rule `{rule}`: {reason}")]
    InvalidRule { rule: String, reason: String },
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("match selector {index} out of range ({available} matches)")]
    MatchSelectorOutOfRange { index: usize, available: usize },
    #[error("format error: {0}")]
    Format(String),

    // domain failures
    #[error("IdentificationViolation: {0}")]
    IdentificationViolation(String),
    #[error("DanglingViolation: {0}")]
    DanglingViolation(String),
    #[error("NoPushout: {0}")]
    NoPushout(String),
    #[error("NoPullback: {0}")]
    NoPullback(String),
    #[error("NotInM: {0}")]
    NotInM(String),
    #[error("EgraphConstraintViolation: {0}")]
    EgraphConstraintViolation(String),
    #[error("Unsupported: {0}")]
    Unsupported(String),
    #[error("NotPresheafInstance")]
    NotPresheafInstance,
    #[error("NotIndependent: steps {0} and {1} have no independence pair")]
    NotIndependent(usize, usize),
    #[error("NotStrong: {0}")]
    NotStrong(String),
    #[error("PairInvalid: {0}")]
    PairInvalid(String),
    #[error("invariant violated: {0}")]
    Invariant(String),

    // negative analysis outcomes
    #[error("NotEquivalent: {0}")]
    NotEquivalent(String),
    #[error("GreedySwitchUnavailable at position {position}: {reason}")]
    GreedySwitchUnavailable { position: usize, reason: String },
    #[error("SequenceBlocked: sequence {sequence}, switch {switch} at position {position}: {reason}")]
    SequenceBlocked {
        sequence: usize,
        switch: usize,
        position: usize,
        reason: String,
    },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Domain,
    Negative,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            EndpointMismatch(_)
            | InvalidSchema(_)
            | InvalidObject(_)
            | InvalidMorphism(_)
            | InvalidRule { .. }
            | InvalidDerivation(_)
            | UnknownName(_)
            | MatchSelectorOutOfRange { .. }
            | Format(_) => ErrorClass::Input,
            IdentificationViolation(_)
            | DanglingViolation(_)
            | NoPushout(_)
            | NoPullback(_)
            | NotInM(_)
            | EgraphConstraintViolation(_)
            | Unsupported(_)
            | NotPresheafInstance
            | NotIndependent(..)
            | NotStrong(_)
            | PairInvalid(_)
            | Invariant(_) => ErrorClass::Domain,
            NotEquivalent(_) | GreedySwitchUnavailable { .. } | SequenceBlocked { .. } => {
                ErrorClass::Negative
            }
        }
    }

    /// The bare variant name, as printed on the diagnostic stream.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            EndpointMismatch(_) => "EndpointMismatch",
            InvalidSchema(_) => "InvalidSchema",
            InvalidObject(_) => "InvalidObject",
            InvalidMorphism(_) => "InvalidMorphism",
            InvalidRule { .. } => "InvalidRule",
            InvalidDerivation(_) => "InvalidDerivation",
            UnknownName(_) => "UnknownName",
            MatchSelectorOutOfRange { .. } => "MatchSelectorOutOfRange",
            Format(_) => "FormatError",
            IdentificationViolation(_) => "IdentificationViolation",
            DanglingViolation(_) => "DanglingViolation",
            NoPushout(_) => "NoPushout",
            NoPullback(_) => "NoPullback",
            NotInM(_) => "NotInM",
            EgraphConstraintViolation(_) => "EgraphConstraintViolation",
            Unsupported(_) => "Unsupported",
            NotPresheafInstance => "NotPresheafInstance",
            NotIndependent(..) => "NotIndependent",
            NotStrong(_) => "NotStrong",
            PairInvalid(_) => "PairInvalid",
            Invariant(_) => "InvariantViolation",
            NotEquivalent(_) => "NotEquivalent",
            GreedySwitchUnavailable { .. } => "GreedySwitchUnavailable",
            SequenceBlocked { .. } => "SequenceBlocked",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
