use crate::compile::CompileError;
use crate::grounding::GroundingError;
use crate::learn::LearnError;
use crate::measures::MeasureError;
use crate::oracle::OracleError;
use crate::propositional::PropositionalError;
use crate::semirings::SemiringError;
use crate::syntax::SyntaxError;

/// Any failure of the pipeline, grouped by the stage that raised it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
    #[error(transparent)]
    Propositional(#[from] PropositionalError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("{0}")]
    Query(String),
}

/// What kind of failure an [`Error`] is; the command-line exit code follows from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Semantic,
    Resource,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Parse => 2,
            ErrorClass::Semantic => 3,
            ErrorClass::Resource => 4,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Syntax(_) => ErrorClass::Parse,
            Error::Grounding(GroundingError::Nontermination { .. })
            | Error::Compile(CompileError::NodeBudget(_))
            | Error::Oracle(OracleError::TooLarge { .. }) => ErrorClass::Resource,
            _ => ErrorClass::Semantic,
        }
    }
}
