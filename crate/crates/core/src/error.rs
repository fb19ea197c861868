use thiserror::Error;

use crate::diagram::Coord;

/// Failures raised by the library.
///
/// Variants other than [`WlabError::InvalidComposition`] and
/// [`WlabError::SymbolicBlowup`] mean a structural claim about the
/// construction did not hold for the given input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WlabError {
    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("columns {left},{right} are not neighbouring columns")]
    NotNeighbors { left: usize, right: usize },

    #[error("{lemma}: {detail}")]
    LemmaViolation { lemma: &'static str, detail: String },

    #[error("no composite-line decomposition for pair {0}")]
    NoDecomposition(String),

    #[error("several composite-line decompositions for pair {0}")]
    MultipleDecompositions(String),

    #[error("pair {pair}: decomposition carries {stars} starred lines")]
    WrongStarCount { pair: String, stars: usize },

    #[error("symbolic expansion exceeded {budget} terms")]
    SymbolicBlowup { budget: usize },

    #[error("restricted invariant for pair {0} is not linear")]
    NotLinear(String),

    #[error("restricted invariant for pair {0} is not a single coordinate")]
    NotSingleCoordinate(String),

    #[error("excluded coordinate {0:?} carries a 1")]
    CircleOnOne(Coord),

    #[error("starred coordinate {0:?} is not excluded")]
    UnencircledStar(Coord),

    #[error("no e-coordinate left of {0:?} in its row")]
    NoWitness(Coord),

    #[error("generator {0:?} used twice in the tangent frame")]
    DuplicateGenerator(Coord),
}

impl WlabError {
    pub(crate) fn lemma(lemma: &'static str, detail: impl Into<String>) -> Self {
        WlabError::LemmaViolation {
            lemma,
            detail: detail.into(),
        }
    }

    /// True for failures that contradict a structural claim (as opposed to bad
    /// input or a resource limit).
    pub fn is_assertion(&self) -> bool {
        !matches!(
            self,
            WlabError::InvalidComposition(_)
                | WlabError::InvalidConfig(_)
                | WlabError::NotNeighbors { .. }
                | WlabError::SymbolicBlowup { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, WlabError>;
