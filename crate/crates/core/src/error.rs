use std::fmt;

use thiserror::Error;

/// A single broken invariant found by one of the `validate_*` functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateIdentifier {
        kind: &'static str,
        id: String,
    },
    DanglingEndpoint {
        arrow: String,
        node: String,
    },
    UnknownArrow {
        relation: usize,
        arrow: String,
    },
    /// Consecutive arrows of a path do not compose.
    BrokenPath {
        relation: usize,
        position: usize,
    },
    NonParallelRelation {
        relation: usize,
    },
    /// Path start node is undeclared.
    UnknownNode {
        node: String,
    },
    CarrierShape {
        node: String,
    },
    DuplicateElement {
        node: String,
        element: String,
    },
    NotTotal {
        arrow: String,
        element: String,
    },
    OutOfCarrier {
        arrow: String,
        element: String,
    },
    RelationFailure {
        relation: usize,
        element: String,
    },
    SchemaMismatch,
    ComponentShape {
        node: String,
    },
    Naturality {
        arrow: String,
        element: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateIdentifier { kind, id } => write!(f, "duplicate {kind} identifier `{id}`"),
            Violation::DanglingEndpoint { arrow, node } => {
                write!(f, "arrow `{arrow}` refers to undeclared node `{node}`")
            }
            Violation::UnknownArrow { relation, arrow } => {
                write!(f, "relation {relation} uses undeclared arrow `{arrow}`")
            }
            Violation::BrokenPath { relation, position } => {
                write!(f, "relation {relation}: arrows do not compose at position {position}")
            }
            Violation::NonParallelRelation { relation } => write!(f, "relation {relation} is not parallel"),
            Violation::UnknownNode { node } => write!(f, "undeclared node `{node}`"),
            Violation::CarrierShape { node } => write!(f, "carrier of `{node}` is malformed"),
            Violation::DuplicateElement { node, element } => {
                write!(f, "element `{element}` appears twice in the carrier of `{node}`")
            }
            Violation::NotTotal { arrow, element } => {
                write!(f, "action of `{arrow}` is undefined at `{element}`")
            }
            Violation::OutOfCarrier { arrow, element } => {
                write!(f, "action of `{arrow}` sends `{element}` outside the target carrier")
            }
            Violation::RelationFailure { relation, element } => {
                write!(f, "relation {relation} fails at element `{element}`")
            }
            Violation::SchemaMismatch => write!(f, "source and target live over different schemas"),
            Violation::ComponentShape { node } => write!(f, "component at `{node}` is malformed"),
            Violation::Naturality { arrow, element } => {
                write!(f, "naturality fails for arrow `{arrow}` at element `{element}`")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live over different schemas")]
    SchemaMismatch,
    #[error("morphisms do not share a target")]
    TargetMismatch,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid schema: {}", join(.0))]
    InvalidSchema(Vec<Violation>),
    #[error("invalid instance: {}", join(.0))]
    InvalidInstance(Vec<Violation>),
    #[error("invalid morphism: {}", join(.0))]
    InvalidMorphism(Vec<Violation>),
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown identifier `{0}`")]
    Unresolved(String),
    #[error("not a group presentation: {0}")]
    NotAGroup(String),
}

fn join(vs: &[Violation]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
