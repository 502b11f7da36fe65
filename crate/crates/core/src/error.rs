use std::fmt;

/// Errors reported by graph construction and the divisor algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    DisconnectedGraph,
    LoopEdge(String),
    NonPositiveLength(String),
    DuplicateId(String),
    UnknownVertex(String),
    UnknownEdge(String),
    OffsetOutOfRange(String),
    OverlappingSets,
    EdgeInTree(String),
    NoProperSubset,
    NotOrientable,
    AlreadyQOrientable,
    WrongDegree { expected: i64, got: i64 },
    NotQConnected,
    PointOffGraph(String),
    NotASemiModel(String),
    EmptyCut,
    WrongGenus { expected: i64, got: i64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DisconnectedGraph => write!(f, "graph is not connected"),
            Error::LoopEdge(e) => write!(f, "edge {} is a loop; subdivide it before ingestion", e),
            Error::NonPositiveLength(e) => write!(f, "edge {} has non-positive length", e),
            Error::DuplicateId(id) => write!(f, "duplicate identifier {}", id),
            Error::UnknownVertex(v) => write!(f, "unknown vertex {}", v),
            Error::UnknownEdge(e) => write!(f, "unknown edge {}", e),
            Error::OffsetOutOfRange(e) => {
                write!(f, "refinement offsets for edge {} are out of range", e)
            }
            Error::OverlappingSets => write!(f, "vertex sets overlap but are not equal"),
            Error::EdgeInTree(e) => write!(f, "edge {} belongs to the spanning tree", e),
            Error::NoProperSubset => write!(f, "graph has no nonempty proper vertex subset"),
            Error::NotOrientable => write!(f, "divisor is not orientable"),
            Error::AlreadyQOrientable => write!(f, "divisor is already q-orientable"),
            Error::WrongDegree { expected, got } => {
                write!(f, "divisor has degree {}, expected {}", got, expected)
            }
            Error::NotQConnected => write!(f, "orientation is not q-connected"),
            Error::PointOffGraph(p) => write!(f, "point {} does not lie on the graph", p),
            Error::NotASemiModel(why) => write!(f, "graph is not a semi-model: {}", why),
            Error::EmptyCut => write!(f, "vertex set has no outgoing cut"),
            Error::WrongGenus { expected, got } => {
                write!(f, "graph has genus {}, expected {}", got, expected)
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
