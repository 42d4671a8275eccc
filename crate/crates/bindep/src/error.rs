use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("edges1 is missing the diagonal entry ({0},{0})")]
    DiagonalMissing(String),
    #[error("edges2 contains the self loop ({0},{0})")]
    SelfLoopInE2(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("a pair kind needs two distinct vertices, got `{0}` twice")]
    SamePair(String),
    #[error("inconsistent pair kinds for ({0},{1})")]
    InconsistentKinds(String, String),
    #[error("outer bigraph has {expected} vertices but {got} inner bigraphs were given")]
    ArityMismatch { expected: usize, got: usize },
    #[error("vertex `{0}` has an empty active site set")]
    EmptyS1(String),
    #[error("invalid site model: {0}")]
    InvalidSiteModel(String),
    #[error("size guard: {what} = {value} exceeds the limit {limit}")]
    SizeGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("partition is not non-crossing")]
    NotNonCrossing,
    #[error("partitions are not comparable in the refinement order")]
    NotComparable,
    #[error("a block mixes colors")]
    NotMonochromatic,
    #[error("partition is not compatible with the coloring and bigraph")]
    NotCompatible,
    #[error("bigraph is not the stated operad composition")]
    NotComposition,
    #[error("height path becomes negative at step {0}")]
    NegativeHeight(usize),
    #[error("step {0} continues a block while the height is zero")]
    ZeroPlateauViolation(usize),
    #[error("element {index} lives at vertex `{found}` but the coloring asks for `{expected}`")]
    VertexMismatch {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("bigraph is outside the BMT regime")]
    NotBMTRegime,
    #[error("bigraph is outside the epsilon regime (edges1 not full)")]
    NotEpsilonRegime,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("a word of length {0} exceeds the truncation cap")]
    TruncationOverflow(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("Gram matrix is singular for k = {k}, N = {n}")]
    SingularGram { k: usize, n: u64 },
    #[error("permutation does not stabilize the color word")]
    NotStabilizing,
    #[error("vertex `{0}` does not carry a vector state")]
    NotVectorState(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn guard(what: &'static str, value: usize, limit: usize) -> Result<()> {
    if value > limit {
        Err(Error::SizeGuard { what, value, limit })
    } else {
        Ok(())
    }
}
