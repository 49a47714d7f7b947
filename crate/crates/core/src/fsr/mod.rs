//! The finite-subdivision-rule engine: rules, complexes, iterated
//! subdivision, expansion certificates, pruning and tree classification.

mod checks;
mod complex;
mod prune;
mod rule;

pub use checks::{
    bounded_valence, condition1, condition2_acyclic, mesh_approaches_zero, MeshVerdict,
    PairGraph, ValenceReport, ValenceVerdict,
};
pub use complex::{CellComplex, Dart, EdgeData, FaceData, VertexData};
pub use prune::{classify_tree, prune, TreeShape};
pub use rule::{
    validate_rule, CornerRef, EdgeTypeData, EdgeTypeId, GammaTag, OrientedEdge, PairingEntry,
    SideRef, SubdivisionRule, SubtileSpec, TileTypeData, TileTypeId, VertexMark, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FsrError {
    #[error("invalid subdivision rule: {0:?}")]
    Validation(Vec<Violation>),
    #[error("face {0} carries tile type {1}, which the rule does not define")]
    TileTypeMismatch(usize, usize),
    #[error("the 1-skeleton is not a tree: {0}")]
    NotATree(String),
    #[error("complex is inconsistent: {0}")]
    BadComplex(String),
    #[error("anchoring ambiguity: {0}")]
    AnchoringAmbiguity(String),
}
