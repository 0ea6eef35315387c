use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("point index {0} out of range")]
    PointOutOfRange(usize),
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("order is not antisymmetric: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    NotAntisymmetric(String, String),
    #[error("too many points: {0} (cap is {1})")]
    TooManyPoints(usize, usize),
    #[error("opens belong to different spaces")]
    SpaceMismatch,
    #[error("not an open set (not an up-set): {0}")]
    NotOpen(String),
    #[error("parts do not cover the target: {0}")]
    NotACover(String),
    #[error("cover index {0} out of range")]
    InvalidIndex(usize),
    #[error("covers have different targets")]
    TargetMismatch,
    #[error("refinement map is invalid: {0}")]
    BadRefinement(String),

    #[error("group table is malformed: {0}")]
    BadTable(String),
    #[error("group order {0} exceeds the cap {1}")]
    GroupTooLarge(usize, usize),
    #[error("multiplication is not associative on ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element `{0}` has no inverse")]
    NoInverse(String),
    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("comparison maps are not functorial: {0}")]
    NonFunctorial(String),
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("sheaf is not abelian")]
    NotAbelian,
    #[error("sheaf mismatch: {0}")]
    SheafMismatch(String),

    #[error("cochain is not a cocycle")]
    NotCocycle,
    #[error("unsupported degree {0}")]
    UnsupportedDegree(usize),
    #[error("cochain is malformed: {0}")]
    BadCochain(String),
    #[error("integer overflow in exact linear algebra")]
    Overflow,

    #[error("not a torsor: {0}")]
    BadTorsor(String),
    #[error("no cover admits liftable transition data")]
    NoLiftableCover,

    #[error("groupoid is malformed: {0}")]
    BadGroupoid(String),
    #[error("functor is malformed: {0}")]
    BadFunctor(String),
    #[error("diagram is malformed: {0}")]
    BadDiagram(String),
    #[error("object is not a valid local object: {0}")]
    BadObject(String),
    #[error("morphism is not valid: {0}")]
    BadMorphism(String),
    #[error("subgroupoid is not central: {0}")]
    NotCentral(String),
    #[error("not a central extension: {0}")]
    NotCentralExtension(String),
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("no cover in the family admits local lifts")]
    NoLiftingCover,
    #[error("invalid level {0}")]
    InvalidLevel(usize),
    #[error("filtration is invalid: {0}")]
    BadFiltration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
