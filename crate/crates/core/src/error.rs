use thiserror::Error;

/// Domain errors raised by the toolkit.
///
/// Every variant maps to a stable machine-readable [`kind`](HbError::kind)
/// string, which the CLI prints alongside the human message.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HbError {
    #[error("function has a pole at z = {re}+{im}i")]
    PoleAt { re: f64, im: f64 },
    #[error("function has a pole on the unit circle")]
    BoundaryPole,
    #[error("point lies outside the admissible region: |z| = {modulus}")]
    OutsideDisk { modulus: f64 },
    #[error("point lies on the unit circle")]
    OnCircle,
    #[error("polynomial has degree zero")]
    DegreeZero,
    #[error("zero polynomial is not admissible here")]
    ZeroPolynomial,
    #[error("constant function is not admissible here")]
    Constant,
    #[error("weight is negative on the circle: min = {min}")]
    NegativeWeight { min: f64 },
    #[error("weight is not Hermitian")]
    NotHermitian,
    #[error("circle root at angle {angle} has odd multiplicity {multiplicity}")]
    OddCircleMultiplicity { angle: f64, multiplicity: usize },
    #[error("root {re}+{im}i has no reflected partner within tolerance")]
    PairingMismatch { re: f64, im: f64 },
    #[error("symbol is extreme: 1 - |b|^2 vanishes identically")]
    ExtremeSymbol,
    #[error("symbol exceeds the unit ball: sup |b| = {sup}")]
    NotContractive { sup: f64 },
    #[error("elements belong to different spaces")]
    SpaceMismatch,
    #[error("alpha is not unimodular: |alpha| = {modulus}")]
    NotUnimodular { modulus: f64 },
    #[error("point at angle {angle} is not an atom of the Clark measure")]
    NotAnAtom { angle: f64 },
    #[error("function is not outer: interior root {re}+{im}i")]
    NotOuter { re: f64, im: f64 },
    #[error("function is not a rational symbol")]
    NotRational,
    #[error("function is not a polynomial")]
    NotPolynomial,
    #[error("boundary data is not in J_phi: residual {residual}")]
    NotInJPhi { residual: f64 },
    #[error("space is not normalized: {reason}")]
    Normalization { reason: String },
    #[error("exact backend unavailable: {reason}")]
    ExactUnavailable { reason: String },
    #[error("refit residual {residual} exceeds tolerance")]
    RefitResidual { residual: f64 },
    #[error("invalid arc: {reason}")]
    InvalidArc { reason: String },
    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },
    #[error("parse error: {reason}")]
    Parse { reason: String },
    #[error("numerical failure: {reason}")]
    Numerical { reason: String },
    #[error("certificate {rule} failed: {reason}")]
    CertificateFailed { rule: String, reason: String },
}

impl HbError {
    pub fn kind(&self) -> &'static str {
        match self {
            HbError::PoleAt { .. } => "pole_at_point",
            HbError::BoundaryPole => "boundary_pole",
            HbError::OutsideDisk { .. } => "outside_disk",
            HbError::OnCircle => "on_circle",
            HbError::DegreeZero => "degree_zero",
            HbError::ZeroPolynomial => "zero_polynomial",
            HbError::Constant => "constant_function",
            HbError::NegativeWeight { .. } => "negative_weight",
            HbError::NotHermitian => "not_hermitian",
            HbError::OddCircleMultiplicity { .. } => "odd_circle_multiplicity",
            HbError::PairingMismatch { .. } => "pairing_mismatch",
            HbError::ExtremeSymbol => "non_extreme_violation",
            HbError::NotContractive { .. } => "not_contractive",
            HbError::SpaceMismatch => "space_mismatch",
            HbError::NotUnimodular { .. } => "not_unimodular",
            HbError::NotAnAtom { .. } => "not_an_atom",
            HbError::NotOuter { .. } => "not_outer",
            HbError::NotRational => "not_rational",
            HbError::NotPolynomial => "not_polynomial",
            HbError::NotInJPhi { .. } => "membership",
            HbError::Normalization { .. } => "normalization",
            HbError::ExactUnavailable { .. } => "exact_unavailable",
            HbError::RefitResidual { .. } => "refit_residual",
            HbError::InvalidArc { .. } => "invalid_arc",
            HbError::InvalidConfig { .. } => "invalid_config",
            HbError::Parse { .. } => "parse",
            HbError::Numerical { .. } => "numerical",
            HbError::CertificateFailed { .. } => "certificate_failed",
        }
    }
}

pub type Result<T> = std::result::Result<T, HbError>;
