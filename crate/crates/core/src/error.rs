use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(f64),

    #[error("invalid isometry: determinant {0} is not positive")]
    Degenerate(f64),

    #[error("invalid point: imaginary part {0} must be positive")]
    OffPlane(f64),

    #[error("length must be positive, got {0}")]
    NonPositiveLength(f64),

    #[error("surface of genus {genus} with {boundary} boundary components is not hyperbolic")]
    NotHyperbolic { genus: u32, boundary: u32 },

    #[error("branch probability exceeds one: degree {degree} > side degree {side}")]
    ProbabilityAboveOne { degree: f64, side: f64 },

    #[error("degrees must be positive")]
    NonPositiveDegree,

    #[error("scale factor must be positive, got {0}")]
    NonPositiveFactor(f64),

    #[error("family size must be at least 3, got {0}")]
    FamilyTooSmall(usize),

    #[error("spec failed validation: {0}")]
    Invalid(String),

    #[error("length parameter `{0}` is not bound to a number")]
    Unbound(String),

    #[error("sheet `{sheet}` has unsupported type (genus {genus}, {boundary} ends)")]
    UnsupportedSheet { sheet: String, genus: u32, boundary: u32 },

    #[error("gluing along `{curve}` joins boundaries of different lengths ({left} vs {right})")]
    LengthMismatch { curve: String, left: f64, right: f64 },

    #[error("trajectory {trajectory} met a boundary tangentially at arclength {arclength}")]
    Tangential { trajectory: u64, arclength: f64 },

    #[error("{discarded} of {total} trajectories were tangential, above the 0.01% ceiling")]
    TangentialOverrun { discarded: usize, total: usize },

    #[error("target length must be positive, got {0}")]
    NonPositiveTarget(f64),

    #[error("geometry failure: {0}")]
    Geometry(String),
}
