use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum AlgebraError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("alphabet mismatch between operands")]
    AlphabetMismatch,

    #[error("operation requires generators x, y, z in the alphabet")]
    MissingXyz,

    #[error("replacement variable `{0}` already occurs in the element")]
    NotFresh(String),

    #[error("monomial `{monomial}` has {found} occurrences of `{var}`, but {needed} are required")]
    DegreeShort {
        var: String,
        monomial: String,
        found: u32,
        needed: u32,
    },

    #[error("operator word operand is zero")]
    ZeroOperand,

    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },

    #[error("element is not multilinear")]
    NotMultilinear,

    #[error("element is not homogeneous")]
    MixedDegree,

    #[error("randomized mode requires at least one trial")]
    NoTrials,
}
