use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("parameter {value} on axis {axis} lies outside [{min}, {max}]")]
    Domain {
        axis: usize,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("expected a point with {expected} coordinates, got {got}")]
    PointArity { expected: usize, got: usize },
    #[error("immersion is degenerate at this point: {0}")]
    Degenerate(String),
    #[error("unknown immersion `{0}`")]
    UnknownImmersion(String),
    #[error("invalid parameter for `{name}`: {msg}")]
    BadParameter { name: String, msg: String },
    #[error("{0}")]
    UnsupportedDimension(String),
    #[error("quadrature rule lives on S^{rule_dim_minus_one} but the codimension is {codim}")]
    SchemeMismatch {
        rule_dim_minus_one: usize,
        codim: usize,
    },
    #[error("eps = {eps} exceeds the reach bound {bound} of `{name}`")]
    ReachExceeded { name: String, eps: f64, bound: f64 },
    #[error("1 - eps*II is singular: eps exceeds the local reach")]
    FocalPoint,
    #[error("Euler characteristic of `{0}` is unknown")]
    UnknownEuler(String),
    #[error("grid has {grid} axes but the domain has {domain}")]
    AxisMismatch { grid: usize, domain: usize },
    #[error("surface file field `{field}`: {msg}")]
    Parse { field: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GeomError {
    pub(crate) fn parse(field: impl Into<String>, msg: impl Into<String>) -> Self {
        GeomError::Parse {
            field: field.into(),
            msg: msg.into(),
        }
    }
}
