use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{op} supports dimension {supported} only, got d = {dim}")]
    UnsupportedDimension {
        op: &'static str,
        supported: &'static str,
        dim: usize,
    },

    #[error("density is not finite at xi = {xi:?}, eta = {eta:?}: {reason}")]
    NonFiniteDensity {
        xi: Vec<f64>,
        eta: Vec<f64>,
        reason: String,
    },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("function `{func}` expects {expected} argument(s), got {found}")]
    Arity {
        func: String,
        expected: &'static str,
        found: usize,
    },

    #[error("division by zero")]
    DivisionByZero,

    #[error("arithmetic overflow to a non-finite value")]
    NonFinite,

    #[error("slope {slope:?} is farther than {tol} from every cloud point")]
    OutsideCloud { slope: Vec<f64>, tol: f64 },

    #[error(
        "{op} requires a symmetric and diagonal density; apply hat_density first (`--kind hat`)"
    )]
    NotSymmetricDiagonal { op: &'static str },

    #[error("sublevel set at level {level} has no basic Cartesian convexification")]
    NoBasicConvexification { level: f64 },

    #[error(
        "clique search over {vertices} vertices exceeds the cap of {cap} (SUPRELAX_CLIQUE_CAP)"
    )]
    CliqueCap { vertices: usize, cap: usize },

    #[error("more than {cap} maximal squares")]
    SquareCap { cap: usize },

    #[error("no admissible slope subset with at most {cap} points")]
    SubsetCap { cap: usize },

    #[error("no admissible cloud slope inside the target set for cell(s) {cells:?}")]
    Infeasible { cells: Vec<usize> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("malformed file at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Resource caps (clique, square and subset limits) as opposed to domain errors.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::CliqueCap { .. } | Error::SquareCap { .. } | Error::SubsetCap { .. }
        )
    }
}
