use thiserror::Error;

pub type Result<T, E = HardyError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("coefficient table is empty")]
    EmptySeries,
    #[error("grid must have at least one point")]
    EmptyGrid,
    #[error("band [{n_min}, {n_max}] needs {needed} grid points but the grid has {points}")]
    BandTooWide {
        n_min: i64,
        n_max: i64,
        needed: usize,
        points: usize,
    },
    #[error("grid has {points} points but {len} values were supplied")]
    GridLengthMismatch { points: usize, len: usize },
    #[error("invalid band: n_min = {n_min} exceeds n_max = {n_max}")]
    InvalidBand { n_min: i64, n_max: i64 },
    #[error("table has {len} entries, at least {needed} required")]
    TableTooShort { len: usize, needed: usize },
    #[error("operator dimension {n} is too small (need at least {needed})")]
    DimensionTooSmall { n: usize, needed: usize },
    #[error("matrix has {len} entries, expected {n}x{n}")]
    DimensionMismatch { n: usize, len: usize },
    #[error("probe of degree {degree} shifted {depth} times does not fit truncation N = {n}")]
    ProbeTooDeep { degree: usize, depth: usize, n: usize },
    #[error("probe vanishes (within {eps_zero:e}) at every grid point")]
    AllPointsMasked { eps_zero: f64 },
    #[error("probe is valid on only {fraction:.3} of the grid (need {required:.2})")]
    InsufficientMask { fraction: f64, required: f64 },
    #[error("no pair of probes has a jointly valid grid point")]
    NoComparablePoints,
    #[error("at least {needed} probes required, got {got}")]
    TooFewProbes { needed: usize, got: usize },
    #[error("point w = {re} + {im}i is not inside the unit disk")]
    DiskViolation { re: f64, im: f64 },
    #[error("series of coefficients is out of domain; refusing to sum")]
    DomainRefused,
    #[error("gamma sequence violates |g(n+1)| > (n+1)|g(n)| at n = {index}")]
    GrowthViolation { index: usize },
    #[error("denominator vanishes on the grid (min |a| = {min_modulus:e})")]
    DenominatorVanishes { min_modulus: f64 },
    #[error("no stabilization in cut range [{start}, {end}]")]
    NoStabilization { start: usize, end: usize },
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
