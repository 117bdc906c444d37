use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape parse error at line {line}: {msg}")]
    ShapeParse { line: usize, msg: String },
    #[error("domain has no inside cells")]
    EmptyDomain,
    #[error("domain covers every cell; complement must contain a cell")]
    AllCellsInside,
    #[error("operator has no interior degrees of freedom")]
    EmptyInterior,
    #[error("linear solver failed: {0}")]
    SolverFailure(String),
    #[error("target set is empty")]
    TargetEmpty,
    #[error("search box holds more than {0} eigenvalues; result truncated")]
    BoxTooLarge(usize),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("slope fit unstable (r2 = {0:.4})")]
    FitUnstable(f64),
    #[error("harmonic measure underflow beyond n = {0}")]
    UnderflowBeyondN(usize),
    #[error("arc I0 is not a single separating arc")]
    NotSeparating,
    #[error("lift component is not simply connected")]
    NotSimplyConnected,
    #[error("rho = {0} is within 1e-3 of an integer")]
    NearIntegerRho(f64),
    #[error("mass symmetry violated: |int e^(ipy) dnu| = {0:.3e}")]
    MassSymmetryViolated(f64),
    #[error("rho = {0} lies in the spectrum of the domain")]
    RhoInSpectrum(f64),
    #[error("rho = {rho} is above the critical value (max g = {max_value:.3e})")]
    RhoAboveCritical { rho: f64, max_value: f64 },
    #[error("arc too wide for rho-majorant: beta - alpha = {0}")]
    ArcTooWide(f64),
    #[error("mollifier radius {eps} below 2h = {min}")]
    EpsTooSmall { eps: f64, min: f64 },
    #[error("iteration limit reached ({0} sweeps)")]
    IterationLimit(usize),
    #[error("mismatched grids")]
    GridMismatch,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
