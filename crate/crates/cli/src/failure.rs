use std::fmt;
use torus_pencil::error::Error;

/// Exit classes of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Config,
    Numerical,
    Inconclusive,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Config => 2,
            Kind::Numerical => 3,
            Kind::Inconclusive => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Config => "config",
            Kind::Numerical => "numerical",
            Kind::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: Kind::Config, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { kind: Kind::Numerical, message: message.into() }
    }

    /// Single-line form for scripts: `error kind=<class> code=<n> message="..."`.
    pub fn line(&self) -> String {
        format!("error kind={} code={} message={:?}", self.kind.name(), self.kind.exit_code(), self.message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::InvalidGrid(_)
            | Error::ShapeParse { .. }
            | Error::EmptyDomain
            | Error::AllCellsInside
            | Error::GridMismatch
            | Error::Io(_)
            | Error::Parse(_) => Kind::Config,
            Error::Inconclusive(_) => Kind::Inconclusive,
            _ => Kind::Numerical,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::config(e.to_string())
    }
}
