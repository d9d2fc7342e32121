use std::fmt;

/// Everything that can go wrong in selection, evaluation, or I/O.
#[derive(Debug)]
pub enum Error {
    /// Matrix shapes do not fit together, or a dimension is zero.
    Dimension(String),
    /// An antenna index list is out of range, unsorted, or has duplicates.
    Selection(String),
    /// The subset size cannot be satisfied by the tree (e.g. `L > Nt`).
    Problem(String),
    /// A matrix or config file could not be parsed.
    Format(String),
    /// A result or cached quantity left the finite/non-negative range.
    Numerical(String),
    /// Exhaustive search refused because the subset count exceeds the cap.
    Budget {
        subsets: u128,
        cap: u128,
    },
    /// Invalid experiment or CLI configuration.
    Config(String),
    /// Nothing to write.
    EmptyInput,
    Io(std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 3,
            Error::Budget { .. } => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::Selection(msg) => write!(f, "invalid selection: {msg}"),
            Error::Problem(msg) => write!(f, "infeasible problem: {msg}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
            Error::Budget { subsets, cap } => write!(
                f,
                "budget exceeded: exhaustive search needs {subsets} subsets, cap is {cap}"
            ),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::EmptyInput => write!(f, "empty input: no records to write"),
            Error::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}
