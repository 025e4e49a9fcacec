use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("structure contains no protein atoms")]
    EmptyStructure,

    #[error("unknown element symbol '{0}'")]
    UnknownElement(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("ligand topology mismatch: {0}")]
    TopologyMismatch(String),

    #[error("binding-site coverage: {0}")]
    Coverage(String),

    #[error("no binding-site residue within cutoff of the ligand")]
    EmptyBindingSite,

    #[error("no protein-ligand interface pairs within the inclusion radius")]
    EmptyInterface,

    #[error("fingerprint width mismatch: {0} vs {1}")]
    FingerprintWidth(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing confidence value for pose (seed {seed}, sample {sample})")]
    MissingConfidence { seed: u32, sample: u32 },

    #[error("entry sets differ: only in A: {only_a:?}, only in B: {only_b:?}")]
    EntrySetMismatch {
        only_a: Vec<String>,
        only_b: Vec<String>,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
