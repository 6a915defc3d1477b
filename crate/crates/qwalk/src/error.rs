use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] qwalk_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// Input file that does not follow the expected schema.
    #[error("{}: {msg}", path.display())]
    Schema { path: PathBuf, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Thread(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// 0 is success, 1 a numerical failure, 2 bad input or IO.
    pub fn exit_code(&self) -> i32 {
        use qwalk_core::Error as C;
        match self {
            Error::Core(C::InvalidArgument(_) | C::Capacity { .. }) => 2,
            Error::Core(_) => 1,
            Error::Io { .. } | Error::Schema { .. } | Error::Usage(_) | Error::Thread(_) => 2,
        }
    }
}
