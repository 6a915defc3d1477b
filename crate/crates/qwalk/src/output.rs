//! CSV tables with `#` metadata headers, and JSON sidecars.
//!
//! Every file starts with the program version and the command that
//! reproduces it, followed by the resolved configuration. Nothing
//! time- or machine-dependent is written, so a rerun of the recorded
//! command produces identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Shortest round-trip decimal; scientific outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    if x == 0.0 || x.is_nan() || x.is_infinite() {
        return if x.is_nan() {
            "nan".into()
        } else if x.is_infinite() {
            if x > 0.0 {
                "inf".into()
            } else {
                "-inf".into()
            }
        } else {
            "0".into()
        };
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `prefix` with `suffix` appended to the file name.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Metadata common to every file of one run.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: String,
    pub fields: Vec<(&'static str, String)>,
}

impl Header {
    pub fn new(command: String) -> Self {
        Header {
            command,
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, key: &'static str, value: impl ToString) -> Self {
        self.fields.push((key, value.to_string()));
        self
    }
}

pub struct CsvTable {
    path: PathBuf,
    out: csv::Writer<BufWriter<File>>,
}

impl CsvTable {
    pub fn create(path: &Path, header: &Header, columns: &[&str]) -> Result<Self> {
        let file = File::create(path).map_err(Error::io(path))?;
        let mut w = BufWriter::new(file);
        let mut head = format!(
            "# qwalk {}\n# command: {}\n",
            env!("CARGO_PKG_VERSION"),
            header.command
        );
        for (k, v) in &header.fields {
            head.push_str(&format!("# {k}: {v}\n"));
        }
        w.write_all(head.as_bytes()).map_err(Error::io(path))?;
        let mut out = csv::WriterBuilder::new().from_writer(w);
        out.write_record(columns).map_err(|e| csv_error(path, e))?;
        Ok(CsvTable {
            path: path.to_owned(),
            out,
        })
    }

    pub fn row<I, S>(&mut self, cells: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.out
            .write_record(cells)
            .map_err(|e| csv_error(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(Error::io(&self.path))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_owned(),
            source,
        },
        other => Error::Schema {
            path: path.to_owned(),
            msg: format!("{other:?}"),
        },
    }
}

#[derive(Serialize)]
struct Sidecar<'a, C, R> {
    program: String,
    command: &'a str,
    config: &'a C,
    results: &'a R,
}

/// Pretty-printed JSON with the command, configuration and results.
pub fn write_json<C: Serialize, R: Serialize>(
    path: &Path,
    command: &str,
    config: &C,
    results: &R,
) -> Result<()> {
    let doc = Sidecar {
        program: format!("qwalk {}", env!("CARGO_PKG_VERSION")),
        command,
        config,
        results,
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Usage(format!("cannot encode {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(Error::io(path))
}
