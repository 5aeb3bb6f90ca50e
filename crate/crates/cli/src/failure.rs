use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    /// Anything not explicitly tagged is a bad input.
    fn from(e: E) -> Self {
        Failure { code: EXIT_INPUT, error: e.into() }
    }
}

pub trait Tag<T> {
    /// Marks an error as an output failure (exit 3).
    fn output(self, what: impl Display) -> Result<T, Failure>;
    /// Marks an error as a bad input (exit 2).
    fn input(self, what: impl Display) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Tag<T> for Result<T, E> {
    fn output(self, what: impl Display) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: EXIT_IO, error: e.into().context(what.to_string()) })
    }

    fn input(self, what: impl Display) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: EXIT_INPUT, error: e.into().context(what.to_string()) })
    }
}

pub fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).input(format!("cannot read {}", path.display()))
}

/// Writes a file through `body`, tagging any failure as an output error.
pub fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> Result<(), Failure> {
    let what = || format!("cannot write {}", path.display());
    let file = File::create(path).output(what())?;
    let mut out = BufWriter::new(file);
    body(&mut out).output(what())?;
    out.flush().output(what())
}
