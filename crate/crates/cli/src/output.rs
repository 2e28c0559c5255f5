use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Where reports go: files in a directory (written atomically) or stdout.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Sink { dir })
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Writes `name` inside the output directory, or prints it to stdout.
    pub fn emit(&self, name: &str, contents: &[u8]) -> Result<()> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(name), contents),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(contents)?;
                out.flush()?;
                Ok(())
            }
        }
    }

    /// Like [`Sink::emit`] but skipped entirely without an output directory.
    pub fn emit_file(&self, name: &str, contents: &[u8]) -> Result<()> {
        if self.dir.is_some() {
            self.emit(name, contents)?;
        }
        Ok(())
    }
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn header_lines(header: &[(String, String)]) -> String {
    header.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
}
