use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Failure;

/// Environment variable naming the root under which default run
/// directories are created.
pub const OUT_ENV: &str = "NLSLAB_OUT";

pub fn default_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from)
}

/// Shortest representation that reads back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A run directory that is only ever added to: it must be new or empty, and
/// every file is created exclusively.
pub struct RunDir {
    root: PathBuf,
    written: Vec<String>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        if root.exists() {
            let mut entries = fs::read_dir(root).map_err(|e| Failure::io(root.display(), e))?;
            if entries.next().is_some() {
                return Err(Failure::config(format!(
                    "refusing to write into non-empty run directory {}",
                    root.display()
                )));
            }
        }
        fs::create_dir_all(root).map_err(|e| Failure::io(root.display(), e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Names of the files written so far, in order.
    pub fn files(&self) -> &[String] {
        &self.written
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>, Failure> {
        let path = self.root.join(name);
        let file = File::create_new(&path).map_err(|e| Failure::io(path.display(), e))?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), Failure>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.root.join(name);
        let io = |e: csv::Error| Failure::Io(format!("{}: {e}", path.display()));
        let mut writer = csv::Writer::from_writer(self.open(name)?);
        writer.write_record(header).map_err(io)?;
        for row in rows {
            writer.write_record(&row).map_err(io)?;
        }
        writer.flush().map_err(|e| Failure::io(path.display(), e))
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(value).expect("reports serialize");
        self.text(name, &(text + "\n"))
    }

    pub fn text(&mut self, name: &str, content: &str) -> Result<(), Failure> {
        let path = self.root.join(name);
        let mut file = self.open(name)?;
        file.write_all(content.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| Failure::io(path.display(), e))
    }
}
