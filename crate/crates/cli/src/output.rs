use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::Format;

pub const OUT_DIR_ENV: &str = "BJSS_OUT_DIR";

/// Resolves a relative path against `$BJSS_OUT_DIR` when it is set.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            let p = resolve(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            Box::new(File::create(p)?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_rows<T: Serialize>(rows: &[T], format: Format, w: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            for row in rows {
                csv.serialize(row)?;
            }
            csv.flush()
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, rows)?;
            writeln!(w)
        }
    }
}
