use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use tripsim_core::ingest::{read_trips_jsonl, write_trips_jsonl};
use tripsim_core::Trip;

use crate::error::{CliError, CliResult};

pub fn read_trips(path: &Path) -> CliResult<Vec<Trip>> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(read_trips_jsonl(BufReader::new(f))?)
}

/// Meters as kilometers with 3 decimals.
pub fn km(m: f64) -> String {
    format!("{:.3}", m / 1000.0)
}

/// Seconds rounded to an integer.
pub fn secs(s: f64) -> String {
    format!("{}", s.round() as i64)
}

pub fn real(x: f64) -> String {
    format!("{x:.6}")
}

/// Output directory that remembers which files it wrote.
pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(OutDir { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn file(&mut self, name: &str) -> CliResult<BufWriter<File>> {
        let p = self.dir.join(name);
        let f = File::create(&p).map_err(|e| CliError::io(&p, e))?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(self.file(name)?);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| CliError::io(self.dir.join(name), e))?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(self.dir.join(name), e))
    }

    pub fn trips(&mut self, name: &str, trips: &[Trip]) -> CliResult<()> {
        let w = self.file(name)?;
        write_trips_jsonl(w, trips)?;
        Ok(())
    }
}
