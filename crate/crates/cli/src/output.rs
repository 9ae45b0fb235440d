use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde_json::{json, Value};
use torus_renorm::harness::Scenario;
use torus_renorm::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Csv,
    Both,
}

impl Emit {
    fn csv(self) -> bool {
        self != Emit::Json
    }

    fn json(self) -> bool {
        self != Emit::Csv
    }
}

/// Output directory of one scenario run; every file carries the scenario hash.
pub struct RunDir {
    pub path: PathBuf,
    hash: String,
    seed: u64,
    emit: Emit,
}

impl RunDir {
    pub fn create(root: &Path, scn: &Scenario, emit: Emit) -> Result<Self> {
        let path = root.join(scn.short_hash());
        fs::create_dir_all(&path)?;
        let dir = RunDir { path, hash: scn.hash(), seed: scn.seed, emit };
        dir.write_json("scenario.json", serde_json::to_value(scn)?)?;
        Ok(dir)
    }

    /// Writes `{"scenario_hash", "seed", ...body}`.
    pub fn write_json(&self, name: &str, body: Value) -> Result<PathBuf> {
        let mut doc = json!({ "scenario_hash": self.hash, "seed": self.seed });
        match body {
            Value::Object(map) => doc.as_object_mut().expect("object").extend(map),
            other => {
                doc["data"] = other;
            }
        }
        let path = self.path.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        Ok(path)
    }

    /// Writes `stem.csv` and/or `stem.json` according to `--emit`.
    pub fn write_rows<R: serde::Serialize>(&self, stem: &str, rows: &[R]) -> Result<()> {
        if self.emit.csv() {
            let mut file = BufWriter::new(File::create(self.path.join(format!("{stem}.csv")))?);
            let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            writeln!(file, "# scenario_hash: {}", self.hash)?;
            writeln!(file, "# seed: {}", self.seed)?;
            writeln!(file, "# created_unix: {stamp}")?;
            let mut w = csv::Writer::from_writer(file);
            for row in rows {
                w.serialize(row).map_err(csv_error)?;
            }
            w.flush()?;
        }
        if self.emit.json() {
            self.write_json(&format!("{stem}.json"), json!({ "rows": rows }))?;
        }
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> torus_renorm::Error {
    torus_renorm::Error::Io(std::io::Error::other(e))
}
