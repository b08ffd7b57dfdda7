use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const RESULT_CSV_HEADER: [&str; 9] = [
    "location_index",
    "rx_x_m",
    "rx_y_m",
    "rx_z_m",
    "method",
    "quality_db",
    "relative_loss_db",
    "evaluation_count",
    "state_digest",
];

/// One method evaluated at one receiver location. `state_digest` is the
/// [`StateMatrix`](crate::controller::StateMatrix) digest, empty for
/// results without a discrete state (perfect beamforming).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub location_index: usize,
    pub rx_x_m: f64,
    pub rx_y_m: f64,
    pub rx_z_m: f64,
    pub method: String,
    pub quality_db: f64,
    pub relative_loss_db: f64,
    pub evaluation_count: u64,
    pub state_digest: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn push(&mut self, row: ResultRow) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows of one method, in insertion order.
    pub fn method<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.method == name)
    }

    /// Method names in order of first appearance.
    pub fn methods(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method.clone());
            }
        }
        out
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if self.rows.is_empty() {
            w.write_record(RESULT_CSV_HEADER)?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != RESULT_CSV_HEADER {
            return Err(Error::Parse {
                path: "<csv>".into(),
                message: format!("unexpected header {header:?}"),
            });
        }
        let rows = r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn emit_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(f)
    }

    /// Wide layout for plotting: one line per location, one quality column
    /// per method.
    pub fn plot_data(&self) -> SideTable {
        let methods = self.methods();
        let mut header = vec!["location_index".to_string(), "rx_x_m".into(), "rx_y_m".into(), "rx_z_m".into()];
        header.extend(methods.iter().map(|m| format!("{m}_db")));
        let mut by_loc: BTreeMap<usize, (&ResultRow, Vec<Option<f64>>)> = BTreeMap::new();
        for r in &self.rows {
            let col = methods.iter().position(|m| *m == r.method).expect("collected above");
            let entry = by_loc
                .entry(r.location_index)
                .or_insert_with(|| (r, vec![None; methods.len()]));
            entry.1[col] = Some(r.quality_db);
        }
        let rows = by_loc
            .into_iter()
            .map(|(i, (r, q))| {
                let mut line = vec![i.to_string(), r.rx_x_m.to_string(), r.rx_y_m.to_string(), r.rx_z_m.to_string()];
                line.extend(q.into_iter().map(|v| v.map_or(String::new(), |v| v.to_string())));
                line
            })
            .collect();
        SideTable { name: "plot_data".into(), header, rows }
    }
}

/// A plain CSV table written next to the results.
#[derive(Debug, Clone, PartialEq)]
pub struct SideTable {
    /// File stem.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SideTable {
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn emit_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub name: String,
    pub table: ResultTable,
    /// Extra tables (histograms, traces, grids).
    pub side: Vec<SideTable>,
    pub warnings: Vec<String>,
}

impl ExperimentOutput {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            table: ResultTable::default(),
            side: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn side(&self, name: &str) -> Option<&SideTable> {
        self.side.iter().find(|s| s.name == name)
    }
}

/// Record of one run: what was asked, with which seed, by which build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub arguments: BTreeMap<String, String>,
    /// The configuration with defaults filled in.
    pub config: Option<serde_json::Value>,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: None,
            arguments: BTreeMap::new(),
            config: None,
            outputs: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn with_config(mut self, cfg: &super::ScenarioConfig) -> Self {
        self.seed = Some(cfg.seed);
        self.config = Some(serde_json::to_value(cfg).expect("config serializes"));
        self
    }

    pub fn arg(mut self, key: &str, value: impl ToString) -> Self {
        self.arguments.insert(key.into(), value.to_string());
        self
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Writes `results.csv`, `plot_data.csv`, every side table and
/// `manifest.json` into `dir`, creating it if needed. Returns the paths
/// written.
pub fn write_outputs(dir: impl AsRef<Path>, out: &ExperimentOutput, manifest: RunManifest) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let results = dir.join("results.csv");
    out.table.emit_csv(&results)?;
    written.push(results);
    let mut tables = vec![out.table.plot_data()];
    tables.extend(out.side.iter().cloned());
    for t in &tables {
        let p = dir.join(format!("{}.csv", t.name));
        t.emit_csv(&p)?;
        written.push(p);
    }
    let mut manifest = manifest;
    manifest.outputs = written
        .iter()
        .map(|p| p.file_name().expect("file").to_string_lossy().into_owned())
        .collect();
    manifest.warnings.extend(out.warnings.iter().cloned());
    let mp = dir.join("manifest.json");
    manifest.write(&mp)?;
    written.push(mp);
    Ok(written)
}
