//! Profile CSV input, output sinks and provenance headers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use kplane::{Grid, Params, Profile};
use serde_json::{json, Value};

use crate::Failure;

/// Grid resolution and extent shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub n: usize,
    pub rmax: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<Grid>, Failure> {
        Ok(Arc::new(Grid::new(self.n, self.rmax)?))
    }

    fn rmax_json(&self) -> Value {
        if self.rmax.is_finite() { json!(self.rmax) } else { json!("inf") }
    }
}

/// What produced an output file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Provenance {
    pub params: Option<Params>,
    pub seed: Option<u64>,
    pub grid: Option<GridSpec>,
}

impl Provenance {
    pub fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("kplane {}", kplane::VERSION)];
        lines.push(match self.params {
            Some(p) => format!("params k={} d={} p={} q={}", p.k, p.d, p.p, p.q),
            None => "params none".into(),
        });
        lines.push(match self.seed {
            Some(s) => format!("seed {s}"),
            None => "seed none".into(),
        });
        lines.push(match self.grid {
            Some(g) => format!("grid n={} rmax={}", g.n, g.rmax),
            None => "grid none".into(),
        });
        lines
    }

    pub fn json(&self) -> Value {
        json!({
            "version": kplane::VERSION,
            "k": self.params.map(|p| p.k),
            "d": self.params.map(|p| p.d),
            "seed": self.seed,
            "grid_n": self.grid.map(|g| g.n),
            "rmax": self.grid.map(|g| g.rmax_json()),
        })
    }
}

/// A file, or standard output when no path is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub fn write_profile(path: Option<&Path>, profile: &Profile, prov: &Provenance) -> Result<(), Failure> {
    let mut out = sink(path)?;
    profile.write_csv(&mut out, &prov.comment_lines()).map_err(Failure::io)?;
    out.flush().map_err(Failure::io)
}

pub fn write_json(path: Option<&Path>, value: &Value) -> Result<(), Failure> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out).map_err(Failure::io)?;
    out.flush().map_err(Failure::io)
}

/// Reads a two-column `r,value` CSV (header row required, `#` comments
/// allowed) and resamples it onto `grid`.
pub fn read_profile(path: &PathBuf, grid: Arc<Grid>) -> Result<Profile, Failure> {
    let bad = |msg: String| Failure::Usage(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.len() != 2 {
        return Err(bad(format!("expected a header row with 2 columns, found {}", header.len())));
    }
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| -> Result<f64, Failure> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("row {}: '{raw}' is not a finite number", line + 1)))
        };
        radii.push(field(0)?);
        values.push(field(1)?);
    }
    if radii.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Profile::from_samples(grid, &radii, &values).map_err(|e| bad(e.to_string()))
}
