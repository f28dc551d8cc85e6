use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::pipeline::{ConvergenceRow, Level, WeylOutcome};
use super::scenario::Scenario;
use crate::bounds::BoundReport;
use crate::error::{Result, SpectraError};
use crate::geometry::{Chart, GeometricConstants};

/// Fixed 17-significant-digit float formatting for CSV files.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn csv_error(e: csv::Error) -> SpectraError {
    SpectraError::Io(e.to_string())
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| SpectraError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Tracks the files written for a run and produces its MANIFEST.
pub struct OutputDir {
    pub path: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(path: PathBuf) -> Result<Self> {
        fs::create_dir_all(&path)?;
        Ok(OutputDir {
            path,
            files: Vec::new(),
        })
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn file(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.path.join(name)
    }

    pub fn eigenvalues(&mut self, levels: &[Level]) -> Result<()> {
        let rows = levels.iter().flat_map(|l| {
            l.result
                .eigenvalues
                .iter()
                .zip(&l.result.residuals)
                .enumerate()
                .map(move |(i, (v, r))| {
                    vec![
                        l.resolution.to_string(),
                        (i + 1).to_string(),
                        fmt_float(*v),
                        fmt_float(*r),
                    ]
                })
        });
        let path = self.file("eigenvalues.csv");
        write_csv(&path, &["resolution", "k", "lambda", "residual"], rows)
    }

    pub fn convergence(&mut self, rows: &[ConvergenceRow]) -> Result<()> {
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        let records = rows.iter().map(|r| {
            vec![
                r.index.to_string(),
                r.resolution.to_string(),
                fmt_float(r.h_max),
                fmt_float(r.value),
                fmt_float(r.extrapolated),
                fmt_float(r.order),
                opt(r.target),
                opt(r.relative_error()),
            ]
        });
        let path = self.file("convergence.csv");
        write_csv(
            &path,
            &[
                "index",
                "resolution",
                "h_max",
                "value",
                "extrapolated",
                "order",
                "target",
                "relative_error",
            ],
            records,
        )
    }

    pub fn constants(&mut self, scenario: &Scenario, chart: &Chart, constants: &GeometricConstants) -> Result<()> {
        #[derive(Serialize)]
        struct Provenance<'a> {
            scenario: &'a str,
            chart: &'a str,
            eta: String,
            tensor: String,
            generator: String,
            upsilon_shift: f64,
            constants: &'a GeometricConstants,
        }
        let value = Provenance {
            scenario: &scenario.name,
            chart: chart.immersion.id(),
            eta: chart.eta.describe(),
            tensor: chart.tensor.describe(),
            generator: format!("spectra-core {}", env!("CARGO_PKG_VERSION")),
            upsilon_shift: constants.upsilon_shift(),
            constants,
        };
        let path = self.file("constants.json");
        write_json(&path, &value)
    }

    /// Evaluated reports go to bounds.csv, the rest to bounds_skipped.csv.
    pub fn bounds(&mut self, reports: &[BoundReport]) -> Result<()> {
        let evaluated = reports.iter().filter(|r| r.is_evaluated()).map(|r| {
            vec![
                r.name.clone(),
                r.k.to_string(),
                fmt_float(r.lhs),
                fmt_float(r.rhs),
                fmt_float(r.ratio),
                r.holds.to_string(),
                fmt_float(r.slack),
            ]
        });
        let path = self.file("bounds.csv");
        write_csv(
            &path,
            &["name", "k", "lhs", "rhs", "ratio", "holds", "slack"],
            evaluated,
        )?;
        let skipped = reports.iter().filter(|r| !r.is_evaluated()).map(|r| {
            let status = serde_json::to_value(r.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            vec![r.name.clone(), r.k.to_string(), status, r.note.clone()]
        });
        let path = self.file("bounds_skipped.csv");
        write_csv(&path, &["name", "k", "status", "note"], skipped)
    }

    pub fn weyl(&mut self, weyl: &WeylOutcome) -> Result<()> {
        let path = self.file("weyl_fit.json");
        write_json(&path, weyl)
    }

    /// Writes MANIFEST listing the files and whether the run completed.
    pub fn manifest(&self, scenario: &str, error: Option<&SpectraError>) -> Result<()> {
        let mut text = format!("scenario {scenario}\n");
        match error {
            None => text.push_str("status complete\n"),
            Some(e) => text.push_str(&format!("status incomplete\nerror {e}\n")),
        }
        for f in &self.files {
            text.push_str(&format!("file {f}\n"));
        }
        fs::write(self.path.join("MANIFEST"), text)?;
        Ok(())
    }
}
