//! Tables, plots and the artifact manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Numeric table with a single `#` header row of `name[unit]` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>, U: Into<String>>(columns: impl IntoIterator<Item = (S, U)>) -> Self {
        Table { columns: columns.into_iter().map(|(s, u)| (s.into(), u.into())).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c.0 == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# ");
        let header: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n}[{u}]")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v:.12e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub files: Vec<FileEntry>,
}

/// Collects every file written under one output directory.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    files: Vec<FileEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

impl ArtifactWriter {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(io_err(root))?;
        Ok(ArtifactWriter { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn record(&mut self, name: &str, bytes: &[u8]) {
        self.files.retain(|f| f.path != name);
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        std::fs::write(&path, bytes).map_err(io_err(&path))?;
        self.record(name, bytes);
        Ok(path)
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<PathBuf, CliError> {
        self.write(name, table.to_csv().as_bytes())
    }

    pub fn json<V: Serialize>(&mut self, name: &str, value: &V) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn plot(&mut self, name: &str, plot: &LinePlot) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        plot.render(&path)?;
        let bytes = std::fs::read(&path).map_err(io_err(&path))?;
        self.record(name, &bytes);
        Ok(path)
    }

    /// Writes `manifest.json` listing every recorded file, sorted by path.
    pub fn finish(mut self, config_sha256: String) -> Result<Manifest, CliError> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest { config_sha256, files: self.files };
        let path = self.root.join(MANIFEST_NAME);
        let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
        text.push('\n');
        std::fs::write(&path, text).map_err(io_err(&path))?;
        Ok(manifest)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
    pub log_x: bool,
    pub log_y: bool,
    /// Vertical marker lines.
    pub markers: Vec<(String, f64)>,
}

impl LinePlot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            log_x: false,
            log_y: false,
            markers: Vec::new(),
        }
    }

    pub fn series(mut self, name: &str, x: &[f64], y: &[f64]) -> Self {
        self.series.push((name.into(), x.iter().copied().zip(y.iter().copied()).collect()));
        self
    }

    pub fn log(mut self, x: bool, y: bool) -> Self {
        self.log_x = x;
        self.log_y = y;
        self
    }

    pub fn marker(mut self, name: &str, x: f64) -> Self {
        self.markers.push((name.into(), x));
        self
    }

    /// Axes on a log scale are drawn as `log10` of the data.
    fn transformed(&self) -> Vec<(String, Vec<(f64, f64)>)> {
        let map = |v: f64, log: bool| {
            if log {
                if v > 0.0 {
                    v.log10()
                } else {
                    f64::NAN
                }
            } else {
                v
            }
        };
        self.series
            .iter()
            .map(|(n, pts)| {
                let pts = pts
                    .iter()
                    .map(|&(x, y)| (map(x, self.log_x), map(y, self.log_y)))
                    .filter(|(x, y)| x.is_finite() && y.is_finite())
                    .collect();
                (n.clone(), pts)
            })
            .collect()
    }

    fn render(&self, path: &Path) -> Result<(), CliError> {
        let fail = |e: String| CliError::Plot { path: path.to_path_buf(), message: e };
        let series = self.transformed();
        let all = series.iter().flat_map(|s| s.1.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            (x0, x1, y0, y1) = (x0.min(x), x1.max(x), y0.min(y), y1.max(y));
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |a: f64, b: f64| if b > a { 0.05 * (b - a) } else { 0.5 * a.abs().max(1.0) };
        let (px, py) = (pad(x0, x1), pad(y0, y1));
        let label = |s: &str, log: bool| if log { format!("log10 {s}") } else { s.to_string() };

        let root = SVGBackend::new(path, (800, 520)).into_drawing_area();
        root.fill(&WHITE).map_err(|e| fail(e.to_string()))?;
        let mut chart = ChartBuilder::on(&root)
            .caption(&self.title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(44)
            .y_label_area_size(70)
            .build_cartesian_2d((x0 - px)..(x1 + px), (y0 - py)..(y1 + py))
            .map_err(|e| fail(e.to_string()))?;
        chart
            .configure_mesh()
            .x_desc(label(&self.x_label, self.log_x))
            .y_desc(label(&self.y_label, self.log_y))
            .draw()
            .map_err(|e| fail(e.to_string()))?;
        for (i, (name, pts)) in series.into_iter().enumerate() {
            let color = Palette99::pick(i).to_rgba();
            chart
                .draw_series(LineSeries::new(pts, color.stroke_width(2)))
                .map_err(|e| fail(e.to_string()))?
                .label(name)
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        for (name, x) in &self.markers {
            let x = if self.log_x { x.log10() } else { *x };
            chart
                .draw_series(LineSeries::new(vec![(x, y0 - py), (x, y1 + py)], BLACK.stroke_width(1)))
                .map_err(|e| fail(e.to_string()))?
                .label(name.clone())
                .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], BLACK));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(|e| fail(e.to_string()))?;
        root.present().map_err(|e| fail(e.to_string()))?;
        Ok(())
    }
}
