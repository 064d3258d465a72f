//! Sweep execution.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::output::{ArtifactWriter, LinePlot, Manifest, Table};
use crate::params::schema;
use crate::scenarios::{columns, evaluate, plot_columns, summary};

/// Environment variable capping the worker count.
pub const WORKERS_ENV: &str = "BATHFORGE_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointError {
    pub point: usize,
    pub params: Vec<(String, f64)>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub table: Table,
    pub errors: Vec<PointError>,
    pub points: usize,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.errors.is_empty() {
            crate::error::EXIT_OK
        } else {
            crate::error::EXIT_NUMERIC
        }
    }
}

pub fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Pool(e.to_string()))
}

#[derive(Serialize)]
struct Summary<'a> {
    kind: &'a str,
    seed: Option<u64>,
    points: usize,
    failed: usize,
    records: Vec<(&'static str, f64)>,
}

/// Runs the sweep and writes `<kind>.csv`, `summary.json`, `errors.json`
/// when any point failed, an optional SVG plot and `manifest.json`.
///
/// Points run concurrently; rows are written in grid order. Point `i` of a
/// randomized scenario uses seed `seed + i`.
pub fn run(config: &ScenarioConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let base = config.base_params()?;
    let specs = schema(config.kind);
    let axes: Vec<&str> = config.sweep.iter().map(|a| a.name.as_str()).collect();
    let grid = config.grid();
    let seed = config.seed.unwrap_or(0);

    let pool = worker_pool()?;
    let results: Vec<_> = pool.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(i, point)| {
                let p = axes.iter().zip(point).fold(base.clone(), |p, (n, v)| p.with(n, *v));
                evaluate(config.kind, &p, seed.wrapping_add(i as u64))
            })
            .collect()
    });

    let unit = |name: &str| specs.iter().find(|s| s.name == name).map_or("-", |s| s.unit);
    let out_cols = columns(config.kind);
    let mut table = Table::new(axes.iter().map(|a| (*a, unit(a))).chain(out_cols.iter().copied()));
    let mut errors = Vec::new();
    for (i, (point, result)) in grid.iter().zip(results).enumerate() {
        match result {
            Ok(rows) => table.rows.extend(rows.into_iter().map(|r| point.iter().copied().chain(r).collect())),
            Err(e) => {
                table.rows.push(point.iter().copied().chain(out_cols.iter().map(|_| f64::NAN)).collect());
                errors.push(PointError {
                    point: i,
                    params: axes.iter().map(|a| a.to_string()).zip(point.iter().copied()).collect(),
                    error: e.to_string(),
                });
            }
        }
    }

    let mut writer = ArtifactWriter::create(&config.output_dir)?;
    let name = config.kind.name();
    writer.table(&format!("{name}.csv"), &table)?;
    let swept: Vec<String> = axes.iter().map(|a| a.to_string()).collect();
    let records = summary(config.kind, &base, &swept).unwrap_or_default();
    writer.json(
        "summary.json",
        &Summary { kind: name, seed: config.seed, points: grid.len(), failed: errors.len(), records },
    )?;
    if !errors.is_empty() {
        writer.json("errors.json", &errors)?;
    }
    if config.plot {
        writer.plot(&format!("{name}.svg"), &plot_for(config, &table))?;
    }
    let manifest = writer.finish(config.hash())?;
    Ok(RunOutcome { manifest, table, errors, points: grid.len() })
}

fn plot_for(config: &ScenarioConfig, table: &Table) -> LinePlot {
    let (x_name, log_x) = match config.kind {
        crate::config::ScenarioKind::Diagnose => ("omega", false),
        _ => match config.sweep.first() {
            Some(a) => (a.name.as_str(), a.scale == crate::config::Scale::Log),
            None => ("", false),
        },
    };
    let x = table.column(x_name).unwrap_or_else(|| (0..table.rows.len()).map(|i| i as f64).collect());
    let mut plot =
        LinePlot::new(config.kind.name(), if x_name.is_empty() { "point" } else { x_name }, "value").log(log_x, false);
    for col in plot_columns(config.kind) {
        if let Some(y) = table.column(col) {
            plot = plot.series(col, &x, &y);
        }
    }
    plot
}
