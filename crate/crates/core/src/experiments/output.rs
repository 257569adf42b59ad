use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{ExperimentError, ExperimentSpec, ResultSet};
use crate::sim::RNG_NAME;

pub const CSV_HEADER: [&str; 9] = [
    "experiment", "strategy", "hops", "cost_std", "instance", "trial", "metric", "value", "seed",
];

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write `<dir>/<kind>.csv`, creating `dir` if needed.
pub fn write_csv(dir: &Path, spec: &ExperimentSpec, set: &ResultSet) -> Result<PathBuf, ExperimentError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let path = dir.join(format!("{}.csv", spec.kind.name()));
    let file = fs::File::create(&path).map_err(io_error(&path))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(CSV_HEADER)?;
    for r in &set.rows {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            r.experiment.clone(),
            r.strategy.clone(),
            r.hops.to_string(),
            r.cost_std.to_string(),
            opt(r.instance),
            opt(r.trial),
            r.metric.clone(),
            r.value.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(io_error(&path))?;
    Ok(path)
}

/// Write `<dir>/<kind>.manifest.txt` describing how the CSV was produced.
pub fn write_manifest(dir: &Path, spec: &ExperimentSpec, set: &ResultSet) -> Result<PathBuf, ExperimentError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let path = dir.join(format!("{}.manifest.txt", spec.kind.name()));
    let mut text = String::new();
    text.push_str(&format!("experiment = {}\n", spec.kind.name()));
    text.push_str(&format!("software = {} {}\n", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")));
    text.push_str(&format!("seed = {}\n", spec.seed));
    text.push_str(&format!("generator = {RNG_NAME}\n"));
    text.push_str(&format!("csv = {}.csv\n", spec.kind.name()));
    text.push_str(&format!("rows = {}\n", set.rows.len()));
    text.push_str(&format!("timeouts = {}\n", set.timeouts));
    text.push_str(&format!("skipped = {}\n", set.skipped.len()));
    for s in &set.skipped {
        text.push_str(&format!("  {s}\n"));
    }
    text.push_str("\n[spec]\n");
    text.push_str(&serde_json::to_string_pretty(spec).expect("spec serializes"));
    text.push('\n');
    let mut file = fs::File::create(&path).map_err(io_error(&path))?;
    file.write_all(text.as_bytes()).map_err(io_error(&path))?;
    Ok(path)
}
