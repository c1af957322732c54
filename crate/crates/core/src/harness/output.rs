use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::experiments::{ClipRow, ComparisonCell, ExperimentResult, PredictionRow};
use crate::error::{Error, Result};

pub const COMPARISON_COLUMNS: [&str; 9] = [
    "instance",
    "strategy",
    "T",
    "variance",
    "mean_estimate",
    "mean_regret",
    "regret_q05",
    "regret_q50",
    "regret_q95",
];

pub const CLIP_COLUMNS: [&str; 6] = ["instance", "alpha", "empirical_q95", "predicted", "ratio", "valid"];

pub const PREDICTION_COLUMNS: [&str; 6] = ["instance", "alpha", "t_lower", "t_upper", "t_clip", "valid"];

// 17 significant digits round-trips every f64.
fn real(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn table<W: Write, R>(
    out: W,
    header: &[&str],
    rows: &[R],
    fields: impl Fn(&R) -> Vec<String>,
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(fields(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_comparison_csv<W: Write>(out: W, cells: &[ComparisonCell]) -> Result<()> {
    table(out, &COMPARISON_COLUMNS, cells, |c| {
        vec![
            c.instance.clone(),
            c.strategy.clone(),
            c.horizon.to_string(),
            real(c.variance),
            real(c.mean_estimate),
            real(c.mean_regret),
            real(c.regret_q05),
            real(c.regret_q50),
            real(c.regret_q95),
        ]
    })?;
    Ok(())
}

pub fn write_clip_csv<W: Write>(out: W, rows: &[ClipRow]) -> Result<()> {
    table(out, &CLIP_COLUMNS, rows, |r| {
        vec![
            r.instance.clone(),
            real(r.alpha),
            real(r.empirical_q95),
            real(r.predicted),
            real(r.ratio),
            r.valid.to_string(),
        ]
    })?;
    Ok(())
}

pub fn write_prediction_csv<W: Write>(out: W, rows: &[PredictionRow]) -> Result<()> {
    table(out, &PREDICTION_COLUMNS, rows, |r| {
        vec![
            r.instance.clone(),
            real(r.alpha),
            real(r.t_lower),
            real(r.t_upper),
            real(r.t_clip),
            r.valid.to_string(),
        ]
    })?;
    Ok(())
}

/// Writes `comparison.csv` and `clip.csv` into `dir`, creating it if needed.
/// Returns the paths written.
pub fn emit_csv(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let comparison = dir.join("comparison.csv");
    let clip = dir.join("clip.csv");
    let f = fs::File::create(&comparison).map_err(io_err(&comparison))?;
    write_comparison_csv(std::io::BufWriter::new(f), &result.cells)?;
    let f = fs::File::create(&clip).map_err(io_err(&clip))?;
    write_clip_csv(std::io::BufWriter::new(f), &result.clip_rows)?;
    Ok(vec![comparison, clip])
}
