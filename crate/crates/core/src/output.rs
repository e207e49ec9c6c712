//! Result files: `timeseries.csv`, `summary.txt`, `convergence.csv` and a
//! gnuplot script.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::runner::{Summary, TimeSeriesRecord};
use crate::tuning::TuneReport;

pub const TIMESERIES_HEADER: &str =
    "t,delta_f_hz,p_wind_kw,p_diesel_kw,p_load_kw,p_reserve_kw,u_pi";

#[derive(Serialize, Deserialize)]
struct Row {
    t: f64,
    delta_f_hz: f64,
    p_wind_kw: f64,
    p_diesel_kw: f64,
    p_load_kw: f64,
    p_reserve_kw: f64,
    u_pi: f64,
}

impl From<&TimeSeriesRecord> for Row {
    fn from(r: &TimeSeriesRecord) -> Self {
        Row {
            t: r.t,
            delta_f_hz: r.delta_f_hz,
            p_wind_kw: r.p_wind_kw,
            p_diesel_kw: r.p_diesel_kw,
            p_load_kw: r.p_load_kw,
            p_reserve_kw: r.p_reserve_kw,
            u_pi: r.u_pi,
        }
    }
}

impl From<Row> for TimeSeriesRecord {
    fn from(r: Row) -> Self {
        TimeSeriesRecord {
            t: r.t,
            delta_f_hz: r.delta_f_hz,
            p_wind_kw: r.p_wind_kw,
            p_diesel_kw: r.p_diesel_kw,
            p_load_kw: r.p_load_kw,
            p_reserve_kw: r.p_reserve_kw,
            u_pi: r.u_pi,
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Writes records as CSV. Values use the shortest representation that
/// parses back to the same `f64`.
pub fn write_timeseries(path: impl AsRef<Path>, records: &[TimeSeriesRecord]) -> Result<()> {
    // the header is written by hand so an empty series still gets one
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_error)?;
    w.write_record(TIMESERIES_HEADER.split(','))
        .map_err(csv_error)?;
    for r in records {
        w.serialize(Row::from(r)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_timeseries(path: impl AsRef<Path>) -> Result<Vec<TimeSeriesRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let header = r
        .headers()
        .map_err(csv_error)?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != TIMESERIES_HEADER {
        return Err(Error::Parse(format!("unexpected header `{header}`")));
    }
    r.deserialize::<Row>()
        .map(|row| row.map(TimeSeriesRecord::from).map_err(csv_error))
        .collect()
}

pub fn format_summary(summary: &Summary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", summary.scenario);
    let _ = writeln!(s, "dt_s: {}", summary.dt);
    let _ = writeln!(s, "t_end_s: {}", summary.t_end);
    let _ = writeln!(s, "steps: {}", summary.steps);
    let _ = writeln!(s, "ise: {:.6e}", summary.ise);
    let _ = writeln!(s, "max_abs_delta_f_hz: {:.6}", summary.max_abs_delta_f_hz);
    let _ = writeln!(s, "steady_window_s: {}", summary.steady_window);
    for (i, seg) in summary.segments.iter().enumerate() {
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "[segment {i}] {} s to {} s, load {} kW",
            seg.start, seg.end, seg.load_kw
        );
        let g = seg.gains;
        let _ = writeln!(s, "  gains: kp = {}, ki = {}, r = {}", g.kp, g.ki, g.r);
        let _ = writeln!(s, "  steady_p_wind_kw: {:.3}", seg.steady_p_wind_kw);
        let _ = writeln!(s, "  steady_p_diesel_kw: {:.3}", seg.steady_p_diesel_kw);
        let _ = writeln!(s, "  steady_p_reserve_kw: {:.3}", seg.steady_p_reserve_kw);
        let _ = writeln!(s, "  steady_delta_f_hz: {:.6}", seg.steady_delta_f_hz);
        let _ = writeln!(s, "  max_abs_delta_f_hz: {:.6}", seg.max_abs_delta_f_hz);
        let _ = writeln!(
            s,
            "  final_abs_delta_f_hz: {:.3e}",
            seg.final_abs_delta_f_hz
        );
    }
    s
}

pub fn format_tune_report(report: &TuneReport, seed: u64) -> String {
    let mut s = String::new();
    let g = report.gains;
    let _ = writeln!(s, "seed: {seed}");
    let _ = writeln!(s, "iterations: {}", report.trace.len());
    let _ = writeln!(s, "evaluations: {}", report.evaluations);
    let _ = writeln!(s, "discarded: {}", report.discarded);
    let _ = writeln!(
        s,
        "best: kp = {:.6}, ki = {:.6}, r = {:.6}",
        g.kp, g.ki, g.r
    );
    let _ = writeln!(s, "best_ise: {:.6e}", report.best_cost);
    for (g, cost) in &report.references {
        let _ = writeln!(
            s,
            "reference kp = {}, ki = {}, r = {}: ise {:.6e}",
            g.kp, g.ki, g.r, cost
        );
    }
    s
}

pub fn write_convergence(path: impl AsRef<Path>, trace: &[f64]) -> Result<()> {
    let mut s = String::from("iteration,best_cost\n");
    for (i, c) in trace.iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, c);
    }
    fs::write(path, s)?;
    Ok(())
}

/// Gnuplot script plotting `timeseries.csv` from the same directory.
pub fn plot_script() -> &'static str {
    r#"set datafile separator ","
set key autotitle columnhead
set terminal pngcairo size 900,900
set output "timeseries.png"
set multiplot layout 3,1
set xlabel "t (s)"
set ylabel "delta f (Hz)"
plot "timeseries.csv" using 1:2 with lines
set ylabel "power (kW)"
plot "timeseries.csv" using 1:3 with lines, "" using 1:5 with lines, "" using 1:6 with lines
plot "timeseries.csv" using 1:4 with lines
unset multiplot
"#
}

/// Writes the simulation outputs into `dir`, creating it if needed.
pub fn write_simulation(
    dir: impl AsRef<Path>,
    records: &[TimeSeriesRecord],
    summary: &Summary,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let paths = [
        dir.join("timeseries.csv"),
        dir.join("summary.txt"),
        dir.join("plot.gp"),
    ];
    write_timeseries(&paths[0], records)?;
    fs::write(&paths[1], format_summary(summary))?;
    fs::write(&paths[2], plot_script())?;
    Ok(paths.to_vec())
}
