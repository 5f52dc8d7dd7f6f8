//! CSV and JSON writers for trajectories, sweeps and contours.
//!
//! CSV numbers use `.` as decimal separator and 17 significant digits, which
//! round-trips every `f64`. Missing values are written as empty cells.

use std::io::{self, Write};

use serde::Serialize;

use crate::channels::TrajectoryRow;
use crate::correlations::ChiMode;
use crate::phase_diagram::{ContourPoint, SweepRow};

pub const TOOL_NAME: &str = "qdiscord";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const TRAJECTORY_COLUMNS: [&str; 12] = [
    "t", "delta", "sigma_phi", "sigma_psi", "regime", "mutual_info", "classical", "discord", "f2_av",
    "f2_min", "f2_max", "concurrence",
];

pub const SWEEP_COLUMNS: [&str; 10] = [
    "sigma_phi", "delta", "physical", "regime", "discord", "classical", "concurrence", "f2_av", "f2_min",
    "f2_max",
];

pub const CONTOUR_COLUMNS: [&str; 3] = ["level", "delta", "sigma_phi"];

/// 17 significant digits in scientific notation.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn write_trajectory_csv<W: Write>(rows: &[TrajectoryRow], w: &mut W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_COLUMNS)?;
    for r in rows {
        out.write_record([
            format_f64(r.t),
            format_f64(r.delta),
            format_f64(r.sigma_phi),
            format_f64(r.sigma_psi),
            r.regime.as_str().to_string(),
            format_f64(r.mutual_info),
            format_f64(r.classical),
            format_f64(r.discord),
            opt(r.f2_av),
            opt(r.f2_min),
            opt(r.f2_max),
            format_f64(r.concurrence),
        ])?;
    }
    out.flush()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: &mut W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        out.write_record([
            format_f64(r.sigma_phi),
            format_f64(r.delta),
            r.physical.to_string(),
            r.regime.map(|g| g.as_str().to_string()).unwrap_or_default(),
            opt(r.discord),
            opt(r.classical),
            opt(r.concurrence),
            opt(r.f2_av),
            opt(r.f2_min),
            opt(r.f2_max),
        ])?;
    }
    out.flush()
}

pub fn write_contours_csv<W: Write>(points: &[ContourPoint], w: &mut W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CONTOUR_COLUMNS)?;
    for p in points {
        out.write_record([format_f64(p.level), format_f64(p.delta), format_f64(p.sigma_phi)])?;
    }
    out.flush()
}

/// Metadata wrapper around every JSON output.
#[derive(Debug, Serialize)]
pub struct JsonEnvelope<'a, C: Serialize, D: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub chi_mode: ChiMode,
    pub config: &'a C,
    pub data: &'a D,
}

impl<'a, C: Serialize, D: Serialize> JsonEnvelope<'a, C, D> {
    pub fn new(command: &'a str, chi_mode: ChiMode, config: &'a C, data: &'a D) -> Self {
        JsonEnvelope { tool: TOOL_NAME, version: TOOL_VERSION, command, chi_mode, config, data }
    }
}

pub fn write_json<W: Write, T: Serialize>(value: &T, w: &mut W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::other)?;
    writeln!(w)
}
