//! CSV writers and readers for traces, event logs, sweep summaries and
//! figure series. All files use `,` separators, `.` decimals and `\n` line
//! endings; metric floats carry six decimals.

use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mobility::MotionTrace;
use crate::simulator::{Event, EventKind, StrategyKind};
use crate::sweep::{FigureRow, MeanRow, SummaryRow};

pub const TRACE_HEADER: [&str; 2] = ["t_s", "velocity_mps"];
pub const EVENT_HEADER: [&str; 7] = [
    "time_s",
    "kind",
    "method",
    "energy_mJ",
    "position_m",
    "velocity_mps",
    "ve_mps",
];
pub const SUMMARY_HEADER: [&str; 8] = [
    "kind",
    "alpha",
    "beta",
    "seed",
    "total_energy_mJ",
    "satisfaction",
    "fix_count",
    "sample_count",
];
pub const MEAN_HEADER: [&str; 8] = [
    "kind",
    "alpha",
    "beta",
    "runs",
    "mean_total_energy_mJ",
    "mean_satisfaction",
    "mean_fix_count",
    "mean_sample_count",
];
pub const FIGURE_HEADER: [&str; 3] = ["beta", "gps_value", "ours_value"];

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

/// At most six decimals, trailing zeros dropped.
fn trimmed(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn map_csv(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(line, format!("{other:?}")),
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn write_table<W, I>(w: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = writer(w);
    out.write_record(header).map_err(map_csv)?;
    for row in rows {
        out.write_record(&row).map_err(map_csv)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads all data records after checking the header matches exactly.
fn read_table<R: Read>(r: R, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let found = rdr.headers().map_err(map_csv)?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::parse(
            1,
            format!(
                "expected header {:?}, found {:?}",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(map_csv)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec));
    }
    Ok(rows)
}

fn field<T: FromStr>(rec: &csv::StringRecord, line: usize, idx: usize, name: &str) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::parse(line, format!("bad {name} value {raw:?}")))
}

fn opt_field<T: FromStr>(
    rec: &csv::StringRecord,
    line: usize,
    idx: usize,
    name: &str,
) -> Result<Option<T>> {
    match rec.get(idx) {
        None | Some("") => Ok(None),
        Some(_) => field(rec, line, idx, name).map(Some),
    }
}

pub fn write_trace<W: Write>(w: W, trace: &MotionTrace) -> Result<()> {
    let rows = trace
        .velocities()
        .iter()
        .enumerate()
        .map(|(t, v)| vec![t.to_string(), trimmed(*v)]);
    write_table(w, &TRACE_HEADER, rows)
}

/// Rows must cover seconds `0, 1, 2, ...` in order.
pub fn read_trace<R: Read>(r: R) -> Result<MotionTrace> {
    let mut velocities = Vec::new();
    for (line, rec) in read_table(r, &TRACE_HEADER)? {
        let t: usize = field(&rec, line, 0, "t_s")?;
        if t != velocities.len() {
            return Err(Error::parse(
                line,
                format!("expected t_s = {}, found {t}", velocities.len()),
            ));
        }
        velocities.push(field::<f64>(&rec, line, 1, "velocity_mps")?);
    }
    MotionTrace::from_velocities(velocities)
}

pub fn write_events<W: Write>(w: W, events: &[Event]) -> Result<()> {
    let rows = events.iter().map(|e| {
        vec![
            f6(e.time_s),
            e.kind.as_str().to_string(),
            e.method.as_ref().map_or(String::new(), |m| m.name.clone()),
            e.energy_mj().map_or(String::new(), f6),
            f6(e.position_m),
            f6(e.velocity_mps),
            f6(e.v_e_mps),
        ]
    });
    write_table(w, &EVENT_HEADER, rows)
}

/// A parsed event-log row.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub time_s: f64,
    pub kind: EventKind,
    pub method: Option<String>,
    pub energy_mj: Option<f64>,
    pub position_m: f64,
    pub velocity_mps: f64,
    pub v_e_mps: f64,
}

pub fn read_events<R: Read>(r: R) -> Result<Vec<EventRecord>> {
    read_table(r, &EVENT_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(EventRecord {
                time_s: field(&rec, line, 0, "time_s")?,
                kind: field(&rec, line, 1, "kind")?,
                method: opt_field(&rec, line, 2, "method")?,
                energy_mj: opt_field(&rec, line, 3, "energy_mJ")?,
                position_m: field(&rec, line, 4, "position_m")?,
                velocity_mps: field(&rec, line, 5, "velocity_mps")?,
                v_e_mps: field(&rec, line, 6, "ve_mps")?,
            })
        })
        .collect()
}

pub fn summary_fields(r: &SummaryRow) -> Vec<String> {
    vec![
        r.kind.to_string(),
        f6(r.alpha),
        f6(r.beta),
        r.seed.to_string(),
        f6(r.total_energy_mj),
        f6(r.satisfaction),
        r.fix_count.to_string(),
        r.sample_count.to_string(),
    ]
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    write_table(w, &SUMMARY_HEADER, rows.iter().map(summary_fields))
}

pub fn read_summary<R: Read>(r: R) -> Result<Vec<SummaryRow>> {
    read_table(r, &SUMMARY_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            let kind: String = field(&rec, line, 0, "kind")?;
            Ok(SummaryRow {
                kind: StrategyKind::from_str(&kind)
                    .map_err(|e| Error::parse(line, e.to_string()))?,
                alpha: field(&rec, line, 1, "alpha")?,
                beta: field(&rec, line, 2, "beta")?,
                seed: field(&rec, line, 3, "seed")?,
                total_energy_mj: field(&rec, line, 4, "total_energy_mJ")?,
                satisfaction: field(&rec, line, 5, "satisfaction")?,
                fix_count: field(&rec, line, 6, "fix_count")?,
                sample_count: field(&rec, line, 7, "sample_count")?,
            })
        })
        .collect()
}

pub fn write_means<W: Write>(w: W, rows: &[MeanRow]) -> Result<()> {
    let rows = rows.iter().map(|m| {
        vec![
            m.kind.to_string(),
            f6(m.alpha),
            f6(m.beta),
            m.runs.to_string(),
            f6(m.total_energy_mj),
            f6(m.satisfaction),
            f6(m.fix_count),
            f6(m.sample_count),
        ]
    });
    write_table(w, &MEAN_HEADER, rows)
}

pub fn write_figure<W: Write>(w: W, rows: &[FigureRow]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|r| vec![f6(r.beta), f6(r.gps_value), f6(r.ours_value)]);
    write_table(w, &FIGURE_HEADER, rows)
}

pub fn read_figure<R: Read>(r: R) -> Result<Vec<FigureRow>> {
    read_table(r, &FIGURE_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(FigureRow {
                beta: field(&rec, line, 0, "beta")?,
                gps_value: field(&rec, line, 1, "gps_value")?,
                ours_value: field(&rec, line, 2, "ours_value")?,
            })
        })
        .collect()
}
