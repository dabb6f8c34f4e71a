//! Long-format CSV reports. Floats are written with 17 significant digits
//! so that reading a report back reproduces every value exactly.

use crate::error::Result;
use crate::eval::BenchRecord;
use crate::metrics::MetricId;
use crate::synth::{ExperimentKind, SweepAggregate, SweepCell, SweepResult};

use super::ParseError;

const SWEEP_HEADER: [&str; 5] = ["experiment", "metric", "level", "trial", "value"];
const AGGREGATE_HEADER: [&str; 7] = ["experiment", "metric", "level", "count", "mean", "std", "normalized"];
const BENCH_HEADER: [&str; 5] = ["metric", "n", "d", "repeats", "wall_time"];

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

fn write_rows(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn encode_sweep_csv(r: &SweepResult) -> String {
    write_rows(
        &SWEEP_HEADER,
        r.cells.iter().map(|c| {
            vec![
                r.experiment.to_string(),
                c.metric.to_string(),
                format_f64(c.level),
                c.trial.to_string(),
                opt(c.value),
            ]
        }),
    )
}

pub fn encode_aggregate_csv(r: &SweepResult) -> String {
    write_rows(
        &AGGREGATE_HEADER,
        r.aggregates.iter().map(|a| {
            vec![
                r.experiment.to_string(),
                a.metric.to_string(),
                format_f64(a.level),
                a.count.to_string(),
                opt(a.mean),
                opt(a.std),
                opt(a.normalized),
            ]
        }),
    )
}

pub fn encode_bench_csv(records: &[BenchRecord]) -> String {
    write_rows(
        &BENCH_HEADER,
        records.iter().map(|b| {
            vec![
                b.metric_id.to_string(),
                b.n.to_string(),
                b.d.to_string(),
                b.repeats.to_string(),
                format_f64(b.wall_time),
            ]
        }),
    )
}

/// Rows after the header, with the header checked against `expected`.
fn read_rows(bytes: &[u8], expected: &[&str]) -> std::result::Result<Vec<(u64, csv::StringRecord)>, ParseError> {
    let table = |line: u64, message: String| ParseError::Table { line, message };
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = rd.headers().map_err(|e| table(1, e.to_string()))?.clone();
    if header.iter().ne(expected.iter().copied()) {
        return Err(table(1, format!("header must be {}", expected.join(","))));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| table(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != expected.len() {
            return Err(table(line, format!("expected {} fields, found {}", expected.len(), rec.len())));
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, line: u64, i: usize, name: &str) -> std::result::Result<T, ParseError> {
    rec[i].parse().map_err(|_| ParseError::Table {
        line,
        message: format!("bad {name} '{}'", &rec[i]),
    })
}

fn opt_field(rec: &csv::StringRecord, line: u64, i: usize, name: &str) -> std::result::Result<Option<f64>, ParseError> {
    if rec[i].is_empty() {
        Ok(None)
    } else {
        field(rec, line, i, name).map(Some)
    }
}

fn experiment_of(rows: &[(u64, csv::StringRecord)]) -> Result<ExperimentKind> {
    let (line, first) = rows.first().ok_or(ParseError::Empty)?;
    let kind: ExperimentKind = first[0].parse()?;
    if let Some((l, _)) = rows.iter().find(|(_, r)| r[0] != first[0]) {
        return Err(ParseError::Table {
            line: *l,
            message: format!("mixed experiments (first row at line {line} is {kind})"),
        }
        .into());
    }
    Ok(kind)
}

fn push_unique<T: PartialEq + Copy>(xs: &mut Vec<T>, v: T) {
    if !xs.contains(&v) {
        xs.push(v);
    }
}

/// Rebuild a sweep from its long-format cells. Grid and metric order follow
/// first appearance; aggregates are recomputed.
pub fn parse_sweep_csv(bytes: &[u8]) -> Result<SweepResult> {
    let rows = read_rows(bytes, &SWEEP_HEADER)?;
    let experiment = experiment_of(&rows)?;
    let mut levels = Vec::new();
    let mut metrics = Vec::new();
    let mut cells = Vec::with_capacity(rows.len());
    for (line, rec) in &rows {
        let metric: MetricId = rec[1].parse()?;
        let level: f64 = field(rec, *line, 2, "level")?;
        if !level.is_finite() {
            return Err(ParseError::Table { line: *line, message: "non-finite level".into() }.into());
        }
        let value = opt_field(rec, *line, 4, "value")?;
        push_unique(&mut metrics, metric);
        push_unique(&mut levels, level);
        cells.push(SweepCell {
            metric,
            level,
            trial: field(rec, *line, 3, "trial")?,
            value,
            error: None,
        });
    }
    SweepResult::from_cells(experiment, levels, metrics, cells)
}

pub fn parse_aggregate_csv(bytes: &[u8]) -> Result<(ExperimentKind, Vec<SweepAggregate>)> {
    let rows = read_rows(bytes, &AGGREGATE_HEADER)?;
    let experiment = experiment_of(&rows)?;
    let aggregates = rows
        .iter()
        .map(|(line, rec)| {
            Ok(SweepAggregate {
                metric: rec[1].parse()?,
                level: field(rec, *line, 2, "level")?,
                count: field(rec, *line, 3, "count")?,
                mean: opt_field(rec, *line, 4, "mean")?,
                std: opt_field(rec, *line, 5, "std")?,
                normalized: opt_field(rec, *line, 6, "normalized")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((experiment, aggregates))
}

pub fn parse_bench_csv(bytes: &[u8]) -> Result<Vec<BenchRecord>> {
    read_rows(bytes, &BENCH_HEADER)?
        .iter()
        .map(|(line, rec)| {
            Ok(BenchRecord {
                metric_id: rec[0].parse::<MetricId>()?,
                n: field(rec, *line, 1, "n")?,
                d: field(rec, *line, 2, "d")?,
                repeats: field(rec, *line, 3, "repeats")?,
                wall_time: field(rec, *line, 4, "wall_time")?,
            })
        })
        .collect()
}
