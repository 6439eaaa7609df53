use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::run::TrialRecord;
use super::summary::AggregateRow;
use crate::error::{Error, Result};

/// Column order of per-trial files.
pub const TRIAL_HEADER: [&str; 13] = [
    "algo", "d", "m", "s", "h", "sigma", "trial", "seed", "err_l1", "err_l2", "sup_err", "queries",
    "wall_ms",
];

/// Column order of aggregate files.
pub const AGGREGATE_HEADER: [&str; 16] = [
    "algo",
    "profile",
    "d",
    "m",
    "s",
    "h",
    "sigma",
    "trials",
    "failures",
    "mean_l1",
    "median_l1",
    "mean_l2",
    "median_l2",
    "mean_sup",
    "success_rate",
    "mean_queries",
];

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn write_rows<W: Write, const N: usize>(
    w: W,
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<()> {
    let mut out = writer(w);
    out.write_record(header).map_err(csv_err)?;
    for row in rows {
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

struct Fields<'a> {
    record: &'a csv::StringRecord,
    line: u64,
    next: usize,
}

impl Fields<'_> {
    fn take<T: FromStr>(&mut self) -> Result<T>
    where
        T::Err: Display,
    {
        let i = self.next;
        self.next += 1;
        let raw = self.record.get(i).unwrap_or_default();
        raw.parse().map_err(|e| Error::Parse {
            line: self.line,
            message: format!("column {}: cannot parse '{raw}': {e}", i + 1),
        })
    }
}

fn read_rows<R: Read, T, const N: usize>(
    r: R,
    header: [&str; N],
    mut parse: impl FnMut(&mut Fields) -> Result<T>,
) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(r);
    let mut records = reader.records();
    match records.next() {
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing header".into(),
            })
        }
        Some(first) => {
            let first = first.map_err(csv_err)?;
            if first.iter().ne(header.iter().copied()) {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header '{}'", header.join(",")),
                });
            }
        }
    }
    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != N {
            return Err(Error::Parse {
                line,
                message: format!("expected {N} fields, found {}", rec.len()),
            });
        }
        out.push(parse(&mut Fields {
            record: &rec,
            line,
            next: 0,
        })?);
    }
    Ok(out)
}

/// Shortest round-trip form, with an exponent for very small or large
/// magnitudes.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn trial_fields(r: &TrialRecord) -> [String; 13] {
    [
        r.algo.to_string(),
        r.d.to_string(),
        r.m.to_string(),
        r.s.to_string(),
        num(r.h),
        num(r.sigma),
        r.trial.to_string(),
        r.seed.to_string(),
        num(r.err_l1),
        num(r.err_l2),
        num(r.sup_err),
        r.queries.to_string(),
        num(r.wall_ms),
    ]
}

fn aggregate_fields(r: &AggregateRow) -> [String; 16] {
    [
        r.algo.to_string(),
        r.profile.clone(),
        r.d.to_string(),
        r.m.to_string(),
        r.s.to_string(),
        num(r.h),
        num(r.sigma),
        r.trials.to_string(),
        r.failures.to_string(),
        num(r.mean_l1),
        num(r.median_l1),
        num(r.mean_l2),
        num(r.median_l2),
        num(r.mean_sup),
        num(r.success_rate),
        num(r.mean_queries),
    ]
}

pub fn write_trials<W: Write>(w: W, records: &[TrialRecord]) -> Result<()> {
    write_rows(w, TRIAL_HEADER, records.iter().map(trial_fields))
}

pub fn read_trials<R: Read>(r: R) -> Result<Vec<TrialRecord>> {
    read_rows(r, TRIAL_HEADER, |f| {
        Ok(TrialRecord {
            algo: f.take()?,
            d: f.take()?,
            m: f.take()?,
            s: f.take()?,
            h: f.take()?,
            sigma: f.take()?,
            trial: f.take()?,
            seed: f.take()?,
            err_l1: f.take()?,
            err_l2: f.take()?,
            sup_err: f.take()?,
            queries: f.take()?,
            wall_ms: f.take()?,
        })
    })
}

pub fn write_aggregate<W: Write>(w: W, rows: &[AggregateRow]) -> Result<()> {
    write_rows(w, AGGREGATE_HEADER, rows.iter().map(aggregate_fields))
}

pub fn read_aggregate<R: Read>(r: R) -> Result<Vec<AggregateRow>> {
    read_rows(r, AGGREGATE_HEADER, |f| {
        Ok(AggregateRow {
            algo: f.take()?,
            profile: f.take()?,
            d: f.take()?,
            m: f.take()?,
            s: f.take()?,
            h: f.take()?,
            sigma: f.take()?,
            trials: f.take()?,
            failures: f.take()?,
            mean_l1: f.take()?,
            median_l1: f.take()?,
            mean_l2: f.take()?,
            median_l2: f.take()?,
            mean_sup: f.take()?,
            success_rate: f.take()?,
            mean_queries: f.take()?,
        })
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_trials_file(path: &Path, records: &[TrialRecord]) -> Result<()> {
    write_trials(create(path)?, records)
}

pub fn read_trials_file(path: &Path) -> Result<Vec<TrialRecord>> {
    read_trials(File::open(path)?)
}

pub fn write_aggregate_file(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    write_aggregate(create(path)?, rows)
}

pub fn read_aggregate_file(path: &Path) -> Result<Vec<AggregateRow>> {
    read_aggregate(File::open(path)?)
}
