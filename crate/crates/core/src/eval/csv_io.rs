use std::io::{Read, Write};

use super::experiment::{MetricsRow, Outcome};
use super::segstudy::{RangeRow, SegStudyRow};
use crate::error::{Error, Result};

const METRICS_HEADER: [&str; 13] = [
    "scenario",
    "area",
    "method",
    "m",
    "seed",
    "outcome",
    "subareas",
    "mean_error",
    "median_error",
    "max_error",
    "hit_rate",
    "candidates_mean",
    "errors",
];

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("csv: {other:?}")),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_HEADER).map_err(csv_err)?;
    for r in rows {
        let errors: Vec<String> = r.errors.iter().map(f64::to_string).collect();
        w.write_record([
            r.scenario.clone(),
            r.area.clone(),
            r.method.clone(),
            r.m.to_string(),
            r.seed.to_string(),
            r.outcome.to_string(),
            r.subareas.to_string(),
            opt(r.mean_error),
            opt(r.median_error),
            opt(r.max_error),
            opt(r.hit_rate),
            opt(r.candidates_mean),
            errors.join(";"),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics_csv<R: Read>(input: R) -> Result<Vec<MetricsRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers().map_err(csv_err)?.clone();
    if headers.iter().ne(METRICS_HEADER.iter().copied()) {
        return Err(Error::invalid("metrics csv has an unexpected header"));
    }
    let mut rows = Vec::new();
    for (n, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = n + 2;
        let bad = |col: &str| Error::Parse {
            line,
            column: METRICS_HEADER.iter().position(|h| *h == col).map_or(0, |i| i + 1),
            message: format!("bad value in column `{col}`"),
        };
        let get = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<Option<f64>> {
            let s = get(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(METRICS_HEADER[i]))
            }
        };
        let errors = if get(12).is_empty() {
            Vec::new()
        } else {
            get(12)
                .split(';')
                .map(|s| s.parse::<f64>().map_err(|_| bad("errors")))
                .collect::<Result<_>>()?
        };
        rows.push(MetricsRow {
            scenario: get(0).to_string(),
            area: get(1).to_string(),
            method: get(2).to_string(),
            m: get(3).parse().map_err(|_| bad("m"))?,
            seed: get(4).parse().map_err(|_| bad("seed"))?,
            outcome: get(5).parse::<Outcome>().map_err(|_| bad("outcome"))?,
            subareas: get(6).parse().map_err(|_| bad("subareas"))?,
            mean_error: num(7)?,
            median_error: num(8)?,
            max_error: num(9)?,
            hit_rate: num(10)?,
            candidates_mean: num(11)?,
            errors,
        });
    }
    Ok(rows)
}

pub fn write_segstudy_csv<W: Write>(rows: &[SegStudyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "seed", "sigma", "outcome", "subareas", "iterations", "attempts"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.seed.to_string(),
            r.sigma.to_string(),
            if r.success { "success" } else { "failure" }.to_string(),
            r.subareas.to_string(),
            r.iterations.to_string(),
            r.attempts.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ranges_csv<W: Write>(rows: &[RangeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "seed", "subarea", "beacon", "lo", "hi"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.seed.to_string(),
            r.subarea.clone(),
            r.beacon.clone(),
            opt(r.lo),
            opt(r.hi),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
