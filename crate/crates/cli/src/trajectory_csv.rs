//! Trajectory CSV: columns `t,alpha,beta,x,y,phi`, 17 significant digits so
//! that every value survives a write/read round trip bit-for-bit.

use std::io::{Read, Write};

use carbundle::{Configuration, Sample, Trajectory};
use serde::Deserialize;

pub const HEADER: [&str; 6] = ["t", "alpha", "beta", "x", "y", "phi"];

#[derive(Debug, Deserialize)]
struct Row {
    t: f64,
    alpha: f64,
    beta: f64,
    x: f64,
    y: f64,
    phi: f64,
}

#[derive(Debug)]
pub enum CsvError {
    Csv(csv::Error),
    BadHeader(Vec<String>),
    NonMonotonicTime,
    Empty,
}

impl std::fmt::Display for CsvError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CsvError::Csv(e) => write!(f, "{e}"),
            CsvError::BadHeader(h) => write!(f, "unexpected header {h:?}, expected {HEADER:?}"),
            CsvError::NonMonotonicTime => write!(f, "time column is not strictly increasing"),
            CsvError::Empty => write!(f, "no data rows"),
        }
    }
}

impl std::error::Error for CsvError {}

impl From<csv::Error> for CsvError {
    fn from(e: csv::Error) -> Self {
        CsvError::Csv(e)
    }
}

fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_samples<'a, W, I>(writer: W, samples: I) -> Result<(), csv::Error>
where
    W: Write,
    I: IntoIterator<Item = &'a Sample>,
{
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for s in samples {
        let c = s.config.to_array();
        w.write_record(std::iter::once(s.t).chain(c).map(format_value))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory<W: Write>(writer: W, trajectory: &Trajectory) -> Result<(), csv::Error> {
    write_samples(writer, trajectory.samples())
}

pub fn read_trajectory<R: Read>(reader: R) -> Result<Trajectory, CsvError> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != HEADER {
        return Err(CsvError::BadHeader(header));
    }
    let mut samples = Vec::new();
    for row in r.deserialize() {
        let row: Row = row?;
        samples.push(Sample {
            t: row.t,
            config: Configuration::new(row.alpha, row.beta, row.x, row.y, row.phi),
        });
    }
    if samples.is_empty() {
        return Err(CsvError::Empty);
    }
    Trajectory::from_samples(samples).ok_or(CsvError::NonMonotonicTime)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_keep_seventeen_significant_digits() {
        assert_eq!(format_value(0.1), "1.0000000000000001e-1");
        assert_eq!(format_value(-2.5), "-2.5000000000000000e0");
        for v in [std::f64::consts::PI, 1e-300, -7.0 / 3.0, 0.0] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn header_is_checked() {
        let err = read_trajectory("t,a,b,x,y,phi\n0,0,0,0,0,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CsvError::BadHeader(_)));
    }
}
