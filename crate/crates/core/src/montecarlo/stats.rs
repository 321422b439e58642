use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A per-realization quantity that is aggregated over the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Area,
    BoundaryLength,
    Euler,
    Holes,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [
        Statistic::Area,
        Statistic::BoundaryLength,
        Statistic::Euler,
        Statistic::Holes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Area => "area",
            Statistic::BoundaryLength => "boundary_length",
            Statistic::Euler => "euler",
            Statistic::Holes => "holes",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown statistic {s:?}")))
    }
}

/// Mean, extremes and sample standard deviation of a list of values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
    pub n: usize,
}

impl Summary {
    /// Summary of `xs`, summed in the given order. The mean is clamped into
    /// `[min, max]` against rounding, and constant data has zero spread.
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if n == 0 {
            return Summary {
                mean: f64::NAN,
                min,
                max,
                std: f64::NAN,
                n,
            };
        }
        let mean = (xs.iter().sum::<f64>() / n as f64).clamp(min, max);
        let std = if n < 2 || min == max {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Summary { mean, min, max, std, n }
    }

    /// Standard error of the mean.
    pub fn sem(&self) -> f64 {
        self.std / (self.n as f64).sqrt()
    }
}

/// One line of an experiment table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub r: f64,
    pub statistic: Statistic,
    pub summary: Summary,
}

impl AggregateRow {
    pub fn new(r: f64, statistic: Statistic, summary: Summary) -> Self {
        AggregateRow { r, statistic, summary }
    }
}

pub const AGGREGATE_HEADER: &str = "r,statistic,mean,min,max,std,N";

/// Writes rows as CSV with header `r,statistic,mean,min,max,std,N`.
/// Numbers use the shortest representation that reads back exactly.
pub fn write_aggregate_csv(rows: &[AggregateRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "{AGGREGATE_HEADER}")?;
    for row in rows {
        let s = row.summary;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.r, row.statistic, s.mean, s.min, s.max, s.std, s.n
        )?;
    }
    Ok(())
}

/// Parses the output of [`write_aggregate_csv`].
pub fn read_aggregate_csv(text: &str) -> Result<Vec<AggregateRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == AGGREGATE_HEADER => {}
        _ => return Err(Error::domain(format!("expected header {AGGREGATE_HEADER:?}"))),
    }
    let mut rows = Vec::new();
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::domain(format!("line {}: {what}", no + 1));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(bad("expected 7 fields"));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
        rows.push(AggregateRow {
            r: num(f[0])?,
            statistic: f[1].trim().parse().map_err(|_| bad("unknown statistic"))?,
            summary: Summary {
                mean: num(f[2])?,
                min: num(f[3])?,
                max: num(f[4])?,
                std: num(f[5])?,
                n: f[6].trim().parse().map_err(|_| bad("bad count"))?,
            },
        });
    }
    Ok(rows)
}
