//! Seeded Monte Carlo ensembles of dilated Brownian paths.
//!
//! Realization `i` draws its path from [`derive_stream`]`(base_seed, i)`, so
//! any single realization can be replayed in isolation. Realizations run in
//! parallel but every reduction consumes them in index order, which makes
//! the output independent of the number of worker threads.

mod stats;
mod stream;

pub use stats::{read_aggregate_csv, write_aggregate_csv, AggregateRow, Statistic, Summary};
pub use stream::{derive_stream, Stream};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::{haar_schauder_path, sample_increment_path, subsample_path, Polyline, MAX_HAAR_LEVEL};
use crate::error::{Error, Result};
use crate::geometry::{hausdorff_polyline, measure_path, Measurement};
use crate::point::Point;

/// How realization paths are produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Generator {
    /// Gaussian increments on `k` equal time steps.
    Increments,
    /// Haar–Schauder partial sum of the given level on `[0, 1]`, rescaled to the horizon.
    HaarSchauder { level: u32 },
    /// Deterministic straight segment from the origin to `(length, 0)` with
    /// `k` equal steps; consumes no randomness.
    Segment { length: f64 },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Increments => write!(f, "increments"),
            Generator::HaarSchauder { level } => write!(f, "haar:{level}"),
            Generator::Segment { length } => write!(f, "segment:{length}"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::config("generator", format!("{m} (got {s:?})"));
        match s.split_once(':') {
            None if s == "increments" => Ok(Generator::Increments),
            Some(("haar", level)) => level
                .parse()
                .map(|level| Generator::HaarSchauder { level })
                .map_err(|_| bad("haar level must be an integer")),
            Some(("segment", len)) => len
                .parse()
                .map(|length| Generator::Segment { length })
                .map_err(|_| bad("segment length must be a number")),
            _ => Err(bad("expected increments, haar:LEVEL or segment:LENGTH")),
        }
    }
}

/// Monte Carlo design.
///
/// The pixel size for radius `r` is `resolution * r` unless `pixel_size` fixes
/// it for all radii; the band half-width is `delta` pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Step counts; the largest one is simulated, smaller ones are
    /// subsampled from it in convergence studies.
    #[serde(rename = "k")]
    pub steps: Vec<usize>,
    pub radii: Vec<f64>,
    #[serde(rename = "N")]
    pub realizations: u64,
    pub resolution: f64,
    pub delta: f64,
    pub pixel_size: Option<f64>,
    #[serde(rename = "seed")]
    pub base_seed: u64,
    pub generator: Generator,
}

impl Default for ExperimentConfig {
    /// Desk-scale preset: unit horizon, 4096 steps, 200 realizations.
    fn default() -> Self {
        ExperimentConfig {
            horizon: 1.0,
            steps: vec![4096],
            radii: vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0],
            realizations: 200,
            resolution: 1.0 / 128.0,
            delta: 8.0,
            pixel_size: None,
            base_seed: 1,
            generator: Generator::Increments,
        }
    }
}

impl ExperimentConfig {
    /// The full-scale design: horizon 10^6, 10^5 steps, 1000 realizations,
    /// radii 20 to 1900.
    pub fn full_scale() -> Self {
        ExperimentConfig {
            horizon: 1e6,
            steps: vec![100_000],
            radii: (1..=95).map(|i| 20.0 * i as f64).collect(),
            realizations: 1000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::config("T", format!("must be a positive number, got {}", self.horizon)));
        }
        if self.steps.is_empty() || self.steps.contains(&0) {
            return Err(Error::config("k", "needs at least one step count, all >= 1"));
        }
        if !self.steps.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::config("k", "step counts must be strictly increasing"));
        }
        if self.radii.is_empty() || !self.radii.iter().all(|&r| r > 0.0 && r.is_finite()) {
            return Err(Error::config("radii", "needs at least one radius, all positive and finite"));
        }
        if !self.radii.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::config("radii", "radii must be strictly increasing"));
        }
        if self.realizations == 0 {
            return Err(Error::config("N", "must be at least 1"));
        }
        if !(self.resolution > 0.0) || !self.resolution.is_finite() {
            return Err(Error::config("resolution", format!("must be positive, got {}", self.resolution)));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::config("delta", format!("must be positive, got {}", self.delta)));
        }
        if let Some(a) = self.pixel_size {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::config("pixel_size", format!("must be positive, got {a}")));
            }
        }
        for &r in &self.radii {
            if self.pixel(r) * self.delta >= r {
                return Err(Error::config("delta", format!("band half-width reaches zero at r = {r}")));
            }
        }
        match self.generator {
            Generator::HaarSchauder { level } => {
                if level > MAX_HAAR_LEVEL {
                    return Err(Error::config("generator", format!("haar level at most {MAX_HAAR_LEVEL}")));
                }
                let fine = 1usize << level;
                if let Some(&k) = self.steps.iter().find(|&&k| fine % k != 0) {
                    return Err(Error::config("k", format!("{k} does not divide 2^{level}")));
                }
            }
            Generator::Segment { length } if !(length >= 0.0) || !length.is_finite() => {
                return Err(Error::config("generator", "segment length must be finite and >= 0"));
            }
            _ => {
                let fine = self.fine_steps();
                if let Some(&k) = self.steps.iter().find(|&&k| fine % k != 0) {
                    return Err(Error::config("k", format!("{k} does not divide the finest step count {fine}")));
                }
            }
        }
        Ok(())
    }

    /// Step count of the simulated path.
    pub fn fine_steps(&self) -> usize {
        match self.generator {
            Generator::HaarSchauder { level } => 1 << level,
            _ => self.steps.iter().copied().max().unwrap_or(1),
        }
    }

    /// Pixel size used at radius `r`.
    pub fn pixel(&self, r: f64) -> f64 {
        self.pixel_size.unwrap_or(self.resolution * r)
    }

    /// The path of realization `index` at the finest step count.
    pub fn path(&self, index: u64) -> Result<Polyline> {
        let k = self.fine_steps();
        let t = self.horizon;
        match self.generator {
            Generator::Increments => sample_increment_path(k, t, &mut derive_stream(self.base_seed, index)),
            Generator::HaarSchauder { level } => {
                haar_schauder_path(level, &mut derive_stream(self.base_seed, index))?.rescaled(t)
            }
            Generator::Segment { length } => Polyline::new(
                (0..=k).map(|i| Point::new(length * i as f64 / k as f64, 0.0)).collect(),
                (0..=k).map(|i| t * i as f64 / k as f64).collect(),
            ),
        }
    }

    /// Measurements of `path` at every configured radius, in radius order.
    pub fn measure(&self, index: u64, path: &Polyline) -> Result<Vec<Sample>> {
        let wrap = |r: f64| move |e: Error| Error::Realization {
            index,
            radius: r,
            source: Box::new(e),
        };
        let ms: Vec<Measurement> = match self.pixel_size {
            Some(a) => measure_path(path, a, &self.radii, self.delta * a).map_err(wrap(self.radii[0]))?,
            None => self
                .radii
                .iter()
                .map(|&r| {
                    let a = self.pixel(r);
                    measure_path(path, a, &[r], self.delta * a)
                        .map(|v| v[0])
                        .map_err(wrap(r))
                })
                .collect::<Result<_>>()?,
        };
        Ok(ms.iter().map(Sample::from).collect())
    }
}

/// Measured quantities of one realization at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub area: f64,
    pub boundary_length: f64,
    pub euler: i64,
    pub holes: usize,
    pub foreground: usize,
}

impl From<&Measurement> for Sample {
    fn from(m: &Measurement) -> Self {
        Sample {
            area: m.volumes.area,
            boundary_length: m.volumes.boundary_length,
            euler: m.volumes.euler,
            holes: m.components.holes,
            foreground: m.components.foreground,
        }
    }
}

impl Sample {
    pub fn get(&self, s: Statistic) -> f64 {
        match s {
            Statistic::Area => self.area,
            Statistic::BoundaryLength => self.boundary_length,
            Statistic::Euler => self.euler as f64,
            Statistic::Holes => self.holes as f64,
        }
    }
}

/// Per-realization samples, `samples[i][j]` for realization `i` and radius `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub radii: Vec<f64>,
    pub samples: Vec<Vec<Sample>>,
}

impl Ensemble {
    /// Aggregates for every radius and statistic, radius-major.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut rows = Vec::new();
        for (j, &r) in self.radii.iter().enumerate() {
            for s in Statistic::ALL {
                let xs: Vec<f64> = self.samples.iter().map(|v| v[j].get(s)).collect();
                rows.push(AggregateRow::new(r, s, Summary::of(&xs)));
            }
        }
        rows
    }
}

fn ensemble<T: Send>(n: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n).into_par_iter().map(f).collect()
}

/// Simulates all realizations of `cfg` and returns their samples.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Ensemble> {
    cfg.validate()?;
    let samples = ensemble(cfg.realizations, |i| cfg.measure(i, &cfg.path(i)?))?;
    Ok(Ensemble {
        radii: cfg.radii.clone(),
        samples,
    })
}

/// Mean, min, max and standard deviation of every statistic at every radius.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<AggregateRow>> {
    Ok(simulate(cfg)?.aggregate())
}

/// Coupled refinement study: every realization simulates one path at the
/// finest step count and measures it subsampled to each configured `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub steps: Vec<usize>,
    pub radii: Vec<f64>,
    /// `samples[i][m][j]`: realization `i`, step count `steps[m]`, radius `radii[j]`.
    pub samples: Vec<Vec<Vec<Sample>>>,
    /// `hausdorff[i][m]`: distance from the subsampled to the finest polyline.
    pub hausdorff: Vec<Vec<f64>>,
}

/// One line of a convergence table; `r` is `None` for the Hausdorff distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub k: usize,
    pub r: Option<f64>,
    pub statistic: &'static str,
    pub summary: Summary,
}

impl ConvergenceStudy {
    pub fn rows(&self) -> Vec<ConvergenceRow> {
        let mut rows = Vec::new();
        for (m, &k) in self.steps.iter().enumerate() {
            for (j, &r) in self.radii.iter().enumerate() {
                for s in Statistic::ALL {
                    let xs: Vec<f64> = self.samples.iter().map(|v| v[m][j].get(s)).collect();
                    rows.push(ConvergenceRow {
                        k,
                        r: Some(r),
                        statistic: s.name(),
                        summary: Summary::of(&xs),
                    });
                }
            }
            let hs: Vec<f64> = self.hausdorff.iter().map(|v| v[m]).collect();
            rows.push(ConvergenceRow {
                k,
                r: None,
                statistic: "hausdorff",
                summary: Summary::of(&hs),
            });
        }
        rows
    }

    /// Median over realizations of `|x(steps[m]) - x(finest)|` at radius index `j`.
    pub fn median_gap(&self, s: Statistic, m: usize, j: usize) -> f64 {
        let last = self.steps.len() - 1;
        let mut gaps: Vec<f64> = self
            .samples
            .iter()
            .map(|v| (v[m][j].get(s) - v[last][j].get(s)).abs())
            .collect();
        median(&mut gaps)
    }

    /// CSV with header `k,r,statistic,mean,min,max,std,N`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,r,statistic,mean,min,max,std,N\n");
        for row in self.rows() {
            let s = row.summary;
            let r = row.r.map_or(String::new(), |r| r.to_string());
            out += &format!(
                "{},{},{},{},{},{},{},{}\n",
                row.k, r, row.statistic, s.mean, s.min, s.max, s.std, s.n
            );
        }
        out
    }
}

pub(crate) fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn convergence_study(cfg: &ExperimentConfig) -> Result<ConvergenceStudy> {
    cfg.validate()?;
    if cfg.steps.len() < 2 {
        return Err(Error::config("k", "a convergence study needs at least two step counts"));
    }
    let fine_k = cfg.fine_steps();
    let per: Vec<(Vec<Vec<Sample>>, Vec<f64>)> = ensemble(cfg.realizations, |i| {
        let fine = cfg.path(i)?;
        let mut samples = Vec::new();
        let mut hd = Vec::new();
        for &k in &cfg.steps {
            let coarse = subsample_path(&fine, fine_k / k)?;
            samples.push(cfg.measure(i, &coarse)?);
            hd.push(if k == fine_k { 0.0 } else { hausdorff_polyline(&coarse, &fine) });
        }
        Ok((samples, hd))
    })?;
    let (samples, hausdorff) = per.into_iter().unzip();
    Ok(ConvergenceStudy {
        steps: cfg.steps.clone(),
        radii: cfg.radii.clone(),
        samples,
        hausdorff,
    })
}

/// Hole and Euler aggregates with the realizations that break `euler = 1 - holes`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleReport {
    pub rows: Vec<AggregateRow>,
    /// `(realization, radius)` pairs whose foreground is not a single component.
    pub disconnected: Vec<(u64, f64)>,
}

pub fn hole_statistics(cfg: &ExperimentConfig) -> Result<HoleReport> {
    let e = simulate(cfg)?;
    let rows = e
        .aggregate()
        .into_iter()
        .filter(|row| matches!(row.statistic, Statistic::Holes | Statistic::Euler))
        .collect();
    let mut disconnected = Vec::new();
    for (i, v) in e.samples.iter().enumerate() {
        for (s, &r) in v.iter().zip(&e.radii) {
            if s.foreground != 1 || s.euler != 1 - s.holes as i64 {
                disconnected.push((i as u64, r));
            }
        }
    }
    Ok(HoleReport { rows, disconnected })
}
