//! Batch front end: configuration, orchestration and file output.

mod config;
mod svg;

pub use config::{parse_config, resolve, Overrides, KEYS};
pub use svg::{emit_svg, ChartOptions, LineStyle, Series};

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fitting::{default_init, fit, DataPoint, FitOptions, ModelForm};
use crate::montecarlo::{
    convergence_study, read_aggregate_csv, simulate, write_aggregate_csv, AggregateRow, ExperimentConfig, Statistic,
};
use crate::reference::{expected_area, expected_perimeter, legall_area_asymptote, legall_perimeter_asymptote, QuadratureSpec};

#[derive(Debug, Parser)]
#[command(name = "wiener-sausage", version, about = "Monte Carlo intrinsic volumes of the planar Wiener sausage")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// key = value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// time horizon
    #[arg(long = "T", global = true, allow_hyphen_values = true)]
    pub horizon: Option<String>,
    /// comma-separated step counts
    #[arg(long = "k", global = true, allow_hyphen_values = true)]
    pub steps: Option<String>,
    /// comma-separated radii
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub radii: Option<String>,
    /// number of realizations
    #[arg(long = "N", global = true, allow_hyphen_values = true)]
    pub realizations: Option<String>,
    /// pixel size as a fraction of r
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub resolution: Option<String>,
    /// band half-width in pixels
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// increments, haar:LEVEL or segment:LENGTH
    #[arg(long, global = true)]
    pub generator: Option<String>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// worker threads (results do not depend on it)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate statistics per radius -> aggregate.csv
    Simulate,
    /// Coupled step-count refinement -> convergence.csv, gaps.csv
    Convergence,
    /// Expected area and boundary length by quadrature -> reference.csv
    Reference {
        /// radii, overriding --radii
        #[arg(long = "r", allow_hyphen_values = true)]
        r: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
    },
    /// Fit the parametric curves to an aggregate table -> fit_*.csv, fit_*.json
    Fit {
        /// aggregate CSV (default: OUT/aggregate.csv)
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Line charts of mean, min and max per statistic -> report_*.svg
    Report {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        log_x: bool,
        #[arg(long)]
        log_y: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Convergence => "convergence",
            Command::Reference { .. } => "reference",
            Command::Fit { .. } => "fit",
            Command::Report { .. } => "report",
        }
    }
}

impl CommonArgs {
    pub fn overrides(&self) -> Result<Overrides> {
        let mut o = Overrides::default();
        for (key, v) in [
            ("seed", &self.seed),
            ("T", &self.horizon),
            ("k", &self.steps),
            ("radii", &self.radii),
            ("N", &self.realizations),
            ("resolution", &self.resolution),
            ("delta", &self.delta),
            ("generator", &self.generator),
        ] {
            if let Some(v) = v {
                o.set(key, v)?;
            }
        }
        Ok(o)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Deterministic record of a run. Wall-clock time goes to `timing.json`,
/// which is not part of the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub subcommand: String,
    pub config: ExperimentConfig,
    pub outputs: Vec<OutputEntry>,
    pub timing: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Files of one run, written together with the manifest.
struct Outputs {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.into(), bytes.into()));
    }

    fn write(self, subcommand: &str, cfg: &ExperimentConfig, started: Instant) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(&self.dir)?;
        let mut written = Vec::new();
        let mut outputs = Vec::new();
        let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
            let p = self.dir.join(name);
            std::fs::write(&p, bytes)?;
            written.push(p);
            Ok(())
        };
        let echo = serde_json::to_string_pretty(cfg).expect("config serializes") + "\n";
        let mut files = self.files;
        files.push(("config.json".into(), echo.into_bytes()));
        for (name, bytes) in &files {
            put(name, bytes)?;
            outputs.push(OutputEntry {
                file: name.clone(),
                sha256: sha256_hex(bytes),
                bytes: bytes.len(),
            });
        }
        let manifest = RunManifest {
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            config: cfg.clone(),
            outputs,
            timing: "timing.json".into(),
        };
        put(
            "manifest.json",
            (serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n").as_bytes(),
        )?;
        let timing = serde_json::json!({ "wall_clock_seconds": started.elapsed().as_secs_f64() });
        put("timing.json", (timing.to_string() + "\n").as_bytes())?;
        Ok(written)
    }
}

fn aggregate_text(rows: &[AggregateRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_aggregate_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is ascii"))
}

fn read_table(input: &Option<PathBuf>, out: &Path) -> Result<Vec<AggregateRow>> {
    let path = input.clone().unwrap_or_else(|| out.join("aggregate.csv"));
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_aggregate_csv(&text)
}

/// Mean curve of one statistic in ascending `r`.
pub fn mean_curve(rows: &[AggregateRow], s: Statistic) -> Vec<DataPoint> {
    let mut v: Vec<DataPoint> = rows
        .iter()
        .filter(|r| r.statistic == s)
        .map(|r| DataPoint::new(r.r, r.summary.mean))
        .collect();
    v.sort_by(|a, b| a.r.total_cmp(&b.r));
    v
}

/// Charts of mean (solid), min (dashed) and max (dotted) against `r`, one
/// per statistic present in `rows`.
pub fn report_charts(rows: &[AggregateRow], log_x: bool, log_y: bool) -> Result<Vec<(Statistic, String)>> {
    let mut charts = Vec::new();
    for s in Statistic::ALL {
        let mut sel: Vec<&AggregateRow> = rows.iter().filter(|r| r.statistic == s).collect();
        if sel.is_empty() {
            continue;
        }
        sel.sort_by(|a, b| a.r.total_cmp(&b.r));
        let pick = |f: fn(&AggregateRow) -> f64| sel.iter().map(|r| (r.r, f(r))).collect::<Vec<_>>();
        let series = vec![
            Series::new("mean", pick(|r| r.summary.mean), LineStyle::Solid),
            Series::new("min", pick(|r| r.summary.min), LineStyle::Dashed),
            Series::new("max", pick(|r| r.summary.max), LineStyle::Dotted),
        ];
        let positive = sel.iter().all(|r| r.summary.min > 0.0);
        let opts = ChartOptions {
            title: s.name().replace('_', " "),
            x_label: "r".into(),
            y_label: s.name().into(),
            log_x,
            log_y: log_y && positive,
        };
        charts.push((s, emit_svg(&series, &opts)?));
    }
    if charts.is_empty() {
        return Err(Error::domain("the aggregate table has no rows"));
    }
    Ok(charts)
}

fn reference_csv(radii: &[f64], t: f64, q: &QuadratureSpec) -> Result<String> {
    let mut s = String::from("r,T,area,area_error,perimeter,perimeter_error,legall_area,legall_perimeter\n");
    for &r in radii {
        let a = expected_area(r, t, q)?;
        let p = expected_perimeter(r, t, q)?;
        let la = legall_area_asymptote(r, t).map_or(String::new(), |v| v.to_string());
        let lp = legall_perimeter_asymptote(r, t).map_or(String::new(), |v| v.to_string());
        let _ = writeln!(s, "{r},{t},{},{},{},{},{la},{lp}", a.value, a.error, p.value, p.error);
    }
    Ok(s)
}

/// Executes one subcommand and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let flags = cli.common.overrides()?;
    let mut cfg = parse_config(cli.common.config.as_deref(), &flags)?;
    let mut out = Outputs {
        dir: cli.common.out.clone(),
        files: Vec::new(),
    };
    match &cli.command {
        Command::Simulate => {
            let rows = simulate(&cfg)?.aggregate();
            out.add("aggregate.csv", aggregate_text(&rows)?);
        }
        Command::Convergence => {
            let study = convergence_study(&cfg)?;
            let mut gaps = String::from("k,r,median_area_gap,median_boundary_length_gap\n");
            for (m, &k) in study.steps.iter().enumerate() {
                for (j, &r) in study.radii.iter().enumerate() {
                    let _ = writeln!(
                        gaps,
                        "{k},{r},{},{}",
                        study.median_gap(Statistic::Area, m, j),
                        study.median_gap(Statistic::BoundaryLength, m, j)
                    );
                }
            }
            out.add("convergence.csv", study.to_csv());
            out.add("gaps.csv", gaps);
        }
        Command::Reference { r, rel_tol } => {
            if let Some(r) = r {
                let mut o = Overrides::default();
                o.set("radii", r)?;
                cfg.radii = o.radii.expect("just set");
                cfg.validate()?;
            }
            let q = QuadratureSpec::with_rel_tol(*rel_tol);
            q.validate()?;
            let csv = reference_csv(&cfg.radii, cfg.horizon, &q)?;
            print!("{csv}");
            out.add("reference.csv", csv);
        }
        Command::Fit { input } => {
            let rows = read_table(input, &out.dir)?;
            let mut fitted = 0;
            for (s, form) in [
                (Statistic::Area, ModelForm::Area),
                (Statistic::BoundaryLength, ModelForm::Perimeter),
                (Statistic::Euler, ModelForm::Euler),
            ] {
                let data = mean_curve(&rows, s);
                if data.len() < form.param_count() {
                    eprintln!(
                        "skipping {form} fit: {} radii, need {}",
                        data.len(),
                        form.param_count()
                    );
                    continue;
                }
                let init = default_init(form, &data)?;
                let f = fit(form, &data, &init, &FitOptions::default())?;
                out.add(format!("fit_{form}.csv"), f.parameters_csv());
                out.add(format!("fit_{form}.json"), f.summary_json() + "\n");
                fitted += 1;
            }
            if fitted == 0 {
                return Err(Error::Fit("no statistic has enough radii for its form".into()));
            }
        }
        Command::Report { input, log_x, log_y } => {
            let rows = read_table(input, &out.dir)?;
            for (s, svg) in report_charts(&rows, *log_x, *log_y)? {
                out.add(format!("report_{s}.svg"), svg);
            }
        }
    }
    out.write(cli.command.name(), &cfg, started)
}

/// Exit status for an error: 2 for configuration problems, 3 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => 2,
        _ => 3,
    }
}

/// Parses `args`, runs, and returns the process exit status.
pub fn main_with_args(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.common.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Error::config("threads", e.to_string())),
        },
        None => run(&cli),
    };
    match result {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(dir: &Path, extra: &[&str]) -> Vec<String> {
        let mut v = vec!["wiener-sausage".to_string()];
        v.extend(extra.iter().map(|s| s.to_string()));
        v.push("--out".into());
        v.push(dir.display().to_string());
        v
    }

    #[test]
    fn stub_generator_has_zero_spread() {
        let dir = tempfile::tempdir().unwrap();
        let a = args(
            dir.path(),
            &["simulate", "--generator", "segment:1", "--k", "16", "--N", "3", "--radii", "0.2,0.4", "--resolution", "0.05"],
        );
        assert_eq!(main_with_args(a), 0);
        let rows = read_aggregate_csv(&std::fs::read_to_string(dir.path().join("aggregate.csv")).unwrap()).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.summary.std == 0.0 && r.summary.n == 3));
        let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert!(manifest.contains("aggregate.csv") && manifest.contains("config.json"));
        assert!(!manifest.contains("wall_clock"));
    }

    #[test]
    fn reference_small_horizon() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(main_with_args(args(dir.path(), &["reference", "--r", "1", "--T", "1e-14"])), 0);
        let text = std::fs::read_to_string(dir.path().join("reference.csv")).unwrap();
        let area: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
        assert!((area - std::f64::consts::PI).abs() < 1e-6, "{area}");
    }

    #[test]
    fn report_three_rows() {
        let dir = tempfile::tempdir().unwrap();
        let csv = "r,statistic,mean,min,max,std,N\n0.1,area,1,0.5,1.5,0.2,10\n0.2,area,2,1.5,2.5,0.2,10\n0.4,area,3,2.5,3.5,0.2,10\n";
        let input = dir.path().join("in.csv");
        std::fs::write(&input, csv).unwrap();
        let a = args(dir.path(), &["report", "--input", input.to_str().unwrap()]);
        assert_eq!(main_with_args(a), 0);
        let svg = std::fs::read_to_string(dir.path().join("report_area.svg")).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(!dir.path().join("report_euler.svg").exists());
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(main_with_args(args(dir.path(), &["simulate", "--N", "-4"])), 2);
        assert_eq!(main_with_args(args(dir.path(), &["simulate", "--radii", "0.1,abc"])), 2);
        assert_eq!(main_with_args(args(dir.path(), &["bogus"])), 2);
        let missing = dir.path().join("none.csv");
        assert_eq!(main_with_args(args(dir.path(), &["report", "--input", missing.to_str().unwrap()])), 3);
        let cfg = dir.path().join("c.txt");
        std::fs::write(&cfg, "N = 0\n").unwrap();
        assert_eq!(main_with_args(args(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()])), 2);
    }
}
