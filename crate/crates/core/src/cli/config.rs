use std::str::FromStr;

use crate::error::{Error, Result};
use crate::montecarlo::{ExperimentConfig, Generator};

/// Optional settings from one source; unset fields fall through to the next.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub horizon: Option<f64>,
    pub steps: Option<Vec<usize>>,
    pub radii: Option<Vec<f64>>,
    pub realizations: Option<u64>,
    pub resolution: Option<f64>,
    pub delta: Option<f64>,
    pub pixel_size: Option<f64>,
    pub seed: Option<u64>,
    pub generator: Option<Generator>,
}

pub const KEYS: [&str; 9] = ["T", "k", "radii", "N", "resolution", "delta", "pixel_size", "seed", "generator"];

fn scalar<T: FromStr>(field: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::config(field, format!("cannot parse {v:?}")))
}

fn list<T: FromStr>(field: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|x| scalar(field, x)).collect()
}

impl Overrides {
    /// Sets `key` from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "T" => self.horizon = Some(scalar(key, value)?),
            "k" => self.steps = Some(list(key, value)?),
            "radii" => self.radii = Some(list(key, value)?),
            "N" => self.realizations = Some(scalar(key, value)?),
            "resolution" => self.resolution = Some(scalar(key, value)?),
            "delta" => self.delta = Some(scalar(key, value)?),
            "pixel_size" => self.pixel_size = Some(scalar(key, value)?),
            "seed" => self.seed = Some(scalar(key, value)?),
            "generator" => self.generator = Some(value.trim().parse()?),
            _ => {
                return Err(Error::config(
                    key,
                    format!("unknown key; expected one of {}", KEYS.join(", ")),
                ))
            }
        }
        Ok(())
    }

    /// Flat `key = value` text; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", n + 1), format!("expected key = value, got {line:?}")))?;
            o.set(k.trim(), v)?;
        }
        Ok(o)
    }

    fn apply(&self, c: &mut ExperimentConfig) {
        macro_rules! take {
            ($src:ident => $dst:ident) => {
                if let Some(v) = &self.$src {
                    c.$dst = v.clone();
                }
            };
        }
        take!(horizon => horizon);
        take!(steps => steps);
        take!(radii => radii);
        take!(realizations => realizations);
        take!(resolution => resolution);
        take!(delta => delta);
        take!(seed => base_seed);
        take!(generator => generator);
        if self.pixel_size.is_some() {
            c.pixel_size = self.pixel_size;
        }
    }
}

/// Defaults, then `file`, then `flags`; the result is validated.
pub fn resolve(file: Option<&Overrides>, flags: &Overrides) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::default();
    if let Some(f) = file {
        f.apply(&mut c);
    }
    flags.apply(&mut c);
    c.validate()?;
    Ok(c)
}

/// Reads the file at `path` (if any) and merges it with `flags`.
pub fn parse_config(path: Option<&std::path::Path>, flags: &Overrides) -> Result<ExperimentConfig> {
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::config("config", format!("{}: {e}", p.display())))?;
            Some(Overrides::parse(&text)?)
        }
        None => None,
    };
    resolve(file.as_ref(), flags)
}
