//! Run configuration: command-line flags layered over an optional
//! `key = value` file layered over built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use tcs_core::dynamics::GaussianSeed;
use tcs_core::model::OscillatorParams;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Usage(format!("unknown format '{other}' (expected csv or json)"))),
        }
    }
}

/// Every setting that may come from a flag or from the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    pub m: Option<f64>,
    pub omega0: Option<f64>,
    pub gamma: Option<f64>,
    pub hbar: Option<f64>,
    pub mu: Option<f64>,
    pub b_re: Option<f64>,
    pub b_im: Option<f64>,
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub oracle: Option<bool>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: cannot parse '{value}' for {key}")))
}

impl Layer {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Blank lines and `#` comments are skipped; keys use the flag names with
    /// either `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut layer = Layer::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let n = i + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {n}: expected key = value")))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "m" => layer.m = Some(parse_value(&key, value, n)?),
                "omega0" => layer.omega0 = Some(parse_value(&key, value, n)?),
                "gamma" => layer.gamma = Some(parse_value(&key, value, n)?),
                "hbar" => layer.hbar = Some(parse_value(&key, value, n)?),
                "mu" => layer.mu = Some(parse_value(&key, value, n)?),
                "b_re" => layer.b_re = Some(parse_value(&key, value, n)?),
                "b_im" => layer.b_im = Some(parse_value(&key, value, n)?),
                "t_max" => layer.t_max = Some(parse_value(&key, value, n)?),
                "samples" => layer.samples = Some(parse_value(&key, value, n)?),
                "out" => layer.out = Some(PathBuf::from(value)),
                "format" => layer.format = Some(value.parse()?),
                "oracle" => layer.oracle = Some(parse_value(&key, value, n)?),
                other => return Err(CliError::Usage(format!("config line {n}: unknown key '{other}'"))),
            }
        }
        Ok(layer)
    }

    fn has_seed(&self) -> bool {
        self.mu.is_some() || self.b_re.is_some() || self.b_im.is_some()
    }
}

/// How the initial width b is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedSpec {
    Width(C64),
    /// Re b = 0, Im b = μ m ω̂.
    Mu(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: OscillatorParams,
    pub seed: SeedSpec,
    pub t_max: f64,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub oracle: bool,
}

impl RunConfig {
    /// Flags win over the file, the file over defaults. The seed is taken
    /// whole from the highest layer that mentions any of mu, b_re, b_im.
    pub fn resolve(cli: &Layer, file: &Layer) -> Result<Self, CliError> {
        let params = OscillatorParams::new(
            cli.m.or(file.m).unwrap_or(1.0),
            cli.omega0.or(file.omega0).unwrap_or(1.0),
            cli.gamma.or(file.gamma).unwrap_or(0.5),
            cli.hbar.or(file.hbar).unwrap_or(1.0),
        )?;
        let source = if cli.has_seed() { cli } else { file };
        let seed = match (source.mu, source.b_re, source.b_im) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(CliError::Usage("give either mu or b_re/b_im, not both".into()))
            }
            (Some(mu), None, None) if mu > 0.0 && mu.is_finite() => SeedSpec::Mu(mu),
            (Some(mu), None, None) => return Err(CliError::Usage(format!("mu must be > 0, got {mu}"))),
            (None, re, im) => {
                let b = C64::new(re.unwrap_or(0.0), im.unwrap_or(1.0));
                if !(b.im > 0.0) || !b.re.is_finite() {
                    return Err(CliError::Usage(format!("b_im must be > 0, got {}", b.im)));
                }
                SeedSpec::Width(b)
            }
        };
        let t_max = cli.t_max.or(file.t_max).unwrap_or(10.0);
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(CliError::Usage(format!("t_max must be > 0, got {t_max}")));
        }
        let samples = cli.samples.or(file.samples).unwrap_or(201);
        if samples < 2 {
            return Err(CliError::Usage(format!("samples must be >= 2, got {samples}")));
        }
        Ok(Self {
            params,
            seed,
            t_max,
            samples,
            out: cli.out.clone().or_else(|| file.out.clone()),
            format: cli.format.or(file.format),
            oracle: cli.oracle.or(file.oracle).unwrap_or(false),
        })
    }

    pub fn b(&self) -> Result<C64, CliError> {
        match self.seed {
            SeedSpec::Width(b) => Ok(b),
            SeedSpec::Mu(mu) => {
                let setup = tcs_core::observables::UncertaintySetup::new(&self.params, mu)?;
                Ok(setup.b(&self.params))
            }
        }
    }

    /// The reference trajectory x(0) = 1, p(0) = −mγ/2 with width b.
    pub fn gaussian_seed(&self) -> Result<GaussianSeed, CliError> {
        Ok(GaussianSeed::reference(&self.params, self.b()?)?)
    }

    /// Evenly spaced times from 0 to t_max.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.samples - 1) as f64;
        (0..self.samples).map(|i| self.t_max * i as f64 / last).collect()
    }

    pub fn metadata(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let mut meta = vec![
            ("m".to_string(), p.m.to_string()),
            ("omega0".to_string(), p.omega0.to_string()),
            ("gamma".to_string(), p.gamma.to_string()),
            ("hbar".to_string(), p.hbar.to_string()),
            ("regime".to_string(), p.regime().name().to_string()),
        ];
        match self.seed {
            SeedSpec::Width(b) => {
                meta.push(("b_re".into(), b.re.to_string()));
                meta.push(("b_im".into(), b.im.to_string()));
            }
            SeedSpec::Mu(mu) => meta.push(("mu".into(), mu.to_string())),
        }
        meta.push(("t_max".into(), self.t_max.to_string()));
        meta.push(("samples".into(), self.samples.to_string()));
        meta
    }
}
