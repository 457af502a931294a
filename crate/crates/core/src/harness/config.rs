//! Experiment configuration: a flat `key = value` file whose keys mirror the
//! command-line flags. Flags given on the command line win over the file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::metric::PsiFunction;
use crate::places::PlaceSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiKind {
    ScaledCap,
    Power,
    Table,
}

impl FromStr for PsiKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "scaled_cap" | "cap" => Ok(Self::ScaledCap),
            "power" => Ok(Self::Power),
            "table" => Ok(Self::Table),
            other => Err(Error::Config(format!("unknown psi family {other:?}"))),
        }
    }
}

impl fmt::Display for PsiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ScaledCap => "scaled_cap",
            Self::Power => "power",
            Self::Table => "table",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub places: Vec<u64>,
    pub psi: PsiKind,
    pub c: Rational,
    pub theta: u32,
    /// File of `gamma value` lines for the table family.
    pub psi_table: Option<PathBuf>,
    pub n_max: u64,
    /// Level bound for the overlap matrix, the second-moment bound and the MC
    /// union; clamped to `n_max`.
    pub overlap_n_max: u64,
    pub mc_samples: u64,
    /// Digits per finite place; `None` picks the smallest admissible count.
    pub mc_digits: Option<u32>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            places: vec![2],
            psi: PsiKind::ScaledCap,
            c: Rational::new(1.into(), 2.into()),
            theta: 1,
            psi_table: None,
            n_max: 8,
            overlap_n_max: 8,
            mc_samples: 100_000,
            mc_digits: None,
            seed: 0,
            out: None,
            format: OutputFormat::Json,
        }
    }
}

pub fn parse_places(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty() && *t != "inf")
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Config(format!("bad prime {t:?} in places")))
        })
        .collect()
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
}

impl ExperimentConfig {
    /// Applies one `key = value` setting. Dashes and underscores in keys are
    /// interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "places" => self.places = parse_places(value)?,
            "psi" => self.psi = value.parse()?,
            "c" => self.c = arith::parse_rational(value).map_err(|e| Error::Config(e.to_string()))?,
            "theta" => self.theta = parse_num(&key, value)?,
            "psi_table" => self.psi_table = Some(PathBuf::from(value)),
            "n_max" => self.n_max = parse_num(&key, value)?,
            "overlap_n_max" => self.overlap_n_max = parse_num(&key, value)?,
            "samples" | "mc_samples" => self.mc_samples = parse_num(&key, value)?,
            "digits" | "mc_digits" | "mc_precision_digits" => {
                self.mc_digits = match value {
                    "auto" => None,
                    v => Some(parse_num(&key, v)?),
                }
            }
            "seed" => self.seed = parse_num(&key, value)?,
            "out" | "output" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_str(text)?;
        Ok(cfg)
    }

    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn place_set(&self) -> Result<PlaceSet> {
        PlaceSet::new(&self.places)
    }

    pub fn validate(&self) -> Result<()> {
        self.place_set()?;
        if self.n_max < 1 {
            return Err(Error::InvalidLevelBound);
        }
        if self.overlap_n_max < 1 {
            return Err(Error::Config("overlap_n_max must be at least 1".into()));
        }
        if self.mc_digits == Some(0) {
            return Err(Error::Config("digits must be at least 1".into()));
        }
        if self.psi == PsiKind::Table && self.psi_table.is_none() {
            return Err(Error::Config("psi = table needs psi_table".into()));
        }
        Ok(())
    }

    pub fn overlap_level(&self) -> u64 {
        self.overlap_n_max.min(self.n_max)
    }

    pub fn psi_function(&self, places: &PlaceSet) -> Result<PsiFunction> {
        match self.psi {
            PsiKind::ScaledCap => PsiFunction::scaled_cap(self.c.clone()),
            PsiKind::Power => PsiFunction::power(self.c.clone(), self.theta),
            PsiKind::Table => {
                let path = self
                    .psi_table
                    .as_ref()
                    .ok_or_else(|| Error::Config("psi = table needs psi_table".into()))?;
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                PsiFunction::table(parse_psi_table(&text)?, places)
            }
        }
    }

    /// The settings as ordered `(key, value)` pairs, for reports.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let places = self.places.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        vec![
            ("places", places),
            ("psi", self.psi.to_string()),
            ("c", arith::format_rational(&self.c)),
            ("theta", self.theta.to_string()),
            (
                "psi_table",
                self.psi_table.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            ),
            ("n_max", self.n_max.to_string()),
            ("overlap_n_max", self.overlap_level().to_string()),
            ("samples", self.mc_samples.to_string()),
            (
                "digits",
                self.mc_digits.map(|d| d.to_string()).unwrap_or_else(|| "auto".into()),
            ),
            ("seed", self.seed.to_string()),
            ("format", self.format.to_string()),
        ]
    }
}

/// Lines of `gamma value` (whitespace or comma separated); `#` starts a comment.
pub fn parse_psi_table(text: &str) -> Result<Vec<(Rational, Rational)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<_> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::Config(format!("psi table line {}: expected two fields", lineno + 1)));
        }
        out.push((arith::parse_rational(fields[0])?, arith::parse_rational(fields[1])?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn file_round_trip() {
        let cfg = ExperimentConfig::parse_str(
            "# demo\nplaces = 2,3\npsi = power\nc = 1\ntheta = 2\nn-max = 4\nsamples=1000\ndigits=6\nseed=9\nformat=csv\n",
        )
        .unwrap();
        assert_eq!(cfg.places, vec![2, 3]);
        assert_eq!(cfg.psi, PsiKind::Power);
        assert_eq!(cfg.c, rat(1, 1));
        assert_eq!((cfg.theta, cfg.n_max, cfg.mc_samples), (2, 4, 1000));
        assert_eq!((cfg.mc_digits, cfg.seed, cfg.format), (Some(6), 9, OutputFormat::Csv));
        assert_eq!(cfg.overlap_level(), 4);
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(ExperimentConfig::parse_str("colour = red").is_err());
        assert!(ExperimentConfig::parse_str("places").is_err());
        assert!(ExperimentConfig::parse_str("seed = -1").is_err());
        let cfg = ExperimentConfig::parse_str("places = 4").unwrap();
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig::parse_str("psi = table").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn psi_table_parsing() {
        let t = parse_psi_table("3 1/6\n# skip\n1/2, 1/8\n").unwrap();
        assert_eq!(t, vec![(rat(3, 1), rat(1, 6)), (rat(1, 2), rat(1, 8))]);
        assert!(parse_psi_table("3").is_err());
    }
}
