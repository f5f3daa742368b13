//! Experiment configuration and coefficient profiles.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::coeffs::CoefficientVector;
use crate::error::{Error, Result};
use crate::montecarlo::{MAX_P, MIN_SAMPLES};

/// A coefficient profile, instantiated for a dimension by [`Profile::build`]
/// and normalized to `‖a‖₂ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    OneHot,
    Flat,
    /// `aᵢ ∝ ρ^{i−1}`, `ρ ∈ (0, 1)`.
    Geometric(f64),
    /// `aᵢ ∝ i^{−α}`.
    Power(f64),
    Explicit(Vec<f64>),
}

fn parse_arg(s: &str, name: &str) -> Option<String> {
    let rest = s.strip_prefix(name)?;
    if let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        return Some(inner.to_string());
    }
    rest.strip_prefix(':').map(str::to_string)
}

fn parse_real(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(format!("bad {what} value {s:?}")))
}

impl FromStr for Profile {
    type Err = Error;

    /// `one_hot`, `flat`, `geometric(ρ)`, `power(α)`, `explicit(a1,a2,…)`;
    /// a `:` may replace the parentheses, e.g. `geometric:0.7`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "one_hot" => return Ok(Self::OneHot),
            "flat" => return Ok(Self::Flat),
            _ => {}
        }
        if let Some(arg) = parse_arg(s, "geometric") {
            let rho = parse_real(&arg, "ρ")?;
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::invalid(format!("ρ must lie in (0, 1), got {rho}")));
            }
            return Ok(Self::Geometric(rho));
        }
        if let Some(arg) = parse_arg(s, "power") {
            let alpha = parse_real(&arg, "α")?;
            if !alpha.is_finite() {
                return Err(Error::invalid(format!("α must be finite, got {alpha}")));
            }
            return Ok(Self::Power(alpha));
        }
        if let Some(arg) = parse_arg(s, "explicit") {
            let values = arg
                .split([',', ';', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| parse_real(t, "coefficient"))
                .collect::<Result<Vec<_>>>()?;
            CoefficientVector::new(values.clone())?;
            if values.iter().all(|v| *v == 0.0) {
                return Err(Error::invalid("explicit profile is identically zero"));
            }
            return Ok(Self::Explicit(values));
        }
        Err(Error::invalid(format!("unknown profile {s:?}")))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OneHot => f.write_str("one_hot"),
            Self::Flat => f.write_str("flat"),
            Self::Geometric(r) => write!(f, "geometric({r})"),
            Self::Power(a) => write!(f, "power({a})"),
            Self::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "explicit({})", parts.join(";"))
            }
        }
    }
}

impl Profile {
    pub fn build(&self, n: usize) -> Result<CoefficientVector> {
        if n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let raw: Vec<f64> = match self {
            Self::OneHot => (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
            Self::Flat => vec![1.0; n],
            Self::Geometric(rho) => (0..n).map(|i| rho.powi(i as i32)).collect(),
            Self::Power(alpha) => (1..=n).map(|i| (i as f64).powf(-alpha)).collect(),
            Self::Explicit(v) => {
                if v.len() != n {
                    return Err(Error::invalid(format!(
                        "explicit profile has {} entries, dimension is {n}",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        let norm = CoefficientVector::new(raw.clone())?.l2();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid(format!("profile {self} cannot be normalized at n = {n}")));
        }
        CoefficientVector::new(raw.into_iter().map(|v| v / norm).collect())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    families: Vec<String>,
    profiles: Vec<String>,
    n_list: Vec<usize>,
    p_grid: Vec<f64>,
    n_samples: usize,
    seed: u64,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

/// One experiment: the Cartesian product families × n × profiles × p.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub families: Vec<String>,
    pub profiles: Vec<Profile>,
    pub n_list: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(
        families: &[&str],
        profiles: &[&str],
        n_list: &[usize],
        p_grid: &[f64],
        n_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            families: families.iter().map(|s| s.to_string()).collect(),
            profiles: profiles.iter().map(|s| s.parse()).collect::<Result<_>>()?,
            n_list: n_list.to_vec(),
            p_grid: p_grid.to_vec(),
            n_samples,
            seed,
            output_dir: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)?;
        let cfg = Self {
            families: raw.families,
            profiles: raw.profiles.iter().map(|s| s.parse()).collect::<Result<_>>()?,
            n_list: raw.n_list,
            p_grid: raw.p_grid,
            n_samples: raw.n_samples,
            seed: raw.seed,
            output_dir: raw.output_dir,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.profiles.is_empty() || self.n_list.is_empty() {
            return Err(Error::invalid("families, profiles and n_list must be nonempty"));
        }
        if self.p_grid.is_empty() {
            return Err(Error::invalid("p_grid must be nonempty"));
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(**p >= 2.0 && **p <= MAX_P)) {
            return Err(Error::invalid(format!("p_grid entries must lie in [2, {MAX_P}], got {p}")));
        }
        if self.p_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("p_grid must be strictly ascending"));
        }
        if self.n_list.contains(&0) {
            return Err(Error::invalid("n_list entries must be positive"));
        }
        if self.n_samples < MIN_SAMPLES {
            return Err(Error::invalid(format!(
                "n_samples must be ≥ {MIN_SAMPLES}, got {}",
                self.n_samples
            )));
        }
        Ok(())
    }
}
