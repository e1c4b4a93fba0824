//! Run configuration: a TOML file mirroring the command-line flags, with
//! flags taking precedence.

use super::HarnessError;
use crate::exact::{Poly, Q};
use crate::field::{make_field, FieldDescriptor, NumberField};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Truncation budgets. Unset entries fall back to per-suite defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Modulus cap on the geometric side of the trace formula.
    pub modulus_cap: Option<u64>,
    /// Euler products run over primes of norm at most this.
    pub prime_norm: Option<u64>,
    /// Box for direct Dirichlet-series sums.
    pub box_norm: Option<u64>,
    /// Largest classical Kloosterman modulus.
    pub kloosterman_c: Option<u64>,
    /// Largest modulus norm for random quadratic instances.
    pub modulus_norm: Option<u64>,
    /// Number of random instances or vectors.
    pub instances: Option<u64>,
    /// Height of vertical-line quadratures.
    pub t_max: Option<f64>,
}

impl Budgets {
    /// Parses `key=value` pairs separated by commas.
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        let mut b = Budgets::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("budget entry `{part}` is not key=value")))?;
            let int = || v.trim().parse::<u64>().map_err(|_| HarnessError::Config(format!("budget {k} = `{v}`")));
            match k.trim() {
                "modulus_cap" => b.modulus_cap = Some(int()?),
                "prime_norm" => b.prime_norm = Some(int()?),
                "box_norm" => b.box_norm = Some(int()?),
                "kloosterman_c" => b.kloosterman_c = Some(int()?),
                "modulus_norm" => b.modulus_norm = Some(int()?),
                "instances" => b.instances = Some(int()?),
                "t_max" => {
                    b.t_max = Some(v.trim().parse().map_err(|_| HarnessError::Config(format!("budget t_max = `{v}`")))?)
                }
                other => return Err(HarnessError::Config(format!("unknown budget `{other}`"))),
            }
        }
        b.validate()?;
        Ok(b)
    }

    /// Entries set in `other` replace those in `self`.
    pub fn overlay(&mut self, other: &Budgets) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(modulus_cap, prime_norm, box_norm, kloosterman_c, modulus_norm, instances, t_max);
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let ints = [
            ("modulus_cap", self.modulus_cap),
            ("prime_norm", self.prime_norm),
            ("box_norm", self.box_norm),
            ("kloosterman_c", self.kloosterman_c),
            ("modulus_norm", self.modulus_norm),
            ("instances", self.instances),
        ];
        for (name, v) in ints {
            if v == Some(0) {
                return Err(HarnessError::Config(format!("budget {name} must be positive")));
            }
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(HarnessError::Config("budget t_max must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub field: String,
    pub q: Vec<u64>,
    pub k: u32,
    pub n: Vec<u64>,
    pub delta: Option<String>,
    /// Coefficients from degree 0 upward, e.g. `0,0,1,-1/6`.
    pub poly: Option<String>,
    pub alpha: Option<f64>,
    pub kind: Option<String>,
    pub degree: Option<usize>,
    pub budget: Budgets,
    pub tol: Option<f64>,
    pub workers: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Extra fixture file in the newform schema.
    pub fixtures: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: "Q".into(),
            q: Vec::new(),
            k: 2,
            n: Vec::new(),
            delta: None,
            poly: None,
            alpha: None,
            kind: None,
            degree: None,
            budget: Budgets::default(),
            tol: None,
            workers: 1,
            seed: 0,
            out: None,
            fixtures: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.budget.validate()?;
        if self.workers == 0 {
            return Err(HarnessError::Config("workers must be positive".into()));
        }
        if self.k == 0 || self.k % 2 == 1 {
            return Err(HarnessError::Config(format!("weight {} must be even and positive", self.k)));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(HarnessError::Config("tol must be positive".into()));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) {
                return Err(HarnessError::Config("alpha must be positive".into()));
            }
        }
        FieldDescriptor::parse(&self.field).map_err(HarnessError::Config)?;
        if let Some(p) = &self.poly {
            parse_poly(p)?;
        }
        if let Some(d) = &self.delta {
            parse_rational(d)?;
        }
        Ok(())
    }

    pub fn number_field(&self) -> Result<NumberField, HarnessError> {
        let desc = FieldDescriptor::parse(&self.field).map_err(HarnessError::Config)?;
        make_field(&desc).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn q_or(&self, default: &[u64]) -> Vec<u64> {
        if self.q.is_empty() {
            default.to_vec()
        } else {
            self.q.clone()
        }
    }

    pub fn n_or(&self, default: &[u64]) -> Vec<u64> {
        if self.n.is_empty() {
            default.to_vec()
        } else {
            self.n.clone()
        }
    }

    pub fn delta_or(&self, default: &str) -> Result<Q, HarnessError> {
        parse_rational(self.delta.as_deref().unwrap_or(default))
    }

    pub fn poly_or(&self, default: &str) -> Result<Poly<Q>, HarnessError> {
        parse_poly(self.poly.as_deref().unwrap_or(default))
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// `a`, `a/b` or a terminating decimal such as `0.5`.
pub fn parse_rational(s: &str) -> Result<Q, HarnessError> {
    let t = s.trim();
    let bad = || HarnessError::Config(format!("cannot parse rational `{s}`"));
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Q::new(a, b));
    }
    if let Some((i, f)) = t.split_once('.') {
        let neg = i.starts_with('-');
        let digits = format!("{}{}", i.trim_start_matches('-'), f);
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = BigInt::from(10).pow(f.len() as u32);
        let v = Q::new(num, den);
        return Ok(if neg { -v } else { v });
    }
    Ok(Q::from_integer(t.parse().map_err(|_| bad())?))
}

pub fn parse_poly(s: &str) -> Result<Poly<Q>, HarnessError> {
    let c = s
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|x| !x.is_empty())
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    if c.is_empty() {
        return Err(HarnessError::Config("empty polynomial".into()));
    }
    Ok(Poly::new(c))
}
