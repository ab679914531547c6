//! Experiment configuration: a flat JSON object with exact values as strings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use brs_core::exact::parse_rational;
use brs_core::solenoid::{is_minimal, reduce_mod_gamma};
use brs_core::{AdeleVector, ExactReal, GammaElement, PrimeSet, Rational, SolenoidPoint};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;

use crate::report::CliError;

/// Integer or rational given either as a JSON integer or as a "num/den" string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    pub fn rational(&self) -> Result<Rational, CliError> {
        match self {
            Num::Int(v) => Ok(Rational::from_integer(BigInt::from(*v))),
            Num::Text(s) => parse_rational(s).map_err(|e| CliError::config(format!("bad rational {s:?}: {e}"))),
        }
    }

    pub fn integer(&self) -> Result<BigInt, CliError> {
        let r = self.rational()?;
        if !r.is_integer() {
            return Err(CliError::config(format!("expected an integer, got {r}")));
        }
        Ok(r.to_integer())
    }
}

/// (a + b sqrt d) / c
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quadratic {
    pub d: u64,
    pub a: Num,
    pub b: Num,
    pub c: Num,
}

impl Quadratic {
    pub fn value(&self) -> Result<ExactReal, CliError> {
        ExactReal::new(self.a.integer()?, self.b.integer()?, self.c.integer()?, self.d)
            .map_err(|e| CliError::config(format!("alpha_inf: {e}")))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Keyword(String),
    Point {
        inf: Quadratic,
        #[serde(default)]
        p: BTreeMap<String, Num>,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub name: Option<String>,
    pub command: Option<String>,
    pub alpha_inf: Option<Quadratic>,
    #[serde(default)]
    pub alpha_p: BTreeMap<String, Num>,
    pub gamma: Option<Num>,
    pub n: Option<Num>,
    pub checkpoints: Option<Vec<u64>>,
    pub x0: Option<PointSpec>,
    pub seed: Option<u64>,
    pub box_file: Option<PathBuf>,
    pub bound: Option<u32>,
    #[serde(rename = "N")]
    pub len: Option<u64>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub checkpoints: Option<Vec<u64>>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub name: Option<String>,
    pub command: Option<String>,
    pub alpha: AdeleVector,
    pub gamma: Option<GammaElement>,
    pub n: Option<BigInt>,
    pub checkpoints: Option<Vec<u64>>,
    pub x0: Option<PointSpec>,
    pub seed: u64,
    pub box_file: Option<PathBuf>,
    pub bound: Option<u32>,
    pub len: Option<u64>,
}

pub fn read_value(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(CliError::config("config must be a JSON object"));
    }
    Ok(value)
}

pub fn parse_checkpoints(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| CliError::config(format!("checkpoint {t:?}: {e}"))))
        .collect()
}

fn check_checkpoints(marks: &[u64]) -> Result<(), CliError> {
    if marks.is_empty() || marks[0] == 0 || marks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::config("checkpoints must be positive and strictly increasing"));
    }
    Ok(())
}

fn parse_prime(key: &str) -> Result<u64, CliError> {
    key.trim().parse().map_err(|_| CliError::config(format!("bad prime key {key:?}")))
}

impl Experiment {
    /// Builds an experiment from a JSON object. Relative paths are resolved
    /// against `base`.
    pub fn from_value(value: Value, base: &Path, ov: &Overrides) -> Result<Self, CliError> {
        let raw: RawConfig = serde_json::from_value(value).map_err(|e| CliError::config(e.to_string()))?;
        let quad = raw.alpha_inf.as_ref().ok_or_else(|| CliError::config("missing alpha_inf"))?;
        let mut pairs = Vec::new();
        for (k, v) in &raw.alpha_p {
            pairs.push((parse_prime(k)?, v.rational()?));
        }
        let alpha =
            AdeleVector::from_pairs(quad.value()?, &pairs).map_err(|e| CliError::config(format!("alpha: {e}")))?;
        if !is_minimal(&alpha) {
            return Err(CliError::config(format!("alpha_inf = {} is rational; the rotation is not minimal", alpha.real())));
        }
        let gamma = match &raw.gamma {
            Some(g) => Some(
                GammaElement::new(g.rational()?, alpha.primes()).map_err(|e| CliError::config(format!("gamma: {e}")))?,
            ),
            None => None,
        };
        let n = raw.n.as_ref().map(Num::integer).transpose()?;
        let checkpoints = ov.checkpoints.clone().or(raw.checkpoints);
        if let Some(marks) = &checkpoints {
            check_checkpoints(marks)?;
        }
        Ok(Experiment {
            name: raw.name,
            command: raw.command,
            alpha,
            gamma,
            n,
            checkpoints,
            x0: raw.x0,
            seed: ov.seed.or(raw.seed).unwrap_or(0),
            box_file: raw.box_file.map(|p| if p.is_relative() { base.join(p) } else { p }),
            bound: raw.bound,
            len: raw.len,
        })
    }

    pub fn primes(&self) -> &PrimeSet {
        self.alpha.primes()
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn require_gamma(&self) -> Result<&GammaElement, CliError> {
        self.gamma.as_ref().ok_or_else(|| CliError::config("missing gamma"))
    }

    /// Starting point, reduced into the fundamental domain.
    pub fn start(&self) -> Result<SolenoidPoint, CliError> {
        let primes = self.primes();
        match &self.x0 {
            None => Ok(SolenoidPoint::origin(primes)),
            Some(PointSpec::Keyword(k)) if k == "origin" => Ok(SolenoidPoint::origin(primes)),
            Some(PointSpec::Keyword(k)) if k == "random" => {
                let mut r = self.rng();
                let real = ExactReal::from(Rational::new(BigInt::from(r.gen_range(0..1u64 << 20)), BigInt::from(1u64 << 20)));
                let padic = primes
                    .iter()
                    .map(|p| Rational::from_integer(BigInt::from(r.gen_range(0..p.get().pow(8)))))
                    .collect();
                let x = AdeleVector::new(primes.clone(), real, padic).map_err(|e| CliError::config(e.to_string()))?;
                Ok(reduce_mod_gamma(&x).0)
            }
            Some(PointSpec::Keyword(k)) => Err(CliError::config(format!("x0 must be \"origin\", \"random\" or a point, got {k:?}"))),
            Some(PointSpec::Point { inf, p }) => {
                let mut coords = BTreeMap::new();
                for (k, v) in p {
                    coords.insert(parse_prime(k)?, v.rational()?);
                }
                let padic = primes
                    .iter()
                    .map(|q| coords.remove(&q.get()).unwrap_or_else(|| Rational::from_integer(BigInt::from(0))))
                    .collect();
                if let Some(extra) = coords.keys().next() {
                    return Err(CliError::config(format!("x0 has coordinate at {extra}, which is not in the prime set")));
                }
                let x = AdeleVector::new(primes.clone(), inf.value()?, padic).map_err(|e| CliError::config(e.to_string()))?;
                Ok(reduce_mod_gamma(&x).0)
            }
        }
    }
}

/// Overlays `entry` on `base` (minus its experiment list).
pub fn merge(base: &Value, entry: &Value) -> Result<Value, CliError> {
    let mut out = base.as_object().cloned().unwrap_or_default();
    out.remove("experiments");
    let entry = entry.as_object().ok_or_else(|| CliError::config("each experiment must be a JSON object"))?;
    for (k, v) in entry {
        out.insert(k.clone(), v.clone());
    }
    Ok(Value::Object(out))
}
