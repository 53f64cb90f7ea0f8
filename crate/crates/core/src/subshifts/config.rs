//! JSON system configuration files.
//!
//! ```json
//! {"alphabet": ["a","b"], "rules": {"a": "ab", "b": "a"},
//!  "potential": {"a": 0.0, "b": 1.0}, "seed": "a", "label": "fibonacci"}
//! {"alpha_cf": [1,1,1,1], "theta": 0.0, "potential": {"a": 0.0, "b": 1.0}}
//! {"alphabet": ["a","b"], "period": "ab", "potential": {"a": 0.0, "b": 2.0}}
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{SturmianSpec, SubshiftSystem, Substitution};
use crate::error::{Error, Result};
use crate::words::{single_char, Alphabet, PotentialMap, Word};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstitutionConfig {
    pub alphabet: Vec<String>,
    pub rules: BTreeMap<String, String>,
    pub potential: BTreeMap<String, f64>,
    pub seed: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub aperiodic: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SturmianConfig {
    pub alpha_cf: Vec<u64>,
    #[serde(default)]
    pub theta: f64,
    pub potential: BTreeMap<String, f64>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicConfig {
    pub alphabet: Vec<String>,
    pub period: String,
    pub potential: BTreeMap<String, f64>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemConfig {
    Substitution(SubstitutionConfig),
    Sturmian(SturmianConfig),
    Periodic(PeriodicConfig),
}

fn potential_for(alphabet: &Alphabet, values: &BTreeMap<String, f64>) -> Result<PotentialMap> {
    for key in values.keys() {
        let c = single_char(key)?;
        if alphabet.letter(c).is_none() {
            return Err(Error::Parse(format!("potential given for unknown letter {key:?}")));
        }
    }
    let v = alphabet
        .symbols()
        .iter()
        .map(|c| {
            values
                .get(&c.to_string())
                .copied()
                .ok_or_else(|| Error::Parse(format!("no potential value for letter {c:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    PotentialMap::new(v)
}

impl SystemConfig {
    /// Dispatches on the distinguishing key (`rules`, `alpha_cf` or `period`).
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("system config must be a JSON object".into()))?;
        if obj.contains_key("rules") {
            Ok(SystemConfig::Substitution(serde_json::from_value(value)?))
        } else if obj.contains_key("alpha_cf") {
            Ok(SystemConfig::Sturmian(serde_json::from_value(value)?))
        } else if obj.contains_key("period") {
            Ok(SystemConfig::Periodic(serde_json::from_value(value)?))
        } else {
            Err(Error::Parse(
                "system config needs one of \"rules\", \"alpha_cf\", \"period\"".into(),
            ))
        }
    }

    pub fn build(&self) -> Result<SubshiftSystem> {
        match self {
            SystemConfig::Substitution(c) => {
                let alphabet = Arc::new(Alphabet::from_strings(&c.alphabet)?);
                if c.rules.len() != alphabet.len() {
                    return Err(Error::Parse(format!(
                        "{} rules for {} letters",
                        c.rules.len(),
                        alphabet.len()
                    )));
                }
                let rules = alphabet
                    .symbols()
                    .iter()
                    .map(|s| {
                        let image = c.rules.get(&s.to_string()).ok_or_else(|| {
                            Error::Parse(format!("no rule for letter {s:?}"))
                        })?;
                        Word::parse(alphabet.clone(), image)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let sub = Substitution::new(alphabet.clone(), rules)?;
                let seed = alphabet
                    .letter(single_char(&c.seed)?)
                    .ok_or_else(|| Error::Parse(format!("seed {:?} not in alphabet", c.seed)))?;
                let potential = potential_for(&alphabet, &c.potential)?;
                let label = c.label.clone().unwrap_or_else(|| "substitution".into());
                Ok(SubshiftSystem::substitution(sub, seed, potential, label)?
                    .with_aperiodic_flag(c.aperiodic))
            }
            SystemConfig::Sturmian(c) => {
                let spec = SturmianSpec::new(c.alpha_cf.clone(), c.theta)?;
                let alphabet = Alphabet::new(vec!['a', 'b'])?;
                let potential = potential_for(&alphabet, &c.potential)?;
                let label = c.label.clone().unwrap_or_else(|| "sturmian".into());
                SubshiftSystem::sturmian(spec, potential, label)
            }
            SystemConfig::Periodic(c) => {
                let alphabet = Arc::new(Alphabet::from_strings(&c.alphabet)?);
                let period = Word::parse(alphabet.clone(), &c.period)?;
                let potential = potential_for(&alphabet, &c.potential)?;
                let label = c.label.clone().unwrap_or_else(|| "periodic".into());
                SubshiftSystem::periodic(period, potential, label)
            }
        }
    }
}
