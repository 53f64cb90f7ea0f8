//! Substitution, Sturmian and periodic subshifts, plus the repetitivity and
//! weight diagnostics.

mod config;
mod diagnostics;
mod sturmian;
mod substitution;

use std::sync::Arc;

pub use config::SystemConfig;
pub use diagnostics::{
    legal_words, legal_words_up_to, pw_report, repetitivity_report, PwReport, PwRow, RepetitivityReport,
    RepetitivityRow,
};
pub use sturmian::SturmianSpec;
pub use substitution::Substitution;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, PotentialMap, Word};

/// Default cap on generated window lengths.
pub const DEFAULT_WINDOW_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Substitution { sub: Substitution, seed: Letter },
    Sturmian(SturmianSpec),
    /// The orbit closure of an explicit repeating word.
    Periodic(Word),
}

/// A word generator together with the potential it induces.
#[derive(Debug, Clone)]
pub struct SubshiftSystem {
    source: Source,
    alphabet: Arc<Alphabet>,
    potential: PotentialMap,
    label: String,
    aperiodic: Option<bool>,
    window_cap: usize,
}

impl SubshiftSystem {
    pub fn substitution(
        sub: Substitution,
        seed: Letter,
        potential: PotentialMap,
        label: impl Into<String>,
    ) -> Result<Self> {
        let alphabet = sub.alphabet().clone();
        check_potential(&alphabet, &potential)?;
        if seed.id() >= alphabet.len() {
            return Err(Error::InvalidArgument("seed letter out of range".into()));
        }
        if !sub.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        Ok(SubshiftSystem {
            source: Source::Substitution { sub, seed },
            alphabet,
            potential,
            label: label.into(),
            aperiodic: None,
            window_cap: DEFAULT_WINDOW_CAP,
        })
    }

    /// Sturmian systems use the two-letter alphabet `{a, b}`.
    pub fn sturmian(
        spec: SturmianSpec,
        potential: PotentialMap,
        label: impl Into<String>,
    ) -> Result<Self> {
        let alphabet = Arc::new(Alphabet::new(vec!['a', 'b'])?);
        check_potential(&alphabet, &potential)?;
        Ok(SubshiftSystem {
            source: Source::Sturmian(spec),
            alphabet,
            potential,
            label: label.into(),
            aperiodic: Some(true),
            window_cap: DEFAULT_WINDOW_CAP,
        })
    }

    pub fn periodic(
        period: Word,
        potential: PotentialMap,
        label: impl Into<String>,
    ) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("period word is empty".into()));
        }
        let alphabet = period.alphabet().clone();
        check_potential(&alphabet, &potential)?;
        Ok(SubshiftSystem {
            source: Source::Periodic(period),
            alphabet,
            potential,
            label: label.into(),
            aperiodic: Some(false),
            window_cap: DEFAULT_WINDOW_CAP,
        })
    }

    pub fn with_aperiodic_flag(mut self, aperiodic: Option<bool>) -> Self {
        self.aperiodic = aperiodic;
        self
    }

    pub fn with_window_cap(mut self, cap: usize) -> Self {
        self.window_cap = cap;
        self
    }

    pub fn with_potential(mut self, potential: PotentialMap) -> Result<Self> {
        check_potential(&self.alphabet, &potential)?;
        self.potential = potential;
        Ok(self)
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn potential(&self) -> &PotentialMap {
        &self.potential
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Known aperiodicity (metadata only, never decided numerically).
    pub fn aperiodic(&self) -> Option<bool> {
        self.aperiodic
    }

    pub fn window_cap(&self) -> usize {
        self.window_cap
    }

    /// Index of the first letter of the canonical window.
    pub fn canonical_start(&self) -> i64 {
        match self.source {
            Source::Sturmian(_) => 1,
            _ => 0,
        }
    }

    /// `len` letters starting at index `start`. Substitution windows index the
    /// one-sided seed iterate from 0 and need `start >= 0`.
    pub fn window(&self, start: i64, len: usize) -> Result<Word> {
        Ok(Word::from_ids_unchecked(
            self.alphabet.clone(),
            self.window_ids(start, len)?,
        ))
    }

    pub(crate) fn window_ids(&self, start: i64, len: usize) -> Result<Vec<u8>> {
        if len > self.window_cap {
            return Err(Error::CapExceeded {
                what: "window length",
                requested: len as u128,
                cap: self.window_cap as u128,
            });
        }
        match &self.source {
            Source::Substitution { sub, seed } => {
                if start < 0 {
                    return Err(Error::InvalidArgument(
                        "substitution windows start at index 0 or later".into(),
                    ));
                }
                let start = start as usize;
                let total = start.checked_add(len).ok_or_else(|| {
                    Error::InvalidArgument("window end overflows".into())
                })?;
                if total > self.window_cap {
                    return Err(Error::CapExceeded {
                        what: "window end",
                        requested: total as u128,
                        cap: self.window_cap as u128,
                    });
                }
                let mut ids = sub.prefix_ids(*seed, total, self.window_cap)?;
                ids.drain(..start);
                Ok(ids)
            }
            Source::Sturmian(spec) => spec.window(start, len),
            Source::Periodic(period) => {
                let p = period.len() as i64;
                Ok((0..len as i64)
                    .map(|j| period.ids()[(start + j).rem_euclid(p) as usize])
                    .collect())
            }
        }
    }

    pub fn canonical_window(&self, len: usize) -> Result<Word> {
        self.window(self.canonical_start(), len)
    }

    /// The `k`-th periodic approximant: `iterate(seed, k)` for substitutions, the
    /// window of length `q_k` for Sturmian systems, the period itself otherwise.
    pub fn approximant(&self, k: usize) -> Result<Word> {
        match &self.source {
            Source::Substitution { sub, seed } => sub.iterate(*seed, k, self.window_cap),
            Source::Sturmian(spec) => {
                let qs = spec.denominators();
                let q = *qs.get(k.saturating_sub(1)).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "approximant depth {k} beyond continued-fraction depth {}",
                        qs.len()
                    ))
                })?;
                self.window(1, q as usize)
            }
            Source::Periodic(period) => Ok(period.clone()),
        }
    }

    /// Smallest approximant whose length is at least `len`, with its depth.
    pub fn approximant_at_least(&self, len: usize) -> Result<(usize, Word)> {
        match &self.source {
            Source::Substitution { sub, seed } => {
                let mut k = 0;
                while (sub.iterate_len(*seed, k) as usize) < len {
                    k += 1;
                }
                Ok((k, self.approximant(k)?))
            }
            Source::Sturmian(spec) => {
                let qs = spec.denominators();
                let k = qs
                    .iter()
                    .position(|&q| q as usize >= len)
                    .ok_or_else(|| Error::InvalidArgument("expansion too shallow".into()))?;
                Ok((k + 1, self.approximant(k + 1)?))
            }
            Source::Periodic(period) => Ok((0, period.clone())),
        }
    }
}

fn check_potential(alphabet: &Alphabet, potential: &PotentialMap) -> Result<()> {
    if potential.len() != alphabet.len() {
        return Err(Error::InvalidArgument(format!(
            "potential has {} values for {} letters",
            potential.len(),
            alphabet.len()
        )));
    }
    Ok(())
}

pub const CATALOG: &[&str] = &[
    "fibonacci",
    "thue_morse",
    "period_doubling",
    "rudin_shapiro",
    "binary_non_pisot",
    "golden_sturmian",
    "free",
    "dimer",
];

/// The substitution systems the diagnostics and acceptance suite sweep over.
pub const SHIPPED_SUBSTITUTIONS: &[&str] = &[
    "fibonacci",
    "thue_morse",
    "period_doubling",
    "rudin_shapiro",
    "binary_non_pisot",
];

/// Built-in systems. Binary substitutions carry the potential `a -> 0, b -> 1`;
/// Rudin-Shapiro uses the usual `+1` on `{a, b}` and `-1` on `{c, d}`.
pub fn catalog(name: &str) -> Result<SubshiftSystem> {
    let binary = |images: &[&str]| -> Result<SubshiftSystem> {
        let sub = Substitution::from_text(&['a', 'b'], images)?;
        let seed = Letter::new(0, sub.alphabet())?;
        Ok(SubshiftSystem::substitution(sub, seed, PotentialMap::new(vec![0.0, 1.0])?, name)?
            .with_aperiodic_flag(Some(true)))
    };
    match name {
        "fibonacci" => binary(&["ab", "a"]),
        "thue_morse" => binary(&["ab", "ba"]),
        "period_doubling" => binary(&["ab", "aa"]),
        "binary_non_pisot" => binary(&["ab", "aaa"]),
        "rudin_shapiro" => {
            let sub = Substitution::from_text(&['a', 'b', 'c', 'd'], &["ab", "ac", "db", "dc"])?;
            let seed = Letter::new(0, sub.alphabet())?;
            let potential = PotentialMap::new(vec![1.0, 1.0, -1.0, -1.0])?;
            Ok(SubshiftSystem::substitution(sub, seed, potential, name)?
                .with_aperiodic_flag(Some(true)))
        }
        "golden_sturmian" => SubshiftSystem::sturmian(
            SturmianSpec::golden(0.0),
            PotentialMap::new(vec![0.0, 1.0])?,
            name,
        ),
        "free" => {
            let alphabet = Arc::new(Alphabet::new(vec!['a'])?);
            SubshiftSystem::periodic(
                Word::parse(alphabet, "a")?,
                PotentialMap::new(vec![0.0])?,
                name,
            )
        }
        "dimer" => {
            let alphabet = Arc::new(Alphabet::new(vec!['a', 'b'])?);
            SubshiftSystem::periodic(
                Word::parse(alphabet, "ab")?,
                PotentialMap::new(vec![0.0, 2.0])?,
                name,
            )
        }
        _ => Err(Error::UnknownSystem {
            name: name.to_string(),
            catalog: CATALOG.iter().map(|s| s.to_string()).collect(),
        }),
    }
}
