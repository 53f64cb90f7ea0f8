//! Finite words over a small alphabet.
//!
//! Letters are stored as `u8` indices into an [`Alphabet`] table, which caps
//! alphabets at 256 letters. Every display symbol is a single `char` so that a
//! word round-trips through plain text unambiguously.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ALPHABET: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(id: usize, alphabet: &Alphabet) -> Result<Self> {
        if id >= alphabet.len() {
            return Err(Error::InvalidArgument(format!(
                "letter id {id} out of range for alphabet of size {}",
                alphabet.len()
            )));
        }
        Ok(Letter(id as u8))
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
        }
        if symbols.len() > MAX_ALPHABET {
            return Err(Error::CapExceeded {
                what: "alphabet size",
                requested: symbols.len() as u128,
                cap: MAX_ALPHABET as u128,
            });
        }
        let unique: HashSet<char> = symbols.iter().copied().collect();
        if unique.len() != symbols.len() {
            return Err(Error::InvalidArgument(
                "alphabet symbols must be distinct".into(),
            ));
        }
        Ok(Alphabet { symbols })
    }

    /// Builds an alphabet from display strings, each exactly one character.
    pub fn from_strings<S: AsRef<str>>(symbols: &[S]) -> Result<Self> {
        let chars = symbols
            .iter()
            .map(|s| single_char(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Alphabet::new(chars)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, letter: Letter) -> char {
        self.symbols[letter.id()]
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn letter(&self, symbol: char) -> Option<Letter> {
        self.symbols
            .iter()
            .position(|&c| c == symbol)
            .map(|i| Letter(i as u8))
    }
}

pub(crate) fn single_char(s: &str) -> Result<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Parse(format!(
            "letter symbol {s:?} must be exactly one character"
        ))),
    }
}

/// A finite word. Empty words are allowed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    letters: Vec<u8>,
}

impl Word {
    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        Word {
            alphabet,
            letters: Vec::new(),
        }
    }

    pub fn from_letters(alphabet: Arc<Alphabet>, letters: Vec<Letter>) -> Self {
        Word {
            alphabet,
            letters: letters.into_iter().map(|l| l.0).collect(),
        }
    }

    /// Builds a word from raw letter indices, validating each against the alphabet.
    pub fn from_ids(alphabet: Arc<Alphabet>, ids: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = ids.iter().find(|&&id| id as usize >= alphabet.len()) {
            return Err(Error::InvalidArgument(format!(
                "letter id {bad} out of range for alphabet of size {}",
                alphabet.len()
            )));
        }
        Ok(Word {
            alphabet,
            letters: ids,
        })
    }

    pub(crate) fn from_ids_unchecked(alphabet: Arc<Alphabet>, ids: Vec<u8>) -> Self {
        debug_assert!(ids.iter().all(|&id| (id as usize) < alphabet.len()));
        Word {
            alphabet,
            letters: ids,
        }
    }

    /// Parses plain text over the alphabet's display symbols.
    pub fn parse(alphabet: Arc<Alphabet>, text: &str) -> Result<Self> {
        let letters = text
            .chars()
            .map(|c| {
                alphabet.letter(c).map(|l| l.0).ok_or_else(|| {
                    Error::Parse(format!("symbol {c:?} is not in the alphabet"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word { alphabet, letters })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn ids(&self) -> &[u8] {
        &self.letters
    }

    pub fn letter(&self, i: usize) -> Letter {
        Letter(self.letters[i])
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.letters.iter().map(|&id| Letter(id))
    }

    /// The factor `x[start..start + len]` (0-based).
    pub fn factor(&self, start: usize, len: usize) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            letters: self.letters[start..start + len].to_vec(),
        }
    }

    pub fn same_alphabet(&self, other: &Word) -> bool {
        Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet
    }

    fn check_alphabet(&self, other: &Word) -> Result<()> {
        if self.same_alphabet(other) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.alphabet.symbols, other.alphabet.symbols
            )))
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .cmp(&other.letters)
            .then_with(|| self.alphabet.symbols.cmp(&other.alphabet.symbols))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &id in &self.letters {
            write!(f, "{}", self.alphabet.symbols[id as usize])?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

/// One real sample value per letter.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMap {
    values: Vec<f64>,
}

impl PotentialMap {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("potential map is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("potential value".into()));
        }
        Ok(PotentialMap { values })
    }

    pub fn value(&self, letter: Letter) -> f64 {
        self.values[letter.id()]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// False when two letters share a value; the operator then cannot see
    /// the letter distinction.
    pub fn is_injective(&self) -> bool {
        for (i, a) in self.values.iter().enumerate() {
            if self.values[i + 1..].contains(a) {
                return false;
            }
        }
        true
    }

    /// Samples the potential along a word.
    pub fn sample(&self, x: &Word) -> Vec<f64> {
        x.ids().iter().map(|&id| self.values[id as usize]).collect()
    }
}

/// Serialized form `{"letters": ["a","b"], "potential": [0.0, 1.0]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetSpec {
    pub letters: Vec<String>,
    pub potential: Vec<f64>,
}

impl AlphabetSpec {
    pub fn from_parts(alphabet: &Alphabet, potential: &PotentialMap) -> Self {
        AlphabetSpec {
            letters: alphabet.symbols().iter().map(|c| c.to_string()).collect(),
            potential: potential.values().to_vec(),
        }
    }

    pub fn into_parts(self) -> Result<(Arc<Alphabet>, PotentialMap)> {
        let alphabet = Alphabet::from_strings(&self.letters)?;
        if self.potential.len() != alphabet.len() {
            return Err(Error::Parse(format!(
                "{} letters but {} potential values",
                alphabet.len(),
                self.potential.len()
            )));
        }
        Ok((Arc::new(alphabet), PotentialMap::new(self.potential)?))
    }

    pub fn from_json(text: &str) -> Result<(Arc<Alphabet>, PotentialMap)> {
        serde_json::from_str::<AlphabetSpec>(text)?.into_parts()
    }
}

/// Number of (possibly overlapping) occurrences of `v` in `x`.
pub fn count_occurrences(v: &Word, x: &Word) -> Result<usize> {
    if v.is_empty() {
        return Err(Error::EmptyPattern);
    }
    v.check_alphabet(x)?;
    Ok(count_in(v.ids(), x.ids()))
}

pub(crate) fn count_in(v: &[u8], x: &[u8]) -> usize {
    if v.is_empty() || v.len() > x.len() {
        return 0;
    }
    x.windows(v.len()).filter(|w| *w == v).count()
}

pub fn concat(x: &Word, y: &Word) -> Result<Word> {
    x.check_alphabet(y)?;
    let mut letters = Vec::with_capacity(x.len() + y.len());
    letters.extend_from_slice(&x.letters);
    letters.extend_from_slice(&y.letters);
    Ok(Word {
        alphabet: x.alphabet.clone(),
        letters,
    })
}

/// All distinct length-`n` factors of `x`.
pub fn distinct_subwords(x: &Word, n: usize) -> Result<BTreeSet<Word>> {
    if n == 0 || n > x.len() {
        return Err(Error::InvalidArgument(format!(
            "factor length {n} must lie in 1..={}",
            x.len()
        )));
    }
    Ok(distinct_factors(x.ids(), n)
        .into_iter()
        .map(|f| Word::from_ids_unchecked(x.alphabet.clone(), f.to_vec()))
        .collect())
}

/// Distinct length-`n` factors of a raw letter slice, sorted.
pub(crate) fn distinct_factors(x: &[u8], n: usize) -> Vec<&[u8]> {
    if n == 0 || n > x.len() {
        return Vec::new();
    }
    let set: HashSet<&[u8]> = x.windows(n).collect();
    let mut out: Vec<&[u8]> = set.into_iter().collect();
    out.sort_unstable();
    out
}

/// `#_v(x) * |v| / |x|`, the weighted occurrence frequency.
pub fn weighted_frequency(v: &Word, x: &Word) -> Result<f64> {
    let count = count_occurrences(v, x)?;
    if x.len() < v.len() {
        return Err(Error::InvalidArgument(format!(
            "window length {} shorter than pattern length {}",
            x.len(),
            v.len()
        )));
    }
    Ok(count as f64 * v.len() as f64 / x.len() as f64)
}
