use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

/// A substitution rule: one nonempty image word per letter.
#[derive(Debug, Clone, PartialEq)]
pub struct Substitution {
    alphabet: Arc<Alphabet>,
    rules: Vec<Vec<u8>>,
}

impl Substitution {
    pub fn new(alphabet: Arc<Alphabet>, rules: Vec<Word>) -> Result<Self> {
        if rules.len() != alphabet.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rules for an alphabet of {} letters",
                rules.len(),
                alphabet.len()
            )));
        }
        let mut images = Vec::with_capacity(rules.len());
        for (i, rule) in rules.into_iter().enumerate() {
            if rule.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "rule image of letter {:?} is empty",
                    alphabet.symbols()[i]
                )));
            }
            if **rule.alphabet() != *alphabet {
                return Err(Error::AlphabetMismatch(format!(
                    "rule image {rule} is over a different alphabet"
                )));
            }
            images.push(rule.ids().to_vec());
        }
        Ok(Substitution {
            alphabet,
            rules: images,
        })
    }

    /// Convenience constructor from `(symbol, image)` text pairs, in alphabet order.
    pub fn from_text(symbols: &[char], images: &[&str]) -> Result<Self> {
        let alphabet = Arc::new(Alphabet::new(symbols.to_vec())?);
        let rules = images
            .iter()
            .map(|s| Word::parse(alphabet.clone(), s))
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(alphabet, rules)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn rule(&self, letter: Letter) -> Word {
        Word::from_ids_unchecked(self.alphabet.clone(), self.rules[letter.id()].clone())
    }

    /// Entry `[i][j]` counts letter `j` in the image of letter `i`.
    pub fn abelianization(&self) -> Vec<Vec<u64>> {
        let n = self.alphabet.len();
        self.rules
            .iter()
            .map(|img| {
                let mut row = vec![0u64; n];
                for &c in img {
                    row[c as usize] += 1;
                }
                row
            })
            .collect()
    }

    pub fn apply(&self, x: &Word) -> Result<Word> {
        if **x.alphabet() != *self.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "word {x} is not over the substitution alphabet"
            )));
        }
        Ok(Word::from_ids_unchecked(
            self.alphabet.clone(),
            self.apply_ids(x.ids()),
        ))
    }

    pub(crate) fn apply_ids(&self, x: &[u8]) -> Vec<u8> {
        let len: usize = x.iter().map(|&c| self.rules[c as usize].len()).sum();
        let mut out = Vec::with_capacity(len);
        for &c in x {
            out.extend_from_slice(&self.rules[c as usize]);
        }
        out
    }

    /// Length of the `k`-th iterate of `seed`, saturating at `u128::MAX`.
    pub fn iterate_len(&self, seed: Letter, k: usize) -> u128 {
        let n = self.alphabet.len();
        let m = self.abelianization();
        let mut counts = vec![0u128; n];
        counts[seed.id()] = 1;
        for _ in 0..k {
            let mut next = vec![0u128; n];
            for (i, &ci) in counts.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                for (j, &mij) in m[i].iter().enumerate() {
                    next[j] = next[j].saturating_add(ci.saturating_mul(mij as u128));
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }

    /// Applies the substitution `k` times to the one-letter word `seed`.
    pub fn iterate(&self, seed: Letter, k: usize, cap: usize) -> Result<Word> {
        if seed.id() >= self.alphabet.len() {
            return Err(Error::InvalidArgument("seed letter out of range".into()));
        }
        let len = self.iterate_len(seed, k);
        if len > cap as u128 {
            return Err(Error::CapExceeded {
                what: "iterate length",
                requested: len,
                cap: cap as u128,
            });
        }
        let mut w = vec![seed.id() as u8];
        for _ in 0..k {
            w = self.apply_ids(&w);
        }
        Ok(Word::from_ids_unchecked(self.alphabet.clone(), w))
    }

    /// First `len` letters of the iterates of `seed`, iterating until long enough.
    pub(crate) fn prefix_ids(&self, seed: Letter, len: usize, cap: usize) -> Result<Vec<u8>> {
        if len > cap {
            return Err(Error::CapExceeded {
                what: "window length",
                requested: len as u128,
                cap: cap as u128,
            });
        }
        let mut w = vec![seed.id() as u8];
        let mut stalled = 0;
        while w.len() < len {
            let next = self.apply_ids(&w);
            if next.len() == w.len() {
                stalled += 1;
                if stalled > self.alphabet.len() {
                    return Err(Error::InvalidArgument(
                        "seed iterates do not grow; substitution is length preserving".into(),
                    ));
                }
            }
            w = next;
        }
        w.truncate(len);
        Ok(w)
    }

    /// Some power `k <= (d-1)^2 + 1` of the abelianization is strictly positive.
    /// Positive powers stay positive, so repeated squaring past the bound decides it.
    pub fn is_primitive(&self) -> bool {
        let n = self.alphabet.len();
        let words = n.div_ceil(64);
        let full: Vec<u64> = (0..words)
            .map(|w| {
                let bits = (n - 64 * w).min(64);
                if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 }
            })
            .collect();
        let mut power: Vec<Vec<u64>> = self
            .abelianization()
            .into_iter()
            .map(|row| {
                let mut bits = vec![0u64; words];
                for (j, c) in row.into_iter().enumerate() {
                    if c > 0 {
                        bits[j / 64] |= 1 << (j % 64);
                    }
                }
                bits
            })
            .collect();
        let bound = (n - 1) * (n - 1) + 1;
        let mut exponent = 1usize;
        loop {
            if power.iter().all(|row| *row == full) {
                return true;
            }
            if exponent >= bound {
                return false;
            }
            let next: Vec<Vec<u64>> = power
                .iter()
                .map(|row| {
                    let mut acc = vec![0u64; words];
                    for k in 0..n {
                        if row[k / 64] >> (k % 64) & 1 == 1 {
                            for (a, b) in acc.iter_mut().zip(&power[k]) {
                                *a |= b;
                            }
                        }
                    }
                    acc
                })
                .collect();
            power = next;
            exponent *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn fibonacci() -> Substitution {
        Substitution::from_text(&['a', 'b'], &["ab", "a"]).unwrap()
    }

    fn word(sub: &Substitution, s: &str) -> Word {
        Word::parse(sub.alphabet().clone(), s).unwrap()
    }

    #[test]
    fn fibonacci_application() {
        let f = fibonacci();
        assert_eq!(f.apply(&word(&f, "a")).unwrap().to_string(), "ab");
        assert_eq!(f.apply(&word(&f, "ab")).unwrap().to_string(), "aba");
        let a = Letter::new(0, f.alphabet()).unwrap();
        assert_eq!(f.iterate(a, 2, 100).unwrap().to_string(), "aba");
        assert_eq!(f.iterate(a, 3, 100).unwrap().to_string(), "abaab");
    }

    #[test]
    fn iterate_examples() {
        let f = fibonacci();
        let a = Letter::new(0, f.alphabet()).unwrap();
        assert_eq!(f.iterate(a, 0, 100).unwrap().to_string(), "a");
        assert_eq!(f.iterate(a, 5, 100).unwrap().to_string(), "abaababaabaab");
        let tm = Substitution::from_text(&['a', 'b'], &["ab", "ba"]).unwrap();
        assert_eq!(tm.iterate(a, 3, 100).unwrap().to_string(), "abbabaab");
    }

    #[test]
    fn iterate_respects_cap() {
        let f = fibonacci();
        let a = Letter::new(0, f.alphabet()).unwrap();
        match f.iterate(a, 5, 12) {
            Err(Error::CapExceeded { requested, cap, .. }) => {
                assert_eq!((requested, cap), (13, 12));
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn primitivity() {
        assert!(fibonacci().is_primitive());
        assert!(!Substitution::from_text(&['a', 'b'], &["a", "b"]).unwrap().is_primitive());
        assert!(!Substitution::from_text(&['a', 'b'], &["ab", "b"]).unwrap().is_primitive());
        let rs = Substitution::from_text(&['a', 'b', 'c', 'd'], &["ab", "ac", "db", "dc"]).unwrap();
        assert!(rs.is_primitive());
        // irreducible but periodic
        assert!(!Substitution::from_text(&['a', 'b', 'c'], &["b", "c", "a"]).unwrap().is_primitive());
    }

    /// Successive powers up to the Wielandt bound, no squaring.
    fn primitive_by_powers(sub: &Substitution) -> bool {
        let m = sub.abelianization();
        let n = m.len();
        let base: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|&c| c > 0).collect()).collect();
        let mut p = base.clone();
        for _ in 0..(n - 1) * (n - 1) + 1 {
            if p.iter().all(|r| r.iter().all(|&b| b)) {
                return true;
            }
            p = (0..n)
                .map(|i| (0..n).map(|j| (0..n).any(|k| p[i][k] && base[k][j])).collect())
                .collect();
        }
        false
    }

    #[test]
    fn rejects_empty_images() {
        let alphabet = Arc::new(Alphabet::new(vec!['a', 'b']).unwrap());
        let rules = vec![
            Word::parse(alphabet.clone(), "ab").unwrap(),
            Word::empty(alphabet.clone()),
        ];
        assert!(Substitution::new(alphabet, rules).is_err());
    }

    #[test]
    fn every_letter_occurs_after_primitivity_bound() {
        let subs = [
            fibonacci(),
            Substitution::from_text(&['a', 'b'], &["ab", "aaa"]).unwrap(),
            Substitution::from_text(&['a', 'b', 'c', 'd'], &["ab", "ac", "db", "dc"]).unwrap(),
        ];
        for sub in &subs {
            let d = sub.alphabet().len();
            for seed in 0..d {
                let seed = Letter::new(seed, sub.alphabet()).unwrap();
                for k in (d - 1) * (d - 1) + 1..(d - 1) * (d - 1) + 4 {
                    let w = sub.iterate(seed, k, 1 << 20).unwrap();
                    for l in 0..d {
                        assert!(w.ids().contains(&(l as u8)));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn primitivity_matches_power_oracle(images in proptest::collection::vec(
            proptest::collection::vec(0u8..4, 1..4), 4)) {
            let alphabet = Arc::new(Alphabet::new(vec!['a', 'b', 'c', 'd']).unwrap());
            let rules = images
                .into_iter()
                .map(|ids| Word::from_ids(alphabet.clone(), ids).unwrap())
                .collect();
            let sub = Substitution::new(alphabet, rules).unwrap();
            prop_assert_eq!(sub.is_primitive(), primitive_by_powers(&sub));
        }

        #[test]
        fn length_homomorphism_and_concat(x in proptest::collection::vec(0u8..4, 0..30),
                                          y in proptest::collection::vec(0u8..4, 0..30)) {
            let rs = Substitution::from_text(&['a', 'b', 'c', 'd'], &["ab", "ac", "db", "dc"]).unwrap();
            let alphabet = rs.alphabet().clone();
            let xw = Word::from_ids(alphabet.clone(), x.clone()).unwrap();
            let yw = Word::from_ids(alphabet.clone(), y).unwrap();
            let image = rs.apply(&xw).unwrap();
            let expected: usize = x.iter().map(|&c| rs.rules[c as usize].len()).sum();
            prop_assert_eq!(image.len(), expected);
            let xy = crate::words::concat(&xw, &yw).unwrap();
            let lhs = rs.apply(&xy).unwrap();
            let rhs = crate::words::concat(&image, &rs.apply(&yw).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
