use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoverError, Result};

/// A word in signed generator indices: `i + 1` is generator `i`, `-(i + 1)` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(i: usize) -> Self {
        Word(vec![i as i32 + 1])
    }

    /// Freely reduces the letters.
    pub fn new(letters: Vec<i32>) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for l in letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != -w[1])
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::new(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    /// `[u, v] = u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    pub fn check(&self, generators: usize) -> Result<()> {
        match self.0.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > generators) {
            Some(&letter) => Err(CoverError::BadLetter { letter, generators }),
            None => Ok(()),
        }
    }

    /// Exponent parity of each generator, packed as bits.
    pub fn parity(&self, generators: usize) -> crate::gf2::Gf2Vec {
        let mut v = crate::gf2::Gf2Vec::zeros(generators);
        for l in &self.0 {
            v.flip(l.unsigned_abs() as usize - 1);
        }
        v
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut s = vec![0; generators];
        for l in &self.0 {
            s[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        s
    }

    /// Text form with the given generator names; inverses are upper-cased.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&l| {
                let name = &names[l.unsigned_abs() as usize - 1];
                if l < 0 {
                    name.to_uppercase()
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(if names.iter().any(|n| n.contains('_')) { " " } else { "" })
    }

    /// Parses `a1b1A1B1`-style words over the standard surface generators
    /// (`1` or an empty string is the identity).
    pub fn parse_surface(s: &str, genus: usize) -> Result<Word> {
        let bad = || CoverError::Parse(format!("cannot read word {s:?}"));
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace() && *c != '*' && *c != ',').collect();
        if chars.is_empty() || chars == ['1'] {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (offset, sign) = match chars[i] {
                'a' => (0, 1),
                'b' => (1, 1),
                'A' => (0, -1),
                'B' => (1, -1),
                _ => return Err(bad()),
            };
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let idx: usize = chars[start..i].iter().collect::<String>().parse().map_err(|_| bad())?;
            if idx == 0 || idx > genus {
                return Err(CoverError::Parse(format!("handle index {idx} outside genus {genus} in {s:?}")));
            }
            letters.push(sign * (2 * (idx as i32 - 1) + offset + 1));
        }
        Ok(Word::new(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All freely reduced non-empty words of length at most `max_len` over `generators` letters.
pub fn all_reduced_words(generators: usize, max_len: usize) -> Vec<Word> {
    let letters: Vec<i32> = (1..=generators as i32).flat_map(|i| [i, -i]).collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<i32>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(Word));
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        assert!(Word::new(vec![1, -1]).is_empty());
        assert_eq!(Word::new(vec![2, 1, -1, 3]), Word(vec![2, 3]));
        assert_eq!(Word(vec![1, 2]).inverse(), Word(vec![-2, -1]));
    }

    #[test]
    fn parse_and_print() {
        let w = Word::parse_surface("a1b1A1B1", 2).unwrap();
        assert_eq!(w, Word(vec![1, 2, -1, -2]));
        let names: Vec<String> = ["a1", "b1", "a2", "b2"].iter().map(|s| s.to_string()).collect();
        assert_eq!(w.to_text(&names), "a1b1A1B1");
        assert!(Word::parse_surface("a3", 2).is_err());
        assert!(Word::parse_surface("c1", 2).is_err());
        assert_eq!(Word::parse_surface("1", 2).unwrap(), Word::empty());
    }

    #[test]
    fn word_counts() {
        assert_eq!(all_reduced_words(4, 4).len(), 8 + 56 + 392 + 2744);
        assert!(all_reduced_words(4, 3).iter().all(|w| w.is_reduced()));
    }
}
