use serde::{Deserialize, Serialize};

use crate::error::{CoverError, Result};
use crate::gf2::{null_space, rank, Gf2Vec};
use crate::word::Word;

/// A one-vertex presentation of a closed orientable surface group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// `χ = 1 - #generators + #relators` of the presentation 2-complex.
    pub fn euler_characteristic(&self) -> i64 {
        1 - self.generators.len() as i64 + self.relators.len() as i64
    }

    pub fn genus(&self) -> usize {
        ((2 - self.euler_characteristic()) / 2) as usize
    }

    /// Mod-2 exponent parities of the relators.
    pub fn relator_parities(&self) -> Vec<Gf2Vec> {
        let n = self.num_generators();
        self.relators.iter().map(|r| r.parity(n)).collect()
    }

    /// Basis of the cocycles `π1 -> Z/2`, i.e. of `H^1(·; Z/2)`.
    pub fn cocycle_basis(&self) -> Vec<Gf2Vec> {
        null_space(&self.relator_parities(), self.num_generators())
    }

    /// `dim H_1(·; Z/2)`.
    pub fn mod2_betti(&self) -> usize {
        self.num_generators() - rank(&self.relator_parities(), self.num_generators())
    }

    pub fn check_cocycle(&self, c: &Gf2Vec) -> Result<()> {
        if c.len() != self.num_generators() {
            return Err(CoverError::CocycleLength {
                expected: self.num_generators(),
                got: c.len(),
            });
        }
        match self.relator_parities().iter().position(|p| p.dot(c)) {
            Some(relator) => Err(CoverError::NotACocycle { relator }),
            None => Ok(()),
        }
    }
}

/// `π1` of the closed orientable surface of genus `g`, with generators
/// `a1, b1, ..., ag, bg` and relator `Π [a_i, b_i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceGroup {
    pub genus: usize,
}

impl SurfaceGroup {
    pub fn new(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(CoverError::BadGenus(genus));
        }
        Ok(SurfaceGroup { genus })
    }

    pub fn num_generators(&self) -> usize {
        2 * self.genus
    }

    pub fn a(&self, i: usize) -> Word {
        Word::gen(2 * (i - 1))
    }

    pub fn b(&self, i: usize) -> Word {
        Word::gen(2 * (i - 1) + 1)
    }

    pub fn names(&self) -> Vec<String> {
        (1..=self.genus).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect()
    }

    pub fn relator(&self) -> Word {
        let letters = (0..self.genus as i32)
            .flat_map(|i| [2 * i + 1, 2 * i + 2, -(2 * i + 1), -(2 * i + 2)])
            .collect();
        Word(letters)
    }

    pub fn presentation(&self) -> Presentation {
        Presentation {
            generators: self.names(),
            relators: vec![self.relator()],
        }
    }

    pub fn parse(&self, s: &str) -> Result<Word> {
        Word::parse_surface(s, self.genus)
    }

    pub fn text(&self, w: &Word) -> String {
        w.to_text(&self.names())
    }

    /// Free reduction followed by Dehn's algorithm (exponent sums in genus 1).
    /// Returns the reduced word and whether it represents the identity.
    pub fn reduce(&self, w: &Word) -> Result<(Word, bool)> {
        w.check(self.num_generators())?;
        let w = Word::new(w.0.clone());
        if self.genus == 1 {
            let trivial = w.exponent_sums(2).iter().all(|s| *s == 0);
            return Ok((w, trivial));
        }
        let w = dehn(&w, &self.relator());
        let trivial = w.is_empty();
        Ok((w, trivial))
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(self.reduce(w)?.1)
    }
}

/// Dehn's algorithm for a single relator satisfying small cancellation.
///
/// Repeatedly replaces a subword `u` of a cyclic conjugate `u v` of the relator
/// or its inverse with `|u| > |r|/2` by `v^-1`.
pub fn dehn(w: &Word, relator: &Word) -> Word {
    let n = relator.len();
    let mut cyclic: Vec<Vec<i32>> = Vec::with_capacity(2 * n);
    for r in [relator.0.clone(), relator.inverse().0] {
        for s in 0..n {
            cyclic.push(r[s..].iter().chain(&r[..s]).copied().collect());
        }
    }
    let need = n / 2 + 1;
    let mut cur = Word::new(w.0.clone()).0;
    'outer: loop {
        for p in 0..cur.len() {
            for c in &cyclic {
                let m = cur[p..].iter().zip(c).take_while(|(a, b)| a == b).count();
                if m >= need {
                    let rest: Vec<i32> = c[m..].iter().rev().map(|l| -l).collect();
                    let mut next = cur[..p].to_vec();
                    next.extend(rest);
                    next.extend_from_slice(&cur[p + m..]);
                    cur = Word::new(next).0;
                    continue 'outer;
                }
            }
        }
        return Word(cur);
    }
}
