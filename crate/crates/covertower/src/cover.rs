//! Double covers as kernels of cocycles `π1 -> Z/2`, presented by
//! Reidemeister–Schreier with coset representatives `{1, t}`.

use serde::{Deserialize, Serialize};

use crate::error::{CoverError, Result};
use crate::gf2::Gf2Vec;
use crate::group::Presentation;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverStep {
    pub base: Presentation,
    pub cocycle: Gf2Vec,
    /// Index of the generator `t` with `c(t) = 1`; the cosets are represented by `1` and `t`.
    pub transversal: usize,
    pub cover: Presentation,
    /// `schreier[x][i]` is the cover generator `rep(i) x rep(i + c(x))^-1`, or
    /// `None` for the trivial `t t^-1`.
    pub schreier: Vec<[Option<usize>; 2]>,
}

/// Outcome of lifting a closed curve of the base to the cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lift {
    Open,
    Closed(Word),
}

pub fn cocycle_eval(c: &Gf2Vec, w: &Word) -> bool {
    w.letters().iter().filter(|l| c.get(l.unsigned_abs() as usize - 1)).count() % 2 == 1
}

/// The connected double cover defined by a nonzero cocycle.
pub fn double_cover(base: &Presentation, c: &Gf2Vec) -> Result<CoverStep> {
    base.check_cocycle(c)?;
    let Some(t) = c.ones().next() else {
        return Err(CoverError::ZeroCocycle);
    };
    let n = base.num_generators();
    let mut schreier = vec![[None, None]; n];
    let mut generators = Vec::with_capacity(2 * n - 1);
    for i in 0..2 {
        for (x, slot) in schreier.iter_mut().enumerate() {
            if i == 0 && x == t {
                continue;
            }
            slot[i] = Some(generators.len());
            generators.push(format!("{}_{i}", base.generators[x]));
        }
    }
    let mut step = CoverStep {
        base: base.clone(),
        cocycle: c.clone(),
        transversal: t,
        cover: Presentation {
            generators,
            relators: Vec::new(),
        },
        schreier,
    };
    step.cover.relators = base
        .relators
        .iter()
        .flat_map(|r| [step.rewrite_from(r, 0).0, step.rewrite_from(r, 1).0])
        .collect();
    Ok(step)
}

impl CoverStep {
    pub fn opens(&self, w: &Word) -> bool {
        cocycle_eval(&self.cocycle, w)
    }

    /// Reads `w` from coset `start`; returns the cover word and the final coset.
    pub fn rewrite_from(&self, w: &Word, start: usize) -> (Word, usize) {
        let mut coset = start;
        let mut out = Vec::with_capacity(w.len());
        for &l in w.letters() {
            let x = l.unsigned_abs() as usize - 1;
            let cx = self.cocycle.get(x) as usize;
            if l > 0 {
                if let Some(y) = self.schreier[x][coset] {
                    out.push(y as i32 + 1);
                }
                coset ^= cx;
            } else {
                coset ^= cx;
                if let Some(y) = self.schreier[x][coset] {
                    out.push(-(y as i32 + 1));
                }
            }
        }
        (Word::new(out), coset)
    }

    /// The image in the cover group of a word with `c(w) = 0`, read from the identity coset.
    pub fn rewrite(&self, w: &Word) -> Option<Word> {
        let (u, end) = self.rewrite_from(w, 0);
        (end == 0).then_some(u)
    }

    /// `Open` iff `c(w) = 1`; otherwise the closed lift based at the identity coset.
    pub fn lift_word(&self, w: &Word) -> Lift {
        match self.rewrite(w) {
            None => Lift::Open,
            Some(u) => Lift::Closed(u),
        }
    }
}
