//! Independent check of a tower: base words act on the `2^D` sheets of the
//! composite cover, tracked as paths of `Z/2` cosets, one coordinate per level.
//! No presentation of any cover is built and no word is rewritten.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoverError, Result};
use crate::group::SurfaceGroup;
use crate::tower::CoverTower;
use crate::word::Word;

struct Level {
    n: usize,
    t: usize,
    c: Vec<u8>,
}

impl Level {
    /// Cover generator `rep(i) x rep(i + c(x))^-1`: coset `0` lists `x != t`, then coset `1` lists every `x`.
    fn index(&self, i: u8, x: usize) -> Option<usize> {
        match i {
            0 if x == self.t => None,
            0 => Some(x - usize::from(x > self.t)),
            _ => Some(self.n - 1 + x),
        }
    }
}

/// Sheet tables rebuilt from a tower's cocycles alone.
pub struct SheetAction {
    levels: Vec<Level>,
}

impl SheetAction {
    pub fn from_tower(tower: &CoverTower) -> Result<Self> {
        let mut n = 2 * tower.genus;
        let mut levels = Vec::with_capacity(tower.levels.len());
        for (j, l) in tower.levels.iter().enumerate() {
            let bad = |reason: &str| CoverError::Malformed {
                level: j + 1,
                reason: reason.to_string(),
            };
            if l.base_generators != n || l.cocycle.len() != n {
                return Err(bad("generator count does not follow n -> 2n - 1"));
            }
            if l.transversal >= n || !l.cocycle.get(l.transversal) {
                return Err(bad("transversal generator must have cocycle value 1"));
            }
            levels.push(Level {
                n,
                t: l.transversal,
                c: (0..n).map(|x| l.cocycle.get(x) as u8).collect(),
            });
            n = 2 * n - 1;
        }
        Ok(SheetAction { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn letter(&self, j: usize, x: usize, inverse: bool, path: &mut [u8]) {
        let Some(l) = self.levels.get(j) else {
            return;
        };
        let i = path[0];
        let target = i ^ l.c[x];
        // reading x forward leaves coset i; reading it backwards arrives from i + c(x)
        let y = if inverse { l.index(target, x) } else { l.index(i, x) };
        path[0] = target;
        if let Some(y) = y {
            self.letter(j + 1, y, inverse, &mut path[1..]);
        }
    }

    /// The sheet reached by reading `w` from `sheet`.
    pub fn act(&self, w: &Word, sheet: &[u8]) -> Vec<u8> {
        let mut path = sheet.to_vec();
        for &l in w.letters() {
            self.letter(0, l.unsigned_abs() as usize - 1, l < 0, &mut path);
        }
        path
    }

    /// First level at which the lift from the base sheet is open.
    pub fn open_level(&self, w: &Word) -> Option<usize> {
        let end = self.act(w, &vec![0; self.depth()]);
        end.iter().position(|b| *b != 0).map(|k| k + 1)
    }

    /// First level at which no lift of `w` from any sheet is closed.
    pub fn all_lifts_open_level(&self, w: &Word) -> Option<usize> {
        let d = self.depth();
        let moved: Vec<Option<usize>> = (0..1usize << d)
            .map(|s| {
                let sheet: Vec<u8> = (0..d).map(|k| (s >> k & 1) as u8).collect();
                let end = self.act(w, &sheet);
                end.iter().zip(&sheet).position(|(a, b)| a != b).map(|k| k + 1)
            })
            .collect();
        moved
            .iter()
            .try_fold(0, |acc, m| m.map(|k| acc.max(k)))
            .filter(|k| *k > 0)
    }

    /// Whether `w` fixes every sheet, as the base relator must.
    pub fn acts_trivially(&self, w: &Word) -> bool {
        let d = self.depth();
        (0..1usize << d).all(|s| {
            let sheet: Vec<u8> = (0..d).map(|k| (s >> k & 1) as u8).collect();
            self.act(w, &sheet) == sheet
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedWord {
    pub text: String,
    pub claimed: Option<usize>,
    pub oracle: Option<usize>,
    pub all_lifts_open_level: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub genus: usize,
    pub depth: usize,
    pub words: Vec<VerifiedWord>,
    pub all_open: bool,
}

fn level_text(l: Option<usize>) -> String {
    l.map_or_else(|| "closed".to_string(), |k| format!("open at level {k}"))
}

/// Confirms every open/closed claim of `tower` for `words` with the sheet action.
pub fn verify_tower(tower: &CoverTower, words: &[Word]) -> Result<VerifyReport> {
    let group = SurfaceGroup::new(tower.genus)?;
    let action = SheetAction::from_tower(tower)?;
    if !action.acts_trivially(&group.relator()) {
        return Err(CoverError::Malformed {
            level: action.depth(),
            reason: "the surface relator moves a sheet: some cocycle is not a homomorphism".into(),
        });
    }
    let mut checked = Vec::with_capacity(words.len());
    for w in words {
        if group.is_trivial(w)? {
            return Err(CoverError::TrivialWord(group.text(w)));
        }
        checked.push(Word::new(w.0.clone()));
    }
    let results: Vec<Result<VerifiedWord>> = checked
        .par_iter()
        .map(|w| {
            let text = group.text(w);
            let claimed = tower
                .words
                .iter()
                .find(|s| &s.word == w)
                .ok_or_else(|| CoverError::Mismatch {
                    word: text.clone(),
                    claimed: "absent".into(),
                    found: "a target word".into(),
                })?
                .open_level;
            let oracle = action.open_level(w);
            if claimed != oracle {
                return Err(CoverError::Mismatch {
                    word: text,
                    claimed: level_text(claimed),
                    found: level_text(oracle),
                });
            }
            Ok(VerifiedWord {
                text,
                claimed,
                oracle,
                all_lifts_open_level: action.all_lifts_open_level(w),
            })
        })
        .collect();
    let words = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        genus: tower.genus,
        depth: action.depth(),
        all_open: words.iter().all(|w| w.oracle.is_some()),
        words,
    })
}
