//! Greedy towers of double covers that open a finite list of closed curves.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{double_cover, CoverStep, Lift};
use crate::error::{CoverError, Result};
use crate::gf2::Gf2Vec;
use crate::group::{Presentation, SurfaceGroup};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerOptions {
    pub max_depth: usize,
    pub seed: u64,
    /// Cocycle spaces up to this dimension are searched exhaustively.
    pub exhaustive_dim: usize,
    /// Random starts for the local search in larger spaces.
    pub restarts: usize,
    /// Among equally good cocycles, prefer the one leaving the most closed lifts
    /// homologically nontrivial mod 2 in the cover; at most this many are compared.
    pub lookahead: usize,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            max_depth: 6,
            seed: 0,
            exhaustive_dim: 16,
            restarts: 64,
            lookahead: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordStatus {
    pub word: Word,
    pub text: String,
    /// Level at which the lift became open.
    pub open_level: Option<usize>,
    /// The current closed lift (over the top cover's generators) while still closed.
    pub lift: Option<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerLevel {
    pub level: usize,
    pub base_genus: usize,
    pub base_generators: usize,
    pub cover_genus: usize,
    pub transversal: usize,
    pub cocycle: Gf2Vec,
    /// `exhaustive` or `random`.
    pub search: String,
    pub candidates: u64,
    pub opened: usize,
    pub closed_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverTower {
    pub genus: usize,
    pub max_depth: usize,
    pub levels: Vec<TowerLevel>,
    pub words: Vec<WordStatus>,
    pub complete: bool,
    #[serde(skip)]
    pub steps: Vec<CoverStep>,
}

impl CoverTower {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn survivors(&self) -> impl Iterator<Item = &WordStatus> {
        self.words.iter().filter(|w| w.open_level.is_none())
    }
}

struct Choice {
    cocycle: Gf2Vec,
    search: &'static str,
    candidates: u64,
}

/// Builds a tower level by level until every word has an open lift or `max_depth` is reached.
pub fn open_all(group: &SurfaceGroup, words: &[Word], opts: &TowerOptions) -> Result<CoverTower> {
    let mut status = Vec::with_capacity(words.len());
    for w in words {
        if group.is_trivial(w)? {
            return Err(CoverError::TrivialWord(group.text(w)));
        }
        let w = Word::new(w.0.clone());
        status.push(WordStatus {
            text: group.text(&w),
            lift: Some(w.clone()),
            word: w,
            open_level: None,
        });
    }
    let mut levels = Vec::new();
    let mut steps: Vec<CoverStep> = Vec::new();
    let mut current = group.presentation();
    for level in 1..=opts.max_depth {
        let live: Vec<usize> = (0..status.len()).filter(|&i| status[i].open_level.is_none()).collect();
        if live.is_empty() {
            break;
        }
        let lifts: Vec<&Word> = live.iter().map(|&i| status[i].lift.as_ref().expect("closed lift")).collect();
        let choice = choose_cocycle(&current, &lifts, opts, level as u64)?;
        let step = double_cover(&current, &choice.cocycle)?;
        let outcomes: Vec<Lift> = lifts.par_iter().map(|w| step.lift_word(w)).collect();
        let mut opened = 0;
        for (&i, out) in live.iter().zip(outcomes) {
            match out {
                Lift::Open => {
                    status[i].open_level = Some(level);
                    status[i].lift = None;
                    opened += 1;
                }
                Lift::Closed(u) => status[i].lift = Some(u),
            }
        }
        levels.push(TowerLevel {
            level,
            base_genus: current.genus(),
            base_generators: current.num_generators(),
            cover_genus: step.cover.genus(),
            transversal: step.transversal,
            cocycle: choice.cocycle,
            search: choice.search.to_string(),
            candidates: choice.candidates,
            opened,
            closed_after: live.len() - opened,
        });
        current = step.cover.clone();
        steps.push(step);
    }
    let complete = status.iter().all(|s| s.open_level.is_some());
    Ok(CoverTower {
        genus: group.genus,
        max_depth: opts.max_depth,
        levels,
        words: status,
        complete,
        steps,
    })
}

/// Coordinates of each lift's parity in the dual of the cocycle basis, with multiplicities.
fn projected(basis: &[Gf2Vec], lifts: &[&Word], n: usize) -> Vec<(Gf2Vec, usize)> {
    let mut counts: BTreeMap<Gf2Vec, usize> = BTreeMap::new();
    for w in lifts {
        let p = w.parity(n);
        let q = Gf2Vec::from_bools(&basis.iter().map(|b| b.dot(&p)).collect::<Vec<_>>());
        *counts.entry(q).or_default() += 1;
    }
    counts.into_iter().filter(|(q, _)| !q.is_zero()).collect()
}

fn combine(basis: &[Gf2Vec], lambda: &Gf2Vec, n: usize) -> Gf2Vec {
    let mut c = Gf2Vec::zeros(n);
    for i in lambda.ones() {
        c.xor_assign(&basis[i]);
    }
    c
}

fn score(lambda: &Gf2Vec, groups: &[(Gf2Vec, usize)]) -> usize {
    groups.iter().filter(|(q, _)| lambda.dot(q)).map(|(_, k)| k).sum()
}

fn choose_cocycle(p: &Presentation, lifts: &[&Word], opts: &TowerOptions, salt: u64) -> Result<Choice> {
    let n = p.num_generators();
    let basis = p.cocycle_basis();
    let d = basis.len();
    if d == 0 {
        return Err(CoverError::Malformed {
            level: salt as usize,
            reason: "presentation has no nonzero cocycle".into(),
        });
    }
    let groups = projected(&basis, lifts, n);
    let (mut ties, search, candidates): (Vec<Gf2Vec>, &'static str, u64) = if d <= opts.exhaustive_dim {
        // u32 coordinates make the exhaustive sweep cheap
        let packed: Vec<(u32, usize)> = groups
            .iter()
            .map(|(q, k)| (q.ones().fold(0u32, |acc, i| acc | 1 << i), *k))
            .collect();
        let total = (1u64 << d) - 1;
        let scores: Vec<usize> = (1..=total as u32)
            .into_par_iter()
            .map(|lam| {
                packed
                    .iter()
                    .filter(|(q, _)| (lam & q).count_ones() % 2 == 1)
                    .map(|(_, k)| k)
                    .sum()
            })
            .collect();
        let best = scores.iter().copied().max().unwrap_or(0);
        let ties = scores
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == best)
            .take(opts.lookahead.max(1))
            .map(|(i, _)| Gf2Vec::from_u64(i as u64 + 1, d))
            .collect();
        (ties, "exhaustive", total)
    } else {
        let starts: Vec<(usize, Gf2Vec)> = (0..opts.restarts.max(1))
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
                rng.set_stream(r as u64);
                let mut lam = Gf2Vec::from_bools(&(0..d).map(|_| rng.random::<bool>()).collect::<Vec<_>>());
                if lam.is_zero() {
                    lam.set(0, true);
                }
                let mut s = score(&lam, &groups);
                loop {
                    let mut improved = false;
                    for i in 0..d {
                        lam.flip(i);
                        let t = score(&lam, &groups);
                        if t > s && !lam.is_zero() {
                            s = t;
                            improved = true;
                        } else {
                            lam.flip(i);
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                (s, lam)
            })
            .collect();
        let best = starts.iter().map(|(s, _)| *s).max().unwrap_or(0);
        let mut ties: Vec<Gf2Vec> = starts.into_iter().filter(|(s, _)| *s == best).map(|(_, l)| l).collect();
        ties.sort();
        ties.dedup();
        (ties, "random", opts.restarts as u64)
    };
    if ties.len() > 1 {
        let keep: Vec<&Word> = lifts.to_vec();
        let second: Vec<usize> = ties
            .par_iter()
            .map(|lam| lookahead(p, &combine(&basis, lam, n), &keep))
            .collect();
        let best = second.iter().copied().max().unwrap_or(0);
        let pick = second.iter().position(|s| *s == best).unwrap_or(0);
        ties = vec![ties.swap_remove(pick)];
    }
    Ok(Choice {
        cocycle: combine(&basis, &ties[0], n),
        search,
        candidates,
    })
}

/// Closed lifts that are nonzero in `H_1(cover; Z/2)` and so can open one level up.
fn lookahead(p: &Presentation, c: &Gf2Vec, lifts: &[&Word]) -> usize {
    let Ok(step) = double_cover(p, c) else {
        return 0;
    };
    let basis = step.cover.cocycle_basis();
    let m = step.cover.num_generators();
    lifts
        .iter()
        .filter_map(|w| step.rewrite(w))
        .filter(|u| {
            let par = u.parity(m);
            basis.iter().any(|b| b.dot(&par))
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_open_at_once() {
        let g = SurfaceGroup::new(2).unwrap();
        let words: Vec<Word> = (1..=4).flat_map(|i| [Word(vec![i]), Word(vec![-i])]).collect();
        let t = open_all(
            &g,
            &words,
            &TowerOptions {
                max_depth: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(t.complete);
        assert_eq!(t.levels[0].cocycle.to_string(), "1111");
    }

    #[test]
    fn empty_list_gives_empty_tower() {
        let g = SurfaceGroup::new(2).unwrap();
        let t = open_all(&g, &[], &TowerOptions::default()).unwrap();
        assert!(t.levels.is_empty() && t.complete);
    }

    #[test]
    fn trivial_word_rejected() {
        let g = SurfaceGroup::new(2).unwrap();
        let r = open_all(&g, &[g.relator()], &TowerOptions::default());
        assert!(matches!(r, Err(CoverError::TrivialWord(_))));
    }
}
