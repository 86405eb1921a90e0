//! Exact dyadic arithmetic on the circle and the frequency constants.

mod angle;
mod constants;
mod lemma_mod;
mod split;

pub use angle::{Budget, DyadicAngle};
pub use constants::{
    alpha_partial, alpha_split, frac_n_alpha, v, v_seq, AlphaPartial, FracNAlpha, VSeq, MAX_INDEX, V,
};
pub use lemma_mod::{lemma_mod_check, LemmaModReport, MultipleOfAlpha};
pub use split::{FarTerm, SplitAngle};
