//! Towers of double covers of closed surfaces.
//!
//! A double cover of a surface is the kernel of a cocycle `π1 -> Z/2`; a closed
//! curve lifts to an open path exactly when the cocycle is 1 on it. Stacking
//! covers chosen greedily opens every curve of a finite list, which is the
//! finite shadow of a lamination whose leaves are all simply connected.

pub mod cosets;
pub mod cover;
pub mod error;
pub mod gf2;
pub mod group;
pub mod tower;
pub mod word;

pub use cosets::{verify_tower, SheetAction, VerifiedWord, VerifyReport};
pub use cover::{cocycle_eval, double_cover, CoverStep, Lift};
pub use error::{CoverError, Result};
pub use gf2::Gf2Vec;
pub use group::{dehn, Presentation, SurfaceGroup};
pub use tower::{open_all, CoverTower, TowerLevel, TowerOptions, WordStatus};
pub use word::{all_reduced_words, Word};
