use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::angle::{Budget, DyadicAngle};
use super::split::SplitAngle;
use crate::error::{Error, Result};

/// `v_1 .. v_4` as machine integers. `v_5` has about 412 billion bits.
pub const V: [u64; 4] = [1, 4, 37, 412_316_860_454];

/// Largest index whose `v_k` fits in a machine word.
pub const MAX_INDEX: usize = 4;

/// `v_k` for `1 <= k <= 4`.
pub fn v(k: usize) -> u64 {
    assert!((1..=MAX_INDEX).contains(&k), "v_{k} is not representable");
    V[k - 1]
}

/// The exponents `v_1 < v_2 < ... < v_K`; `n_k = 2^{v_k}` is never built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VSeq {
    values: Vec<BigUint>,
}

impl VSeq {
    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.values.iter().map(|x| x.to_u64()).collect()
    }
}

/// Evaluates `v_1 = 1`, `v_{k+1} = k 2^{v_k} + v_k + 1`.
///
/// Building `v_{k+1}` needs a `v_k`-bit integer, so the budget caps `v_k`.
pub fn v_seq(k_max: usize, budget: &Budget) -> Result<VSeq> {
    if k_max == 0 {
        return Err(Error::Precondition("v_seq needs K >= 1".into()));
    }
    let mut values = Vec::with_capacity(k_max);
    let mut cur = BigUint::one();
    values.push(cur.clone());
    for k in 1..k_max {
        let shift = cur
            .to_u64()
            .filter(|&s| s <= budget.max_bits)
            .ok_or_else(|| Error::budget(&cur, budget.max_bits))?;
        cur = (BigUint::from(k) << shift) + &cur + 1u32;
        values.push(cur.clone());
    }
    Ok(VSeq { values })
}

/// The partial sum `α_K = Σ_{k<=K} 2^{-v_k}` with its tail bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaPartial {
    pub value: DyadicAngle,
    pub k: usize,
    /// The tail `Σ_{k>K} 2^{-v_k}` is below `2^{-tail_neg_log2}`.
    pub tail_neg_log2: u64,
}

pub fn alpha_partial(k_max: usize, budget: &Budget) -> Result<AlphaPartial> {
    if k_max == 0 {
        return Err(Error::Precondition("alpha_partial needs K >= 1".into()));
    }
    if k_max >= MAX_INDEX {
        return Err(Error::budget(v(MAX_INDEX), budget.max_bits));
    }
    let mut value = DyadicAngle::zero();
    for k in 1..=k_max {
        budget.check(v(k))?;
        value = value.add_mod1(&DyadicAngle::pow2_neg(v(k)));
    }
    Ok(AlphaPartial {
        value,
        k: k_max,
        // tail < 2 * 2^{-v_{K+1}}
        tail_neg_log2: v(k_max + 1) - 1,
    })
}

/// `α` through index `k_max <= 4` in split form; `k_max = 4` carries `2^{-v_4}` as a far term.
///
/// This is the frequency used by the dynamics: its `k = 4` term is what makes
/// the third series term move under the steering blocks.
pub fn alpha_split(k_max: usize, budget: &Budget) -> Result<SplitAngle> {
    if !(1..=MAX_INDEX).contains(&k_max) {
        return Err(Error::InvalidArgument(format!(
            "alpha cutoff must be in 1..={MAX_INDEX}, got {k_max}"
        )));
    }
    let mut a = SplitAngle::zero();
    for k in 1..=k_max {
        a = a.add(&SplitAngle::pow2_neg(v(k), budget)?, budget)?;
    }
    Ok(a)
}

/// `n_k α mod 1` computed from the shifted tail, with the `2^{-k n_k}` bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FracNAlpha {
    pub k: usize,
    pub cutoff: usize,
    pub value: SplitAngle,
    /// `k n_k`; the claim is `value < 2^{-bound_neg_log2}`.
    pub bound_neg_log2: u64,
    pub bound_holds: bool,
}

/// `Σ_{l=k+1..K} 2^{v_k - v_l}`: the fractional part of `n_k α_K`.
pub fn frac_n_alpha(k: usize, cutoff: usize, budget: &Budget) -> Result<FracNAlpha> {
    if k == 0 || cutoff <= k {
        return Err(Error::Precondition(format!(
            "frac_n_alpha needs 1 <= k < K, got k={k}, K={cutoff}"
        )));
    }
    if cutoff > MAX_INDEX {
        return Err(Error::budget(format!("v_{}", cutoff), budget.max_bits));
    }
    let mut value = SplitAngle::zero();
    for l in k + 1..=cutoff {
        value = value.add(&SplitAngle::pow2_neg(v(l) - v(k), budget)?, budget)?;
    }
    let bound_neg_log2 = (k as u64) << v(k);
    Ok(FracNAlpha {
        k,
        cutoff,
        bound_holds: value.lt_pow2_neg(bound_neg_log2),
        value,
        bound_neg_log2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_sequence_values() {
        let b = Budget::default();
        assert_eq!(v_seq(1, &b).unwrap().to_u64s().unwrap(), vec![1]);
        assert_eq!(v_seq(4, &b).unwrap().to_u64s().unwrap(), V.to_vec());
        assert!(matches!(v_seq(5, &b), Err(Error::DigitBudget { .. })));
        assert!(v_seq(0, &b).is_err());
    }

    #[test]
    fn alpha_partial_sums() {
        let b = Budget::default();
        assert_eq!(alpha_partial(1, &b).unwrap().value, DyadicAngle::pow2_neg(1));
        let a3 = alpha_partial(3, &b).unwrap();
        assert_eq!(a3.value.to_hex(), "0x1200000001p-37");
        let a2 = alpha_partial(2, &b).unwrap();
        assert_eq!(a3.value.sub_mod1(&a2.value), DyadicAngle::pow2_neg(37));
        assert!(alpha_partial(4, &b).is_err());
    }

    #[test]
    fn frac_values_and_bounds() {
        let b = Budget::default();
        let f = frac_n_alpha(1, 3, &b).unwrap();
        assert_eq!(
            f.value.head(),
            &DyadicAngle::pow2_neg(3).add_mod1(&DyadicAngle::pow2_neg(36))
        );
        assert!(f.bound_holds);
        let f = frac_n_alpha(2, 3, &b).unwrap();
        assert_eq!(f.value.head(), &DyadicAngle::pow2_neg(33));
        assert!(f.bound_holds);
        let f = frac_n_alpha(3, 4, &b).unwrap();
        assert!(!f.value.is_dense());
        assert!(f.bound_holds);
        assert!(frac_n_alpha(1, 1, &b).is_err());
    }
}
