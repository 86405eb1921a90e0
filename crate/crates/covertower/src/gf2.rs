//! Vectors and null spaces over GF(2).

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf2Vec {
    len: usize,
    bits: Vec<u64>,
}

impl Gf2Vec {
    pub fn zeros(len: usize) -> Self {
        Gf2Vec {
            len,
            bits: vec![0; len.div_ceil(64)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(b: &[bool]) -> Self {
        let mut v = Self::zeros(b.len());
        for (i, &x) in b.iter().enumerate() {
            v.set(i, x);
        }
        v
    }

    /// The low `len` bits of `x`, bit `i` as entry `i`.
    pub fn from_u64(x: u64, len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len.min(64) {
            v.set(i, x >> i & 1 == 1);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, x: bool) {
        let m = 1u64 << (i % 64);
        if x {
            self.bits[i / 64] |= m;
        } else {
            self.bits[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| *b == 0)
    }

    pub fn weight(&self) -> u32 {
        self.bits.iter().map(|b| b.count_ones()).sum()
    }

    pub fn xor_assign(&mut self, other: &Gf2Vec) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &Gf2Vec) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }
}

impl fmt::Display for Gf2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vec({self})")
    }
}

impl std::str::FromStr for Gf2Vec {
    type Err = crate::error::CoverError;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        let b = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(crate::error::CoverError::Parse(format!("bad bit string {s:?}"))),
            })
            .collect::<crate::error::Result<Vec<bool>>>()?;
        Ok(Gf2Vec::from_bools(&b))
    }
}

impl Serialize for Gf2Vec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Gf2Vec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Row-reduces `rows` in place; returns the pivot column of each surviving row.
pub fn row_reduce(rows: &mut Vec<Gf2Vec>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : row · x = 0 for every row}`, one vector per free column.
pub fn null_space(rows: &[Gf2Vec], cols: usize) -> Vec<Gf2Vec> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = Gf2Vec::unit(cols, f);
            for (row, &p) in m.iter().zip(&pivots) {
                if row.get(f) {
                    x.set(p, true);
                }
            }
            x
        })
        .collect()
}

pub fn rank(rows: &[Gf2Vec], cols: usize) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m, cols).len()
}
