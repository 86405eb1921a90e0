use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::f_trunc;
use crate::dynamics::{Furstenberg, TorusPoint};
use crate::error::{Error, Result};
use crate::numeric::{cis_turns, ComplexSum};

/// Observables for orbit averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    One,
    Zeta1,
    Zeta2,
    /// `f_K` for the given `K`.
    FTrunc(usize),
}

impl Observable {
    pub fn eval(&self, p: &TorusPoint) -> Result<Complex64> {
        Ok(match self {
            Observable::One => Complex64::new(1.0, 0.0),
            Observable::Zeta1 => cis_turns(p.theta1.to_centered_f64()),
            Observable::Zeta2 => cis_turns(p.theta2.to_centered_f64()),
            Observable::FTrunc(k) => f_trunc(p, *k)?,
        })
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// `one`, `zeta1`, `zeta2`, `f` (with `K = 1`) or `f:K`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "one" | "1" => Ok(Observable::One),
            "zeta1" => Ok(Observable::Zeta1),
            "zeta2" => Ok(Observable::Zeta2),
            "f" | "f_trunc" => Ok(Observable::FTrunc(1)),
            _ => s
                .strip_prefix("f:")
                .and_then(|k| k.parse().ok())
                .map(Observable::FTrunc)
                .ok_or_else(|| Error::Parse(format!("unknown observable {s:?}"))),
        }
    }
}

/// Powers of two below `n`, then `n` itself.
pub fn log_grid(n: u64) -> Vec<u64> {
    let mut g: Vec<u64> = (0..64).map(|i| 1u64 << i).take_while(|&m| m < n).collect();
    g.push(n);
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffReport {
    pub observable: Observable,
    pub start: TorusPoint,
    pub k: usize,
    pub ns: Vec<u64>,
    pub averages: Vec<[f64; 2]>,
}

impl BirkhoffReport {
    pub fn average(&self, i: usize) -> Complex64 {
        Complex64::new(self.averages[i][0], self.averages[i][1])
    }
}

/// `(1/n) Σ_{j<n} φ(T^j p)` on `log_grid(n)`, stepping the orbit exactly.
pub fn birkhoff(sys: &Furstenberg, p: &TorusPoint, obs: Observable, n: u64) -> Result<BirkhoffReport> {
    if n == 0 {
        return Err(Error::Precondition("Birkhoff averages need n >= 1".into()));
    }
    let ns = log_grid(n);
    let mut averages = Vec::with_capacity(ns.len());
    let mut sum = ComplexSum::default();
    let mut q = p.clone();
    let mut next = ns.iter().peekable();
    for j in 1..=n {
        sum.add(obs.eval(&q)?);
        if next.peek() == Some(&&j) {
            let a = sum.value() / j as f64;
            averages.push([a.re, a.im]);
            next.next();
        }
        if j < n {
            q = sys.step(&q)?;
        }
    }
    Ok(BirkhoffReport {
        observable: obs,
        start: p.clone(),
        k: sys.k(),
        ns,
        averages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        assert_eq!(log_grid(1), vec![1]);
        assert_eq!(log_grid(5), vec![1, 2, 4, 5]);
        assert_eq!(log_grid(8), vec![1, 2, 4, 8]);
    }

    #[test]
    fn constant_and_rotation_averages() {
        let t = Furstenberg::new(2).unwrap();
        let p = TorusPoint::from_f64(0.2, 0.4).unwrap();
        let r = birkhoff(&t, &p, Observable::One, 100).unwrap();
        assert!(r.averages.iter().all(|a| (a[0] - 1.0).abs() < 1e-15 && a[1] == 0.0));
        let r = birkhoff(&t, &p, Observable::Zeta1, 1000).unwrap();
        let a = t.alpha().to_centered_f64();
        let gap = crate::numeric::cis_turns_m1(a).norm();
        for (i, &n) in r.ns.iter().enumerate() {
            assert!(r.average(i).norm() <= 2.0 / (n as f64 * gap) + 1e-12);
        }
        assert!(birkhoff(&t, &p, Observable::One, 0).is_err());
    }

    #[test]
    fn parse_observables() {
        assert_eq!("f:3".parse::<Observable>().unwrap(), Observable::FTrunc(3));
        assert_eq!("ZETA2".parse::<Observable>().unwrap(), Observable::Zeta2);
        assert!("g".parse::<Observable>().is_err());
    }
}
