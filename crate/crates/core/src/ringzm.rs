//! Circulant matrices over `Z_m` with off-diagonal entries `≡ ±1 (mod m)`.
//!
//! Orthogonality is read as `C·Cᵀ ≡ (d² + n − 1)I (mod m)`. Elements are
//! stored as canonical representatives `0..m`, so `−1` is `m − 1`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CircError, Result};

/// Largest order for [`search_zm`] over all sign assignments.
pub const SEARCH_MAX_N: usize = 16;
/// Largest order for [`search_zm`] restricted to symmetric generators.
pub const SYMMETRIC_SEARCH_MAX_N: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZmGenerator {
    m: u64,
    n: usize,
    d: u64,
    offdiag: Vec<u64>,
}

impl ZmGenerator {
    /// Reduces every value mod `m` and checks each off-diagonal entry is `±1`.
    pub fn new(m: u64, d: i64, offdiag: &[i64]) -> Result<Self> {
        if m < 2 {
            return Err(CircError::domain(format!("modulus {m} < 2")));
        }
        if offdiag.is_empty() {
            return Err(CircError::domain("order must be at least 2"));
        }
        let reduce = |v: i64| v.rem_euclid(m as i64) as u64;
        let offdiag: Vec<u64> = offdiag.iter().map(|&v| reduce(v)).collect();
        if let Some(j) = offdiag.iter().position(|&c| c != 1 && c != m - 1) {
            return Err(CircError::domain(format!(
                "entry c_{} = {} is not ±1 mod {m}",
                j + 1,
                offdiag[j]
            )));
        }
        Ok(ZmGenerator {
            m,
            n: offdiag.len() + 1,
            d: reduce(d),
            offdiag,
        })
    }

    /// `(d, s_1, …, s_{n−1})` with `s_j ∈ {+1, −1}`.
    pub fn from_signs(m: u64, d: u64, signs: &[i8]) -> Result<Self> {
        let off: Vec<i64> = signs.iter().map(|&s| i64::from(s)).collect();
        ZmGenerator::new(m, d as i64, &off)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn offdiag(&self) -> &[u64] {
        &self.offdiag
    }

    /// `c_j` for `j = 0..n`.
    pub fn entry(&self, j: usize) -> u64 {
        let j = j % self.n;
        if j == 0 {
            self.d
        } else {
            self.offdiag[j - 1]
        }
    }

    /// Full generator `(d, c_1, …)` as residues.
    pub fn entries(&self) -> Vec<u64> {
        (0..self.n).map(|j| self.entry(j)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (1..self.n).all(|k| self.entry(k) == self.entry(self.n - k))
    }

    /// Generator of `−C`.
    pub fn negated(&self) -> ZmGenerator {
        let neg = |v: u64| (self.m - v) % self.m;
        ZmGenerator {
            m: self.m,
            n: self.n,
            d: neg(self.d),
            offdiag: self.offdiag.iter().map(|&c| neg(c)).collect(),
        }
    }

    /// Residue `(C·Cᵀ)_{0k}` for every `k`; `C·Cᵀ` is circulant.
    pub fn gram_row(&self) -> Vec<u64> {
        let (n, m) = (self.n, u128::from(self.m));
        (0..n)
            .map(|k| {
                let s: u128 = (0..n)
                    .map(|j| u128::from(self.entry(j)) * u128::from(self.entry(j + n - k)))
                    .sum();
                (s % m) as u64
            })
            .collect()
    }

    /// Number of `k` at which `(C·Cᵀ)_{0k}` misses its target residue.
    pub fn violations(&self) -> usize {
        let m = u128::from(self.m);
        let diag_target =
            ((u128::from(self.d) * u128::from(self.d) + self.n as u128 - 1) % m) as u64;
        self.gram_row()
            .iter()
            .enumerate()
            .filter(|&(k, &v)| v != if k == 0 { diag_target } else { 0 })
            .count()
    }
}

impl fmt::Display for ZmGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "circ_{}({}", self.n, self.d)?;
        for &c in &self.offdiag {
            if c == 1 {
                f.write_str(", 1")?;
            } else {
                f.write_str(", -1")?;
            }
        }
        write!(f, ") over Z_{}", self.m)
    }
}

/// `C·Cᵀ ≡ (d² + n − 1)I (mod m)`, by exact modular arithmetic.
pub fn verify_zm(g: &ZmGenerator) -> bool {
    g.violations() == 0
}

/// Reduced check for symmetric generators: `2d·c_k + Σ_{j≠k} c_j c_{n−k+j} ≡ 0`
/// for `k = 1..=⌈n/2⌉+1` only, plus the diagonal.
pub fn verify_zm_symmetric(g: &ZmGenerator) -> Result<bool> {
    if !g.is_symmetric() {
        return Err(CircError::domain("generator is not symmetric"));
    }
    let (n, m) = (g.n, u128::from(g.m));
    let last = (n.div_ceil(2) + 1).min(n - 1);
    let ok = (1..=last).all(|k| {
        let cross: u128 = (1..n)
            .filter(|&j| j != k)
            .map(|j| u128::from(g.entry(j)) * u128::from(g.entry(n - k + j)))
            .sum();
        (2 * u128::from(g.d) * u128::from(g.entry(k)) + cross).is_multiple_of(m)
    });
    // The diagonal Σ c_j² = d² + n − 1 holds for any ±1 entries.
    Ok(ok)
}

/// `false` exactly when parity excludes the pair: `m` even forces `n` even.
pub fn parity_filter(m: u64, n: u64) -> bool {
    !(m.is_multiple_of(2) && n % 2 == 1)
}

fn check_mn(m: u64, n: u64) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(CircError::domain(format!(
            "need m ≥ 2 and n ≥ 2, got m = {m}, n = {n}"
        )));
    }
    Ok(())
}

/// Solutions `d ∈ Z_m` of `2d ≡ r (mod m)`.
fn solve_twice(m: u64, r: i64) -> Vec<u64> {
    let r = r.rem_euclid(m as i64) as u64;
    (0..m).filter(|&d| (2 * d) % m == r).collect()
}

/// Every `d` for which `circ_n(d, −1, …, −1)` works: `2d ≡ n − 2 (mod m)`.
pub fn all_minus_family(m: u64, n: u64) -> Result<Vec<u64>> {
    check_mn(m, n)?;
    Ok(solve_twice(m, n as i64 - 2))
}

pub fn all_minus_generator(m: u64, n: usize, d: u64) -> Result<ZmGenerator> {
    ZmGenerator::new(m, d as i64, &vec![-1; n.saturating_sub(1)])
}

/// `(d, −1, …, −1, +1, −1, …, −1)` with the `+1` at position `n/2`.
pub fn one_plus_generator(m: u64, n: usize, d: u64) -> Result<ZmGenerator> {
    if !n.is_multiple_of(2) || n < 2 {
        return Err(CircError::domain(format!("order {n} is not even")));
    }
    let mut off = vec![-1i64; n - 1];
    off[n / 2 - 1] = 1;
    ZmGenerator::new(m, d as i64, &off)
}

/// Every `d` for which the one-plus generator works:
/// `2d ≡ 2 − n` and, when `n > 2`, `2d ≡ n − 6 (mod m)`.
pub fn one_plus_family(m: u64, n: u64) -> Result<Vec<u64>> {
    check_mn(m, n)?;
    if !n.is_multiple_of(2) {
        return Err(CircError::domain(format!("order {n} is not even")));
    }
    let first = solve_twice(m, 2 - n as i64);
    if n == 2 {
        // No row shift other than n/2 exists, so only the first congruence applies.
        return Ok(first);
    }
    let second: BTreeSet<u64> = solve_twice(m, n as i64 - 6).into_iter().collect();
    Ok(first.into_iter().filter(|d| second.contains(d)).collect())
}

/// Orders at which the one-plus family is consistent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderFamily {
    pub m: u64,
    /// Orders run over `step·ℓ + 4`.
    pub step: u64,
    pub orders: Vec<u64>,
    /// `ℓ` values skipped because `step·ℓ + 4` is odd.
    pub skipped_ell: Vec<u64>,
}

/// The two congruences are compatible iff `2n ≡ 8 (mod m)`, i.e.
/// `n ≡ 4 (mod m/gcd(m, 2))`; odd candidates are dropped and reported.
pub fn one_plus_orders(m: u64, n_max: u64) -> Result<OrderFamily> {
    check_mn(m, 2)?;
    let step = m / m.gcd(&2);
    let mut orders = Vec::new();
    let mut skipped_ell = Vec::new();
    let mut ell = 0;
    while step * ell + 4 <= n_max {
        let n = step * ell + 4;
        if n.is_multiple_of(2) {
            orders.push(n);
        } else {
            skipped_ell.push(ell);
        }
        ell += 1;
    }
    Ok(OrderFamily {
        m,
        step,
        orders,
        skipped_ell,
    })
}

/// Every generator over `Z_m` of order `n` with `±1` off the diagonal that
/// passes [`verify_zm`], sorted by `(d, entries)`. Sign assignments that
/// coincide as residues (all of them when `m = 2`) are reported once.
pub fn search_zm(m: u64, n: usize, symmetric_only: bool) -> Result<Vec<ZmGenerator>> {
    check_mn(m, n as u64)?;
    let cap = if symmetric_only {
        SYMMETRIC_SEARCH_MAX_N
    } else {
        SEARCH_MAX_N
    };
    if n > cap {
        return Err(CircError::Refused(format!(
            "order {n} exceeds the cap {cap}"
        )));
    }
    let free = if symmetric_only { n / 2 } else { n - 1 };
    let per_d: Vec<BTreeSet<ZmGenerator>> = (0..m)
        .into_par_iter()
        .map(|d| {
            let mut found = BTreeSet::new();
            for mask in 0u32..(1 << free) {
                let sign = |b: usize| if mask >> b & 1 == 1 { -1i8 } else { 1 };
                let signs: Vec<i8> = (1..n)
                    .map(|j| {
                        if symmetric_only {
                            sign(j.min(n - j) - 1)
                        } else {
                            sign(j - 1)
                        }
                    })
                    .collect();
                let g = ZmGenerator::from_signs(m, d, &signs).expect("±1 entries");
                if verify_zm(&g) {
                    found.insert(g);
                }
            }
            found
        })
        .collect();
    Ok(per_d.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: u64, d: i64, off: &[i64]) -> ZmGenerator {
        ZmGenerator::new(m, d, off).unwrap()
    }

    #[test]
    fn verify_examples() {
        let a = g(3, 2, &[1, 1, 1]);
        assert!(verify_zm(&a));
        // C·Cᵀ = I: the diagonal residue 4 + 3 ≡ 1.
        assert_eq!(a.gram_row(), [1, 0, 0, 0]);
        assert!(verify_zm(&g(5, 1, &[1, 1, 1, 1, 1, 1, 1, -1])));
        assert!(!verify_zm(&g(4, 0, &[1, 1])));
    }

    #[test]
    fn entries_must_be_units() {
        assert!(ZmGenerator::new(5, 1, &[2, 1]).is_err());
        assert!(ZmGenerator::new(1, 0, &[1]).is_err());
        let z = g(5, -1, &[-1, 6]);
        assert_eq!((z.d(), z.offdiag()), (4, &[4u64, 1][..]));
        assert_eq!(z.to_string(), "circ_3(4, -1, 1) over Z_5");
    }

    #[test]
    fn json_shape() {
        let z = g(5, 1, &[1, -1]);
        assert_eq!(
            serde_json::to_string(&z).unwrap(),
            r#"{"m":5,"n":3,"d":1,"offdiag":[1,4]}"#
        );
    }

    #[test]
    fn parity() {
        assert!(!parity_filter(2, 5));
        assert!(parity_filter(3, 4));
        assert!(parity_filter(4, 8));
    }

    #[test]
    fn all_minus_examples() {
        for m in [3u64, 5, 7, 9] {
            assert_eq!(all_minus_family(m, m + 2).unwrap(), [0]);
        }
        for m in [2u64, 4, 6, 10] {
            assert_eq!(all_minus_family(m, m + 2).unwrap(), [0, m / 2]);
        }
        assert_eq!(all_minus_family(2, 8).unwrap(), [0, 1]);
        assert_eq!(all_minus_family(5, 9).unwrap(), [1]);
        assert!(verify_zm(&all_minus_generator(5, 9, 1).unwrap()));
    }

    #[test]
    fn one_plus_examples() {
        for k in 1..5 {
            assert_eq!(one_plus_family(4, 4 * k).unwrap(), [1, 3]);
            assert_eq!(one_plus_family(8, 8 * k).unwrap(), [1, 5]);
        }
        assert_eq!(one_plus_family(7, 18).unwrap(), [6]);
        assert!(one_plus_family(4, 7).is_err());
    }

    #[test]
    fn one_plus_orders_follow_the_congruence() {
        let f = one_plus_orders(7, 60).unwrap();
        assert_eq!(f.orders, [4, 18, 32, 46, 60]);
        assert_eq!(f.skipped_ell, [1, 3, 5, 7]);
        let f = one_plus_orders(6, 30).unwrap();
        assert_eq!(f.orders, [4, 10, 16, 22, 28]);
        let f = one_plus_orders(8, 20).unwrap();
        assert_eq!((f.step, f.orders.clone()), (4, vec![4, 8, 12, 16, 20]));
        assert!(f.skipped_ell.is_empty());
        for fam in [
            one_plus_orders(7, 60).unwrap(),
            one_plus_orders(6, 30).unwrap(),
        ] {
            for n in fam.orders {
                assert!(
                    !one_plus_family(fam.m, n).unwrap().is_empty(),
                    "m={} n={n}",
                    fam.m
                );
            }
        }
    }

    #[test]
    fn search_examples() {
        let found = search_zm(3, 4, false).unwrap();
        assert!(found.contains(&g(3, 2, &[1, 1, 1])));
        let found = search_zm(5, 9, false).unwrap();
        assert!(found.contains(&g(5, 1, &[1, 1, 1, 1, 1, 1, 1, -1])));
    }

    #[test]
    fn everything_passes_over_z2_at_even_order() {
        for d in 0..2 {
            for mask in 0u32..32 {
                let signs: Vec<i8> = (0..5)
                    .map(|b| if mask >> b & 1 == 1 { -1 } else { 1 })
                    .collect();
                assert!(verify_zm(&ZmGenerator::from_signs(2, d, &signs).unwrap()));
            }
        }
        let found = search_zm(2, 6, false).unwrap();
        assert_eq!(found.len(), 2);
    }

    #[test]
    fn symmetric_reduction_needs_symmetry() {
        assert!(verify_zm_symmetric(&g(5, 1, &[1, -1])).is_err());
        assert!(verify_zm_symmetric(&g(3, 2, &[1, 1, 1])).unwrap());
    }

    #[test]
    fn search_guards() {
        assert!(matches!(
            search_zm(3, 17, false),
            Err(CircError::Refused(_))
        ));
        assert!(matches!(search_zm(3, 25, true), Err(CircError::Refused(_))));
        assert!(search_zm(3, 24, true).is_ok());
    }
}
