use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{CircError, Result};
use crate::rational::{is_perfect_square, DiagonalValue, Rational};

/// One necessary condition that an `(n, d)` pair violates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleViolation {
    pub rule: String,
    pub citation: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub allowed: bool,
    pub reasons: Vec<RuleViolation>,
    /// Intermediate values: `k`, `l` (= √(d²+n−1)), factorisation of `n/2`.
    pub derived: BTreeMap<String, String>,
}

impl FilterVerdict {
    fn new() -> Self {
        FilterVerdict {
            allowed: true,
            ..Default::default()
        }
    }

    fn violate(&mut self, rule: &str, citation: &str) {
        self.allowed = false;
        self.reasons.push(RuleViolation {
            rule: rule.to_string(),
            citation: citation.to_string(),
        });
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.derived.insert(key.to_string(), value.to_string());
    }

    pub fn rules(&self) -> Vec<&str> {
        self.reasons.iter().map(|r| r.rule.as_str()).collect()
    }
}

/// Prime factorisation by trial division, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

fn factorization_text(n: u64) -> String {
    if n == 1 {
        return "1".into();
    }
    factorize(n)
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("·")
}

fn isqrt_exact(v: u128) -> Option<u128> {
    let r = (v as f64).sqrt() as u128;
    (r.saturating_sub(2)..=r + 2).find(|s| s * s == v)
}

fn require_even(n: u64) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(CircError::domain(format!(
            "order {n} is not an even integer ≥ 2"
        )));
    }
    Ok(())
}

/// Divisibility rules for an even order with an integer diagonal, all
/// evaluated and every violation recorded.
pub fn integer_d_filter(n: u64, d: u64) -> Result<FilterVerdict> {
    require_even(n)?;
    let mut v = FilterVerdict::new();
    apply_integer_rules(&mut v, n, d);
    Ok(v)
}

fn apply_integer_rules(v: &mut FilterVerdict, n: u64, d: u64) {
    let half = n / 2;
    let d2 = u128::from(d) * u128::from(d);
    let ell_sq = d2 + u128::from(n) - 1;
    v.note("n/2", factorization_text(half));

    let ell = isqrt_exact(ell_sq);
    match ell {
        None => v.violate("P3.3i", "d²+n−1 must be a perfect square"),
        Some(ell) => {
            v.note("l", ell);
            if u128::from(half) % ell != 0 {
                v.violate("P3.3ii", "l = √(d²+n−1) must divide n/2");
            } else {
                v.note("k", u128::from(half) / ell);
            }
            // d² − 1 may be −1 (d = 0); divisibility of a negative value.
            let d2m1 = d2 as i128 - 1;
            let divisor = if d % 2 == 1 { 2 * ell } else { ell } as i128;
            if d2m1 % divisor != 0 {
                v.violate("P3.3iii", "l must divide d²−1, and 2l must when d is odd");
            }
        }
    }

    let trivial = n == 2 * d + 2;
    if is_prime(n - 1) && !trivial {
        v.violate("P3.3iv", "n−1 prime forces d = n/2−1");
    }
    let factors = factorize(half);
    let omega: u32 = factors.iter().map(|&(_, e)| e).sum();
    if is_prime(half) && !trivial {
        v.violate("C3.6", "n/2 prime forces n = 2d+2");
    }
    if omega == 2 && !trivial {
        v.violate("P3.7", "n/2 a product of two primes forces n = 2d+2");
    }
    if factors.len() == 1 && d >= 2 && !trivial {
        v.violate("P3.8", "n/2 a prime power with d ≥ 2 forces n = 2d+2");
    }
    if d == 0 && n != 2 {
        v.violate("C3.4", "d = 0 exists only for n = 2");
    }
    if d == 1 {
        let root = isqrt_exact(u128::from(n));
        if !root.is_some_and(|r| r % 2 == 0) {
            v.violate(
                "C3.5",
                "d = 1 requires n to be the square of an even integer",
            );
        }
    }
}

/// Necessary conditions for an even order and any diagonal: `√(d²+n−1)`
/// must be `n/(2k)` for an integer `k ≥ 1` and `d` must be rational; the
/// integer rules follow when `d` is an integer.
pub fn classify_even_pair(n: u64, d: &DiagonalValue) -> Result<FilterVerdict> {
    require_even(n)?;
    let mut v = FilterVerdict::new();
    let ell_sq = d.row_norm_squared(n as usize);
    match is_perfect_square(&ell_sq)? {
        Some(ell) => {
            v.note("l", &ell);
            let k = &Rational::integer(n as i64) / &(&Rational::integer(2) * &ell);
            if k.is_integer() && k >= Rational::one() {
                v.note("k", &k);
            } else {
                v.violate("P3.2i", "√(d²+n−1) must equal n/(2k) for an integer k ≥ 1");
            }
        }
        None => v.violate("P3.2i", "√(d²+n−1) must equal n/(2k) for an integer k ≥ 1"),
    }
    if !d.is_rational() {
        v.violate("P3.2ii", "d must be rational for even n");
    }
    if let Some(di) = d.as_integer().and_then(|i: BigInt| i.to_u64()) {
        let mut inner = FilterVerdict::new();
        apply_integer_rules(&mut inner, n, di);
        for r in inner.reasons {
            v.violate(&r.rule, &r.citation);
        }
        for (key, val) in inner.derived {
            v.derived.entry(key).or_insert(val);
        }
    }
    Ok(v)
}

/// A diagonal allowed by `√(d²+n−1) = n/(2k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenCandidate {
    pub k: u64,
    pub d: DiagonalValue,
    /// Irrational `d`, ruled out for even orders.
    pub excluded: bool,
}

/// Every `k` with `1 ≤ k ≤ n/(2√(n−1))` and its diagonal `d² = (n/2k)² − n + 1`.
pub fn even_order_candidates(n: u64) -> Result<Vec<EvenCandidate>> {
    require_even(n)?;
    let mut out = Vec::new();
    let mut k = 1u64;
    // k ≤ n/(2√(n−1))  ⇔  4k²(n−1) ≤ n²
    while 4 * u128::from(k * k) * u128::from(n - 1) <= u128::from(n) * u128::from(n) {
        let ratio = Rational::ratio(n as i64, 2 * k as i64);
        let d2 = &ratio.square() - &Rational::integer(n as i64 - 1);
        let d = DiagonalValue::from_squared(d2)?;
        out.push(EvenCandidate {
            k,
            excluded: !d.is_rational(),
            d,
        });
        k += 1;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateStatus {
    /// A construction witnesses existence.
    Exists,
    /// Necessary conditions hold; existence undecided.
    Open,
    Excluded,
}

impl fmt::Display for CandidateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateStatus::Exists => "exists",
            CandidateStatus::Open => "open",
            CandidateStatus::Excluded => "excluded",
        })
    }
}

#[derive(Clone, Debug)]
pub struct EvenOrderEntry {
    pub candidate: EvenCandidate,
    pub status: CandidateStatus,
    pub verdict: FilterVerdict,
}

/// Candidates of one even order with their filter verdicts. `k = 1` is the
/// diagonal `n/2 − 1`, which always exists.
pub fn even_order_report(n: u64) -> Result<Vec<EvenOrderEntry>> {
    even_order_candidates(n)?
        .into_iter()
        .map(|candidate| {
            let verdict = classify_even_pair(n, &candidate.d)?;
            let status = if !verdict.allowed {
                CandidateStatus::Excluded
            } else if candidate.k == 1 {
                CandidateStatus::Exists
            } else {
                CandidateStatus::Open
            };
            Ok(EvenOrderEntry {
                candidate,
                status,
                verdict,
            })
        })
        .collect()
}

/// Even orders in `lo..=hi` with an undecided diagonal.
pub fn open_even_pairs(lo: u64, hi: u64) -> Result<Vec<(u64, DiagonalValue)>> {
    let mut out = Vec::new();
    for n in (lo.max(2)..=hi).filter(|n| n % 2 == 0) {
        for e in even_order_report(n)? {
            if e.status == CandidateStatus::Open {
                out.push((n, e.candidate.d));
            }
        }
    }
    Ok(out)
}

/// Even `n ≤ n_max` that pass [`integer_d_filter`] for diagonal `d`.
pub fn admissible_even_orders(d: u64, n_max: u64) -> Result<Vec<u64>> {
    if n_max < 2 {
        return Err(CircError::domain(format!("n_max {n_max} < 2")));
    }
    let d2 = u128::from(d) * u128::from(d);
    let mut out = Vec::new();
    for n in (2..=n_max).step_by(2) {
        // Cheap necessary test before the full verdict.
        let Some(ell) = isqrt_exact(d2 + u128::from(n) - 1) else {
            continue;
        };
        if u128::from(n / 2) % ell != 0 {
            continue;
        }
        if integer_d_filter(n, d)?.allowed {
            out.push(n);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn candidates_sixteen() {
        let c = even_order_candidates(16).unwrap();
        assert_eq!(c.iter().map(|e| e.k).collect::<Vec<_>>(), [1, 2]);
        assert_eq!(c[0].d.exact(), Some(&q("7")));
        assert_eq!(c[1].d.exact(), Some(&q("1")));
        assert!(c.iter().all(|e| !e.excluded));
    }

    #[test]
    fn candidates_eighteen_and_forty() {
        let c = even_order_candidates(18).unwrap();
        assert_eq!(c[0].d.exact(), Some(&q("8")));
        assert_eq!(c[1].d.d_squared(), &q("13/4"));
        assert!(c[1].excluded);
        let c = even_order_candidates(40).unwrap();
        assert!(c
            .iter()
            .any(|e| e.d.exact() == Some(&q("7/3")) && !e.excluded));
        assert!(even_order_candidates(7).is_err());
    }

    #[test]
    fn integer_filter_examples() {
        let v = integer_d_filter(210, 4).unwrap();
        assert!(v.allowed, "{v:?}");
        assert_eq!(v.derived["l"], "15");
        let v = integer_d_filter(12, 0).unwrap();
        assert!(!v.allowed);
        assert!(v.rules().contains(&"C3.4"));
        let v = integer_d_filter(20, 3).unwrap();
        assert_eq!(v.rules()[0], "P3.3i");
        assert!(integer_d_filter(9, 1).is_err());
    }

    #[test]
    fn all_violations_are_reported() {
        // n = 14: n−1 = 13 prime, n/2 = 7 prime; d = 2 fails both plus P3.8.
        let v = integer_d_filter(14, 2).unwrap();
        let rules = v.rules();
        for r in ["P3.3iv", "C3.6", "P3.8"] {
            assert!(rules.contains(&r), "{rules:?}");
        }
    }

    #[test]
    fn admissible_orders_examples() {
        assert_eq!(admissible_even_orders(5, 500).unwrap(), [12, 120]);
        assert_eq!(admissible_even_orders(3, 500).unwrap(), [8]);
        assert_eq!(admissible_even_orders(0, 500).unwrap(), [2]);
        assert_eq!(admissible_even_orders(2, 500).unwrap(), [6]);
        assert_eq!(admissible_even_orders(4, 500).unwrap(), [10, 210]);
    }

    #[test]
    fn twenty_allows_only_nine() {
        let r = even_order_report(20).unwrap();
        let alive: Vec<_> = r
            .iter()
            .filter(|e| e.status != CandidateStatus::Excluded)
            .collect();
        assert_eq!(alive.len(), 1);
        assert_eq!(alive[0].candidate.d.exact(), Some(&q("9")));
        assert_eq!(alive[0].status, CandidateStatus::Exists);
        assert_eq!(r[1].candidate.d.d_squared(), &q("6"));
    }

    #[test]
    fn verdict_json_shape() {
        let v = integer_d_filter(12, 0).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["allowed"], false);
        assert!(json["reasons"]
            .as_array()
            .unwrap()
            .iter()
            .any(|r| r["rule"] == "C3.4"));
    }

    #[test]
    fn factorisation() {
        assert_eq!(factorize(360), [(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97), [(97, 1)]);
        assert!(factorize(1).is_empty());
        assert!(is_prime(2) && is_prime(13) && !is_prime(1) && !is_prime(35));
    }
}
