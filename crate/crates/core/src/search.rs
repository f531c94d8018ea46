//! Exhaustive spectral search.
//!
//! A Hermitian circulant `C` with `CC* = (d² + n − 1)I` satisfies
//! `C² = ℓ²I` with `ℓ = √(d² + n − 1)`, so every eigenvalue is `±ℓ`. The
//! search enumerates sign vectors `s ∈ {±1}ⁿ`, rebuilds the generator by the
//! inverse DFT of `ℓ·s`, and keeps those whose off-diagonal entries are
//! unimodular.
//!
//! With `ν` plus signs and `t = 2ν − n`, the trace gives `ℓt = nd`, hence
//! `d² = t²(n − 1)/(n² − t²)`: each `t` fixes one exact candidate diagonal
//! (a [`SpectrumClass`]). Patterns with `t < 0` give `d < 0` and are the
//! negatives of `t > 0` patterns, so only `t ≥ 0` is enumerated.
//!
//! Patterns of one class are walked in colex order and split into
//! contiguous rank ranges that workers scan independently; the merge runs
//! in range order, so output does not depend on the worker count.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CircError, Result};
use crate::generator::CirculantGenerator;
use crate::rational::{DiagonalValue, Rational};
use crate::scalar::Real;
use crate::spectral::{
    generator_from_eigenvalues, verify_conditions, RootTable, VerificationReport,
};

pub const MIN_ORDER: usize = 2;
/// Hard cap: the space holds `2^{n−1}` patterns.
pub const MAX_ORDER: usize = 26;

/// Patterns per work unit.
const CHUNK: u64 = 1 << 13;

/// Canonical-key phase resolution, in turns.
const KEY_QUANTUM: f64 = 1e-6;

/// Signs of the `n` eigenvalues; bit `k` set means `λ_k = +ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignPattern {
    n: usize,
    plus: u32,
}

impl SignPattern {
    /// A pattern with non-negative trace (`2ν ≥ n`).
    pub fn new(n: usize, plus: u32) -> Result<Self> {
        if n == 0 || n > 32 || (n < 32 && plus >> n != 0) {
            return Err(CircError::domain(format!(
                "mask {plus:#x} does not fit order {n}"
            )));
        }
        let p = SignPattern { n, plus };
        if 2 * p.nu() < n {
            return Err(CircError::domain("sign pattern with negative trace"));
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of `+1` entries.
    pub fn nu(&self) -> usize {
        self.plus.count_ones() as usize
    }

    pub fn t(&self) -> i64 {
        2 * self.nu() as i64 - self.n as i64
    }

    pub fn mask(&self) -> u32 {
        self.plus
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n)
            .map(|k| if self.plus >> k & 1 == 1 { 1 } else { -1 })
            .collect()
    }
}

/// All sign patterns sharing `t = 2ν − n`, with the diagonal they force.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumClass {
    pub n: usize,
    pub t: usize,
    pub d: DiagonalValue,
}

impl SpectrumClass {
    pub fn nu(&self) -> usize {
        (self.n + self.t) / 2
    }

    /// `ℓ² = d² + n − 1 = n²(n − 1)/(n² − t²)`.
    pub fn eigen_modulus_squared(&self) -> Rational {
        self.d.row_norm_squared(self.n)
    }

    pub fn pattern_count(&self) -> u64 {
        binomial(self.n as u64, self.nu() as u64)
    }
}

/// `d² = t²(n − 1)/(n² − t²)` for `t` in `0..n` with `t ≡ n (mod 2)`.
pub fn spectrum_classes(n: usize) -> Result<Vec<SpectrumClass>> {
    if n < MIN_ORDER {
        return Err(CircError::domain(format!("order {n} < {MIN_ORDER}")));
    }
    let ni = n as i64;
    Ok((n % 2..n)
        .step_by(2)
        .map(|t| {
            let ti = t as i64;
            let d2 = Rational::ratio(ti * ti * (ni - 1), ni * ni - ti * ti);
            SpectrumClass {
                n,
                t,
                d: DiagonalValue::from_squared(d2).expect("non-negative"),
            }
        })
        .collect())
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// The mask of colex rank `rank` among `n`-bit masks with `k` bits set.
fn unrank_colex(mut rank: u64, k: usize) -> u32 {
    let mut mask = 0u32;
    for i in (1..=k as u64).rev() {
        let mut c = i - 1;
        while binomial(c + 1, i) <= rank {
            c += 1;
        }
        rank -= binomial(c, i);
        mask |= 1 << c;
    }
    mask
}

/// Next mask with the same popcount, in increasing (colex) order.
fn next_combination(v: u32) -> u32 {
    let t = v | v.wrapping_sub(1);
    let w = (!t & t.wrapping_add(1)).wrapping_sub(1);
    t.wrapping_add(1) | (w >> (v.trailing_zeros() + 1))
}

/// Orbit-invariant fingerprint of a generator under sign-pattern rotation
/// (`c_j ↦ ω^{js} c_j`) and global conjugation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn quantize_turns(turns: f64) -> u32 {
    let steps = (1.0 / KEY_QUANTUM).round() as i64;
    ((turns / KEY_QUANTUM).round() as i64).rem_euclid(steps) as u32
}

pub fn canonical_key<T: Real>(g: &CirculantGenerator<T>, tol: T) -> CanonicalKey {
    let n = g.n();
    let c = g.entries();
    let turns = |z: &Complex<T>| {
        if z.norm() <= tol {
            0.0
        } else {
            z.im.as_f64().atan2(z.re.as_f64()) / std::f64::consts::TAU
        }
    };
    let phases: Vec<f64> = c.iter().map(turns).collect();
    let magnitude = (c[0].norm().as_f64() / KEY_QUANTUM).round() as u64;

    let mut best: Option<Vec<u8>> = None;
    for conj in [false, true] {
        let sign = if conj { -1.0 } else { 1.0 };
        for s in 0..n {
            let mut key = Vec::with_capacity(12 + 4 * n);
            key.extend_from_slice(&magnitude.to_be_bytes());
            for (j, p) in phases.iter().enumerate() {
                let shift = ((j * s) % n) as f64 / n as f64;
                key.extend_from_slice(&quantize_turns(sign * p + shift).to_be_bytes());
            }
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    CanonicalKey(best.expect("n ≥ 1"))
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub tol: f64,
    /// Search only the class whose `d²` equals this value.
    pub restrict_d: Option<DiagonalValue>,
    /// Worker threads; `0` means available parallelism.
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            tol: crate::spectral::DEFAULT_TOL,
            restrict_d: None,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub generator: CirculantGenerator<f64>,
    pub d: DiagonalValue,
    pub pattern: SignPattern,
    pub residuals: VerificationReport<f64>,
    pub canonical_key: CanonicalKey,
}

/// Per-class bookkeeping of a search run.
#[derive(Clone, Debug)]
pub struct ClassReport {
    pub class: SpectrumClass,
    pub patterns: u64,
    /// Patterns whose generator passed, before deduplication.
    pub hits: u64,
    /// Distinct solutions after deduplication.
    pub distinct: usize,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub n: usize,
    pub tol: f64,
    /// Deduplicated, sorted by `d²` descending then key.
    pub solutions: Vec<Solution>,
    pub classes: Vec<ClassReport>,
    /// Set when `restrict_d` matched no spectrum class.
    pub restrict_unmatched: bool,
}

impl SearchOutcome {
    /// Distinct `d` values found, largest first.
    pub fn diagonals(&self) -> Vec<DiagonalValue> {
        let mut ds: Vec<DiagonalValue> = self.solutions.iter().map(|s| s.d.clone()).collect();
        ds.dedup();
        ds
    }
}

/// Screens patterns of one class; the hot loop of the search.
struct ClassScanner {
    n: usize,
    nu: usize,
    /// `ω^{−m}`, `m = 0..n`.
    inverse_roots: Vec<Complex<f64>>,
    /// `2ℓ/n`: off-diagonal `c_j = (2ℓ/n) Σ_{k∈plus} ω^{−jk}`.
    scale: f64,
    tol: f64,
}

impl ClassScanner {
    fn new(class: &SpectrumClass, tol: f64) -> Self {
        let n = class.n;
        let roots = RootTable::<f64>::new(n);
        let ell = class.eigen_modulus_squared().to_f64().sqrt();
        ClassScanner {
            n,
            nu: class.nu(),
            inverse_roots: (0..n).map(|m| roots.pow(-(m as i64))).collect(),
            scale: 2.0 * ell / n as f64,
            tol,
        }
    }

    /// Off-diagonal entries are unimodular within `tol`.
    /// Uses `Σ_k ω^{−jk} = 0` for `j ≠ 0`, so only plus positions are summed.
    #[inline]
    fn screen(&self, plus: u32) -> bool {
        let n = self.n;
        (1..n).all(|j| {
            let mut acc = Complex::new(0.0, 0.0);
            let mut bits = plus;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                acc += self.inverse_roots[(j * k) % n];
                bits &= bits - 1;
            }
            ((acc * self.scale).norm() - 1.0).abs() <= self.tol
        })
    }

    fn scan(&self, start: u64, end: u64) -> Vec<u32> {
        let mut hits = Vec::new();
        let mut mask = unrank_colex(start, self.nu);
        for rank in start..end {
            if self.screen(mask) {
                hits.push(mask);
            }
            if rank + 1 < end {
                mask = next_combination(mask);
            }
        }
        hits
    }
}

/// Generator of the Hermitian circulant with spectrum `±ℓ` given by `pattern`.
pub fn pattern_generator(
    class: &SpectrumClass,
    pattern: &SignPattern,
) -> Result<CirculantGenerator<f64>> {
    let ell = class.eigen_modulus_squared().to_f64().sqrt();
    let lambdas: Vec<Complex<f64>> = pattern
        .signs()
        .into_iter()
        .map(|s| Complex::new(ell * f64::from(s), 0.0))
        .collect();
    generator_from_eigenvalues(&lambdas)
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        builder = builder.num_threads(workers);
    }
    builder
        .build()
        .map_err(|e| CircError::domain(format!("cannot start worker pool: {e}")))
}

pub fn search_order(n: usize, config: &SearchConfig) -> Result<SearchOutcome> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&n) {
        return Err(CircError::domain(format!(
            "order {n} outside {MIN_ORDER}..={MAX_ORDER}"
        )));
    }
    if !config.tol.is_finite() || config.tol <= 0.0 {
        return Err(CircError::domain(format!(
            "tolerance must be positive, got {}",
            config.tol
        )));
    }
    let mut classes = spectrum_classes(n)?;
    let mut restrict_unmatched = false;
    if let Some(want) = &config.restrict_d {
        classes.retain(|c| c.d.d_squared() == want.d_squared());
        restrict_unmatched = classes.is_empty();
    }

    let pool = build_pool(config.workers)?;
    let mut reports = Vec::with_capacity(classes.len());
    let mut unique: BTreeMap<CanonicalKey, Solution> = BTreeMap::new();

    for class in classes {
        let scanner = ClassScanner::new(&class, config.tol);
        let total = class.pattern_count();
        let chunks = total.div_ceil(CHUNK);
        let hit_masks: Vec<Vec<u32>> = pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|i| scanner.scan(i * CHUNK, ((i + 1) * CHUNK).min(total)))
                .collect()
        });

        let mut hits = 0;
        let mut distinct = 0;
        for mask in hit_masks.into_iter().flatten() {
            let pattern = SignPattern::new(n, mask)?;
            let generator = pattern_generator(&class, &pattern)?;
            let residuals = verify_conditions(&generator, &class.d, config.tol)?;
            if !residuals.passes {
                continue;
            }
            hits += 1;
            let key = canonical_key(&generator, config.tol);
            unique.entry(key.clone()).or_insert_with(|| {
                distinct += 1;
                Solution {
                    generator,
                    d: class.d.clone(),
                    pattern,
                    residuals,
                    canonical_key: key,
                }
            });
        }
        reports.push(ClassReport {
            class,
            patterns: total,
            hits,
            distinct,
        });
    }

    let mut solutions: Vec<Solution> = unique.into_values().collect();
    solutions.sort_by(|a, b| {
        b.d.d_squared()
            .cmp(a.d.d_squared())
            .then_with(|| a.canonical_key.cmp(&b.canonical_key))
    });
    Ok(SearchOutcome {
        n,
        tol: config.tol,
        solutions,
        classes: reports,
        restrict_unmatched,
    })
}
