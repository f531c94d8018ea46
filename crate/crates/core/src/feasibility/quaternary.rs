//! Hermitian circulants whose off-diagonal entries are 4th roots of unity.
//!
//! For `d` not an odd integer such a matrix exists only at `n = 2d + 2` and
//! is real: `(d, −1, …, −1)`, plus `(d, 1, −1, 1, …, −1, 1)` when `d` is
//! even. For odd `d` the same order holds only if the generalised circulant
//! Hadamard conjecture does, in which case two further complex forms with
//! period-4 off-diagonal cycle `±i, 1, ∓i, −1` appear; those are returned
//! with `conjectural` set.
//!
//! [`quaternary_oracle`] checks this independently by exhaustive enumeration
//! in exact Gaussian-integer arithmetic.

use std::ops::{Add, Mul, Neg};

use num_complex::Complex;

use crate::error::{CircError, Result};
use crate::generator::CirculantGenerator;
use crate::rational::{DiagonalValue, Rational};
use crate::spectral::verify_conditions;

pub const ORACLE_MAX_N: usize = 12;

/// Exact Gaussian integer `re + im·i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gaussian {
    pub re: i64,
    pub im: i64,
}

impl Gaussian {
    pub const ONE: Gaussian = Gaussian { re: 1, im: 0 };
    pub const I: Gaussian = Gaussian { re: 0, im: 1 };
    pub const MINUS_ONE: Gaussian = Gaussian { re: -1, im: 0 };
    pub const MINUS_I: Gaussian = Gaussian { re: 0, im: -1 };
    pub const ZERO: Gaussian = Gaussian { re: 0, im: 0 };

    pub fn conj(self) -> Gaussian {
        Gaussian {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn to_complex(self) -> Complex<f64> {
        Complex::new(self.re as f64, self.im as f64)
    }
}

impl Add for Gaussian {
    type Output = Gaussian;
    fn add(self, o: Gaussian) -> Gaussian {
        Gaussian {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Mul for Gaussian {
    type Output = Gaussian;
    fn mul(self, o: Gaussian) -> Gaussian {
        Gaussian {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian {
            re: -self.re,
            im: -self.im,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuaternaryForm {
    pub d: DiagonalValue,
    /// `c_1, …, c_{n−1}`.
    pub off_diagonal: Vec<Gaussian>,
    /// Holds only under the generalised circulant Hadamard conjecture.
    pub conjectural: bool,
}

impl QuaternaryForm {
    pub fn n(&self) -> usize {
        self.off_diagonal.len() + 1
    }

    pub fn generator(&self) -> CirculantGenerator<f64> {
        let off: Vec<Complex<f64>> = self.off_diagonal.iter().map(|g| g.to_complex()).collect();
        CirculantGenerator::from_diagonal(self.d.approx(), &off).expect("finite entries")
    }
}

fn cycle(pattern: &[Gaussian], len: usize) -> Vec<Gaussian> {
    pattern.iter().copied().cycle().take(len).collect()
}

/// Generators predicted for diagonal `d`; empty unless `2d` is a
/// non-negative integer.
pub fn quaternary_forms(d: &DiagonalValue) -> Vec<QuaternaryForm> {
    let Some(exact) = d.exact() else {
        return Vec::new();
    };
    let twice = &Rational::integer(2) * exact;
    let Some(two_d) = twice.to_i64() else {
        return Vec::new();
    };
    if two_d < 0 {
        return Vec::new();
    }
    let n = (two_d + 2) as usize;
    let form = |off: Vec<Gaussian>, conjectural| QuaternaryForm {
        d: d.clone(),
        off_diagonal: off,
        conjectural,
    };
    let all_minus = vec![Gaussian::MINUS_ONE; n - 1];
    let alternating = cycle(&[Gaussian::ONE, Gaussian::MINUS_ONE], n - 1);

    if two_d % 2 == 1 {
        vec![form(all_minus, false)]
    } else if (two_d / 2) % 2 == 0 {
        vec![form(all_minus, false), form(alternating, false)]
    } else {
        let plus_i = cycle(
            &[
                Gaussian::I,
                Gaussian::ONE,
                Gaussian::MINUS_I,
                Gaussian::MINUS_ONE,
            ],
            n - 1,
        );
        let minus_i = cycle(
            &[
                Gaussian::MINUS_I,
                Gaussian::ONE,
                Gaussian::I,
                Gaussian::MINUS_ONE,
            ],
            n - 1,
        );
        vec![
            form(all_minus, true),
            form(alternating, true),
            form(plus_i, true),
            form(minus_i, true),
        ]
    }
}

/// One Hermitian quaternary pattern that admits a diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct QuaternaryHit {
    pub d: DiagonalValue,
    pub off_diagonal: Vec<Gaussian>,
}

impl QuaternaryHit {
    pub fn generator(&self) -> CirculantGenerator<f64> {
        let off: Vec<Complex<f64>> = self.off_diagonal.iter().map(|g| g.to_complex()).collect();
        CirculantGenerator::from_diagonal(self.d.approx(), &off).expect("finite entries")
    }
}

const UNITS: [Gaussian; 4] = [
    Gaussian::ONE,
    Gaussian::I,
    Gaussian::MINUS_ONE,
    Gaussian::MINUS_I,
];

/// Enumerates every Hermitian generator with `c_j ∈ {±1, ±i}` and keeps
/// those for which one `d ≥ 0` makes all row inner products vanish.
///
/// With `c_{n−j} = conj(c_j)`, the inner product of rows 0 and `k` is
/// `2d·c_k + S_k` where `S_k = Σ_{j ∉ {0,k}} c_j conj(c_{j−k})`, so each `k`
/// pins `d = −S_k conj(c_k)/2`. Results are re-checked with
/// [`verify_conditions`] at `tol`.
pub fn quaternary_oracle(n: usize, tol: f64) -> Result<Vec<QuaternaryHit>> {
    if n < 2 {
        return Err(CircError::domain(format!("order {n} < 2")));
    }
    if n > ORACLE_MAX_N {
        return Err(CircError::Refused(format!(
            "quaternary oracle capped at n = {ORACLE_MAX_N}"
        )));
    }
    let free = (n - 1) / 2;
    let middle = n.is_multiple_of(2);
    let combos = 4usize.pow(free as u32) * if middle { 2 } else { 1 };

    let mut hits = Vec::new();
    for code in 0..combos {
        let mut c = vec![Gaussian::ZERO; n];
        let mut rest = code;
        for j in 1..=free {
            c[j] = UNITS[rest % 4];
            c[n - j] = c[j].conj();
            rest /= 4;
        }
        if middle {
            c[n / 2] = if rest % 2 == 0 {
                Gaussian::ONE
            } else {
                Gaussian::MINUS_ONE
            };
        }
        if let Some(twice_d) = common_diagonal(&c) {
            let d = DiagonalValue::from_rational(Rational::ratio(twice_d, 2))?;
            let hit = QuaternaryHit {
                d,
                off_diagonal: c[1..].to_vec(),
            };
            let report = verify_conditions(&hit.generator(), &hit.d, tol)?;
            if !report.passes {
                return Err(CircError::Verification(format!(
                    "exact root does not verify numerically: {report:?}"
                )));
            }
            hits.push(hit);
        }
    }
    Ok(hits)
}

/// `2d` when every `k` yields the same real, non-negative root.
fn common_diagonal(c: &[Gaussian]) -> Option<i64> {
    let n = c.len();
    let mut root: Option<i64> = None;
    for k in 1..n {
        let s = (1..n).filter(|&j| j != k).fold(Gaussian::ZERO, |acc, j| {
            acc + c[j] * c[(j + n - k) % n].conj()
        });
        // 2d = −S_k·conj(c_k), which must be real.
        let two_d = -(s * c[k].conj());
        if two_d.im != 0 || two_d.re < 0 {
            return None;
        }
        match root {
            None => root = Some(two_d.re),
            Some(r) if r != two_d.re => return None,
            _ => {}
        }
    }
    root
}
