use std::fmt;

use num_complex::Complex;

use crate::error::{CircError, Result};
use crate::scalar::{is_finite, Real};

/// First row `(c_0, …, c_{n−1})` of a circulant matrix; `c_0` is the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CirculantGenerator<T> {
    entries: Vec<Complex<T>>,
}

impl<T: Real> CirculantGenerator<T> {
    pub fn new(entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(CircError::domain("generator of order 0"));
        }
        if let Some(j) = entries.iter().position(|z| !is_finite(z)) {
            return Err(CircError::domain(format!("entry {j} is not finite")));
        }
        Ok(CirculantGenerator { entries })
    }

    /// Like [`Self::new`], checking the entry count against a declared order.
    pub fn with_order(n: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.len() != n {
            return Err(CircError::Structural {
                expected: n,
                found: entries.len(),
            });
        }
        Self::new(entries)
    }

    /// `(d, c_1, …, c_{n−1})` with a real diagonal.
    pub fn from_diagonal(d: T, off_diagonal: &[Complex<T>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(off_diagonal.len() + 1);
        entries.push(Complex::new(d, T::zero()));
        entries.extend_from_slice(off_diagonal);
        Self::new(entries)
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn diagonal(&self) -> Complex<T> {
        self.entries[0]
    }

    pub fn into_entries(self) -> Vec<Complex<T>> {
        self.entries
    }

    /// Entry `(row, col)` of the circulant matrix, `c_{(col − row) mod n}`.
    pub fn at(&self, row: usize, col: usize) -> Complex<T> {
        let n = self.n();
        self.entries[(col + n - row % n) % n]
    }

    /// Dense row-major matrix, for small-n cross-checks.
    pub fn to_dense(&self) -> Vec<Vec<Complex<T>>> {
        let n = self.n();
        (0..n)
            .map(|r| (0..n).map(|c| self.at(r, c)).collect())
            .collect()
    }

    pub fn conj(&self) -> Self {
        CirculantGenerator {
            entries: self.entries.iter().map(Complex::conj).collect(),
        }
    }

    /// Entrywise negation, the generator of `−C`.
    pub fn negated(&self) -> Self {
        CirculantGenerator {
            entries: self.entries.iter().map(|z| -z).collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> CirculantGenerator<U> {
        CirculantGenerator {
            entries: self
                .entries
                .iter()
                .map(|z| Complex::new(U::of(z.re.as_f64()), U::of(z.im.as_f64())))
                .collect(),
        }
    }
}

/// Compact text for a complex entry: `-1`, `i`, `0.5 - 0.866025i`.
pub fn format_entry<T: Real>(z: &Complex<T>, decimals: usize) -> String {
    let fmt_real = |v: f64| {
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    };
    let re = fmt_real(z.re.as_f64());
    let im = fmt_real(z.im.as_f64());
    match (re.as_str(), im.as_str()) {
        (_, "0") => re,
        ("0", "1") => "i".into(),
        ("0", "-1") => "-i".into(),
        ("0", _) => format!("{im}i"),
        (_, "1") => format!("{re} + i"),
        (_, "-1") => format!("{re} - i"),
        _ => match im.strip_prefix('-') {
            Some(abs) => format!("{re} - {abs}i"),
            None => format!("{re} + {im}i"),
        },
    }
}

impl<T: Real> fmt::Display for CirculantGenerator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "circ_{}(", self.n())?;
        for (j, z) in self.entries.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_entry(z, 6))?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_mismatch_is_structural() {
        let e = CirculantGenerator::<f64>::with_order(3, vec![Complex::new(1.0, 0.0); 2]);
        assert_eq!(
            e,
            Err(CircError::Structural {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn rejects_non_finite() {
        assert!(CirculantGenerator::new(vec![Complex::new(f64::NAN, 0.0)]).is_err());
        assert!(CirculantGenerator::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn dense_layout_shifts_right() {
        let g = CirculantGenerator::from_real(&[0.0, 1.0, 2.0]).unwrap();
        let m = g.to_dense();
        let re: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
        assert_eq!(
            re,
            vec![
                vec![0.0, 1.0, 2.0],
                vec![2.0, 0.0, 1.0],
                vec![1.0, 2.0, 0.0]
            ]
        );
    }

    #[test]
    fn display() {
        let g = CirculantGenerator::new(vec![
            Complex::new(1.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(-0.5, 0.8660254),
            Complex::new(-0.0, 1e-12),
        ])
        .unwrap();
        assert_eq!(g.to_string(), "circ_4(1, -i, -0.5 + 0.866025i, 0)");
    }
}
