//! Mutually unbiased bases from circulant complex Hadamard matrices.
//!
//! A `d = 1` solution scaled by `1/√n` is unitary, and together with the
//! identity and the Fourier matrix it gives three pairwise unbiased bases.

use num_complex::Complex;

use crate::error::{CircError, Result};
use crate::feasibility::is_prime;
use crate::generator::CirculantGenerator;
use crate::scalar::{unit_root, Real};

/// Orthonormality and unbiasedness are checked at this level.
pub const BASIS_TOL: f64 = 1e-9;

/// [`BASIS_TOL`], loosened to what single precision can deliver.
fn basis_tol<T: Real>() -> f64 {
    BASIS_TOL.max(T::epsilon().as_f64() * 64.0)
}

/// Orthonormal basis of `Cⁿ`, stored by columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis<T> {
    n: usize,
    columns: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Basis<T> {
    /// Rejects anything that is not square or whose Gram matrix is further
    /// than [`BASIS_TOL`] from the identity.
    pub fn new(columns: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(CircError::domain("empty basis"));
        }
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(CircError::Structural {
                expected: n,
                found: bad.len(),
            });
        }
        let basis = Basis { n, columns };
        let residual = basis.gram_residual().as_f64();
        if residual.is_nan() || residual > basis_tol::<T>() {
            return Err(CircError::Verification(format!(
                "columns not orthonormal: Gram residual {residual:.3e}"
            )));
        }
        Ok(basis)
    }

    /// Builds a basis from a dense matrix given row by row.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let n = rows.len();
        let columns = (0..n)
            .map(|c| {
                rows.iter()
                    .map(|r| r.get(c).copied().unwrap_or_else(Complex::default))
                    .collect()
            })
            .collect();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(CircError::Structural {
                expected: n,
                found: bad.len(),
            });
        }
        Basis::new(columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[Vec<Complex<T>>] {
        &self.columns
    }

    /// Max-entry distance of the Gram matrix from the identity.
    pub fn gram_residual(&self) -> T {
        let mut worst = T::zero();
        for (a, u) in self.columns.iter().enumerate() {
            for (b, v) in self.columns.iter().enumerate().skip(a) {
                let mut g = inner(u, v);
                if a == b {
                    g.re = g.re - T::one();
                }
                worst = worst.max(g.norm());
            }
        }
        worst
    }

    /// All entries as `[re, im]`, column after column.
    pub fn to_column_major(&self) -> Vec<[f64; 2]> {
        self.columns
            .iter()
            .flatten()
            .map(|z| [z.re.as_f64(), z.im.as_f64()])
            .collect()
    }

    /// Inverse of [`Basis::to_column_major`].
    pub fn from_column_major(n: usize, data: &[[f64; 2]]) -> Result<Self> {
        if data.len() != n * n {
            return Err(CircError::Structural {
                expected: n * n,
                found: data.len(),
            });
        }
        let columns = data
            .chunks(n.max(1))
            .map(|col| {
                col.iter()
                    .map(|&[re, im]| Complex::new(T::of(re), T::of(im)))
                    .collect()
            })
            .collect();
        Basis::new(columns)
    }
}

/// `⟨u, v⟩ = Σ conj(u_k) v_k`.
fn inner<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter()
        .zip(v)
        .fold(Complex::default(), |acc, (a, b)| acc + a.conj() * b)
}

fn check_order(n: usize) -> Result<()> {
    if n < 2 {
        return Err(CircError::domain(format!("dimension {n} < 2")));
    }
    Ok(())
}

pub fn identity<T: Real>(n: usize) -> Result<Basis<T>> {
    check_order(n)?;
    let columns = (0..n)
        .map(|k| {
            let mut e = vec![Complex::default(); n];
            e[k] = Complex::new(T::one(), T::zero());
            e
        })
        .collect();
    Basis::new(columns)
}

/// Column `k` is `(1, ω^k, …, ω^{(n−1)k})/√n`.
pub fn fourier_basis<T: Real>(n: usize) -> Result<Basis<T>> {
    check_order(n)?;
    let scale = T::one() / T::of_usize(n).sqrt();
    let columns = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| unit_root::<T>((j * k % n) as i64, n) * scale)
                .collect()
        })
        .collect();
    Basis::new(columns)
}

/// `circ_n(g)/√n` as a basis. Any unimodular generator with `CC* = nI` is
/// accepted, including a non-real diagonal and non-Hermitian matrices.
pub fn normalize_circulant<T: Real>(g: &CirculantGenerator<T>) -> Result<Basis<T>> {
    let n = g.n();
    check_order(n)?;
    let worst = g
        .entries()
        .iter()
        .map(|z| (z.norm().as_f64() - 1.0).abs())
        .fold(0.0, f64::max);
    if worst > basis_tol::<T>() {
        return Err(CircError::domain(format!(
            "generator is not unimodular (worst |c_j| deviation {worst:.3e})"
        )));
    }
    let scale = T::one() / T::of_usize(n).sqrt();
    let columns = (0..n)
        .map(|col| (0..n).map(|row| g.at(row, col) * scale).collect())
        .collect();
    Basis::new(columns)
}

/// Max over `j, k` of `| |⟨φ_j, ψ_k⟩|² − 1/n |`.
pub fn unbiasedness_residual<T: Real>(b1: &Basis<T>, b2: &Basis<T>) -> Result<T> {
    if b1.n != b2.n {
        return Err(CircError::domain(format!(
            "dimensions {} and {} differ",
            b1.n, b2.n
        )));
    }
    let target = T::one() / T::of_usize(b1.n);
    let mut worst = T::zero();
    for u in &b1.columns {
        for v in &b2.columns {
            worst = worst.max((inner(u, v).norm_sqr() - target).abs());
        }
    }
    Ok(worst)
}

pub fn unbiased<T: Real>(b1: &Basis<T>, b2: &Basis<T>, tol: T) -> Result<bool> {
    Ok(unbiasedness_residual(b1, b2)? <= tol)
}

/// `(I, F, C/√n)`, each pair checked for unbiasedness at [`BASIS_TOL`].
pub fn assemble_triple<T: Real>(
    g: &CirculantGenerator<T>,
) -> Result<(Basis<T>, Basis<T>, Basis<T>)> {
    let c = normalize_circulant(g)?;
    let i = identity(g.n())?;
    let f = fourier_basis(g.n())?;
    for (name, a, b) in [("I-F", &i, &f), ("I-C", &i, &c), ("F-C", &f, &c)] {
        let r = unbiasedness_residual(a, b)?.as_f64();
        if r > basis_tol::<T>() {
            return Err(CircError::Verification(format!(
                "pair {name} is biased: residual {r:.3e}"
            )));
        }
    }
    Ok((i, f, c))
}

/// `‖XZφ − μφ‖` with `μ = ⟨φ, XZφ⟩`, where `X e_k = e_{k+1}` and `Z e_k = ω^k e_k`.
pub fn xz_residual<T: Real>(phi: &[Complex<T>]) -> T {
    let n = phi.len();
    let xz: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let src = (k + n - 1) % n;
            unit_root::<T>(src as i64, n) * phi[src]
        })
        .collect();
    let mu = inner(phi, &xz) / inner(phi, phi);
    xz.iter()
        .zip(phi)
        .map(|(a, b)| (a - mu * b).norm_sqr())
        .sum::<T>()
        .sqrt()
}

/// Eigenbasis of `XZ` for prime `n`: component `k` of `φ_j` is
/// `ω^{−jk−s_k}/√n` with `s_k = k + ⋯ + (n−1)`.
///
/// At `n = 2` that phase is off by `−1` on the wrap-around, because
/// `(XZ)² = −I`; there a half step `e^{iπ(−jk − k/2)}` is used instead.
pub fn xz_eigenbasis<T: Real>(n: usize) -> Result<Basis<T>> {
    if !is_prime(n as u64) {
        return Err(CircError::domain(format!("dimension {n} is not prime")));
    }
    let scale = T::one() / T::of_usize(n).sqrt();
    let columns: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let z = if n == 2 {
                        unit_root::<T>(-(2 * (j * k) as i64) - k as i64, 4)
                    } else {
                        let s_k = (k..n).sum::<usize>();
                        unit_root::<T>(-((j * k + s_k) as i64), n)
                    };
                    z * scale
                })
                .collect()
        })
        .collect();
    for (j, phi) in columns.iter().enumerate() {
        let r = xz_residual(phi).as_f64();
        if r > basis_tol::<T>() {
            return Err(CircError::Verification(format!(
                "column {j} is not an XZ eigenvector: residual {r:.3e}"
            )));
        }
    }
    Basis::new(columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn w3(k: i64) -> C {
        unit_root(k, 3)
    }

    #[test]
    fn fourier_small() {
        let f = fourier_basis::<f64>(2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((f.columns()[1][1] - C::new(-h, 0.0)).norm() < 1e-15);
        let f3 = fourier_basis::<f64>(3).unwrap();
        assert!((f3.columns()[1][2] * 3f64.sqrt() - w3(2)).norm() < 1e-15);
        assert!(fourier_basis::<f64>(4).unwrap().gram_residual() <= 1e-12);
        assert!(fourier_basis::<f64>(1).is_err());
    }

    #[test]
    fn dimension_two_display() {
        let g = CirculantGenerator::new(vec![C::new(1.0, 0.0), C::new(0.0, 1.0)]).unwrap();
        let (i, f, c) = assemble_triple(&g).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((c.columns()[0][1] - C::new(0.0, h)).norm() < 1e-15);
        for (a, b) in [(&i, &f), (&i, &c), (&f, &c)] {
            assert!(unbiased(a, b, 1e-12).unwrap());
        }
    }

    #[test]
    fn dimension_three_display() {
        let one = C::new(1.0, 0.0);
        let c1 =
            normalize_circulant(&CirculantGenerator::new(vec![w3(1), one, one]).unwrap()).unwrap();
        let c2 =
            normalize_circulant(&CirculantGenerator::new(vec![w3(2), one, one]).unwrap()).unwrap();
        let all = [identity(3).unwrap(), fourier_basis(3).unwrap(), c1, c2];
        for a in 0..4 {
            for b in a + 1..4 {
                assert!(unbiased(&all[a], &all[b], 1e-12).unwrap(), "{a} {b}");
            }
        }
    }

    #[test]
    fn not_unbiased_to_itself() {
        let f = fourier_basis::<f64>(2).unwrap();
        assert!(!unbiased(&f, &f, 1e-9).unwrap());
        assert!(unbiased(&f, &fourier_basis(3).unwrap(), 1e-9).is_err());
    }

    #[test]
    fn rejects_non_unitary() {
        let g = CirculantGenerator::<f64>::from_real(&[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            normalize_circulant(&g),
            Err(CircError::Verification(_))
        ));
        let g = CirculantGenerator::<f64>::from_real(&[2.0, -1.0, -1.0]).unwrap();
        assert!(matches!(normalize_circulant(&g), Err(CircError::Domain(_))));
    }

    #[test]
    fn xz_bases() {
        let b = xz_eigenbasis::<f64>(2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((b.columns()[0][1] - C::new(0.0, -h)).norm() < 1e-15);
        assert!((b.columns()[1][1] - C::new(0.0, h)).norm() < 1e-15);
        for n in [2, 3, 5, 7, 11, 13] {
            let x = xz_eigenbasis::<f64>(n).unwrap();
            assert!(x.columns().iter().all(|c| xz_residual(c) <= 1e-9));
            assert!(unbiased(&x, &identity(n).unwrap(), 1e-12).unwrap());
            assert!(unbiased(&x, &fourier_basis(n).unwrap(), 1e-12).unwrap());
        }
        assert!(xz_eigenbasis::<f64>(4).is_err());
        assert!(xz_eigenbasis::<f64>(1).is_err());
    }

    #[test]
    fn f32_bases() {
        let x = xz_eigenbasis::<f32>(5).unwrap();
        assert!(unbiased(&x, &fourier_basis(5).unwrap(), 1e-5).unwrap());
    }

    #[test]
    fn column_major_round_trip() {
        let f = fourier_basis::<f64>(3).unwrap();
        let back = Basis::<f64>::from_column_major(3, &f.to_column_major()).unwrap();
        assert_eq!(f, back);
    }
}
