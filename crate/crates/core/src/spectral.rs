//! Fourier machinery for circulant matrices.
//!
//! A circulant matrix with generator `c` is diagonalised by the DFT: its
//! eigenvalues are `λ_k = Σ_j c_j ω^{jk}` with `ω = e^{2πi/n}`, and the
//! generator is recovered by the inverse transform. Both directions are
//! evaluated directly in `O(n²)` against a precomputed table of roots.
//!
//! Orthogonality `CC* = (d² + n − 1)I` can be checked two ways: through the
//! explicit row inner products, or spectrally through `|λ_k|² = d² + n − 1`
//! for every `k`. [`verify_conditions`] uses the explicit route for
//! `n ≤ 64` and the spectral route above that.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CircError, Result};
use crate::generator::CirculantGenerator;
use crate::rational::DiagonalValue;
use crate::scalar::{unit_root, Real};

/// Largest order verified through explicit row inner products.
pub const EXPLICIT_GRAM_MAX_N: usize = 64;

/// Default tolerance for generators computed internally.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default tolerance for generators ingested from six-decimal text.
pub const INGESTED_TOL: f64 = 1e-4;

/// `ω^m` for `m = 0..n`, with `ω = e^{2πi/n}`.
#[derive(Clone, Debug)]
pub struct RootTable<T> {
    roots: Vec<Complex<T>>,
}

impl<T: Real> RootTable<T> {
    pub fn new(n: usize) -> Self {
        RootTable {
            roots: (0..n).map(|m| unit_root(m as i64, n)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.roots.len()
    }

    /// `ω^e` for any integer exponent.
    #[inline]
    pub fn pow(&self, e: i64) -> Complex<T> {
        self.roots[e.rem_euclid(self.roots.len() as i64) as usize]
    }
}

fn dft<T: Real>(values: &[Complex<T>], sign: i64, roots: &RootTable<T>) -> Vec<Complex<T>> {
    let n = values.len();
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (j, &v)| {
                    acc + v * roots.pow(sign * ((j * k) % n) as i64)
                })
        })
        .collect()
}

/// Eigenvalues `λ_k = Σ_j c_j ω^{jk}`, `k = 0..n`.
pub fn eigenvalues<T: Real>(g: &CirculantGenerator<T>) -> Vec<Complex<T>> {
    dft(g.entries(), 1, &RootTable::new(g.n()))
}

/// Generator `c_j = (1/n) Σ_k λ_k ω^{−jk}` of the circulant with spectrum `lambdas`.
pub fn generator_from_eigenvalues<T: Real>(
    lambdas: &[Complex<T>],
) -> Result<CirculantGenerator<T>> {
    if lambdas.is_empty() {
        return Err(CircError::domain("empty spectrum"));
    }
    let n = lambdas.len();
    let scale = T::one() / T::of_usize(n);
    let entries = dft(lambdas, -1, &RootTable::new(n))
        .into_iter()
        .map(|c| c * scale)
        .collect();
    CirculantGenerator::new(entries)
}

/// Residuals of a generator against `c_0 = d`, `|c_j| = 1` and
/// `CC* = (d² + n − 1)I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct VerificationReport<T> {
    /// Largest `|(CC*)_{ij} − (d² + n − 1)δ_{ij}|`.
    pub gram_residual: T,
    /// Largest `| |c_j| − 1 |` over `j ≥ 1`.
    pub unimodularity_residual: T,
    /// `|c_0 − d|`.
    pub diagonal_residual: T,
    pub hermitian: bool,
    pub passes: bool,
    /// Tolerance the report was produced at.
    pub tol: T,
}

fn check_tol<T: Real>(tol: T) -> Result<()> {
    if !tol.is_finite() || tol <= T::zero() {
        return Err(CircError::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// `max |(CC*)_{0k} − target·δ_{0k}|` from explicit inner products of row 0
/// with every row. `CC*` is itself circulant, so row 0 determines it.
pub fn gram_residual_explicit<T: Real>(g: &CirculantGenerator<T>, target: T) -> T {
    let n = g.n();
    (0..n)
        .map(|k| {
            let dot = (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, col| {
                acc + g.at(0, col) * g.at(k, col).conj()
            });
            let expect = if k == 0 { target } else { T::zero() };
            (dot - Complex::new(expect, T::zero())).norm()
        })
        .fold(T::zero(), T::max)
}

/// `max_k | |λ_k|² − target |`.
pub fn gram_residual_spectral<T: Real>(g: &CirculantGenerator<T>, target: T) -> T {
    eigenvalues(g)
        .iter()
        .map(|l| (l.norm_sqr() - target).abs())
        .fold(T::zero(), T::max)
}

/// Gram residual by the route [`verify_conditions`] uses for this order.
pub fn gram_residual<T: Real>(g: &CirculantGenerator<T>, target: T) -> T {
    if g.n() <= EXPLICIT_GRAM_MAX_N {
        gram_residual_explicit(g, target)
    } else {
        gram_residual_spectral(g, target)
    }
}

/// Largest `| |c_j| − 1 |` over the off-diagonal entries.
pub fn unimodularity_residual<T: Real>(g: &CirculantGenerator<T>) -> T {
    g.entries()[1..]
        .iter()
        .map(|z| (z.norm() - T::one()).abs())
        .fold(T::zero(), T::max)
}

pub fn verify_conditions<T: Real>(
    g: &CirculantGenerator<T>,
    d: &DiagonalValue,
    tol: T,
) -> Result<VerificationReport<T>> {
    check_tol(tol)?;
    let n = g.n();
    let target = T::of(d.row_norm_squared(n).to_f64());
    let gram_residual = gram_residual(g, target);
    let unimodularity_residual = unimodularity_residual(g);
    let diagonal_residual = (g.diagonal() - Complex::new(d.approx_as::<T>(), T::zero())).norm();
    let passes = gram_residual <= tol && unimodularity_residual <= tol && diagonal_residual <= tol;
    Ok(VerificationReport {
        gram_residual,
        unimodularity_residual,
        diagonal_residual,
        hermitian: is_hermitian(g, tol),
        passes,
        tol,
    })
}

/// Whether `c_j = conj(c_{n−j})` for all `j ≥ 1` and `c_0` is real, within `tol`.
pub fn is_hermitian<T: Real>(g: &CirculantGenerator<T>, tol: T) -> bool {
    let c = g.entries();
    let n = c.len();
    c[0].im.abs() <= tol && (1..n).all(|j| (c[j] - c[n - j].conj()).norm() <= tol)
}

/// `θ(shift) = Σ_i a_i · conj(a_{(i+shift) mod n})`.
pub fn autocorrelation<T: Real>(a: &[Complex<T>], shift: usize) -> Result<Complex<T>> {
    let n = a.len();
    if shift >= n {
        return Err(CircError::domain(format!(
            "shift {shift} out of range for length {n}"
        )));
    }
    Ok((0..n).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
        acc + a[i] * a[(i + shift) % n].conj()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn gen(entries: &[C]) -> CirculantGenerator<f64> {
        CirculantGenerator::new(entries.to_vec()).unwrap()
    }

    /// Independent oracle: the defining sum evaluated with `exp` directly.
    fn naive_eigenvalues(entries: &[C]) -> Vec<C> {
        let n = entries.len();
        (0..n)
            .map(|k| {
                entries
                    .iter()
                    .enumerate()
                    .map(|(j, &cj)| {
                        let ang = 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                        cj * C::from_polar(1.0, ang)
                    })
                    .sum()
            })
            .collect()
    }

    fn close(a: &[C], b: &[C], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn two_point_transform() {
        let (d, c1) = (0.3, c(0.6, 0.8));
        let l = eigenvalues(&gen(&[c(d, 0.0), c1]));
        assert!(close(&l, &[c(d, 0.0) + c1, c(d, 0.0) - c1], 1e-15));
    }

    #[test]
    fn eigenvalue_examples() {
        let l = eigenvalues(&gen(&[c(1., 0.), c(-1., 0.), c(-1., 0.), c(-1., 0.)]));
        assert!(close(
            &l,
            &[c(-2., 0.), c(2., 0.), c(2., 0.), c(2., 0.)],
            1e-12
        ));

        let g = [c(1., 0.), c(0., -1.), c(1., 0.), c(0., 1.)];
        let oracle = naive_eigenvalues(&g);
        assert!(close(
            &oracle,
            &[c(2., 0.), c(2., 0.), c(2., 0.), c(-2., 0.)],
            1e-12
        ));
        assert!(close(&eigenvalues(&gen(&g)), &oracle, 1e-12));
    }

    #[test]
    fn inverse_examples() {
        let g = generator_from_eigenvalues(&[c(2., 0.), c(2., 0.), c(2., 0.), c(-2., 0.)]).unwrap();
        assert!(close(
            g.entries(),
            &[c(1., 0.), c(0., -1.), c(1., 0.), c(0., 1.)],
            1e-12
        ));

        let g = generator_from_eigenvalues(&[c(-2., 0.), c(2., 0.), c(2., 0.), c(2., 0.)]).unwrap();
        assert!(close(
            g.entries(),
            &[c(1., 0.), c(-1., 0.), c(-1., 0.), c(-1., 0.)],
            1e-12
        ));

        let a = c(0.7, -1.3);
        let g = generator_from_eigenvalues(&[a; 9]).unwrap();
        let mut want = vec![c(0., 0.); 9];
        want[0] = a;
        assert!(close(g.entries(), &want, 1e-12));
    }

    #[test]
    fn verify_examples() {
        let mut six = vec![c(-1., 0.); 6];
        six[0] = c(2., 0.);
        let r = verify_conditions(&gen(&six), &DiagonalValue::integer(2), 1e-9).unwrap();
        assert!(r.passes && r.hermitian);

        let r = verify_conditions(
            &gen(&[c(1., 0.), c(1., 0.)]),
            &DiagonalValue::integer(1),
            1e-9,
        )
        .unwrap();
        assert!(!r.passes);
        assert!((r.gram_residual - 2.0).abs() < 1e-12);

        assert!(verify_conditions(&gen(&six), &DiagonalValue::integer(2), 0.0).is_err());
    }

    #[test]
    fn hermitian_examples() {
        assert!(is_hermitian(
            &gen(&[c(1., 0.), c(0., -1.), c(1., 0.), c(0., 1.)]),
            1e-12
        ));
        assert!(!is_hermitian(
            &gen(&[c(1., 0.), c(0., 1.), c(0., 1.)]),
            1e-12
        ));
        let mut nine = vec![c(1., 0.); 9];
        nine[8] = c(-1., 0.);
        assert!(!is_hermitian(&gen(&nine), 1e-12));
    }

    #[test]
    fn autocorrelation_examples() {
        let a = [c(1., 0.), c(0., 1.), c(-1., 0.), c(0., -1.)];
        // Direct four-term sum: each term equals −i.
        let oracle: C = (0..4).map(|i| a[i] * a[(i + 1) % 4].conj()).sum();
        assert!((oracle - c(0., -4.)).norm() < 1e-15);
        assert!((autocorrelation(&a, 1).unwrap() - oracle).norm() < 1e-15);
        let zero = autocorrelation(&a, 0).unwrap();
        assert!((zero - c(4., 0.)).norm() < 1e-15);
        assert!(autocorrelation(&a, 4).is_err());

        // d = 1 perfect sequence: zero off-peak autocorrelation.
        let g = [c(1., 0.), c(0., -1.), c(1., 0.), c(0., 1.)];
        for s in 1..4 {
            assert!(autocorrelation(&g, s).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let g = CirculantGenerator::<f32>::new(vec![
            Complex::new(1.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 1.0),
        ])
        .unwrap();
        let r = verify_conditions(&g, &DiagonalValue::integer(1), 1e-5f32).unwrap();
        assert!(r.passes);
        let back = generator_from_eigenvalues(&eigenvalues(&g)).unwrap();
        assert!(back
            .entries()
            .iter()
            .zip(g.entries())
            .all(|(a, b)| (a - b).norm() < 1e-6));
    }

    fn random_generator() -> impl Strategy<Value = Vec<C>> {
        (1usize..=128).prop_flat_map(|n| {
            prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| c(a, b)), n)
        })
    }

    fn unimodular_generator() -> impl Strategy<Value = (f64, Vec<C>)> {
        (2usize..=24, 0.0f64..4.0).prop_flat_map(|(n, d)| {
            (
                Just(d),
                prop::collection::vec(
                    (0.0f64..std::f64::consts::TAU).prop_map(|t| C::from_polar(1.0, t)),
                    n - 1,
                ),
            )
        })
    }

    proptest! {
        #[test]
        fn dft_round_trip(entries in random_generator()) {
            let g = gen(&entries);
            let back = generator_from_eigenvalues(&eigenvalues(&g)).unwrap();
            prop_assert!(close(back.entries(), g.entries(), 1e-9));
        }

        #[test]
        fn eigenvalues_match_naive_sum(entries in random_generator()) {
            let bound: f64 = entries.iter().map(|z| z.norm()).sum::<f64>() * 1e-10 + 1e-300;
            prop_assert!(close(&eigenvalues(&gen(&entries)), &naive_eigenvalues(&entries), bound));
        }

        #[test]
        fn gram_routes_agree((d, off) in unimodular_generator()) {
            let g = CirculantGenerator::from_diagonal(d, &off).unwrap();
            let target = d * d + (g.n() - 1) as f64;
            let a = gram_residual_explicit(&g, target);
            let b = gram_residual_spectral(&g, target);
            // The explicit residual is the max entry of CC* − target·I, the
            // spectral one the max eigenvalue deviation; they vanish together.
            prop_assert!(a <= b + 1e-8);
            prop_assert!(b <= g.n() as f64 * a + 1e-8);
        }

        #[test]
        fn hermitian_generators_have_real_spectra(n in 1usize..64, seed in prop::collection::vec(-3.0f64..3.0, 128)) {
            let mut entries = vec![c(0., 0.); n];
            entries[0] = c(seed[0], 0.0);
            for j in 1..n {
                let z = c(seed[2 * j % 128], seed[(2 * j + 1) % 128]);
                if j < n - j {
                    entries[j] = z;
                    entries[n - j] = z.conj();
                } else if j == n - j {
                    entries[j] = c(z.re, 0.0);
                }
            }
            let g = gen(&entries);
            prop_assert!(is_hermitian(&g, 1e-12));
            prop_assert!(eigenvalues(&g).iter().all(|l| l.im.abs() <= 1e-9));
        }
    }

    #[test]
    fn spectral_criterion_agrees_on_known_solutions() {
        // n = 3 with d = 1/2: spectrum ±√(1/4 + 2) = ±3/2, one negative sign.
        let g = generator_from_eigenvalues(&[c(1.5, 0.), c(1.5, 0.), c(-1.5, 0.)]).unwrap();
        let d = DiagonalValue::from_squared(Rational::ratio(1, 4)).unwrap();
        let r = verify_conditions(&g, &d, 1e-12).unwrap();
        assert!(r.passes, "{r:?}");
        assert!(gram_residual_spectral(&g, 2.25) < 1e-12);
    }
}
