use num_complex::Complex;

use crate::error::{CircError, Result};
use crate::generator::CirculantGenerator;
use crate::scalar::{unit_root, Real};

/// `circ_n(n/2 − 1, −ω^ν, −ω^{2ν}, …, −ω^{(n−1)ν})`.
///
/// Its spectrum is `n/2` everywhere except `−n/2` at `k ≡ −ν`, so it is
/// Hermitian with `CC* = (n/2)² I` for every `ν`.
pub fn trivial_construction<T: Real>(n: usize, nu: usize) -> Result<CirculantGenerator<T>> {
    if n < 2 {
        return Err(CircError::domain(format!("order {n} < 2")));
    }
    if nu >= n {
        return Err(CircError::domain(format!("ν = {nu} not in Z_{n}")));
    }
    let d = T::of(n as f64 / 2.0 - 1.0);
    let off: Vec<Complex<T>> = (1..n)
        .map(|j| -unit_root::<T>(((j * nu) % n) as i64, n))
        .collect();
    CirculantGenerator::from_diagonal(d, &off)
}
