//! Matrix exponential by scaling and squaring.

use nalgebra::DMatrix;

/// `e^{A·t}` for a square matrix.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, the
/// exponential of the scaled matrix is summed as a Taylor series until the
/// next term no longer changes the sum, and the result is squared `s` times.
pub fn matrix_exp(a: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    assert!(a.is_square(), "matrix_exp needs a square matrix");
    let n = a.nrows();
    let at = a * t;
    let norm = one_norm(&at);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = at / 2f64.powi(squarings as i32);

    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if one_norm(&term) <= f64::EPSILON * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Zero-order-hold discretization of `ẋ = A x + B u` over `dt`.
///
/// Returns `(Φ, Γ)` with `Φ = e^{A dt}` and `Γ = ∫_0^dt e^{A s} ds · B`, read off the
/// exponential of the block matrix `[[A, B], [0, 0]]·dt`.
pub fn zoh(a: &DMatrix<f64>, b: &DMatrix<f64>, dt: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let m = b.ncols();
    assert_eq!(b.nrows(), n, "B rows must match A");
    let mut aug = DMatrix::<f64>::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(a);
    aug.view_mut((0, n), (n, m)).copy_from(b);
    let e = matrix_exp(&aug, dt);
    (
        e.view((0, 0), (n, n)).into_owned(),
        e.view((0, n), (n, m)).into_owned(),
    )
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    /// Plain power series without scaling; independent of the implementation.
    fn series_oracle(a: &DMatrix<f64>, t: f64, terms: usize) -> DMatrix<f64> {
        let n = a.nrows();
        let at = a * t;
        let mut sum = DMatrix::identity(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..terms {
            term = &term * &at / k as f64;
            sum += &term;
        }
        sum
    }

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let z = DMatrix::<f64>::zeros(2, 2);
        assert_eq!(matrix_exp(&z, 3.7), DMatrix::identity(2, 2));
    }

    #[test]
    fn diagonal() {
        let a = dmatrix![-1.5, 0.0; 0.0, 0.25];
        let e = matrix_exp(&a, 2.0);
        assert!((e[(0, 0)] - (-3.0f64).exp()).abs() < 1e-14);
        assert!((e[(1, 1)] - 0.5f64.exp()).abs() < 1e-14);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn nilpotent_shear() {
        let a = dmatrix![0.0, 1.0; 0.0, 0.0];
        for t in [0.0, 0.3, 2.0, -5.0] {
            let expected = series_oracle(&a, t, 4);
            assert_eq!(expected, dmatrix![1.0, t; 0.0, 1.0]);
            assert!((matrix_exp(&a, t) - expected).norm() <= 1e-12);
        }
    }

    #[test]
    fn matches_series_oracle() {
        let a = dmatrix![-0.4, 1.1, 0.3; -0.7, -0.2, 0.5; 0.05, -0.6, -0.9];
        for t in [0.05, 0.5, 1.5] {
            let e = matrix_exp(&a, t);
            let o = series_oracle(&a, t, 60);
            assert!(rel_err(&e, &o) <= 1e-10, "t = {t}: {}", rel_err(&e, &o));
        }
    }

    #[test]
    fn zoh_scalar_closed_form() {
        let (a, b, dt) = (-2.0, 3.0, 0.05);
        let (phi, gam) = zoh(&dmatrix![a], &dmatrix![b], dt);
        let ph = (a * dt).exp();
        assert!((phi[(0, 0)] - ph).abs() < 1e-15);
        assert!((gam[(0, 0)] - b * (ph - 1.0) / a).abs() < 1e-15);
    }
}
