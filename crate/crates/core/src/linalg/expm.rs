use super::Matrix;
use crate::math::powi;

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(a: &Matrix) -> Matrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.rows();
    let norm = a.max_abs() * n as f64;
    let mut squarings = 0i32;
    while norm / powi(2.0, squarings) > 0.5 {
        squarings += 1;
    }
    let x = a.scale(1.0 / powi(2.0, squarings));
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..=20 {
        term = (&term * &x).scale(1.0 / k as f64);
        sum += &term;
        if term.max_abs() <= f64::EPSILON * 1e-2 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
