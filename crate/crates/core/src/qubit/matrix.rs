//! Fixed-size 2×2 complex matrices.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A 2×2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(entries: [[C64; 2]; 2]) -> Self {
        Mat2(entries)
    }

    pub fn from_real(entries: [[f64; 2]; 2]) -> Self {
        Mat2([
            [C64::new(entries[0][0], 0.0), C64::new(entries[0][1], 0.0)],
            [C64::new(entries[1][0], 0.0), C64::new(entries[1][1], 0.0)],
        ])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Mat2::from_real([[a, 0.0], [0.0, d]])
    }

    pub fn pauli_x() -> Self {
        Mat2::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        Mat2([[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]])
    }

    pub fn pauli_z() -> Self {
        Mat2::diag(1.0, -1.0)
    }

    /// Outer product |u⟩⟨w|.
    pub fn outer(u: [C64; 2], w: [C64; 2]) -> Self {
        Mat2([
            [u[0] * w[0].conj(), u[0] * w[1].conj()],
            [u[1] * w[0].conj(), u[1] * w[1].conj()],
        ])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other)
            .0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `A ρ A†`.
    pub fn sandwich(&self, rho: &Mat2) -> Mat2 {
        *self * *rho * self.adjoint()
    }

    /// Hermitian part `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Mat2 {
        (*self + self.adjoint()).scale_real(0.5)
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl std::iter::Sum for Mat2 {
    fn sum<I: Iterator<Item = Mat2>>(iter: I) -> Mat2 {
        iter.fold(Mat2::zero(), |acc, m| acc + m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        // σ2 = iσ1σ3
        let i = C64::new(0.0, 1.0);
        let y = (Mat2::pauli_x() * Mat2::pauli_z()).scale(i);
        assert_eq!(y, Mat2::pauli_y());
        assert_eq!(Mat2::pauli_x() * Mat2::pauli_x(), Mat2::identity());
    }

    #[test]
    fn adjoint_and_norm() {
        let m = Mat2([[C64::new(1.0, 2.0), C64::new(0.0, 1.0)], [ZERO, C64::new(3.0, 0.0)]]);
        assert_eq!(m.adjoint().adjoint(), m);
        assert_eq!(m.adjoint().get(1, 0), C64::new(0.0, -1.0));
        assert!((m.frobenius_norm() - 15f64.sqrt()).abs() < 1e-15);
        assert_eq!(Mat2::diag(0.0, -0.75).frobenius_norm(), 0.75);
    }
}
