//! Minimal complex 2x2 matrix algebra.
//!
//! Everything in this workspace lives in a two-dimensional Hilbert space, so
//! a fixed-size matrix type beats a general linear-algebra dependency.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

pub type C64 = Complex64;

/// Dense complex 2x2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Mat2([[z, z], [z, z]])
    }

    pub fn identity() -> Self {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        Mat2([[o, z], [z, o]])
    }

    /// Build from real/imag parts of the four entries (row-major).
    pub fn from_parts(entries: [(f64, f64); 4]) -> Self {
        Mat2([
            [
                C64::new(entries[0].0, entries[0].1),
                C64::new(entries[1].0, entries[1].1),
            ],
            [
                C64::new(entries[2].0, entries[2].1),
                C64::new(entries[3].0, entries[3].1),
            ],
        ])
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    pub fn conjugate_transpose(&self) -> Self {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2([
            [self.0[0][0] * s, self.0[0][1] * s],
            [self.0[1][0] * s, self.0[1][1] * s],
        ])
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entry-wise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        m
    }

    /// Largest entry of |U^dag U - I|; zero for an exactly unitary matrix.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.conjugate_transpose() * *self;
        p.max_abs_diff(&Mat2::identity())
    }

    /// Largest entry-wise deviation between two unitaries after aligning the
    /// global phase: min over alpha of |A - e^{i alpha} B|_max. Zero iff
    /// A = e^{i alpha} B.
    pub fn global_phase_distance(&self, other: &Self) -> f64 {
        let tr = (other.conjugate_transpose() * *self).trace();
        if tr.norm() < 1e-12 {
            // tr(B^dag A) = 2 e^{i alpha} whenever the two match, so a
            // vanishing trace already means "far apart"; report unaligned.
            return self.max_abs_diff(other);
        }
        let align = C64::from_polar(1.0, tr.arg());
        self.max_abs_diff(&other.scale(align))
    }

    /// Largest entry-wise absolute value of (M - M^dag).
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.conjugate_transpose())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][c] + rhs.0[r][c];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][c] - rhs.0[r][c];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> Mat2 {
        Mat2::from_parts([(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
    }

    #[test]
    fn mul_identity() {
        let x = sigma_x();
        assert_eq!(x * Mat2::identity(), x);
        assert_eq!(Mat2::identity() * x, x);
        // sigma_x^2 = I
        assert!((x * x).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn phase_distance_detects_global_phase() {
        let x = sigma_x();
        let rotated = x.scale(C64::from_polar(1.0, 1.234));
        assert!(x.global_phase_distance(&rotated) < 1e-12);
        assert!(x.global_phase_distance(&Mat2::identity()) > 0.5);
    }

    #[test]
    fn unitarity_error_flags_nonunitary() {
        assert!(Mat2::identity().unitarity_error() < 1e-15);
        assert!(Mat2::identity().scale_re(0.5).unitarity_error() > 0.5);
    }
}
