use std::ops::Mul;

use serde::{Deserialize, Serialize};

/// A real 2x2 matrix `[[m11, m12], [m21, m22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn is_finite(&self) -> bool {
        self.m11.is_finite() && self.m12.is_finite() && self.m21.is_finite() && self.m22.is_finite()
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        (self.det() - 1.0).abs() <= tol
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m11 * v[0] + self.m12 * v[1],
            self.m21 * v[0] + self.m22 * v[1],
        ]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d))
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    /// `(sigma_max, sigma_min)` in closed form.
    ///
    /// With `A = (m11 + m22)^2 + (m12 - m21)^2` and `B = (m11 - m22)^2 + (m12 + m21)^2`
    /// the singular values are `(sqrt A + sqrt B) / 2` and `|sqrt A - sqrt B| / 2`.
    pub fn singular_values(&self) -> (f64, f64) {
        let a = (self.m11 + self.m22).powi(2) + (self.m12 - self.m21).powi(2);
        let b = (self.m11 - self.m22).powi(2) + (self.m12 + self.m21).powi(2);
        let (sa, sb) = (a.sqrt(), b.sqrt());
        let max = 0.5 * (sa + sb);
        // sigma_max * sigma_min = |det| is the accurate route for the small one
        let min = if max > 0.0 { self.det().abs() / max } else { 0.0 };
        (max, min)
    }

    /// Operator (spectral) norm.
    pub fn norm(&self) -> f64 {
        self.singular_values().0
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * r.m11 + self.m12 * r.m21,
            self.m11 * r.m12 + self.m12 * r.m22,
            self.m21 * r.m11 + self.m22 * r.m21,
            self.m21 * r.m12 + self.m22 * r.m22,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_form_norm() {
        let m = Mat2::new(3.0, -1.0, 1.0, 0.0);
        // sigma^2 = (11 + sqrt(117)) / 2
        let expected = ((11.0 + 117f64.sqrt()) / 2.0).sqrt();
        assert!((m.norm() - expected).abs() < 1e-14);
        assert!((m.norm() - 3.30278).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn singular_values_match_gram_eigenvalues(
            a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64, d in -10.0..10.0f64
        ) {
            let m = Mat2::new(a, b, c, d);
            let f = a * a + b * b + c * c + d * d;
            let det = m.det();
            let disc = (f * f - 4.0 * det * det).max(0.0).sqrt();
            let (smax, smin) = m.singular_values();
            prop_assert!((smax * smax - (f + disc) / 2.0).abs() <= 1e-9 * (1.0 + f));
            prop_assert!((smax * smin - det.abs()).abs() <= 1e-9 * (1.0 + f));
        }

        #[test]
        fn inverse_round_trip(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64) {
            let m = Mat2::new(a, b, c, 1.0 + a.abs());
            prop_assume!(m.det().abs() > 1e-3);
            let p = m * m.inverse().unwrap();
            prop_assert!((p.m11 - 1.0).abs() < 1e-8 && p.m12.abs() < 1e-8);
            prop_assert!(p.m21.abs() < 1e-8 && (p.m22 - 1.0).abs() < 1e-8);
        }
    }
}
