//! Overflow-free long products of 2x2 matrices.
//!
//! A product `P` is held as `P = Q R` with `Q` orthogonal and
//! `R = r11 [[1, c], [0, d]]` upper triangular. Each new left factor `T` is
//! absorbed by a 2x2 QR step of `T Q`, so the diagonal entries `r11`, `r22`
//! accumulate in log space and the determinant `r11 r22 det Q` is tracked
//! through an independent floating-point route. The public view is the pair
//! `(mat, log_scale)` with `P = exp(log_scale) * mat` and `||mat|| = 1`.

use super::Mat2;
use crate::error::{Error, Result};

const FLUSH_HI: f64 = 1e150;
const FLUSH_LO: f64 = 1e-150;

/// Running value `exp(log) * acc`, flushed into `log` when `acc` drifts.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LogAcc {
    log: f64,
    acc: f64,
}

impl LogAcc {
    const ONE: LogAcc = LogAcc { log: 0.0, acc: 1.0 };

    #[inline]
    fn mul(&mut self, x: f64) {
        self.acc *= x;
        if !(FLUSH_LO..=FLUSH_HI).contains(&self.acc) {
            self.log += self.acc.ln();
            self.acc = 1.0;
        }
    }

    fn value(&self) -> f64 {
        self.log + self.acc.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMatrix {
    q1: [f64; 2],
    q2: [f64; 2],
    coupling: f64,
    ratio: f64,
    r11: LogAcc,
    r22: LogAcc,
    factors: usize,
}

impl Default for ScaledMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

impl ScaledMatrix {
    pub fn identity() -> Self {
        ScaledMatrix {
            q1: [1.0, 0.0],
            q2: [0.0, 1.0],
            coupling: 0.0,
            ratio: 1.0,
            r11: LogAcc::ONE,
            r22: LogAcc::ONE,
            factors: 0,
        }
    }

    pub fn from_mat(m: &Mat2) -> Result<Self> {
        let mut s = Self::identity();
        s.push_left(m)?;
        s.factors = 1;
        Ok(s)
    }

    /// Rebuilds the product from its public view plus the tracked `log |det|`
    /// and determinant sign.
    pub fn from_parts(mat: &Mat2, log_scale: f64, log_det: f64, orientation: f64, factors: usize) -> Result<Self> {
        if !mat.is_finite() || !log_scale.is_finite() || !log_det.is_finite() {
            return Err(Error::NonFinite("scaled matrix parts".into()));
        }
        let col1 = [mat.m11, mat.m21];
        let col2 = [mat.m12, mat.m22];
        let n1 = (col1[0] * col1[0] + col1[1] * col1[1]).sqrt();
        if n1 == 0.0 || !n1.is_finite() {
            return Err(Error::InvalidArgument("first column of mat vanishes".into()));
        }
        let q1 = [col1[0] / n1, col1[1] / n1];
        let sign = if orientation < 0.0 { -1.0 } else { 1.0 };
        let q2 = [-sign * q1[1], sign * q1[0]];
        let coupling = (q1[0] * col2[0] + q1[1] * col2[1]) / n1;
        let log_r11 = log_scale + n1.ln();
        let log_r22 = log_det - log_r11;
        let ratio = (log_r22 - log_r11).exp();
        if !coupling.is_finite() || !ratio.is_finite() {
            return Err(Error::NonFinite("scaled matrix reconstruction".into()));
        }
        Ok(ScaledMatrix {
            q1,
            q2,
            coupling,
            ratio,
            r11: LogAcc { log: log_r11, acc: 1.0 },
            r22: LogAcc { log: log_r22, acc: 1.0 },
            factors,
        })
    }

    /// Replaces `P` by `T P`.
    pub fn push_left(&mut self, t: &Mat2) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::NonFinite("matrix factor".into()));
        }
        if t.det() == 0.0 {
            return Err(Error::InvalidArgument("singular matrix factor".into()));
        }
        let a = t.apply(self.q1);
        let b = t.apply(self.q2);
        self.absorb(a, b);
        Ok(())
    }

    /// Replaces `P` by `[[e - v, -1], [1, 0]] P`; `shift = e - v`.
    #[inline]
    pub fn push_transfer(&mut self, shift: f64) {
        let [x1, y1] = self.q1;
        let [x2, y2] = self.q2;
        self.absorb([shift * x1 - y1, x1], [shift * x2 - y2, x2]);
    }

    /// Replaces `P` by `[[0, 1], [-1, e - v]] P`, the inverse transfer matrix.
    #[inline]
    pub fn push_inverse_transfer(&mut self, shift: f64) {
        let [x1, y1] = self.q1;
        let [x2, y2] = self.q2;
        self.absorb([y1, -x1 + shift * y1], [y2, -x2 + shift * y2]);
    }

    /// QR step for the new columns `a = T q1`, `b = T q2`.
    #[inline]
    fn absorb(&mut self, a: [f64; 2], b: [f64; 2]) {
        let r11 = (a[0] * a[0] + a[1] * a[1]).sqrt();
        let q1 = [a[0] / r11, a[1] / r11];
        let r12 = q1[0] * b[0] + q1[1] * b[1];
        let mut q2 = [-q1[1], q1[0]];
        let mut r22 = q2[0] * b[0] + q2[1] * b[1];
        if r22 < 0.0 {
            q2 = [-q2[0], -q2[1]];
            r22 = -r22;
        }
        self.coupling += r12 / r11 * self.ratio;
        self.ratio *= r22 / r11;
        self.q1 = q1;
        self.q2 = q2;
        self.r11.mul(r11);
        self.r22.mul(r22);
        self.factors += 1;
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn log_r11(&self) -> f64 {
        self.r11.value()
    }

    pub fn log_r22(&self) -> f64 {
        self.r22.value()
    }

    /// `det Q`, the sign of the determinant of the product.
    pub fn orientation(&self) -> f64 {
        (self.q1[0] * self.q2[1] - self.q1[1] * self.q2[0]).signum()
    }

    /// `log |det P|`, accumulated from the diagonal of `R`.
    pub fn log_det(&self) -> f64 {
        self.log_r11() + self.log_r22()
    }

    fn triangular(&self) -> Mat2 {
        Mat2::new(1.0, self.coupling, 0.0, self.ratio)
    }

    /// `log sigma_max(P)`, identical to `log_scale + log ||mat||` up to rounding.
    pub fn log_norm(&self) -> f64 {
        self.log_r11() + self.triangular().norm().ln()
    }

    /// `log sigma_min(P)`, computed without underflow.
    pub fn log_min_singular(&self) -> f64 {
        self.log_r22() - self.triangular().norm().ln()
    }

    pub fn log_scale(&self) -> f64 {
        self.log_norm()
    }

    /// The normalized matrix, `P / exp(log_scale)`.
    pub fn mat(&self) -> Mat2 {
        let s = 1.0 / self.triangular().norm();
        let (c, d) = (self.coupling * s, self.ratio * s);
        let [x1, y1] = self.q1;
        let [x2, y2] = self.q2;
        // Q * [[s, c], [0, d]]
        Mat2::new(x1 * s, x1 * c + x2 * d, y1 * s, y1 * c + y2 * d)
    }

    /// `|2 log_scale + log |det(mat)||`, with `log |det(mat)|` read off the
    /// triangular factor: `det(mat) = det Q * d / ||R~||^2`.
    pub fn det_residual(&self) -> f64 {
        let log_det_mat = (self.log_r22() - self.log_r11()) - 2.0 * self.triangular().norm().ln();
        (2.0 * self.log_scale() + log_det_mat).abs()
    }

    /// The represented matrix. Overflows for long hyperbolic products.
    pub fn to_mat(&self) -> Mat2 {
        self.mat().scale(self.log_scale().exp())
    }

    /// `P v`, in real units.
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = self.mat().apply(v);
        let s = self.log_scale().exp();
        [m[0] * s, m[1] * s]
    }

    /// Trace of the represented matrix as `(sign, log |tr|)`; `log |tr| = -inf` for zero trace.
    pub fn log_abs_trace(&self) -> (f64, f64) {
        let t = self.mat().trace();
        (t.signum(), t.abs().ln() + self.log_scale())
    }

    /// Right singular vector of the smallest singular value of `P`.
    pub fn most_contracted_direction(&self) -> [f64; 2] {
        let (c, d) = (self.coupling, self.ratio);
        let smax = self.triangular().norm();
        // eigenvector of R~^T R~ = [[1, c], [c, c^2 + d^2]] for lambda_min
        let lambda = if smax > 0.0 { (d / smax).powi(2) } else { 0.0 };
        let u = [c, lambda - 1.0];
        let w = [c * c + d * d - lambda, -c];
        let pick = if u[0].hypot(u[1]) >= w[0].hypot(w[1]) { u } else { w };
        let n = pick[0].hypot(pick[1]);
        if n == 0.0 {
            return [0.0, 1.0];
        }
        [pick[0] / n, pick[1] / n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (a.m11 - b.m11).abs() <= tol
            && (a.m12 - b.m12).abs() <= tol
            && (a.m21 - b.m21).abs() <= tol
            && (a.m22 - b.m22).abs() <= tol
    }

    #[test]
    fn identity_view() {
        let s = ScaledMatrix::identity();
        assert_eq!(s.log_scale(), 0.0);
        assert!(close(&s.mat(), &Mat2::IDENTITY, 0.0));
        assert_eq!(s.det_residual(), 0.0);
    }

    proptest! {
        #[test]
        fn matches_plain_products(factors in proptest::collection::vec(
            (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64), 1..25)) {
            let mut plain = Mat2::IDENTITY;
            let mut scaled = ScaledMatrix::identity();
            let mut log_det = 0.0;
            let mut sign = 1.0;
            for (a, b, c, d) in factors {
                let m = Mat2::new(a, b, c, d);
                prop_assume!(m.det().abs() > 1e-2);
                log_det += m.det().abs().ln();
                sign *= m.det().signum();
                plain = m * plain;
                scaled.push_left(&m).unwrap();
            }
            let norm = plain.norm();
            let rebuilt = scaled.to_mat();
            prop_assert!(close(&rebuilt, &plain, 1e-9 * norm.max(1.0)));
            prop_assert!((scaled.log_norm() - norm.ln()).abs() < 1e-9);
            prop_assert!((scaled.mat().norm() - 1.0).abs() < 1e-12);
            // det of the plain product cancels badly; compare with the factor dets
            prop_assert!((scaled.log_det() - log_det).abs() < 1e-8);
            prop_assert_eq!(scaled.orientation(), sign);
        }

        #[test]
        fn transfer_fast_path_agrees(shifts in proptest::collection::vec(-4.0..4.0f64, 1..40)) {
            let mut fast = ScaledMatrix::identity();
            let mut slow = ScaledMatrix::identity();
            for &s in &shifts {
                fast.push_transfer(s);
                slow.push_left(&Mat2::new(s, -1.0, 1.0, 0.0)).unwrap();
            }
            prop_assert!((fast.log_norm() - slow.log_norm()).abs() < 1e-12);
            prop_assert!(close(&fast.mat(), &slow.mat(), 1e-12));
        }
    }

    #[test]
    fn inverse_transfer_undoes_transfer() {
        let mut s = ScaledMatrix::identity();
        for &shift in &[0.3, -1.2, 2.5, 0.0] {
            s.push_transfer(shift);
        }
        for &shift in [0.3, -1.2, 2.5, 0.0].iter().rev() {
            s.push_inverse_transfer(shift);
        }
        assert!(close(&s.to_mat(), &Mat2::IDENTITY, 1e-12));
    }

    #[test]
    fn long_hyperbolic_products_keep_the_determinant() {
        let mut s = ScaledMatrix::identity();
        for i in 0..1_000_000 {
            s.push_transfer(if i % 3 == 0 { 5.0 } else { 4.0 });
        }
        assert!(s.log_scale() > 1e6);
        assert!(s.det_residual() < 1e-8 * 1e6, "{}", s.det_residual());
        assert!((s.mat().norm() - 1.0).abs() < 1e-12);
        assert!((s.log_min_singular() + s.log_norm()).abs() < 1e-2);
    }

    #[test]
    fn round_trips_through_parts() {
        let mut s = ScaledMatrix::identity();
        for i in 0..5000 {
            s.push_transfer(0.5 + (i % 7) as f64 * 0.9);
        }
        let r = ScaledMatrix::from_parts(&s.mat(), s.log_scale(), s.log_det(), s.orientation(), s.factors()).unwrap();
        assert!((r.log_norm() - s.log_norm()).abs() < 1e-9);
        assert!((r.log_det() - s.log_det()).abs() < 1e-9);
        let mut a = s;
        let mut b = r;
        for _ in 0..100 {
            a.push_transfer(1.7);
            b.push_transfer(1.7);
        }
        assert!((a.log_norm() - b.log_norm()).abs() < 1e-9);
        assert!(ScaledMatrix::from_parts(&Mat2::new(0.0, 1.0, 0.0, 1.0), 0.0, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn most_contracted_direction_of_explicit_matrix() {
        let m = Mat2::new(5.0, -1.0, 1.0, 0.0);
        let mut s = ScaledMatrix::identity();
        for _ in 0..30 {
            s.push_left(&m).unwrap();
        }
        let v = s.most_contracted_direction();
        // contracted direction of M^n is the eigenvector for (5 - sqrt 21) / 2
        let lambda = (5.0 - 21f64.sqrt()) / 2.0;
        // second row of M v = lambda v gives v = (lambda, 1)
        let e = [lambda / (1.0 + lambda * lambda).sqrt(), 1.0 / (1.0 + lambda * lambda).sqrt()];
        let cross = (v[0] * e[1] - v[1] * e[0]).abs();
        assert!(cross < 1e-12, "{v:?} vs {e:?}");
    }
}
