//! Mechanical (Sturmian) words from a rotation number given by its continued
//! fraction `alpha = [0; a1, a2, ...]`.
//!
//! The rotation is evaluated with the last convergent `p/q` in exact integer
//! arithmetic: `i * alpha mod 1` becomes `(i * p mod q) / q`. Indices are only
//! trusted while `|i| < q`; beyond that the word of the rational approximant
//! starts repeating and the window request is rejected.

use crate::error::{Error, Result};

/// Largest convergent denominator kept; keeps `i * p` inside `i128` for any `i64` index.
const MAX_DENOMINATOR: u128 = 1 << 62;

#[derive(Debug, Clone, PartialEq)]
pub struct SturmianSpec {
    cf: Vec<u64>,
    /// Convergents `(p_k, q_k)` for `k = 1..=depth`.
    convergents: Vec<(u64, u64)>,
    alpha: f64,
    theta: f64,
}

impl SturmianSpec {
    /// Continued-fraction entries beyond what fits the denominator bound are dropped.
    pub fn new(cf: Vec<u64>, theta: f64) -> Result<Self> {
        if cf.is_empty() {
            return Err(Error::InvalidArgument(
                "continued fraction needs depth >= 1".into(),
            ));
        }
        if cf.contains(&0) {
            return Err(Error::InvalidArgument(
                "continued-fraction entries must be positive".into(),
            ));
        }
        if !theta.is_finite() || !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "phase theta = {theta} must lie in [0, 1)"
            )));
        }
        if cf.len() == 1 && cf[0] == 1 {
            return Err(Error::InvalidArgument(
                "alpha = [0; 1] = 1 is not in (0, 1)".into(),
            ));
        }
        let (mut p_prev, mut q_prev) = (1u128, 0u128);
        let (mut p, mut q) = (0u128, 1u128);
        let mut convergents = Vec::with_capacity(cf.len());
        let mut kept = Vec::with_capacity(cf.len());
        for &a in &cf {
            let a = a as u128;
            let p_next = a.checked_mul(p).and_then(|v| v.checked_add(p_prev));
            let q_next = a.checked_mul(q).and_then(|v| v.checked_add(q_prev));
            match (p_next, q_next) {
                (Some(pn), Some(qn)) if qn <= MAX_DENOMINATOR => {
                    p_prev = p;
                    q_prev = q;
                    p = pn;
                    q = qn;
                    convergents.push((p as u64, q as u64));
                    kept.push(a as u64);
                }
                _ => break,
            }
        }
        if convergents.is_empty() {
            return Err(Error::CapExceeded {
                what: "first continued-fraction entry",
                requested: cf[0] as u128,
                cap: MAX_DENOMINATOR,
            });
        }
        let (p, q) = *convergents.last().unwrap();
        Ok(SturmianSpec {
            cf: kept,
            convergents,
            alpha: p as f64 / q as f64,
            theta,
        })
    }

    /// Golden-mean conjugate `(sqrt 5 - 1) / 2 = [0; 1, 1, 1, ...]` at the deepest depth that fits.
    pub fn golden(theta: f64) -> Self {
        SturmianSpec::new(vec![1; 200], theta).expect("golden mean expansion is valid")
    }

    pub fn continued_fraction(&self) -> &[u64] {
        &self.cf
    }

    pub fn depth(&self) -> usize {
        self.cf.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn convergents(&self) -> &[(u64, u64)] {
        &self.convergents
    }

    /// Convergent denominators `q_1, q_2, ...`, the natural periodic-approximant lengths.
    pub fn denominators(&self) -> Vec<u64> {
        self.convergents.iter().map(|&(_, q)| q).collect()
    }

    /// Largest `|i|` for which the stored expansion is trusted.
    pub fn index_bound(&self) -> u64 {
        self.convergents.last().unwrap().1 - 1
    }

    /// `1` (letter `b`) if `(i * alpha + theta) mod 1` lies in `[1 - alpha, 1)`, else `0`.
    pub fn letter_at(&self, i: i64) -> u8 {
        let (p, q) = *self.convergents.last().unwrap();
        let r = (i as i128 * p as i128).rem_euclid(q as i128);
        if self.theta == 0.0 {
            // exact: r/q >= 1 - p/q  <=>  r >= q - p
            return u8::from(r >= (q - p) as i128);
        }
        let mut frac = r as f64 / q as f64 + self.theta;
        if frac >= 1.0 {
            frac -= 1.0;
        }
        u8::from(frac >= 1.0 - self.alpha)
    }

    /// Letters `w_i` for `i = start .. start + len`.
    pub fn window(&self, start: i64, len: usize) -> Result<Vec<u8>> {
        if len == 0 {
            return Err(Error::InvalidArgument("window length must be >= 1".into()));
        }
        let bound = self.index_bound() as i128;
        let end = start as i128 + len as i128 - 1;
        let worst = (start as i128).abs().max(end.abs());
        if worst > bound {
            return Err(Error::CapExceeded {
                what: "Sturmian index",
                requested: worst as u128,
                cap: bound as u128,
            });
        }
        Ok((0..len as i64).map(|j| self.letter_at(start + j)).collect())
    }
}
