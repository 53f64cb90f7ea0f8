//! Dirichlet finite sections: the symmetric tridiagonal matrix with diagonal
//! `v(x_1) .. v(x_L)` and unit off-diagonals.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::words::{PotentialMap, Word};

pub const DEFAULT_SECTION_CAP: usize = 4096;
/// Fraction of sites, both ends together, counted as boundary.
pub const EDGE_FRACTION: f64 = 0.05;
/// Boundary mass above which an eigenvalue is treated as an edge state.
pub const EDGE_MASS_LIMIT: f64 = 0.5;
const REL_TOL: f64 = 1e-10;
const INVERSE_ITERATIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionOptions {
    pub cap: usize,
    pub interior_filter: bool,
}

impl Default for SectionOptions {
    fn default() -> Self {
        SectionOptions {
            cap: DEFAULT_SECTION_CAP,
            interior_filter: false,
        }
    }
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { d - x - 1.0 / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64]) -> (f64, f64) {
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min) - 2.0;
    let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0;
    (lo, hi)
}

/// All eigenvalues, ascending, each bisected to `1e-10 * scale`.
pub fn tridiagonal_eigenvalues(diag: &[f64]) -> Vec<f64> {
    if diag.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = gershgorin(diag);
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let tol = REL_TOL * scale;
    (0..diag.len())
        .into_par_iter()
        .map(|k| {
            // invariant: count(a) <= k < count(b)
            let (mut a, mut b) = (lo, hi + tol);
            while b - a > tol {
                let mid = 0.5 * (a + b);
                if sturm_count(diag, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Solves `(T - sigma I) y = rhs` in place by Gaussian elimination with
/// partial pivoting; zero pivots are replaced by a tiny multiple of `scale`.
fn shifted_solve(diag: &[f64], sigma: f64, rhs: &mut [f64], scale: f64) {
    let n = diag.len();
    let tiny = f64::EPSILON * scale;
    let mut d: Vec<f64> = diag.iter().map(|&v| v - sigma).collect();
    let mut du = vec![1.0; n.saturating_sub(1)];
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n.saturating_sub(1) {
        let sub = 1.0;
        if d[i].abs() >= sub {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let l = sub / d[i];
            d[i + 1] -= l * du[i];
            rhs[i + 1] -= l * rhs[i];
        } else {
            let l = d[i] / sub;
            let (old_d, old_du) = (d[i + 1], du[i]);
            d[i] = sub;
            du[i] = old_d;
            d[i + 1] = old_du - l * old_d;
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] *= -l;
            }
            rhs.swap(i, i + 1);
            rhs[i + 1] -= l * rhs[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= du[i] * rhs[i + 1];
        }
        if i + 2 < n {
            s -= du2[i] * rhs[i + 2];
        }
        rhs[i] = s / d[i];
    }
}

/// Unit eigenvector for the eigenvalue `lambda` by inverse iteration.
pub fn eigenvector(diag: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let (lo, hi) = gershgorin(diag);
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).sin()).collect();
    for _ in 0..INVERSE_ITERATIONS {
        shifted_solve(diag, lambda, &mut y, scale);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        y.iter_mut().for_each(|v| *v /= norm);
    }
    y
}

/// Squared eigenvector mass on the outer `EDGE_FRACTION` of sites.
pub fn edge_mass(vector: &[f64]) -> f64 {
    let n = vector.len();
    let per_side = ((EDGE_FRACTION * n as f64) / 2.0).ceil() as usize;
    if 2 * per_side >= n {
        return 1.0;
    }
    let total: f64 = vector.iter().map(|v| v * v).sum();
    let edge: f64 = vector[..per_side]
        .iter()
        .chain(&vector[n - per_side..])
        .map(|v| v * v)
        .sum();
    edge / total
}

/// Drops eigenvalues whose eigenvector puts more than half its mass on the boundary.
pub fn interior_filter(diag: &[f64], eigenvalues: &[f64]) -> Vec<f64> {
    let keep: Vec<bool> = eigenvalues
        .par_iter()
        .map(|&l| edge_mass(&eigenvector(diag, l)) <= EDGE_MASS_LIMIT)
        .collect();
    eigenvalues
        .iter()
        .zip(keep)
        .filter_map(|(&l, k)| k.then_some(l))
        .collect()
}

pub fn finite_section_spectrum(x: &Word, potential: &PotentialMap) -> Result<Vec<f64>> {
    finite_section_with(x, potential, SectionOptions::default())
}

pub fn finite_section_with(
    x: &Word,
    potential: &PotentialMap,
    options: SectionOptions,
) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("finite section needs |x| >= 1".into()));
    }
    if x.len() > options.cap {
        return Err(Error::CapExceeded {
            what: "finite section size",
            requested: x.len() as u128,
            cap: options.cap as u128,
        });
    }
    if potential.len() != x.alphabet().len() {
        return Err(Error::AlphabetMismatch("potential does not cover the word's alphabet".into()));
    }
    let diag = potential.sample(x);
    let eig = tridiagonal_eigenvalues(&diag);
    Ok(if options.interior_filter {
        interior_filter(&diag, &eig)
    } else {
        eig
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn small_sections() {
        assert!((tridiagonal_eigenvalues(&[0.7])[0] - 0.7).abs() < 1e-10);
        let e = tridiagonal_eigenvalues(&[0.0, 0.0]);
        assert!((e[0] + 1.0).abs() < 1e-10 && (e[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_chain_closed_form() {
        let l = 50;
        let e = tridiagonal_eigenvalues(&vec![0.0; l]);
        for (k, &ev) in e.iter().enumerate() {
            let exact = 2.0 * (PI * (l - k) as f64 / (l + 1) as f64).cos();
            assert!((ev - exact).abs() < 1e-9, "k={k}: {ev} vs {exact}");
        }
    }

    #[test]
    fn eigenvector_satisfies_equation() {
        let diag: Vec<f64> = (0..200).map(|i| ((i * i) % 7) as f64 * 0.3).collect();
        let eig = tridiagonal_eigenvalues(&diag);
        for &l in eig.iter().step_by(17) {
            let v = eigenvector(&diag, l);
            let mut res: f64 = 0.0;
            for i in 0..diag.len() {
                let mut hv = diag[i] * v[i];
                if i > 0 {
                    hv += v[i - 1];
                }
                if i + 1 < diag.len() {
                    hv += v[i + 1];
                }
                res = res.max((hv - l * v[i]).abs());
            }
            assert!(res < 1e-7, "lambda={l}: residual {res}");
        }
    }

    #[test]
    fn edge_state_is_filtered() {
        // a strong boundary defect carries a state localized at site 0
        let mut diag = vec![0.0; 200];
        diag[0] = 5.0;
        let eig = tridiagonal_eigenvalues(&diag);
        let top = *eig.last().unwrap();
        assert!(top > 5.0);
        let kept = interior_filter(&diag, &eig);
        assert_eq!(kept.len(), eig.len() - 1);
        assert!(kept.iter().all(|&e| e < 2.0 + 1e-9));
    }

    proptest! {
        #[test]
        fn gershgorin_and_interlacing(v in proptest::collection::vec(-3.0..3.0f64, 2..60)) {
            let full = tridiagonal_eigenvalues(&v);
            let minor = tridiagonal_eigenvalues(&v[..v.len() - 1]);
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min) - 2.0;
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0;
            prop_assert!(full.iter().all(|&e| e >= lo && e <= hi));
            prop_assert!(full.windows(2).all(|w| w[0] <= w[1]));
            for (i, &m) in minor.iter().enumerate() {
                prop_assert!(full[i] <= m + 1e-9 && m <= full[i + 1] + 1e-9);
            }
        }

        #[test]
        fn eigenvalue_sum_is_trace(v in proptest::collection::vec(-3.0..3.0f64, 1..40)) {
            let s: f64 = tridiagonal_eigenvalues(&v).iter().sum();
            let t: f64 = v.iter().sum();
            prop_assert!((s - t).abs() < 1e-8 * v.len() as f64);
        }
    }
}
