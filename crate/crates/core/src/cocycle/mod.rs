//! Transfer-matrix cocycles of the discrete Schrödinger equation
//! `u(n+1) + u(n-1) + v(n) u(n) = E u(n)`.
//!
//! Products are ordered with the last letter leftmost:
//! `M(x) = T(x_n) ... T(x_1)` with `T(l) = [[E - v(l), -1], [1, 0]]`, so that
//! `(u(n+1), u(n)) = M(x_1 .. x_n) (u(1), u(0))`.

mod checkpoint;
mod mat2;
mod profile;
mod scaled;

pub use checkpoint::{run_with_checkpoints, resume_from_checkpoints, word_hash, Checkpoint, CheckpointFile};
pub use mat2::Mat2;
pub use profile::{lyapunov_profile, LyapunovProfile, SpreadParams};
pub use scaled::ScaledMatrix;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subshifts::SubshiftSystem;
use crate::words::{distinct_factors, PotentialMap, Word};

/// Threshold on the Lyapunov estimate below which no stable direction is reported.
pub const DEFAULT_GAMMA_MIN: f64 = 0.05;
/// Largest angle (radians) between the `n` and `2n` stable-direction estimates
/// for the direction to count as stabilized.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-3;

fn check_energy(e: f64) -> Result<()> {
    if e.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("energy {e}")))
    }
}

/// `[[E - v, -1], [1, 0]]`.
pub fn transfer_matrix(e: f64, v: f64) -> Result<Mat2> {
    if !e.is_finite() || !v.is_finite() {
        return Err(Error::NonFinite(format!("energy {e} / potential {v}")));
    }
    Ok(Mat2::new(e - v, -1.0, 1.0, 0.0))
}

/// Product over a raw potential sample, first site rightmost.
pub fn product_of_samples(e: f64, samples: &[f64]) -> ScaledMatrix {
    let mut s = ScaledMatrix::identity();
    for &v in samples {
        s.push_transfer(e - v);
    }
    s
}

/// Product over letter ids with a per-letter potential table.
pub(crate) fn product_of_ids(e: f64, ids: &[u8], values: &[f64]) -> ScaledMatrix {
    let mut s = ScaledMatrix::identity();
    for &id in ids {
        s.push_transfer(e - values[id as usize]);
    }
    s
}

pub fn cocycle_product(e: f64, x: &Word, potential: &PotentialMap) -> Result<ScaledMatrix> {
    check_energy(e)?;
    check_table(x, potential)?;
    Ok(product_of_ids(e, x.ids(), potential.values()))
}

/// `T(x_1)^{-1} ... T(x_n)^{-1}`, the inverse of [`cocycle_product`] built in
/// reverse letter order.
pub fn inverse_cocycle_product(e: f64, x: &Word, potential: &PotentialMap) -> Result<ScaledMatrix> {
    check_energy(e)?;
    check_table(x, potential)?;
    let values = potential.values();
    let mut s = ScaledMatrix::identity();
    for &id in x.ids().iter().rev() {
        s.push_inverse_transfer(e - values[id as usize]);
    }
    Ok(s)
}

/// The cocycle `A(n, omega)` for any sign of `n`, with `sample(k)` returning
/// `omega(k)`:
///
/// * `n > 0`: `M(T^{n-1} omega) ... M(omega)`, using `omega(1) .. omega(n)`
/// * `n = 0`: identity
/// * `n < 0`: `M(T^n omega)^{-1} ... M(T^{-1} omega)^{-1}`, using `omega(n+1) .. omega(0)`
pub fn signed_cocycle(e: f64, n: i64, sample: impl Fn(i64) -> f64) -> Result<ScaledMatrix> {
    check_energy(e)?;
    let mut s = ScaledMatrix::identity();
    if n > 0 {
        for k in 1..=n {
            s.push_transfer(e - sample(k));
        }
    } else if n < 0 {
        for k in (n..=-1).rev() {
            s.push_inverse_transfer(e - sample(k + 1));
        }
    }
    Ok(s)
}

fn check_table(x: &Word, potential: &PotentialMap) -> Result<()> {
    if potential.len() != x.alphabet().len() {
        return Err(Error::AlphabetMismatch(format!(
            "potential has {} values, word alphabet has {} letters",
            potential.len(),
            x.alphabet().len()
        )));
    }
    Ok(())
}

/// `F^E(x) = log ||M^E(x)||` with the spectral norm.
pub fn f_energy(e: f64, x: &Word, potential: &PotentialMap) -> Result<f64> {
    let p = cocycle_product(e, x, potential)?;
    Ok(p.log_scale() + p.mat().norm().ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    /// `max(raw, 0)`.
    pub gamma: f64,
    pub raw: f64,
    pub word_length: usize,
}

impl GammaEstimate {
    pub(crate) fn from_product(p: &ScaledMatrix, len: usize) -> Self {
        let raw = if len == 0 { 0.0 } else { p.log_norm() / len as f64 };
        GammaEstimate {
            gamma: raw.max(0.0),
            raw,
            word_length: len,
        }
    }
}

/// `gamma_N(E) = F^E(w) / |w|` on the canonical length-`n` window.
pub fn lyapunov_estimate(system: &SubshiftSystem, e: f64, n: usize) -> Result<GammaEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("word length N must be >= 1".into()));
    }
    check_energy(e)?;
    let w = system.canonical_window(n)?;
    let p = product_of_ids(e, w.ids(), system.potential().values());
    Ok(GammaEstimate::from_product(&p, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    /// `max - min` of `F^E(x) / |x|` over distinct length-`n` factors.
    pub spread: f64,
    pub min: f64,
    pub max: f64,
    pub distinct_factors: usize,
    /// Set when fewer than two distinct factors exist.
    pub periodic: bool,
}

/// Spread of `F^E(x)/n` over the distinct length-`n` factors of `window`.
pub(crate) fn spread_over_window(e: f64, window: &[u8], values: &[f64], n: usize) -> Spread {
    let factors = distinct_factors(window, n);
    let rates: Vec<f64> = factors
        .iter()
        .map(|f| product_of_ids(e, f, values).log_norm() / n as f64)
        .collect();
    let min = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let max = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if factors.len() < 2 {
        return Spread {
            spread: 0.0,
            min,
            max,
            distinct_factors: factors.len(),
            periodic: true,
        };
    }
    Spread {
        spread: max - min,
        min,
        max,
        distinct_factors: factors.len(),
        periodic: false,
    }
}

/// Uniformity spread over the factors of a canonical window of length
/// `min(cap, sample_budget * n)`.
pub fn uniformity_spread(
    system: &SubshiftSystem,
    e: f64,
    n: usize,
    sample_budget: usize,
) -> Result<Spread> {
    if n == 0 || sample_budget == 0 {
        return Err(Error::InvalidArgument("n and sample budget must be >= 1".into()));
    }
    check_energy(e)?;
    let len = n.saturating_mul(sample_budget).min(system.window_cap()).max(n);
    let w = system.canonical_window(len)?;
    Ok(spread_over_window(e, w.ids(), system.potential().values(), n))
}

/// `u(0), ..., u(|x| + 1)` from `u(n+1) = (E - v(x_n)) u(n) - u(n-1)`.
pub fn solution_sequence(
    e: f64,
    x: &Word,
    potential: &PotentialMap,
    u0: f64,
    u1: f64,
) -> Result<Vec<f64>> {
    check_energy(e)?;
    check_table(x, potential)?;
    if !u0.is_finite() || !u1.is_finite() {
        return Err(Error::NonFinite("initial values".into()));
    }
    let values = potential.values();
    let mut u = Vec::with_capacity(x.len() + 2);
    u.push(u0);
    u.push(u1);
    for (n, &id) in x.ids().iter().enumerate() {
        let next = (e - values[id as usize]) * u[n + 1] - u[n];
        if !next.is_finite() {
            return Err(Error::Overflow { site: n + 2 });
        }
        u.push(next);
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DichotomyOptions {
    pub gamma_min: f64,
    pub angle_tol: f64,
}

impl Default for DichotomyOptions {
    fn default() -> Self {
        DichotomyOptions {
            gamma_min: DEFAULT_GAMMA_MIN,
            angle_tol: DEFAULT_ANGLE_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableDirection {
    /// Unit vector `V` with `||M(n) V|| = sigma_min(M(n))`.
    pub vector: [f64; 2],
    /// `-log(sigma_min) / n`.
    pub contraction_rate: f64,
    pub gamma: f64,
    /// Angle in radians between the estimates at `n` and `2n`.
    pub angle_change: f64,
    pub stabilized: bool,
}

/// Angle between the lines spanned by two unit vectors.
pub fn line_angle(a: [f64; 2], b: [f64; 2]) -> f64 {
    let cross = (a[0] * b[1] - a[1] * b[0]).abs();
    let dot = (a[0] * b[0] + a[1] * b[1]).abs();
    cross.atan2(dot)
}

/// Most-contracted right singular direction of `M^E(n, omega)` on the canonical window.
pub fn stable_direction(
    system: &SubshiftSystem,
    e: f64,
    n: usize,
    options: DichotomyOptions,
) -> Result<StableDirection> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    check_energy(e)?;
    let w = system.canonical_window(2 * n)?;
    let values = system.potential().values();
    let mut p = ScaledMatrix::identity();
    for &id in &w.ids()[..n] {
        p.push_transfer(e - values[id as usize]);
    }
    let gamma = GammaEstimate::from_product(&p, n).gamma;
    if gamma < options.gamma_min {
        return Err(Error::NoDichotomy {
            gamma,
            threshold: options.gamma_min,
        });
    }
    let vector = p.most_contracted_direction();
    let contraction_rate = -p.log_min_singular() / n as f64;
    for &id in &w.ids()[n..] {
        p.push_transfer(e - values[id as usize]);
    }
    let angle_change = line_angle(vector, p.most_contracted_direction());
    Ok(StableDirection {
        vector,
        contraction_rate,
        gamma,
        angle_change,
        stabilized: angle_change <= options.angle_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subshifts::catalog;
    use std::sync::Arc;

    use crate::words::Alphabet;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(vec!['a', 'b']).unwrap())
    }

    fn word(s: &str) -> Word {
        Word::parse(ab(), s).unwrap()
    }

    fn zero() -> PotentialMap {
        PotentialMap::new(vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn transfer_matrix_examples() {
        assert_eq!(transfer_matrix(0.0, 0.0).unwrap(), Mat2::new(0.0, -1.0, 1.0, 0.0));
        assert_eq!(transfer_matrix(2.0, 1.0).unwrap(), Mat2::new(1.0, -1.0, 1.0, 0.0));
        for &(e, v) in &[(0.3, -1.2), (7.0, 2.0), (-3.5, 0.25)] {
            assert_eq!(transfer_matrix(e, v).unwrap().det(), 1.0);
        }
        assert!(transfer_matrix(f64::NAN, 0.0).is_err());
        assert!(transfer_matrix(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn cocycle_product_examples() {
        let p = cocycle_product(0.0, &word(""), &zero()).unwrap();
        assert_eq!(p.log_scale(), 0.0);
        assert_eq!(p.mat(), Mat2::IDENTITY);

        let p = cocycle_product(0.0, &word("a"), &zero()).unwrap();
        assert!(p.log_scale().abs() < 1e-15);
        let m = p.mat();
        assert!((m.m11).abs() < 1e-15 && (m.m12 + 1.0).abs() < 1e-15);
        assert!((m.m21 - 1.0).abs() < 1e-15 && m.m22.abs() < 1e-15);

        let m = cocycle_product(0.0, &word("aa"), &zero()).unwrap().to_mat();
        assert!((m.m11 + 1.0).abs() < 1e-15 && m.m12.abs() < 1e-15);
        assert!(m.m21.abs() < 1e-15 && (m.m22 + 1.0).abs() < 1e-15);
        assert!(cocycle_product(f64::NAN, &word("a"), &zero()).is_err());
    }

    #[test]
    fn product_order_is_last_letter_leftmost() {
        let pot = PotentialMap::new(vec![0.0, 1.0]).unwrap();
        let e = 0.7;
        let ta = transfer_matrix(e, 0.0).unwrap();
        let tb = transfer_matrix(e, 1.0).unwrap();
        let expected = tb * ta * ta;
        let got = cocycle_product(e, &word("aab"), &pot).unwrap().to_mat();
        assert!((got.m11 - expected.m11).abs() < 1e-12);
        assert!((got.m12 - expected.m12).abs() < 1e-12);
        assert!((got.m21 - expected.m21).abs() < 1e-12);
        assert!((got.m22 - expected.m22).abs() < 1e-12);
    }

    #[test]
    fn f_energy_examples() {
        assert_eq!(f_energy(1.3, &word(""), &zero()).unwrap(), 0.0);
        let sigma = ((11.0 + 117f64.sqrt()) / 2.0).sqrt();
        let f = f_energy(3.0, &word("a"), &zero()).unwrap();
        assert!((f - sigma.ln()).abs() < 1e-14);
        assert!((sigma - 3.30278).abs() < 1e-5);

        let pot = PotentialMap::new(vec![0.0, 1.0]).unwrap();
        let whole = f_energy(0.5, &word("abaab"), &pot).unwrap();
        let parts = f_energy(0.5, &word("ab"), &pot).unwrap() + f_energy(0.5, &word("aab"), &pot).unwrap();
        assert!(whole <= parts + 1e-12, "{whole} > {parts}");
    }

    #[test]
    fn inverse_route_agrees() {
        let fib = catalog("fibonacci").unwrap();
        let w = fib.canonical_window(3000).unwrap();
        for &e in &[-2.5, -1.0, 0.0, 0.5, 1.9, 4.0] {
            let f = f_energy(e, &w, fib.potential()).unwrap();
            let g = inverse_cocycle_product(e, &w, fib.potential()).unwrap().log_norm();
            assert!((f - g).abs() <= 1e-6 * f.abs().max(1.0), "E={e}: {f} vs {g}");
        }
    }

    #[test]
    fn signed_cocycle_negative_branch_inverts() {
        let st = catalog("golden_sturmian").unwrap();
        let values = st.potential().values().to_vec();
        let spec = match st.source() {
            crate::subshifts::Source::Sturmian(s) => s.clone(),
            _ => unreachable!(),
        };
        let sample = |k: i64| values[spec.letter_at(k) as usize];
        let e = 0.4;
        assert_eq!(signed_cocycle(e, 0, sample).unwrap().to_mat(), Mat2::IDENTITY);
        // A(-n, omega) A(n, T^{-n} omega) = Id
        let n = 25i64;
        let back = signed_cocycle(e, -n, sample).unwrap().to_mat();
        let shifted = |k: i64| sample(k - n);
        let fwd = signed_cocycle(e, n, shifted).unwrap().to_mat();
        let id = back * fwd;
        assert!((id.m11 - 1.0).abs() < 1e-8 && id.m12.abs() < 1e-8);
        assert!(id.m21.abs() < 1e-8 && (id.m22 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn free_lyapunov_limits() {
        let free = catalog("free").unwrap();
        let g = lyapunov_estimate(&free, 5.0, 20_000).unwrap();
        let exact = ((5.0 + 21f64.sqrt()) / 2.0).ln();
        assert!((g.gamma - exact).abs() < 1e-3, "{g:?} vs {exact}");
        assert!((exact - 1.5668).abs() < 1e-4);
        for &n in &[100usize, 1000, 10_000] {
            let g = lyapunov_estimate(&free, 1.0, n).unwrap();
            assert!(g.gamma < 3.0 * (n as f64).ln() / n as f64, "n={n}: {g:?}");
        }
    }

    #[test]
    fn hyperbolic_lower_bound() {
        for name in ["fibonacci", "rudin_shapiro", "golden_sturmian", "dimer"] {
            let sys = catalog(name).unwrap();
            let vmax = sys.potential().max_abs();
            for &e in &[vmax + 3.5, -(vmax + 3.1), vmax + 8.0] {
                let g = lyapunov_estimate(&sys, e, 500).unwrap();
                let bound = (e.abs() - vmax - 2.0).ln();
                assert!(g.gamma >= bound, "{name} E={e}: {} < {bound}", g.gamma);
            }
        }
    }

    #[test]
    fn spread_examples() {
        let dimer = catalog("dimer").unwrap();
        for &e in &[-1.0, 0.5, 3.0] {
            let one_period = f_energy(e, &dimer.canonical_window(2).unwrap(), dimer.potential()).unwrap();
            for &n in &[8usize, 32, 128] {
                let s = uniformity_spread(&dimer, e, n, 8).unwrap();
                assert!(s.spread <= 2.0 * one_period / n as f64 + 1e-12, "E={e} n={n}: {s:?}");
            }
        }
        let free = catalog("free").unwrap();
        let s = uniformity_spread(&free, 0.3, 16, 4).unwrap();
        assert!(s.periodic);
        assert_eq!(s.spread, 0.0);
    }

    #[test]
    fn fibonacci_spread_shrinks() {
        let fib = catalog("fibonacci").unwrap();
        let spreads: Vec<f64> = [64usize, 256, 1024]
            .iter()
            .map(|&n| uniformity_spread(&fib, 0.5, n, 4).unwrap().spread)
            .collect();
        assert!(spreads[2] < spreads[0], "{spreads:?}");
        let far = uniformity_spread(&fib, 10.0, 1024, 4).unwrap();
        assert!(far.spread < 1e-2);
        assert!(lyapunov_estimate(&fib, 10.0, 1024).unwrap().gamma > 2.0);
    }

    #[test]
    fn solution_examples() {
        let pot = PotentialMap::new(vec![0.0, 1.0]).unwrap();
        let x = word("abaababaab");
        let u = solution_sequence(0.3, &x, &pot, 0.0, 0.0).unwrap();
        assert!(u.iter().all(|&v| v == 0.0));
        assert_eq!(u.len(), x.len() + 2);

        let (u0, u1) = (0.4, -1.1);
        let u = solution_sequence(0.3, &x, &pot, u0, u1).unwrap();
        for n in 1..=x.len() {
            let img = cocycle_product(0.3, &x.factor(0, n), &pot).unwrap().apply([u1, u0]);
            assert!((img[0] - u[n + 1]).abs() <= 1e-12 * img[0].abs().max(1.0));
            assert!((img[1] - u[n]).abs() <= 1e-12 * img[1].abs().max(1.0));
        }

        // Chebyshev closed form for the free chain
        let theta: f64 = 0.7;
        let free = PotentialMap::new(vec![0.0]).unwrap();
        let alphabet = Arc::new(Alphabet::new(vec!['a']).unwrap());
        let x = Word::from_ids(alphabet, vec![0; 200]).unwrap();
        let u = solution_sequence(2.0 * theta.cos(), &x, &free, 0.0, theta.sin()).unwrap();
        for (n, &un) in u.iter().enumerate() {
            assert!((un - (n as f64 * theta).sin()).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn solution_overflow_is_reported() {
        let alphabet = Arc::new(Alphabet::new(vec!['a']).unwrap());
        let x = Word::from_ids(alphabet, vec![0; 2000]).unwrap();
        let free = PotentialMap::new(vec![0.0]).unwrap();
        assert!(matches!(
            solution_sequence(10.0, &x, &free, 0.0, 1.0),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn stable_direction_examples() {
        let free = catalog("free").unwrap();
        let sd = stable_direction(&free, 5.0, 40, DichotomyOptions::default()).unwrap();
        let lambda = (5.0 - 21f64.sqrt()) / 2.0;
        let norm = (1.0 + lambda * lambda).sqrt();
        assert!(line_angle(sd.vector, [lambda / norm, 1.0 / norm]) < 1e-12);
        assert!(sd.stabilized);

        let fib = catalog("fibonacci").unwrap();
        let sd = stable_direction(&fib, 10.0, 300, DichotomyOptions::default()).unwrap();
        let g = lyapunov_estimate(&fib, 10.0, 300).unwrap().gamma;
        assert!((sd.contraction_rate - g).abs() <= 0.05 * g);

        assert!(matches!(
            stable_direction(&free, 1.0, 500, DichotomyOptions::default()),
            Err(Error::NoDichotomy { .. })
        ));
    }

    #[test]
    fn singular_values_multiply_to_one() {
        let fib = catalog("thue_morse").unwrap();
        let w = fib.canonical_window(700).unwrap();
        for &e in &[-2.0, 0.1, 1.3, 3.7] {
            let p = cocycle_product(e, &w, fib.potential()).unwrap();
            assert!((p.log_norm() + p.log_min_singular()).abs() < 1e-9);
        }
    }
}
