use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{product_of_ids, spread_over_window, GammaEstimate};
use crate::error::{Error, Result};
use crate::grid::EnergyGrid;
use crate::output::{fmt_f64, CsvWriter, Metadata};
use crate::subshifts::SubshiftSystem;

/// Factor length and window multiplier for the per-energy spread column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadParams {
    pub n: usize,
    pub budget: usize,
}

/// `gamma_N(E)` over an energy grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovProfile {
    pub label: String,
    pub grid: EnergyGrid,
    pub word_length: usize,
    pub energies: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_raw: Vec<f64>,
    /// Empty when no spread was requested.
    #[serde(default)]
    pub spread: Vec<f64>,
    #[serde(default)]
    pub spread_params: Option<SpreadParams>,
}

/// Evaluates every grid energy independently; the result does not depend on
/// the number of worker threads.
pub fn lyapunov_profile(
    system: &SubshiftSystem,
    grid: &EnergyGrid,
    n: usize,
    spread: Option<SpreadParams>,
) -> Result<LyapunovProfile> {
    if n == 0 {
        return Err(Error::InvalidArgument("word length N must be >= 1".into()));
    }
    let window = system.canonical_window(n)?;
    let values = system.potential().values();
    let energies = grid.energies();
    let estimates: Vec<GammaEstimate> = energies
        .par_iter()
        .map(|&e| GammaEstimate::from_product(&product_of_ids(e, window.ids(), values), n))
        .collect();

    let spread_col = match spread {
        Some(p) => {
            if p.n == 0 || p.budget == 0 {
                return Err(Error::InvalidArgument("spread n and budget must be >= 1".into()));
            }
            let len = p.n.saturating_mul(p.budget).min(system.window_cap()).max(p.n);
            let w = system.canonical_window(len)?;
            energies
                .par_iter()
                .map(|&e| spread_over_window(e, w.ids(), values, p.n).spread)
                .collect()
        }
        None => Vec::new(),
    };

    Ok(LyapunovProfile {
        label: system.label().to_string(),
        grid: *grid,
        word_length: n,
        energies,
        gamma: estimates.iter().map(|g| g.gamma).collect(),
        gamma_raw: estimates.iter().map(|g| g.raw).collect(),
        spread: spread_col,
        spread_params: spread,
    })
}

impl LyapunovProfile {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Largest `|gamma(E_{i+1}) - gamma(E_i)|`.
    pub fn max_adjacent_jump(&self) -> f64 {
        self.gamma
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }

    /// Index of the smallest gamma, first one on ties.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &g) in self.gamma.iter().enumerate() {
            if g < self.gamma[best] {
                best = i;
            }
        }
        best
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.energies.len();
        if n != self.grid.points()
            || self.gamma.len() != n
            || self.gamma_raw.len() != n
            || !(self.spread.is_empty() || self.spread.len() == n)
        {
            return Err(Error::Parse("profile columns have inconsistent lengths".into()));
        }
        if self.energies.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parse("profile energies must be strictly increasing".into()));
        }
        if self.gamma.iter().any(|&g| !(g >= 0.0) || !g.is_finite()) {
            return Err(Error::Parse("profile gamma must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            profile: LyapunovProfile,
        }
        let value: serde_json::Value = serde_json::from_str(text)?;
        let profile = if value.get("profile").is_some() {
            serde_json::from_value::<Doc>(value)?.profile
        } else {
            serde_json::from_value(value)?
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Columns `E,gamma,gamma_raw,spread,N`; the spread field is empty when absent.
    pub fn to_csv(&self, meta: &Metadata) -> String {
        let mut w = CsvWriter::new(meta, &["E", "gamma", "gamma_raw", "spread", "N"]);
        for i in 0..self.len() {
            w.row(&[
                fmt_f64(self.energies[i]),
                fmt_f64(self.gamma[i]),
                fmt_f64(self.gamma_raw[i]),
                self.spread.get(i).map(|&s| fmt_f64(s)).unwrap_or_default(),
                self.word_length.to_string(),
            ]);
        }
        w.finish()
    }
}
