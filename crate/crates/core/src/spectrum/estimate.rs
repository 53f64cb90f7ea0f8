use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cocycle::{product_of_ids, LyapunovProfile};
use crate::error::{Error, Result};
use crate::grid::EnergyGrid;
use crate::output::{fmt_f64, CsvWriter, Metadata};
use crate::words::{PotentialMap, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FiniteSection,
    Trace,
    LyapunovZero,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::FiniteSection => "finite_section",
            Method::Trace => "trace",
            Method::LyapunovZero => "lyapunov_zero",
        }
    }
}

/// A subset of the grid standing in for the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumEstimate {
    pub grid: EnergyGrid,
    pub method: Method,
    pub parameters: BTreeMap<String, Value>,
    pub mask: Vec<bool>,
    /// `h * count(mask)`.
    pub measure: f64,
    /// Maximal runs of excluded grid points lying between included ones, as
    /// `[first, last]` excluded energies.
    pub gaps: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    /// Raw eigenvalues behind a finite-section mask.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eigenvalues: Vec<f64>,
}

impl SpectrumEstimate {
    pub fn from_mask(
        grid: EnergyGrid,
        mask: Vec<bool>,
        method: Method,
        parameters: BTreeMap<String, Value>,
    ) -> Result<Self> {
        if mask.len() != grid.points() {
            return Err(Error::GridMismatch);
        }
        let measure = grid.spacing() * mask.iter().filter(|&&m| m).count() as f64;
        let gaps = interior_runs(&mask, false)
            .into_iter()
            .map(|(a, b)| [grid.energy(a), grid.energy(b)])
            .collect();
        Ok(SpectrumEstimate {
            grid,
            method,
            parameters,
            mask,
            measure,
            gaps,
            gamma: None,
            eigenvalues: Vec::new(),
        })
    }

    /// Marks the grid point nearest to each eigenvalue inside the window.
    pub fn from_eigenvalues(
        grid: EnergyGrid,
        eigenvalues: &[f64],
        parameters: BTreeMap<String, Value>,
    ) -> Result<Self> {
        let h = grid.spacing();
        let mut mask = vec![false; grid.points()];
        for &e in eigenvalues {
            if e >= grid.e_min() - 0.5 * h && e <= grid.e_max() + 0.5 * h {
                mask[grid.nearest_index(e)] = true;
            }
        }
        let mut s = Self::from_mask(grid, mask, Method::FiniteSection, parameters)?;
        s.eigenvalues = eigenvalues.to_vec();
        Ok(s)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn gap_count(&self) -> usize {
        self.gaps.len()
    }

    pub fn largest_gap(&self) -> f64 {
        let h = self.grid.spacing();
        self.gaps.iter().map(|g| g[1] - g[0] + h).fold(0.0, f64::max)
    }

    /// Maximal runs of included grid points as `[first, last]` energies.
    pub fn bands(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, &m) in self.mask.iter().enumerate() {
            match (m, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    out.push([self.grid.energy(s), self.grid.energy(i - 1)]);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push([self.grid.energy(s), self.grid.e_max()]);
        }
        out
    }

    fn true_energies(&self) -> Vec<f64> {
        self.mask
            .iter()
            .enumerate()
            .filter(|&(_, &m)| m)
            .map(|(i, _)| self.grid.energy(i))
            .collect()
    }

    /// Distance from `e` to the nearest included grid point; `None` for an empty set.
    pub fn distance_to_set(&self, e: f64) -> Option<f64> {
        nearest_distance(&self.true_energies(), e)
    }

    pub fn validate(&self) -> Result<()> {
        let check = Self::from_mask(self.grid, self.mask.clone(), self.method, BTreeMap::new())?;
        if check.gaps != self.gaps || (check.measure - self.measure).abs() > 1e-9 * self.grid.width() {
            return Err(Error::Parse("measure or gaps inconsistent with mask".into()));
        }
        if let Some(g) = &self.gamma {
            if g.len() != self.mask.len() {
                return Err(Error::GridMismatch);
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let inner = match value.get("spectrum") {
            Some(v) => v.clone(),
            None => value,
        };
        let s: SpectrumEstimate = serde_json::from_value(inner)?;
        s.validate()?;
        Ok(s)
    }

    /// Columns `E,mask` plus `gamma` when available.
    pub fn to_csv(&self, meta: &Metadata) -> String {
        let cols: &[&str] = if self.gamma.is_some() {
            &["E", "mask", "gamma"]
        } else {
            &["E", "mask"]
        };
        let mut w = CsvWriter::new(meta, cols);
        for (i, &m) in self.mask.iter().enumerate() {
            let mut row = vec![fmt_f64(self.grid.energy(i)), u8::from(m).to_string()];
            if let Some(g) = &self.gamma {
                row.push(fmt_f64(g[i]));
            }
            w.row(&row);
        }
        w.finish()
    }
}

/// Runs of `value` that have a differing entry on both sides.
fn interior_runs(mask: &[bool], value: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < mask.len() {
        if mask[i] == value {
            let start = i;
            while i < mask.len() && mask[i] == value {
                i += 1;
            }
            if start > 0 && i < mask.len() {
                out.push((start, i - 1));
            }
        } else {
            i += 1;
        }
    }
    out
}

fn nearest_distance(sorted: &[f64], e: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let i = sorted.partition_point(|&x| x < e);
    let mut best = f64::INFINITY;
    if i < sorted.len() {
        best = best.min((sorted[i] - e).abs());
    }
    if i > 0 {
        best = best.min((e - sorted[i - 1]).abs());
    }
    Some(best)
}

/// `max(0.02, 4 ln N / N)`.
pub fn epsilon_rule(n: usize) -> f64 {
    let n = n.max(1) as f64;
    (4.0 * n.ln() / n).max(0.02)
}

/// Grid points where `|tr M^E(p)| <= 2`, the spectrum of the period-`|p|` operator.
pub fn trace_spectrum(p: &Word, potential: &PotentialMap, grid: &EnergyGrid) -> Result<SpectrumEstimate> {
    if p.is_empty() {
        return Err(Error::InvalidArgument("period word must be non-empty".into()));
    }
    if potential.len() != p.alphabet().len() {
        return Err(Error::AlphabetMismatch("potential does not cover the period's alphabet".into()));
    }
    let ln2 = 2f64.ln();
    let mask: Vec<bool> = grid
        .energies()
        .par_iter()
        .map(|&e| {
            let (_, log_tr) = product_of_ids(e, p.ids(), potential.values()).log_abs_trace();
            log_tr <= ln2 + 1e-12
        })
        .collect();
    let mut params = BTreeMap::new();
    params.insert("period".into(), Value::from(p.len()));
    SpectrumEstimate::from_mask(*grid, mask, Method::Trace, params)
}

/// Grid points where `gamma_N <= epsilon`.
pub fn lyapunov_zero_set(profile: &LyapunovProfile, epsilon: f64) -> Result<SpectrumEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let mask = profile.gamma.iter().map(|&g| g <= epsilon).collect();
    let mut params = BTreeMap::new();
    params.insert("N".into(), Value::from(profile.word_length));
    params.insert("epsilon".into(), Value::from(epsilon));
    let mut s = SpectrumEstimate::from_mask(profile.grid, mask, Method::LyapunovZero, params)?;
    s.gamma = Some(profile.gamma.clone());
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub method_a: Method,
    pub method_b: Method,
    /// `h * count(mask_a xor mask_b)`.
    pub symmetric_difference: f64,
    /// Largest distance from an included point of `a` to the set `b`.
    pub distance_a_to_b: Option<f64>,
    pub distance_b_to_a: Option<f64>,
}

pub fn compare_spectra(a: &SpectrumEstimate, b: &SpectrumEstimate) -> Result<ComparisonReport> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let xor = a.mask.iter().zip(&b.mask).filter(|(x, y)| x != y).count();
    let (ta, tb) = (a.true_energies(), b.true_energies());
    let one_sided = |from: &[f64], to: &[f64]| -> Option<f64> {
        if from.is_empty() || to.is_empty() {
            return None;
        }
        Some(
            from.iter()
                .map(|&e| nearest_distance(to, e).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max),
        )
    };
    Ok(ComparisonReport {
        method_a: a.method,
        method_b: b.method,
        symmetric_difference: a.grid.spacing() * xor as f64,
        distance_a_to_b: one_sided(&ta, &tb),
        distance_b_to_a: one_sided(&tb, &ta),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub parameters: BTreeMap<String, Value>,
    pub measure: f64,
    pub gap_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorReport {
    pub gap_count: usize,
    pub largest_gap: f64,
    pub measure: f64,
    /// The last three levels, coarsest first.
    pub refinement: Vec<RefinementLevel>,
    pub measure_decreasing: bool,
    pub gaps_increasing: bool,
}

/// Reports on the finest level and the trend across the last three.
pub fn cantor_diagnostic(levels: &[SpectrumEstimate]) -> Result<CantorReport> {
    let last = levels
        .last()
        .ok_or_else(|| Error::InvalidArgument("cantor diagnostic needs at least one level".into()))?;
    let tail = &levels[levels.len().saturating_sub(3)..];
    let refinement: Vec<RefinementLevel> = tail
        .iter()
        .map(|s| RefinementLevel {
            parameters: s.parameters.clone(),
            measure: s.measure,
            gap_count: s.gap_count(),
        })
        .collect();
    Ok(CantorReport {
        gap_count: last.gap_count(),
        largest_gap: last.largest_gap(),
        measure: last.measure,
        measure_decreasing: refinement.windows(2).all(|w| w[1].measure < w[0].measure),
        gaps_increasing: refinement.windows(2).all(|w| w[1].gap_count > w[0].gap_count),
        refinement,
    })
}
