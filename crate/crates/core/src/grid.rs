use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::PotentialMap;

pub const DEFAULT_POINTS: usize = 4001;
/// Margin added on both sides of the potential range; `||H|| <= 2 + max |v|`.
pub const DEFAULT_MARGIN: f64 = 3.0;

/// Uniform grid `e_min + h i`, `i = 0 .. points - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct EnergyGrid {
    e_min: f64,
    e_max: f64,
    points: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    e_min: f64,
    e_max: f64,
    points: usize,
}

impl TryFrom<RawGrid> for EnergyGrid {
    type Error = Error;

    fn try_from(r: RawGrid) -> Result<Self> {
        EnergyGrid::new(r.e_min, r.e_max, r.points)
    }
}

impl EnergyGrid {
    pub fn new(e_min: f64, e_max: f64, points: usize) -> Result<Self> {
        if !e_min.is_finite() || !e_max.is_finite() {
            return Err(Error::NonFinite("grid bounds".into()));
        }
        if e_min >= e_max {
            return Err(Error::InvalidArgument(format!(
                "grid needs e_min < e_max, got [{e_min}, {e_max}]"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
        }
        Ok(EnergyGrid { e_min, e_max, points })
    }

    /// `[min v - 3, max v + 3]` with 4001 points.
    pub fn default_for(potential: &PotentialMap) -> Self {
        EnergyGrid {
            e_min: potential.min() - DEFAULT_MARGIN,
            e_max: potential.max() + DEFAULT_MARGIN,
            points: DEFAULT_POINTS,
        }
    }

    pub fn e_min(&self) -> f64 {
        self.e_min
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.e_max - self.e_min) / (self.points - 1) as f64
    }

    pub fn width(&self) -> f64 {
        self.e_max - self.e_min
    }

    /// Exact endpoints at `i = 0` and `i = points - 1`.
    pub fn energy(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            return self.e_max;
        }
        self.e_min + (self.e_max - self.e_min) * (i as f64 / (self.points - 1) as f64)
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.energy(i)).collect()
    }

    /// Index of the grid point nearest to `e`, clamped to the grid.
    pub fn nearest_index(&self, e: f64) -> usize {
        let t = ((e - self.e_min) / self.spacing()).round();
        if t <= 0.0 || t.is_nan() {
            0
        } else {
            (t as usize).min(self.points - 1)
        }
    }
}
