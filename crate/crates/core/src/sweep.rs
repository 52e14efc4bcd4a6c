//! Grids of a monotone quantity with per-point error estimates and
//! pairwise monotonicity verdicts.

use serde::{Deserialize, Serialize};

use crate::error::{range, Result};
use crate::numerics::Estimate;

/// Slack added to every pairwise comparison on top of the error estimates.
pub const MONOTONICITY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub quantity: String,
    pub direction: Direction,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub tol: f64,
    /// `verdicts[i]` compares grid points `i` and `i + 1`.
    pub verdicts: Vec<bool>,
    /// Largest amount by which a comparison exceeded its allowance (≤ 0 when
    /// every comparison passes).
    pub worst_violation: f64,
}

impl SweepReport {
    pub fn new(quantity: impl Into<String>, direction: Direction, grid: Vec<f64>, estimates: &[Estimate], tol: f64) -> Result<Self> {
        if grid.len() != estimates.len() {
            return range("grid and values differ in length");
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return range("sweep grid must be strictly increasing");
        }
        let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
        let errors: Vec<f64> = estimates.iter().map(|e| e.error).collect();
        let mut verdicts = Vec::with_capacity(grid.len().saturating_sub(1));
        let mut worst = f64::NEG_INFINITY;
        for i in 0..values.len().saturating_sub(1) {
            let allowance = errors[i] + errors[i + 1] + tol;
            let step = values[i + 1] - values[i];
            let excess = match direction {
                Direction::NonIncreasing => step,
                Direction::NonDecreasing => -step,
                Direction::Constant => step.abs(),
            } - allowance;
            worst = worst.max(excess);
            verdicts.push(excess <= 0.0);
        }
        if verdicts.is_empty() {
            worst = 0.0;
        }
        Ok(Self { quantity: quantity.into(), direction, grid, values, errors, tol, verdicts, worst_violation: worst })
    }

    pub fn monotone(&self) -> bool {
        self.verdicts.iter().all(|&v| v)
    }

    /// Largest deviation of any value from `target`.
    pub fn max_deviation_from(&self, target: f64) -> f64 {
        self.values.iter().map(|v| (v - target).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_respect_error_budget() {
        let est = [Estimate::new(1.0, 1e-3), Estimate::new(1.0005, 1e-4), Estimate::new(0.9, 0.0)];
        let rep = SweepReport::new("q", Direction::NonIncreasing, vec![0.1, 0.2, 0.3], &est, 0.0).unwrap();
        assert_eq!(rep.verdicts, vec![true, true]);
        let tight = [Estimate::new(1.0, 0.0), Estimate::new(1.01, 0.0)];
        let rep = SweepReport::new("q", Direction::NonIncreasing, vec![0.1, 0.2], &tight, 1e-6).unwrap();
        assert!(!rep.monotone());
        assert!((rep.worst_violation - (0.01 - 1e-6)).abs() < 1e-12);
        assert!(SweepReport::new("q", Direction::Constant, vec![0.2, 0.1], &tight, 0.0).is_err());
    }
}
