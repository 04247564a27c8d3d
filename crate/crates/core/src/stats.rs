//! Small statistics helpers for Monte-Carlo estimates.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Success count over a number of Bernoulli trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        Estimate { successes, trials }
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// Distinguishing advantage `|Pr[win] - 1/2|`.
    pub fn advantage(&self) -> f64 {
        (self.rate() - 0.5).abs()
    }

    /// Standard deviation of the success rate when the true rate is `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials.max(1) as f64).sqrt()
    }

    /// Wilson score interval at `z` standard deviations.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        wilson(self.successes, self.trials, z)
    }
}

pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Pearson chi-square statistic and p-value of `observed` counts against
/// `expected` probabilities. Cells with zero expectation must be empty.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        let e = p * total as f64;
        if e > 0.0 {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        } else if o > 0 {
            return (f64::INFINITY, 0.0);
        }
    }
    if cells < 2 {
        return (stat, 1.0);
    }
    let dist = ChiSquared::new((cells - 1) as f64).expect("positive degrees of freedom");
    (stat, 1.0 - dist.cdf(stat))
}

/// Pearson chi-square test that every row of a contingency table follows
/// the same distribution over columns. Empty rows and columns are dropped.
pub fn chi_square_homogeneity(table: &[Vec<u64>]) -> (f64, f64) {
    let rows: Vec<&Vec<u64>> = table.iter().filter(|r| r.iter().any(|c| *c > 0)).collect();
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let cols: Vec<usize> = (0..width).filter(|&j| rows.iter().any(|r| r.get(j).copied().unwrap_or(0) > 0)).collect();
    if rows.len() < 2 || cols.len() < 2 {
        return (0.0, 1.0);
    }
    let cell = |r: &Vec<u64>, j: usize| r.get(j).copied().unwrap_or(0) as f64;
    let row_sums: Vec<f64> = rows.iter().map(|r| cols.iter().map(|&j| cell(r, j)).sum()).collect();
    let col_sums: Vec<f64> = cols.iter().map(|&j| rows.iter().map(|r| cell(r, j)).sum()).collect();
    let total: f64 = row_sums.iter().sum();
    let mut stat = 0.0;
    for (r, rs) in rows.iter().zip(&row_sums) {
        for (&j, cs) in cols.iter().zip(&col_sums) {
            let e = rs * cs / total;
            stat += (cell(r, j) - e).powi(2) / e;
        }
    }
    let df = ((rows.len() - 1) * (cols.len() - 1)) as f64;
    let dist = ChiSquared::new(df).expect("positive degrees of freedom");
    (stat, 1.0 - dist.cdf(stat))
}
