//! The comparison table `N(X) / X^{1/4}` against the constant `c(Heis_3)`.

use serde::Serialize;

use crate::counter::{heis_total, Count, WeightMode};
use crate::error::{HeisError, Result};

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub x: u128,
    pub count: Count,
    pub x_quarter: f64,
    pub ratio: f64,
    pub c_estimate: f64,
    pub ratio_over_c: f64,
}

impl RatioRow {
    pub const CSV_HEADER: &'static str = "x,count,x_quarter,ratio,c_estimate,ratio_over_c";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{:e},{:e}",
            self.x, self.count, self.x_quarter, self.ratio, self.c_estimate, self.ratio_over_c
        )
    }
}

/// `points` integers spaced evenly in `log X` from `x_min` to `x_max`, both
/// included, deduplicated.
pub fn log_grid(x_min: u128, x_max: u128, points: usize) -> Result<Vec<u128>> {
    if x_min == 0 || x_max < x_min || points == 0 {
        return Err(HeisError::InvalidArgument(
            "need 1 <= x_min <= x_max and points >= 1".into(),
        ));
    }
    if points == 1 {
        return Ok(vec![x_min]);
    }
    // Base 10 keeps decade grids such as 10^12..10^16 exact.
    let (a, b) = ((x_min as f64).log10(), (x_max as f64).log10());
    let mut grid: Vec<u128> = (0..points)
        .map(|i| {
            if i == 0 {
                x_min
            } else if i == points - 1 {
                x_max
            } else {
                let t = i as f64 / (points - 1) as f64;
                (10f64.powf(a + t * (b - a)).round() as u128).clamp(x_min, x_max)
            }
        })
        .collect();
    grid.dedup();
    Ok(grid)
}

pub fn ratio_report(x_grid: &[u128], mode: WeightMode, c_estimate: f64) -> Result<Vec<RatioRow>> {
    x_grid
        .iter()
        .map(|&x| {
            let report = heis_total(x, mode)?;
            let x_quarter = (x as f64).powf(0.25);
            let ratio = report.count.as_f64() / x_quarter;
            Ok(RatioRow {
                x,
                count: report.count,
                x_quarter,
                ratio,
                c_estimate,
                ratio_over_c: ratio / c_estimate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = log_grid(1_000_000_000, 10_000_000_000_000_000, 20).unwrap();
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 1_000_000_000);
        assert_eq!(*g.last().unwrap(), 10_000_000_000_000_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(log_grid(10, 5, 3).is_err());
    }

    #[test]
    fn rows_are_nonnegative() {
        let rows = ratio_report(&[1_000_000_000, 6_000_000_000_000], WeightMode::OmegaFull, 0.01).unwrap();
        assert_eq!(rows[0].ratio, 0.0);
        assert!(rows[1].ratio > 0.0);
        assert!(rows[1].csv_row().starts_with("6000000000000,1,"));
    }
}
