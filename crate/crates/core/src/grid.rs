//! Geometric grids.

use crate::error::{Error, Result};

/// `n` points spaced evenly in `log` between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain(format!("log grid needs 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("log grid needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
    out[0] = lo;
    out[n - 1] = hi;
    Ok(out)
}

/// Geometric grid with a fixed number of points per decade.
pub fn log_grid_per_decade(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if per_decade == 0 {
        return Err(Error::InvalidParameter("per_decade must be positive".into()));
    }
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::Domain(format!("log grid needs 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round() as usize + 1;
    log_grid(lo, hi, n.max(2))
}

/// Linear interpolation in log-log coordinates on a sorted positive grid.
/// Returns `None` outside the grid.
pub fn loglog_interp(grid: &[f64], values: &[f64], t: f64) -> Option<f64> {
    if grid.is_empty() || t < grid[0] || t > grid[grid.len() - 1] {
        return None;
    }
    let idx = grid.partition_point(|&g| g < t);
    if idx < grid.len() && grid[idx] == t {
        return Some(values[idx]);
    }
    let (i0, i1) = (idx - 1, idx);
    let w = (t.ln() - grid[i0].ln()) / (grid[i1].ln() - grid[i0].ln());
    Some((values[i0].ln() * (1.0 - w) + values[i1].ln() * w).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_spacing() {
        let g = log_grid(1e-3, 1e3, 7).unwrap();
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[6], 1e3);
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn per_decade_count() {
        let g = log_grid_per_decade(1e-6, 1e2, 60).unwrap();
        assert_eq!(g.len(), 8 * 60 + 1);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(log_grid(0.0, 1.0, 3).is_err());
        assert!(log_grid(2.0, 1.0, 3).is_err());
    }

    #[test]
    fn interp_exact_on_power_law() {
        let g = log_grid(1e-2, 1e2, 9).unwrap();
        let v: Vec<f64> = g.iter().map(|t| 3.0 * t.powf(-1.5)).collect();
        let y = loglog_interp(&g, &v, 0.37).unwrap();
        assert!((y / (3.0 * 0.37f64.powf(-1.5)) - 1.0).abs() < 1e-12);
        assert!(loglog_interp(&g, &v, 1e3).is_none());
    }
}
