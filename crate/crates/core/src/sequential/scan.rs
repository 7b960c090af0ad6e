use rayon::prelude::*;
use serde::Serialize;

use super::{alice1_asc_closed, alice2_asc_closed};
use crate::coherence::CoherenceMetric;
use crate::error::{Error, Result};
use crate::naqc::roots::bisect;
use crate::qcore::PrimeDim;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub lambda1: f64,
    pub lambda2: f64,
    pub asc1: f64,
    pub asc2: f64,
    pub v1: bool,
    pub v2: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionScan {
    pub d: usize,
    pub metric: CoherenceMetric,
    pub resolution: usize,
    #[serde(rename = "N_c")]
    pub n_c: f64,
    /// Alice1's boundary; does not depend on lambda2.
    pub lambda_1c: f64,
    /// Largest lambda1 at which a sharp Alice2 still violates.
    pub lambda_1t: f64,
    pub alice1_fraction: f64,
    pub alice2_fraction: f64,
    pub both_violate: usize,
    #[serde(skip)]
    pub cells: Vec<RegionCell>,
}

/// Closed-form scan of `(lambda1, lambda2)` over the grid `(k + 1) / res`,
/// row-major in `lambda1`.
pub fn region_scan(d: PrimeDim, resolution: usize, metric: CoherenceMetric, n_c: f64) -> Result<RegionScan> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!("grid resolution must be at least 2, got {resolution}")));
    }
    let dd = d.get();
    let grid: Vec<f64> = (0..resolution).map(|k| (k + 1) as f64 / resolution as f64).collect();
    let cells: Vec<RegionCell> = grid
        .par_iter()
        .flat_map_iter(|&l1| {
            let asc1 = alice1_asc_closed(dd, l1, metric);
            grid.iter().map(move |&l2| {
                let asc2 = alice2_asc_closed(dd, l1, l2, metric);
                RegionCell { lambda1: l1, lambda2: l2, asc1, asc2, v1: asc1 > n_c, v2: asc2 > n_c }
            })
        })
        .collect();
    let lambda_1c = bisect(|l| Ok(alice1_asc_closed(dd, l, metric) - n_c), 0.0, 1.0, 1e-15)?;
    let lambda_1t = bisect(|l| Ok(alice2_asc_closed(dd, l, 1.0, metric) - n_c), 0.0, 1.0, 1e-15)?;
    let total = cells.len() as f64;
    let alice1_fraction = cells.iter().filter(|c| c.v1).count() as f64 / total;
    let alice2_fraction = cells.iter().filter(|c| c.v2).count() as f64 / total;
    let both_violate = cells.iter().filter(|c| c.v1 && c.v2).count();
    Ok(RegionScan {
        d: dd,
        metric,
        resolution,
        n_c,
        lambda_1c,
        lambda_1t,
        alice1_fraction,
        alice2_fraction,
        both_violate,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naqc::closed_form_l1_critical;

    #[test]
    fn qubit_l1_boundaries() {
        let d = PrimeDim::new(2).unwrap();
        let s = region_scan(d, 41, CoherenceMetric::L1, closed_form_l1_critical(2)).unwrap();
        assert_eq!(s.cells.len(), 41 * 41);
        assert_eq!(s.both_violate, 0);
        assert!((s.lambda_1c - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        // 1 + 2 sqrt(1 - l^2) = sqrt(6)
        let want = (1.0 - ((6f64.sqrt() - 1.0) / 2.0).powi(2)).sqrt();
        assert!((s.lambda_1t - want).abs() < 1e-12);
        assert!((s.lambda_1t - 0.6891).abs() < 1e-3);
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(region_scan(PrimeDim::new(2).unwrap(), 1, CoherenceMetric::L1, 2.0).is_err());
    }
}
