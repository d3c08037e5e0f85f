use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::kernel_sum;
use super::phase::{admissible_time, dispersive_rhs};
use crate::error::{domain, Result};
use crate::spectral::{lebesgue_norm_h, DyadicScale, Lattice, ModelParams};

/// Sample times for one `(M, N)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TimeGrid {
    /// The same times in every cell; those past the cell's window are flagged.
    Explicit { times: Vec<f64> },
    /// `points` geometric times from `(h/N)^alpha / 16` up to and including
    /// the window edge.
    Geometric { points: usize },
}

impl TimeGrid {
    fn times(&self, h: f64, alpha: f64, n: f64) -> Vec<f64> {
        match self {
            TimeGrid::Explicit { times } => times.clone(),
            TimeGrid::Geometric { points } => {
                let hi = admissible_time(h, alpha, n);
                let lo = (h / n).powf(alpha) / 16.0;
                let p = (*points).max(2);
                let mut ts: Vec<f64> = (0..p)
                    .map(|i| lo * (hi / lo).powf(i as f64 / (p - 1) as f64))
                    .collect();
                // land exactly on the edge
                ts[p - 1] = hi;
                ts
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub m: usize,
    pub n: f64,
    pub t: f64,
    pub admissible: bool,
    /// `||K_t||_inf`; NaN for skipped entries.
    pub kernel_sup: f64,
    /// `||K_t||_inf` over the right-hand side of the dispersive bound.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub alpha: f64,
    pub entries: Vec<BoundEntry>,
    /// `(M, sup ratio over admissible entries)`, ascending in `M`.
    pub sup_by_m: Vec<(usize, f64)>,
}

impl BoundTable {
    /// Largest `|r(2M) / r(M) - 1|` over consecutive lattices in the sweep.
    pub fn max_doubling_variation(&self) -> f64 {
        self.sup_by_m
            .windows(2)
            .map(|w| (w[1].1 / w[0].1 - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn overall_sup(&self) -> f64 {
        self.sup_by_m.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// Normalized kernel sup norms (a lattice delta is extremal for `L^1 -> L^inf`).
pub fn dispersive_bound_check(
    params: &ModelParams,
    m_list: &[usize],
    grid: &TimeGrid,
    n_list: &[f64],
) -> Result<BoundTable> {
    params.require_convergence_regime()?;
    if m_list.is_empty() || n_list.is_empty() {
        return domain("need at least one M and one N");
    }
    let alpha = params.alpha();
    let mut cells = Vec::new();
    for &m in m_list {
        let l = Lattice::new(m)?;
        for &n in n_list {
            let s = DyadicScale::from_value(n)?;
            s.check(l)?;
            cells.push((l, s));
        }
    }
    let per_cell: Vec<Vec<BoundEntry>> = cells
        .par_iter()
        .map(|&(l, s)| {
            let (h, n) = (l.h(), s.value());
            let edge = admissible_time(h, alpha, n);
            grid.times(h, alpha, n)
                .into_iter()
                .map(|t| {
                    let admissible = t != 0.0 && t.abs() <= edge;
                    let (kernel_sup, ratio) = if admissible {
                        let k = kernel_sum(l, params, t, s)?;
                        let sup = lebesgue_norm_h(&k, f64::INFINITY)?;
                        (sup, sup / dispersive_rhs(h, alpha, n, t))
                    } else {
                        (f64::NAN, f64::NAN)
                    };
                    Ok(BoundEntry { m: l.m(), n, t, admissible, kernel_sup, ratio })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let entries: Vec<BoundEntry> = per_cell.into_iter().flatten().collect();
    let mut ms: Vec<usize> = m_list.to_vec();
    ms.sort_unstable();
    ms.dedup();
    let sup_by_m = ms
        .into_iter()
        .map(|m| {
            let sup = entries
                .iter()
                .filter(|e| e.m == m && e.admissible)
                .map(|e| e.ratio)
                .fold(0.0, f64::max);
            (m, sup)
        })
        .collect();
    Ok(BoundTable { alpha, entries, sup_by_m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_edge_is_included_and_beyond_is_flagged() {
        let p = ModelParams::new(1.5, 1).unwrap();
        let h = std::f64::consts::PI / 16.0;
        let edge = admissible_time(h, 1.5, 0.5);
        let grid = TimeGrid::Explicit { times: vec![edge, edge * (1.0 + 1e-12), 0.0] };
        let t = dispersive_bound_check(&p, &[16], &grid, &[0.5]).unwrap();
        let flags: Vec<bool> = t.entries.iter().map(|e| e.admissible).collect();
        assert_eq!(flags, vec![true, false, false]);
        assert!(t.entries[1].ratio.is_nan());

        let g = TimeGrid::Geometric { points: 8 }.times(h, 1.5, 0.5);
        assert_eq!(*g.last().unwrap(), edge);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ratio_vanishes_as_time_shrinks() {
        let p = ModelParams::new(1.5, 1).unwrap();
        let grid = TimeGrid::Explicit { times: vec![1e-9, 1e-6, 1e-3] };
        let t = dispersive_bound_check(&p, &[32], &grid, &[1.0]).unwrap();
        let r: Vec<f64> = t.entries.iter().map(|e| e.ratio).collect();
        assert!(r[0] < r[1] && r[1] < r[2]);
        assert!(r[0] < 1e-2);
    }

    #[test]
    fn rejects_out_of_regime_and_bad_scales() {
        let grid = TimeGrid::Geometric { points: 4 };
        assert!(dispersive_bound_check(&ModelParams::new(1.0, 1).unwrap(), &[16], &grid, &[1.0]).is_err());
        let p = ModelParams::new(2.0, 1).unwrap();
        assert!(dispersive_bound_check(&p, &[16], &grid, &[0.3]).is_err());
        assert!(dispersive_bound_check(&p, &[4], &grid, &[1.0 / 64.0]).is_err());
    }
}
