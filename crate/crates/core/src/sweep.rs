//! Bound-ratio sweeps: evaluate kernel/comparator ratios over parameter
//! grids and check that the empirical spread is stable under grid
//! refinement. This is the testable substitute for two-sided estimates
//! stated without explicit constants: the ratio must stay positive and
//! finite, its spread bounded, and doubling the grid density must move the
//! empirical extremes only marginally.

use rayon::prelude::*;

use crate::besselproc::{
    killed_density_comparator_ln, killed_density_ln_speed, BesselIndex, KernelQuery,
};
use crate::error::Result;
use crate::functionals::QHittingTable;
use crate::hyperbolic::{
    green_comparator, green_function_with_table, potential_comparator, potential_kernel,
    GreenRoute, HyperbolicPoint, ModelParams,
};
use crate::types::Measure;

/// `n` logarithmically spaced points covering `[lo, hi]`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (step * i as f64).exp()).collect()
}

/// `n` linearly spaced points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 2);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// One grid axis: range, node count, spacing.
#[derive(Debug, Clone, Copy)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl GridAxis {
    pub fn log(min: f64, max: f64, count: usize) -> Self {
        GridAxis {
            min,
            max,
            count,
            log: true,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.log {
            logspace(self.min, self.max, self.count)
        } else {
            linspace(self.min, self.max, self.count)
        }
    }

    /// Same range at doubled node density.
    pub fn refined(&self) -> Self {
        GridAxis {
            count: self.count * 2,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(crate::error::Error::InvalidParameter(
                "grid axes need at least 2 points".into(),
            ));
        }
        if !(self.max > self.min) || (self.log && !(self.min > 0.0)) {
            return Err(crate::error::Error::InvalidParameter(format!(
                "bad axis range [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Grid of point pairs for half-space sweeps: heights `a (1 + delta)` and
/// horizontal separations `rho a`.
#[derive(Debug, Clone, Copy)]
pub struct PairGridSpec {
    pub delta: GridAxis,
    pub rho: GridAxis,
}

impl Default for PairGridSpec {
    fn default() -> Self {
        PairGridSpec {
            delta: GridAxis::log(1e-3, 30.0, 8),
            rho: GridAxis::log(1e-3, 100.0, 8),
        }
    }
}

impl PairGridSpec {
    pub fn refined(&self) -> Self {
        PairGridSpec {
            delta: self.delta.refined(),
            rho: self.rho.refined(),
        }
    }
}

/// Grid for killed-kernel sweeps at unit barrier: times and height offsets
/// above the barrier (`x = 1 + offset`).
#[derive(Debug, Clone, Copy)]
pub struct KernelGridSpec {
    pub t: GridAxis,
    pub offset: GridAxis,
}

impl Default for KernelGridSpec {
    fn default() -> Self {
        KernelGridSpec {
            t: GridAxis::log(0.05, 20.0, 10),
            offset: GridAxis::log(0.02, 9.0, 10),
        }
    }
}

impl KernelGridSpec {
    pub fn refined(&self) -> Self {
        KernelGridSpec {
            t: self.t.refined(),
            offset: self.offset.refined(),
        }
    }
}

/// One evaluated ratio with its grid coordinates.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    /// Grid coordinates: `(t, x, y)` for kernel sweeps,
    /// `(x_n, y_n, rho)` for kernel sweeps in the half-space.
    pub coords: [f64; 3],
    pub ratio: f64,
}

/// Empirical summary of a ratio cloud.
#[derive(Debug, Clone, Copy)]
pub struct RatioSummary {
    pub n_points: usize,
    pub min: f64,
    pub max: f64,
    pub all_finite_positive: bool,
}

impl RatioSummary {
    pub fn from_points(points: &[SweepPoint]) -> Self {
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        let mut ok = !points.is_empty();
        for p in points {
            if !(p.ratio.is_finite() && p.ratio > 0.0) {
                ok = false;
                continue;
            }
            min = min.min(p.ratio);
            max = max.max(p.ratio);
        }
        RatioSummary {
            n_points: points.len(),
            min,
            max,
            all_finite_positive: ok,
        }
    }

    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

/// Stability of the empirical extremes under grid refinement.
#[derive(Debug, Clone, Copy)]
pub struct StabilityReport {
    pub base: RatioSummary,
    pub refined: RatioSummary,
    pub min_shift: f64,
    pub max_shift: f64,
    pub stable: bool,
}

/// Compare a base sweep against a refined one; shifts are relative.
pub fn stability(base: RatioSummary, refined: RatioSummary, threshold: f64) -> StabilityReport {
    let min_shift = (refined.min - base.min).abs() / base.min;
    let max_shift = (refined.max - base.max).abs() / base.max;
    StabilityReport {
        base,
        refined,
        min_shift,
        max_shift,
        stable: base.all_finite_positive
            && refined.all_finite_positive
            && min_shift < threshold
            && max_shift < threshold,
    }
}

/// Killed-kernel-to-comparator ratios at unit barrier over the
/// `t x offset x offset` grid (`x = 1 + offset`, same for `y`).
pub fn kernel_ratio_sweep(nu: f64, spec: &KernelGridSpec) -> Result<Vec<SweepPoint>> {
    spec.t.validate()?;
    spec.offset.validate()?;
    let idx = BesselIndex::new(nu)?;
    let ts = spec.t.points();
    let xs: Vec<f64> = spec.offset.points().iter().map(|d| 1.0 + d).collect();
    let ys = xs.clone();
    let per_x: Vec<Vec<SweepPoint>> = xs
        .par_iter()
        .map(|&x| {
            let table = QHittingTable::build(nu, x)?;
            let mut out = Vec::with_capacity(ts.len() * ys.len());
            for &y in &ys {
                for &t in &ts {
                    let q = KernelQuery::new(t, x, y, 1.0, Measure::Speed)?;
                    let ln_k = killed_density_ln_speed(idx, &table, t, x, y, 1.0)?.0;
                    let ln_c = killed_density_comparator_ln(idx, &q)?;
                    out.push(SweepPoint {
                        coords: [t, x, y],
                        ratio: (ln_k - ln_c).exp(),
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_x.into_iter().flatten().collect())
}

/// Point pairs spanning near-boundary, near-diagonal and far-field
/// regimes: heights `a (1 + delta)`, horizontal separations `rho a`.
pub fn pair_grid(p: &ModelParams, spec: &PairGridSpec) -> (Vec<f64>, Vec<f64>) {
    let a = if p.a() > 0.0 { p.a() } else { 1.0 };
    let heights: Vec<f64> = spec.delta.points().into_iter().map(|d| a * (1.0 + d)).collect();
    let rhos: Vec<f64> = spec.rho.points().into_iter().map(|r| r * a).collect();
    (heights, rhos)
}

fn pair_points(p: &ModelParams, xh: f64, yh: f64, rho: f64) -> (HyperbolicPoint, HyperbolicPoint) {
    let zeros = vec![0.0; p.n() - 1];
    let mut shifted = zeros.clone();
    shifted[0] = rho;
    (
        HyperbolicPoint::new(zeros, xh).expect("valid height"),
        HyperbolicPoint::new(shifted, yh).expect("valid height"),
    )
}

/// Green-function-to-comparator ratios over the pair grid.
pub fn green_ratio_sweep(
    p: &ModelParams,
    spec: &PairGridSpec,
    route: GreenRoute,
) -> Result<Vec<SweepPoint>> {
    spec.delta.validate()?;
    spec.rho.validate()?;
    let (heights, rhos) = pair_grid(p, spec);
    // one hitting table per distinct minimum height
    let tables: Vec<QHittingTable> = heights
        .par_iter()
        .map(|&h| QHittingTable::build(p.nu(), h / p.a()))
        .collect::<Result<_>>()?;
    let (nh, nr) = (heights.len(), rhos.len());
    let jobs: Vec<(usize, usize, usize)> = (0..nh)
        .flat_map(|i| (i..nh).flat_map(move |j| (0..nr).map(move |k| (i, j, k))))
        .collect();
    jobs.par_iter()
        .map(|&(i, j, k)| {
            let (x, y) = pair_points(p, heights[i], heights[j], rhos[k]);
            let g = green_function_with_table(p, &tables[i], &x, &y, route)?;
            let c = green_comparator(p, &x, &y)?;
            Ok(SweepPoint {
                coords: [heights[i], heights[j], rhos[k]],
                ratio: g.value / c.value,
            })
        })
        .collect()
}

/// Potential-to-comparator ratios over the pair grid (all dimensions,
/// including the `n = 2` branch).
pub fn potential_ratio_sweep(p: &ModelParams, spec: &PairGridSpec) -> Result<Vec<SweepPoint>> {
    spec.delta.validate()?;
    spec.rho.validate()?;
    let (heights, rhos) = pair_grid(p, spec);
    let (nh, nr) = (heights.len(), rhos.len());
    let jobs: Vec<(usize, usize, usize)> = (0..nh)
        .flat_map(|i| (i..nh).flat_map(move |j| (0..nr).map(move |k| (i, j, k))))
        .collect();
    jobs.par_iter()
        .map(|&(i, j, k)| {
            let (x, y) = pair_points(p, heights[i], heights[j], rhos[k]);
            let u = potential_kernel(p, &x, &y)?;
            let c = potential_comparator(p, &x, &y)?;
            Ok(SweepPoint {
                coords: [heights[i], heights[j], rhos[k]],
                ratio: u.value / c.value,
            })
        })
        .collect()
}
