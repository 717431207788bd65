//! Full hyperbolic Brownian motion through its skew-product representation:
//! the height is a geometric Brownian motion and the horizontal part is an
//! independent Brownian motion run at the exponential-functional clock.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hyperbolic::{HyperbolicPoint, ModelParams};
use crate::types::MCEstimate;

use super::{mc_mean_impl, run_batched, SimConfig};

/// Exit summary of one path.
#[derive(Debug, Clone, PartialEq)]
pub struct HbmPathRecord {
    pub path_id: u64,
    /// Exit time of the barrier region, if it happened before the horizon.
    pub exit_time: Option<f64>,
    /// Horizontal location at the exit.
    pub exit_tilde: Option<Vec<f64>>,
    /// Height at the end (barrier if exited, current height otherwise).
    pub final_height: f64,
}

/// Coordinate box used as an occupation cell.
#[derive(Debug, Clone)]
pub struct BoxCell {
    pub tilde_lo: Vec<f64>,
    pub tilde_hi: Vec<f64>,
    pub height_lo: f64,
    pub height_hi: f64,
}

impl BoxCell {
    fn contains(&self, tilde: &[f64], height: f64) -> bool {
        height >= self.height_lo
            && height < self.height_hi
            && tilde
                .iter()
                .zip(self.tilde_lo.iter().zip(self.tilde_hi.iter()))
                .all(|(v, (lo, hi))| v >= lo && v < hi)
    }

    /// Hyperbolic volume of the box: `prod(widths) int h^{-n} dh`.
    pub fn hyperbolic_volume(&self, n: usize) -> f64 {
        let base: f64 = self
            .tilde_lo
            .iter()
            .zip(self.tilde_hi.iter())
            .map(|(lo, hi)| hi - lo)
            .product();
        let p = n as f64 - 1.0;
        base * (self.height_lo.powf(-p) - self.height_hi.powf(-p)) / p
    }
}

struct StepState {
    b: f64,
    exp_2b: f64,
    tilde: Vec<f64>,
}

/// One Euler step of the skew product; returns the hit flag.
#[allow(clippy::too_many_arguments)]
fn advance(
    state: &mut StepState,
    rng: &mut rand_chacha::ChaCha8Rng,
    drift: f64,
    dt: f64,
    sqrt_dt: f64,
    ln_a: f64,
    bridge: bool,
) -> Option<f64> {
    let xi: f64 = rng.sample(StandardNormal);
    let b_next = state.b - drift * dt + sqrt_dt * xi;
    let exp_2b_next = (2.0 * b_next).exp();
    let d_clock = 0.5 * dt * (state.exp_2b + exp_2b_next);

    let crossed_frac = if b_next <= ln_a {
        Some(((state.b - ln_a) / (state.b - b_next)).clamp(0.0, 1.0))
    } else if bridge {
        let p_cross = (-2.0 * (state.b - ln_a) * (b_next - ln_a) / dt).exp();
        if p_cross > 0.0 && rng.random::<f64>() < p_cross {
            Some(0.5)
        } else {
            None
        }
    } else {
        None
    };

    // Horizontal Brownian motion at the functional clock: the increment
    // over this step is Gaussian with variance = clock increment.
    let frac = crossed_frac.unwrap_or(1.0);
    let sd = (d_clock * frac).sqrt();
    for c in state.tilde.iter_mut() {
        let eta: f64 = rng.sample(StandardNormal);
        *c += sd * eta;
    }
    if crossed_frac.is_none() {
        state.b = b_next;
        state.exp_2b = exp_2b_next;
    }
    crossed_frac.map(|f| f * dt)
}

/// Simulate hyperbolic Brownian motion (drift index `mu = (n-1)/2`) from
/// `x` with killing at the barrier `p.a()`, recording exit statistics.
pub fn simulate_hbm(
    p: &ModelParams,
    x: &HyperbolicPoint,
    cfg: &SimConfig,
) -> Result<Vec<HbmPathRecord>> {
    cfg.validate()?;
    check_start(p, x)?;
    let drift = p.mu();
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let ln_a = p.a().ln();
    let n_steps = (cfg.horizon / dt).round() as u64;

    let records = run_batched(cfg, |path_id| {
        let mut rng = cfg.rng_for_path(path_id);
        let mut state = StepState {
            b: x.height().ln(),
            exp_2b: x.height() * x.height(),
            tilde: x.tilde().to_vec(),
        };
        let mut t = 0.0;
        let mut exit: Option<f64> = None;
        for _ in 0..n_steps {
            if let Some(dt_hit) = advance(
                &mut state,
                &mut rng,
                drift,
                dt,
                sqrt_dt,
                ln_a,
                cfg.crossing_correction,
            ) {
                exit = Some(t + dt_hit);
                break;
            }
            t += dt;
        }
        HbmPathRecord {
            path_id,
            exit_time: exit,
            exit_tilde: exit.map(|_| state.tilde.clone()),
            final_height: if exit.is_some() {
                p.a()
            } else {
                state.b.exp()
            },
        }
    });
    Ok(records)
}

/// Occupation-time estimator of the Green mass of a cell:
/// `E int_0^tau e^{-lambda t} 1{X(t) in C} dt = int_C G(x, y) dV(y)`.
pub fn hbm_occupation_estimate(
    p: &ModelParams,
    x: &HyperbolicPoint,
    cell: &BoxCell,
    cfg: &SimConfig,
) -> Result<MCEstimate> {
    cfg.validate()?;
    check_start(p, x)?;
    if cell.tilde_lo.len() != p.n() - 1 || !(cell.height_lo > p.a()) {
        return Err(Error::InvalidParameter(
            "occupation cell must live above the barrier with n-1 horizontal axes".into(),
        ));
    }
    let drift = p.mu();
    let lambda = p.lambda();
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let ln_a = p.a().ln();
    let n_steps = (cfg.horizon / dt).round() as u64;

    let values = run_batched(cfg, |path_id| {
        let mut rng = cfg.rng_for_path(path_id);
        let mut state = StepState {
            b: x.height().ln(),
            exp_2b: x.height() * x.height(),
            tilde: x.tilde().to_vec(),
        };
        let mut t = 0.0;
        let mut occupation = 0.0;
        for _ in 0..n_steps {
            let height = state.b.exp();
            let inside = cell.contains(&state.tilde, height);
            if let Some(dt_hit) = advance(
                &mut state,
                &mut rng,
                drift,
                dt,
                sqrt_dt,
                ln_a,
                cfg.crossing_correction,
            ) {
                if inside {
                    occupation += (-lambda * (t + 0.5 * dt_hit)).exp() * dt_hit;
                }
                break;
            }
            if inside {
                occupation += (-lambda * (t + 0.5 * dt)).exp() * dt;
            }
            t += dt;
        }
        occupation
    });
    Ok(mc_mean_impl(&values, cfg.seed))
}

/// Short-time generator check: the mean height displacement per unit time
/// against the drift `-(2 nu - 1) x_n / 2` of the height coordinate (here
/// `nu = mu`, the driftless hyperbolic motion). Returns the estimate and
/// the generator value.
pub fn hbm_short_time_drift(
    p: &ModelParams,
    x: &HyperbolicPoint,
    cfg: &SimConfig,
) -> Result<(MCEstimate, f64)> {
    cfg.validate()?;
    check_start(p, x)?;
    let drift = p.mu();
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let b0 = x.height().ln();
    let values = run_batched(cfg, |path_id| {
        let mut rng = cfg.rng_for_path(path_id);
        let xi: f64 = rng.sample(StandardNormal);
        let b1 = b0 - drift * dt + sqrt_dt * xi;
        (b1.exp() - x.height()) / dt
    });
    let expected = -(2.0 * drift - 1.0) * x.height() / 2.0;
    Ok((mc_mean_impl(&values, cfg.seed), expected))
}

fn check_start(p: &ModelParams, x: &HyperbolicPoint) -> Result<()> {
    if x.dim() != p.n() {
        return Err(Error::DimensionMismatch(x.dim(), p.n()));
    }
    if !(p.a() > 0.0) {
        return Err(Error::NonPositiveArgument(p.a()));
    }
    if x.height() <= p.a() {
        return Err(Error::BelowBarrier {
            height: x.height(),
            barrier: p.a(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{green_function, GreenRoute};

    fn start() -> HyperbolicPoint {
        HyperbolicPoint::from_coords(&[0.0, 0.0, 2.0]).unwrap()
    }

    #[test]
    fn exit_statistics_weighted_by_lambda() {
        // e^{-lambda tau} means are finite and decrease in lambda
        let p = ModelParams::new(3, 0.0, 1.0).unwrap();
        let cfg = SimConfig {
            dt: 1e-3,
            n_paths: 4_000,
            seed: 3,
            horizon: 40.0,
            crossing_correction: true,
        };
        let records = simulate_hbm(&p, &start(), &cfg).unwrap();
        let hit_frac = records.iter().filter(|r| r.exit_time.is_some()).count() as f64
            / records.len() as f64;
        assert!(hit_frac > 0.99, "exit fraction {hit_frac}");
        let mut last = f64::INFINITY;
        for &lambda in &[0.0, 0.5, 2.0] {
            let mean: f64 = records
                .iter()
                .filter_map(|r| r.exit_time.map(|t| (-lambda * t).exp()))
                .sum::<f64>()
                / records.len() as f64;
            assert!(mean.is_finite() && mean <= last);
            last = mean;
        }
    }

    #[test]
    fn generator_drift_matches() {
        let p = ModelParams::new(3, 0.0, 1.0).unwrap();
        let cfg = SimConfig {
            dt: 1e-4,
            n_paths: 200_000,
            seed: 5,
            horizon: 1.0,
            crossing_correction: false,
        };
        let (est, expected) = hbm_short_time_drift(&p, &start(), &cfg).unwrap();
        // 3 sigma plus the O(dt) Euler remainder
        let slack = 3.0 * est.std_error + 3.0 * cfg.dt * start().height();
        assert!(
            (est.value - expected).abs() < slack,
            "{} vs {expected} (slack {slack})",
            est.value
        );
    }

    #[test]
    fn occupation_matches_green_mass() {
        let p = ModelParams::new(3, 0.0, 1.0).unwrap();
        let x = start();
        let cell = BoxCell {
            tilde_lo: vec![0.6, -0.2],
            tilde_hi: vec![1.0, 0.2],
            height_lo: 2.3,
            height_hi: 2.7,
        };
        let cfg = SimConfig {
            dt: 1e-3,
            n_paths: 120_000,
            seed: 7,
            horizon: 40.0,
            crossing_correction: true,
        };
        let est = hbm_occupation_estimate(&p, &x, &cell, &cfg).unwrap();
        // reference: midpoint quadrature of G over the cell against dV
        let m = 3;
        let mut mass = 0.0;
        let widths = [
            cell.tilde_hi[0] - cell.tilde_lo[0],
            cell.tilde_hi[1] - cell.tilde_lo[1],
            cell.height_hi - cell.height_lo,
        ];
        let table = crate::hyperbolic::green_table(
            &p,
            &x,
            &HyperbolicPoint::from_coords(&[0.0, 0.0, cell.height_lo]).unwrap(),
        )
        .unwrap();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let y = HyperbolicPoint::from_coords(&[
                        cell.tilde_lo[0] + widths[0] * (i as f64 + 0.5) / m as f64,
                        cell.tilde_lo[1] + widths[1] * (j as f64 + 0.5) / m as f64,
                        cell.height_lo + widths[2] * (k as f64 + 0.5) / m as f64,
                    ])
                    .unwrap();
                    let g = crate::hyperbolic::green_function_with_table(
                        &p,
                        &table,
                        &x,
                        &y,
                        GreenRoute::ViaBessel,
                    )
                    .unwrap()
                    .value;
                    let dv = widths[0] * widths[1] * widths[2]
                        / (m * m * m) as f64
                        / y.height().powi(3);
                    mass += g * dv;
                }
            }
        }
        assert!(
            est.sigma_distance(mass, 1e-3 * mass) < 3.0,
            "occupation {} vs {mass} (se {})",
            est.value,
            est.std_error
        );
        // sanity: the independent routes agree for one cell point
        let y_mid = HyperbolicPoint::from_coords(&[0.8, 0.0, 2.5]).unwrap();
        let g1 = green_function(&p, &x, &y_mid, GreenRoute::ViaBessel).unwrap().value;
        let g2 = green_function(&p, &x, &y_mid, GreenRoute::ViaFunctional)
            .unwrap()
            .value;
        assert!((g1 - g2).abs() <= 1e-3 * g1);
    }
}
