//! Monte Carlo oracles for the analytic pipelines: squared-Bessel paths
//! with killing, geometric Brownian motion with its exponential functional,
//! the Lamperti time change, and full hyperbolic Brownian motion.
//!
//! Determinism contract: every path draws from its own counter-based
//! ChaCha stream keyed by `(seed, path_id)`, and batch partials are merged
//! in fixed index order, so identical configs produce bit-identical results
//! independent of the worker count.

mod bessel;
mod gbm;
mod hbm;
mod stats;

pub use bessel::{simulate_bessel, survival_estimate, survival_estimate_checked};
pub use gbm::{hitting_transform_estimate, simulate_gbm_functional};
pub use hbm::{hbm_occupation_estimate, hbm_short_time_drift, simulate_hbm, BoxCell, HbmPathRecord};
pub use stats::{ks_two_sample, lamperti_check, mc_mean, KsReport};
pub(crate) use stats::mc_mean_impl;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Simulation configuration.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// Euler step.
    pub dt: f64,
    /// Number of independent paths.
    pub n_paths: u64,
    /// Base seed; path `i` uses stream `i` of this seed.
    pub seed: u64,
    /// Simulation end time.
    pub horizon: f64,
    /// Brownian-bridge correction for barrier crossings inside a step.
    pub crossing_correction: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::NonPositiveArgument(self.dt));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::NonPositiveArgument(self.horizon));
        }
        if self.dt > self.horizon / 10.0 {
            return Err(Error::StepTooCoarse(format!(
                "dt = {} exceeds horizon/10 = {}",
                self.dt,
                self.horizon / 10.0
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn rng_for_path(&self, path_id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(path_id);
        rng
    }
}

/// Barrier-crossing record: the clock at which the barrier was hit and the
/// value of the additive functional there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitRecord {
    pub time: f64,
    pub a_at_hit: f64,
}

/// Terminal snapshot of one simulated path.
///
/// For geometric-Brownian paths `a_value` is the exponential functional
/// `A_t` and `position` is `B_t`; for Bessel paths `a_value` is the elapsed
/// process time (the functional under the Lamperti pairing), `position` is
/// `R_t`, and `aux_clock` carries `int_0^t ds / R_s^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathFunctionalSample {
    pub path_id: u64,
    pub a_value: f64,
    pub position: f64,
    pub aux_clock: f64,
    pub hit: Option<HitRecord>,
}

impl PathFunctionalSample {
    pub fn survived(&self) -> bool {
        self.hit.is_none()
    }

    pub fn hit_time(&self) -> Option<f64> {
        self.hit.map(|h| h.time)
    }
}

/// Serialize samples as CSV: header row, comma separators, `.` decimal
/// point, 17 significant digits.
pub fn write_samples_csv<W: std::io::Write>(
    out: &mut W,
    horizon: f64,
    samples: &[PathFunctionalSample],
) -> std::io::Result<()> {
    writeln!(
        out,
        "path_id,t,a_value,position,aux_clock,hit_time,a_at_hit,survived"
    )?;
    for s in samples {
        let t = s.hit.map(|h| h.time).unwrap_or(horizon);
        let (hit_time, a_at_hit) = match s.hit {
            Some(h) => (format!("{:.16e}", h.time), format!("{:.16e}", h.a_at_hit)),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}",
            s.path_id,
            t,
            s.a_value,
            s.position,
            s.aux_clock,
            hit_time,
            a_at_hit,
            s.survived()
        )?;
    }
    Ok(())
}

// Batch size for the deterministic parallel reduction.
pub(crate) const BATCH: u64 = 4096;

/// Run `per_path` over all path ids in fixed-size batches, possibly in
/// parallel, and fold the per-batch partials in index order.
pub(crate) fn run_batched<T, F>(cfg: &SimConfig, per_path: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    use rayon::prelude::*;
    let n_batches = cfg.n_paths.div_ceil(BATCH);
    let mut batches: Vec<(u64, Vec<T>)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let lo = b * BATCH;
            let hi = ((b + 1) * BATCH).min(cfg.n_paths);
            (b, (lo..hi).map(&per_path).collect())
        })
        .collect();
    batches.sort_by_key(|(b, _)| *b);
    batches.into_iter().flat_map(|(_, v)| v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::besselproc::BesselIndex;

    fn cfg() -> SimConfig {
        SimConfig {
            dt: 1e-3,
            n_paths: 500,
            seed: 42,
            horizon: 1.0,
            crossing_correction: true,
        }
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let mut bad = cfg();
        bad.dt = 0.2; // > horizon / 10
        assert!(matches!(bad.validate(), Err(Error::StepTooCoarse(_))));
        bad = cfg();
        bad.n_paths = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let idx = BesselIndex::new(1.0).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| simulate_bessel(idx, 2.0, 1.0, &cfg()).unwrap())
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one, four);
        let again = run(2);
        assert_eq!(one, again);
    }

    #[test]
    fn survived_xor_hit() {
        let idx = BesselIndex::new(0.8).unwrap();
        let samples = simulate_bessel(idx, 1.5, 1.0, &cfg()).unwrap();
        for s in &samples {
            assert_eq!(s.survived(), s.hit.is_none());
            if let Some(h) = s.hit {
                assert!(h.time <= 1.0 + 1e-9);
                assert!(h.a_at_hit >= 0.0);
            }
        }
    }

    #[test]
    fn csv_stream_shape() {
        let idx = BesselIndex::new(1.0).unwrap();
        let samples = simulate_bessel(idx, 2.0, 1.0, &cfg()).unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, 1.0, &samples[..10.min(samples.len())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "path_id,t,a_value,position,aux_clock,hit_time,a_at_hit,survived"
        );
        assert!(lines.next().unwrap().split(',').count() == 8);
    }
}
