//! Bessel process transition densities, free and killed at a level, with
//! the sharp killed-kernel comparator.
//!
//! The process is `BES^(-nu)`, `nu > 0`: dimension `delta = 2(1 - nu) < 2`,
//! drifting toward the origin, so barriers below the start are hit in
//! finite time. Public kernel values are returned against the speed measure
//! `m(dy) = y^(1 - 2 nu) dy` (the measure that makes killed kernels
//! symmetric), with Lebesgue available through the query.
//!
//! The killed kernel has no closed form; it is assembled from the
//! first-passage decomposition
//!
//! ```text
//! p_a(t, x, y) = p(t, x, y) - int_0^t q(s) p(t - s, a, y) ds ,
//! ```
//!
//! where `q` is the hitting-time density of the level `a` realized by
//! Laplace inversion (the Lamperti clock identifies it with the
//! hitting-functional density of geometric Brownian motion). The
//! correction integrand is evaluated in log space: both factors traverse
//! hundreds of orders of magnitude where the product is moderate.

use crate::error::{Error, Result};
use crate::functionals::{q_hitting_density, DriftParams, QHittingTable};
use crate::quad::{integrate_with_splits, QuadOptions};
use crate::specfun::{bessel_i_scaled, ln_gamma, Order};
use crate::types::{EvalResult, KernelValue, Measure, Method};

/// Index `nu > 0` of the process `BES^(-nu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselIndex {
    nu: f64,
}

impl BesselIndex {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Bessel index must be positive, got nu = {nu}"
            )));
        }
        Ok(BesselIndex { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Dimension of the corresponding squared process, `2(-nu) + 2`.
    pub fn dimension(&self) -> f64 {
        2.0 - 2.0 * self.nu
    }
}

/// Evaluation point of a kernel: time, start, end, killing level, and the
/// reference measure of the returned value.
#[derive(Debug, Clone, Copy)]
pub struct KernelQuery {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub a: f64,
    pub measure: Measure,
}

impl KernelQuery {
    pub fn new(t: f64, x: f64, y: f64, a: f64, measure: Measure) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveArgument(t));
        }
        if !(a >= 0.0) {
            return Err(Error::InvalidParameter(format!("killing level a = {a}")));
        }
        if !(x > a) || !(y > a) {
            return Err(Error::BelowBarrier {
                height: x.min(y),
                barrier: a,
            });
        }
        Ok(KernelQuery { t, x, y, a, measure })
    }
}

/// Density of the speed measure, `m(y) = y^(1 - 2 nu)`.
pub fn speed_measure_density(idx: BesselIndex, y: f64) -> f64 {
    y.powf(1.0 - 2.0 * idx.nu)
}

/// `ln` of the free transition density against the speed measure,
/// `(x y)^nu e^{-(x^2+y^2)/(2t)} I_nu(x y / t) / t`, manifestly symmetric
/// in `(x, y)`.
pub fn free_density_ln_speed(idx: BesselIndex, t: f64, x: f64, y: f64) -> Result<f64> {
    let nu = idx.nu;
    let z = x * y / t;
    let i_hat = bessel_i_scaled(Order::new(nu)?, z)?;
    Ok(nu * (x * y).ln() - (x - y).powi(2) / (2.0 * t) - t.ln() + i_hat.ln())
}

/// Free (unkilled) transition density of `BES^(-nu)` started at `x > 0`.
/// The killing level in the query is ignored.
pub fn free_density(idx: BesselIndex, q: &KernelQuery) -> Result<KernelValue> {
    if !(q.x > 0.0) {
        return Err(Error::NonPositiveArgument(q.x));
    }
    let ln_speed = free_density_ln_speed(idx, q.t, q.x, q.y)?;
    let value = match q.measure {
        Measure::Speed => ln_speed.exp(),
        Measure::Lebesgue => (ln_speed + speed_measure_density(idx, q.y).ln()).exp(),
    };
    Ok(KernelValue {
        value,
        abs_err: 1e-12 * value,
        measure: q.measure,
    })
}

/// Lebesgue transition density for a signed index: the formula
/// `(y/t) (y/x)^idx e^{-(x^2+y^2)/2t} I_|idx|(xy/t)` covers both signs for
/// `x > 0`. A start at `x = 0` exists only for nonnegative index, where it
/// reduces to `2 (2t)^{-idx-1} Gamma(idx+1)^{-1} y^{2 idx + 1} e^{-y^2/2t}`.
pub fn free_density_signed(index: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveArgument(t));
    }
    if !(y > 0.0) {
        return Err(Error::NonPositiveArgument(y));
    }
    if x == 0.0 {
        if index < 0.0 {
            return Err(Error::InvalidParameter(
                "start at the origin requires nonnegative index".into(),
            ));
        }
        let ln = std::f64::consts::LN_2 - (index + 1.0) * (2.0 * t).ln() - ln_gamma(index + 1.0)
            + (2.0 * index + 1.0) * y.ln()
            - y * y / (2.0 * t);
        return Ok(ln.exp());
    }
    if !(x > 0.0) {
        return Err(Error::NonPositiveArgument(x));
    }
    let i_hat = bessel_i_scaled(Order::new(index.abs())?, x * y / t)?;
    let ln = y.ln() - t.ln() + index * (y / x).ln() - (x - y).powi(2) / (2.0 * t) + i_hat.ln();
    Ok(ln.exp())
}

/// Density of the first hitting time `T_a` of the level `a` by `BES^(-nu)`
/// started at `x > a`, identified through the Lamperti clock with the
/// hitting-functional density of geometric Brownian motion.
pub fn hitting_density(idx: BesselIndex, x: f64, a: f64, s: f64) -> Result<EvalResult> {
    q_hitting_density(DriftParams::from_nu(idx.nu)?, x, a, s)
}

// The correction-to-free ratio is bounded by exp(-2 (x-a)(y-a)/t); above
// this exponent the ratio sits under 1e-12 and the free kernel is returned
// directly.
const NEGLIGIBLE_KILLING_EXPONENT: f64 = 28.0;

/// Killed kernel `p_a(t, x, y)` as `(ln value, relative error estimate)`
/// against the speed measure; stays finite where the value underflows f64.
pub fn killed_density_ln_speed(
    idx: BesselIndex,
    table: &QHittingTable,
    t: f64,
    x: f64,
    y: f64,
    a: f64,
) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::NonPositiveArgument(a));
    }
    if !(x > a) || !(y > a) {
        return Err(Error::BelowBarrier {
            height: x.min(y),
            barrier: a,
        });
    }
    let ln_free = free_density_ln_speed(idx, t, x, y)?;
    if 2.0 * (x - a) * (y - a) / t > NEGLIGIBLE_KILLING_EXPONENT {
        return Ok((ln_free, 1e-11));
    }

    let a2 = a * a;
    let ln_a2 = a2.ln();
    let peak = table.peak() * a2;
    let mut splits = vec![0.0, t];
    for &p in &[
        peak,
        0.1 * peak,
        10.0 * peak,
        t - (y - a).powi(2) / 3.0,
        t - a * y,
    ] {
        if p > 0.0 && p < t {
            splits.push(p);
        }
    }
    splits.sort_by(f64::total_cmp);
    splits.dedup();

    // corr/free = int q(s) exp(ln p(t-s, a, y) - ln p_free) ds, assembled in
    // log space so huge/tiny factors never materialize.
    let integrand = |s: f64| -> f64 {
        let ln_q = table.eval_ln(s / a2) - ln_a2;
        if ln_q == f64::NEG_INFINITY {
            return 0.0;
        }
        let w = t - s;
        if w <= 0.0 {
            return 0.0;
        }
        match free_density_ln_speed(idx, w, a, y) {
            Ok(ln_p) => (ln_q + ln_p - ln_free).exp(),
            Err(_) => f64::NAN,
        }
    };
    let corr = integrate_with_splits(
        integrand,
        &splits,
        &QuadOptions {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_intervals: 2000,
        },
    )
    .map_err(|e| Error::ConvolutionGridTooCoarse(format!("killing correction: {e}")))?;

    let remaining = 1.0 - corr.value;
    let budget = (corr.abs_err + 1e-9).max(5e-7 * corr.value.abs());
    if remaining <= 0.0 {
        if remaining.abs() <= budget {
            return Ok((f64::NEG_INFINITY, 1.0));
        }
        return Err(Error::NegativeDensityBeyondTolerance {
            value: remaining,
            tol: budget,
        });
    }
    let rel_err = (corr.abs_err + 1e-11) / remaining;
    Ok((ln_free + remaining.ln(), rel_err))
}

/// Killed transition density with a caller-managed hitting table built for
/// `(nu, x/a)`.
pub fn killed_density_with_table(
    idx: BesselIndex,
    table: &QHittingTable,
    q: &KernelQuery,
) -> Result<KernelValue> {
    if (table.x_over_a() - q.x / q.a).abs() > 1e-9 * table.x_over_a()
        || (table.nu() - idx.nu).abs() > 1e-12
    {
        return Err(Error::InvalidParameter(
            "hitting table does not match (nu, x/a)".into(),
        ));
    }
    let (ln_speed, rel_err) = killed_density_ln_speed(idx, table, q.t, q.x, q.y, q.a)?;
    let ln = match q.measure {
        Measure::Speed => ln_speed,
        Measure::Lebesgue => ln_speed + speed_measure_density(idx, q.y).ln(),
    };
    let value = ln.exp();
    Ok(KernelValue {
        value,
        abs_err: rel_err * value,
        measure: q.measure,
    })
}

/// Killed transition density `p_a(t, x, y)` of `BES^(-nu)` absorbed at the
/// first hitting of `a > 0`. Builds the hitting table internally; use
/// [`killed_density_with_table`] inside loops over `(t, y)`.
pub fn killed_density(idx: BesselIndex, q: &KernelQuery) -> Result<KernelValue> {
    let table = QHittingTable::build(idx.nu, q.x / q.a)?;
    killed_density_with_table(idx, &table, q)
}

/// Survival probability `P(T_a > t)` from the killed kernel:
/// `int p_a(t, x, y) m(dy)`.
pub fn killed_survival(
    idx: BesselIndex,
    table: &QHittingTable,
    t: f64,
    x: f64,
    a: f64,
) -> Result<f64> {
    let y_hi = (x.max(a) + 10.0 * t.sqrt()).max(3.0 * a);
    let q = integrate_with_splits(
        |y: f64| {
            if y <= a {
                return 0.0;
            }
            match killed_density_ln_speed(idx, table, t, x, y, a) {
                Ok((ln, _)) => (ln + speed_measure_density(idx, y).ln()).exp(),
                Err(_) => f64::NAN,
            }
        },
        &[a, a + (x - a), x + t.sqrt(), y_hi],
        &QuadOptions {
            rel_tol: 1e-7,
            abs_tol: 1e-12,
            max_intervals: 1000,
        },
    )?;
    Ok(q.value)
}

/// Sharp two-sided comparator for the killed kernel at unit barrier,
/// against the speed measure:
/// `(1 ^ (x-1)(y-1)/t) (1 ^ xy/t)^{nu-1/2} (xy)^{nu-1/2} t^{-1/2}
///  e^{-(x-y)^2/(2t)}`.
pub fn killed_density_comparator(idx: BesselIndex, q: &KernelQuery) -> Result<EvalResult> {
    let ln = killed_density_comparator_ln(idx, q)?;
    let value = ln.exp();
    Ok(EvalResult::new(value, 4.0 * f64::EPSILON * value, Method::ClosedForm))
}

/// Log form of [`killed_density_comparator`], usable deep in Gaussian tails.
pub fn killed_density_comparator_ln(idx: BesselIndex, q: &KernelQuery) -> Result<f64> {
    if q.a != 1.0 {
        return Err(Error::BarrierNotUnit(q.a));
    }
    if !(q.x > 1.0) || !(q.y > 1.0) {
        return Err(Error::BelowBarrier {
            height: q.x.min(q.y),
            barrier: 1.0,
        });
    }
    let nu = idx.nu;
    let (t, x, y) = (q.t, q.x, q.y);
    Ok(((x - 1.0) * (y - 1.0) / t).min(1.0).ln()
        + (nu - 0.5) * (x * y / t).min(1.0).ln()
        + (nu - 0.5) * (x * y).ln()
        - 0.5 * t.ln()
        - (x - y).powi(2) / (2.0 * t))
}
