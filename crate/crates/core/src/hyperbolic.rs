//! Half-space model of hyperbolic space: geometry, the lambda-potential
//! kernel `U`, the lambda-Green function `G` of the region above a
//! horizontal barrier, and their sharp two-sided comparators.
//!
//! Points are `x = (x~, x_n)` with height `x_n > 0`; the metric gives
//! `cosh d(x,y) = 1 + |x-y|^2/(2 x_n y_n)`. With `mu = (n-1)/2`,
//! `nu = sqrt(2 lambda + mu^2)` and `R^2 = |x-y|^2`, the kernels reduce to
//! one-dimensional integrals after the substitution `w = R^2/(2s)`:
//!
//! ```text
//! U(x, y) = (x_n y_n / (pi R^2))^mu  int_0^inf s^{mu-1} e^{-s}
//!           Ihat_nu(2 x_n y_n s / R^2) ds ,
//! ```
//!
//! and `G` carries the additional killing factor `p_a / p` of the Bessel
//! heat kernel (route `ViaBessel`) or, equivalently, the compensated
//! potential of the exponential-functional pair (route `ViaFunctional`).
//! The substitution folds every Gaussian factor into the single `e^{-s}`,
//! so the integrand never over- or underflows.
//!
//! All evaluations normalize the barrier to 1 internally: the kernels are
//! invariant under `(x, y, a) -> (cx, cy, ca)`, and normalizing makes that
//! exact at the floating-point level rather than approximate.

use crate::besselproc::{killed_density_ln_speed, BesselIndex};
use crate::error::{Error, Result};
use crate::functionals::{green_ab_with_table, DriftParams, FunctionalState, QHittingTable};
use crate::quad::{integrate_with_splits, QuadOptions};
use crate::specfun::{bessel_i_scaled, Order};
use crate::types::{EvalResult, Method};

/// A point `(x~, x_n)` of the half-space model, `x_n > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicPoint {
    tilde: Vec<f64>,
    height: f64,
}

impl HyperbolicPoint {
    pub fn new(tilde: Vec<f64>, height: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::NonPositiveArgument(height));
        }
        if tilde.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        Ok(HyperbolicPoint { tilde, height })
    }

    /// Build from full coordinates, the last being the height.
    pub fn from_coords(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("empty coordinate list".into()));
        }
        Self::new(coords[..coords.len() - 1].to_vec(), coords[coords.len() - 1])
    }

    pub fn tilde(&self) -> &[f64] {
        &self.tilde
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn dim(&self) -> usize {
        self.tilde.len() + 1
    }

    /// Euclidean scaling `x -> c x`, the barrier-moving similarity.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.tilde.iter().map(|v| c * v).collect(), c * self.height)
    }
}

/// Model parameters: dimension `n >= 2`, spectral parameter `lambda >= 0`,
/// barrier `a` (must be positive for killed objects; comparators accept
/// `a = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n: usize,
    lambda: f64,
    a: f64,
}

impl ModelParams {
    pub fn new(n: usize, lambda: f64, a: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooLow(n));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("barrier a = {a}")));
        }
        Ok(ModelParams { n, lambda, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn mu(&self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }
    pub fn nu(&self) -> f64 {
        (2.0 * self.lambda + self.mu() * self.mu()).sqrt()
    }

    /// The same model with barrier `c a` (for use with scaled points).
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::NonPositiveArgument(c));
        }
        Self::new(self.n, self.lambda, c * self.a)
    }
}

fn check_dims(p: &ModelParams, x: &HyperbolicPoint, y: &HyperbolicPoint) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    if x.dim() != p.n {
        return Err(Error::DimensionMismatch(x.dim(), p.n));
    }
    Ok(())
}

fn horizontal_sep_sq(x: &HyperbolicPoint, y: &HyperbolicPoint) -> f64 {
    x.tilde
        .iter()
        .zip(y.tilde.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn sep_sq(x: &HyperbolicPoint, y: &HyperbolicPoint) -> f64 {
    horizontal_sep_sq(x, y) + (x.height - y.height).powi(2)
}

/// Hyperbolic distance: `cosh d = 1 + |x-y|^2/(2 x_n y_n)`, computed as
/// `d = 2 asinh(|x-y| / (2 sqrt(x_n y_n)))`, exact also near the diagonal.
pub fn hyperbolic_distance(x: &HyperbolicPoint, y: &HyperbolicPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let r = sep_sq(x, y).sqrt();
    Ok(2.0 * (r / (2.0 * (x.height * y.height).sqrt())).asinh())
}

/// Hyperbolic distance of `x` to the barrier plane: `ln(x_n / a)`.
pub fn boundary_distance(p: &ModelParams, x: &HyperbolicPoint) -> Result<f64> {
    if !(p.a > 0.0) {
        return Err(Error::NonPositiveArgument(p.a));
    }
    if x.height < p.a {
        return Err(Error::BelowBarrier {
            height: x.height,
            barrier: p.a,
        });
    }
    Ok((x.height / p.a).ln())
}

fn kernel_quad_options() -> QuadOptions {
    QuadOptions {
        rel_tol: 1e-9,
        abs_tol: 1e-280,
        max_intervals: 2000,
    }
}

/// lambda-potential kernel
/// `U(x,y) = y_n^{2 mu + 1} (x_n/y_n)^{mu-nu} int (2 pi w)^{-(n-1)/2}
///  e^{-|x~-y~|^2/(2w)} Q_nu(x_n, y_n; w) dw`,
/// evaluated in the substituted form from the module docs.
pub fn potential_kernel(
    p: &ModelParams,
    x: &HyperbolicPoint,
    y: &HyperbolicPoint,
) -> Result<EvalResult> {
    check_dims(p, x, y)?;
    let r_sq = sep_sq(x, y);
    if r_sq == 0.0 {
        return Err(Error::DiagonalSingularity);
    }
    let (mu, nu) = (p.mu(), p.nu());
    let c = 2.0 * x.height * y.height / r_sq;
    let order = Order::new(nu)?;
    let integrand = |s: f64| -> f64 {
        let i_hat = match bessel_i_scaled(order, c * s) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        s.powf(mu - 1.0) * (-s).exp() * i_hat
    };
    let s_max = 90.0 + 10.0 * (mu + nu);
    let mut splits = vec![0.0, s_max];
    for &sp in &[1.0 / c, 1.0, 10.0] {
        if sp > 0.0 && sp < s_max {
            splits.push(sp);
        }
    }
    splits.sort_by(f64::total_cmp);
    splits.dedup();
    let j = integrate_with_splits(integrand, &splits, &kernel_quad_options())?;
    let pref = (x.height * y.height / (std::f64::consts::PI * r_sq)).powf(mu);
    Ok(EvalResult::new(
        pref * j.value,
        pref * (j.abs_err + 1e-11 * j.value.abs()),
        Method::Quadrature,
    ))
}

/// Two-sided comparator for `U`:
/// `(2 x_n y_n/R^2)^{mu-1/2} (1 ^ 2 x_n y_n/R^2)^{nu+1/2}` for `n >= 3`, and
/// without the leading power factor for `n = 2`.
pub fn potential_comparator(
    p: &ModelParams,
    x: &HyperbolicPoint,
    y: &HyperbolicPoint,
) -> Result<EvalResult> {
    check_dims(p, x, y)?;
    let r_sq = sep_sq(x, y);
    if r_sq == 0.0 {
        return Err(Error::DiagonalSingularity);
    }
    let c = 2.0 * x.height * y.height / r_sq;
    let value = if p.n >= 3 {
        c.powf(p.mu() - 0.5) * c.min(1.0).powf(p.nu() + 0.5)
    } else {
        c.min(1.0).powf(p.nu() + 0.5)
    };
    Ok(EvalResult::closed_form(value))
}

/// Which exact representation evaluates the Green function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenRoute {
    /// Compensated potential of the exponential-functional pair.
    ViaFunctional,
    /// Killed Bessel heat kernel under the Lamperti clock.
    ViaBessel,
}

/// lambda-Green function of the region `x_n > a`, evaluated through either
/// exact route; the two agree within the combined error budget and serve as
/// mutual oracles.
pub fn green_function(
    p: &ModelParams,
    x: &HyperbolicPoint,
    y: &HyperbolicPoint,
    route: GreenRoute,
) -> Result<EvalResult> {
    let table = green_table(p, x, y)?;
    green_function_with_table(p, &table, x, y, route)
}

/// Hitting-density table shared by both routes, reusable across all pairs
/// with the same `(nu, min(x_n, y_n)/a)`.
pub fn green_table(
    p: &ModelParams,
    x: &HyperbolicPoint,
    y: &HyperbolicPoint,
) -> Result<QHittingTable> {
    if !(p.a > 0.0) {
        return Err(Error::NonPositiveArgument(p.a));
    }
    QHittingTable::build(p.nu(), x.height.min(y.height) / p.a)
}

/// [`green_function`] with a caller-managed table built for
/// `(nu, min(x_n, y_n)/a)`.
pub fn green_function_with_table(
    p: &ModelParams,
    table: &QHittingTable,
    x: &HyperbolicPoint,
    y: &HyperbolicPoint,
    route: GreenRoute,
) -> Result<EvalResult> {
    check_dims(p, x, y)?;
    if !(p.a > 0.0) {
        return Err(Error::NonPositiveArgument(p.a));
    }
    for pt in [x, y] {
        if pt.height <= p.a {
            return Err(Error::BelowBarrier {
                height: pt.height,
                barrier: p.a,
            });
        }
    }
    let r_sq = sep_sq(x, y);
    if r_sq == 0.0 {
        return Err(Error::DiagonalSingularity);
    }

    // Normalize the barrier to 1: exact invariance under joint scaling.
    let a = p.a;
    let xh = x.height / a;
    let yh = y.height / a;
    let r_sq_n = r_sq / (a * a);
    let (mu, nu) = (p.mu(), p.nu());

    let (lo, hi) = if xh <= yh { (xh, yh) } else { (yh, xh) };
    let s_max = 90.0 + 10.0 * (mu + nu);
    let mut splits = vec![0.0, s_max];
    for &w in &[(lo - 1.0) * (hi - 1.0), lo * hi] {
        let sp = r_sq_n / (2.0 * w);
        if sp > 0.0 && sp < s_max {
            splits.push(sp);
        }
    }
    splits.push(1.0f64.min(s_max * 0.5));
    splits.sort_by(f64::total_cmp);
    splits.dedup();

    let quad_opts = kernel_quad_options();
    let two_pi = 2.0 * std::f64::consts::PI;
    let value = match route {
        GreenRoute::ViaBessel => {
            let idx = BesselIndex::new(nu)?;
            // ln of (2 pi w)^{-mu} e^{-rho^2/(2w)} p_1(w, lo, hi) with
            // w = R^2/(2s); the combined exponents contribute exactly -s.
            let integrand = |s: f64| -> f64 {
                let w = r_sq_n / (2.0 * s);
                let ln_p = match killed_density_ln_speed(idx, table, w, lo, hi, 1.0) {
                    Ok((ln, _)) => ln,
                    Err(_) => return f64::NAN,
                };
                let ln_full = -mu * (two_pi * w).ln()
                    - horizontal_part(r_sq_n, lo, hi) / (2.0 * w)
                    + ln_p
                    + (w / s).ln();
                ln_full.exp()
            };
            let q = integrate_with_splits(integrand, &splits, &quad_opts)?;
            (lo * hi).powf(mu - nu) * q.value
        }
        GreenRoute::ViaFunctional => {
            let dp = DriftParams::new(mu, p.lambda)?;
            let integrand = |s: f64| -> f64 {
                let w = r_sq_n / (2.0 * s);
                let st = match FunctionalState::new(lo, 1.0, w) {
                    Ok(st) => st,
                    Err(_) => return f64::NAN,
                };
                let g = match green_ab_with_table(dp, table, st, hi) {
                    Ok(g) => g.value,
                    Err(_) => return f64::NAN,
                };
                let pref = (-horizontal_part(r_sq_n, lo, hi) / (2.0 * w)).exp()
                    / (two_pi * w).powf(mu);
                pref * g * w / s
            };
            let q = integrate_with_splits(integrand, &splits, &quad_opts)?;
            // The kernel is plainly symmetric against the hyperbolic volume
            // (the measure factors of the two-dimensional Green function
            // cancel against the hi^{2mu+1} prefactor), so evaluating with
            // (lo, hi) covers both orderings.
            hi.powf(2.0 * mu + 1.0) * q.value
        }
    };
    Ok(EvalResult::new(value, 2e-6 * value.abs(), Method::Quadrature))
}

// rho^2 expressed through the full separation to keep the s-substitution's
// exponent exactly -s: rho^2 = R^2 - (x_n - y_n)^2.
fn horizontal_part(r_sq: f64, xh: f64, yh: f64) -> f64 {
    (r_sq - (xh - yh) * (xh - yh)).max(0.0)
}

/// Sharp comparator for the Green function (`n > 2`):
/// `(2 x_n y_n/R^2)^{mu-1/2} (1 ^ 2(x_n-a)(y_n-a)/R^2)
///  (1 ^ 2 x_n y_n/R^2)^{nu-1/2}`.
pub fn green_comparator(
    p: &ModelParams,
    x: &HyperbolicPoint,
    y: &HyperbolicPoint,
) -> Result<EvalResult> {
    if p.n <= 2 {
        return Err(Error::DimensionTooLow(p.n));
    }
    check_dims(p, x, y)?;
    for pt in [x, y] {
        if pt.height <= p.a {
            return Err(Error::BelowBarrier {
                height: pt.height,
                barrier: p.a,
            });
        }
    }
    let r_sq = sep_sq(x, y);
    if r_sq == 0.0 {
        return Err(Error::DiagonalSingularity);
    }
    let c = 2.0 * x.height * y.height / r_sq;
    let boundary = 2.0 * (x.height - p.a) * (y.height - p.a) / r_sq;
    let value = c.powf(p.mu() - 0.5) * boundary.min(1.0) * c.min(1.0).powf(p.nu() - 0.5);
    Ok(EvalResult::closed_form(value))
}

/// The comparator in hyperbolic-distance form (requires `lambda > 0`):
/// `sinh^{-(2mu-1)}(d/2) cosh^{-(nu+1/2)}(d)
///  (1 ^ (1 ^ delta(x))(1 ^ delta(y)) / (1 ^ d^2))`.
pub fn green_comparator_distance(
    p: &ModelParams,
    x: &HyperbolicPoint,
    y: &HyperbolicPoint,
) -> Result<EvalResult> {
    if p.n <= 2 {
        return Err(Error::DimensionTooLow(p.n));
    }
    if !(p.lambda > 0.0) {
        return Err(Error::InvalidParameter(
            "distance-form comparator requires lambda > 0".into(),
        ));
    }
    check_dims(p, x, y)?;
    let d = hyperbolic_distance(x, y)?;
    if d == 0.0 {
        return Err(Error::DiagonalSingularity);
    }
    let dx = boundary_distance(p, x)?;
    let dy = boundary_distance(p, y)?;
    let boundary_factor = (dx.min(1.0) * dy.min(1.0) / (d * d).min(1.0)).min(1.0);
    let value = (0.5 * d).sinh().powf(-(2.0 * p.mu() - 1.0))
        * d.cosh().powf(-(p.nu() + 0.5))
        * boundary_factor;
    Ok(EvalResult::closed_form(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pt(coords: &[f64]) -> HyperbolicPoint {
        HyperbolicPoint::from_coords(coords).unwrap()
    }

    #[test]
    fn distance_basics() {
        let x = pt(&[0.0, 0.0, 1.0]);
        assert_eq!(hyperbolic_distance(&x, &x).unwrap(), 0.0);
        // (0, 1) to (0, e) is exactly 1: (1 + e^2)/(2e) = cosh 1
        let y = pt(&[0.0, 0.0, std::f64::consts::E]);
        assert_relative_eq!(hyperbolic_distance(&x, &y).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(
            hyperbolic_distance(&x, &y).unwrap(),
            hyperbolic_distance(&y, &x).unwrap()
        );
        assert!(hyperbolic_distance(&x, &pt(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn distance_triangle_inequality_random() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let mut point = || {
                pt(&[
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                    rng.random_range(0.05..5.0),
                ])
            };
            let (a, b, c) = (point(), point(), point());
            let dab = hyperbolic_distance(&a, &b).unwrap();
            let dbc = hyperbolic_distance(&b, &c).unwrap();
            let dac = hyperbolic_distance(&a, &c).unwrap();
            assert!(dac <= dab + dbc + 1e-12);
        }
    }

    #[test]
    fn boundary_distance_identities() {
        let p = ModelParams::new(3, 0.0, 2.0).unwrap();
        assert_eq!(boundary_distance(&p, &pt(&[0.0, 0.0, 2.0])).unwrap(), 0.0);
        let e_height = pt(&[0.0, 0.0, 2.0 * std::f64::consts::E]);
        assert_relative_eq!(
            boundary_distance(&p, &e_height).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        // cosh(delta) = (x_n/a + a/x_n)/2 on a grid
        for &h in &[2.0, 2.5, 4.0, 11.0, 60.0] {
            let d = boundary_distance(&p, &pt(&[1.0, -2.0, h])).unwrap();
            assert_relative_eq!(d.cosh(), 0.5 * (h / 2.0 + 2.0 / h), max_relative = 1e-12);
        }
        assert!(boundary_distance(&p, &pt(&[0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn potential_comparator_examples() {
        // n = 3, lambda = 0, heights 2 and 3 at R^2 = 1:
        // (12)^{1/2} (1 ^ 12)^{3/2} = sqrt(12)
        let p = ModelParams::new(3, 0.0, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 2.0]);
        let y = pt(&[0.0, 0.0, 3.0]);
        assert_relative_eq!(
            potential_comparator(&p, &x, &y).unwrap().value,
            12.0f64.sqrt(),
            max_relative = 1e-13
        );
        // n = 2 branch: no leading power factor; saturates to 1 nearby
        let p2 = ModelParams::new(2, 0.3, 1.0).unwrap();
        let far = potential_comparator(&p2, &pt(&[0.0, 1.0]), &pt(&[30.0, 1.0]))
            .unwrap()
            .value;
        assert!(far < 1.0 && far > 0.0);
        let near = potential_comparator(&p2, &pt(&[0.0, 1.0]), &pt(&[0.1, 1.0]))
            .unwrap()
            .value;
        assert_eq!(near, 1.0);
    }

    #[test]
    fn potential_kernel_matches_comparator_bracket() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let mut ratios = Vec::new();
        for &(rho, xh, yh) in &[
            (0.1, 1.0, 1.0),
            (1.0, 2.0, 3.0),
            (10.0, 0.5, 4.0),
            (40.0, 2.0, 2.0),
            (0.01, 0.2, 0.3),
        ] {
            let x = pt(&[0.0, 0.0, xh]);
            let y = pt(&[rho, 0.0, yh]);
            let u = potential_kernel(&p, &x, &y).unwrap().value;
            let c = potential_comparator(&p, &x, &y).unwrap().value;
            assert!(u > 0.0 && c > 0.0);
            ratios.push(u / c);
        }
        let (min, max) = ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        assert!(max / min < 50.0, "spread {}", max / min);
    }

    #[test]
    fn potential_kernel_decreasing_in_lambda() {
        let x = pt(&[0.0, 0.0, 2.0]);
        let y = pt(&[1.0, 0.0, 3.0]);
        let mut last = f64::INFINITY;
        for &lambda in &[0.0, 0.5, 2.0] {
            let p = ModelParams::new(3, lambda, 1.0).unwrap();
            let u = potential_kernel(&p, &x, &y).unwrap().value;
            assert!(u < last && u > 0.0);
            last = u;
        }
    }

    #[test]
    fn potential_far_field_exponent() {
        // U * (R^2/(2 x_n y_n))^{mu+nu} stays bounded as separation grows
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 1.5]);
        let mut scaled = Vec::new();
        for &rho in &[20.0, 60.0, 200.0] {
            let y = pt(&[rho, 0.0, 2.5]);
            let u = potential_kernel(&p, &x, &y).unwrap().value;
            let c = 2.0 * 1.5 * 2.5 / sep_sq(&x, &y);
            scaled.push(u / c.powf(p.mu() + p.nu()));
        }
        let (min, max) = scaled
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        assert!(max / min < 1.5, "far-field scaling drifts: {scaled:?}");
    }

    #[test]
    fn potential_diagonal_rejected() {
        let p = ModelParams::new(3, 0.0, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 2.0]);
        assert!(matches!(
            potential_kernel(&p, &x, &x.clone()),
            Err(Error::DiagonalSingularity)
        ));
    }

    #[test]
    fn green_routes_agree() {
        let p = ModelParams::new(3, 0.0, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 2.0]);
        let y = pt(&[1.0, 0.0, 3.0]);
        let g_b = green_function(&p, &x, &y, GreenRoute::ViaBessel).unwrap().value;
        let g_f = green_function(&p, &x, &y, GreenRoute::ViaFunctional)
            .unwrap()
            .value;
        assert_relative_eq!(g_b, g_f, max_relative = 1e-3);
        assert!(g_b > 0.0);
    }

    #[test]
    fn green_dominated_by_potential() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 1.8]);
        let y = pt(&[0.5, 0.2, 2.4]);
        let g = green_function(&p, &x, &y, GreenRoute::ViaBessel).unwrap().value;
        let u = potential_kernel(&p, &x, &y).unwrap().value;
        assert!(g <= u * (1.0 + 1e-9) && g > 0.0);
    }

    #[test]
    fn green_scaling_invariance() {
        // G(c x, c y; barrier c a) = G(x, y; barrier a), here to 1e-10
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 2.0]);
        let y = pt(&[1.0, 0.0, 3.0]);
        let base = green_function(&p, &x, &y, GreenRoute::ViaBessel).unwrap().value;
        for &c in &[0.3, 2.0, 17.0] {
            let ps = p.rescaled(c).unwrap();
            let xs = x.scaled(c).unwrap();
            let ys = y.scaled(c).unwrap();
            let scaled = green_function(&ps, &xs, &ys, GreenRoute::ViaBessel)
                .unwrap()
                .value;
            assert_relative_eq!(scaled, base, max_relative = 1e-10);
        }
    }

    #[test]
    fn green_symmetry_under_pairing() {
        let p = ModelParams::new(3, 0.3, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 1.6]);
        let y = pt(&[0.7, -0.4, 2.9]);
        let g_xy = green_function(&p, &x, &y, GreenRoute::ViaBessel).unwrap().value;
        let g_yx = green_function(&p, &y, &x, GreenRoute::ViaBessel).unwrap().value;
        assert_relative_eq!(g_xy, g_yx, max_relative = 1e-6);
    }

    #[test]
    fn horizontal_isometry_invariance() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let x = pt(&[0.3, -1.0, 2.0]);
        let y = pt(&[1.3, 0.5, 3.0]);
        let base_u = potential_kernel(&p, &x, &y).unwrap().value;
        let base_g = green_function(&p, &x, &y, GreenRoute::ViaBessel).unwrap().value;
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..5 {
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let (c, s) = (phi.cos(), phi.sin());
            let (tx, ty): (f64, f64) =
                (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let rot = |pnt: &HyperbolicPoint| {
                let t = pnt.tilde();
                pt(&[
                    c * t[0] - s * t[1] + tx,
                    s * t[0] + c * t[1] + ty,
                    pnt.height(),
                ])
            };
            let u = potential_kernel(&p, &rot(&x), &rot(&y)).unwrap().value;
            let g = green_function(&p, &rot(&x), &rot(&y), GreenRoute::ViaBessel)
                .unwrap()
                .value;
            assert_relative_eq!(u, base_u, max_relative = 1e-9);
            assert_relative_eq!(g, base_g, max_relative = 1e-9);
        }
    }

    #[test]
    fn green_comparator_example_and_guards() {
        // n = 3, lambda = 0, a = 1, heights 2 and 3, R^2 = 1:
        // 12^{1/2} (1 ^ 4)(1 ^ 12)^{1/2} = sqrt(12)
        let p = ModelParams::new(3, 0.0, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 2.0]);
        let y = pt(&[0.0, 0.0, 3.0]);
        assert_relative_eq!(
            green_comparator(&p, &x, &y).unwrap().value,
            12.0f64.sqrt(),
            max_relative = 1e-13
        );
        // boundary factor vanishes linearly in (x_n - a)
        let near1 = green_comparator(&p, &pt(&[0.0, 0.0, 1.0 + 1e-3]), &y)
            .unwrap()
            .value;
        let near2 = green_comparator(&p, &pt(&[0.0, 0.0, 1.0 + 2e-3]), &y)
            .unwrap()
            .value;
        let ratio = near2 / near1;
        assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
        // larger lambda shrinks the min-power factor pointwise
        let p2 = ModelParams::new(3, 2.0, 1.0).unwrap();
        let far_y = pt(&[8.0, 0.0, 3.0]);
        assert!(
            green_comparator(&p, &x, &far_y).unwrap().value
                >= green_comparator(&p2, &x, &far_y).unwrap().value
        );
        let p_low = ModelParams::new(2, 0.5, 1.0).unwrap();
        assert!(matches!(
            green_comparator(&p_low, &pt(&[0.0, 2.0]), &pt(&[1.0, 3.0])),
            Err(Error::DimensionTooLow(2))
        ));
        // comparator accepts a = 0
        let p_zero = ModelParams::new(3, 0.5, 0.0).unwrap();
        assert!(green_comparator(&p_zero, &x, &y).is_ok());
    }

    #[test]
    fn distance_form_comparator_consistency() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let p0 = ModelParams::new(3, 0.0, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 2.0]);
        let y = pt(&[1.0, 0.0, 3.0]);
        // refuses lambda = 0
        assert!(green_comparator_distance(&p0, &x, &y).is_err());
        // bounded ratio against the min-form comparator over a small grid
        let mut ratios = Vec::new();
        for &xh in &[1.05, 1.5, 3.0, 10.0] {
            for &yh in &[1.1, 2.0, 8.0] {
                for &rho in &[0.05, 0.5, 3.0, 20.0] {
                    let xx = pt(&[0.0, 0.0, xh]);
                    let yy = pt(&[rho, 0.0, yh]);
                    let dist_form = green_comparator_distance(&p, &xx, &yy).unwrap().value;
                    let min_form = green_comparator(&p, &xx, &yy).unwrap().value;
                    ratios.push(dist_form / min_form);
                }
            }
        }
        let (min, max) = ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        assert!(min > 1.0 / 50.0 && max < 50.0, "bracket [{min}, {max}]");
    }

    #[test]
    fn distance_form_near_diagonal_exponent() {
        // value * d^{2 mu - 1} stays bounded as d -> 0
        let p = ModelParams::new(4, 0.5, 1.0).unwrap();
        let x = pt(&[0.0, 0.0, 0.0, 2.0]);
        let mut scaled = Vec::new();
        for &rho in &[1e-2, 1e-3, 1e-4] {
            let y = pt(&[rho, 0.0, 0.0, 2.0]);
            let d = hyperbolic_distance(&x, &y).unwrap();
            let v = green_comparator_distance(&p, &x, &y).unwrap().value;
            scaled.push(v * d.powf(2.0 * p.mu() - 1.0));
        }
        let (min, max) = scaled
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        assert!(max / min < 1.2, "near-diagonal scaling {scaled:?}");
    }
}
