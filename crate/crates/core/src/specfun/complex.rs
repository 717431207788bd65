//! The two complex-capable Bessel evaluations that contour Laplace inversion
//! needs, and nothing more: `I` of complex *order* at positive real argument
//! and `K` of real order at complex *argument* in the right half-plane.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::gamma::{ln_gamma, ln_gamma_complex};

/// `e^{-z} I_theta(z)` for complex order with `Re theta >= 0` and real
/// `z > 0`, by the ascending series. All magnitude variation is carried by
/// `1/Gamma(k + theta + 1)`, so there is no destructive cancellation; the
/// result underflows to zero when the true value is below ~1e-308.
pub fn bessel_i_scaled_complex_order(theta: Complex64, z: f64) -> Complex64 {
    debug_assert!(theta.re >= 0.0 && z > 0.0);
    let ln_half_z = Complex64::new((0.5 * z).ln(), 0.0);
    let t0 = (theta * ln_half_z - ln_gamma_complex(theta + 1.0) - z).exp();
    let q = 0.25 * z * z;
    let mut term = t0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut k = 0.0f64;
    loop {
        sum += term;
        term = term * q / ((k + 1.0) * (theta + (k + 1.0)));
        k += 1.0;
        if (term.norm() <= 1e-17 * sum.norm() && k > 0.5 * z) || k > 40_000.0 {
            sum += term;
            return sum;
        }
    }
}

/// Principal-branch logarithm of `e^{-z} I_theta(z)` for complex order with
/// `Re theta >= 0` and real `0 < z < 650`.
///
/// For order `i B` with large `B` the function itself reaches `e^{pi B/2}`
/// and overflows f64 even though contour sums `e^{s t} I_theta(z)` stay
/// moderate; carrying the leading term in log form defers the exponential
/// to the caller. The branch of the result is immaterial to callers that
/// exponentiate.
pub fn bessel_i_scaled_complex_order_ln(theta: Complex64, z: f64) -> Complex64 {
    debug_assert!(theta.re >= 0.0 && z > 0.0 && z < 650.0);
    let ln_t0 = theta * (0.5 * z).ln() - ln_gamma_complex(theta + 1.0) - z;
    let q = 0.25 * z * z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut k = 0.0f64;
    loop {
        sum += term;
        term = term * q / ((k + 1.0) * (theta + (k + 1.0)));
        k += 1.0;
        if (term.norm() <= 1e-17 * sum.norm() && k > 0.5 * z) || k > 40_000.0 {
            sum += term;
            break;
        }
    }
    ln_t0 + sum.ln()
}

/// `e^{z} K_nu(z)` for real order `nu > -1/2` and complex `z` with
/// `Re z > 0`, via
///
/// ```text
/// e^z K_nu(z) = sqrt(pi/(2z)) / Gamma(nu + 1/2)
///               * int_0^inf e^{-u} u^{nu-1/2} (1 + u/(2z))^{nu-1/2} du .
/// ```
///
/// `Re(1 + u/(2z)) > 1` on the whole path, so the complex power never
/// approaches the branch cut and the integrand oscillation stays bounded by
/// the fixed phase `(nu - 1/2) arg(1 + u/(2z))`. Under `u = e^w` the
/// integrand is analytic in a strip of half-width >= pi/2 around the real
/// axis and decays (double-)exponentially both ways, so the plain trapezoid
/// rule on a fixed grid converges geometrically: step 0.32 already leaves
/// the truncation error near 1e-13. This inner loop dominates every
/// hitting-density inversion, hence the fixed-grid design.
pub fn bessel_k_scaled_complex_arg(nu: f64, z: Complex64) -> Result<Complex64> {
    if !(nu > -0.45) {
        return Err(Error::OrderOutOfRange(nu, 0.45));
    }
    if !(z.re > 0.0) {
        return Err(Error::DomainMismatch("K_nu requires Re z > 0"));
    }
    let grid = trapezoid_grid();
    let two_z = 2.0 * z;
    let mut sum = Complex64::new(0.0, 0.0);
    for &(w, u) in grid.iter() {
        // e^{-u} u^{nu+1/2} (1 + u/(2z))^{nu-1/2}, the +1/2 from du = u dw
        let real_part = (-u + (nu + 0.5) * w).exp();
        if real_part == 0.0 {
            continue;
        }
        let c = 1.0 + u / two_z;
        sum += real_part * ((nu - 0.5) * c.ln()).exp();
    }
    let amp = (std::f64::consts::PI / two_z).sqrt() / ln_gamma(nu + 0.5).exp();
    Ok(amp * sum * TRAP_STEP)
}

const TRAP_STEP: f64 = 0.2;
const TRAP_LO: f64 = -64.0;
const TRAP_HI: f64 = 5.6;

fn trapezoid_grid() -> &'static [(f64, f64)] {
    use std::sync::OnceLock;
    static GRID: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    GRID.get_or_init(|| {
        let n = ((TRAP_HI - TRAP_LO) / TRAP_STEP).ceil() as usize + 1;
        (0..n)
            .map(|i| {
                let w = TRAP_LO + TRAP_STEP * i as f64;
                (w, w.exp())
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel::{bessel_i_series, bessel_k_scaled_impl};
    use approx::assert_relative_eq;

    #[test]
    fn complex_order_series_reduces_to_real() {
        for &(theta, z) in &[(0.0, 0.7), (1.3, 2.0), (4.0, 11.0), (0.5, 30.0)] {
            let c = bessel_i_scaled_complex_order(Complex64::new(theta, 0.0), z);
            let r = bessel_i_series(theta, z, true);
            assert_relative_eq!(c.re, r, max_relative = 1e-12);
            assert!(c.im.abs() <= 1e-13 * r.abs());
        }
    }

    #[test]
    fn complex_order_conjugate_symmetry() {
        let z = 3.0;
        let a = bessel_i_scaled_complex_order(Complex64::new(1.2, 2.5), z);
        let b = bessel_i_scaled_complex_order(Complex64::new(1.2, -2.5), z);
        assert_relative_eq!(a.re, b.re, max_relative = 1e-13);
        assert_relative_eq!(a.im, -b.im, max_relative = 1e-13);
    }

    #[test]
    fn complex_arg_k_reduces_to_real() {
        for &(nu, z) in &[(0.0, 0.4), (0.5, 2.0), (1.0, 1.0), (2.7, 3.3), (1.5, 40.0)] {
            let c = bessel_k_scaled_complex_arg(nu, Complex64::new(z, 0.0)).unwrap();
            let r = bessel_k_scaled_impl(nu, z).unwrap();
            assert_relative_eq!(c.re, r, max_relative = 1e-10);
            assert!(c.im.abs() <= 1e-12 * r.abs());
        }
    }

    #[test]
    fn half_integer_k_closed_form_complex() {
        // K_{1/2}(z) = sqrt(pi/(2z)) e^{-z}, exactly, for complex z too.
        for &(re, im) in &[(1.0, 0.5), (0.3, -4.0), (2.0, 30.0), (0.05, 3.0)] {
            let z = Complex64::new(re, im);
            let got = bessel_k_scaled_complex_arg(0.5, z).unwrap();
            let expected = (std::f64::consts::PI / (2.0 * z)).sqrt();
            assert!((got - expected).norm() <= 1e-12 * expected.norm());
        }
    }

    #[test]
    fn complex_k_conjugate_symmetry() {
        let z = Complex64::new(0.8, 2.2);
        let a = bessel_k_scaled_complex_arg(1.3, z).unwrap();
        let b = bessel_k_scaled_complex_arg(1.3, z.conj()).unwrap();
        assert_relative_eq!(a.re, b.re, max_relative = 1e-12);
        assert_relative_eq!(a.im, -b.im, max_relative = 1e-12);
    }
}
