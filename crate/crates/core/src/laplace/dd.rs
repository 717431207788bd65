//! Minimal double-double arithmetic for the Gaver–Stehfest accumulation.
//!
//! The Stehfest weights alternate in sign and reach ~1e8 at order 14, so a
//! plain f64 dot product loses ~8 digits to cancellation. Carrying both the
//! weights and the weighted sum in unevaluated (hi, lo) pairs pushes the
//! rounding floor far below the method error.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion: an i128 splits into two f64 halves.
    pub fn from_i128(x: i128) -> Dd {
        let hi = x as f64;
        let lo = (x - hi as i128) as f64;
        Dd { hi, lo }
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let s2 = s2 + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.add(other.mul(Dd::from_f64(-q1)));
        let q2 = r.hi / other.hi;
        let r2 = r.add(other.mul(Dd::from_f64(-q2)));
        let q3 = r2.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        let (hi, lo2) = quick_two_sum(hi, lo + q3);
        Dd { hi, lo: lo2 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_survives() {
        // (1e16 + 1) - 1e16 = 1 exactly in double-double
        let a = Dd::from_f64(1e16).add(Dd::from_f64(1.0));
        let b = a.add(Dd::from_f64(-1e16));
        assert_eq!(b.to_f64(), 1.0);
    }

    #[test]
    fn i128_roundtrip() {
        let x: i128 = 123_456_789_012_345_678_901_234_567;
        let d = Dd::from_i128(x);
        assert_eq!(d.hi as i128 + d.lo as i128, x);
    }

    #[test]
    fn division() {
        let x = Dd::from_i128(1).div(Dd::from_i128(3));
        let err = (x.hi - 1.0 / 3.0).abs();
        assert!(err < 1e-16);
        assert!((x.to_f64() * 3.0 - 1.0).abs() < 1e-30);
    }
}
