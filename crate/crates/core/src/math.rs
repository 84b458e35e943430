//! Float math shim: `std` intrinsics when available, `libm` otherwise.

#![allow(dead_code)]

macro_rules! shim {
    ($(fn $name:ident($($arg:ident),+) => $libm:ident;)*) => {
        $(
            #[cfg(feature = "std")]
            #[inline(always)]
            pub(crate) fn $name($($arg: f64),+) -> f64 {
                shim!(@std $name, $($arg),+)
            }
            #[cfg(not(feature = "std"))]
            #[inline(always)]
            pub(crate) fn $name($($arg: f64),+) -> f64 {
                libm::$libm($($arg),+)
            }
        )*
    };
    (@std $name:ident, $a:ident) => { $a.$name() };
    (@std $name:ident, $a:ident, $b:ident) => { $a.$name($b) };
}

shim! {
    fn exp(x) => exp;
    fn ln(x) => log;
    fn ln_1p(x) => log1p;
    fn log2(x) => log2;
    fn log10(x) => log10;
    fn sqrt(x) => sqrt;
    fn sin(x) => sin;
    fn cos(x) => cos;
    fn tanh(x) => tanh;
    fn atan2(y, x) => atan2;
    fn powf(x, y) => pow;
}

#[inline(always)]
pub(crate) fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & !(1u64 << 63))
}

/// log(1 + e^x) without overflow.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + ln_1p(exp(-x))
    } else {
        ln_1p(exp(x))
    }
}

/// log(e^a + e^b) without overflow (the exact max-star operation).
#[inline]
pub(crate) fn logaddexp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + ln_1p(exp(lo - hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shim_matches_std() {
        assert_eq!(exp(1.0), 1f64.exp());
        assert_eq!(atan2(1.0, 2.0), 1f64.atan2(2.0));
        assert_eq!(abs(-3.5), 3.5);
        assert_eq!(abs(3.5), 3.5);
    }

    #[test]
    fn softplus_stable() {
        assert!((softplus(0.0) - core::f64::consts::LN_2).abs() < 1e-15);
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        assert!(softplus(-800.0) >= 0.0);
        assert!(softplus(-800.0) < 1e-300);
    }

    #[test]
    fn logaddexp_stable() {
        assert!((logaddexp(0.0, 0.0) - core::f64::consts::LN_2).abs() < 1e-15);
        assert!((logaddexp(1000.0, -1000.0) - 1000.0).abs() < 1e-12);
        let direct = (2f64.exp() + 3f64.exp()).ln();
        assert!((logaddexp(2.0, 3.0) - direct).abs() < 1e-14);
        assert_eq!(logaddexp(f64::NEG_INFINITY, 5.0), 5.0);
        assert_eq!(logaddexp(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
    }
}
