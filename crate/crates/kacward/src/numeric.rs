//! Stable evaluation of the hyperbolic functions appearing in the high and
//! low-temperature weight systems, with overflow guards for large `|Re z|`.

use num_complex::Complex64;

use crate::geometry::normalize_angle;

/// `tanh z` through `(1 - e^{-2z}) / (1 + e^{-2z})` on the right half-plane,
/// reflected for `Re z < 0`; never forms `cosh` of a large argument.
pub fn tanh_c(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -tanh_c(-z);
    }
    let q = (-2.0 * z).exp();
    (1.0 - q) / (1.0 + q)
}

/// `|tanh z|` from the closed form
/// `sqrt((cosh 2x - cos 2y) / (cosh 2x + cos 2y))` with `z = x + iy`;
/// saturates to one when `cosh 2x` would overflow.
pub fn abs_tanh(z: Complex64) -> f64 {
    let x2 = 2.0 * z.re.abs();
    let y2 = 2.0 * z.im;
    if x2 > 40.0 {
        return 1.0;
    }
    let ch = x2.cosh();
    let c = y2.cos();
    ((ch - c) / (ch + c)).sqrt()
}

/// Principal logarithm of `cosh z`.
///
/// For moderate arguments this is `Log(cosh z)` directly; for large `|Re z|`
/// it switches to the asymptotic form `|Re z| - ln 2` with the imaginary
/// part reduced to the principal interval.
pub fn ln_cosh_principal(z: Complex64) -> Complex64 {
    let z = if z.re < 0.0 { -z } else { z };
    if z.re <= 350.0 {
        return z.cosh().ln();
    }
    // cosh z = e^z (1 + e^{-2z}) / 2 and e^{-2z} is negligible here.
    Complex64::new(z.re - std::f64::consts::LN_2, normalize_angle(z.im))
}

/// `Re cosh(z) > 0`, evaluated as `cos(Im z) > 0` since `cosh(Re z) > 0`.
pub fn cosh_right_half_plane(z: Complex64) -> bool {
    z.im.cos() > 0.0
}
