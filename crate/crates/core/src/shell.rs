//! The shell-like generator `p(z) = (1 + τ²z²) / (1 - τz - τ²z²)` with
//! `τ = (1 - √5)/2`, its Fibonacci-number Taylor coefficients, and the image
//! of circles `|z| = r` under it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{TruncatedSeries, MAX_ORDER};

pub const SQRT_5: f64 = 2.23606797749979;
/// `(1 - √5) / 2`, the negative root of `x² = 1 + x`.
pub const TAU: f64 = -0.6180339887498949;
/// `(3 - √5) / 2`: the generator is univalent on `|z| < R0`.
pub const R0: f64 = 0.3819660112501051;
/// `√5 / 10`: lower bound of `Re p` on the disk.
pub const BETA: f64 = 0.223606797749979;

/// Half-width (radians) of the arc around `t = π` skipped on the unit circle.
pub const POLE_ARC_HALF_WIDTH: f64 = 1e-3;

/// Largest index accepted by [`fibonacci_u`]; `u_91` still fits, `u_93` would not.
pub const FIBONACCI_MAX_INDEX: u32 = 90;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellConstants {
    pub tau: f64,
    pub r0: f64,
    pub beta: f64,
}

impl ShellConstants {
    pub fn new() -> Self {
        let s5 = 5f64.sqrt();
        Self {
            tau: (1.0 - s5) / 2.0,
            r0: (3.0 - s5) / 2.0,
            beta: s5 / 10.0,
        }
    }
}

impl Default for ShellConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// `u_n` with `u_0 = 0`, `u_1 = 1`, `u_{n+2} = u_n + u_{n+1}`.
pub fn fibonacci_u(n: u32) -> Result<u64> {
    if n > FIBONACCI_MAX_INDEX {
        return Err(Error::OverflowGuard(n));
    }
    Ok(fib_unchecked(n))
}

fn fib_unchecked(n: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        let next = a + b;
        a = b;
        b = next;
    }
    a
}

/// Binet form `((1 - τ)^n - τ^n) / √5`, unrounded.
pub fn fibonacci_binet(n: u32) -> f64 {
    ((1.0 - TAU).powi(n as i32) - TAU.powi(n as i32)) / SQRT_5
}

/// `u_{n-1} + u_{n+1}`, the integer factor of the `z^n` coefficient of the generator.
pub fn lucas(n: u32) -> Result<u64> {
    if n == 0 {
        return Ok(2);
    }
    if n > FIBONACCI_MAX_INDEX {
        return Err(Error::OverflowGuard(n));
    }
    Ok(fib_unchecked(n - 1) + fib_unchecked(n + 1))
}

/// Decomposes `τ^n = u_n τ + u_{n-1}` and returns `(u_n, u_{n-1})`.
///
/// The floating-point identity is checked with tolerance `1e-9 · max(1, u_n)`:
/// `u_n τ` carries an absolute rounding error proportional to `u_n`.
pub fn tau_power_decompose(n: u32) -> Result<(u64, u64)> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "tau power index must be >= 1".into(),
        ));
    }
    let un = fibonacci_u(n)?;
    let prev = fibonacci_u(n - 1)?;
    let defect = tau_power_defect(n, un, prev);
    if defect >= 1e-9 * (un as f64).max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "tau^{n} identity defect {defect:e} above tolerance"
        )));
    }
    Ok((un, prev))
}

/// `|τ^n - (u_n τ + u_{n-1})|` in double precision.
pub fn tau_power_defect(n: u32, un: u64, prev: u64) -> f64 {
    (TAU.powi(n as i32) - (un as f64 * TAU + prev as f64)).abs()
}

/// Taylor coefficients of the generator: `1` then `(u_{n-1} + u_{n+1}) τ^n`.
pub fn ptilde_coeffs(order: usize) -> Result<TruncatedSeries> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(Complex64::new(1.0, 0.0));
    // running product, so coefficient n is lucas(n) times τ·τ·…·τ exactly
    let mut tau_n = 1.0;
    for n in 1..=order as u32 {
        tau_n *= TAU;
        coeffs.push(Complex64::new(lucas(n)? as f64 * tau_n, 0.0));
    }
    TruncatedSeries::new(coeffs)
}

/// Numerator and denominator polynomials `1 + τ²z²` and `1 - τz - τ²z²`.
pub fn ptilde_rational(order: usize) -> Result<(TruncatedSeries, TruncatedSeries)> {
    if order < 2 {
        return Err(Error::InvalidArgument(
            "rational form of the generator needs order >= 2".into(),
        ));
    }
    let t2 = TAU * TAU;
    let mut num = vec![0.0; order + 1];
    num[0] = 1.0;
    num[2] = t2;
    let mut den = vec![0.0; order + 1];
    den[0] = 1.0;
    den[1] = -TAU;
    den[2] = -t2;
    Ok((
        TruncatedSeries::from_real(&num)?,
        TruncatedSeries::from_real(&den)?,
    ))
}

/// Closed-form value of the generator.
pub fn ptilde(z: Complex64) -> Complex64 {
    let t2z2 = TAU * TAU * z * z;
    (1.0 + t2z2) / (1.0 - TAU * z - t2z2)
}

/// The generator on the unit circle, `p(e^{it})`, in a form that stays
/// accurate next to the pole at `t = π`.
///
/// With `h = t/2`: `p(e^{it}) = N / D` where
/// `N = (1+τ²) cos t + iτ sin t` and `D = -2 cos h (τ cos h + i(1+τ²) sin h)`.
/// The real part reduces to `-τ(1+τ²) / (2|B|²)` with `B = τ cos h + i(1+τ²) sin h`,
/// so the `cos h` factor cancels exactly instead of numerically.
pub fn ptilde_on_circle(t: f64) -> Complex64 {
    let q = 1.0 + TAU * TAU;
    let (s, c) = (t / 2.0).sin_cos();
    let b2 = (TAU * c).powi(2) + (q * s).powi(2);
    let x = -TAU * q / (2.0 * b2);
    let y = (TAU * TAU * t.sin() * c - q * q * t.cos() * s) / (-2.0 * c * b2);
    Complex64::new(x, y)
}

/// `|(10x - √5) y² - (√5 - 2x)(√5 x - 1)²|` for `w = x + iy`; zero on the
/// image of the unit circle.
pub fn trisectrix_residual(w: Complex64) -> f64 {
    let (x, y) = (w.re, w.im);
    ((10.0 * x - SQRT_5) * y * y - (SQRT_5 - 2.0 * x) * (SQRT_5 * x - 1.0).powi(2)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub r: f64,
    pub w: Complex64,
    /// Implicit-equation defect; only defined on the unit circle.
    pub residual: Option<f64>,
}

fn on_unit_circle(r: f64) -> bool {
    (r - 1.0).abs() <= f64::EPSILON
}

fn distance_to_pole_angle(t: f64) -> f64 {
    (t.rem_euclid(2.0 * PI) - PI).abs()
}

/// One point `p(r e^{it})` of the image curve.
pub fn curve_point(r: f64, t: f64) -> Result<CurvePoint> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidArgument(format!("radius {r} outside (0, 1]")));
    }
    if on_unit_circle(r) {
        if distance_to_pole_angle(t) < POLE_ARC_HALF_WIDTH {
            return Err(Error::PoleProximity(t));
        }
        let w = ptilde_on_circle(t);
        return Ok(CurvePoint {
            t,
            r: 1.0,
            w,
            residual: Some(trisectrix_residual(w)),
        });
    }
    Ok(CurvePoint {
        t,
        r,
        w: ptilde(Complex64::from_polar(r, t)),
        residual: None,
    })
}

/// `count` equally spaced angles `t_k = 2πk / count`; on the unit circle the
/// angles inside the pole arc are skipped.
pub fn curve_sample(r: f64, count: usize) -> Result<Vec<CurvePoint>> {
    if count < 8 {
        return Err(Error::InvalidArgument(format!("count {count} < 8")));
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let t = 2.0 * PI * k as f64 / count as f64;
        match curve_point(r, t) {
            Ok(p) => out.push(p),
            Err(Error::PoleProximity(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    if p1.re.max(p2.re) < q1.re.min(q2.re)
        || q1.re.max(q2.re) < p1.re.min(p2.re)
        || p1.im.max(p2.im) < q1.im.min(q2.im)
        || q1.im.max(q2.im) < p1.im.min(p2.im)
    {
        return false;
    }
    let d1 = orient(p1, p2, q1);
    let d2 = orient(p1, p2, q2);
    let d3 = orient(q1, q2, p1);
    let d4 = orient(q1, q2, p2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Proper crossing between two non-adjacent edges of the closed polygon
/// through `points`. Touching and collinear overlaps do not count.
pub fn has_self_intersection(points: &[Complex64]) -> bool {
    let m = points.len();
    if m < 4 {
        return false;
    }
    let edge = |i: usize| (points[i], points[(i + 1) % m]);
    for i in 0..m {
        let (a, b) = edge(i);
        for j in (i + 2)..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (c, d) = edge(j);
            if segments_cross(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

/// Whether the image of `|z| = r` (`0 < r < 1`) is free of self-crossings,
/// checked on `count` samples.
pub fn is_loop_free(r: f64, count: usize) -> Result<bool> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "loop check needs a bounded curve, 0 < r < 1 (got {r})"
        )));
    }
    let pts: Vec<Complex64> = curve_sample(r, count)?.into_iter().map(|p| p.w).collect();
    Ok(!has_self_intersection(&pts))
}

/// Minimum of `Re p(r e^{it})` over `grid` equally spaced angles.
pub fn min_real_part(r: f64, grid: usize) -> Result<f64> {
    if !(r > 0.0 && r <= 0.999) {
        return Err(Error::InvalidArgument(format!(
            "radius {r} outside (0, 0.999]"
        )));
    }
    if grid == 0 {
        return Err(Error::InvalidArgument("empty angle grid".into()));
    }
    Ok((0..grid)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / grid as f64;
            ptilde(Complex64::from_polar(r, t)).re
        })
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_their_definitions() {
        let k = ShellConstants::new();
        assert_eq!(k.tau, TAU);
        assert_eq!(k.r0, R0);
        assert_eq!(k.beta, BETA);
        assert_eq!(5f64.sqrt(), SQRT_5);
        assert!((TAU * TAU - (1.0 + TAU)).abs() < 1e-15);
        assert!((TAU + 0.618).abs() < 1e-3);
        assert!((R0 - 0.38).abs() < 1e-2);
        assert!((BETA - 0.2236).abs() < 1e-4);
    }

    #[test]
    fn golden_section_of_abs_tau() {
        let a = TAU.abs();
        assert!((1.0 / a - a / (1.0 - a)).abs() < 1e-14);
    }

    #[test]
    fn fibonacci_examples() {
        assert_eq!(fibonacci_u(0), Ok(0));
        assert_eq!(fibonacci_u(1), Ok(1));
        assert_eq!(fibonacci_u(10), Ok(55));
        assert_eq!(fibonacci_u(90), Ok(2_880_067_194_370_816_120));
        assert_eq!(fibonacci_u(91), Err(Error::OverflowGuard(91)));
    }

    #[test]
    fn printed_closed_form_is_not_fibonacci() {
        // ((1-τ)^n - τ)/√5 at n = 2 is about 1.447, the recurrence gives 1.
        let printed = ((1.0 - TAU).powi(2) - TAU) / SQRT_5;
        assert!((printed - 1.447).abs() < 1e-3);
        assert_eq!(fibonacci_binet(2).round() as u64, 1);
    }

    #[test]
    fn tau_power_examples() {
        assert_eq!(tau_power_decompose(1), Ok((1, 0)));
        assert_eq!(tau_power_decompose(2), Ok((1, 1)));
        assert_eq!(tau_power_decompose(6), Ok((8, 5)));
        assert!(tau_power_decompose(0).is_err());
        for n in 1..=30 {
            let (un, prev) = tau_power_decompose(n).unwrap();
            assert!(tau_power_defect(n, un, prev) < 1e-9);
        }
    }

    #[test]
    fn generator_coefficients() {
        let p = ptilde_coeffs(8).unwrap();
        let t = TAU;
        assert_eq!(p.coeff(0).re, 1.0);
        let pow = |n: usize| (0..n).fold(1.0, |p, _| p * t);
        for (k, m) in [(1, 1.0), (2, 3.0), (3, 4.0), (4, 7.0), (5, 11.0), (8, 47.0)] {
            assert_eq!(p.coeff(k).re, m * pow(k), "k={k}");
        }
        assert!(matches!(ptilde_coeffs(65), Err(Error::OrderTooLarge(65))));
    }

    #[test]
    fn derivative_at_origin_is_tau() {
        let d = ptilde_coeffs(10).unwrap().differentiate();
        assert_eq!(d.evaluate(Complex64::new(0.0, 0.0)).re, TAU);
    }

    #[test]
    fn closed_form_special_values() {
        assert_eq!(ptilde(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        let z = Complex64::new(-1.0 / (2.0 * TAU), 0.0);
        assert!((ptilde(z) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn truncation_matches_closed_form_inside_disk() {
        let p = ptilde_coeffs(40).unwrap();
        let z = Complex64::new(0.1, 0.0);
        assert!((p.evaluate(z) - ptilde(z)).norm() < 1e-10);
    }

    #[test]
    fn stable_circle_form_agrees_with_rational_form() {
        for k in 0..64 {
            let t = 0.05 + k as f64 * 0.09;
            if distance_to_pole_angle(t) < 0.3 {
                continue;
            }
            let a = ptilde_on_circle(t);
            let b = ptilde(Complex64::from_polar(1.0, t));
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0), "t={t}");
        }
    }

    #[test]
    fn pole_arc_is_rejected() {
        assert!(matches!(curve_point(1.0, PI), Err(Error::PoleProximity(_))));
        assert!(matches!(
            curve_point(1.0, PI + 5e-4),
            Err(Error::PoleProximity(_))
        ));
        assert!(matches!(
            curve_point(1.0, -PI),
            Err(Error::PoleProximity(_))
        ));
        assert!(curve_point(1.0, PI + 2e-3).is_ok());
        assert!(curve_point(0.9, PI).is_ok());
    }

    #[test]
    fn unit_circle_at_zero_angle() {
        let p = curve_point(1.0, 0.0).unwrap();
        let t = TAU;
        let want = (1.0 + t * t) / (1.0 - t - t * t);
        assert!((p.w.re - want).abs() < 1e-14);
        assert!(p.w.im.abs() < 1e-15);
        assert!(p.residual.unwrap() < 1e-8);
    }

    #[test]
    fn tiny_radius_collapses_to_one() {
        for p in curve_sample(1e-9, 64).unwrap() {
            assert!((p.w - 1.0).norm() < 1e-8);
            assert!(p.residual.is_none());
        }
    }

    #[test]
    fn sample_count_guard() {
        assert!(curve_sample(0.5, 7).is_err());
        assert!(curve_sample(0.0, 16).is_err());
        assert!(curve_sample(1.5, 16).is_err());
    }

    #[test]
    fn loop_detection_on_known_shapes() {
        let square = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 1.0),
        ];
        assert!(!has_self_intersection(&square));
        let bowtie = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        assert!(has_self_intersection(&bowtie));
    }

    #[test]
    fn min_real_part_examples() {
        assert!(min_real_part(0.1, 4096).unwrap() > 0.9);
        assert!(min_real_part(0.9, 4096).unwrap() > BETA);
        assert!(min_real_part(0.999, 4096).unwrap() >= BETA - 1e-3);
        assert!(min_real_part(1.0, 16).is_err());
    }
}
