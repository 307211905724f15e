//! Geometric and radiometric primitives.
//!
//! Everything is double precision. Directions carried by [`Ray`] are kept at
//! unit length; [`RgbColor`] stores linear, unclamped intensities.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("degenerate vector")]
pub struct DegenerateVector;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn length_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn length(self) -> f64 {
        self.length_squared().sqrt()
    }

    /// Unit vector in the direction of `self`.
    pub fn normalize(self) -> Result<Vec3, DegenerateVector> {
        let len = self.length();
        if len > 0.0 && len.is_finite() {
            Ok(self / len)
        } else {
            Err(DegenerateVector)
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a.dot(b)
}

pub fn normalize(v: Vec3) -> Result<Vec3, DegenerateVector> {
    v.normalize()
}

/// Mirror `d` about the surface with normal `n`: `d - 2(d·n)n`.
pub fn reflect(d: Vec3, n: Vec3) -> Vec3 {
    d - n * (2.0 * d.dot(n))
}

/// Snell's-law transmission of `d` through a surface with normal `n` facing
/// the incoming ray, where `eta` is the ratio of refractive indices n₁/n₂.
///
/// Returns `None` on total internal reflection.
pub fn refract(d: Vec3, n: Vec3, eta: f64) -> Option<Vec3> {
    let cos_i = -d.dot(n);
    let sin2_t = eta * eta * (1.0 - cos_i * cos_i);
    if sin2_t > 1.0 {
        return None;
    }
    let cos_t = (1.0 - sin2_t).sqrt();
    Some(d * eta + n * (eta * cos_i - cos_t))
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Half-line `origin + t * direction`; `direction` is always unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    direction: Vec3,
}

impl Ray {
    /// Builds a ray, normalizing `direction`.
    pub fn new(origin: Vec3, direction: Vec3) -> Result<Ray, DegenerateVector> {
        Ok(Ray {
            origin,
            direction: direction.normalize()?,
        })
    }

    /// Caller guarantees `direction` is already unit length.
    pub(crate) fn from_unit(origin: Vec3, direction: Vec3) -> Ray {
        debug_assert!((direction.length() - 1.0).abs() < 1e-9);
        Ray { origin, direction }
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RgbColor {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl RgbColor {
    pub const BLACK: RgbColor = RgbColor::new(0.0, 0.0, 0.0);
    pub const WHITE: RgbColor = RgbColor::new(1.0, 1.0, 1.0);

    pub const fn new(r: f64, g: f64, b: f64) -> Self {
        Self { r, g, b }
    }

    pub fn is_non_negative(self) -> bool {
        self.r >= 0.0 && self.g >= 0.0 && self.b >= 0.0
    }

    /// Clamp each channel to [0, 1] and round to the nearest 8-bit level.
    pub fn quantize(self) -> [u8; 3] {
        [quantize_channel(self.r), quantize_channel(self.g), quantize_channel(self.b)]
    }
}

fn quantize_channel(c: f64) -> u8 {
    // NaN clamps to 0
    let c = if c.is_nan() { 0.0 } else { c.clamp(0.0, 1.0) };
    (c * 255.0 + 0.5).floor() as u8
}

impl Add for RgbColor {
    type Output = RgbColor;
    fn add(self, o: RgbColor) -> RgbColor {
        RgbColor::new(self.r + o.r, self.g + o.g, self.b + o.b)
    }
}

impl AddAssign for RgbColor {
    fn add_assign(&mut self, o: RgbColor) {
        *self = *self + o;
    }
}

/// Channel-wise product (filtering one color by another).
impl Mul for RgbColor {
    type Output = RgbColor;
    fn mul(self, o: RgbColor) -> RgbColor {
        RgbColor::new(self.r * o.r, self.g * o.g, self.b * o.b)
    }
}

impl Mul<f64> for RgbColor {
    type Output = RgbColor;
    fn mul(self, s: f64) -> RgbColor {
        RgbColor::new(self.r * s, self.g * s, self.b * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).length() <= tol
    }

    fn unit_vec() -> impl Strategy<Value = Vec3> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("non-degenerate", |(x, y, z)| x * x + y * y + z * z > 1e-4)
            .prop_map(|(x, y, z)| Vec3::new(x, y, z).normalize().unwrap())
    }

    /// (d, n) with d·n < 0, both unit.
    fn incident_pair() -> impl Strategy<Value = (Vec3, Vec3)> {
        (unit_vec(), unit_vec())
            .prop_filter("facing", |(d, n)| d.dot(*n) < -1e-6)
    }

    #[test]
    fn normalize_scales_axis_vector() {
        assert_eq!(normalize(Vec3::new(3.0, 0.0, 0.0)).unwrap(), Vec3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn normalize_rejects_zero() {
        let err = normalize(Vec3::ZERO).unwrap_err();
        assert_eq!(err.to_string(), "degenerate vector");
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)), 0.0);
        assert_eq!(dot(Vec3::new(1.0, 2.0, 3.0), Vec3::new(1.0, 2.0, 3.0)), 14.0);
    }

    #[test]
    fn reflect_head_on() {
        let r = reflect(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(r, Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn reflect_mirror_symmetry() {
        let d = Vec3::new(SQRT_HALF, -SQRT_HALF, 0.0);
        let r = reflect(d, Vec3::new(0.0, 1.0, 0.0));
        assert!(close(r, Vec3::new(SQRT_HALF, SQRT_HALF, 0.0), 1e-15));
    }

    #[test]
    fn refract_identical_media_and_normal_incidence() {
        let n = Vec3::new(0.0, 1.0, 0.0);
        let d = Vec3::new(0.6, -0.8, 0.0);
        assert!(close(refract(d, n, 1.0).unwrap(), d, 1e-15));
        for eta in [0.5, 1.0, 1.5, 2.4] {
            assert!(close(refract(-n, n, eta).unwrap(), -n, 1e-15));
        }
    }

    #[test]
    fn refract_sixty_degrees_glass_to_air_is_tir() {
        // sin²θt = 1.5² · sin²60° = 2.25 · 0.75 = 1.6875 > 1
        let theta = 60f64.to_radians();
        let n = Vec3::new(0.0, 1.0, 0.0);
        let d = Vec3::new(theta.sin(), -theta.cos(), 0.0);
        let sin2_t = 1.5f64.powi(2) * (1.0 - d.dot(n).powi(2));
        assert!(sin2_t > 1.0);
        assert_eq!(refract(d, n, 1.5), None);
    }

    #[test]
    fn quantize_rounds_and_clamps() {
        assert_eq!(RgbColor::new(1.0, 0.0, 0.5).quantize(), [255, 0, 128]);
        assert_eq!(RgbColor::new(7.0, -2.0, f64::NAN).quantize(), [255, 0, 0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn normalize_gives_unit_length(
            dir in unit_vec(),
            mag in 1e-3..1e3f64,
        ) {
            let v = dir * mag;
            let n = normalize(v).unwrap();
            prop_assert!((n.length() - 1.0).abs() <= 1e-12);
            prop_assert!(close(n * v.length(), v, 1e-9 * mag.max(1.0)));
        }

        #[test]
        fn dot_commutes(a in unit_vec(), b in unit_vec(), s in 0.1..10.0f64) {
            prop_assert_eq!(dot(a * s, b), dot(b, a * s));
        }

        #[test]
        fn reflect_preserves_angle_and_is_involution((d, n) in incident_pair()) {
            let r = reflect(d, n);
            prop_assert!((r.length() - 1.0).abs() <= 1e-9);
            prop_assert!((r.dot(n) - (-d).dot(n)).abs() <= 1e-9);
            prop_assert!(close(reflect(r, n), d, 1e-9));
        }

        #[test]
        fn refract_unit_snell_and_no_tir_when_denser((d, n) in incident_pair(), eta in 0.2..1.0f64) {
            let t = refract(d, n, eta).expect("eta < 1 never reflects totally");
            prop_assert!((t.length() - 1.0).abs() <= 1e-9);
            let sin_i = d.cross(n).length();
            let sin_t = t.cross(n).length();
            prop_assert!((eta * sin_i - sin_t).abs() <= 1e-9);
        }
    }
}
