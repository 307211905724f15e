//! The `Shape` dispatch hierarchy: spheres and planes behind one trait.

use crate::vecmath::{DegenerateVector, Ray, Vec3};

/// Index into a scene's material table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaterialId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitRecord {
    pub t: f64,
    pub point: Vec3,
    /// Unit normal, flipped so that `normal · ray.direction <= 0`.
    pub normal: Vec3,
    /// True when the ray arrives from the side the geometric normal points to
    /// (outside a sphere).
    pub front_face: bool,
    pub material_id: MaterialId,
}

/// Every renderable object exposes exactly these three operations, and all
/// renderer code reaches objects through `&dyn Shape`.
pub trait Shape: Send + Sync {
    fn set_position(&mut self, p: Vec3);

    fn get_position(&self) -> Vec3;

    /// Nearest intersection with `t` in `(t_min, t_max]`.
    fn hit(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<HitRecord>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    radius: f64,
    pub material_id: MaterialId,
}

impl Sphere {
    /// Returns `None` unless `radius` is positive and finite.
    pub fn new(center: Vec3, radius: f64, material_id: MaterialId) -> Option<Sphere> {
        (radius > 0.0 && radius.is_finite()).then_some(Sphere {
            center,
            radius,
            material_id,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Shape for Sphere {
    fn set_position(&mut self, p: Vec3) {
        self.center = p;
    }

    fn get_position(&self) -> Vec3 {
        self.center
    }

    fn hit(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<HitRecord> {
        let d = ray.direction();
        let oc = ray.origin - self.center;
        let a = d.length_squared();
        let half_b = oc.dot(d);
        let c = oc.length_squared() - self.radius * self.radius;
        let disc = half_b * half_b - a * c;
        if disc < 0.0 {
            return None;
        }
        // Avoid cancellation: q = -(b' + sign(b')·√disc), roots q/a and c/q.
        let q = -(half_b + half_b.signum() * disc.sqrt());
        let (mut t0, mut t1) = if q == 0.0 {
            (0.0, 0.0)
        } else {
            (q / a, c / q)
        };
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        let t = if t0 > t_min && t0 <= t_max {
            t0
        } else if t1 > t_min && t1 <= t_max {
            t1
        } else {
            return None;
        };

        let point = ray.at(t);
        let outward = (point - self.center) / self.radius;
        let front_face = outward.dot(d) <= 0.0;
        let normal = if front_face { outward } else { -outward };
        Some(HitRecord {
            t,
            point,
            normal,
            front_face,
            material_id: self.material_id,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub point: Vec3,
    normal: Vec3,
    pub material_id: MaterialId,
}

impl Plane {
    /// `normal` is normalized; a zero normal is rejected.
    pub fn new(point: Vec3, normal: Vec3, material_id: MaterialId) -> Result<Plane, DegenerateVector> {
        Ok(Plane {
            point,
            normal: normal.normalize()?,
            material_id,
        })
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }
}

impl Shape for Plane {
    fn set_position(&mut self, p: Vec3) {
        self.point = p;
    }

    fn get_position(&self) -> Vec3 {
        self.point
    }

    fn hit(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<HitRecord> {
        let denom = ray.direction().dot(self.normal);
        if denom.abs() < 1e-12 {
            return None;
        }
        let t = (self.point - ray.origin).dot(self.normal) / denom;
        if !(t > t_min && t <= t_max) {
            return None;
        }
        let front_face = denom < 0.0;
        Some(HitRecord {
            t,
            point: ray.at(t),
            normal: if front_face { self.normal } else { -self.normal },
            front_face,
            material_id: self.material_id,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const M: MaterialId = MaterialId(0);

    fn ray(o: (f64, f64, f64), d: (f64, f64, f64)) -> Ray {
        Ray::new(Vec3::new(o.0, o.1, o.2), Vec3::new(d.0, d.1, d.2)).unwrap()
    }

    fn sphere(c: (f64, f64, f64), r: f64) -> Sphere {
        Sphere::new(Vec3::new(c.0, c.1, c.2), r, M).unwrap()
    }

    #[test]
    fn set_then_get_position() {
        let mut s = sphere((0.0, 0.0, 5.0), 1.0);
        assert_eq!(s.get_position(), Vec3::new(0.0, 0.0, 5.0));
        s.set_position(Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(s.get_position(), Vec3::new(1.0, 2.0, 3.0));
        s.set_position(Vec3::ZERO);
        s.set_position(Vec3::new(5.0, 5.0, 5.0));
        assert_eq!(s.center, Vec3::new(5.0, 5.0, 5.0));

        let mut p = Plane::new(Vec3::new(0.0, -1.0, 0.0), Vec3::new(0.0, 1.0, 0.0), M).unwrap();
        assert_eq!(p.get_position(), Vec3::new(0.0, -1.0, 0.0));
        let shape: &mut dyn Shape = &mut p;
        shape.set_position(Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(p.point, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn dispatch_pattern_arguments() {
        let mut shapes: Vec<Box<dyn Shape>> = (0..3).map(|_| Box::new(sphere((0.0, 0.0, 0.0), 1.0)) as _).collect();
        for (i, s) in shapes.iter_mut().enumerate() {
            let n = (i + 1) as f64;
            s.set_position(Vec3::new(n, n + 1.0, n + 2.0));
        }
        assert_eq!(shapes[2].get_position(), Vec3::new(3.0, 4.0, 5.0));
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(Sphere::new(Vec3::ZERO, 0.0, M).is_none());
        assert!(Sphere::new(Vec3::ZERO, -1.0, M).is_none());
        assert!(Plane::new(Vec3::ZERO, Vec3::ZERO, M).is_err());
    }

    #[test]
    fn sphere_on_axis_hit_and_miss() {
        let s = sphere((0.0, 0.0, 5.0), 1.0);
        let h = s.hit(&ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)), 0.0, f64::INFINITY).unwrap();
        assert_eq!(h.t, 4.0);
        assert_eq!(h.normal, Vec3::new(0.0, 0.0, -1.0));
        assert!(h.front_face);
        assert!(s.hit(&ray((0.0, 0.0, 0.0), (0.0, 1.0, 0.0)), 0.0, f64::INFINITY).is_none());
    }

    #[test]
    fn sphere_interior_hit_flips_normal() {
        let s = sphere((0.0, 0.0, 0.0), 2.0);
        let h = s.hit(&ray((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)), 1e-4, f64::INFINITY).unwrap();
        assert_eq!(h.t, 2.0);
        assert_eq!(h.normal, Vec3::new(-1.0, 0.0, 0.0));
        assert!(!h.front_face);
    }

    #[test]
    fn sphere_respects_range() {
        let s = sphere((0.0, 0.0, 5.0), 1.0);
        let r = ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0));
        assert!(s.hit(&r, 0.0, 3.9).is_none());
        // t_max is inclusive
        assert_eq!(s.hit(&r, 0.0, 4.0).unwrap().t, 4.0);
        // first root excluded by t_min, second root reported
        assert_eq!(s.hit(&r, 4.0, 10.0).unwrap().t, 6.0);
        assert!(s.hit(&r, 6.0, 10.0).is_none());
    }

    #[test]
    fn plane_axis_aligned() {
        let p = Plane::new(Vec3::new(0.0, 0.0, 5.0), Vec3::new(0.0, 0.0, -1.0), M).unwrap();
        let h = p.hit(&ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)), 0.0, f64::INFINITY).unwrap();
        assert_eq!(h.t, 5.0);
        assert_eq!(h.normal, Vec3::new(0.0, 0.0, -1.0));
        assert!(p.hit(&ray((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)), 0.0, f64::INFINITY).is_none());
        // from behind: normal flipped toward the ray
        let h = p.hit(&ray((0.0, 0.0, 9.0), (0.0, 0.0, -1.0)), 0.0, f64::INFINITY).unwrap();
        assert_eq!(h.normal, Vec3::new(0.0, 0.0, 1.0));
        assert!(!h.front_face);
    }

    #[test]
    fn grazing_ray_is_stable() {
        // Far-away sphere hit almost tangentially; naive formula loses digits here.
        let s = sphere((0.0, 1.0 - 1e-9, 1e6), 1.0);
        let h = s.hit(&ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)), 0.0, f64::INFINITY);
        if let Some(h) = h {
            assert!((h.t - 1e6).abs() < 1e-3);
            let p = h.point - s.center;
            assert!((p.length() - 1.0).abs() < 1e-6);
        }
    }

    fn coord() -> impl Strategy<Value = f64> {
        -5.0..5.0f64
    }

    fn point() -> impl Strategy<Value = Vec3> {
        (coord(), coord(), coord()).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    fn dir() -> impl Strategy<Value = Vec3> {
        point().prop_filter_map("degenerate", |v| v.normalize().ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn hit_record_invariants(c in point(), r in 0.1..3.0f64, o in point(), d in dir(), t_min in 0.0..1.0f64) {
            let s = sphere((c.x, c.y, c.z), r);
            let ray = Ray::new(o, d).unwrap();
            if let Some(h) = s.hit(&ray, t_min, 50.0) {
                prop_assert!(h.t > t_min && h.t <= 50.0);
                prop_assert!((h.point - ray.at(h.t)).length() <= 1e-9);
                prop_assert!((h.normal.length() - 1.0).abs() <= 1e-9);
                prop_assert!(h.normal.dot(ray.direction()) <= 0.0);
            }
        }

        #[test]
        fn sphere_translation_invariance(c in point(), r in 0.1..3.0f64, o in point(), d in dir(), shift in point()) {
            let a = sphere((c.x, c.y, c.z), r).hit(&Ray::new(o, d).unwrap(), 1e-4, 100.0);
            let moved = c + shift;
            let b = sphere((moved.x, moved.y, moved.z), r).hit(&Ray::new(o + shift, d).unwrap(), 1e-4, 100.0);
            match (a, b) {
                (Some(a), Some(b)) => prop_assert!((a.t - b.t).abs() <= 1e-9 * a.t.max(1.0)),
                (None, None) => {}
                // rounding can flip a tangent or boundary case; require it to be one
                (Some(h), None) | (None, Some(h)) => {
                    let line_dist = (o - c).cross(d).length();
                    prop_assert!((line_dist - r).abs() < 1e-6 || (h.t - 1e-4).abs() < 1e-6);
                }
            }
        }
    }
}
