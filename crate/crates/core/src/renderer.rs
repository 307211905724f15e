//! Whitted-style recursive ray tracing with Phong shading and hard shadows,
//! plus the flat "last hit wins" object scan used by the object-count sweep.

use crate::geometry::{HitRecord, Shape};
use crate::image::TgaImage;
use crate::scene::{Camera, Light, MaterialTable, Scene};
use crate::vecmath::{reflect, refract, Ray, RgbColor, Vec3};

pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSettings {
    pub max_depth: u32,
    /// Offset applied along secondary ray directions to avoid re-hitting
    /// the surface they start on.
    pub epsilon: f64,
    pub background: RgbColor,
    /// Render pixel rows on the rayon pool. Has no effect on output.
    pub parallel: bool,
}

impl RenderSettings {
    /// Depth limit and background taken from the scene file.
    pub fn for_scene(scene: &Scene) -> RenderSettings {
        RenderSettings {
            max_depth: scene.max_depth,
            epsilon: DEFAULT_EPSILON,
            background: scene.background,
            parallel: true,
        }
    }

    pub fn sequential(self) -> RenderSettings {
        RenderSettings { parallel: false, ..self }
    }
}

/// Nearest hit over every object in the scene.
pub fn nearest_hit(scene: &Scene, ray: &Ray, t_min: f64, t_max: f64) -> Option<HitRecord> {
    let mut best: Option<HitRecord> = None;
    let mut limit = t_max;
    for obj in &scene.objects {
        if let Some(h) = obj.shape().hit(ray, t_min, limit) {
            limit = h.t;
            best = Some(h);
        }
    }
    best
}

fn offset_ray(point: Vec3, dir: Vec3, epsilon: f64) -> Ray {
    Ray::from_unit(point + dir * epsilon, dir)
}

/// Color seen along `ray`, following reflection and refraction for up to
/// `depth` more bounces.
pub fn ray_trace(scene: &Scene, settings: &RenderSettings, ray: &Ray, depth: u32) -> RgbColor {
    let Some(hit) = nearest_hit(scene, ray, 0.0, f64::INFINITY) else {
        return settings.background;
    };
    let d = ray.direction();
    let mut color = local_shade(&hit, -d, scene, settings.epsilon);
    if depth == 0 {
        return color;
    }

    let material = scene.materials.get(hit.material_id);
    let mut reflect_weight = material.reflectivity;
    if material.transparency > 0.0 {
        let eta = if hit.front_face { 1.0 / material.ior } else { material.ior };
        match refract(d, hit.normal, eta) {
            Some(t) => {
                let transmitted = ray_trace(scene, settings, &offset_ray(hit.point, t, settings.epsilon), depth - 1);
                color += transmitted * material.transparency;
            }
            // total internal reflection: transmitted energy goes to the mirror term
            None => reflect_weight += material.transparency,
        }
    }
    if reflect_weight > 0.0 {
        let r = reflect(d, hit.normal);
        let reflected = ray_trace(scene, settings, &offset_ray(hit.point, r, settings.epsilon), depth - 1);
        color += reflected * reflect_weight;
    }
    color
}

/// Phong shading at `hit`: ambient plus diffuse and specular terms for every
/// light that is not blocked. `view_dir` points from the surface to the viewer.
pub fn local_shade(hit: &HitRecord, view_dir: Vec3, scene: &Scene, epsilon: f64) -> RgbColor {
    let material = scene.materials.get(hit.material_id);
    let mut color = material.ambient;
    for light in &scene.lights {
        if in_shadow(hit.point, light, scene, epsilon) {
            continue;
        }
        color += light_contribution(hit, view_dir, light, scene);
    }
    color
}

fn light_contribution(hit: &HitRecord, view_dir: Vec3, light: &Light, scene: &Scene) -> RgbColor {
    let material = scene.materials.get(hit.material_id);
    let Ok(l) = (light.position - hit.point).normalize() else {
        return RgbColor::BLACK;
    };
    let n_dot_l = hit.normal.dot(l);
    if n_dot_l <= 0.0 {
        return RgbColor::BLACK;
    }
    let mut c = material.diffuse * light.color * n_dot_l;
    let r_dot_v = reflect(-l, hit.normal).dot(view_dir);
    if r_dot_v > 0.0 {
        c += material.specular * light.color * r_dot_v.powf(material.shininess);
    }
    c
}

/// True when some object sits strictly between `point` and the light.
pub fn in_shadow(point: Vec3, light: &Light, scene: &Scene, epsilon: f64) -> bool {
    let to_light = light.position - point;
    let dist = to_light.length();
    let Ok(l) = to_light.normalize() else {
        return false;
    };
    let ray = offset_ray(point, l, epsilon);
    scene
        .objects
        .iter()
        .any(|obj| obj.shape().hit(&ray, 0.0, dist).is_some_and(|h| h.t < dist))
}

/// Flat-color object scan: every object is tested in order and each hit
/// overwrites the previous one, so the last object hit in declaration order
/// decides the color, not the nearest. `None` when nothing is hit.
pub fn ray_trace_simplified(objects: &[&dyn Shape], materials: &MaterialTable, ray: &Ray) -> Option<RgbColor> {
    let mut object_hit = None;
    for obj in objects {
        if let Some(h) = obj.hit(ray, 0.0, f64::INFINITY) {
            object_hit = Some(h.material_id);
        }
    }
    object_hit.map(|id| materials.get(id).diffuse)
}

/// Orthonormal camera basis and image-plane extents.
#[derive(Debug, Clone, Copy)]
pub struct CameraFrame {
    eye: Vec3,
    forward: Vec3,
    right: Vec3,
    up: Vec3,
    half_width: f64,
    half_height: f64,
    width: usize,
    height: usize,
}

impl CameraFrame {
    pub fn new(camera: &Camera) -> CameraFrame {
        let forward = (camera.look_at - camera.eye).normalize().expect("validated camera");
        let right = forward.cross(camera.up).normalize().expect("validated camera");
        let up = right.cross(forward);
        let half_height = (camera.vertical_fov.to_radians() / 2.0).tan();
        CameraFrame {
            eye: camera.eye,
            forward,
            right,
            up,
            half_width: half_height * camera.width as f64 / camera.height as f64,
            half_height,
            width: camera.width as usize,
            height: camera.height as usize,
        }
    }

    /// Ray through the center of pixel (`col`, `row`), row 0 at the top.
    pub fn primary_ray(&self, col: usize, row: usize) -> Ray {
        let sx = (2.0 * (col as f64 + 0.5) / self.width as f64 - 1.0) * self.half_width;
        let sy = (1.0 - 2.0 * (row as f64 + 0.5) / self.height as f64) * self.half_height;
        let dir = self.forward + self.right * sx + self.up * sy;
        Ray::new(self.eye, dir).expect("image plane sits at distance 1")
    }
}

fn fill_row<F: Fn(&Ray) -> RgbColor>(frame: &CameraFrame, row: usize, out: &mut [[u8; 3]], shade: &F) {
    for (col, px) in out.iter_mut().enumerate() {
        let [r, g, b] = shade(&frame.primary_ray(col, row)).quantize();
        *px = [b, g, r];
    }
}

/// Runs `shade` on the primary ray of every pixel of the camera's image.
pub fn render_with<F>(camera: &Camera, parallel: bool, shade: F) -> TgaImage
where
    F: Fn(&Ray) -> RgbColor + Sync,
{
    let frame = CameraFrame::new(camera);
    let mut image = TgaImage::with_size(frame.width, frame.height).expect("validated camera size");
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        image
            .par_rows_mut()
            .enumerate()
            .for_each(|(row, out)| fill_row(&frame, row, out, &shade));
        return image;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    for (row, out) in image.rows_mut().enumerate() {
        fill_row(&frame, row, out, &shade);
    }
    image
}

pub fn render_image(scene: &Scene, settings: &RenderSettings) -> TgaImage {
    render_with(&scene.camera, settings.parallel, |ray| {
        ray_trace(scene, settings, ray, settings.max_depth)
    })
}

/// One frame colored by [`ray_trace_simplified`]; always single-threaded.
pub fn render_simplified_image(scene: &Scene) -> TgaImage {
    let shapes = scene.shapes();
    render_with(&scene.camera, false, |ray| {
        ray_trace_simplified(&shapes, &scene.materials, ray).unwrap_or(scene.background)
    })
}
