//! Scene data model and the line-oriented scene file format.
//!
//! ```text
//! # comment
//! material <id> ar ag ab  dr dg db  sr sg sb  shininess kr kt ior
//! camera ex ey ez  lx ly lz  ux uy uz  fov width height
//! background r g b
//! maxdepth d
//! light x y z  r g b
//! sphere <material-id> cx cy cz radius
//! plane <material-id> px py pz  nx ny nz
//! path <object-id> cx cy cz  ux uy uz  vx vy vz  a b steps
//! ```
//!
//! Objects get ids `o1`, `o2`, ... in declaration order, spheres and planes
//! sharing one sequence. Materials may be referenced before they are defined;
//! references are resolved once the whole file has been read.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{MaterialId, Plane, Shape, Sphere};
use crate::vecmath::{RgbColor, Vec3};

pub const DEFAULT_MAX_DEPTH: u32 = 5;

/// Largest image side representable in a TGA header.
pub const MAX_IMAGE_SIDE: u32 = u16::MAX as u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SceneError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Validation(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> SceneError {
    SceneError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub ambient: RgbColor,
    pub diffuse: RgbColor,
    pub specular: RgbColor,
    pub shininess: f64,
    pub reflectivity: f64,
    pub transparency: f64,
    pub ior: f64,
}

impl Material {
    /// Flat-shaded, non-reflective, opaque material.
    pub fn matte(ambient: RgbColor, diffuse: RgbColor) -> Material {
        Material {
            ambient,
            diffuse,
            specular: RgbColor::BLACK,
            shininess: 1.0,
            reflectivity: 0.0,
            transparency: 0.0,
            ior: 1.0,
        }
    }

    fn check(&self) -> Result<(), String> {
        for (name, c) in [("ambient", self.ambient), ("diffuse", self.diffuse), ("specular", self.specular)] {
            if !c.is_non_negative() {
                return Err(format!("{name} color must be non-negative"));
            }
        }
        if self.shininess < 1.0 {
            return Err("shininess must be >= 1".into());
        }
        for (name, k) in [("reflectivity", self.reflectivity), ("transparency", self.transparency)] {
            if !(0.0..=1.0).contains(&k) {
                return Err(format!("{name} must lie in [0, 1]"));
            }
        }
        if self.reflectivity + self.transparency > 1.0 {
            return Err("reflectivity + transparency must not exceed 1".into());
        }
        if self.ior <= 0.0 {
            return Err("index of refraction must be positive".into());
        }
        Ok(())
    }
}

/// Materials in declaration order, addressed by [`MaterialId`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaterialTable {
    entries: Vec<(String, Material)>,
}

impl MaterialTable {
    pub fn insert(&mut self, name: &str, material: Material) -> Result<MaterialId, SceneError> {
        if self.lookup(name).is_some() {
            return Err(SceneError::Validation(format!("duplicate material `{name}`")));
        }
        self.entries.push((name.to_owned(), material));
        Ok(MaterialId(self.entries.len() - 1))
    }

    pub fn lookup(&self, name: &str) -> Option<MaterialId> {
        self.entries.iter().position(|(n, _)| n == name).map(MaterialId)
    }

    pub fn get(&self, id: MaterialId) -> &Material {
        &self.entries[id.0].1
    }

    pub fn name(&self, id: MaterialId) -> &str {
        &self.entries[id.0].0
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Material)> {
        self.entries.iter().map(|(n, m)| (n.as_str(), m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Light {
    pub position: Vec3,
    pub color: RgbColor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub eye: Vec3,
    pub look_at: Vec3,
    pub up: Vec3,
    /// Degrees.
    pub vertical_fov: f64,
    pub width: u32,
    pub height: u32,
}

impl Camera {
    pub fn new(eye: Vec3, look_at: Vec3, up: Vec3, vertical_fov: f64, width: u32, height: u32) -> Result<Camera, String> {
        let forward = (look_at - eye).normalize().map_err(|_| "camera eye and look-at coincide".to_string())?;
        let up = up.normalize().map_err(|_| "camera up vector is zero".to_string())?;
        if forward.cross(up).length() < 1e-9 {
            return Err("camera up vector is parallel to the view direction".into());
        }
        if !(vertical_fov > 0.0 && vertical_fov < 180.0) {
            return Err("field of view must lie in (0, 180) degrees".into());
        }
        check_size(width, height)?;
        Ok(Camera {
            eye,
            look_at,
            up,
            vertical_fov,
            width,
            height,
        })
    }

    /// Same view with a different image size.
    pub fn with_size(self, width: u32, height: u32) -> Result<Camera, String> {
        check_size(width, height)?;
        Ok(Camera { width, height, ..self })
    }
}

fn check_size(width: u32, height: u32) -> Result<(), String> {
    if width == 0 || height == 0 || width > MAX_IMAGE_SIDE || height > MAX_IMAGE_SIDE {
        return Err(format!("image size must be between 1 and {MAX_IMAGE_SIDE} pixels per side"));
    }
    Ok(())
}

/// Position of an object in declaration order; written as `o1`, `o2`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ObjectId(pub usize);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0 + 1)
    }
}

impl ObjectId {
    pub fn parse(s: &str) -> Option<ObjectId> {
        let n: usize = s.strip_prefix('o')?.parse().ok()?;
        (n >= 1 && !s[1..].starts_with('+')).then(|| ObjectId(n - 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPath {
    pub target: ObjectId,
    pub center: Vec3,
    pub axis_u: Vec3,
    pub axis_v: Vec3,
    pub semi_a: f64,
    pub semi_b: f64,
    pub steps: u32,
}

impl EllipticPath {
    /// Normalizes `axis_u` and makes `axis_v` an orthonormal partner for it.
    pub fn new(
        target: ObjectId,
        center: Vec3,
        axis_u: Vec3,
        axis_v: Vec3,
        semi_a: f64,
        semi_b: f64,
        steps: u32,
    ) -> Result<EllipticPath, String> {
        let u = axis_u.normalize().map_err(|_| "path axis u is zero".to_string())?;
        let v = axis_v.normalize().map_err(|_| "path axis v is zero".to_string())?;
        if u.dot(v).abs() > 0.99 {
            return Err("path axes are nearly parallel".into());
        }
        let v = (v - u * u.dot(v)).normalize().map_err(|_| "path axes are nearly parallel".to_string())?;
        if !(semi_a > 0.0 && semi_b > 0.0) {
            return Err("path semi-axes must be positive".into());
        }
        if steps == 0 {
            return Err("path step count must be positive".into());
        }
        Ok(EllipticPath {
            target,
            center,
            axis_u: u,
            axis_v: v,
            semi_a,
            semi_b,
            steps,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SceneObject {
    Sphere(Sphere),
    Plane(Plane),
}

impl SceneObject {
    pub fn shape(&self) -> &dyn Shape {
        match self {
            SceneObject::Sphere(s) => s,
            SceneObject::Plane(p) => p,
        }
    }

    pub fn shape_mut(&mut self) -> &mut dyn Shape {
        match self {
            SceneObject::Sphere(s) => s,
            SceneObject::Plane(p) => p,
        }
    }

    pub fn material_id(&self) -> MaterialId {
        match self {
            SceneObject::Sphere(s) => s.material_id,
            SceneObject::Plane(p) => p.material_id,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub objects: Vec<SceneObject>,
    pub lights: Vec<Light>,
    pub materials: MaterialTable,
    pub paths: Vec<EllipticPath>,
    pub camera: Camera,
    pub background: RgbColor,
    pub max_depth: u32,
}

impl Scene {
    pub fn new(camera: Camera) -> Scene {
        Scene {
            objects: Vec::new(),
            lights: Vec::new(),
            materials: MaterialTable::default(),
            paths: Vec::new(),
            camera,
            background: RgbColor::BLACK,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn spheres(&self) -> impl Iterator<Item = &Sphere> {
        self.objects.iter().filter_map(|o| match o {
            SceneObject::Sphere(s) => Some(s),
            SceneObject::Plane(_) => None,
        })
    }

    pub fn planes(&self) -> impl Iterator<Item = &Plane> {
        self.objects.iter().filter_map(|o| match o {
            SceneObject::Plane(p) => Some(p),
            SceneObject::Sphere(_) => None,
        })
    }

    /// Objects in declaration order, viewed through the `Shape` trait.
    pub fn shapes(&self) -> Vec<&dyn Shape> {
        self.objects.iter().map(SceneObject::shape).collect()
    }

    pub fn object_mut(&mut self, id: ObjectId) -> Option<&mut SceneObject> {
        self.objects.get_mut(id.0)
    }

    fn validate(&self) -> Result<(), SceneError> {
        for obj in &self.objects {
            if obj.material_id().0 >= self.materials.len() {
                return Err(SceneError::Validation(format!("object references unknown material #{}", obj.material_id().0)));
            }
        }
        for path in &self.paths {
            if path.target.0 >= self.objects.len() {
                return Err(SceneError::Validation(format!("path targets unknown object `{}`", path.target)));
            }
        }
        if self.lights.iter().any(|l| !l.color.is_non_negative()) {
            return Err(SceneError::Validation("light colors must be non-negative".into()));
        }
        Ok(())
    }
}

pub fn scene_object_count(scene: &Scene) -> usize {
    scene.object_count()
}

/// Writes the scene back out in the file format accepted by [`parse_scene`].
impl fmt::Display for Scene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |v: Vec3| format!("{} {} {}", v.x, v.y, v.z);
        let c = |c: RgbColor| format!("{} {} {}", c.r, c.g, c.b);
        for (name, m) in self.materials.iter() {
            writeln!(
                f,
                "material {name} {} {} {} {} {} {} {}",
                c(m.ambient),
                c(m.diffuse),
                c(m.specular),
                m.shininess,
                m.reflectivity,
                m.transparency,
                m.ior
            )?;
        }
        let cam = &self.camera;
        writeln!(
            f,
            "camera {} {} {} {} {} {}",
            v(cam.eye),
            v(cam.look_at),
            v(cam.up),
            cam.vertical_fov,
            cam.width,
            cam.height
        )?;
        writeln!(f, "background {}", c(self.background))?;
        writeln!(f, "maxdepth {}", self.max_depth)?;
        for l in &self.lights {
            writeln!(f, "light {} {}", v(l.position), c(l.color))?;
        }
        for obj in &self.objects {
            let mat = self.materials.name(obj.material_id());
            match obj {
                SceneObject::Sphere(s) => writeln!(f, "sphere {mat} {} {}", v(s.center), s.radius())?,
                SceneObject::Plane(p) => writeln!(f, "plane {mat} {} {}", v(p.point), v(p.normal()))?,
            }
        }
        for p in &self.paths {
            writeln!(
                f,
                "path {} {} {} {} {} {} {}",
                p.target,
                v(p.center),
                v(p.axis_u),
                v(p.axis_v),
                p.semi_a,
                p.semi_b,
                p.steps
            )?;
        }
        Ok(())
    }
}

struct Args<'a> {
    line: usize,
    keyword: &'a str,
    rest: Vec<&'a str>,
    pos: usize,
}

impl<'a> Args<'a> {
    fn expect_arity(&self, n: usize) -> Result<(), SceneError> {
        if self.rest.len() != n {
            return Err(parse_err(
                self.line,
                format!("`{}` expects {n} arguments, found {}", self.keyword, self.rest.len()),
            ));
        }
        Ok(())
    }

    fn word(&mut self) -> &'a str {
        let w = self.rest[self.pos];
        self.pos += 1;
        w
    }

    fn real(&mut self) -> Result<f64, SceneError> {
        let w = self.word();
        match w.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(parse_err(self.line, format!("expected a finite number, found `{w}`"))),
        }
    }

    fn count(&mut self) -> Result<u32, SceneError> {
        let w = self.word();
        w.parse::<u32>()
            .map_err(|_| parse_err(self.line, format!("expected a non-negative integer, found `{w}`")))
    }

    fn vec3(&mut self) -> Result<Vec3, SceneError> {
        Ok(Vec3::new(self.real()?, self.real()?, self.real()?))
    }

    fn color(&mut self) -> Result<RgbColor, SceneError> {
        Ok(RgbColor::new(self.real()?, self.real()?, self.real()?))
    }

    fn err(&self, message: impl Into<String>) -> SceneError {
        parse_err(self.line, message)
    }
}

enum PendingObject<'a> {
    Sphere { material: &'a str, center: Vec3, radius: f64, line: usize },
    Plane { material: &'a str, point: Vec3, normal: Vec3, line: usize },
}

/// Parses and validates a scene file.
pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let mut materials = MaterialTable::default();
    let mut camera = None;
    let mut background = RgbColor::BLACK;
    let mut max_depth = DEFAULT_MAX_DEPTH;
    let mut lights = Vec::new();
    let mut pending = Vec::new();
    let mut paths = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(keyword) = words.next() else { continue };
        let mut args = Args {
            line,
            keyword,
            rest: words.collect(),
            pos: 0,
        };
        match keyword {
            "material" => {
                args.expect_arity(14)?;
                let name = args.word();
                let m = Material {
                    ambient: args.color()?,
                    diffuse: args.color()?,
                    specular: args.color()?,
                    shininess: args.real()?,
                    reflectivity: args.real()?,
                    transparency: args.real()?,
                    ior: args.real()?,
                };
                m.check().map_err(|e| args.err(format!("material `{name}`: {e}")))?;
                materials.insert(name, m)?;
            }
            "camera" => {
                args.expect_arity(12)?;
                if camera.is_some() {
                    return Err(args.err("camera declared more than once"));
                }
                let (eye, look_at, up, fov) = (args.vec3()?, args.vec3()?, args.vec3()?, args.real()?);
                let (w, h) = (args.count()?, args.count()?);
                camera = Some(Camera::new(eye, look_at, up, fov, w, h).map_err(|e| args.err(e))?);
            }
            "background" => {
                args.expect_arity(3)?;
                background = args.color()?;
                if !background.is_non_negative() {
                    return Err(args.err("background color must be non-negative"));
                }
            }
            "maxdepth" => {
                args.expect_arity(1)?;
                max_depth = args.count()?;
            }
            "light" => {
                args.expect_arity(6)?;
                let light = Light {
                    position: args.vec3()?,
                    color: args.color()?,
                };
                if !light.color.is_non_negative() {
                    return Err(args.err("light color must be non-negative"));
                }
                lights.push(light);
            }
            "sphere" => {
                args.expect_arity(5)?;
                let material = args.word();
                let center = args.vec3()?;
                let radius = args.real()?;
                if radius <= 0.0 {
                    return Err(args.err("sphere radius must be positive"));
                }
                pending.push(PendingObject::Sphere { material, center, radius, line });
            }
            "plane" => {
                args.expect_arity(7)?;
                let material = args.word();
                let point = args.vec3()?;
                let normal = args.vec3()?;
                if normal.normalize().is_err() {
                    return Err(args.err("plane normal is zero"));
                }
                pending.push(PendingObject::Plane { material, point, normal, line });
            }
            "path" => {
                args.expect_arity(13)?;
                let target_word = args.word();
                let target = ObjectId::parse(target_word)
                    .ok_or_else(|| args.err(format!("`{target_word}` is not an object id (expected o1, o2, ...)")))?;
                let (center, u, v) = (args.vec3()?, args.vec3()?, args.vec3()?);
                let (a, b, steps) = (args.real()?, args.real()?, args.count()?);
                paths.push(EllipticPath::new(target, center, u, v, a, b, steps).map_err(|e| args.err(e))?);
            }
            other => return Err(args.err(format!("unknown keyword `{other}`"))),
        }
    }

    let camera = camera.ok_or_else(|| SceneError::Validation("scene declares no camera".into()))?;
    let resolve = |name: &str| {
        materials
            .lookup(name)
            .ok_or_else(|| SceneError::Validation(format!("undefined material `{name}`")))
    };
    let mut objects = Vec::with_capacity(pending.len());
    for p in pending {
        objects.push(match p {
            PendingObject::Sphere { material, center, radius, line } => SceneObject::Sphere(
                Sphere::new(center, radius, resolve(material)?).ok_or_else(|| parse_err(line, "sphere radius must be positive"))?,
            ),
            PendingObject::Plane { material, point, normal, line } => SceneObject::Plane(
                Plane::new(point, normal, resolve(material)?).map_err(|_| parse_err(line, "plane normal is zero"))?,
            ),
        });
    }

    let scene = Scene {
        objects,
        lights,
        materials,
        paths,
        camera,
        background,
        max_depth,
    };
    scene.validate()?;
    Ok(scene)
}

/// Accepts arbitrary bytes; anything that is not UTF-8 is a parse error.
pub fn parse_scene_bytes(bytes: &[u8]) -> Result<Scene, SceneError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_scene(text),
        Err(e) => {
            let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
            Err(parse_err(line, "scene file is not valid UTF-8"))
        }
    }
}

/// Camera used by [`generate_sweep_scene`].
pub fn sweep_camera() -> Camera {
    Camera::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 1.0, 0.0), 60.0, 320, 240)
        .expect("static camera is valid")
}

/// `object_count` randomly placed spheres, all inside the view frustum of
/// [`sweep_camera`], lit by one light. Same seed, same scene.
pub fn generate_sweep_scene(object_count: usize, seed: u64) -> Result<Scene, SceneError> {
    if object_count < 1 {
        return Err(SceneError::Validation("sweep scene needs at least one object".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let camera = sweep_camera();
    let mut scene = Scene::new(camera);
    scene.background = RgbColor::new(0.05, 0.05, 0.1);
    let material = scene
        .materials
        .insert("m1", Material::matte(RgbColor::new(0.1, 0.1, 0.1), RgbColor::new(0.8, 0.3, 0.2)))?;
    scene.lights.push(Light {
        position: Vec3::new(0.0, 10.0, 0.0),
        color: RgbColor::WHITE,
    });

    let half_height = (camera.vertical_fov.to_radians() / 2.0).tan();
    let half_width = half_height * camera.width as f64 / camera.height as f64;
    for _ in 0..object_count {
        let z: f64 = rng.gen_range(5.0..25.0);
        let x = rng.gen_range(-0.9..0.9) * half_width * z;
        let y = rng.gen_range(-0.9..0.9) * half_height * z;
        let r = rng.gen_range(0.2..0.8);
        let sphere = Sphere::new(Vec3::new(x, y, z), r, material).expect("positive radius");
        scene.objects.push(SceneObject::Sphere(sphere));
    }
    Ok(scene)
}
