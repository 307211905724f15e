//! Deterministic Whitted-style ray tracer for spheres and planes, with
//! elliptic-path animation, 24-bit TGA output, a CPU-time benchmark harness
//! and an object-oriented metrics calculator.

pub mod animation;
pub mod bench;
pub mod geometry;
pub mod image;
pub mod metrics;
pub mod renderer;
pub mod scene;
pub mod vecmath;

pub use geometry::{HitRecord, MaterialId, Plane, Shape, Sphere};
pub use image::TgaImage;
pub use renderer::{ray_trace, render_image, RenderSettings};
pub use scene::{parse_scene, Scene};
pub use vecmath::{Ray, RgbColor, Vec3};
