//! CPU-time measurement harness.
//!
//! All timed regions run on the calling thread only and cover rendering or
//! the dispatch loop alone; scene construction, cloning and file output
//! happen outside them. Times are process CPU time (user + system) in
//! milliseconds.

use std::hint::black_box;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::animation::{frame_file_name, frames, AnimationError};
use crate::geometry::{MaterialId, Shape, Sphere};
use crate::image::ImageError;
use crate::renderer::{render_image, render_simplified_image, render_with, RenderSettings};
use crate::scene::{generate_sweep_scene, Scene, SceneError};
use crate::vecmath::Vec3;

pub const DEFAULT_SWEEP_COUNTS: [usize; 8] = [5, 10, 20, 25, 50, 100, 200, 400];
pub const DEFAULT_FRAMES_PER_POINT: usize = 30;
/// 1024 × 768 spheres, one per pixel of a 1024×768 frame.
pub const DEFAULT_MICRO_SPHERES: usize = 1024 * 768;
pub const DEFAULT_MICRO_REPEATS: u64 = 500;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("process CPU time is not available on this platform")]
    CpuTimeUnavailable,
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Animation(#[from] AnimationError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("writing {path}: {source}")]
    Image { path: PathBuf, source: ImageError },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Process CPU time consumed so far, in milliseconds.
#[cfg(unix)]
pub fn cpu_time_now() -> Result<f64, BenchError> {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid, writable timespec for the duration of the call.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return Err(BenchError::CpuTimeUnavailable);
    }
    Ok(ts.tv_sec as f64 * 1e3 + ts.tv_nsec as f64 * 1e-6)
}

#[cfg(not(unix))]
pub fn cpu_time_now() -> Result<f64, BenchError> {
    Err(BenchError::CpuTimeUnavailable)
}

/// CPU milliseconds spent in `f`, and its result.
pub fn time_cpu<T>(f: impl FnOnce() -> T) -> Result<(f64, T), BenchError> {
    let start = cpu_time_now()?;
    let out = f();
    let end = cpu_time_now()?;
    Ok(((end - start).max(0.0), out))
}

/// A CSV-serializable result row with a fixed header.
pub trait ReportRow: Serialize {
    const HEADER: &'static [&'static str];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTiming {
    pub frame_index: usize,
    pub cpu_millis: f64,
}

impl ReportRow for FrameTiming {
    const HEADER: &'static [&'static str] = &["frame_index", "cpu_millis"];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub object_count: usize,
    pub avg_cpu_millis: f64,
}

impl ReportRow for SweepPoint {
    const HEADER: &'static [&'static str] = &["object_count", "avg_cpu_millis"];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroResult {
    pub num_spheres: usize,
    pub repeats: u64,
    /// Number of `set_position` calls actually made.
    pub call_count: u64,
    /// Running accumulator bumped on every call and divided by 100 after
    /// every pass, so its final value depends on the whole loop.
    pub count_accumulator: f64,
    pub cpu_millis: f64,
}

impl ReportRow for MicroResult {
    const HEADER: &'static [&'static str] = &["num_spheres", "repeats", "call_count", "count_accumulator", "cpu_millis"];
}

/// Per-frame render time of an animation; nothing is written to disk.
pub fn time_animation(scene: &Scene, settings: &RenderSettings) -> Result<Vec<FrameTiming>, BenchError> {
    let settings = settings.sequential();
    let mut timings = Vec::new();
    for (k, frame) in frames(scene)? {
        let (cpu_millis, image) = time_cpu(|| render_image(&frame, &settings))?;
        black_box(image);
        timings.push(FrameTiming { frame_index: k, cpu_millis });
    }
    Ok(timings)
}

/// Like [`time_animation`] but also writes each frame to `output_dir`
/// after its timed region has closed. Unlike [`time_animation`] this keeps
/// `settings.parallel`; with parallel rows the reported CPU time is summed
/// over all worker threads.
pub fn time_animation_to_dir(
    scene: &Scene,
    settings: &RenderSettings,
    output_dir: &Path,
) -> Result<(Vec<PathBuf>, Vec<FrameTiming>), BenchError> {
    let mut paths = Vec::new();
    let mut timings = Vec::new();
    for (k, frame) in frames(scene)? {
        let (cpu_millis, image) = time_cpu(|| render_image(&frame, settings))?;
        let path = output_dir.join(frame_file_name(k));
        image
            .write_to(&path)
            .map_err(|source| BenchError::Image { path: path.clone(), source })?;
        paths.push(path);
        timings.push(FrameTiming { frame_index: k, cpu_millis });
    }
    Ok((paths, timings))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub counts: Vec<usize>,
    pub frames_per_point: usize,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            counts: DEFAULT_SWEEP_COUNTS.to_vec(),
            frames_per_point: DEFAULT_FRAMES_PER_POINT,
            seed: 42,
            width: 320,
            height: 240,
        }
    }
}

/// Average flat-scan frame time for each object count. Each scene renders one
/// untimed warm-up frame first.
pub fn sweep_objects(config: &SweepConfig) -> Result<Vec<SweepPoint>, BenchError> {
    if config.counts.is_empty() {
        return Err(BenchError::InvalidArgument("sweep needs at least one object count".into()));
    }
    if let Some(bad) = config.counts.iter().find(|&&c| c < 1) {
        return Err(BenchError::InvalidArgument(format!("object count {bad} must be at least 1")));
    }
    if config.frames_per_point < 1 {
        return Err(BenchError::InvalidArgument("frames per point must be at least 1".into()));
    }
    let mut scenes = Vec::with_capacity(config.counts.len());
    for &count in &config.counts {
        let mut scene = generate_sweep_scene(count, config.seed)?;
        scene.camera = scene
            .camera
            .with_size(config.width, config.height)
            .map_err(BenchError::InvalidArgument)?;
        black_box(render_simplified_image(&scene));
        scenes.push(scene);
    }
    // Frames are timed round-robin over the counts.
    let mut totals = vec![0.0; scenes.len()];
    for _ in 0..config.frames_per_point {
        for (scene, total) in scenes.iter().zip(&mut totals) {
            let (ms, image) = time_cpu(|| render_simplified_image(scene))?;
            black_box(image);
            *total += ms;
        }
    }
    let points = config
        .counts
        .iter()
        .zip(totals)
        .map(|(&object_count, total)| SweepPoint {
            object_count,
            avg_cpu_millis: total / config.frames_per_point as f64,
        })
        .collect();
    Ok(points)
}

/// Calls `set_position` through the `Shape` vtable on every shape, `repeats`
/// times, with arguments `(n, n + 1, n + 2)` for the 1-based index `n`.
///
/// Returns the number of calls made and the final accumulator.
pub fn set_position_loop(shapes: &mut [Box<dyn Shape>], repeats: u64) -> (u64, f64) {
    let mut calls: u64 = 0;
    let mut count: f64 = 0.0;
    for _ in 0..repeats {
        for (i, shape) in shapes.iter_mut().enumerate() {
            count += 1.0;
            calls += 1;
            let n = (i + 1) as f64;
            shape.set_position(Vec3::new(n, n + 1.0, n + 2.0));
        }
        count /= 100.0;
    }
    (calls, count)
}

/// Dynamic-dispatch micro-benchmark over `num_spheres` boxed spheres.
pub fn micro_set_position(num_spheres: usize, repeats: u64) -> Result<MicroResult, BenchError> {
    if num_spheres < 1 || repeats < 1 {
        return Err(BenchError::InvalidArgument("sphere count and repeats must be at least 1".into()));
    }
    let sphere = Sphere::new(Vec3::ZERO, 1.0, MaterialId(0)).expect("unit sphere");
    let mut shapes: Vec<Box<dyn Shape>> = (0..num_spheres).map(|_| Box::new(sphere) as Box<dyn Shape>).collect();
    // Hide the concrete type from the optimizer so calls stay virtual.
    let shapes = black_box(shapes.as_mut_slice());
    let (cpu_millis, (call_count, count_accumulator)) = time_cpu(|| set_position_loop(shapes, repeats))?;
    black_box(&shapes);
    Ok(MicroResult {
        num_spheres,
        repeats,
        call_count,
        count_accumulator,
        cpu_millis,
    })
}

/// How much of a frame's CPU time goes to the recursive tracer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HotspotReport {
    /// Mean CPU time of a full frame.
    pub frame_cpu_millis: f64,
    /// Mean CPU time of the same frame loop with tracing replaced by a
    /// constant (camera rays, quantization, buffer writes).
    pub shell_cpu_millis: f64,
}

impl HotspotReport {
    pub fn tracer_cpu_millis(&self) -> f64 {
        (self.frame_cpu_millis - self.shell_cpu_millis).max(0.0)
    }

    pub fn tracer_fraction(&self) -> f64 {
        if self.frame_cpu_millis <= 0.0 {
            return 0.0;
        }
        self.tracer_cpu_millis() / self.frame_cpu_millis
    }
}

/// Measures the tracer's share of frame time by rendering `frames` full
/// frames and `frames` frames of the identical pixel loop without tracing.
pub fn measure_hotspot(scene: &Scene, settings: &RenderSettings, frames: usize) -> Result<HotspotReport, BenchError> {
    let settings = settings.sequential();
    let frames = frames.max(1);
    let mut full = 0.0;
    let mut shell = 0.0;
    for _ in 0..frames {
        let (ms, image) = time_cpu(|| render_image(scene, &settings))?;
        black_box(image);
        full += ms;
        let (ms, image) = time_cpu(|| render_with(&scene.camera, false, |_| black_box(settings.background)))?;
        black_box(image);
        shell += ms;
    }
    Ok(HotspotReport {
        frame_cpu_millis: full / frames as f64,
        shell_cpu_millis: shell / frames as f64,
    })
}

pub fn write_report_to<T: ReportRow, W: Write>(rows: &[T], writer: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(T::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV file with a header line and one line per row.
pub fn write_report<T: ReportRow>(rows: &[T], path: &Path) -> Result<(), BenchError> {
    let file = std::fs::File::create(path)?;
    write_report_to(rows, std::io::BufWriter::new(file))
}

pub fn read_report<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<Result<Vec<T>, _>>()?;
    Ok(rows)
}
