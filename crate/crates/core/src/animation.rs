//! Moves path-attached objects around their ellipses and renders one frame
//! per step.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::image::ImageError;
use crate::renderer::{render_image, RenderSettings};
use crate::scene::{EllipticPath, Scene};
use crate::vecmath::Vec3;

#[derive(Debug, Error)]
pub enum AnimationError {
    #[error("nothing to animate")]
    NothingToAnimate,
    #[error("mismatched step counts")]
    MismatchedSteps,
    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: ImageError },
}

/// Point `k` of the `N` evenly spaced angles around the ellipse.
pub fn path_position(path: &EllipticPath, k: u64) -> Vec3 {
    let theta = TAU * (k % path.steps as u64) as f64 / path.steps as f64;
    path.center + path.axis_u * (path.semi_a * theta.cos()) + path.axis_v * (path.semi_b * theta.sin())
}

/// Shared step count of all paths in the scene.
pub fn frame_count(scene: &Scene) -> Result<u32, AnimationError> {
    let first = scene.paths.first().ok_or(AnimationError::NothingToAnimate)?;
    if scene.paths.iter().any(|p| p.steps != first.steps) {
        return Err(AnimationError::MismatchedSteps);
    }
    Ok(first.steps)
}

/// Moves every path target of `scene` to its position at step `k`.
pub fn position_targets(scene: &mut Scene, k: u64) {
    let moves: Vec<_> = scene.paths.iter().map(|p| (p.target, path_position(p, k))).collect();
    for (target, pos) in moves {
        if let Some(obj) = scene.object_mut(target) {
            obj.shape_mut().set_position(pos);
        }
    }
}

/// Copies of `scene` with the targets placed for each step, in order.
/// The input scene is left untouched.
pub fn frames(scene: &Scene) -> Result<impl Iterator<Item = (usize, Scene)> + '_, AnimationError> {
    let n = frame_count(scene)?;
    Ok((0..n as usize).map(move |k| {
        let mut frame = scene.clone();
        position_targets(&mut frame, k as u64);
        (k, frame)
    }))
}

pub fn frame_file_name(k: usize) -> String {
    format!("frame_{k:05}.tga")
}

/// Renders every frame into `output_dir` and returns the written paths.
pub fn render_animation(scene: &Scene, settings: &RenderSettings, output_dir: &Path) -> Result<Vec<PathBuf>, AnimationError> {
    let mut written = Vec::new();
    for (k, frame) in frames(scene)? {
        let image = render_image(&frame, settings);
        let path = output_dir.join(frame_file_name(k));
        image
            .write_to(&path)
            .map_err(|source| AnimationError::Write { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}
