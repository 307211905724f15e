//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The exported functions are thin wrappers over plain Rust functions that
//! return `Result<_, String>`, which are what the native tests exercise.

use wasm_bindgen::prelude::*;

use raybench::animation::{frame_count, position_targets};
use raybench::metrics::{load_model, summarize};
use raybench::renderer::{render_image, RenderSettings};
use raybench::scene::{parse_scene, Scene};

/// Largest side the demo will render.
pub const MAX_SIDE: u32 = 1024;

fn prepare(scene_text: &str, width: u32, height: u32, max_depth: u32) -> Result<(Scene, RenderSettings), String> {
    if width == 0 || height == 0 || width > MAX_SIDE || height > MAX_SIDE {
        return Err(format!("image size must be between 1 and {MAX_SIDE} per side"));
    }
    let mut scene = parse_scene(scene_text).map_err(|e| e.to_string())?;
    scene.camera = scene.camera.with_size(width, height)?;
    scene.max_depth = max_depth;
    let settings = RenderSettings::for_scene(&scene).sequential();
    Ok((scene, settings))
}

/// Renders the scene and returns row-major RGBA bytes, top row first.
pub fn render_rgba(scene_text: &str, width: u32, height: u32, max_depth: u32) -> Result<Vec<u8>, String> {
    let (scene, settings) = prepare(scene_text, width, height, max_depth)?;
    Ok(render_image(&scene, &settings).to_rgba())
}

/// Step count shared by the scene's paths.
pub fn path_steps(scene_text: &str) -> Result<u32, String> {
    let scene = parse_scene(scene_text).map_err(|e| e.to_string())?;
    frame_count(&scene).map_err(|e| e.to_string())
}

/// Renders animation step `step` as RGBA bytes.
pub fn render_step_rgba(scene_text: &str, step: u32, width: u32, height: u32, max_depth: u32) -> Result<Vec<u8>, String> {
    let (mut scene, settings) = prepare(scene_text, width, height, max_depth)?;
    frame_count(&scene).map_err(|e| e.to_string())?;
    position_targets(&mut scene, step as u64);
    Ok(render_image(&scene, &settings).to_rgba())
}

/// Metrics table for a class model, as printed by the command-line tool.
pub fn metrics_text(model_text: &str) -> Result<String, String> {
    let model = load_model(model_text).map_err(|e| e.to_string())?;
    Ok(summarize(&model).to_string())
}

fn js(r: Result<impl Into<JsValue>, String>) -> Result<JsValue, JsError> {
    r.map(Into::into).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = renderScene)]
pub fn render_scene_js(scene_text: &str, width: u32, height: u32, max_depth: u32) -> Result<Vec<u8>, JsError> {
    render_rgba(scene_text, width, height, max_depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pathSteps)]
pub fn path_steps_js(scene_text: &str) -> Result<JsValue, JsError> {
    js(path_steps(scene_text))
}

#[wasm_bindgen(js_name = renderStep)]
pub fn render_step_js(scene_text: &str, step: u32, width: u32, height: u32, max_depth: u32) -> Result<Vec<u8>, JsError> {
    render_step_rgba(scene_text, step, width, height, max_depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = classMetrics)]
pub fn class_metrics_js(model_text: &str) -> Result<JsValue, JsError> {
    js(metrics_text(model_text))
}
