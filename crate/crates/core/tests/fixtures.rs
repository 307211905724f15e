use std::path::PathBuf;

use raybench::animation::frame_count;
use raybench::renderer::{render_image, RenderSettings};
use raybench::scene::{parse_scene, Scene};

fn scene(name: &str) -> Scene {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    parse_scene(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fixture_shapes() {
    let simple = scene("simple.scene");
    assert_eq!(simple.object_count(), 5);
    assert_eq!(frame_count(&simple).unwrap(), 1296);
    assert_eq!(simple.lights.len(), 2);

    let complex = scene("complex.scene");
    assert_eq!(complex.object_count(), 56);
    assert_eq!(complex.paths.len(), 2);
    assert_eq!(frame_count(&complex).unwrap(), 1245);

    assert_eq!(frame_count(&scene("orbit4.scene")).unwrap(), 4);
    assert_eq!(frame_count(&scene("separated.scene")).unwrap(), 8);
}

#[test]
fn fixtures_survive_a_print_parse_round_trip() {
    for name in ["simple.scene", "complex.scene", "orbit4.scene", "separated.scene"] {
        let original = scene(name);
        let reparsed = parse_scene(&original.to_string()).unwrap();
        assert_eq!(reparsed, original, "{name}");
    }
}

#[test]
fn simple_matches_golden_render() {
    let simple = scene("simple.scene");
    let golden = std::fs::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/simple_320x240.tga")).unwrap();
    let settings = RenderSettings::for_scene(&simple).sequential();
    assert_eq!(render_image(&simple, &settings).encode(), golden);
}
