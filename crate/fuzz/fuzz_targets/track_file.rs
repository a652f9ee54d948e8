#![no_main]

use autocine::tracks::parse_scene;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(scene) = parse_scene(data) {
        let again = parse_scene(scene.to_json().as_bytes()).expect("canonical form reparses");
        assert_eq!(again, scene);
    }
});
