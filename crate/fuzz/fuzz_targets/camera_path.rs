#![no_main]

use autocine::path::parse_camera_path;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(path) = parse_camera_path(data) {
        let _ = path.viewports(16.0 / 9.0).expect("validated path yields viewports");
        assert_eq!(parse_camera_path(path.to_json().as_bytes()).unwrap(), path);
    }
});
