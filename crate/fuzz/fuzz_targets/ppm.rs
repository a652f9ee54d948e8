#![no_main]

use autocine::renderer::{read_ppm, write_ppm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = read_ppm(data) {
        assert_eq!(read_ppm(&write_ppm(&img)).unwrap(), img);
    }
});
