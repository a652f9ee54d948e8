#![no_main]

use autocine::synth::{parse_scenario, synth_scene};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(spec) = parse_scenario(data) {
        // keep each input cheap; huge durations are valid but slow
        if spec.num_frames() * (spec.actors.len() + 1) <= 20_000 {
            let _ = synth_scene(&spec);
        }
    }
});
