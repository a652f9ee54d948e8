#![no_main]

use autocine::config::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = parse_config(data) {
        let again = parse_config(cfg.to_json().as_bytes()).expect("serialized config reparses");
        assert_eq!(again, cfg);
    }
});
