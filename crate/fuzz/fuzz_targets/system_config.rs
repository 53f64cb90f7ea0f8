#![no_main]
use cantorspec::subshifts::SystemConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(system) = SystemConfig::from_json(s).and_then(|c| c.build()) {
            // a valid system must generate its short windows
            let _ = system.canonical_window(64);
        }
    }
});
