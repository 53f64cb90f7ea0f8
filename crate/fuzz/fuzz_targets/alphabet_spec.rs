#![no_main]
use cantorspec::words::AlphabetSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = AlphabetSpec::from_json(s);
    }
});
