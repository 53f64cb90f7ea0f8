#![no_main]
use cantorspec::cocycle::LyapunovProfile;
use cantorspec::spectrum::lyapunov_zero_set;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(profile) = LyapunovProfile::from_json(s) {
            let _ = lyapunov_zero_set(&profile, 0.02);
        }
    }
});
