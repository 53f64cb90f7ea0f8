#![no_main]
use cantorspec::spectrum::SpectrumEstimate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(est) = SpectrumEstimate::from_json(s) {
            let _ = est.bands();
            let _ = est.largest_gap();
        }
    }
});
