#![no_main]
use cantorspec::cocycle::CheckpointFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(file) = CheckpointFile::decode(data) {
        assert_eq!(file.encode(), data);
        for record in &file.records {
            let _ = record.restore();
        }
    }
});
