#![no_main]
use std::sync::Arc;

use cantorspec::words::{Alphabet, Word};
use libfuzzer_sys::fuzz_target;

// first line: alphabet symbols, rest: the word
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let (symbols, text) = s.split_once('\n').unwrap_or((s, ""));
    let Ok(alphabet) = Alphabet::new(symbols.chars().collect()) else { return };
    if let Ok(w) = Word::parse(Arc::new(alphabet), text) {
        assert_eq!(w.to_string(), text);
    }
});
