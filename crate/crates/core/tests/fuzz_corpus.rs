//! Every checked-in fuzz seed must reach the accepting path of its parser,
//! otherwise the fuzzer starts from rejects only.

use std::path::PathBuf;
use std::sync::Arc;

use cantorspec::cocycle::{CheckpointFile, LyapunovProfile};
use cantorspec::spectrum::SpectrumEstimate;
use cantorspec::subshifts::SystemConfig;
use cantorspec::words::{Alphabet, AlphabetSpec, Word};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let p = entry.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap()
}

#[test]
fn system_config_seeds_build() {
    for (name, bytes) in seeds("system_config") {
        let system = SystemConfig::from_json(text(&bytes))
            .and_then(|c| c.build())
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(system.canonical_window(64).unwrap().len(), 64, "{name}");
    }
}

#[test]
fn alphabet_spec_seeds_parse() {
    for (name, bytes) in seeds("alphabet_spec") {
        let (alphabet, potential) =
            AlphabetSpec::from_json(text(&bytes)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(alphabet.len(), potential.values().len(), "{name}");
    }
}

#[test]
fn word_seeds_round_trip() {
    for (name, bytes) in seeds("word_parse") {
        let (symbols, body) = text(&bytes).split_once('\n').unwrap();
        let alphabet = Arc::new(Alphabet::new(symbols.chars().collect()).unwrap());
        let w = Word::parse(alphabet, body).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(w.to_string(), body, "{name}");
    }
}

#[test]
fn spectrum_seeds_parse() {
    for (name, bytes) in seeds("spectrum_json") {
        let est = SpectrumEstimate::from_json(text(&bytes)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(est.mask.len(), est.grid.points(), "{name}");
    }
}

#[test]
fn profile_seeds_parse() {
    for (name, bytes) in seeds("profile_json") {
        let p = LyapunovProfile::from_json(text(&bytes)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!p.is_empty(), "{name}");
    }
}

#[test]
fn checkpoint_seeds_round_trip() {
    for (name, bytes) in seeds("checkpoint_decode") {
        let file = CheckpointFile::decode(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(file.encode(), bytes, "{name}");
        for r in &file.records {
            r.restore().unwrap();
        }
    }
}
