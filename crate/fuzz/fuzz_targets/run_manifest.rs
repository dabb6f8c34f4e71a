#![no_main]

use fusedist::io::RunManifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = RunManifest::from_json(text) {
        let back = RunManifest::from_json(&m.to_json()).expect("re-parse");
        // NaN never survives JSON, so equality holds for anything accepted.
        assert_eq!(back, m);
    }
});
