#![no_main]

use fusedist::eval::cddr_report;
use fusedist::io::CddrManifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = CddrManifest::from_json(text) {
        if let Ok(report) = cddr_report(&m) {
            for c in report.correlations {
                if let Some(r) = c.pearson {
                    assert!((-1.0..=1.0).contains(&r));
                }
            }
        }
    }
});
