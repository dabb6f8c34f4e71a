#![no_main]

use fusedist::io::{encode_raw_matrix, parse_raw_matrix};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cloud) = parse_raw_matrix(data) {
        // Accepted input is already canonical.
        assert_eq!(encode_raw_matrix(&cloud).unwrap(), data);
    }
});
