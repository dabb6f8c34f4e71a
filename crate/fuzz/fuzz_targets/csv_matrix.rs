#![no_main]

use fusedist::io::{encode_csv_matrix, parse_csv_matrix};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cloud) = parse_csv_matrix(data) {
        let again = parse_csv_matrix(encode_csv_matrix(&cloud).as_bytes()).expect("re-parse");
        assert_eq!(again, cloud);
    }
});
