#![no_main]

use fusedist::io::{encode_bench_csv, parse_aggregate_csv, parse_bench_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = parse_aggregate_csv(data);
    if let Ok(records) = parse_bench_csv(data) {
        let again = parse_bench_csv(encode_bench_csv(&records).as_bytes()).expect("re-parse");
        assert_eq!(again.len(), records.len());
    }
});
