#![no_main]

use fusedist::io::{encode_aggregate_csv, encode_sweep_csv, parse_aggregate_csv, parse_sweep_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(sweep) = parse_sweep_csv(data) {
        let again = parse_sweep_csv(encode_sweep_csv(&sweep).as_bytes()).expect("re-parse");
        assert_eq!(again.aggregates, sweep.aggregates);
        let (_, aggs) = parse_aggregate_csv(encode_aggregate_csv(&sweep).as_bytes()).expect("re-parse");
        assert_eq!(aggs, sweep.aggregates);
    }
});
