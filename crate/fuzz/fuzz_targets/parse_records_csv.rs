//! Parsed convergence records survive a write/parse round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use renorm_core::formats::{parse_records_csv, write_records_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(records) = parse_records_csv(text) else { return };
    if records.is_empty() {
        return;
    }
    let written = write_records_csv(&records).expect("nonempty records serialize");
    let back = parse_records_csv(&written).expect("written records parse");
    assert_eq!(back.len(), records.len());
    for (a, b) in back.iter().zip(&records) {
        assert_eq!(a.n, b.n);
        // NaN never survives the nonnegativity check, so equality is exact
        assert_eq!(a.err, b.err);
    }
});
