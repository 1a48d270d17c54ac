//! Symbol buffers are 1-based and round-trip through the writer.

#![no_main]

use libfuzzer_sys::fuzz_target;
use renorm_core::formats::{parse_symbols, write_symbols};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(symbols) = parse_symbols(text) {
        assert!(symbols.iter().all(|&s| s >= 1));
        assert_eq!(parse_symbols(&write_symbols(&symbols)).unwrap(), symbols);
    }
});
