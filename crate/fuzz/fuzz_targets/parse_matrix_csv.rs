//! Parsed matrices are square, finite, and round-trip through the writer.

#![no_main]

use libfuzzer_sys::fuzz_target;
use renorm_core::formats::{parse_matrix_csv, write_matrix_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix_csv(text) {
        assert_eq!(m.entries().len(), m.dim() * m.dim());
        assert!(m.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        assert_eq!(parse_matrix_csv(&write_matrix_csv(&m)).unwrap(), m);
    }
});
