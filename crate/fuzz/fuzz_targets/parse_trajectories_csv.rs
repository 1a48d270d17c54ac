//! Trajectory rows parse without panicking and always lie in the closed disc.

#![no_main]

use libfuzzer_sys::fuzz_target;
use renorm_core::formats::parse_trajectories_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_trajectories_csv(text) {
        for row in rows {
            assert!(row.point.norm() <= 1.0 + 1e-12);
            assert!(row.endpoint.norm() <= 1.0 + 1e-12);
        }
    }
});
