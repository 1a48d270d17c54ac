//! Config text must either be rejected with an error or produce a
//! configuration that validates for every experiment it names.

#![no_main]

use libfuzzer_sys::fuzz_target;
use renorm_cli::config::{Experiment, ExperimentConfig, RawConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(raw) = RawConfig::parse(text) else { return };
    for experiment in Experiment::ALL {
        if let Ok(cfg) = ExperimentConfig::from_raw(experiment, &raw) {
            assert!(cfg.n >= 1);
            assert!(!cfg.n_grid.is_empty());
            assert!(cfg.n_grid.windows(2).all(|w| w[0] < w[1]));
            assert!(cfg.base.im > 0.0);
        }
    }
});
