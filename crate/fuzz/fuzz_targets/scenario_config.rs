#![no_main]
use hfine_cli::ScenarioConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = ScenarioConfig::parse(s) {
            // Accepted configs must survive derived-parameter construction without panicking.
            let _ = cfg.nv_params();
            let _ = cfg.carbon_sites();
            let _ = cfg.narrowing_params();
        }
    }
});
