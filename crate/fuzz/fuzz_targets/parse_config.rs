//! Configuration files are untrusted input: parsing, validation, and
//! analysis must reject bad documents with errors, never panic.

#![no_main]

use covertori::config::ConfigFile;
use covertori::verdicts::ApplicabilityMode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = ConfigFile::from_json(text) else { return };
    let Ok(config) = file.to_configuration() else { return };
    let _ = config.validate();
    // keep the analyzed instances desk sized so the fuzzer stays fast
    if config.total_dim() > 6 || config.degree_albanese() > 4096 {
        return;
    }
    if let Ok(report) = covertori::report::analyze(&file, ApplicabilityMode::Chi0) {
        // the JSON rendering must round-trip
        let json = report.to_json_compact();
        let parsed: covertori::report::AnalysisReport =
            serde_json::from_str(&json).expect("report JSON parses back");
        assert_eq!(parsed.to_json_compact(), json);
    }
});
