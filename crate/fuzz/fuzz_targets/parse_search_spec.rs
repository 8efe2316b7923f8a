//! Search specifications are untrusted input; parsing and space planning
//! must refuse oversized or malformed specs without panicking.

#![no_main]

use covertori::search::{enumerate_factor_data, SearchSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = SearchSpec::from_json(text) else { return };
    for template in &spec.factors {
        let order: u128 = template.group.iter().map(|&d| d as u128).product();
        let torsion: u128 = template.torsion_group.iter().map(|&d| d as u128).product();
        if order > 16 || torsion > 16 || template.degree_bound > 4 {
            continue;
        }
        let _ = enumerate_factor_data(template);
    }
});
