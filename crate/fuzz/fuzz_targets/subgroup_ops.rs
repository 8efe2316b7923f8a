//! Structured fuzz of the subgroup lattice layer: canonical forms must be
//! generating-set independent, annihilators involutive, and orders must
//! multiply out — for arbitrary well-formed inputs.

#![no_main]

use arbitrary::Arbitrary;
use covertori::group::{pairing, Subgroup};
use libfuzzer_sys::fuzz_target;

#[derive(Arbitrary, Debug)]
struct Input {
    moduli: Vec<u8>,
    gens: Vec<Vec<i8>>,
    extra_combination: Vec<u8>,
}

fuzz_target!(|input: Input| {
    let moduli: Vec<u64> = input
        .moduli
        .iter()
        .take(5)
        .map(|&d| 2 + (d as u64) % 11)
        .collect();
    if moduli.is_empty() {
        return;
    }
    let gens: Vec<Vec<i64>> = input
        .gens
        .iter()
        .take(4)
        .filter(|g| g.len() >= moduli.len())
        .map(|g| g.iter().take(moduli.len()).map(|&v| v as i64).collect())
        .collect();
    let h = Subgroup::from_generators(&moduli, &gens).expect("shaped generators");

    // adding any element of the subgroup to the generating set must not
    // change the canonical form
    let elements = h.elements();
    let mut augmented = gens.clone();
    for (i, &pick) in input.extra_combination.iter().take(3).enumerate() {
        let e = &elements[(pick as usize + i) % elements.len()];
        augmented.push(e.coords().iter().map(|&v| v as i64).collect());
    }
    let h2 = Subgroup::from_generators(&moduli, &augmented).expect("augmented generators");
    assert_eq!(h, h2);
    assert_eq!(h.basis(), h2.basis());

    let perp = h.annihilator();
    let ambient: u64 = moduli.iter().product();
    assert_eq!(h.order() * perp.order(), ambient);
    assert_eq!(perp.annihilator(), h);
    if let (Some(chi), Some(x)) = (perp.elements().first(), elements.first()) {
        assert!(pairing(&moduli, chi, x).expect("well shaped").is_zero());
    }
});
