//! Two-particle images under the one-species interaction and the
//! algebraic checks behind the bunching protocol.

use cobosim::protocols::{verify_mode_maps, verify_suite};

pub fn main() {
    let maps = verify_mode_maps(3).unwrap();
    println!("d = 3: {} basis states", maps.states_checked);
    for (class, count) in &maps.counts {
        println!("  {class:?}: {count}");
    }
    println!("  max deviation from listed images {:.1e}", maps.max_error);

    for d in 2..=4 {
        let r = verify_suite(d).unwrap();
        let herm = r.hermiticity.iter().map(|h| h.2).fold(0.0, f64::max);
        println!(
            "d = {d}: hermiticity {herm:.1e}, [H_A, H_B] {:.1e}, unitarity {:.1e}, passed {}",
            r.commutator_norm, r.max_unitarity_defect, r.passed
        );
    }
}
