//! Bunching two cobosons with an interaction that acts on one species only.

use std::time::Instant;

use cobosim::coboson::seeded_spectra;
use cobosim::protocols::{nonlocal_bunching, ScenarioConfig};

pub fn main() {
    println!(" d  success            1 - P              |delta|   time");
    for d in 2..=6 {
        let start = Instant::now();
        let r = nonlocal_bunching(&ScenarioConfig::uniform(d).unwrap()).unwrap();
        println!(
            "{d:>2}  {:.15}  {:.15}  {:.1e}  {:?}",
            r.success_probability,
            1.0 - r.purity,
            (r.success_probability - (1.0 - r.purity)).abs(),
            start.elapsed()
        );
    }

    println!("\nrandom spectra, d = 4");
    for s in seeded_spectra(11, 4, 4).unwrap() {
        let r = nonlocal_bunching(&ScenarioConfig::with_spectrum(s).unwrap()).unwrap();
        println!(
            "  P = {:.4}  success = {:.12}  <psi_f|psi> = {:+.6}  <gamma|psi> = {:+.6}",
            r.purity, r.success_probability, r.amplitude_psi_f.re, r.amplitude_gamma.re
        );
    }
}
