//! One- and two-particle purities before and after ideal bunching.

use cobosim::protocols::{ideal_bunching_analysis, ScenarioConfig};

pub fn main() {
    println!(" d   P       1p before  1p after  2p before  2p after  1/(d(d-1))");
    for d in 2..=5 {
        let r = ideal_bunching_analysis(&ScenarioConfig::uniform(d).unwrap()).unwrap();
        println!(
            "{d:>2}  {:.4}  {:.6}   {:.6}  {:.6}   {:.6}  {:.6}",
            r.purity,
            r.one_particle_purity_initial,
            r.one_particle_purity_final,
            r.two_particle_purity_initial,
            r.two_particle_purity_final,
            1.0 / (d * (d - 1)) as f64
        );
    }
}
