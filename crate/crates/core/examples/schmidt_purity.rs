//! Schmidt decomposition of a random two-fermion wavefunction and its purity.

use cobosim::coboson::{schmidt_decompose, two_fermion_state};
use cobosim::mode::{Site, Species};
use cobosim::rdm::one_particle_rdm;
use cobosim::state::C64;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn main() {
    let d = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut gamma = DMatrix::from_fn(d, d, |_, _| {
        C64::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    });
    let norm = gamma.norm();
    gamma /= C64::new(norm, 0.0);

    let dec = schmidt_decompose(&gamma).unwrap();
    println!("Schmidt weights: {:?}", dec.spectrum.lambdas());
    println!("purity P = {:.6}", dec.spectrum.purity());
    println!(
        "reconstruction error {:.2e}",
        (dec.reconstruct() - &gamma).norm()
    );

    let psi = two_fermion_state(&gamma, Site::L).unwrap();
    for sp in Species::BOTH {
        let rho = one_particle_rdm(&psi, sp, d).unwrap();
        println!("Tr rho_{sp:?}^2 = {:.6}", rho.purity());
    }
}
