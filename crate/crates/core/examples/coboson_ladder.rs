//! Normalization ratios and ladder algebra of N identical cobosons.

use cobosim::coboson::{chi, chi_ratio_bounds, seeded_spectra, SchmidtSpectrum};

pub fn main() {
    let d = 5;
    let uniform = SchmidtSpectrum::uniform(d).unwrap();
    println!("uniform d = {d}, P = {:.4}", uniform.purity());
    println!(" N     chi_N     alpha_N  |eps|^2 formula  |eps|^2 built");
    for n in 1..=d {
        let r = chi_ratio_bounds(&uniform, n).unwrap();
        println!(
            "{n:>2}  {:.6e}  {:.6}  {:>14.3e}  {:>13.3e}",
            r.chi_n, r.alpha_n, r.eps_norm_formula, r.eps_norm_constructed
        );
    }

    let spectra = seeded_spectra(42, 6, 3).unwrap();
    for (k, s) in spectra.iter().enumerate() {
        println!("\nrandom spectrum {k}: P = {:.4}", s.purity());
        for n in 1..=3 {
            let r = chi_ratio_bounds(s, n).unwrap();
            println!(
                "  N={n}  {:.4} <= chi_{}/chi_{n} = {:.4} <= {:.4}  |eps|^2 = {:.4}",
                r.lower_bound,
                n + 1,
                r.chi_ratio,
                r.upper_bound,
                r.eps_norm_constructed
            );
        }
        println!("  chi_6 = {:.3e}", chi(s, 6).unwrap());
    }
}
