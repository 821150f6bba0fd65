//! Composite bosons made of one A fermion and one B fermion.
//!
//! A coboson with Schmidt coefficients `λ` is created by
//! `c† = Σ_i √λ_i a†_i b†_i`. Its Fock states `|N⟩ ∝ c†^N |0⟩` carry the
//! normalization `χ_N = N! e_N(λ)`, where `e_N` is the elementary symmetric
//! polynomial, and the ladder relations
//!
//! ```text
//! c† |N-1⟩ = α_N √N |N⟩
//! c  |N⟩   = α_N √N |N-1⟩ + |ε_N⟩,        α_N = √(χ_N / χ_{N-1})
//! ```
//!
//! with `⟨ε_N|ε_N⟩ = 1 - N χ_N/χ_{N-1} + (N-1) χ_{N+1}/χ_N`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode::{ModeSpace, Site};
use crate::operator::{Factor, OperatorExpr};
use crate::state::{inner_product, StateVector, C64};

/// Allowed deviation of `Σλ` from one.
pub const SPECTRUM_SUM_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of `‖Γ‖_F` from one in [`schmidt_decompose`].
pub const GAMMA_NORM_TOLERANCE: f64 = 1e-10;

/// Schmidt coefficients of a two-fermion pure state, sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SchmidtSpectrum {
    lambdas: Vec<f64>,
}

impl TryFrom<Vec<f64>> for SchmidtSpectrum {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        SchmidtSpectrum::new(v)
    }
}

impl From<SchmidtSpectrum> for Vec<f64> {
    fn from(s: SchmidtSpectrum) -> Vec<f64> {
        s.lambdas
    }
}

impl SchmidtSpectrum {
    pub fn new(mut lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() || lambdas.len() > crate::mode::MAX_D {
            return Err(Error::Domain(format!(
                "spectrum length {} outside 1..={}",
                lambdas.len(),
                crate::mode::MAX_D
            )));
        }
        if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
            return Err(Error::Domain(format!("invalid Schmidt coefficient {bad}")));
        }
        let sum: f64 = lambdas.iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_SUM_TOLERANCE {
            return Err(Error::Domain(format!(
                "Schmidt coefficients sum to {sum}, not 1"
            )));
        }
        lambdas.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { lambdas })
    }

    /// Maximally entangled spectrum `λ_i = 1/d`.
    pub fn uniform(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("d must be positive".into()));
        }
        Self::new(vec![1.0 / d as f64; d])
    }

    /// Normalizes nonnegative weights into a spectrum.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Domain(
                "weights must be nonnegative with positive sum".into(),
            ));
        }
        let mut lambdas: Vec<f64> = weights.iter().map(|w| w / sum).collect();
        // absorb rounding so the sum check is exact to a few ulps
        let residual = 1.0 - lambdas.iter().sum::<f64>();
        if let Some(max) = lambdas.iter_mut().max_by(|a, b| a.total_cmp(b)) {
            *max += residual;
        }
        Self::new(lambdas)
    }

    /// Random spectrum: `d` squared standard-normal samples, normalized.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Self> {
        loop {
            let w: Vec<f64> = (0..d)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    z * z
                })
                .collect();
            if w.iter().sum::<f64>() > 0.0 {
                return Self::from_weights(&w);
            }
        }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn d(&self) -> usize {
        self.lambdas.len()
    }

    /// Number of nonzero coefficients.
    pub fn rank(&self) -> usize {
        self.lambdas.iter().filter(|&&l| l > 0.0).count()
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn space(&self) -> ModeSpace {
        ModeSpace::new(self.d()).expect("spectrum length validated")
    }
}

/// `count` spectra of length `d` from a seeded ChaCha8 stream.
///
/// The generator is `ChaCha8Rng::seed_from_u64(seed)` on stream `d`, each
/// spectrum drawn by [`SchmidtSpectrum::random`]. The same `(seed, d, count)`
/// always yields the same spectra.
pub fn seeded_spectra(seed: u64, d: usize, count: usize) -> Result<Vec<SchmidtSpectrum>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(d as u64);
    (0..count)
        .map(|_| SchmidtSpectrum::random(&mut rng, d))
        .collect()
}

/// `P = Σ λ_i²`.
pub fn purity(s: &SchmidtSpectrum) -> f64 {
    s.lambdas.iter().map(|l| l * l).sum()
}

/// `[e_0, e_1, ..., e_d]` by the prefix recursion
/// `e_k^{(m)} = e_k^{(m-1)} + λ_m e_{k-1}^{(m-1)}`.
pub fn elementary_symmetric(lambdas: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; lambdas.len() + 1];
    e[0] = 1.0;
    for (m, &l) in lambdas.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += l * e[k - 1];
        }
    }
    e
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `χ_n` for any `n ≥ 0`; zero beyond `d`.
fn chi_unchecked(s: &SchmidtSpectrum, n: usize) -> f64 {
    if n > s.d() {
        return 0.0;
    }
    factorial(n) * elementary_symmetric(&s.lambdas)[n]
}

/// `χ_N = N! e_N(λ)`, for `0 ≤ N ≤ d`.
pub fn chi(s: &SchmidtSpectrum, n: usize) -> Result<f64> {
    if n > s.d() {
        return Err(Error::Domain(format!("N = {n} exceeds d = {}", s.d())));
    }
    Ok(chi_unchecked(s, n))
}

/// `α_N = √(χ_N / χ_{N-1})`, for `1 ≤ N ≤ d`.
pub fn alpha(s: &SchmidtSpectrum, n: usize) -> Result<f64> {
    if n == 0 || n > s.d() {
        return Err(Error::Domain(format!("N = {n} outside 1..={}", s.d())));
    }
    if s.rank() < n - 1 {
        return Err(Error::RankDeficient {
            rank: s.rank(),
            n: n - 1,
        });
    }
    Ok((chi_unchecked(s, n) / chi_unchecked(s, n - 1)).sqrt())
}

/// `c†_site = Σ_i √λ_i a†_{i,site} b†_{i,site}`.
pub fn coboson_creation(s: &SchmidtSpectrum, site: Site) -> OperatorExpr {
    let space = s.space();
    s.lambdas
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.0)
        .map(|(i, &l)| {
            OperatorExpr::product(
                C64::new(l.sqrt(), 0.0),
                &[
                    Factor::create(space.a(i + 1, site)),
                    Factor::create(space.b(i + 1, site)),
                ],
            )
            .expect("two factors within cap")
        })
        .sum()
}

/// `c_site`, the adjoint of [`coboson_creation`].
pub fn coboson_annihilation(s: &SchmidtSpectrum, site: Site) -> OperatorExpr {
    coboson_creation(s, site).adjoint()
}

/// `c†^n |0⟩` without normalization.
pub(crate) fn raw_power(s: &SchmidtSpectrum, n: usize, site: Site) -> StateVector {
    let c = coboson_creation(s, site);
    (0..n).fold(StateVector::vacuum(), |psi, _| c.apply(&psi))
}

/// `|N⟩ = χ_N^{-1/2} c†^N / √(N!) |0⟩` on one site.
pub fn build_fock_state(s: &SchmidtSpectrum, n: usize, site: Site) -> Result<StateVector> {
    if n > s.d() {
        return Err(Error::Domain(format!("N = {n} exceeds d = {}", s.d())));
    }
    if s.rank() < n {
        return Err(Error::RankDeficient { rank: s.rank(), n });
    }
    let norm = (chi_unchecked(s, n) * factorial(n)).sqrt();
    Ok(raw_power(s, n, site).scaled(C64::new(1.0 / norm, 0.0)))
}

/// `|ε_N⟩ = c|N⟩ - α_N √N |N-1⟩`, built on site L.
pub fn epsilon_state(s: &SchmidtSpectrum, n: usize) -> Result<StateVector> {
    let a = alpha(s, n)?;
    let fock_n = build_fock_state(s, n, Site::L)?;
    let fock_prev = build_fock_state(s, n - 1, Site::L)?;
    let mut eps = coboson_annihilation(s, Site::L).apply(&fock_n);
    eps.add_scaled(C64::new(-a * (n as f64).sqrt(), 0.0), &fock_prev);
    Ok(eps)
}

/// `⟨ε_N|ε_N⟩ = 1 - N χ_N/χ_{N-1} + (N-1) χ_{N+1}/χ_N`.
pub fn epsilon_norm_formula(s: &SchmidtSpectrum, n: usize) -> Result<f64> {
    if n == 0 || n > s.d() {
        return Err(Error::Domain(format!("N = {n} outside 1..={}", s.d())));
    }
    if s.rank() < n {
        return Err(Error::RankDeficient { rank: s.rank(), n });
    }
    let (prev, cur, next) = (
        chi_unchecked(s, n - 1),
        chi_unchecked(s, n),
        chi_unchecked(s, n + 1),
    );
    let nf = n as f64;
    Ok(1.0 - nf * cur / prev + (nf - 1.0) * next / cur)
}

/// Ladder quantities at one `N`, with the purity bounds on `χ_{N+1}/χ_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderReport {
    pub n: usize,
    pub chi_n: f64,
    pub chi_ratio: f64,
    pub alpha_n: f64,
    pub eps_norm_formula: f64,
    pub eps_norm_constructed: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// Slack for the purity-bound comparisons.
const BOUND_SLACK: f64 = 1e-12;

pub fn chi_ratio_bounds(s: &SchmidtSpectrum, n: usize) -> Result<LadderReport> {
    if n == 0 || n > s.d() {
        return Err(Error::Domain(format!("N = {n} outside 1..={}", s.d())));
    }
    if s.rank() < n {
        return Err(Error::RankDeficient { rank: s.rank(), n });
    }
    let chi_n = chi_unchecked(s, n);
    let chi_ratio = chi_unchecked(s, n + 1) / chi_n;
    let p = purity(s);
    let (lower_bound, upper_bound) = (1.0 - n as f64 * p, 1.0 - p);
    Ok(LadderReport {
        n,
        chi_n,
        chi_ratio,
        alpha_n: alpha(s, n)?,
        eps_norm_formula: epsilon_norm_formula(s, n)?,
        eps_norm_constructed: epsilon_state(s, n)?.norm_sqr(),
        lower_bound,
        upper_bound,
        lower_holds: chi_ratio >= lower_bound - BOUND_SLACK,
        upper_holds: chi_ratio <= upper_bound + BOUND_SLACK,
    })
}

/// Schmidt form of `Σ_{mn} Γ_{mn} a†_m b†_n |0⟩`.
///
/// The rotated modes are `a†_i = Σ_m α_{im} a†_m`, `b†_i = Σ_n β_{in} b†_n`
/// with `α = left_transform`, `β = right_transform`, and
/// `Γ = αᵀ diag(√λ) β`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub spectrum: SchmidtSpectrum,
    pub left_transform: DMatrix<C64>,
    pub right_transform: DMatrix<C64>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = self.spectrum.d();
        let sqrt_l = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(self.spectrum.lambdas[i].sqrt(), 0.0)
            } else {
                C64::default()
            }
        });
        self.left_transform.transpose() * sqrt_l * &self.right_transform
    }
}

pub fn schmidt_decompose(gamma: &DMatrix<C64>) -> Result<SchmidtDecomposition> {
    let (rows, cols) = gamma.shape();
    if rows != cols || rows == 0 {
        return Err(Error::Domain(format!(
            "Γ must be square, got {rows}x{cols}"
        )));
    }
    let fro = gamma.norm();
    if (fro - 1.0).abs() > GAMMA_NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm: fro });
    }
    let svd = gamma.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^†");
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let lambdas: Vec<f64> = order
        .iter()
        .map(|&k| svd.singular_values[k].powi(2))
        .collect();
    let total: f64 = lambdas.iter().sum();
    let lambdas: Vec<f64> = lambdas.iter().map(|l| l / total).collect();
    let left = DMatrix::from_fn(rows, rows, |i, m| u[(m, order[i])]);
    let right = DMatrix::from_fn(rows, rows, |i, n| v_t[(order[i], n)]);
    Ok(SchmidtDecomposition {
        spectrum: SchmidtSpectrum { lambdas },
        left_transform: left,
        right_transform: right,
    })
}

/// `Σ_{mn} Γ_{mn} a†_{m,site} b†_{n,site} |0⟩`.
pub fn two_fermion_state(gamma: &DMatrix<C64>, site: Site) -> Result<StateVector> {
    let d = gamma.nrows();
    if gamma.ncols() != d {
        return Err(Error::Domain("Γ must be square".into()));
    }
    let space = ModeSpace::new(d)?;
    let mut psi = StateVector::zero();
    for m in 0..d {
        for n in 0..d {
            let g = gamma[(m, n)];
            if g.norm() == 0.0 {
                continue;
            }
            let term = StateVector::from_creators(&[space.a(m + 1, site), space.b(n + 1, site)]);
            psi.add_scaled(g, &term);
        }
    }
    Ok(psi)
}

/// Overlap `⟨N-1| c |N⟩`, which equals `α_N √N`.
pub fn lowering_overlap(s: &SchmidtSpectrum, n: usize) -> Result<C64> {
    let fock_n = build_fock_state(s, n, Site::L)?;
    let fock_prev = build_fock_state(s, n - 1, Site::L)?;
    Ok(inner_product(
        &fock_prev,
        &coboson_annihilation(s, Site::L).apply(&fock_n),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockBasisState;

    fn spec(v: &[f64]) -> SchmidtSpectrum {
        SchmidtSpectrum::new(v.to_vec()).unwrap()
    }

    /// Brute-force `χ_N` by enumerating all N-subsets.
    fn chi_by_subsets(l: &[f64], n: usize) -> f64 {
        let d = l.len();
        let mut e = 0.0;
        for mask in 0u32..(1 << d) {
            if mask.count_ones() as usize == n {
                e += (0..d)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| l[i])
                    .product::<f64>();
            }
        }
        factorial(n) * e
    }

    #[test]
    fn spectrum_validation() {
        assert!(SchmidtSpectrum::new(vec![0.5, 0.4]).is_err());
        assert!(SchmidtSpectrum::new(vec![1.2, -0.2]).is_err());
        assert!(SchmidtSpectrum::new(vec![]).is_err());
        assert_eq!(spec(&[0.3, 0.7]).lambdas(), &[0.7, 0.3]);
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&SchmidtSpectrum::uniform(4).unwrap()) - 0.25).abs() < 1e-15);
        assert_eq!(purity(&spec(&[1.0, 0.0])), 1.0);
        assert!((purity(&spec(&[0.7, 0.3])) - 0.58).abs() < 1e-15);
    }

    #[test]
    fn chi_examples() {
        for d in 1..=8 {
            let s = SchmidtSpectrum::uniform(d).unwrap();
            for n in 0..=d {
                let closed = factorial(d) / ((d as f64).powi(n as i32) * factorial(d - n));
                assert!((chi(&s, n).unwrap() - closed).abs() < 1e-12);
            }
        }
        let s = spec(&[0.5, 0.3, 0.2]);
        assert!((chi(&s, 2).unwrap() - (1.0 - s.purity())).abs() < 1e-15);
        assert!((chi(&s, 3).unwrap() - 0.18).abs() < 1e-15);
        assert!((chi(&s, 3).unwrap() - chi_by_subsets(s.lambdas(), 3)).abs() < 1e-15);
        assert!(chi(&s, 4).is_err());
        assert_eq!(chi(&s, 0).unwrap(), 1.0);
    }

    #[test]
    fn alpha_examples() {
        let u2 = SchmidtSpectrum::uniform(2).unwrap();
        assert!((alpha(&u2, 2).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((alpha(&spec(&[0.6, 0.4]), 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((alpha(&spec(&[0.7, 0.3]), 2).unwrap() - 0.42f64.sqrt()).abs() < 1e-15);
        // χ_2 = 0 for a rank-one spectrum
        assert!(matches!(
            alpha(&spec(&[1.0, 0.0, 0.0]), 3),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn creation_operator_coefficients() {
        let s = SchmidtSpectrum::uniform(2).unwrap();
        let c = coboson_creation(&s, Site::L);
        assert_eq!(c.terms().len(), 2);
        for t in c.terms() {
            assert!((t.coefficient.re - 0.5f64.sqrt()).abs() < 1e-15);
        }
        let sep = coboson_creation(&spec(&[1.0, 0.0]), Site::L);
        assert_eq!(sep.terms().len(), 1);
        let space = ModeSpace::new(2).unwrap();
        assert_eq!(
            sep.terms()[0].factors(),
            &[
                Factor::create(space.a(1, Site::L)),
                Factor::create(space.b(1, Site::L))
            ]
        );
        let w = coboson_creation(&spec(&[0.7, 0.3]), Site::R);
        let coeffs: Vec<f64> = w.terms().iter().map(|t| t.coefficient.re).collect();
        assert!((coeffs[0] - 0.7f64.sqrt()).abs() < 1e-15);
        assert!((coeffs[1] - 0.3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn two_coboson_fock_state_uniform_d2() {
        // c†² = 2·(1/2) a1†b1†a2†b2† since pair operators commute and square to zero
        let s = SchmidtSpectrum::uniform(2).unwrap();
        let psi = build_fock_state(&s, 2, Site::L).unwrap();
        let space = s.space();
        let expect = StateVector::from_creators(&[
            space.a(1, Site::L),
            space.b(1, Site::L),
            space.a(2, Site::L),
            space.b(2, Site::L),
        ]);
        assert!(psi.max_abs_diff(&expect) < 1e-14, "{psi}");
        // in mode order a1L a2L b1L b2L this is one transposition away
        let (state, amp) = psi.iter().next().unwrap();
        assert_eq!(
            state,
            FockBasisState::from_modes(&[
                space.a(1, Site::L),
                space.a(2, Site::L),
                space.b(1, Site::L),
                space.b(2, Site::L)
            ])
        );
        assert!((amp.re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn fock_state_normalized_and_rank_checked() {
        let s = spec(&[0.5, 0.3, 0.2]);
        for n in 0..=3 {
            assert!(build_fock_state(&s, n, Site::R).unwrap().is_normalized());
        }
        assert!(matches!(
            build_fock_state(&spec(&[0.8, 0.2, 0.0]), 3, Site::L),
            Err(Error::RankDeficient { rank: 2, n: 3 })
        ));
    }

    #[test]
    fn epsilon_examples() {
        for d in 1..=5 {
            let s = SchmidtSpectrum::uniform(d).unwrap();
            for n in 1..=d {
                assert!(epsilon_state(&s, n).unwrap().norm_sqr() < 1e-10);
                assert!(epsilon_norm_formula(&s, n).unwrap().abs() < 1e-12);
            }
        }
        let s = spec(&[0.7, 0.3]);
        assert!(epsilon_state(&s, 1).unwrap().norm_sqr() < 1e-20);
        assert!(epsilon_norm_formula(&s, 1).unwrap().abs() < 1e-15);
        let formula = epsilon_norm_formula(&s, 2).unwrap();
        let built = epsilon_state(&s, 2).unwrap().norm_sqr();
        assert!((formula - built).abs() < 1e-10);
        assert!(formula > 0.01);
    }

    #[test]
    fn ladder_raising_identity() {
        let s = spec(&[0.45, 0.3, 0.15, 0.1]);
        let c = coboson_creation(&s, Site::L);
        for n in 1..=4 {
            let lhs = c.apply(&build_fock_state(&s, n - 1, Site::L).unwrap());
            let rhs = build_fock_state(&s, n, Site::L)
                .unwrap()
                .scaled(C64::new(alpha(&s, n).unwrap() * (n as f64).sqrt(), 0.0));
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
            let overlap = lowering_overlap(&s, n).unwrap();
            assert!((overlap.re - alpha(&s, n).unwrap() * (n as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn bounds_uniform() {
        let s = SchmidtSpectrum::uniform(5).unwrap();
        for n in 1..5 {
            let r = chi_ratio_bounds(&s, n).unwrap();
            assert!((r.chi_ratio - (1.0 - n as f64 / 5.0)).abs() < 1e-12);
            assert!(r.lower_holds && r.upper_holds);
        }
        let r = chi_ratio_bounds(&spec(&[0.6, 0.3, 0.1]), 1).unwrap();
        assert!((r.chi_ratio - r.upper_bound).abs() < 1e-15);
    }

    #[test]
    fn schmidt_examples() {
        let sep = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::default(),
                C64::default(),
                C64::default(),
            ],
        );
        let dec = schmidt_decompose(&sep).unwrap();
        assert_eq!(dec.spectrum.lambdas(), &[1.0, 0.0]);
        assert!((dec.spectrum.purity() - 1.0).abs() < 1e-15);

        let d = 3;
        let max = DMatrix::<C64>::identity(d, d) * C64::new(1.0 / (d as f64).sqrt(), 0.0);
        let dec = schmidt_decompose(&max).unwrap();
        for l in dec.spectrum.lambdas() {
            assert!((l - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!((dec.spectrum.purity() - 1.0 / 3.0).abs() < 1e-12);

        assert!(matches!(
            schmidt_decompose(&(max * C64::new(2.0, 0.0))),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn schmidt_reconstruction_and_state_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = 3;
        let raw = DMatrix::from_fn(d, d, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let gamma = raw.scale(1.0 / raw.norm());
        let dec = schmidt_decompose(&gamma).unwrap();
        assert!((dec.reconstruct() - &gamma).norm() < 1e-10);
        let id = DMatrix::<C64>::identity(d, d);
        assert!((dec.left_transform.adjoint() * &dec.left_transform - &id).norm() < 1e-10);
        assert!((dec.right_transform.adjoint() * &dec.right_transform - &id).norm() < 1e-10);
        let l = dec.spectrum.lambdas();
        assert!(l.windows(2).all(|w| w[0] >= w[1]));
        assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_spectra_are_reproducible() {
        let a = seeded_spectra(7, 4, 3).unwrap();
        let b = seeded_spectra(7, 4, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        assert_ne!(
            seeded_spectra(7, 5, 1).unwrap()[0].lambdas()[..4],
            a[0].lambdas()[..]
        );
    }
}
