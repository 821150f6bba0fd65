//! Beam-splitter and bunching scenarios for two-fermion cobosons.
//!
//! * [`independent_bs`]: both constituents hop independently; the pair
//!   decays into split-port components.
//! * [`interacting_bs`]: an on-site attraction `-γ n_a n_b` binds the pair,
//!   which then tunnels collectively at second order.
//! * [`ideal_bunching_analysis`]: entanglement bookkeeping of the map
//!   `c†_L c†_R |0⟩ → (c†_L² + c†_R²)/(2√χ_2) |0⟩`.
//! * [`nonlocal_bunching`]: the A constituents and the B constituents each
//!   evolve under a local same-species Hamiltonian for `t = π/2`; the
//!   result is the bunched state with probability `1 - P`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::coboson::{chi, coboson_creation, SchmidtSpectrum};
use crate::error::{Error, Result};
use crate::evolution::{Propagator, UNITARITY_TOLERANCE};
use crate::fock::{FockBasisState, Statistics};
use crate::mode::{Mode, ModeSpace, Site, Species};
use crate::operator::{Factor, HermiticityCheck, OperatorExpr};
use crate::rdm::{one_particle_rdm, two_particle_rdm};
use crate::sector::Sector;
use crate::state::{inner_product, StateVector, C64};

/// Largest accepted `|success + residual - 1|` in [`nonlocal_bunching`].
pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HamiltonianKind {
    /// `a†_{1L} a_{1R} + h.c.`, a single-mode beam splitter.
    BsSingle,
    /// `Σ_i a†_{iL} a_{iR} + h.c.`
    BsPairA,
    /// `Σ_i b†_{iL} b_{iR} + h.c.`
    BsPairB,
    /// `-γ Σ_{X,i} a†_{iX} a_{iX} b†_{iX} b_{iX}`
    Interaction,
    /// Local same-species pair exchange acting on A.
    NonlocalA,
    /// Local same-species pair exchange acting on B.
    NonlocalB,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn term(coefficient: C64, factors: &[Factor]) -> OperatorExpr {
    OperatorExpr::product(coefficient, factors).expect("protocol terms are within the cap")
}

fn hop(l: Mode, r: Mode) -> OperatorExpr {
    term(one(), &[Factor::create(l), Factor::annihilate(r)])
        + term(one(), &[Factor::create(r), Factor::annihilate(l)])
}

fn pair_exchange(space: &ModeSpace, species: Species) -> OperatorExpr {
    let m = |i: usize, site: Site| space.mode(species, i, site).expect("index in range");
    let (cr, an) = (Factor::create, Factor::annihilate);
    let mut terms = Vec::new();
    for i in 1..=space.d() {
        for j in 1..i {
            let (il, ir, jl, jr) = (m(i, Site::L), m(i, Site::R), m(j, Site::L), m(j, Site::R));
            terms.push(term(one(), &[cr(il), cr(jl), an(jr), an(il)]));
            terms.push(term(one(), &[cr(ir), cr(jr), an(ir), an(jl)]));
            terms.push(term(one(), &[cr(il), cr(jr), an(jl), an(il)]));
            terms.push(term(one(), &[cr(jl), cr(ir), an(jr), an(ir)]));
        }
    }
    terms.into_iter().sum()
}

/// Term list of one of the protocol Hamiltonians, exactly as written.
///
/// `gamma` is required for [`HamiltonianKind::Interaction`] and ignored
/// otherwise.
pub fn build_hamiltonian(
    kind: HamiltonianKind,
    d: usize,
    gamma: Option<f64>,
) -> Result<OperatorExpr> {
    let space = ModeSpace::new(d)?;
    Ok(match kind {
        HamiltonianKind::BsSingle => hop(space.a(1, Site::L), space.a(1, Site::R)),
        HamiltonianKind::BsPairA => (1..=d)
            .map(|i| hop(space.a(i, Site::L), space.a(i, Site::R)))
            .sum(),
        HamiltonianKind::BsPairB => (1..=d)
            .map(|i| hop(space.b(i, Site::L), space.b(i, Site::R)))
            .sum(),
        HamiltonianKind::Interaction => {
            let g = gamma
                .ok_or_else(|| Error::Domain("interaction Hamiltonian requires gamma".into()))?;
            let mut terms = Vec::new();
            for site in Site::BOTH {
                for i in 1..=d {
                    let (a, b) = (space.a(i, site), space.b(i, site));
                    terms.push(term(
                        C64::new(-g, 0.0),
                        &[
                            Factor::create(a),
                            Factor::annihilate(a),
                            Factor::create(b),
                            Factor::annihilate(b),
                        ],
                    ));
                }
            }
            terms.into_iter().sum()
        }
        HamiltonianKind::NonlocalA => pair_exchange(&space, Species::A),
        HamiltonianKind::NonlocalB => pair_exchange(&space, Species::B),
    })
}

/// Parameters shared by the scenarios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub d: usize,
    pub spectrum: SchmidtSpectrum,
    pub gamma: f64,
    pub time_grid: Vec<f64>,
    pub tolerance: f64,
}

impl ScenarioConfig {
    /// Uniform spectrum, `γ = 0`, single time `π/4`, tolerance `1e-9`.
    pub fn uniform(d: usize) -> Result<Self> {
        Self::with_spectrum(SchmidtSpectrum::uniform(d)?)
    }

    pub fn with_spectrum(spectrum: SchmidtSpectrum) -> Result<Self> {
        let cfg = Self {
            d: spectrum.d(),
            spectrum,
            gamma: 0.0,
            time_grid: vec![FRAC_PI_4],
            tolerance: 1e-9,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Interaction strength `gamma` with a time grid over `[0, 2πγ]` fine
    /// enough to resolve the fast `~2π/γ` oscillations (32 samples each).
    pub fn interacting(d: usize, gamma: f64) -> Result<Self> {
        let mut cfg = Self::uniform(d)?;
        cfg.gamma = gamma;
        let span = 2.0 * PI * gamma.max(1.0);
        let step = 2.0 * PI / gamma.max(1.0) / 32.0;
        let n = (span / step).ceil() as usize + 1;
        cfg.time_grid = linspace(0.0, span, n);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if self.spectrum.d() != self.d {
            return Err(Error::Config(format!(
                "spectrum length {} does not match d = {}",
                self.spectrum.d(),
                self.d
            )));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!(
                "gamma must be finite and ≥ 0, got {}",
                self.gamma
            )));
        }
        if self.time_grid.is_empty() {
            return Err(Error::Config("time grid is empty".into()));
        }
        if self.time_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "time grid must be strictly increasing".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `c†_L |0⟩`.
pub fn single_coboson(spectrum: &SchmidtSpectrum, site: Site) -> StateVector {
    coboson_creation(spectrum, site).apply(&StateVector::vacuum())
}

/// `c†_L c†_R |0⟩`.
pub fn two_coboson_initial(spectrum: &SchmidtSpectrum, stats: Statistics) -> StateVector {
    let d = spectrum.d();
    let r = coboson_creation(spectrum, Site::R).apply_with(&StateVector::vacuum(), stats, d);
    coboson_creation(spectrum, Site::L).apply_with(&r, stats, d)
}

/// `(c†_L² + c†_R²) / (2√χ_2) |0⟩`.
pub fn bunched_target(spectrum: &SchmidtSpectrum, stats: Statistics) -> Result<StateVector> {
    if spectrum.rank() < 2 {
        return Err(Error::RankDeficient {
            rank: spectrum.rank(),
            n: 2,
        });
    }
    let d = spectrum.d();
    let chi2 = chi(spectrum, 2)?;
    let mut psi = StateVector::zero();
    for site in Site::BOTH {
        let c = coboson_creation(spectrum, site);
        let sq = c.apply_with(&c.apply_with(&StateVector::vacuum(), stats, d), stats, d);
        psi.add_scaled(C64::new(1.0 / (2.0 * chi2.sqrt()), 0.0), &sq);
    }
    Ok(psi)
}

/// Normalized `Σ_k λ_k a†_{kL} b†_{kL} a†_{kR} b†_{kR} |0⟩`.
pub fn diagonal_residual(spectrum: &SchmidtSpectrum, stats: Statistics) -> Result<StateVector> {
    let d = spectrum.d();
    let space = spectrum.space();
    let mut psi = StateVector::zero();
    for (k, &l) in spectrum.lambdas().iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        let i = k + 1;
        let ops = term(
            C64::new(l, 0.0),
            &[
                Factor::create(space.a(i, Site::L)),
                Factor::create(space.b(i, Site::L)),
                Factor::create(space.a(i, Site::R)),
                Factor::create(space.b(i, Site::R)),
            ],
        );
        psi.add_scaled(one(), &ops.apply_with(&StateVector::vacuum(), stats, d));
    }
    psi.normalized()
}

#[derive(Debug, Clone, Serialize)]
pub struct IndependentBsReport {
    pub d: usize,
    pub time: f64,
    pub fidelity: f64,
    pub split_port_probability: f64,
    pub purity_before: f64,
    pub purity_after: f64,
    pub unitarity_defect: f64,
}

/// Both fermions hop independently for `t = π/4`.
pub fn independent_bs(cfg: &ScenarioConfig) -> Result<IndependentBsReport> {
    cfg.validate()?;
    let d = cfg.d;
    let space = cfg.spectrum.space();
    let h = build_hamiltonian(HamiltonianKind::BsPairA, d, None)?
        + build_hamiltonian(HamiltonianKind::BsPairB, d, None)?;
    let psi0 = single_coboson(&cfg.spectrum, Site::L);
    let sector = Sector::containing(&psi0, d)?;
    let out = Propagator::new(&h, &sector)?.propagate(&psi0, FRAC_PI_4)?;

    // Σ_i √λ_i (a_L b_L - i a_R b_L - i a_L b_R - a_R b_R) / 2
    let mut target = StateVector::zero();
    for (k, &l) in cfg.spectrum.lambdas().iter().enumerate() {
        let i = k + 1;
        let amp = l.sqrt() / 2.0;
        for (sa, sb, c) in [
            (Site::L, Site::L, C64::new(amp, 0.0)),
            (Site::R, Site::L, C64::new(0.0, -amp)),
            (Site::L, Site::R, C64::new(0.0, -amp)),
            (Site::R, Site::R, C64::new(-amp, 0.0)),
        ] {
            target.add_scaled(
                c,
                &StateVector::from_creators(&[space.a(i, sa), space.b(i, sb)]),
            );
        }
    }
    let fidelity = inner_product(&target, &out.final_state).norm_sqr();
    let left = |s: FockBasisState, sp: Species| {
        s.occupied()
            .filter(|&m| space.id(m).species == sp)
            .all(|m| space.id(m).site == Site::L)
    };
    let split = out
        .final_state
        .probability_where(|s| left(s, Species::A) != left(s, Species::B));
    Ok(IndependentBsReport {
        d,
        time: FRAC_PI_4,
        fidelity,
        split_port_probability: split,
        purity_before: one_particle_rdm(&psi0, Species::A, d)?.purity(),
        purity_after: one_particle_rdm(&out.final_state, Species::A, d)?.purity(),
        unitarity_defect: out.unitarity_defect,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InteractingBsReport {
    pub d: usize,
    pub gamma: f64,
    /// Time maximizing `fidelity`.
    pub best_time: f64,
    /// `max_φ |⟨(c†_L + e^{iφ} c†_R)/√2 |0⟩ | ψ(t)⟩|²` at `best_time`.
    pub fidelity: f64,
    /// Fidelity with `(c†_L - c†_R)/√2 |0⟩` at `best_time`.
    pub fidelity_fixed_phase: f64,
    /// Largest fixed-phase fidelity anywhere on the grid.
    pub max_fidelity_fixed_phase: f64,
    /// `arg(⟨c†_R|ψ⟩ / ⟨c†_L|ψ⟩)` at `best_time`.
    pub relative_phase: f64,
    pub purity_at_best: f64,
    /// Second-order estimate `πγ/8` of the first half-transfer time.
    pub predicted_time: f64,
    pub max_unitarity_defect: f64,
}

/// Bound pair under `H_A + H_B + H_int`, scanned over the time grid.
///
/// The grid maximum is refined by golden-section search between the
/// neighbouring grid points.
pub fn interacting_bs(cfg: &ScenarioConfig) -> Result<InteractingBsReport> {
    cfg.validate()?;
    let d = cfg.d;
    let h = build_hamiltonian(HamiltonianKind::BsPairA, d, None)?
        + build_hamiltonian(HamiltonianKind::BsPairB, d, None)?
        + build_hamiltonian(HamiltonianKind::Interaction, d, Some(cfg.gamma))?;
    let left = single_coboson(&cfg.spectrum, Site::L);
    let right = single_coboson(&cfg.spectrum, Site::R);
    let sector = Sector::containing(&left, d)?;
    let prop = Propagator::new(&h, &sector)?;
    let x0 = sector.to_dense(&left)?;
    let xl = x0.clone();
    let xr = sector.to_dense(&right)?;

    let overlaps = |t: f64| -> (C64, C64, f64) {
        let y = prop.propagate_dense(&x0, t);
        let defect = (y.norm() - 1.0).abs();
        (xl.dotc(&y), xr.dotc(&y), defect)
    };
    let free = |l: C64, r: C64| (l.norm() + r.norm()).powi(2) / 2.0;
    let fixed = |l: C64, r: C64| (l - r).norm_sqr() / 2.0;

    let mut best = (0usize, f64::NEG_INFINITY);
    let mut max_fixed: f64 = 0.0;
    let mut max_defect: f64 = 0.0;
    for (k, &t) in cfg.time_grid.iter().enumerate() {
        let (l, r, defect) = overlaps(t);
        max_defect = max_defect.max(defect);
        max_fixed = max_fixed.max(fixed(l, r));
        let f = free(l, r);
        if f > best.1 {
            best = (k, f);
        }
    }
    if max_defect > UNITARITY_TOLERANCE {
        return Err(Error::Unitarity {
            defect: max_defect,
            tolerance: UNITARITY_TOLERANCE,
        });
    }

    let grid = &cfg.time_grid;
    let mut best_time = grid[best.0];
    if grid.len() > 1 {
        let lo = grid[best.0.saturating_sub(1)];
        let hi = grid[(best.0 + 1).min(grid.len() - 1)];
        let t = golden_max(
            |t| {
                let (l, r, _) = overlaps(t);
                free(l, r)
            },
            lo,
            hi,
            1e-12,
        );
        let (l, r, _) = overlaps(t);
        if free(l, r) > best.1 {
            best_time = t;
        }
    }
    let (l, r, _) = overlaps(best_time);
    let state = sector.from_dense(&prop.propagate_dense(&x0, best_time));
    Ok(InteractingBsReport {
        d,
        gamma: cfg.gamma,
        best_time,
        fidelity: free(l, r),
        fidelity_fixed_phase: fixed(l, r),
        max_fidelity_fixed_phase: max_fixed.max(fixed(l, r)),
        relative_phase: (r / l).arg(),
        purity_at_best: one_particle_rdm(&state, Species::A, d)?.purity(),
        predicted_time: PI * cfg.gamma / 8.0,
        max_unitarity_defect: max_defect,
    })
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    while (b - a).abs() > tol {
        if fc > fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e);
        }
    }
    (a + b) / 2.0
}

#[derive(Debug, Clone, Serialize)]
pub struct IdealBunchingReport {
    pub d: usize,
    pub purity: f64,
    pub chi_2: f64,
    pub norm_initial: f64,
    pub norm_final: f64,
    pub one_particle_purity_initial: f64,
    pub one_particle_purity_final: f64,
    pub two_particle_purity_initial: f64,
    pub two_particle_purity_final: f64,
    /// `max |ρ_i - ρ_f|` over one-particle entries (raw matrices).
    pub one_particle_rdm_difference: f64,
}

/// Purities of `c†_L c†_R |0⟩` and of its bunched image, built directly.
pub fn ideal_bunching_analysis(cfg: &ScenarioConfig) -> Result<IdealBunchingReport> {
    cfg.validate()?;
    let d = cfg.d;
    let stats = Statistics::GlobalAnticommuting;
    let psi_i = two_coboson_initial(&cfg.spectrum, stats);
    let psi_f = bunched_target(&cfg.spectrum, stats)?;
    let (r1i, r1f) = (
        one_particle_rdm(&psi_i, Species::A, d)?,
        one_particle_rdm(&psi_f, Species::A, d)?,
    );
    let diff = (r1i.raw() - r1f.raw())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(IdealBunchingReport {
        d,
        purity: cfg.spectrum.purity(),
        chi_2: chi(&cfg.spectrum, 2)?,
        norm_initial: psi_i.norm(),
        norm_final: psi_f.norm(),
        one_particle_purity_initial: r1i.purity(),
        one_particle_purity_final: r1f.purity(),
        two_particle_purity_initial: two_particle_rdm(&psi_i, Species::A, d)?.purity(),
        two_particle_purity_final: two_particle_rdm(&psi_f, Species::A, d)?.purity(),
        one_particle_rdm_difference: diff,
    })
}

/// Result of the local-interaction bunching protocol.
#[derive(Debug, Clone)]
pub struct BunchingOutcome {
    pub d: usize,
    pub purity: f64,
    /// `⟨ψ_f | ψ(π/2)⟩`; `-√(1-P)` in the standard convention.
    pub amplitude_psi_f: C64,
    /// `⟨γ | ψ(π/2)⟩`; `+√P` with the diagonal pairs left unchanged.
    pub amplitude_gamma: C64,
    pub success_probability: f64,
    pub residual_probability: f64,
    pub completeness_defect: f64,
    /// Weight on states with all four particles on one site.
    pub bunched_probability: f64,
    /// Final state projected onto the bunched subspace and renormalized.
    pub post_selected_state: StateVector,
    pub final_state: StateVector,
    pub unitarity_defect: f64,
}

pub fn nonlocal_bunching(cfg: &ScenarioConfig) -> Result<BunchingOutcome> {
    nonlocal_bunching_with(cfg, Statistics::GlobalAnticommuting)
}

/// [`nonlocal_bunching`] under an explicit exchange convention.
pub fn nonlocal_bunching_with(cfg: &ScenarioConfig, stats: Statistics) -> Result<BunchingOutcome> {
    cfg.validate()?;
    let d = cfg.d;
    if cfg.spectrum.rank() < 2 {
        return Err(Error::RankDeficient {
            rank: cfg.spectrum.rank(),
            n: 2,
        });
    }
    let space = cfg.spectrum.space();
    let psi_i = two_coboson_initial(&cfg.spectrum, stats);
    let sector = Sector::enumerate(d, 2, 2)?;
    let h = build_hamiltonian(HamiltonianKind::NonlocalA, d, None)?
        + build_hamiltonian(HamiltonianKind::NonlocalB, d, None)?;
    let out = Propagator::with_statistics(&h, &sector, stats)?.propagate(&psi_i, FRAC_PI_2)?;
    let psi_f = bunched_target(&cfg.spectrum, stats)?;
    let gamma = diagonal_residual(&cfg.spectrum, stats)?;

    let amplitude_psi_f = inner_product(&psi_f, &out.final_state);
    let amplitude_gamma = inner_product(&gamma, &out.final_state);
    let success = amplitude_psi_f.norm_sqr();
    let residual = amplitude_gamma.norm_sqr();
    let defect = (success + residual - 1.0).abs();
    if defect > COMPLETENESS_TOLERANCE {
        return Err(Error::Completeness {
            defect,
            tolerance: COMPLETENESS_TOLERANCE,
        });
    }

    let l_mask = space
        .all_modes()
        .filter(|&m| space.id(m).site == Site::L)
        .fold(0u64, |acc, m| acc | (1u64 << m.0));
    let bunched = |s: FockBasisState| s.bits() & l_mask == s.bits() || s.bits() & l_mask == 0;
    let projected = StateVector::from_pairs(out.final_state.iter().filter(|(s, _)| bunched(*s)));
    let bunched_probability = projected.norm_sqr();
    Ok(BunchingOutcome {
        d,
        purity: cfg.spectrum.purity(),
        amplitude_psi_f,
        amplitude_gamma,
        success_probability: success,
        residual_probability: residual,
        completeness_defect: defect,
        bunched_probability,
        post_selected_state: projected.normalized()?,
        final_state: out.final_state,
        unitarity_defect: out.unitarity_defect,
    })
}

/// Which of the listed two-particle maps a basis state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ModeMapClass {
    /// `a†_{iL} a†_{jR} → -i a†_{iL} a†_{jL}`, `i > j`
    CrossToLeft,
    /// `a†_{jL} a†_{iR} → -i a†_{iR} a†_{jR}`, `i > j`
    CrossToRight,
    /// `a†_{iL} a†_{iR}` unchanged
    Diagonal,
    /// `a†_{iL} a†_{jL} → -i a†_{iL} a†_{jR}`, `i > j`
    LeftPair,
    /// `a†_{iR} a†_{jR} → -i a†_{jL} a†_{iR}`, `i > j`
    RightPair,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeMapReport {
    pub d: usize,
    pub states_checked: usize,
    pub counts: Vec<(ModeMapClass, usize)>,
    /// Largest amplitude deviation from the listed image.
    pub max_error: f64,
    /// Largest deviation between the block propagator and a single dense
    /// exponential of the whole two-particle sector.
    pub max_dense_mismatch: f64,
    pub passed: bool,
}

/// Tolerance of [`verify_mode_maps`].
pub const MODE_MAP_TOLERANCE: f64 = 1e-9;

/// Evolves every two-particle species-A basis state under the local
/// A Hamiltonian for `t = π/2` and compares with the listed images.
pub fn verify_mode_maps(d: usize) -> Result<ModeMapReport> {
    if d < 2 {
        return Err(Error::Domain(format!("mode maps need d ≥ 2, got {d}")));
    }
    let space = ModeSpace::new(d)?;
    let h = build_hamiltonian(HamiltonianKind::NonlocalA, d, None)?;
    let sector = Sector::enumerate(d, 2, 0)?;
    let prop = Propagator::new(&h, &sector)?;

    let dense = {
        let m = h.matrix_on_sector(&sector)?;
        let eig = m.symmetric_eigen();
        let phases = DMatrix::from_diagonal(&DVector::from_iterator(
            sector.dim(),
            eig.eigenvalues
                .iter()
                .map(|&e| C64::new(0.0, -e * FRAC_PI_2).exp()),
        ));
        &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
    };

    let minus_i = C64::new(0.0, -1.0);
    let mut counts: Vec<(ModeMapClass, usize)> = Vec::new();
    let mut max_error: f64 = 0.0;
    let mut max_dense: f64 = 0.0;
    for (col, &s) in sector.basis().iter().enumerate() {
        let occ: Vec<Mode> = s.occupied().collect();
        let (p, q) = (space.id(occ[0]), space.id(occ[1]));
        let a = |i: usize, site: Site| space.a(i, site);
        // p precedes q in mode order, so p.internal ≤ q.internal
        let (j, i) = (p.internal, q.internal);
        let (class, input, image, factor) = match (p.site, q.site) {
            _ if i == j => (
                ModeMapClass::Diagonal,
                [a(i, Site::L), a(i, Site::R)],
                [a(i, Site::L), a(i, Site::R)],
                one(),
            ),
            (Site::L, Site::L) => (
                ModeMapClass::LeftPair,
                [a(i, Site::L), a(j, Site::L)],
                [a(i, Site::L), a(j, Site::R)],
                minus_i,
            ),
            (Site::R, Site::R) => (
                ModeMapClass::RightPair,
                [a(i, Site::R), a(j, Site::R)],
                [a(j, Site::L), a(i, Site::R)],
                minus_i,
            ),
            (Site::L, Site::R) => (
                ModeMapClass::CrossToRight,
                [a(j, Site::L), a(i, Site::R)],
                [a(i, Site::R), a(j, Site::R)],
                minus_i,
            ),
            (Site::R, Site::L) => (
                ModeMapClass::CrossToLeft,
                [a(i, Site::L), a(j, Site::R)],
                [a(i, Site::L), a(j, Site::L)],
                minus_i,
            ),
        };
        let input = StateVector::from_creators(&input);
        let expect = StateVector::from_creators(&image).scaled(factor);
        match counts.iter_mut().find(|(c, _)| *c == class) {
            Some((_, n)) => *n += 1,
            None => counts.push((class, 1)),
        }
        let got = prop.propagate(&input, FRAC_PI_2)?.final_state;
        max_error = max_error.max(got.max_abs_diff(&expect));
        let basis_image = prop
            .propagate(&StateVector::basis(s), FRAC_PI_2)?
            .final_state;
        let oracle = sector.from_dense(&dense.column(col).into_owned());
        max_dense = max_dense.max(basis_image.max_abs_diff(&oracle));
    }
    counts.sort_by_key(|(c, _)| *c as u8);
    Ok(ModeMapReport {
        d,
        states_checked: sector.dim(),
        counts,
        max_error,
        max_dense_mismatch: max_dense,
        passed: max_error <= MODE_MAP_TOLERANCE && max_dense <= MODE_MAP_TOLERANCE,
    })
}

/// `max_s ‖[A, B] |s⟩‖_∞` over the basis of `sector`.
pub fn commutator_norm(a: &OperatorExpr, b: &OperatorExpr, sector: &Sector) -> f64 {
    let mut worst: f64 = 0.0;
    for &s in sector.basis() {
        let e = StateVector::basis(s);
        let ab = a.apply(&b.apply(&e));
        let ba = b.apply(&a.apply(&e));
        worst = worst.max(ab.max_abs_diff(&ba));
    }
    worst
}

/// Invariant checks run by `cobosim verify`.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub d: usize,
    pub mode_maps: ModeMapReport,
    /// `(name, sector (n_a, n_b), check)` for every protocol Hamiltonian.
    pub hermiticity: Vec<(String, (usize, usize), f64)>,
    pub commutator_norm: f64,
    pub max_unitarity_defect: f64,
    pub passed: bool,
}

/// Tolerance for hermiticity and commutator checks.
pub const ALGEBRA_TOLERANCE: f64 = 1e-12;

pub fn verify_suite(d: usize) -> Result<VerifyReport> {
    let mode_maps = verify_mode_maps(d)?;
    let spectrum = SchmidtSpectrum::uniform(d)?;
    let bs = build_hamiltonian(HamiltonianKind::BsPairA, d, None)?
        + build_hamiltonian(HamiltonianKind::BsPairB, d, None)?;
    let int = build_hamiltonian(HamiltonianKind::Interaction, d, Some(1.0))?;
    let na = build_hamiltonian(HamiltonianKind::NonlocalA, d, None)?;
    let nb = build_hamiltonian(HamiltonianKind::NonlocalB, d, None)?;
    let one_pair = Sector::enumerate(d, 1, 1)?;
    let two_pairs = Sector::enumerate(d, 2, 2)?;

    let mut hermiticity = Vec::new();
    let mut record = |name: &str, h: &OperatorExpr, sector: &Sector| -> Result<f64> {
        let HermiticityCheck { max_deviation, .. } = h.is_hermitian(sector)?;
        hermiticity.push((
            name.to_string(),
            (sector.n_a(), sector.n_b()),
            max_deviation,
        ));
        Ok(max_deviation)
    };
    record("bs_pair", &bs, &one_pair)?;
    record("bs_pair+int", &(bs.clone() + int.clone()), &one_pair)?;
    record("bs_pair", &bs, &two_pairs)?;
    record("nonlocal_a", &na, &two_pairs)?;
    record("nonlocal_b", &nb, &two_pairs)?;
    let comm = commutator_norm(&na, &nb, &two_pairs);

    let mut max_defect: f64 = 0.0;
    let psi1 = single_coboson(&spectrum, Site::L);
    for h in [&bs, &(bs.clone() + int)] {
        let prop = Propagator::new(h, &one_pair)?;
        for k in 0..8 {
            let t = k as f64 * 0.7;
            max_defect = max_defect.max(prop.propagate(&psi1, t)?.unitarity_defect);
        }
    }
    let psi2 = two_coboson_initial(&spectrum, Statistics::GlobalAnticommuting);
    let prop = Propagator::new(&(na + nb), &two_pairs)?;
    for k in 0..8 {
        let t = k as f64 * 0.7;
        max_defect = max_defect.max(prop.propagate(&psi2, t)?.unitarity_defect);
    }

    let passed = mode_maps.passed
        && hermiticity
            .iter()
            .all(|(_, _, dev)| *dev <= ALGEBRA_TOLERANCE)
        && comm <= ALGEBRA_TOLERANCE
        && max_defect <= UNITARITY_TOLERANCE;
    Ok(VerifyReport {
        d,
        mode_maps,
        hermiticity,
        commutator_norm: comm,
        max_unitarity_defect: max_defect,
        passed,
    })
}

/// Maps every creator of `modes[k]` to `Σ_j u[(j, k)] a†_{modes[j]}`,
/// leaving other modes alone. `u` should be unitary for a basis change.
pub fn rotate_modes(psi: &StateVector, modes: &[Mode], u: &DMatrix<C64>) -> StateVector {
    let mut out = StateVector::zero();
    for (s, amp) in psi.iter() {
        // canonical basis state: creators in ascending mode order
        let mut image = StateVector::vacuum();
        for m in s.occupied().collect::<Vec<_>>().into_iter().rev() {
            let creator: OperatorExpr = match modes.iter().position(|&x| x == m) {
                Some(k) => modes
                    .iter()
                    .enumerate()
                    .map(|(j, &mj)| OperatorExpr::creation(mj).scale(u[(j, k)]))
                    .sum(),
                None => OperatorExpr::creation(m),
            };
            image = creator.apply(&image);
        }
        out.add_scaled(amp, &image);
    }
    out
}
