//! One- and two-particle reduced density matrices of a single species.
//!
//! The one-particle matrix over the `2d` modes of a species has entries
//! `ρ[n][m] = ⟨ψ| a†_m a_n |ψ⟩`. The two-particle matrix lives on the
//! ordered pairs `k < l` of that species with entries
//! `ρ[(k,l)][(m,n)] = ⟨ψ| a†_k a†_l a_n a_m |ψ⟩`, which is the Gram matrix
//! of the vectors `a_n a_m |ψ⟩` and therefore positive semidefinite. Raw
//! traces are `N` and `N(N-1)/2`; purities use the trace-normalized forms.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{apply_annihilation, apply_creation};
use crate::mode::{Mode, ModeSpace, Species};
use crate::state::{inner_product, StateVector, C64};

/// Normalization tolerance accepted on input states.
pub const RDM_NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    raw: DMatrix<C64>,
    raw_trace: f64,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps a raw matrix and stores its trace-normalized form.
    pub fn from_raw(raw: DMatrix<C64>) -> Result<Self> {
        let (r, c) = raw.shape();
        if r != c {
            return Err(Error::Domain(format!(
                "density matrix must be square, got {r}x{c}"
            )));
        }
        let raw_trace = raw.trace().re;
        if !(raw_trace > 0.0) {
            return Err(Error::Domain(format!(
                "density matrix trace {raw_trace} not positive"
            )));
        }
        let entries = raw.scale(1.0 / raw_trace);
        Ok(Self {
            dim: r,
            raw,
            raw_trace,
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Trace-one matrix.
    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// Matrix before normalization.
    pub fn raw(&self) -> &DMatrix<C64> {
        &self.raw
    }

    pub fn raw_trace(&self) -> f64 {
        self.raw_trace
    }

    pub fn purity(&self) -> f64 {
        purity_of(self)
    }

    /// Eigenvalues of the normalized matrix, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(|a, b| b.total_cmp(a));
        e
    }

    /// `max |ρ - ρ†|` over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// `Tr ρ²` of the normalized matrix.
pub fn purity_of(rho: &DensityMatrix) -> f64 {
    (&rho.entries * &rho.entries).trace().re
}

fn species_offset(space: &ModeSpace, species: Species) -> usize {
    match species {
        Species::A => 0,
        Species::B => 2 * space.d(),
    }
}

/// `ρ[n][m] = ⟨ψ| a†_m a_n |ψ⟩` over the `2d` modes of `species`, indexed
/// by `2 * (internal - 1) + site`.
pub fn one_particle_rdm(psi: &StateVector, species: Species, d: usize) -> Result<DensityMatrix> {
    psi.require_normalized(RDM_NORM_TOLERANCE)?;
    let space = ModeSpace::new(d)?;
    let offset = species_offset(&space, species);
    let mask = space.species_mask(species);
    let modes = space.species_modes(species);
    let dim = modes.len();
    let mut raw = DMatrix::<C64>::zeros(dim, dim);
    for (s, amp) in psi.iter() {
        for n in s.occupied().filter(|m| m.bit() & mask != 0) {
            let (s1, sign1) = apply_annihilation(s, n).expect("mode is occupied");
            for &m in &modes {
                if let Some((s2, sign2)) = apply_creation(s1, m) {
                    let bra = psi.amplitude(s2);
                    if bra.norm_sqr() != 0.0 {
                        raw[(n.index() - offset, m.index() - offset)] +=
                            bra.conj() * amp * (sign1 * sign2);
                    }
                }
            }
        }
    }
    DensityMatrix::from_raw(raw)
}

/// Ordered mode pairs `(k, l)`, `k < l`, of one species; the row order of
/// [`two_particle_rdm`].
pub fn pair_index(space: &ModeSpace, species: Species) -> Vec<(Mode, Mode)> {
    let modes = space.species_modes(species);
    let mut pairs = Vec::new();
    for (i, &k) in modes.iter().enumerate() {
        for &l in &modes[i + 1..] {
            pairs.push((k, l));
        }
    }
    pairs
}

/// `a_n a_m |ψ⟩`.
fn remove_pair(psi: &StateVector, m: Mode, n: Mode) -> StateVector {
    let mut out = StateVector::zero();
    for (s, amp) in psi.iter() {
        if let Some((s1, x1)) = apply_annihilation(s, m) {
            if let Some((s2, x2)) = apply_annihilation(s1, n) {
                out.add_amplitude(s2, amp * (x1 * x2));
            }
        }
    }
    out.prune();
    out
}

/// Two-particle matrix on the antisymmetric pair basis of [`pair_index`].
pub fn two_particle_rdm(psi: &StateVector, species: Species, d: usize) -> Result<DensityMatrix> {
    psi.require_normalized(RDM_NORM_TOLERANCE)?;
    let space = ModeSpace::new(d)?;
    let mask = space.species_mask(species);
    let too_few = psi.iter().any(|(s, _)| (s.bits() & mask).count_ones() < 2);
    if too_few {
        return Err(Error::Domain(format!(
            "two-particle density matrix needs at least two {species:?} particles"
        )));
    }
    let pairs = pair_index(&space, species);
    let reduced: Vec<StateVector> = pairs.iter().map(|&(m, n)| remove_pair(psi, m, n)).collect();
    let dim = pairs.len();
    let mut raw = DMatrix::<C64>::zeros(dim, dim);
    for r in 0..dim {
        if reduced[r].is_empty() {
            continue;
        }
        for c in r..dim {
            if reduced[c].is_empty() {
                continue;
            }
            let v = inner_product(&reduced[r], &reduced[c]);
            raw[(r, c)] = v;
            raw[(c, r)] = v.conj();
        }
    }
    DensityMatrix::from_raw(raw)
}
