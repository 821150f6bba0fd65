//! Fixed particle-number sectors.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::FockBasisState;
use crate::mode::{ModeSpace, Species};
use crate::state::{StateVector, C64};

/// Basis of all states with `n_a` species-A and `n_b` species-B particles.
///
/// Basis states are sorted by their occupation bits, so position lookup is
/// a binary search and the order is reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    space: ModeSpace,
    n_a: usize,
    n_b: usize,
    basis: Vec<FockBasisState>,
}

/// All `k`-element subsets of `n` bits, ascending (Gosper's hack).
fn subsets(n: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    if k > n {
        return Vec::new();
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut x: u64 = (1u64 << k) - 1;
    while x < limit {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl Sector {
    pub fn enumerate(d: usize, n_a: usize, n_b: usize) -> Result<Sector> {
        let space = ModeSpace::new(d)?;
        if n_a > 2 * d || n_b > 2 * d {
            return Err(Error::Domain(format!(
                "particle counts ({n_a}, {n_b}) exceed 2d = {}",
                2 * d
            )));
        }
        let a_sets = subsets(2 * d, n_a);
        let b_sets = subsets(2 * d, n_b);
        let mut basis = Vec::with_capacity(a_sets.len() * b_sets.len());
        // B occupies the high bits, so B-major iteration is already sorted
        for &b in &b_sets {
            for &a in &a_sets {
                basis.push(FockBasisState(a | (b << (2 * d))));
            }
        }
        debug_assert!(basis.windows(2).all(|w| w[0] < w[1]));
        Ok(Sector {
            space,
            n_a,
            n_b,
            basis,
        })
    }

    /// The sector occupied by `psi`, which must have fixed species counts.
    pub fn containing(psi: &StateVector, d: usize) -> Result<Sector> {
        let space = ModeSpace::new(d)?;
        if psi.iter().any(|(s, _)| s.bits() >> space.num_modes() != 0) {
            return Err(Error::Domain(format!("state has modes outside d = {d}")));
        }
        let (n_a, n_b) = psi.particle_numbers(&space).ok_or_else(|| {
            Error::Domain("state is empty or mixes particle-number sectors".into())
        })?;
        Sector::enumerate(d, n_a, n_b)
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn d(&self) -> usize {
        self.space.d()
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FockBasisState] {
        &self.basis
    }

    pub fn state(&self, index: usize) -> FockBasisState {
        self.basis[index]
    }

    pub fn index_of(&self, state: FockBasisState) -> Option<usize> {
        self.basis.binary_search(&state).ok()
    }

    pub fn contains(&self, state: FockBasisState) -> bool {
        state.species_count(&self.space, Species::A) == self.n_a
            && state.species_count(&self.space, Species::B) == self.n_b
            && state.bits() >> self.space.num_modes() == 0
    }

    /// Dense coordinates of `psi`; errors if `psi` has weight outside.
    pub fn to_dense(&self, psi: &StateVector) -> Result<DVector<C64>> {
        let mut v = DVector::zeros(self.dim());
        for (s, a) in psi.iter() {
            let i = self.index_of(s).ok_or_else(|| {
                Error::Domain(format!(
                    "basis state {s} lies outside sector (n_a={}, n_b={})",
                    self.n_a, self.n_b
                ))
            })?;
            v[i] = a;
        }
        Ok(v)
    }

    pub fn from_dense(&self, v: &DVector<C64>) -> StateVector {
        StateVector::from_pairs(self.basis.iter().copied().zip(v.iter().copied()))
    }
}
