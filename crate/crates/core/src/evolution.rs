//! Exact unitary evolution `exp(-iHt)` on a particle-number sector.
//!
//! The sector matrix of `H` is split into its connected components (states
//! linked by nonzero matrix elements) and every component is diagonalized
//! densely. The protocol Hamiltonians break into many small blocks, so even
//! the 4356-dimensional d = 6 bunching sector costs milliseconds.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::Statistics;
use crate::operator::{hermiticity_of_entries, OperatorExpr};
use crate::sector::Sector;
use crate::state::{inner_product, StateVector, C64, NORM_TOLERANCE};

/// Largest accepted `|‖ψ(t)‖ - ‖ψ(0)‖|`.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub final_state: StateVector,
    pub unitarity_defect: f64,
}

#[derive(Debug, Clone)]
struct Block {
    indices: Vec<usize>,
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

/// Eigendecomposition of a Hamiltonian on one sector, reusable across times.
#[derive(Debug, Clone)]
pub struct Propagator {
    sector: Sector,
    blocks: Vec<Block>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Propagator {
    pub fn new(h: &OperatorExpr, sector: &Sector) -> Result<Self> {
        Self::with_statistics(h, sector, Statistics::GlobalAnticommuting)
    }

    pub fn with_statistics(h: &OperatorExpr, sector: &Sector, stats: Statistics) -> Result<Self> {
        let entries = h.sparse_on_sector(sector, stats)?;
        let check = hermiticity_of_entries(&entries);
        if !check.hermitian {
            return Err(Error::NotHermitian {
                deviation: check.max_deviation,
            });
        }

        let n = sector.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        for &(r, c, _) in &entries {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut block_of = vec![usize::MAX; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            if block_of[root] == usize::MAX {
                block_of[root] = members.len();
                members.push(Vec::new());
            }
            members[block_of[root]].push(i);
        }
        // position of each sector index inside its block
        let mut local = vec![0usize; n];
        for m in &members {
            for (k, &i) in m.iter().enumerate() {
                local[i] = k;
            }
        }
        let mut mats: Vec<DMatrix<C64>> = members
            .iter()
            .map(|m| DMatrix::zeros(m.len(), m.len()))
            .collect();
        for &(r, c, v) in &entries {
            let b = block_of[find(&mut parent, r)];
            mats[b][(local[r], local[c])] += v;
        }

        let blocks = members
            .into_iter()
            .zip(mats)
            .map(|(indices, m)| {
                if indices.len() == 1 {
                    Block {
                        indices,
                        energies: vec![m[(0, 0)].re],
                        vectors: DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
                    }
                } else {
                    let eig = m.symmetric_eigen();
                    Block {
                        indices,
                        energies: eig.eigenvalues.iter().copied().collect(),
                        vectors: eig.eigenvectors,
                    }
                }
            })
            .collect();

        Ok(Self {
            sector: sector.clone(),
            blocks,
        })
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn largest_block(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| b.indices.len())
            .max()
            .unwrap_or(0)
    }

    /// All eigenvalues, ascending.
    pub fn energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.energies.iter().copied())
            .collect();
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }

    /// `exp(-iHt) x` on dense sector coordinates.
    pub fn propagate_dense(&self, x: &DVector<C64>, t: f64) -> DVector<C64> {
        let mut out = DVector::zeros(x.len());
        for b in &self.blocks {
            let xb = DVector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| x[i]));
            if xb.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            let mut coeffs = b.vectors.ad_mul(&xb);
            for (c, &e) in coeffs.iter_mut().zip(&b.energies) {
                *c *= C64::new(0.0, -e * t).exp();
            }
            let yb = &b.vectors * coeffs;
            for (k, &i) in b.indices.iter().enumerate() {
                out[i] = yb[k];
            }
        }
        out
    }

    pub fn propagate(&self, psi: &StateVector, t: f64) -> Result<EvolutionResult> {
        let x = self.sector.to_dense(psi)?;
        let y = self.propagate_dense(&x, t);
        let defect = (y.norm() - x.norm()).abs();
        if !(defect <= UNITARITY_TOLERANCE) {
            return Err(Error::Unitarity {
                defect,
                tolerance: UNITARITY_TOLERANCE,
            });
        }
        Ok(EvolutionResult {
            final_state: self.sector.from_dense(&y),
            unitarity_defect: defect,
        })
    }
}

/// `exp(-iHt) ψ` for a state confined to one sector of internal dimension `d`.
pub fn evolve(h: &OperatorExpr, t: f64, psi: &StateVector, d: usize) -> Result<EvolutionResult> {
    let sector = Sector::containing(psi, d)?;
    Propagator::new(h, &sector)?.propagate(psi, t)
}

/// `|⟨target|ψ⟩|²` for normalized states.
pub fn fidelity(psi: &StateVector, target: &StateVector) -> Result<f64> {
    psi.require_normalized(NORM_TOLERANCE)?;
    target.require_normalized(NORM_TOLERANCE)?;
    Ok(inner_product(target, psi).norm_sqr().min(1.0))
}

/// `⟨ψ|H|ψ⟩`.
pub fn expectation(h: &OperatorExpr, psi: &StateVector) -> C64 {
    inner_product(psi, &h.apply(psi))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;
    use std::f64::consts::FRAC_PI_4;

    use super::*;
    use crate::mode::{ModeSpace, Site};
    use crate::operator::Factor;

    fn hop(d: usize) -> (ModeSpace, OperatorExpr) {
        let space = ModeSpace::new(d).unwrap();
        let (l, r) = (space.a(1, Site::L), space.a(1, Site::R));
        let one = C64::new(1.0, 0.0);
        let h = OperatorExpr::product(one, &[Factor::create(l), Factor::annihilate(r)]).unwrap()
            + OperatorExpr::product(one, &[Factor::create(r), Factor::annihilate(l)]).unwrap();
        (space, h)
    }

    #[test]
    fn symmetric_beam_splitter_on_right_mode() {
        let (space, h) = hop(1);
        let psi = StateVector::from_creators(&[space.a(1, Site::R)]);
        let out = evolve(&h, FRAC_PI_4, &psi, 1).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let expect = StateVector::from_pairs([
            (psi.iter().next().unwrap().0, C64::new(s, 0.0)),
            (
                StateVector::from_creators(&[space.a(1, Site::L)])
                    .iter()
                    .next()
                    .unwrap()
                    .0,
                C64::new(0.0, -s),
            ),
        ]);
        assert!(out.final_state.max_abs_diff(&expect) < 1e-12);
        assert!(out.unitarity_defect < 1e-14);
    }

    #[test]
    fn full_swap_at_half_pi() {
        // 2x2 oracle: exp(-i σx π/2) = -i σx
        let (space, h) = hop(1);
        let psi = StateVector::from_creators(&[space.a(1, Site::R)]);
        let out = evolve(&h, FRAC_PI_2, &psi, 1).unwrap();
        let expect = StateVector::from_creators(&[space.a(1, Site::L)]).scaled(C64::new(0.0, -1.0));
        assert!(out.final_state.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        let (space, h) = hop(2);
        let psi = StateVector::from_pairs([
            (
                StateVector::from_creators(&[space.a(1, Site::L), space.b(2, Site::R)])
                    .iter()
                    .next()
                    .unwrap()
                    .0,
                C64::new(0.6, 0.0),
            ),
            (
                StateVector::from_creators(&[space.a(2, Site::L), space.b(2, Site::R)])
                    .iter()
                    .next()
                    .unwrap()
                    .0,
                C64::new(0.0, 0.8),
            ),
        ]);
        let out = evolve(&h, 0.0, &psi, 2).unwrap();
        assert!(out.final_state.max_abs_diff(&psi) < 1e-15);
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let (space, _) = hop(1);
        let h = OperatorExpr::product(
            C64::new(1.0, 0.0),
            &[
                Factor::create(space.a(1, Site::L)),
                Factor::annihilate(space.a(1, Site::R)),
            ],
        )
        .unwrap();
        let psi = StateVector::from_creators(&[space.a(1, Site::R)]);
        assert!(matches!(
            evolve(&h, 1.0, &psi, 1),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let a = StateVector::basis(crate::fock::FockBasisState(1));
        let b = StateVector::basis(crate::fock::FockBasisState(2));
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        assert!(matches!(
            fidelity(&a.scaled(C64::new(2.0, 0.0)), &a),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn block_decomposition_matches_dense_exponential() {
        // compare with a single dense eigendecomposition of the whole sector
        let space = ModeSpace::new(2).unwrap();
        let one = C64::new(1.0, 0.0);
        let mut h = OperatorExpr::zero();
        for i in 1..=2 {
            for sp in [crate::mode::Species::A, crate::mode::Species::B] {
                let l = space.mode(sp, i, Site::L).unwrap();
                let r = space.mode(sp, i, Site::R).unwrap();
                h = h
                    + OperatorExpr::product(one, &[Factor::create(l), Factor::annihilate(r)])
                        .unwrap()
                    + OperatorExpr::product(one, &[Factor::create(r), Factor::annihilate(l)])
                        .unwrap();
            }
        }
        let sector = Sector::enumerate(2, 1, 1).unwrap();
        let prop = Propagator::new(&h, &sector).unwrap();
        assert!(prop.num_blocks() > 1);
        let m = h.matrix_on_sector(&sector).unwrap();
        let eig = m.symmetric_eigen();
        let t = 0.77;
        let phases = DMatrix::from_diagonal(&DVector::from_iterator(
            sector.dim(),
            eig.eigenvalues.iter().map(|&e| C64::new(0.0, -e * t).exp()),
        ));
        let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
        let x = DVector::from_fn(sector.dim(), |i, _| C64::new(i as f64, 1.0 - i as f64));
        let y1 = prop.propagate_dense(&x, t);
        let y2 = u * &x;
        assert!((y1 - y2).norm() < 1e-12);
    }
}
