//! Occupation-number basis states and single ladder operators.
//!
//! A basis state is the ordered product `a†_{m1} a†_{m2} ... a†_{mk} |0⟩`
//! with `m1 < m2 < ... < mk` in the linear mode order of [`crate::mode`].
//! Applying `a†_m` or `a_m` moves the operator past every occupied mode
//! preceding `m`, which produces the sign `(-1)^(#occupied modes before m)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::mode::{Mode, ModeSpace, Species};

/// Exchange statistics between the two species.
///
/// The default places all `4d` modes on one Jordan-Wigner string, so
/// species A and B anticommute. `SpeciesCommuting` keeps a separate string
/// per species, making A and B operators commute. Every operator built in
/// this crate conserves both particle numbers, so physical results agree
/// between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
pub enum Statistics {
    #[default]
    GlobalAnticommuting,
    SpeciesCommuting,
}

/// Occupation pattern of up to 64 fermionic modes.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct FockBasisState(pub u64);

impl FockBasisState {
    pub const VACUUM: FockBasisState = FockBasisState(0);

    pub fn from_modes(modes: &[Mode]) -> Self {
        FockBasisState(modes.iter().fold(0, |acc, m| acc | m.bit()))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_occupied(self, mode: Mode) -> bool {
        self.0 & mode.bit() != 0
    }

    pub fn particle_count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn species_count(self, space: &ModeSpace, species: Species) -> usize {
        (self.0 & space.species_mask(species)).count_ones() as usize
    }

    /// Occupied modes in increasing order.
    pub fn occupied(self) -> impl Iterator<Item = Mode> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros();
                bits &= bits - 1;
                Some(Mode(i as u8))
            }
        })
    }

    /// Sign picked up by moving a ladder operator for `mode` to its slot.
    #[inline]
    fn sign_for(self, mode: Mode, stats: Statistics, space_b_offset: Option<u32>) -> f64 {
        let below = self.0 & (mode.bit() - 1);
        let mask = match (stats, space_b_offset) {
            (Statistics::SpeciesCommuting, Some(off)) if u32::from(mode.0) >= off => {
                below & !((1u64 << off) - 1)
            }
            _ => below,
        };
        if mask.count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for FockBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        let mut first = true;
        for m in self.occupied() {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{}", m.0)?;
        }
        write!(f, "⟩")
    }
}

/// `a†_mode` acting on a basis state under the global convention.
///
/// Returns `None` when the mode is already occupied.
#[inline]
pub fn apply_creation(state: FockBasisState, mode: Mode) -> Option<(FockBasisState, f64)> {
    if state.is_occupied(mode) {
        return None;
    }
    let sign = state.sign_for(mode, Statistics::GlobalAnticommuting, None);
    Some((FockBasisState(state.0 | mode.bit()), sign))
}

/// `a_mode` acting on a basis state under the global convention.
///
/// Returns `None` when the mode is empty.
#[inline]
pub fn apply_annihilation(state: FockBasisState, mode: Mode) -> Option<(FockBasisState, f64)> {
    if !state.is_occupied(mode) {
        return None;
    }
    let sign = state.sign_for(mode, Statistics::GlobalAnticommuting, None);
    Some((FockBasisState(state.0 & !mode.bit()), sign))
}

/// Ladder action with an explicit exchange convention.
///
/// `d` is needed only to locate the species-B block for
/// [`Statistics::SpeciesCommuting`].
#[inline]
pub fn apply_ladder(
    state: FockBasisState,
    mode: Mode,
    create: bool,
    stats: Statistics,
    d: usize,
) -> Option<(FockBasisState, f64)> {
    if state.is_occupied(mode) == create {
        return None;
    }
    let offset = match stats {
        Statistics::GlobalAnticommuting => None,
        Statistics::SpeciesCommuting => Some(2 * d as u32),
    };
    let sign = state.sign_for(mode, stats, offset);
    Some((FockBasisState(state.0 ^ mode.bit()), sign))
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    /// First-quantized antisymmetric wavefunction: coordinates → amplitude.
    type Wave = HashMap<Vec<usize>, f64>;

    fn oracle_create(m: usize, f: &Wave) -> Wave {
        let mut out: Wave = HashMap::new();
        for (xs, &amp) in f {
            let k = xs.len();
            let norm = 1.0 / ((k + 1) as f64).sqrt();
            // antisymmetrize the new particle over every slot
            for j in 0..=k {
                let mut ys = xs.clone();
                ys.insert(j, m);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                *out.entry(ys).or_insert(0.0) += sign * norm * amp;
            }
        }
        out.retain(|_, v| v.abs() > 1e-14);
        out
    }

    fn oracle_canonical(modes: &[usize]) -> Wave {
        let mut f: Wave = HashMap::from([(vec![], 1.0)]);
        for &m in modes.iter().rev() {
            f = oracle_create(m, &f);
        }
        f
    }

    /// Returns ±1 with `a = sign * b`, or `None` if unrelated.
    fn relative_sign(a: &Wave, b: &Wave) -> Option<f64> {
        if a.is_empty() || a.len() != b.len() {
            return None;
        }
        let (k, va) = a.iter().next().unwrap();
        let s = va / b.get(k)?;
        let ok = a
            .iter()
            .all(|(k, v)| b.get(k).is_some_and(|w| (v - s * w).abs() < 1e-12));
        ok.then_some(s.signum())
    }

    fn state(modes: &[u8]) -> FockBasisState {
        FockBasisState::from_modes(&modes.iter().map(|&m| Mode(m)).collect::<Vec<_>>())
    }

    #[test]
    fn creation_examples() {
        let vac = FockBasisState::VACUUM;
        assert_eq!(apply_creation(vac, Mode(5)), Some((state(&[5]), 1.0)));
        assert_eq!(apply_creation(state(&[0]), Mode(0)), None);
        assert_eq!(
            apply_creation(state(&[0, 1]), Mode(2)),
            Some((state(&[0, 1, 2]), 1.0))
        );
        assert_eq!(apply_creation(state(&[0, 2]), Mode(2)), None);
        assert_eq!(
            apply_creation(state(&[0, 2]), Mode(1)),
            Some((state(&[0, 1, 2]), -1.0))
        );
    }

    #[test]
    fn annihilation_examples() {
        assert_eq!(apply_annihilation(FockBasisState::VACUUM, Mode(3)), None);
        assert_eq!(
            apply_annihilation(state(&[4]), Mode(4)),
            Some((FockBasisState::VACUUM, 1.0))
        );
        assert_eq!(
            apply_annihilation(state(&[0, 1]), Mode(1)),
            Some((state(&[0]), -1.0))
        );
    }

    #[test]
    fn creation_signs_match_antisymmetrized_oracle() {
        for bits in 0u64..8 {
            let s = FockBasisState(bits);
            let occ: Vec<usize> = s.occupied().map(|m| m.index()).collect();
            let f = oracle_canonical(&occ);
            for m in 0..3u8 {
                let got = apply_creation(s, Mode(m));
                let expect = oracle_create(m as usize, &f);
                match got {
                    None => assert!(expect.is_empty()),
                    Some((t, sign)) => {
                        let occ_t: Vec<usize> = t.occupied().map(|m| m.index()).collect();
                        let canon = oracle_canonical(&occ_t);
                        assert_eq!(relative_sign(&expect, &canon), Some(sign), "{s} + {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn species_commuting_ignores_other_species() {
        let d = 1;
        // modes 0,1 are species A, modes 2,3 species B
        let s = state(&[0]);
        let (_, global) =
            apply_ladder(s, Mode(2), true, Statistics::GlobalAnticommuting, d).unwrap();
        let (_, local) = apply_ladder(s, Mode(2), true, Statistics::SpeciesCommuting, d).unwrap();
        assert_eq!(global, -1.0);
        assert_eq!(local, 1.0);
        let s = state(&[0, 2]);
        let (_, a) = apply_ladder(s, Mode(1), true, Statistics::SpeciesCommuting, d).unwrap();
        assert_eq!(a, -1.0);
    }

    #[test]
    fn species_counts() {
        let space = ModeSpace::new(2).unwrap();
        let s = state(&[0, 3, 4, 5, 7]);
        assert_eq!(s.species_count(&space, Species::A), 2);
        assert_eq!(s.species_count(&space, Species::B), 3);
    }
}
