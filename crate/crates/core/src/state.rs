//! Sparse superpositions of Fock basis states.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockBasisState;
use crate::mode::{Mode, ModeSpace, Species};

pub type C64 = Complex64;

/// Amplitudes at or below this magnitude are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;
/// Allowed deviation of `‖ψ‖` from one for a normalized state.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Complex amplitudes over occupation-number basis states.
///
/// Storage is ordered by basis-state bits, so iteration and serialization
/// are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: BTreeMap<FockBasisState, C64>,
    prune_threshold: f64,
}

impl Default for StateVector {
    fn default() -> Self {
        Self::zero()
    }
}

impl StateVector {
    pub fn zero() -> Self {
        Self {
            amplitudes: BTreeMap::new(),
            prune_threshold: PRUNE_THRESHOLD,
        }
    }

    pub fn with_threshold(threshold: f64) -> Self {
        Self {
            amplitudes: BTreeMap::new(),
            prune_threshold: threshold,
        }
    }

    pub fn vacuum() -> Self {
        Self::basis(FockBasisState::VACUUM)
    }

    pub fn basis(state: FockBasisState) -> Self {
        let mut v = Self::zero();
        v.amplitudes.insert(state, C64::new(1.0, 0.0));
        v
    }

    /// Normalized `a†_{m1} ... a†_{mk} |0⟩` built by applying creators
    /// right to left, so the sign follows the operator order given.
    pub fn from_creators(modes: &[Mode]) -> Self {
        let mut state = Some((FockBasisState::VACUUM, 1.0));
        for &m in modes.iter().rev() {
            state = state.and_then(|(s, sign)| {
                crate::fock::apply_creation(s, m).map(|(t, x)| (t, sign * x))
            });
        }
        match state {
            Some((s, sign)) => {
                let mut v = Self::zero();
                v.amplitudes.insert(s, C64::new(sign, 0.0));
                v
            }
            None => Self::zero(),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (FockBasisState, C64)>>(pairs: I) -> Self {
        let mut v = Self::zero();
        for (s, a) in pairs {
            v.add_amplitude(s, a);
        }
        v.prune();
        v
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune_threshold
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, state: FockBasisState) -> C64 {
        self.amplitudes.get(&state).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FockBasisState, C64)> + '_ {
        self.amplitudes.iter().map(|(&s, &a)| (s, a))
    }

    /// Accumulates without pruning; call [`StateVector::prune`] afterwards.
    #[inline]
    pub fn add_amplitude(&mut self, state: FockBasisState, amp: C64) {
        *self.amplitudes.entry(state).or_default() += amp;
    }

    pub fn prune(&mut self) {
        let t = self.prune_threshold;
        self.amplitudes.retain(|_, a| a.norm() > t);
    }

    /// `self += scale * other`, pruned.
    pub fn add_scaled(&mut self, scale: C64, other: &StateVector) {
        for (s, a) in other.iter() {
            self.add_amplitude(s, scale * a);
        }
        self.prune();
    }

    pub fn scaled(&self, scale: C64) -> StateVector {
        let mut out = self.clone();
        for a in out.amplitudes.values_mut() {
            *a *= scale;
        }
        out.prune();
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .values()
            .fold(0.0, |acc, a| acc + a.norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<StateVector> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Domain(format!(
                "cannot normalize vector of norm {n}"
            )));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub(crate) fn require_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            Err(Error::NotNormalized { norm: n })
        } else {
            Ok(())
        }
    }

    /// Maximum amplitude-wise deviation `max_s |self(s) - other(s)|`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        let mut worst: f64 = 0.0;
        for (s, a) in self.iter() {
            worst = worst.max((a - other.amplitude(s)).norm());
        }
        for (s, b) in other.iter() {
            if !self.amplitudes.contains_key(&s) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }

    /// `(n_a, n_b)` if every basis state carries the same species counts.
    pub fn particle_numbers(&self, space: &ModeSpace) -> Option<(usize, usize)> {
        let mut it = self.amplitudes.keys();
        let first = it.next()?;
        let counts = |s: &FockBasisState| {
            (
                s.species_count(space, Species::A),
                s.species_count(space, Species::B),
            )
        };
        let c = counts(first);
        it.all(|s| counts(s) == c).then_some(c)
    }

    /// Squared weight on basis states satisfying `pred`.
    pub fn probability_where<F: Fn(FockBasisState) -> bool>(&self, pred: F) -> f64 {
        self.iter()
            .filter(|(s, _)| pred(*s))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// `⟨φ|ψ⟩`, conjugate-linear in `φ`.
pub fn inner_product(phi: &StateVector, psi: &StateVector) -> C64 {
    // iterate the sparser side
    if phi.len() <= psi.len() {
        phi.iter().map(|(s, a)| a.conj() * psi.amplitude(s)).sum()
    } else {
        psi.iter().map(|(s, b)| phi.amplitude(s).conj() * b).sum()
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, a) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn normalize_scaled_basis() {
        let s = FockBasisState(0b101);
        let v = StateVector::basis(s).scaled(c(2.0));
        let n = v.normalized().unwrap();
        assert!((n.amplitude(s) - c(1.0)).norm() < 1e-15);
        assert!(n.is_normalized());
    }

    #[test]
    fn zero_norm_normalize_fails() {
        assert!(matches!(
            StateVector::zero().normalized(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cancellation_prunes_to_empty() {
        let s = StateVector::basis(FockBasisState(3));
        let mut v = s.clone();
        v.add_scaled(c(-1.0), &s);
        assert!(v.is_empty());
    }

    #[test]
    fn small_amplitude_survives_prune() {
        let v = StateVector::from_pairs([(FockBasisState(1), c(1e-10))]);
        assert_eq!(v.len(), 1);
        let w = StateVector::from_pairs([(FockBasisState(1), c(1e-15))]);
        assert!(w.is_empty());
    }

    #[test]
    fn basis_states_are_orthonormal() {
        let a = StateVector::basis(FockBasisState(1));
        let b = StateVector::basis(FockBasisState(2));
        assert_eq!(inner_product(&a, &b), C64::default());
        assert_eq!(inner_product(&a, &a), c(1.0));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let a = StateVector::from_pairs([
            (FockBasisState(1), C64::new(0.3, 0.4)),
            (FockBasisState(2), C64::new(-0.1, 0.2)),
        ]);
        let b = StateVector::from_pairs([(FockBasisState(1), C64::new(0.5, -0.5))]);
        let i = C64::new(0.0, 1.0);
        let lhs = inner_product(&a.scaled(i), &b);
        let rhs = i.conj() * inner_product(&a, &b);
        assert!((lhs - rhs).norm() < 1e-15);
        let self_ip = inner_product(&a, &a);
        assert!(self_ip.im.abs() < 1e-16 && self_ip.re > 0.0);
    }
}
