//! Second-quantized operators as sums of scaled ladder-operator products.
//!
//! Products are kept verbatim in the order written; no normal ordering is
//! attempted. Applying a term to a ket runs its factors right to left with
//! the fermionic sign rules of [`crate::fock`].

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{apply_ladder, FockBasisState, Statistics};
use crate::mode::{Mode, ModeSpace};
use crate::sector::Sector;
use crate::state::{StateVector, C64};

/// Maximum number of ladder operators in a single product.
pub const MAX_FACTORS: usize = 8;

/// Tolerance of the hermiticity check.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ladder {
    Create,
    Annihilate,
}

impl Ladder {
    fn flipped(self) -> Ladder {
        match self {
            Ladder::Create => Ladder::Annihilate,
            Ladder::Annihilate => Ladder::Create,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub mode: Mode,
    pub kind: Ladder,
}

impl Factor {
    pub fn create(mode: Mode) -> Self {
        Self {
            mode,
            kind: Ladder::Create,
        }
    }

    pub fn annihilate(mode: Mode) -> Self {
        Self {
            mode,
            kind: Ladder::Annihilate,
        }
    }
}

/// `coefficient * f_1 f_2 ... f_k`, acting on kets from the right.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTerm {
    pub coefficient: C64,
    factors: Vec<Factor>,
}

impl OperatorTerm {
    pub fn new(coefficient: C64, factors: Vec<Factor>) -> Result<Self> {
        if factors.len() > MAX_FACTORS {
            return Err(Error::Domain(format!(
                "operator product of length {} exceeds cap {MAX_FACTORS}",
                factors.len()
            )));
        }
        Ok(Self {
            coefficient,
            factors,
        })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Image of a single basis state, or `None` if the term annihilates it.
    #[inline]
    pub fn act(
        &self,
        state: FockBasisState,
        stats: Statistics,
        d: usize,
    ) -> Option<(FockBasisState, C64)> {
        let mut s = state;
        let mut sign = 1.0;
        for f in self.factors.iter().rev() {
            let (t, x) = apply_ladder(s, f.mode, f.kind == Ladder::Create, stats, d)?;
            s = t;
            sign *= x;
        }
        Some((s, self.coefficient * sign))
    }

    pub fn adjoint(&self) -> OperatorTerm {
        OperatorTerm {
            coefficient: self.coefficient.conj(),
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| Factor {
                    mode: f.mode,
                    kind: f.kind.flipped(),
                })
                .collect(),
        }
    }

    /// Human-readable form with structured mode labels.
    pub fn describe(&self, space: &ModeSpace) -> String {
        let mut out = format!("({:+}{:+}i)", self.coefficient.re, self.coefficient.im);
        for f in &self.factors {
            let dag = if f.kind == Ladder::Create { "†" } else { "" };
            out.push_str(&format!(" {}{}", space.id(f.mode), dag));
        }
        out
    }
}

impl fmt::Display for OperatorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+}{:+}i)", self.coefficient.re, self.coefficient.im)?;
        for x in &self.factors {
            let dag = if x.kind == Ladder::Create { "†" } else { "" };
            write!(f, " c{}{}", x.mode.0, dag)?;
        }
        Ok(())
    }
}

/// Finite sum of operator terms, merged by factor sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorExpr {
    terms: Vec<OperatorTerm>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::scalar(C64::new(1.0, 0.0))
    }

    pub fn scalar(c: C64) -> Self {
        Self::from_terms(vec![OperatorTerm {
            coefficient: c,
            factors: Vec::new(),
        }])
    }

    pub fn creation(mode: Mode) -> Self {
        Self::product(C64::new(1.0, 0.0), &[Factor::create(mode)])
            .expect("single factor within cap")
    }

    pub fn annihilation(mode: Mode) -> Self {
        Self::product(C64::new(1.0, 0.0), &[Factor::annihilate(mode)])
            .expect("single factor within cap")
    }

    /// `a†_m a_m`.
    pub fn number(mode: Mode) -> Self {
        Self::product(
            C64::new(1.0, 0.0),
            &[Factor::create(mode), Factor::annihilate(mode)],
        )
        .expect("two factors within cap")
    }

    /// A single term `coefficient * factors`.
    pub fn product(coefficient: C64, factors: &[Factor]) -> Result<Self> {
        Ok(Self::from_terms(vec![OperatorTerm::new(
            coefficient,
            factors.to_vec(),
        )?]))
    }

    /// Merges terms with identical factor sequences and drops zero terms.
    /// First-appearance order is kept.
    pub fn from_terms(terms: Vec<OperatorTerm>) -> Self {
        let mut slot: HashMap<Vec<Factor>, usize> = HashMap::new();
        let mut merged: Vec<OperatorTerm> = Vec::new();
        for t in terms {
            match slot.get(&t.factors) {
                Some(&i) => merged[i].coefficient += t.coefficient,
                None => {
                    slot.insert(t.factors.clone(), merged.len());
                    merged.push(t);
                }
            }
        }
        merged.retain(|t| t.coefficient.norm() > crate::state::PRUNE_THRESHOLD);
        Self { terms: merged }
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> OperatorExpr {
        Self::from_terms(self.terms.iter().map(OperatorTerm::adjoint).collect())
    }

    /// Operator product `self * other`; fails if a product exceeds the cap.
    pub fn compose(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for l in &self.terms {
            for r in &other.terms {
                let mut factors = l.factors.clone();
                factors.extend_from_slice(&r.factors);
                terms.push(OperatorTerm::new(l.coefficient * r.coefficient, factors)?);
            }
        }
        Ok(Self::from_terms(terms))
    }

    pub fn scale(&self, c: C64) -> OperatorExpr {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| OperatorTerm {
                    coefficient: t.coefficient * c,
                    factors: t.factors.clone(),
                })
                .collect(),
        )
    }

    /// Applies the operator to a ket under the global sign convention.
    pub fn apply(&self, psi: &StateVector) -> StateVector {
        self.apply_with(psi, Statistics::GlobalAnticommuting, 0)
    }

    /// Applies the operator with an explicit exchange convention; `d` locates
    /// the species-B block for [`Statistics::SpeciesCommuting`].
    pub fn apply_with(&self, psi: &StateVector, stats: Statistics, d: usize) -> StateVector {
        let mut out = StateVector::with_threshold(psi.prune_threshold());
        for (s, amp) in psi.iter() {
            for term in &self.terms {
                if let Some((t, c)) = term.act(s, stats, d) {
                    out.add_amplitude(t, c * amp);
                }
            }
        }
        out.prune();
        out
    }

    /// Nonzero matrix elements `(row, col, value)` on a sector, summed per
    /// entry and sorted by `(col, row)`.
    pub fn sparse_on_sector(
        &self,
        sector: &Sector,
        stats: Statistics,
    ) -> Result<Vec<(usize, usize, C64)>> {
        let d = sector.d();
        let mut entries: Vec<(usize, usize, C64)> = Vec::new();
        let mut column: Vec<(usize, C64)> = Vec::new();
        for (col, &s) in sector.basis().iter().enumerate() {
            column.clear();
            for term in &self.terms {
                if let Some((t, c)) = term.act(s, stats, d) {
                    let row = sector.index_of(t).ok_or_else(|| Error::SectorLeak {
                        term: term.describe(sector.space()),
                        d,
                        n_a: sector.n_a(),
                        n_b: sector.n_b(),
                    })?;
                    column.push((row, c));
                }
            }
            column.sort_by_key(|&(r, _)| r);
            let mut k = 0;
            while k < column.len() {
                let row = column[k].0;
                let mut v = C64::default();
                while k < column.len() && column[k].0 == row {
                    v += column[k].1;
                    k += 1;
                }
                if v.norm() > 0.0 {
                    entries.push((row, col, v));
                }
            }
        }
        Ok(entries)
    }

    /// Dense matrix `M[r][c] = ⟨basis_r| self |basis_c⟩`.
    pub fn matrix_on_sector(&self, sector: &Sector) -> Result<DMatrix<C64>> {
        self.matrix_on_sector_with(sector, Statistics::GlobalAnticommuting)
    }

    pub fn matrix_on_sector_with(
        &self,
        sector: &Sector,
        stats: Statistics,
    ) -> Result<DMatrix<C64>> {
        let n = sector.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, c, v) in self.sparse_on_sector(sector, stats)? {
            m[(r, c)] += v;
        }
        Ok(m)
    }

    /// Compares the sector matrix with its conjugate transpose.
    pub fn is_hermitian(&self, sector: &Sector) -> Result<HermiticityCheck> {
        let entries = self.sparse_on_sector(sector, Statistics::GlobalAnticommuting)?;
        Ok(hermiticity_of_entries(&entries))
    }
}

/// Outcome of [`OperatorExpr::is_hermitian`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiticityCheck {
    pub hermitian: bool,
    pub max_deviation: f64,
}

pub(crate) fn hermiticity_of_entries(entries: &[(usize, usize, C64)]) -> HermiticityCheck {
    let lookup: HashMap<(usize, usize), C64> =
        entries.iter().map(|&(r, c, v)| ((r, c), v)).collect();
    let mut worst: f64 = 0.0;
    for (&(r, c), &v) in &lookup {
        let mirror = lookup.get(&(c, r)).copied().unwrap_or_default();
        worst = worst.max((v - mirror.conj()).norm());
    }
    HermiticityCheck {
        hermitian: worst <= HERMITICITY_TOLERANCE,
        max_deviation: worst,
    }
}

impl Add for OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, rhs: OperatorExpr) -> OperatorExpr {
        let mut terms = self.terms;
        terms.extend(rhs.terms);
        OperatorExpr::from_terms(terms)
    }
}

impl<'a> Add<&'a OperatorExpr> for &'a OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, rhs: &OperatorExpr) -> OperatorExpr {
        self.clone() + rhs.clone()
    }
}

impl Neg for OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Sub for OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: OperatorExpr) -> OperatorExpr {
        self + (-rhs)
    }
}

impl Mul<C64> for OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: C64) -> OperatorExpr {
        self.scale(rhs)
    }
}

impl Mul<f64> for OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: f64) -> OperatorExpr {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl std::iter::Sum for OperatorExpr {
    fn sum<I: Iterator<Item = OperatorExpr>>(iter: I) -> OperatorExpr {
        OperatorExpr::from_terms(iter.flat_map(|e| e.terms).collect())
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}
