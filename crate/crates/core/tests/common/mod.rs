#![allow(dead_code)]

use cobosim::fock::FockBasisState;
use cobosim::mode::{Mode, ModeSpace};
use cobosim::operator::{Factor, OperatorExpr, OperatorTerm};
use cobosim::state::{StateVector, C64};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Arbitrary (unnormalized) state on the full Fock space of `d`.
pub fn any_state(d: usize) -> impl Strategy<Value = StateVector> {
    let n = 4 * d as u32;
    prop::collection::vec((0u64..(1u64 << n), -1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(
        |entries| {
            let mut psi = StateVector::zero();
            for (bits, re, im) in entries {
                psi.add_amplitude(FockBasisState(bits), c(re, im));
            }
            psi.prune();
            psi
        },
    )
}

pub fn any_factor(d: usize) -> impl Strategy<Value = Factor> {
    (0..4 * d as u8, any::<bool>()).prop_map(|(m, create)| {
        if create {
            Factor::create(Mode(m))
        } else {
            Factor::annihilate(Mode(m))
        }
    })
}

/// Sum of up to three random ladder products.
pub fn any_operator(d: usize) -> impl Strategy<Value = OperatorExpr> {
    prop::collection::vec(
        (
            -1.0f64..1.0,
            -1.0f64..1.0,
            prop::collection::vec(any_factor(d), 0..5),
        ),
        1..4,
    )
    .prop_map(|terms| {
        OperatorExpr::from_terms(
            terms
                .into_iter()
                .map(|(re, im, f)| OperatorTerm::new(c(re, im), f).unwrap())
                .collect(),
        )
    })
}

/// Hermitian same-species hopping with random couplings.
pub fn random_hopping(space: &ModeSpace, couplings: &[(usize, usize, f64, f64)]) -> OperatorExpr {
    let mut h = OperatorExpr::zero();
    for &(m, n, re, im) in couplings {
        let (m, n) = (Mode(m as u8), Mode(n as u8));
        let half = 2 * space.d();
        let out_of_range = m.index() >= space.num_modes() || n.index() >= space.num_modes();
        if m == n || out_of_range || m.index() / half != n.index() / half {
            continue;
        }
        let t =
            OperatorExpr::product(c(re, im), &[Factor::create(m), Factor::annihilate(n)]).unwrap();
        h = h + t.adjoint() + t;
    }
    h
}

/// Haar-ish random unitary from the QR factor of a Gaussian matrix.
pub fn unitary_from(entries: &[(f64, f64)], n: usize) -> nalgebra::DMatrix<C64> {
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let (re, im) = entries[(i * n + j) % entries.len()];
        c(re + if i == j { 0.5 } else { 0.0 }, im)
    });
    m.qr().q()
}

pub fn any_gamma(d: usize) -> impl Strategy<Value = nalgebra::DMatrix<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_filter_map(
        "nonzero wavefunction",
        move |v| {
            let g = nalgebra::DMatrix::from_fn(d, d, |i, j| c(v[i * d + j].0, v[i * d + j].1));
            let n = g.norm();
            (n > 1e-3).then(|| g / c(n, 0.0))
        },
    )
}

pub fn any_spectrum(max_d: usize) -> impl Strategy<Value = cobosim::coboson::SchmidtSpectrum> {
    prop::collection::vec(0.01f64..1.0, 1..=max_d)
        .prop_map(|w| cobosim::coboson::SchmidtSpectrum::from_weights(&w).unwrap())
}
