//! Mode indexing, ladder signs and canonical anticommutation on a tiny space.

use cobosim::fock::{apply_annihilation, apply_creation, FockBasisState};
use cobosim::mode::{ModeSpace, Site};
use cobosim::operator::OperatorExpr;
use cobosim::state::StateVector;

pub fn main() {
    let space = ModeSpace::new(2).expect("d = 2");
    println!("{} modes for d = 2:", space.num_modes());
    for m in space.all_modes() {
        println!("  {:>2} -> {}", m.index(), space.id(m));
    }

    let (a1l, a2r) = (space.a(1, Site::L), space.a(2, Site::R));
    let s = FockBasisState::from_modes(&[a2r]);
    println!("a†_2R {s} blocked: {}", apply_creation(s, a2r).is_none());
    let (s2, sign) = apply_creation(s, a1l).expect("empty mode");
    println!("a†_1L {s} = {sign:+} {s2}");
    let (s3, sign) = apply_annihilation(s2, a2r).expect("occupied");
    println!("a_2R {s2} = {sign:+} {s3}");

    // {a_m, a†_n} = δ_mn checked on a two-particle state
    let psi = StateVector::from_creators(&[space.a(1, Site::R), space.b(2, Site::L)]);
    for (m, n) in [(a1l, a1l), (a1l, a2r), (a2r, a2r)] {
        let ac = OperatorExpr::annihilation(m)
            .compose(&OperatorExpr::creation(n))
            .unwrap()
            + OperatorExpr::creation(n)
                .compose(&OperatorExpr::annihilation(m))
                .unwrap();
        let out = ac.apply(&psi);
        let expect = if m == n {
            psi.clone()
        } else {
            StateVector::zero()
        };
        println!(
            "{{a_{}, a†_{}}} deviation {:.1e}",
            space.id(m),
            space.id(n),
            out.max_abs_diff(&expect)
        );
    }
}
