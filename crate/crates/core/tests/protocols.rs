use std::f64::consts::FRAC_1_SQRT_2;

use scrap_core::analysis::{entanglement_entropy, partial_trace};
use scrap_core::protocols::{
    apply_pass, atom_photon_entangle, entangle_atoms, generate_fock, network_chain, qst_atom_to_atom,
    qst_cavity_to_cavity, PassSpec,
};
use scrap_core::{Complex64 as C64, IntegratorOptions, JointState, PulsePath, PulseSchedule, Subsystem, SystemParams};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

fn sched() -> PulseSchedule {
    PulseSchedule::new(10.0, 1.0, 20.0, 1.0, 1.5, PulsePath::StarkFirst).unwrap()
}

fn scrap() -> PassSpec {
    PassSpec::scrap(sched(), SystemParams::lossless(10.0))
}

fn half() -> PassSpec {
    PassSpec::half_scrap(sched(), SystemParams::lossless(0.0))
}

fn opts() -> IntegratorOptions {
    IntegratorOptions::for_schedule(&sched())
}

#[test]
fn fock_generation_lossless() {
    let r = generate_fock(&scrap(), &opts()).unwrap();
    assert!(r.p_minus1 >= 0.99);
    assert!((r.norm - 1.0).abs() < 1e-8);
}

#[test]
fn excitation_number_is_conserved_by_every_pass() {
    let h = FRAC_1_SQRT_2;
    let initial = JointState::product(&[[C64::new(h, 0.0), C64::new(0.0, h)], [ONE, ZERO]], &[[ONE, ZERO]]).unwrap();
    let first = apply_pass(&initial, &scrap(), &opts()).unwrap();
    let second = apply_pass(&first.state, &scrap().on(1, 0), &opts()).unwrap();
    for traj in [&first.trajectory, &second.trajectory] {
        for s in &traj.states {
            let st = JointState::unchecked(2, 1, s.clone()).unwrap();
            assert!((st.mean_excitation() - initial.mean_excitation()).abs() < 1e-8);
            for (i, a) in s.iter().enumerate() {
                if JointState::excitation(i) > 1 {
                    assert_eq!(*a, ZERO);
                }
            }
        }
    }
}

#[test]
fn double_scrap_returns_to_start() {
    let s = JointState::basis(&[true], &[0]).unwrap();
    let once = apply_pass(&s, &scrap(), &opts()).unwrap();
    let twice = apply_pass(&once.state, &scrap(), &opts()).unwrap();
    assert!(twice.state.probability("+,0").unwrap() >= 0.98);
}

#[test]
fn half_scrap_makes_a_maximally_entangled_pair() {
    let r = atom_photon_entangle(&half(), &opts()).unwrap();
    assert!((r.p_plus0 - 0.5).abs() <= 0.02);
    assert!((r.p_minus1 - 0.5).abs() <= 0.02);
    assert!((r.entropy - 1.0).abs() <= 0.03);
    assert!(r.fidelity_phase_optimized >= 0.99);
    assert!(r.fidelity_phase_optimized + 1e-12 >= r.fidelity_raw);
    let rho = partial_trace(&r.pass.state, &[Subsystem::Cavity(0)]).unwrap();
    assert!((entanglement_entropy(&rho).unwrap() - r.entropy).abs() < 1e-10);
}

#[test]
fn half_scrap_requires_zero_detuning_and_stark_first() {
    assert!(atom_photon_entangle(&scrap(), &opts()).is_err());
    let mut p = half();
    p.sched.path = PulsePath::CavityFirst;
    assert!(atom_photon_entangle(&p, &opts()).is_err());
}

#[test]
fn atom_atom_entanglement_leaves_cavity_empty() {
    let r = entangle_atoms(&half(), &scrap(), &opts()).unwrap();
    assert!((r.intermediate.probability("+,-,0").unwrap() - 0.5).abs() <= 0.02);
    assert!((r.intermediate.probability("-,-,1").unwrap() - 0.5).abs() <= 0.02);
    assert!(r.concurrence >= 0.98, "{}", r.concurrence);
    assert!(r.p_vacuum >= 0.98);
}

#[test]
fn idle_second_atom_leaves_atoms_unentangled() {
    let mut p2 = scrap();
    p2.sched.g0 = 0.0;
    let r = entangle_atoms(&half(), &p2, &opts()).unwrap();
    assert!(r.concurrence < 1e-6, "{}", r.concurrence);
}

#[test]
fn atom_state_transfer() {
    let r = qst_atom_to_atom(ZERO, ONE, &scrap(), &scrap(), &opts()).unwrap();
    let p_plus = r.state.excited_probability(Subsystem::Atom(1)).unwrap();
    assert!(p_plus >= 0.98);
    let h = FRAC_1_SQRT_2;
    let r = qst_atom_to_atom(C64::new(h, 0.0), C64::new(h, 0.0), &scrap(), &scrap(), &opts()).unwrap();
    assert!(r.atom2_fidelity_phase_optimized >= 0.98);
    assert!(r.cavity_fidelity >= 0.98);
    assert!(r.atom1_p_ground >= 0.98 && r.p_vacuum >= 0.98);
}

#[test]
fn transfer_is_linear_in_the_input() {
    let (a, b) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
    let mix = qst_atom_to_atom(a, b, &scrap(), &scrap(), &opts()).unwrap().state;
    let r0 = qst_atom_to_atom(ONE, ZERO, &scrap(), &scrap(), &opts()).unwrap().state;
    let r1 = qst_atom_to_atom(ZERO, ONE, &scrap(), &scrap(), &opts()).unwrap().state;
    let lin = r0.combine(a, &r1, b).unwrap();
    let residual = mix
        .amplitudes()
        .iter()
        .zip(lin.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(residual <= 1e-8, "{residual}");
}

#[test]
fn cavity_to_cavity_transfer() {
    let r = qst_cavity_to_cavity(ZERO, ONE, &scrap(), &scrap(), &opts()).unwrap();
    assert!(r.state.excited_probability(Subsystem::Cavity(1)).unwrap() >= 0.98);
    let h = FRAC_1_SQRT_2;
    let r = qst_cavity_to_cavity(C64::new(h, 0.0), C64::new(0.0, h), &scrap(), &scrap(), &opts()).unwrap();
    assert!(r.final_fidelity() >= 0.98);
    assert!(r.source_p_vacuum[0] >= 0.98 && r.atoms_p_ground[0] >= 0.98);

    let r = qst_cavity_to_cavity(ONE, ZERO, &scrap(), &scrap(), &opts()).unwrap();
    assert_eq!(r.state, JointState::basis(&[false], &[0, 0]).unwrap());
}

#[test]
fn two_node_chain_is_the_cavity_transfer() {
    let (a, b) = (C64::new(0.28, 0.0), C64::new(0.0, 0.96));
    let chain = network_chain(a, b, 2, &scrap(), &scrap(), &opts()).unwrap();
    let direct = qst_cavity_to_cavity(a, b, &scrap(), &scrap(), &opts()).unwrap();
    assert_eq!(chain.state, direct.state);
    assert_eq!(chain.hops, direct.hops);
}

#[test]
fn three_node_chain() {
    let h = FRAC_1_SQRT_2;
    let r = network_chain(C64::new(h, 0.0), C64::new(0.0, h), 3, &scrap(), &scrap(), &opts()).unwrap();
    assert_eq!(r.hops.len(), 2);
    assert!(r.final_fidelity() >= 0.96);
    for w in r.hops.windows(2) {
        assert!(w[1].fidelity_phase_optimized <= w[0].fidelity_phase_optimized + 1e-12);
    }
    let exact = network_chain(ONE, ZERO, 3, &scrap(), &scrap(), &opts()).unwrap();
    assert_eq!(exact.final_fidelity(), 1.0);
}
