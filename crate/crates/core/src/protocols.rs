//! Multi-pass protocols built from single-pass propagators.
//!
//! A pass couples one atom to one cavity. On that pair the dynamics is block
//! diagonal: the pair {|+,0>, |-,1>} evolves under the pass matrix, |-,0> is
//! stationary at zero energy, and |+,1> would leak into |-,2>, which is
//! outside the truncated space. Every protocol here starts with at most one
//! excitation, so the truncation to `n <= 1` is exact.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, DensityMatrix};
use crate::error::{Error, Result};
use crate::hamiltonian::{Mat2, SystemParams};
use crate::propagator::{photon_population_rate, propagate_unitary_path, IntegratorOptions, IntegratorWarning, Trajectory};
use crate::pulse::{PulsePath, PulseSchedule};
use crate::state::{JointState, Subsystem};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Largest deviation from unit norm accepted for a qubit input `(alpha, beta)`.
pub const INPUT_NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassMode {
    Scrap,
    HalfScrap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassSpec {
    pub atom_index: usize,
    pub cavity_index: usize,
    pub sched: PulseSchedule,
    pub sys: SystemParams,
    pub mode: PassMode,
}

impl PassSpec {
    pub fn scrap(sched: PulseSchedule, sys: SystemParams) -> Self {
        PassSpec { atom_index: 0, cavity_index: 0, sched, sys, mode: PassMode::Scrap }
    }

    pub fn half_scrap(sched: PulseSchedule, sys: SystemParams) -> Self {
        PassSpec { atom_index: 0, cavity_index: 0, sched, sys, mode: PassMode::HalfScrap }
    }

    /// The same pass applied to another atom/cavity pair.
    pub fn on(self, atom_index: usize, cavity_index: usize) -> Self {
        PassSpec { atom_index, cavity_index, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        self.sched.validate()?;
        self.sys.validate()?;
        match self.mode {
            PassMode::HalfScrap if self.sys.delta != 0.0 => Err(Error::InvalidPass(format!(
                "half-SCRAP needs zero static detuning, got {}",
                self.sys.delta
            ))),
            PassMode::Scrap if !(self.sys.delta > 0.0) => Err(Error::InvalidPass(format!(
                "SCRAP needs a positive static detuning, got {}",
                self.sys.delta
            ))),
            PassMode::Scrap if !(self.sched.s0 > self.sys.delta) => Err(Error::InvalidPass(format!(
                "SCRAP needs the peak Stark shift {} to exceed the detuning {}",
                self.sched.s0, self.sys.delta
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassOutcome {
    pub state: JointState,
    /// Joint-state evolution during the pass.
    pub trajectory: Trajectory,
    pub matrix: Mat2,
}

/// Applies a pass matrix to the active atom/cavity pair.
pub fn apply_pair_matrix(state: &JointState, atom: usize, cavity: usize, m: &Mat2) -> Result<JointState> {
    let abit = state.bit(Subsystem::Atom(atom))?;
    let cbit = state.bit(Subsystem::Cavity(cavity))?;
    let amps = state.amplitudes();
    let mut out = amps.to_vec();
    for i in 0..amps.len() {
        let excited = (i >> abit) & 1 == 1;
        let photon = (i >> cbit) & 1 == 1;
        match (excited, photon) {
            (true, true) if amps[i] != ZERO => {
                return Err(Error::ExcitationOverflow { label: state.label(i) });
            }
            (true, false) => {
                // Partner |-,1> with the same spectators.
                let j = (i & !(1 << abit)) | (1 << cbit);
                let (a, b) = (amps[i], amps[j]);
                out[i] = m[0][0] * a + m[0][1] * b;
                out[j] = m[1][0] * a + m[1][1] * b;
            }
            _ => {}
        }
    }
    JointState::unchecked(state.atoms(), state.cavities(), out)
}

pub fn apply_pass(state: &JointState, pass: &PassSpec, opts: &IntegratorOptions) -> Result<PassOutcome> {
    pass.validate()?;
    state.bit(Subsystem::Atom(pass.atom_index))?;
    state.bit(Subsystem::Cavity(pass.cavity_index))?;
    let path = propagate_unitary_path(&pass.sched, &pass.sys, opts)?;
    let states = path
        .matrices
        .iter()
        .map(|m| apply_pair_matrix(state, pass.atom_index, pass.cavity_index, m).map(JointState::into_amplitudes))
        .collect::<Result<Vec<_>>>()?;
    let matrix = path.final_matrix();
    let final_state = apply_pair_matrix(state, pass.atom_index, pass.cavity_index, &matrix)?;
    let mut trajectory = Trajectory::from_states(state.labels(), path.times, states);
    trajectory.warnings = path.warnings;
    Ok(PassOutcome { state: final_state, trajectory, matrix })
}

fn check_input(alpha: C64, beta: C64) -> Result<()> {
    let n = alpha.norm_sqr() + beta.norm_sqr();
    if (n - 1.0).abs() > INPUT_NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm: n.sqrt() });
    }
    Ok(())
}

fn warnings_of(outcomes: &[&PassOutcome]) -> Vec<IntegratorWarning> {
    outcomes.iter().flat_map(|o| o.trajectory.warnings.iter().copied()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockReport {
    pub pass: PassOutcome,
    pub p_plus0: f64,
    pub p_minus1: f64,
    pub norm: f64,
    /// `dP(|-,1>)/dt` at the end of the window.
    pub end_rate: f64,
}

/// Single-photon generation from |+,0>.
pub fn generate_fock(pass: &PassSpec, opts: &IntegratorOptions) -> Result<FockReport> {
    let pass = pass.on(0, 0);
    if pass.mode != PassMode::Scrap {
        return Err(Error::InvalidPass("photon generation uses a SCRAP pass".into()));
    }
    let initial = JointState::basis(&[true], &[0])?;
    let outcome = apply_pass(&initial, &pass, opts)?;
    let s = outcome.state.amplitudes();
    let pair = [s[2], s[1]];
    let end_rate = photon_population_rate(&pair, &pass.sched, &pass.sys, opts.t_end);
    Ok(FockReport {
        p_plus0: s[2].norm_sqr(),
        p_minus1: s[1].norm_sqr(),
        norm: outcome.state.norm(),
        end_rate,
        pass: outcome,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomPhotonReport {
    pub pass: PassOutcome,
    pub p_plus0: f64,
    pub p_minus1: f64,
    /// Fidelity to `(|+,0> + |-,1>)/sqrt 2`.
    pub fidelity_raw: f64,
    /// The same with the relative phase of |-,1> optimized.
    pub fidelity_phase_optimized: f64,
    /// Entropy of the atom reduction, in bits.
    pub entropy: f64,
}

/// Half-SCRAP from |+,0>, Stark pulse first.
pub fn atom_photon_entangle(pass: &PassSpec, opts: &IntegratorOptions) -> Result<AtomPhotonReport> {
    let pass = pass.on(0, 0);
    if pass.mode != PassMode::HalfScrap || pass.sys.delta != 0.0 {
        return Err(Error::InvalidPass("atom-photon entanglement needs a half-SCRAP pass with zero detuning".into()));
    }
    if pass.sched.path != PulsePath::StarkFirst {
        return Err(Error::InvalidPass("atom-photon entanglement uses the Stark-first order".into()));
    }
    let initial = JointState::basis(&[true], &[0])?;
    let outcome = apply_pass(&initial, &pass, opts)?;
    let s = outcome.state.amplitudes();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let target = [ZERO, C64::new(h, 0.0), C64::new(h, 0.0), ZERO];
    let fidelity_raw = analysis::fidelity(&target, s, None)?;
    let fidelity_phase_optimized = analysis::fidelity(&target, s, Some(&[false, true, false, false]))?;
    let rho = analysis::partial_trace(&outcome.state, &[Subsystem::Atom(0)])?;
    let entropy = analysis::entanglement_entropy(&rho)?;
    Ok(AtomPhotonReport {
        p_plus0: s[2].norm_sqr(),
        p_minus1: s[1].norm_sqr(),
        fidelity_raw,
        fidelity_phase_optimized,
        entropy,
        pass: outcome,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomAtomReport {
    pub passes: Vec<PassOutcome>,
    pub intermediate: JointState,
    pub state: JointState,
    /// Two-atom density matrix with the cavity traced out.
    pub rho_atoms: DensityMatrix,
    pub concurrence: f64,
    /// Probability that the cavity is back in vacuum.
    pub p_vacuum: f64,
}

/// Half-SCRAP on atom 1 followed by SCRAP on atom 2, from |+,-,0>.
pub fn entangle_atoms(pass1: &PassSpec, pass2: &PassSpec, opts: &IntegratorOptions) -> Result<AtomAtomReport> {
    if pass1.mode != PassMode::HalfScrap || pass2.mode != PassMode::Scrap {
        return Err(Error::InvalidPass("atom-atom entanglement is half-SCRAP then SCRAP".into()));
    }
    let initial = JointState::basis(&[true, false], &[0])?;
    let first = apply_pass(&initial, &pass1.on(0, 0), opts)?;
    let second = apply_pass(&first.state, &pass2.on(1, 0), opts)?;
    let state = second.state.clone();
    let rho_atoms = analysis::partial_trace(&state, &[Subsystem::Atom(0), Subsystem::Atom(1)])?;
    let concurrence = analysis::concurrence(&rho_atoms)?;
    let p_vacuum = 1.0 - state.excited_probability(Subsystem::Cavity(0))?;
    Ok(AtomAtomReport {
        intermediate: first.state.clone(),
        passes: vec![first, second],
        state,
        rho_atoms,
        concurrence,
        p_vacuum,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QstAtomReport {
    pub passes: Vec<PassOutcome>,
    pub intermediate: JointState,
    pub state: JointState,
    /// Cavity after the first pass against `alpha|0> + beta|1>`, phase optimized.
    pub cavity_fidelity: f64,
    /// Atom 2 at the end against `alpha|-> + beta|+>`.
    pub atom2_fidelity_raw: f64,
    pub atom2_fidelity_phase_optimized: f64,
    pub atom1_p_ground: f64,
    pub p_vacuum: f64,
}

/// Moves `alpha|-> + beta|+>` from atom 1 to atom 2 through an empty cavity.
pub fn qst_atom_to_atom(
    alpha: C64,
    beta: C64,
    pass1: &PassSpec,
    pass2: &PassSpec,
    opts: &IntegratorOptions,
) -> Result<QstAtomReport> {
    check_input(alpha, beta)?;
    let initial = JointState::product(&[[alpha, beta], [ONE, ZERO]], &[[ONE, ZERO]])?;
    let first = apply_pass(&initial, &pass1.on(0, 0), opts)?;
    let second = apply_pass(&first.state, &pass2.on(1, 0), opts)?;

    let cavity = analysis::partial_trace(&first.state, &[Subsystem::Cavity(0)])?;
    let cavity_fidelity = analysis::reduced_fidelity(&cavity, &[alpha, beta], true)?;
    let state = second.state.clone();
    let atom2 = analysis::partial_trace(&state, &[Subsystem::Atom(1)])?;
    Ok(QstAtomReport {
        cavity_fidelity,
        atom2_fidelity_raw: analysis::reduced_fidelity(&atom2, &[alpha, beta], false)?,
        atom2_fidelity_phase_optimized: analysis::reduced_fidelity(&atom2, &[alpha, beta], true)?,
        atom1_p_ground: 1.0 - state.excited_probability(Subsystem::Atom(0))?,
        p_vacuum: 1.0 - state.excited_probability(Subsystem::Cavity(0))?,
        intermediate: first.state.clone(),
        passes: vec![first, second],
        state,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopReport {
    /// Index of the cavity that received the state.
    pub node: usize,
    pub fidelity_raw: f64,
    pub fidelity_phase_optimized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkReport {
    pub passes: Vec<PassOutcome>,
    pub state: JointState,
    pub hops: Vec<HopReport>,
    /// Vacuum probability of every cavity but the last.
    pub source_p_vacuum: Vec<f64>,
    /// Ground-state probability of every messenger atom.
    pub atoms_p_ground: Vec<f64>,
}

impl NetworkReport {
    pub fn final_fidelity(&self) -> f64 {
        self.hops.last().map_or(1.0, |h| h.fidelity_phase_optimized)
    }
}

/// Relays `alpha|0> + beta|1>` from cavity 1 down a chain of `node_count`
/// cavities, one messenger atom per hop. Each atom first picks the state up
/// with `capture` and then drops it with `release`.
pub fn network_chain(
    alpha: C64,
    beta: C64,
    node_count: usize,
    capture: &PassSpec,
    release: &PassSpec,
    opts: &IntegratorOptions,
) -> Result<NetworkReport> {
    check_input(alpha, beta)?;
    if node_count < 2 {
        return Err(Error::InvalidSelector("a network needs at least two nodes".into()));
    }
    if capture.mode != PassMode::Scrap || release.mode != PassMode::Scrap {
        return Err(Error::InvalidPass("network hops use SCRAP passes".into()));
    }
    let atoms = vec![[ONE, ZERO]; node_count - 1];
    let mut cavities = vec![[ONE, ZERO]; node_count];
    cavities[0] = [alpha, beta];
    let mut state = JointState::product(&atoms, &cavities)?;
    let mut passes = Vec::with_capacity(2 * (node_count - 1));
    let mut hops = Vec::with_capacity(node_count - 1);
    for hop in 0..node_count - 1 {
        let picked = apply_pass(&state, &capture.on(hop, hop), opts)?;
        let dropped = apply_pass(&picked.state, &release.on(hop, hop + 1), opts)?;
        state = dropped.state.clone();
        passes.push(picked);
        passes.push(dropped);
        let rho = analysis::partial_trace(&state, &[Subsystem::Cavity(hop + 1)])?;
        hops.push(HopReport {
            node: hop + 1,
            fidelity_raw: analysis::reduced_fidelity(&rho, &[alpha, beta], false)?,
            fidelity_phase_optimized: analysis::reduced_fidelity(&rho, &[alpha, beta], true)?,
        });
    }
    let source_p_vacuum = (0..node_count - 1)
        .map(|j| state.excited_probability(Subsystem::Cavity(j)).map(|p| 1.0 - p))
        .collect::<Result<_>>()?;
    let atoms_p_ground = (0..node_count - 1)
        .map(|i| state.excited_probability(Subsystem::Atom(i)).map(|p| 1.0 - p))
        .collect::<Result<_>>()?;
    Ok(NetworkReport { passes, state, hops, source_p_vacuum, atoms_p_ground })
}

/// Two-node network: the state of cavity 1 is carried to cavity 2 by one atom.
pub fn qst_cavity_to_cavity(
    alpha: C64,
    beta: C64,
    pass_a: &PassSpec,
    pass_b: &PassSpec,
    opts: &IntegratorOptions,
) -> Result<NetworkReport> {
    network_chain(alpha, beta, 2, pass_a, pass_b, opts)
}

/// Integrator warnings collected over every pass of a protocol.
pub fn collected_warnings(passes: &[PassOutcome]) -> Vec<IntegratorWarning> {
    warnings_of(&passes.iter().collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig3_pass() -> PassSpec {
        PassSpec::scrap(
            PulseSchedule::new(10.0, 1.0, 20.0, 1.0, 1.5, PulsePath::StarkFirst).unwrap(),
            SystemParams::lossless(10.0),
        )
    }

    fn opts(p: &PassSpec) -> IntegratorOptions {
        IntegratorOptions::for_schedule(&p.sched)
    }

    #[test]
    fn pass_validation() {
        let p = fig3_pass();
        assert!(p.validate().is_ok());
        assert!(PassSpec { mode: PassMode::HalfScrap, ..p }.validate().is_err());
        let low = PassSpec { sys: SystemParams::lossless(25.0), ..p };
        assert!(matches!(low.validate(), Err(Error::InvalidPass(_))));
        let zero = PassSpec { sys: SystemParams::lossless(0.0), ..p };
        assert!(zero.validate().is_err());
        assert!(PassSpec::half_scrap(p.sched, SystemParams::lossless(0.0)).validate().is_ok());
    }

    #[test]
    fn ground_vacuum_is_stationary() {
        let p = fig3_pass();
        let s = JointState::basis(&[false, false], &[0]).unwrap();
        let out = apply_pass(&s, &p, &opts(&p)).unwrap();
        assert_eq!(out.state, s);
    }

    #[test]
    fn transfers_both_ways() {
        let p = fig3_pass();
        let s = JointState::basis(&[true, false], &[0]).unwrap();
        let out = apply_pass(&s, &p, &opts(&p)).unwrap();
        assert!(out.state.probability("-,-,1").unwrap() >= 0.99);
        let back = apply_pass(&JointState::basis(&[false, false], &[1]).unwrap(), &p.on(1, 0), &opts(&p)).unwrap();
        assert!(back.state.probability("-,+,0").unwrap() >= 0.99);
    }

    #[test]
    fn overflow_is_detected() {
        let p = fig3_pass();
        let s = JointState::basis(&[true], &[1]).unwrap();
        assert!(matches!(apply_pass(&s, &p, &opts(&p)), Err(Error::ExcitationOverflow { .. })));
    }

    #[test]
    fn spectators_are_bit_identical() {
        let p = fig3_pass();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = JointState::product(&[[C64::new(h, 0.0), C64::new(0.0, h)], [ONE, ZERO]], &[[ONE, ZERO]]).unwrap();
        let out = apply_pass(&s, &p, &opts(&p)).unwrap();
        let idx = s.index_of("-,-,0").unwrap();
        assert_eq!(out.state.amplitudes()[idx], s.amplitudes()[idx]);
    }

    #[test]
    fn trivial_inputs_give_exact_outcomes() {
        let p = fig3_pass();
        let r = qst_atom_to_atom(ONE, ZERO, &p, &p, &opts(&p)).unwrap();
        assert_eq!(r.state, JointState::basis(&[false, false], &[0]).unwrap());
        assert_eq!(r.atom2_fidelity_raw, 1.0);
        let n = network_chain(ONE, ZERO, 4, &p, &p, &opts(&p)).unwrap();
        assert!(n.hops.iter().all(|h| h.fidelity_raw == 1.0 && h.fidelity_phase_optimized == 1.0));
        assert!(qst_atom_to_atom(ONE, ONE, &p, &p, &opts(&p)).is_err());
        assert!(network_chain(ONE, ZERO, 1, &p, &p, &opts(&p)).is_err());
    }

    #[test]
    fn uncoupled_half_scrap_keeps_initial_state() {
        let mut p = PassSpec::half_scrap(fig3_pass().sched, SystemParams::lossless(0.0));
        p.sched.g0 = 0.0;
        let r = atom_photon_entangle(&p, &opts(&p)).unwrap();
        assert_relative_eq!(r.p_plus0, 1.0, epsilon = 1e-8);
        assert_eq!(r.p_minus1, 0.0);
        assert!(atom_photon_entangle(&fig3_pass(), &opts(&p)).is_err());
    }
}
