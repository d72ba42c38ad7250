//! Continuity tracking of the instantaneous eigenstates along a trajectory.
//!
//! Consecutive samples are matched by maximal overlap. Where the passage is
//! locally diabatic, either a true crossing (`G` below the crossing epsilon
//! while `Delta` changes sign) or a step whose mixing-angle rate exceeds the
//! instantaneous gap, the labels are matched against the eigenvectors frozen
//! before the crossing instead, so they follow the diabatic continuation.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::{eigensystem, sample_hamiltonian, HamiltonianSample, SystemParams};
use crate::pulse::PulseSchedule;

use super::Trajectory;

/// Smallest squared overlap accepted between consecutive adiabatic samples.
pub const MIN_STEP_OVERLAP: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct TrackedEigenbasis {
    /// Diabatic state each tracked eigenstate is connected to at the window start.
    pub labels: [String; 2],
    pub times: Vec<f64>,
    pub vectors: Vec<[[C64; 2]; 2]>,
    /// Energy of each tracked state per sample.
    pub energies: Vec<[f64; 2]>,
    /// Squared overlap of each tracked state with its reference, per step.
    pub overlap_history: Vec<[f64; 2]>,
    /// Weight of the trajectory state on each tracked state, per sample.
    pub populations: Vec<[f64; 2]>,
    /// Steps (indexed by their end sample) treated as locally diabatic.
    pub diabatic_steps: Vec<usize>,
}

pub fn crossing_epsilon(sched: &PulseSchedule) -> f64 {
    if sched.g0 > 0.0 {
        1e-6 * sched.g0
    } else {
        1e-12
    }
}

fn overlap_sqr(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

/// Mixing angle on the continuous branch [0, pi/2] for G >= 0.
fn continuous_angle(h: &HamiltonianSample) -> f64 {
    0.5 * (2.0 * h.g).atan2(h.delta_eff)
}

pub fn track_adiabatic(traj: &Trajectory, sched: &PulseSchedule, sys: &SystemParams) -> Result<TrackedEigenbasis> {
    if !sys.is_lossless() {
        return Err(Error::DampedEigensystem);
    }
    if traj.labels.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: traj.labels.len() });
    }
    let eps = crossing_epsilon(sched);
    let n = traj.len();
    let mut out = TrackedEigenbasis {
        labels: [traj.labels[0].clone(), traj.labels[1].clone()],
        times: traj.times.clone(),
        vectors: Vec::with_capacity(n),
        energies: Vec::with_capacity(n),
        overlap_history: Vec::with_capacity(n.saturating_sub(1)),
        populations: Vec::with_capacity(n),
        diabatic_steps: Vec::new(),
    };

    let mut prev_h: Option<HamiltonianSample> = None;
    let mut prev_gap = 0.0_f64;
    let mut frozen: Option<[[C64; 2]; 2]> = None;
    for (k, &t) in traj.times.iter().enumerate() {
        let h = sample_hamiltonian(sched, sys, t);
        let eig = eigensystem(&h)?;
        let candidates = [(eig.v_plus, eig.e_plus), (eig.v_minus, eig.e_minus)];

        let assignment = match prev_h {
            None => {
                // Tracked state 0 is the one with most |+,0> character.
                let basis = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
                if overlap_sqr(&basis, &eig.v_plus) >= overlap_sqr(&basis, &eig.v_minus) {
                    [0, 1]
                } else {
                    [1, 0]
                }
            }
            Some(ph) => {
                let dt = t - traj.times[k - 1];
                let rate = (continuous_angle(&h) - continuous_angle(&ph)).abs() / dt;
                let gap = prev_gap.min(eig.gap());
                let true_crossing = h.g < eps && ph.g < eps && h.delta_eff.signum() != ph.delta_eff.signum();
                let diabatic = true_crossing || rate > gap;

                let previous = *out.vectors.last().expect("previous sample exists");
                let reference = if diabatic {
                    out.diabatic_steps.push(k);
                    *frozen.get_or_insert(previous)
                } else {
                    frozen.take().unwrap_or(previous)
                };
                let straight = overlap_sqr(&reference[0], &candidates[0].0);
                let swapped = overlap_sqr(&reference[0], &candidates[1].0);
                let best = straight.max(swapped);
                if !diabatic && best < MIN_STEP_OVERLAP {
                    return Err(Error::AmbiguousTracking { t });
                }
                out.overlap_history.push([best, best]);
                if straight >= swapped { [0, 1] } else { [1, 0] }
            }
        };

        let vectors = [candidates[assignment[0]].0, candidates[assignment[1]].0];
        let state = &traj.states[k];
        let psi = [state[0], state[1]];
        out.populations.push([overlap_sqr(&vectors[0], &psi), overlap_sqr(&vectors[1], &psi)]);
        out.energies.push([candidates[assignment[0]].1, candidates[assignment[1]].1]);
        out.vectors.push(vectors);
        prev_gap = eig.gap();
        prev_h = Some(h);
    }
    Ok(out)
}
