//! Fixed-step integration of `i d|psi>/dt = H(t)|psi>` over one pass of an
//! atom through the cavity.
//!
//! The scheme is the classical fourth-order Runge-Kutta method with the
//! Hamiltonian sampled at the stage times. The number of steps is chosen so
//! that the last step lands exactly on `t_end`, which keeps runs
//! bit-reproducible. The norm is never renormalized: drift beyond
//! `norm_tolerance` is reported as [`Error::NonConvergent`].

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{sample_hamiltonian, Mat2, SystemParams};
use crate::pulse::{cavity_rabi, stark_shift, PulseSchedule};

mod tracking;

pub use tracking::{track_adiabatic, TrackedEigenbasis};

/// Labels of the two effective basis states, in matrix order.
pub const PASS_LABELS: [&str; 2] = ["+,0", "-,1"];

/// Pulse durations a window must extend on each side of `t = 0`, beyond the
/// delay, to count as covering both pulses.
pub const WINDOW_WIDTHS: f64 = 3.0;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOptions {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub norm_tolerance: f64,
    /// Keep one sample every `record_stride` steps. The first and last
    /// samples are always kept.
    pub record_stride: usize,
}

impl IntegratorOptions {
    /// Default window `[-5T, 5T + tau]`, with `T` the longer pulse duration.
    pub fn for_schedule(sched: &PulseSchedule) -> Self {
        let t = sched.t_c.max(sched.t_s);
        IntegratorOptions {
            t_start: -5.0 * t,
            t_end: 5.0 * t + sched.tau,
            dt: DEFAULT_DT,
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
            record_stride: 10,
        }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        IntegratorOptions { dt, ..self }
    }

    pub fn with_window(self, t_start: f64, t_end: f64) -> Self {
        IntegratorOptions { t_start, t_end, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let span = self.t_end - self.t_start;
        if !(self.t_start.is_finite() && self.t_end.is_finite() && span > 0.0) {
            return Err(Error::InvalidOptions("t_start must be below t_end".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidOptions("dt must be positive".into()));
        }
        if self.dt > span / 100.0 {
            return Err(Error::InvalidOptions(format!(
                "dt = {} is coarser than 1/100 of the window",
                self.dt
            )));
        }
        if !(self.norm_tolerance > 0.0) {
            return Err(Error::InvalidOptions("norm_tolerance must be positive".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidOptions("record_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps and the actual step length.
    pub fn steps(&self) -> (usize, f64) {
        let span = self.t_end - self.t_start;
        let n = (span / self.dt).ceil().max(1.0) as usize;
        (n, span / n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegratorWarning {
    /// A window edge lies closer to `t = 0` than
    /// `max(3 t_c, 3 t_s + tau)`. `relative_amplitude` is the largest pulse
    /// value at that edge relative to its peak.
    WindowTooNarrow { edge: f64, required: f64, relative_amplitude: f64 },
}

impl fmt::Display for IntegratorWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegratorWarning::WindowTooNarrow { edge, required, relative_amplitude } => write!(
                f,
                "window edge t = {edge} is inside |t| = {required}; pulses truncated at {relative_amplitude:.3e} of peak"
            ),
        }
    }
}

fn edge_amplitude(sched: &PulseSchedule, t: f64) -> f64 {
    let g = if sched.g0 > 0.0 { cavity_rabi(sched, t) / sched.g0 } else { 0.0 };
    let s = if sched.s0 > 0.0 { stark_shift(sched, t).abs() / sched.s0 } else { 0.0 };
    g.max(s)
}

pub fn window_warnings(sched: &PulseSchedule, opts: &IntegratorOptions) -> Vec<IntegratorWarning> {
    let required = (WINDOW_WIDTHS * sched.t_c).max(WINDOW_WIDTHS * sched.t_s + sched.tau);
    [(opts.t_start, -opts.t_start), (opts.t_end, opts.t_end)]
        .into_iter()
        .filter(|&(_, reach)| reach < required)
        .map(|(edge, _)| IntegratorWarning::WindowTooNarrow {
            edge,
            required,
            relative_amplitude: edge_amplitude(sched, edge),
        })
        .collect()
}

/// Sampled time evolution over a labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub populations: Vec<Vec<f64>>,
    pub norm: Vec<f64>,
    /// Weights on the two tracked instantaneous eigenstates, lossless passes only.
    pub adiabatic_pops: Option<Vec<[f64; 2]>>,
    pub warnings: Vec<IntegratorWarning>,
}

impl Trajectory {
    pub fn from_states(labels: Vec<String>, times: Vec<f64>, states: Vec<Vec<C64>>) -> Self {
        let populations: Vec<Vec<f64>> = states
            .iter()
            .map(|s| s.iter().map(|a| a.norm_sqr()).collect())
            .collect();
        let norm = populations.iter().map(|p| p.iter().sum::<f64>().sqrt()).collect();
        Trajectory {
            labels,
            times,
            states,
            populations,
            norm,
            adiabatic_pops: None,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[C64] {
        self.states.last().expect("trajectory has at least one sample")
    }

    pub fn final_populations(&self) -> &[f64] {
        self.populations.last().expect("trajectory has at least one sample")
    }

    pub fn final_norm(&self) -> f64 {
        *self.norm.last().expect("trajectory has at least one sample")
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Fills `adiabatic_pops` from continuity-tracked eigenstates.
    pub fn with_tracking(mut self, sched: &PulseSchedule, sys: &SystemParams) -> Result<(Self, TrackedEigenbasis)> {
        let tracked = track_adiabatic(&self, sched, sys)?;
        self.adiabatic_pops = Some(tracked.populations.clone());
        Ok((self, tracked))
    }
}

#[inline]
fn derivative(m: &Mat2, v: &[C64; 2]) -> [C64; 2] {
    // -i H v
    let hv0 = m[0][0] * v[0] + m[0][1] * v[1];
    let hv1 = m[1][0] * v[0] + m[1][1] * v[1];
    [C64::new(hv0.im, -hv0.re), C64::new(hv1.im, -hv1.re)]
}

#[inline]
fn axpy(v: &[C64; 2], k: &[C64; 2], a: f64) -> [C64; 2] {
    [v[0] + k[0] * a, v[1] + k[1] * a]
}

/// Hamiltonians at the three distinct stage times of one step.
struct StepHamiltonians {
    start: Mat2,
    mid: Mat2,
    end: Mat2,
}

impl StepHamiltonians {
    fn new(sched: &PulseSchedule, sys: &SystemParams, t: f64, h: f64) -> Self {
        StepHamiltonians {
            start: sample_hamiltonian(sched, sys, t).matrix,
            mid: sample_hamiltonian(sched, sys, t + 0.5 * h).matrix,
            end: sample_hamiltonian(sched, sys, t + h).matrix,
        }
    }

    fn step(&self, v: &[C64; 2], h: f64) -> [C64; 2] {
        let k1 = derivative(&self.start, v);
        let k2 = derivative(&self.mid, &axpy(v, &k1, 0.5 * h));
        let k3 = derivative(&self.mid, &axpy(v, &k2, 0.5 * h));
        let k4 = derivative(&self.end, &axpy(v, &k3, h));
        let w = h / 6.0;
        [
            v[0] + (k1[0] + (k2[0] + k3[0]) * 2.0 + k4[0]) * w,
            v[1] + (k1[1] + (k2[1] + k3[1]) * 2.0 + k4[1]) * w,
        ]
    }
}

fn norm2(v: &[C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Tracks the norm of one column and flags drift.
struct NormGuard {
    lossless: bool,
    tolerance: f64,
    dt: f64,
    reference: f64,
    previous: f64,
}

impl NormGuard {
    fn new(sys: &SystemParams, opts: &IntegratorOptions, initial: f64) -> Self {
        NormGuard {
            lossless: sys.is_lossless(),
            tolerance: opts.norm_tolerance,
            dt: opts.dt,
            reference: initial,
            previous: initial,
        }
    }

    fn check(&mut self, t: f64, norm: f64) -> Result<()> {
        let drift = if self.lossless {
            (norm - self.reference).abs()
        } else {
            norm - self.previous
        };
        if !norm.is_finite() || drift > self.tolerance {
            return Err(Error::NonConvergent {
                drift: if norm.is_finite() { drift } else { f64::INFINITY },
                tolerance: self.tolerance,
                t,
                dt: self.dt,
            });
        }
        self.previous = norm;
        Ok(())
    }
}

fn check_normalized(v: &[C64; 2]) -> Result<()> {
    let n = norm2(v);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm: n });
    }
    Ok(())
}

fn check_inputs(sched: &PulseSchedule, sys: &SystemParams, opts: &IntegratorOptions) -> Result<()> {
    sched.validate()?;
    sys.validate()?;
    opts.validate()
}

/// Integrates a single pass from a normalized two-component initial state.
pub fn propagate(
    initial: [C64; 2],
    sched: &PulseSchedule,
    sys: &SystemParams,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    check_inputs(sched, sys, opts)?;
    check_normalized(&initial)?;
    let (n, h) = opts.steps();
    let mut guard = NormGuard::new(sys, opts, 1.0);

    let mut times = vec![opts.t_start];
    let mut states = vec![initial.to_vec()];
    let mut v = initial;
    for k in 0..n {
        let t = opts.t_start + k as f64 * h;
        v = StepHamiltonians::new(sched, sys, t, h).step(&v, h);
        let t_next = if k + 1 == n { opts.t_end } else { opts.t_start + (k + 1) as f64 * h };
        guard.check(t_next, norm2(&v))?;
        if (k + 1) % opts.record_stride == 0 || k + 1 == n {
            times.push(t_next);
            states.push(v.to_vec());
        }
    }
    let labels = PASS_LABELS.iter().map(|s| s.to_string()).collect();
    let mut traj = Trajectory::from_states(labels, times, states);
    traj.warnings = window_warnings(sched, opts);
    Ok(traj)
}

/// Pass propagator sampled along the window: column `j` of each matrix is
/// the evolved basis state `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPath {
    pub times: Vec<f64>,
    pub matrices: Vec<Mat2>,
    pub warnings: Vec<IntegratorWarning>,
}

impl UnitaryPath {
    pub fn final_matrix(&self) -> Mat2 {
        *self.matrices.last().expect("path has at least one sample")
    }
}

pub fn propagate_unitary_path(
    sched: &PulseSchedule,
    sys: &SystemParams,
    opts: &IntegratorOptions,
) -> Result<UnitaryPath> {
    check_inputs(sched, sys, opts)?;
    let (n, h) = opts.steps();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut cols = [[one, zero], [zero, one]];
    let mut guards = [NormGuard::new(sys, opts, 1.0), NormGuard::new(sys, opts, 1.0)];
    let as_matrix = |c: &[[C64; 2]; 2]| [[c[0][0], c[1][0]], [c[0][1], c[1][1]]];

    let mut times = vec![opts.t_start];
    let mut matrices = vec![as_matrix(&cols)];
    for k in 0..n {
        let t = opts.t_start + k as f64 * h;
        let stages = StepHamiltonians::new(sched, sys, t, h);
        let t_next = if k + 1 == n { opts.t_end } else { opts.t_start + (k + 1) as f64 * h };
        for (col, guard) in cols.iter_mut().zip(guards.iter_mut()) {
            *col = stages.step(col, h);
            guard.check(t_next, norm2(col))?;
        }
        if (k + 1) % opts.record_stride == 0 || k + 1 == n {
            times.push(t_next);
            matrices.push(as_matrix(&cols));
        }
    }
    Ok(UnitaryPath { times, matrices, warnings: window_warnings(sched, opts) })
}

/// Final pass matrix. Columns are the images of |+,0> and |-,1>.
pub fn propagate_unitary(sched: &PulseSchedule, sys: &SystemParams, opts: &IntegratorOptions) -> Result<Mat2> {
    Ok(propagate_unitary_path(sched, sys, opts)?.final_matrix())
}

/// Evolves a state from `from` to `to` in either direction with step close
/// to `dt`, without recording or norm checks.
pub fn evolve(initial: [C64; 2], sched: &PulseSchedule, sys: &SystemParams, from: f64, to: f64, dt: f64) -> [C64; 2] {
    let span = to - from;
    let n = (span.abs() / dt).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let mut v = initial;
    for k in 0..n {
        let t = from + k as f64 * h;
        v = StepHamiltonians::new(sched, sys, t, h).step(&v, h);
    }
    v
}

/// Instantaneous rate of change of `|<-,1|psi>|^2` for state `psi` at time `t`.
pub fn photon_population_rate(state: &[C64; 2], sched: &PulseSchedule, sys: &SystemParams, t: f64) -> f64 {
    let m = sample_hamiltonian(sched, sys, t).matrix;
    let d = derivative(&m, state);
    2.0 * (state[1].conj() * d[1]).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulsePath;
    use approx::assert_relative_eq;

    const ONE: C64 = C64::new(1.0, 0.0);
    const ZERO: C64 = C64::new(0.0, 0.0);

    fn fig3() -> PulseSchedule {
        PulseSchedule::new(10.0, 1.0, 20.0, 1.0, 1.5, PulsePath::StarkFirst).unwrap()
    }

    #[test]
    fn step_count_lands_on_end() {
        let opts = IntegratorOptions::for_schedule(&fig3());
        let (n, h) = opts.steps();
        assert_eq!(n, 11_500);
        assert_relative_eq!(opts.t_start + n as f64 * h, opts.t_end, epsilon = 1e-12);
    }

    #[test]
    fn option_validation() {
        let opts = IntegratorOptions::for_schedule(&fig3());
        assert!(opts.with_window(1.0, 1.0).validate().is_err());
        assert!(opts.with_dt(0.5).validate().is_err());
        assert!(opts.with_dt(-1.0).validate().is_err());
        assert!(IntegratorOptions { record_stride: 0, ..opts }.validate().is_err());
        assert!(IntegratorOptions { norm_tolerance: 0.0, ..opts }.validate().is_err());
    }

    #[test]
    fn uncoupled_state_keeps_its_population() {
        let sched = PulseSchedule { g0: 0.0, s0: 0.0, ..fig3() };
        let sys = SystemParams::lossless(3.0);
        let traj = propagate([ONE, ZERO], &sched, &sys, &IntegratorOptions::for_schedule(&sched)).unwrap();
        let last = traj.final_state();
        assert_relative_eq!(last[0].norm(), 1.0, epsilon = 1e-10);
        assert_eq!(last[1], ZERO);
        // Phase is exp(-i delta (t_end - t_start)).
        let expected = C64::from_polar(1.0, -3.0 * 11.5);
        assert!((last[0] - expected).norm() < 1e-8);
    }

    #[test]
    fn rejects_unnormalized_initial_state() {
        let sched = fig3();
        let err = propagate([ONE, ONE], &sched, &SystemParams::lossless(10.0), &IntegratorOptions::for_schedule(&sched));
        assert!(matches!(err, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn coarse_step_is_non_convergent() {
        let sched = fig3();
        let opts = IntegratorOptions::for_schedule(&sched).with_dt(0.1);
        let err = propagate([ONE, ZERO], &sched, &SystemParams::lossless(10.0), &opts);
        assert!(matches!(err, Err(Error::NonConvergent { .. })), "{err:?}");
    }

    #[test]
    fn identity_for_vanishing_hamiltonian() {
        let sched = PulseSchedule { g0: 0.0, s0: 0.0, ..fig3() };
        let u = propagate_unitary(&sched, &SystemParams::lossless(0.0), &IntegratorOptions::for_schedule(&sched)).unwrap();
        assert_eq!(u, [[ONE, ZERO], [ZERO, ONE]]);
    }

    #[test]
    fn narrow_window_is_reported() {
        let sched = fig3();
        let opts = IntegratorOptions::for_schedule(&sched).with_window(-2.0, 2.0);
        let traj = propagate([ONE, ZERO], &sched, &SystemParams::lossless(10.0), &opts).unwrap();
        assert!(!traj.warnings.is_empty());
        let wide = IntegratorOptions::for_schedule(&sched);
        assert!(window_warnings(&sched, &wide).is_empty());
    }

    #[test]
    fn records_on_stride_and_at_end() {
        let sched = fig3();
        let opts = IntegratorOptions { record_stride: 1000, ..IntegratorOptions::for_schedule(&sched) };
        let traj = propagate([ONE, ZERO], &sched, &SystemParams::lossless(10.0), &opts).unwrap();
        assert_eq!(traj.len(), 1 + 11 + 1);
        assert_eq!(*traj.times.last().unwrap(), opts.t_end);
        for (p, n) in traj.populations.iter().zip(&traj.norm) {
            assert_relative_eq!(p.iter().sum::<f64>(), n * n, epsilon = 1e-12);
        }
    }

    #[test]
    fn photon_rate_matches_pure_decay() {
        let sched = PulseSchedule { g0: 0.0, s0: 0.0, ..fig3() };
        let sys = SystemParams::damped(0.0, 10.0).unwrap();
        let rate = photon_population_rate(&[ZERO, ONE], &sched, &sys, 0.0);
        assert_relative_eq!(rate, -0.2, epsilon = 1e-15);
    }
}
