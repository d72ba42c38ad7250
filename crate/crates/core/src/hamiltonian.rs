//! The effective two-level Hamiltonian on span{|+,0>, |-,1>} and its
//! instantaneous eigensystem.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::{cavity_rabi, stark_shift, PulseSchedule};

/// 2x2 complex matrix, row-major, over the ordered basis (|+,0>, |-,1>).
pub type Mat2 = [[C64; 2]; 2];

/// Coupling strength above which the rotating-wave approximation is flagged,
/// as a fraction of the smaller of the two bare frequencies.
pub const RWA_RATIO_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Static detuning `delta = omega_0 - omega_C`.
    pub delta: f64,
    /// Cavity photon lifetime. `None` means a lossless cavity.
    #[serde(default)]
    pub t_cav: Option<f64>,
}

impl SystemParams {
    pub fn lossless(delta: f64) -> Self {
        SystemParams { delta, t_cav: None }
    }

    pub fn damped(delta: f64, t_cav: f64) -> Result<Self> {
        let sys = SystemParams { delta, t_cav: Some(t_cav) };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() {
            return Err(Error::InvalidSystem("delta must be finite".into()));
        }
        match self.t_cav {
            Some(t) if !(t > 0.0 && t.is_finite()) => {
                Err(Error::InvalidSystem(format!("t_cav must be positive, got {t}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.t_cav.is_none()
    }

    /// Amplitude decay rate of |-,1>.
    pub fn loss_rate(&self) -> f64 {
        self.t_cav.map_or(0.0, |t| 1.0 / t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSample {
    pub matrix: Mat2,
    /// Instantaneous cavity coupling `G(t)`.
    pub g: f64,
    /// Instantaneous Stark shift `S(t)`, never positive.
    pub s: f64,
    /// Effective detuning `delta + S(t)`.
    pub delta_eff: f64,
    pub damped: bool,
}

impl HamiltonianSample {
    /// Lossless sample built directly from a coupling and effective detuning.
    pub fn from_parts(g: f64, delta_eff: f64) -> Self {
        HamiltonianSample {
            matrix: [
                [C64::new(delta_eff, 0.0), C64::new(g, 0.0)],
                [C64::new(g, 0.0), C64::new(0.0, 0.0)],
            ],
            g,
            s: 0.0,
            delta_eff,
            damped: false,
        }
    }

    pub fn apply(&self, v: &[C64; 2]) -> [C64; 2] {
        let m = &self.matrix;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

pub fn sample_hamiltonian(sched: &PulseSchedule, sys: &SystemParams, t: f64) -> HamiltonianSample {
    let g = cavity_rabi(sched, t);
    let s = stark_shift(sched, t);
    let delta_eff = sys.delta + s;
    let loss = sys.loss_rate();
    HamiltonianSample {
        matrix: [
            [C64::new(delta_eff, 0.0), C64::new(g, 0.0)],
            [C64::new(g, 0.0), C64::new(0.0, -loss)],
        ],
        g,
        s,
        delta_eff,
        damped: !sys.is_lossless(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSample {
    pub e_plus: f64,
    pub e_minus: f64,
    /// Mixing angle, diagnostic only. Lies in (-pi/4, pi/4].
    pub theta: f64,
    pub v_plus: [C64; 2],
    pub v_minus: [C64; 2],
}

impl EigenSample {
    pub fn gap(&self) -> f64 {
        self.e_plus - self.e_minus
    }
}

/// Closed-form eigensystem of a lossless sample.
///
/// The mixing angle satisfies `tan(2 theta) = 2G / Delta`, with
/// `theta = pi/4` on resonance. The two vectors
/// `(cos theta, sin theta)` and `(-sin theta, cos theta)` are assigned to the
/// upper and lower energies according to the sign of `Delta`.
pub fn eigensystem(h: &HamiltonianSample) -> Result<EigenSample> {
    if h.damped {
        return Err(Error::DampedEigensystem);
    }
    let g = h.matrix[0][1].re;
    let d = h.matrix[0][0].re;
    let root = d.hypot(2.0 * g);
    // Avoid cancellation in the smaller root: e_plus * e_minus = -G^2.
    let (e_plus, e_minus) = if d >= 0.0 {
        let e_plus = 0.5 * (d + root);
        let e_minus = if e_plus == 0.0 { 0.0 } else { -g * g / e_plus };
        (e_plus, e_minus)
    } else {
        let e_minus = 0.5 * (d - root);
        (-g * g / e_minus, e_minus)
    };

    let theta = if d == 0.0 {
        if g == 0.0 { 0.0 } else { FRAC_PI_4.copysign(g) }
    } else {
        0.5 * (2.0 * g / d).atan()
    };
    let (sn, cs) = theta.sin_cos();
    let a = [C64::new(cs, 0.0), C64::new(sn, 0.0)];
    let b = [C64::new(-sn, 0.0), C64::new(cs, 0.0)];
    let (v_plus, v_minus) = if d >= 0.0 { (a, b) } else { (b, a) };
    Ok(EigenSample { e_plus, e_minus, theta, v_plus, v_minus })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RwaWarning {
    /// Peak coupling is not small against the bare frequencies.
    StrongCoupling { ratio: f64 },
    /// Static detuning is not small against the cavity frequency.
    LargeDetuning { ratio: f64 },
}

impl fmt::Display for RwaWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RwaWarning::StrongCoupling { ratio } => {
                write!(f, "peak coupling is {ratio:.3e} of the bare frequency (limit {RWA_RATIO_LIMIT})")
            }
            RwaWarning::LargeDetuning { ratio } => {
                write!(f, "static detuning is {ratio:.3e} of the cavity frequency (limit {RWA_RATIO_LIMIT})")
            }
        }
    }
}

/// Checks the rotating-wave conditions. Never blocks a simulation.
pub fn validate_rwa(sched: &PulseSchedule, omega0: f64, omega_c: f64) -> Result<Vec<RwaWarning>> {
    if !(omega0 > 0.0 && omega_c > 0.0) {
        return Err(Error::Domain("bare frequencies must be positive".into()));
    }
    let mut warnings = Vec::new();
    let coupling = sched.g0 / omega0.min(omega_c);
    if coupling > RWA_RATIO_LIMIT {
        warnings.push(RwaWarning::StrongCoupling { ratio: coupling });
    }
    let detuning = (omega0 - omega_c).abs() / omega_c;
    if detuning > RWA_RATIO_LIMIT {
        warnings.push(RwaWarning::LargeDetuning { ratio: detuning });
    }
    Ok(warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulsePath;
    use approx::assert_relative_eq;

    fn sched(g0: f64, s0: f64) -> PulseSchedule {
        PulseSchedule::new(g0, 1.0, s0, 1.0, 0.0, PulsePath::StarkFirst).unwrap()
    }

    fn re(m: &Mat2) -> [[f64; 2]; 2] {
        [[m[0][0].re, m[0][1].re], [m[1][0].re, m[1][1].re]]
    }

    #[test]
    fn bare_detuning_sample() {
        let h = sample_hamiltonian(&sched(0.0, 0.0), &SystemParams::lossless(10.0), 0.0);
        assert_eq!(re(&h.matrix), [[10.0, 0.0], [0.0, 0.0]]);
        assert!(h.matrix.iter().flatten().all(|z| z.im == 0.0));
    }

    #[test]
    fn stark_shift_enters_diagonal() {
        // At t = 0 with tau = 0 both pulses peak.
        let h = sample_hamiltonian(&sched(10.0, 20.0), &SystemParams::lossless(10.0), 0.0);
        assert_eq!(re(&h.matrix), [[-10.0, 10.0], [10.0, 0.0]]);
        assert_eq!(h.delta_eff, -10.0);
        assert_eq!(h.s, -20.0);
    }

    #[test]
    fn loss_term_on_photon_state() {
        let sys = SystemParams::damped(0.0, 10.0).unwrap();
        let h = sample_hamiltonian(&sched(0.0, 0.0), &sys, 0.0);
        assert_eq!(h.matrix[1][1], C64::new(0.0, -0.1));
        assert_eq!(h.matrix[0][0], C64::new(0.0, 0.0));
        assert!(h.damped);
        assert_eq!(eigensystem(&h), Err(Error::DampedEigensystem));
    }

    #[test]
    fn eigen_examples() {
        let e = eigensystem(&HamiltonianSample::from_parts(0.0, 1.0)).unwrap();
        assert_eq!((e.e_plus, e.e_minus), (1.0, 0.0));

        let e = eigensystem(&HamiltonianSample::from_parts(1.0, 0.0)).unwrap();
        assert_eq!((e.e_plus, e.e_minus), (1.0, -1.0));
        assert_relative_eq!(e.theta, FRAC_PI_4);

        let e = eigensystem(&HamiltonianSample::from_parts(2.0, 3.0)).unwrap();
        assert_relative_eq!(e.e_plus, 4.0, max_relative = 1e-15);
        assert_relative_eq!(e.e_minus, -1.0, max_relative = 1e-15);
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        for &(g, d) in &[(2.0, 3.0), (2.0, -3.0), (0.5, 0.0), (0.0, -1.0), (1e-9, 4.0)] {
            let h = HamiltonianSample::from_parts(g, d);
            let e = eigensystem(&h).unwrap();
            for (v, en) in [(e.v_plus, e.e_plus), (e.v_minus, e.e_minus)] {
                let hv = h.apply(&v);
                for k in 0..2 {
                    assert!((hv[k] - v[k] * en).norm() < 1e-12, "g={g} d={d}");
                }
            }
        }
    }

    #[test]
    fn rwa_checks() {
        // G0 ~ 0.15 MHz against a ~51 GHz transition.
        let s = sched(0.15e6, 0.0);
        assert!(validate_rwa(&s, 51.1e9, 51.1e9).unwrap().is_empty());
        let s = sched(5.0, 0.0);
        let w = validate_rwa(&s, 5.0, 5.0).unwrap();
        assert!(matches!(w[0], RwaWarning::StrongCoupling { .. }));
        assert!(validate_rwa(&sched(0.0, 0.0), 5.0, 5.0).unwrap().is_empty());
        let w = validate_rwa(&sched(0.0, 0.0), 6.0, 5.0).unwrap();
        assert!(matches!(w[..], [RwaWarning::LargeDetuning { .. }]));
        assert!(validate_rwa(&s, 0.0, 5.0).is_err());
    }
}
