//! Gaussian envelopes seen by an atom crossing the cavity mode and the Stark
//! (maser) beam.
//!
//! Time is measured in units of a reference pulse duration `T` and rates in
//! `1/T`. The cavity pulse is always centred at `t = 0`; the Stark pulse is
//! displaced by the delay `tau` on one side or the other depending on the
//! crossing order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order in which the atom meets the two fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulsePath {
    /// Stark pulse first, peak at `t = -tau` (path a).
    StarkFirst,
    /// Cavity pulse first, Stark peak at `t = +tau` (path b).
    CavityFirst,
}

impl PulsePath {
    /// Sign multiplying `tau` inside the Stark Gaussian.
    fn offset_sign(self) -> f64 {
        match self {
            PulsePath::StarkFirst => 1.0,
            PulsePath::CavityFirst => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            PulsePath::StarkFirst => PulsePath::CavityFirst,
            PulsePath::CavityFirst => PulsePath::StarkFirst,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSchedule {
    /// Peak cavity Rabi frequency `G0`.
    pub g0: f64,
    /// Cavity pulse duration `T_C = W_C / v`.
    pub t_c: f64,
    /// Peak magnitude of the Stark shift. The shift itself is negative.
    pub s0: f64,
    /// Stark pulse duration `T_S = W_S / v`.
    pub t_s: f64,
    /// Delay between the two pulse centres, `d / v`.
    pub tau: f64,
    pub path: PulsePath,
}

impl PulseSchedule {
    pub fn new(g0: f64, t_c: f64, s0: f64, t_s: f64, tau: f64, path: PulsePath) -> Result<Self> {
        let sched = PulseSchedule { g0, t_c, s0, t_s, tau, path };
        sched.validate()?;
        Ok(sched)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g0", self.g0),
            ("t_c", self.t_c),
            ("s0", self.s0),
            ("t_s", self.t_s),
            ("tau", self.tau),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidSchedule(format!("{name} must be finite")));
            }
        }
        if self.g0 < 0.0 || self.s0 < 0.0 || self.tau < 0.0 {
            return Err(Error::InvalidSchedule("g0, s0 and tau must be non-negative".into()));
        }
        if self.t_c <= 0.0 || self.t_s <= 0.0 {
            return Err(Error::InvalidSchedule("pulse durations must be positive".into()));
        }
        Ok(())
    }

    /// Time at which the Stark shift peaks.
    pub fn stark_center(&self) -> f64 {
        -self.path.offset_sign() * self.tau
    }

    /// The same pulses met in the opposite order.
    pub fn with_path(&self, path: PulsePath) -> Self {
        PulseSchedule { path, ..*self }
    }

    /// Smallest window `[start, end]` extending `widths` pulse durations beyond
    /// the centre of every pulse.
    pub fn covering_window(&self, widths: f64) -> (f64, f64) {
        let sc = self.stark_center();
        let start = (-widths * self.t_c).min(sc - widths * self.t_s);
        let end = (widths * self.t_c).max(sc + widths * self.t_s);
        (start, end)
    }
}

/// Cavity coupling `G(t) = g0 exp(-(t/t_c)^2)`.
pub fn cavity_rabi(sched: &PulseSchedule, t: f64) -> f64 {
    let x = t / sched.t_c;
    sched.g0 * (-x * x).exp()
}

/// Stark shift `S(t) = -s0 exp(-((t ± tau)/t_s)^2)`, `+` for [`PulsePath::StarkFirst`].
pub fn stark_shift(sched: &PulseSchedule, t: f64) -> f64 {
    let x = (t + sched.path.offset_sign() * sched.tau) / sched.t_s;
    -sched.s0 * (-x * x).exp()
}
