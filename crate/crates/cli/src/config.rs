//! Scenario configuration files.
//!
//! A scenario is a single JSON document. Parsing is strict: unknown keys
//! are rejected so a figure-reproduction config can be audited field by
//! field. Pulses can be given directly in units of the reference duration
//! `T`, or in SI units through the `physical` block, which is converted at
//! resolution time.

use std::path::Path;

use scrap_core::protocols::{PassMode, PassSpec};
use scrap_core::{Complex64, IntegratorOptions, PulsePath, PulseSchedule, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Fock,
    HalfScrap,
    EntangleAtoms,
    QstAtom,
    QstCavity,
    Network,
    Surface,
    Adiabaticity,
}

impl ScenarioKind {
    /// Number of pulse/system entries the scenario consumes.
    pub fn pass_count(self) -> Option<usize> {
        match self {
            ScenarioKind::Fock | ScenarioKind::HalfScrap => Some(1),
            ScenarioKind::EntangleAtoms
            | ScenarioKind::QstAtom
            | ScenarioKind::QstCavity
            | ScenarioKind::Network => Some(2),
            ScenarioKind::Surface => Some(0),
            ScenarioKind::Adiabaticity => None,
        }
    }

    fn modes(self) -> &'static [PassMode] {
        match self {
            ScenarioKind::HalfScrap => &[PassMode::HalfScrap],
            ScenarioKind::EntangleAtoms => &[PassMode::HalfScrap, PassMode::Scrap],
            _ => &[PassMode::Scrap, PassMode::Scrap],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub prefix: String,
    pub format: OutputFormat,
}

/// One pass in SI units. Rates are angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalPass {
    /// Atomic velocity, m/s.
    pub velocity: f64,
    /// Cavity mode waist, m.
    pub cavity_waist: f64,
    /// Stark beam waist, m.
    pub stark_waist: f64,
    /// Distance between the cavity and Stark beam axes, m.
    pub distance: f64,
    pub g0: f64,
    pub s0: f64,
    pub delta: f64,
    /// Cavity lifetime, s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_cav: Option<f64>,
    pub path: PulsePath,
    /// Reference duration `T` in seconds. Defaults to `cavity_waist / velocity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_time: Option<f64>,
}

impl PhysicalPass {
    pub fn reference(&self) -> f64 {
        self.reference_time.unwrap_or(self.cavity_waist / self.velocity)
    }

    /// Dimensionless pulses and system parameters in units of [`Self::reference`].
    pub fn to_dimensionless(&self) -> Result<(PulseSchedule, SystemParams), RunError> {
        let si = [self.velocity, self.cavity_waist, self.stark_waist];
        if si.iter().any(|v| !(*v > 0.0)) || !(self.distance >= 0.0) {
            return Err(RunError::Config("velocity, waists and distance must be positive".into()));
        }
        let t = self.reference();
        if !(t > 0.0 && t.is_finite()) {
            return Err(RunError::Config("reference time must be positive".into()));
        }
        let sched = PulseSchedule::new(
            self.g0 * t,
            self.cavity_waist / self.velocity / t,
            self.s0 * t,
            self.stark_waist / self.velocity / t,
            self.distance / self.velocity / t,
            self.path,
        )?;
        let sys = SystemParams { delta: self.delta * t, t_cav: self.t_cav.map(|c| c / t) };
        sys.validate()?;
        Ok((sched, sys))
    }
}

/// A qubit `alpha|0> + beta|1>` given as `(re, im)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitInput {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl QubitInput {
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.alpha[0], self.alpha[1]),
            Complex64::new(self.beta[0], self.beta[1]),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub g_max: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub resolution: usize,
}

impl SurfaceConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        if self.resolution < 2 || !(self.g_max >= 0.0) || !(self.s_max > self.s_min) {
            return Err(RunError::Config("surface needs resolution >= 2, g_max >= 0 and s_min < s_max".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pulses: Vec<PulseSchedule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub system: Vec<SystemParams>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub physical: Vec<PhysicalPass>,
    /// Defaults to the window `[-5T, 5T + tau]` of the first pass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<QubitInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin_factor: Option<f64>,
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Dimensionless `(pulses, system)` for every pass.
    pub fn resolved_passes(&self) -> Result<Vec<(PulseSchedule, SystemParams)>, RunError> {
        if !self.physical.is_empty() {
            if !self.pulses.is_empty() || !self.system.is_empty() {
                return Err(RunError::Config("give either `physical` or `pulses`/`system`, not both".into()));
            }
            return self.physical.iter().map(PhysicalPass::to_dimensionless).collect();
        }
        if self.pulses.len() != self.system.len() {
            return Err(RunError::Config(format!(
                "{} pulse schedules but {} system entries",
                self.pulses.len(),
                self.system.len()
            )));
        }
        for (p, s) in self.pulses.iter().zip(&self.system) {
            p.validate()?;
            s.validate()?;
        }
        Ok(self.pulses.iter().copied().zip(self.system.iter().copied()).collect())
    }

    pub fn pass_specs(&self) -> Result<Vec<PassSpec>, RunError> {
        let passes = self.resolved_passes()?;
        let modes = self.scenario.modes();
        Ok(passes
            .into_iter()
            .enumerate()
            .map(|(i, (sched, sys))| PassSpec {
                atom_index: 0,
                cavity_index: 0,
                sched,
                sys,
                mode: modes.get(i).copied().unwrap_or(PassMode::Scrap),
            })
            .collect())
    }

    pub fn integrator_options(&self) -> Result<IntegratorOptions, RunError> {
        let opts = match (self.integrator, self.resolved_passes()?.first()) {
            (Some(o), _) => o,
            (None, Some((sched, _))) => IntegratorOptions::for_schedule(sched),
            (None, None) => return Err(RunError::Config("no pass to derive integrator options from".into())),
        };
        opts.validate()?;
        Ok(opts)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let passes = self.resolved_passes()?;
        match self.scenario.pass_count() {
            Some(n) if passes.len() != n => {
                return Err(RunError::Config(format!(
                    "scenario {:?} needs {n} passes, got {}",
                    self.scenario,
                    passes.len()
                )))
            }
            None if passes.is_empty() => {
                return Err(RunError::Config("adiabaticity check needs at least one pass".into()))
            }
            _ => {}
        }
        if self.output.prefix.is_empty() || self.output.prefix.contains(['/', '\\']) {
            return Err(RunError::Config("output prefix must be a plain file name".into()));
        }
        if matches!(self.scenario, ScenarioKind::Fock | ScenarioKind::HalfScrap | ScenarioKind::EntangleAtoms
            | ScenarioKind::QstAtom | ScenarioKind::QstCavity | ScenarioKind::Network)
        {
            self.integrator_options()?;
            for spec in self.pass_specs()? {
                spec.validate()?;
            }
        }
        let needs_inputs = matches!(self.scenario, ScenarioKind::QstAtom | ScenarioKind::QstCavity | ScenarioKind::Network);
        if needs_inputs && self.inputs.is_none() {
            return Err(RunError::Config("state-transfer scenarios need `inputs`".into()));
        }
        if self.scenario == ScenarioKind::Network && self.node_count.is_none_or(|k| k < 2) {
            return Err(RunError::Config("network scenarios need node_count >= 2".into()));
        }
        if self.scenario == ScenarioKind::Surface {
            let s = self.surface.ok_or_else(|| RunError::Config("surface scenario needs `surface`".into()))?;
            s.validate()?;
        }
        if let Some(m) = self.margin_factor {
            if !(m > 0.0) {
                return Err(RunError::Config("margin_factor must be positive".into()));
            }
        }
        Ok(())
    }
}
