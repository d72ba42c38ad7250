//! Executes a scenario in memory and renders its artifacts.

use std::path::{Path, PathBuf};

use scrap_core::analysis::{self, AdiabaticityReport, DEFAULT_MARGIN_FACTOR};
use scrap_core::protocols::{self, HopReport, PassOutcome};
use scrap_core::{Complex64, IntegratorOptions, JointState, PassMode, PassSpec, PulseSchedule, Subsystem, SystemParams};
use serde::Serialize;

use crate::config::{OutputFormat, ScenarioConfig, ScenarioKind};
use crate::error::RunError;
use crate::output::Table;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Window {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassSummary {
    pub index: usize,
    pub mode: PassMode,
    pub atom: usize,
    pub cavity: usize,
    pub pulses: PulseSchedule,
    pub system: SystemParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adiabaticity: Option<AdiabaticityReport>,
    /// Why no adiabaticity report could be produced.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adiabaticity_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelledValue {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelledAmplitude {
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metrics {
    Fock {
        p_plus0: f64,
        p_minus1: f64,
        norm: f64,
        max_norm_drift: f64,
        /// `dP(|-,1>)/dt` at the window edge, the sensitivity of `p_minus1` to `t_end`.
        end_rate: f64,
    },
    HalfScrap {
        p_plus0: f64,
        p_minus1: f64,
        fidelity_raw: f64,
        fidelity_phase_optimized: f64,
        entropy: f64,
    },
    EntangleAtoms {
        concurrence: f64,
        entropy: f64,
        p_vacuum: f64,
    },
    QstAtom {
        cavity_fidelity: f64,
        atom2_fidelity_raw: f64,
        atom2_fidelity_phase_optimized: f64,
        atom1_p_ground: f64,
        p_vacuum: f64,
    },
    Network {
        node_count: usize,
        hops: Vec<HopReport>,
        final_fidelity: f64,
        source_p_vacuum: Vec<f64>,
        atoms_p_ground: Vec<f64>,
    },
    Surface {
        g_points: usize,
        s_points: usize,
        min_gap: f64,
        min_gap_g: f64,
        min_gap_s: f64,
    },
    Adiabaticity {
        all_satisfied: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: ScenarioKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    pub passes: Vec<PassSummary>,
    pub metrics: Metrics,
    pub final_populations: Vec<LabelledValue>,
    pub final_amplitudes: Vec<LabelledAmplitude>,
    pub final_norm: Option<f64>,
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn population(&self, label: &str) -> Option<f64> {
        self.final_populations.iter().find(|p| p.label == label).map(|p| p.value)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("summary serializes");
        out.push('\n');
        out
    }
}

/// Everything a run produces, before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: Summary,
    /// Time series for dynamical scenarios, the eigenvalue grid for `surface`.
    pub table: Option<Table>,
    /// Final joint amplitudes, empty when nothing was propagated.
    pub final_state: Vec<Complex64>,
}

impl RunOutput {
    fn table_suffix(&self) -> &'static str {
        match self.summary.scenario {
            ScenarioKind::Surface => "surface",
            _ => "trajectory",
        }
    }

    /// Renders every file as `(file name, contents)`.
    pub fn render(&self, prefix: &str, format: OutputFormat) -> Vec<(String, String)> {
        let mut files = Vec::new();
        if let Some(table) = &self.table {
            let (ext, body) = match format {
                OutputFormat::Csv => ("csv", table.to_csv()),
                OutputFormat::Json => ("json", table.to_json()),
            };
            files.push((format!("{prefix}_{}.{ext}", self.table_suffix()), body));
        }
        files.push((format!("{prefix}_summary.json"), self.summary.to_json()));
        files
    }

    /// Writes the rendered files into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path, prefix: &str, format: OutputFormat) -> Result<Vec<PathBuf>, RunError> {
        let files = self.render(prefix, format);
        std::fs::create_dir_all(dir)?;
        files
            .into_iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                std::fs::write(&path, body)?;
                Ok(path)
            })
            .collect()
    }
}

pub fn pass_summaries(specs: &[PassSpec], margin: f64) -> Vec<PassSummary> {
    specs
        .iter()
        .enumerate()
        .map(|(index, spec)| {
            let (adiabaticity, adiabaticity_note) = match analysis::check_adiabaticity(&spec.sched, &spec.sys, margin) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            PassSummary {
                index,
                mode: spec.mode,
                atom: spec.atom_index,
                cavity: spec.cavity_index,
                pulses: spec.sched,
                system: spec.sys,
                adiabaticity,
                adiabaticity_note,
            }
        })
        .collect()
}

/// CSV-safe form of a joint label: `+,-,0` becomes `pm0`.
pub fn column_label(label: &str) -> String {
    label
        .chars()
        .filter_map(|c| match c {
            '+' => Some('p'),
            '-' => Some('m'),
            ',' => None,
            other => Some(other),
        })
        .collect()
}

fn pair_populations(amps: &[Complex64], atom_bit: usize, cavity_bit: usize) -> (f64, f64) {
    let mut p_plus0 = 0.0;
    let mut p_minus1 = 0.0;
    for (i, a) in amps.iter().enumerate() {
        let excited = i >> atom_bit & 1 == 1;
        let photon = i >> cavity_bit & 1 == 1;
        match (excited, photon) {
            (true, false) => p_plus0 += a.norm_sqr(),
            (false, true) => p_minus1 += a.norm_sqr(),
            _ => {}
        }
    }
    (p_plus0, p_minus1)
}

/// Concatenates pass trajectories on a running clock. The first pass keeps
/// its own time axis; each later pass starts where the previous one ended.
fn trajectory_table(passes: &[(&PassSpec, &PassOutcome)]) -> Result<Table, RunError> {
    let first_state = &passes[0].1.state;
    let (atoms, cavities) = (first_state.atoms(), first_state.cavities());
    let labels = first_state.labels();
    let extra = atoms > 1 || cavities > 1;
    let mut columns: Vec<String> = ["t", "P_plus0", "P_minus1", "norm"].iter().map(|s| s.to_string()).collect();
    if extra {
        columns.extend(labels.iter().map(|l| format!("P_{}", column_label(l))));
    }
    let mut table = Table::new(columns);
    let mut clock_end: Option<f64> = None;
    for (spec, outcome) in passes {
        let atom_bit = outcome.state.bit(Subsystem::Atom(spec.atom_index))?;
        let cavity_bit = outcome.state.bit(Subsystem::Cavity(spec.cavity_index))?;
        let traj = &outcome.trajectory;
        let t0 = traj.times[0];
        let (offset, skip) = match clock_end {
            None => (0.0, 0),
            Some(end) => (end - t0, 1),
        };
        for k in skip..traj.len() {
            let (p_plus0, p_minus1) = pair_populations(&traj.states[k], atom_bit, cavity_bit);
            let mut row = vec![traj.times[k] + offset, p_plus0, p_minus1, traj.norm[k]];
            if extra {
                row.extend(traj.populations[k].iter().copied());
            }
            table.push(row);
        }
        clock_end = Some(traj.times[traj.len() - 1] + offset);
    }
    Ok(table)
}

fn final_listing(state: &JointState) -> (Vec<LabelledValue>, Vec<LabelledAmplitude>) {
    let labels = state.labels();
    let pops = labels
        .iter()
        .zip(state.amplitudes())
        .map(|(l, a)| LabelledValue { label: l.clone(), value: a.norm_sqr() })
        .collect();
    let amps = labels
        .iter()
        .zip(state.amplitudes())
        .map(|(l, a)| LabelledAmplitude { label: l.clone(), re: a.re, im: a.im })
        .collect();
    (pops, amps)
}

fn assemble(
    cfg: &ScenarioConfig,
    opts: &IntegratorOptions,
    specs: &[PassSpec],
    outcomes: &[PassOutcome],
    metrics: Metrics,
    margin: f64,
) -> Result<RunOutput, RunError> {
    let state = &outcomes.last().expect("at least one pass").state;
    let paired: Vec<_> = specs.iter().zip(outcomes).collect();
    let table = trajectory_table(&paired)?;
    let (final_populations, final_amplitudes) = final_listing(state);
    let mut warnings: Vec<String> = protocols::collected_warnings(outcomes).iter().map(|w| w.to_string()).collect();
    warnings.dedup();
    Ok(RunOutput {
        summary: Summary {
            scenario: cfg.scenario,
            description: cfg.description.clone(),
            window: Some(Window { t_start: opts.t_start, t_end: opts.t_end, dt: opts.dt }),
            passes: pass_summaries(specs, margin),
            metrics,
            final_populations,
            final_amplitudes,
            final_norm: Some(state.norm()),
            warnings,
        },
        table: Some(table),
        final_state: state.amplitudes().to_vec(),
    })
}

/// Runs a validated scenario. Nothing is written.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let margin = cfg.margin_factor.unwrap_or(DEFAULT_MARGIN_FACTOR);
    match cfg.scenario {
        ScenarioKind::Surface => return run_surface(cfg),
        ScenarioKind::Adiabaticity => return run_adiabaticity(cfg, margin),
        _ => {}
    }
    let opts = cfg.integrator_options()?;
    let specs = cfg.pass_specs()?;
    match cfg.scenario {
        ScenarioKind::Fock => {
            let r = protocols::generate_fock(&specs[0], &opts)?;
            let metrics = Metrics::Fock {
                p_plus0: r.p_plus0,
                p_minus1: r.p_minus1,
                norm: r.norm,
                max_norm_drift: r.pass.trajectory.max_norm_drift(),
                end_rate: r.end_rate,
            };
            assemble(cfg, &opts, &[specs[0].on(0, 0)], &[r.pass], metrics, margin)
        }
        ScenarioKind::HalfScrap => {
            let r = protocols::atom_photon_entangle(&specs[0], &opts)?;
            let metrics = Metrics::HalfScrap {
                p_plus0: r.p_plus0,
                p_minus1: r.p_minus1,
                fidelity_raw: r.fidelity_raw,
                fidelity_phase_optimized: r.fidelity_phase_optimized,
                entropy: r.entropy,
            };
            assemble(cfg, &opts, &[specs[0].on(0, 0)], &[r.pass], metrics, margin)
        }
        ScenarioKind::EntangleAtoms => {
            let r = protocols::entangle_atoms(&specs[0], &specs[1], &opts)?;
            let rho1 = analysis::partial_trace(&r.state, &[Subsystem::Atom(0)])?;
            let metrics = Metrics::EntangleAtoms {
                concurrence: r.concurrence,
                entropy: analysis::entanglement_entropy(&rho1)?,
                p_vacuum: r.p_vacuum,
            };
            let used = [specs[0].on(0, 0), specs[1].on(1, 0)];
            assemble(cfg, &opts, &used, &r.passes, metrics, margin)
        }
        ScenarioKind::QstAtom => {
            let (alpha, beta) = cfg.inputs.expect("validated").amplitudes();
            let r = protocols::qst_atom_to_atom(alpha, beta, &specs[0], &specs[1], &opts)?;
            let metrics = Metrics::QstAtom {
                cavity_fidelity: r.cavity_fidelity,
                atom2_fidelity_raw: r.atom2_fidelity_raw,
                atom2_fidelity_phase_optimized: r.atom2_fidelity_phase_optimized,
                atom1_p_ground: r.atom1_p_ground,
                p_vacuum: r.p_vacuum,
            };
            let used = [specs[0].on(0, 0), specs[1].on(1, 0)];
            assemble(cfg, &opts, &used, &r.passes, metrics, margin)
        }
        ScenarioKind::QstCavity | ScenarioKind::Network => {
            let (alpha, beta) = cfg.inputs.expect("validated").amplitudes();
            let nodes = if cfg.scenario == ScenarioKind::QstCavity { 2 } else { cfg.node_count.expect("validated") };
            let r = protocols::network_chain(alpha, beta, nodes, &specs[0], &specs[1], &opts)?;
            let used: Vec<PassSpec> = (0..nodes - 1)
                .flat_map(|h| [specs[0].on(h, h), specs[1].on(h, h + 1)])
                .collect();
            let metrics = Metrics::Network {
                node_count: nodes,
                final_fidelity: r.final_fidelity(),
                hops: r.hops,
                source_p_vacuum: r.source_p_vacuum,
                atoms_p_ground: r.atoms_p_ground,
            };
            assemble(cfg, &opts, &used, &r.passes, metrics, margin)
        }
        ScenarioKind::Surface | ScenarioKind::Adiabaticity => unreachable!("handled above"),
    }
}

fn run_adiabaticity(cfg: &ScenarioConfig, margin: f64) -> Result<RunOutput, RunError> {
    let specs = cfg.pass_specs()?;
    let passes = pass_summaries(&specs, margin);
    let all_satisfied = passes.iter().all(|p| p.adiabaticity.is_some_and(|r| r.satisfied));
    Ok(RunOutput {
        summary: Summary {
            scenario: cfg.scenario,
            description: cfg.description.clone(),
            window: None,
            passes,
            metrics: Metrics::Adiabaticity { all_satisfied },
            final_populations: Vec::new(),
            final_amplitudes: Vec::new(),
            final_norm: None,
            warnings: Vec::new(),
        },
        table: None,
        final_state: Vec::new(),
    })
}

/// Eigenenergy table over `G` in `[0, g_max]` and `S` in `[s_min, s_max]`, in units of delta.
pub fn surface_table(g_max: f64, s_min: f64, s_max: f64, resolution: usize) -> Result<(Table, Metrics), RunError> {
    let grid = analysis::surface_grid((0.0, g_max), (s_min, s_max), (resolution, resolution))?;
    let mut table = Table::new(["g", "s", "e_plus", "e_minus", "gap"].iter().map(|s| s.to_string()).collect());
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (ig, g) in grid.g_axis.iter().enumerate() {
        for (is, s) in grid.s_axis.iter().enumerate() {
            let gap = grid.gap(ig, is);
            if gap < best.0 {
                best = (gap, *g, *s);
            }
            table.push(vec![*g, *s, grid.e_plus[ig][is], grid.e_minus[ig][is], gap]);
        }
    }
    let metrics = Metrics::Surface {
        g_points: grid.g_axis.len(),
        s_points: grid.s_axis.len(),
        min_gap: best.0,
        min_gap_g: best.1,
        min_gap_s: best.2,
    };
    Ok((table, metrics))
}

fn run_surface(cfg: &ScenarioConfig) -> Result<RunOutput, RunError> {
    let s = cfg.surface.expect("validated");
    let (table, metrics) = surface_table(s.g_max, s.s_min, s.s_max, s.resolution)?;
    Ok(RunOutput {
        summary: Summary {
            scenario: cfg.scenario,
            description: cfg.description.clone(),
            window: None,
            passes: Vec::new(),
            metrics,
            final_populations: Vec::new(),
            final_amplitudes: Vec::new(),
            final_norm: None,
            warnings: Vec::new(),
        },
        table: Some(table),
        final_state: Vec::new(),
    })
}
