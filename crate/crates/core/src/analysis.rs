//! Post-processing: eigenenergy surfaces, the adiabaticity inequality,
//! fidelities, reduced density matrices and entanglement measures.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{eigensystem, HamiltonianSample, SystemParams};
use crate::pulse::PulseSchedule;
use crate::state::{JointState, Subsystem};

pub type DensityMatrix = DMatrix<C64>;

/// Default factor standing in for "much smaller than".
pub const DEFAULT_MARGIN_FACTOR: f64 = 10.0;

/// Tolerance used when checking that a matrix is a physical density matrix.
pub const DENSITY_TOLERANCE: f64 = 1e-8;

/// Eigenenergies on a regular `(G, S)` grid, everything in units of the
/// static detuning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceGrid {
    pub g_axis: Vec<f64>,
    pub s_axis: Vec<f64>,
    /// Indexed `[g][s]`.
    pub e_plus: Vec<Vec<f64>>,
    pub e_minus: Vec<Vec<f64>>,
}

impl SurfaceGrid {
    pub fn gap(&self, ig: usize, is: usize) -> f64 {
        self.e_plus[ig][is] - self.e_minus[ig][is]
    }
}

fn linspace(range: (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = range;
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

pub fn surface_grid(g_range: (f64, f64), s_range: (f64, f64), resolution: (usize, usize)) -> Result<SurfaceGrid> {
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::Domain("surface grid needs at least 2 points per axis".into()));
    }
    if [g_range.0, g_range.1, s_range.0, s_range.1].iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("surface grid ranges must be finite".into()));
    }
    let g_axis = linspace(g_range, resolution.0);
    let s_axis = linspace(s_range, resolution.1);
    let mut e_plus = Vec::with_capacity(g_axis.len());
    let mut e_minus = Vec::with_capacity(g_axis.len());
    for &g in &g_axis {
        let mut up = Vec::with_capacity(s_axis.len());
        let mut down = Vec::with_capacity(s_axis.len());
        for &s in &s_axis {
            let e = eigensystem(&HamiltonianSample::from_parts(g, 1.0 + s))?;
            up.push(e.e_plus);
            down.push(e.e_minus);
        }
        e_plus.push(up);
        e_minus.push(down);
    }
    Ok(SurfaceGrid { g_axis, s_axis, e_plus, e_minus })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticityReport {
    /// `exp(-8 tau^2 / T_C^2)`.
    pub left_term: f64,
    /// `delta / (G0^2 T_S) * sqrt(ln(S0 / delta))`.
    pub middle_term: f64,
    /// `middle_term / left_term`.
    pub left_margin: f64,
    /// `1 / middle_term`.
    pub right_margin: f64,
    pub margin_factor: f64,
    pub satisfied: bool,
}

/// Evaluates the adiabaticity requirement for delayed Gaussian pulses,
/// `exp(-8 tau^2/T_C^2) << delta/(G0^2 T_S) sqrt(ln(S0/delta)) << 1`, reading
/// each `<<` as "smaller by at least `margin_factor`".
pub fn check_adiabaticity(sched: &PulseSchedule, sys: &SystemParams, margin_factor: f64) -> Result<AdiabaticityReport> {
    sched.validate()?;
    if !(margin_factor > 0.0) {
        return Err(Error::Domain("margin factor must be positive".into()));
    }
    if !(sys.delta > 0.0) {
        return Err(Error::Domain(format!("static detuning must be positive, got {}", sys.delta)));
    }
    if !(sched.s0 > sys.delta) {
        return Err(Error::Domain(format!(
            "peak Stark shift {} does not exceed the detuning {}; the resonance is never crossed",
            sched.s0, sys.delta
        )));
    }
    let ratio = sched.tau / sched.t_c;
    let left_term = (-8.0 * ratio * ratio).exp();
    let middle_term = sys.delta / (sched.g0 * sched.g0 * sched.t_s) * (sched.s0 / sys.delta).ln().sqrt();
    let satisfied = left_term * margin_factor <= middle_term && middle_term * margin_factor <= 1.0;
    Ok(AdiabaticityReport {
        left_term,
        middle_term,
        left_margin: middle_term / left_term,
        right_margin: 1.0 / middle_term,
        margin_factor,
        satisfied,
    })
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|<a|b>|^2`. With a mask, the components where the mask is set may carry
/// an extra relative phase that is optimized away.
pub fn fidelity(a: &[C64], b: &[C64], phase_mask: Option<&[bool]>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    match phase_mask {
        None => Ok(inner(a, b).norm_sqr()),
        Some(mask) => {
            if mask.len() != a.len() {
                return Err(Error::DimensionMismatch { expected: a.len(), got: mask.len() });
            }
            let (mut fixed, mut free) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for ((x, y), &m) in a.iter().zip(b).zip(mask) {
                if m {
                    free += x.conj() * y;
                } else {
                    fixed += x.conj() * y;
                }
            }
            let s = fixed.norm() + free.norm();
            Ok(s * s)
        }
    }
}

/// `<t|rho|t>` for a qubit density matrix and pure target `t`. With
/// `phase_optimize`, the relative phase of the target's second component is
/// chosen to maximise the overlap.
pub fn reduced_fidelity(rho: &DensityMatrix, target: &[C64; 2], phase_optimize: bool) -> Result<f64> {
    if rho.nrows() != 2 || rho.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.nrows() });
    }
    let [a, b] = *target;
    let diag = a.norm_sqr() * rho[(0, 0)].re + b.norm_sqr() * rho[(1, 1)].re;
    let cross = a.conj() * rho[(0, 1)] * b;
    Ok(if phase_optimize { diag + 2.0 * cross.norm() } else { diag + 2.0 * cross.re })
}

/// Reduced density matrix on the kept subsystems, in the order given.
pub fn partial_trace(state: &JointState, keep: &[Subsystem]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidSelector("nothing to keep".into()));
    }
    let kept_bits = keep.iter().map(|&s| state.bit(s)).collect::<Result<Vec<_>>>()?;
    for (i, b) in kept_bits.iter().enumerate() {
        if kept_bits[..i].contains(b) {
            return Err(Error::InvalidSelector(format!("{:?} selected twice", keep[i])));
        }
    }
    let width = state.atoms() + state.cavities();
    let traced_bits: Vec<usize> = (0..width).filter(|b| !kept_bits.contains(b)).collect();
    let kdim = 1usize << kept_bits.len();
    let compose = |kept: usize, traced: usize| -> usize {
        let mut index = 0;
        for (pos, &bit) in kept_bits.iter().enumerate() {
            let digit = (kept >> (kept_bits.len() - 1 - pos)) & 1;
            index |= digit << bit;
        }
        for (pos, &bit) in traced_bits.iter().enumerate() {
            index |= ((traced >> pos) & 1) << bit;
        }
        index
    };
    let amps = state.amplitudes();
    let mut rho = DensityMatrix::zeros(kdim, kdim);
    for r in 0..(1usize << traced_bits.len()) {
        for i in 0..kdim {
            let ai = amps[compose(i, r)];
            if ai == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..kdim {
                rho[(i, j)] += ai * amps[compose(j, r)].conj();
            }
        }
    }
    Ok(rho)
}

fn check_density(rho: &DensityMatrix) -> Result<()> {
    let n = rho.nrows();
    if n == 0 || rho.ncols() != n {
        return Err(Error::NonPhysical("matrix is not square".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if (rho[(i, j)] - rho[(j, i)].conj()).norm() > DENSITY_TOLERANCE {
                return Err(Error::NonPhysical("matrix is not Hermitian".into()));
            }
        }
    }
    let trace: f64 = (0..n).map(|i| rho[(i, i)].re).sum();
    if (trace - 1.0).abs() > DENSITY_TOLERANCE {
        return Err(Error::NonPhysical(format!("trace is {trace}")));
    }
    let min = hermitian_eigenvalues(rho).into_iter().fold(f64::INFINITY, f64::min);
    if min < -DENSITY_TOLERANCE {
        return Err(Error::NonPhysical(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

fn hermitian_eigenvalues(m: &DensityMatrix) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// Relative weight below which an eigenvalue of a density matrix is treated
/// as rounding noise when building the concurrence.
const RANK_CUTOFF: f64 = 1e-13;

/// Wootters concurrence of a two-qubit density matrix.
///
/// Uses the decomposition `rho = sum_k |v_k><v_k|` into subnormalized
/// eigenvectors: the Wootters lambdas are the singular values of the
/// symmetric matrix `tau_jk = v_j^T (sy x sy) v_k`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.nrows() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.nrows() });
    }
    check_density(rho)?;
    let eig = rho.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let vectors: Vec<Vec<C64>> = (0..4)
        .filter(|&k| eig.eigenvalues[k] > RANK_CUTOFF * top)
        .map(|k| {
            let w = eig.eigenvalues[k].sqrt();
            eig.eigenvectors.column(k).iter().map(|z| z * w).collect()
        })
        .collect();
    // sy x sy maps (a, b, c, d) to (-d, c, b, -a).
    let flip = |v: &[C64]| [-v[3], v[2], v[1], -v[0]];
    let r = vectors.len();
    let tau = DMatrix::from_fn(r, r, |j, k| {
        let fk = flip(&vectors[k]);
        vectors[j].iter().zip(fk.iter()).map(|(a, b)| a * b).sum::<C64>()
    });
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.resize(4, 0.0);
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Von Neumann entropy in bits.
pub fn entanglement_entropy(rho: &DensityMatrix) -> Result<f64> {
    check_density(rho)?;
    Ok(hermitian_eigenvalues(rho)
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulsePath;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fig3() -> (PulseSchedule, SystemParams) {
        (
            PulseSchedule::new(10.0, 1.0, 20.0, 1.0, 1.5, PulsePath::StarkFirst).unwrap(),
            SystemParams::lossless(10.0),
        )
    }

    #[test]
    fn surface_special_points() {
        let grid = surface_grid((0.0, 1.0), (-3.0, 1.0), (2, 5)).unwrap();
        assert_eq!(grid.s_axis, [-3.0, -2.0, -1.0, 0.0, 1.0]);
        // Conical intersection at G = 0, S = -delta.
        assert_eq!(grid.gap(0, 2), 0.0);
        assert_eq!((grid.e_plus[0][3], grid.e_minus[0][3]), (1.0, 0.0));
        assert_relative_eq!(grid.e_plus[1][2], 1.0, max_relative = 1e-15);
        assert_relative_eq!(grid.e_minus[1][2], -1.0, max_relative = 1e-15);
        assert!(surface_grid((0.0, 1.0), (0.0, 1.0), (1, 5)).is_err());
    }

    #[test]
    fn adiabaticity_at_reference_parameters() {
        let (sched, sys) = fig3();
        let r = check_adiabaticity(&sched, &sys, DEFAULT_MARGIN_FACTOR).unwrap();
        assert_relative_eq!(r.left_term, (-18.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(r.left_term, 1.522_997_974_471_263e-8, max_relative = 1e-12);
        assert_relative_eq!(r.middle_term, 0.1 * 2f64.ln().sqrt(), max_relative = 1e-14);
        assert!(r.satisfied);

        let r = check_adiabaticity(&PulseSchedule { tau: 0.0, ..sched }, &sys, DEFAULT_MARGIN_FACTOR).unwrap();
        assert_eq!(r.left_term, 1.0);
        assert!(!r.satisfied);

        let err = check_adiabaticity(&PulseSchedule { s0: 10.0, ..sched }, &sys, DEFAULT_MARGIN_FACTOR);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn fidelity_examples() {
        let h = FRAC_1_SQRT_2;
        let a = [c(h, 0.0), c(h, 0.0)];
        let b = [c(h, 0.0), c(0.0, h)];
        assert_relative_eq!(fidelity(&a, &a, None).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(fidelity(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)], None).unwrap(), 0.0);
        assert_relative_eq!(fidelity(&a, &b, None).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(fidelity(&a, &b, Some(&[false, true])).unwrap(), 1.0, epsilon = 1e-15);
        assert!(fidelity(&a, &[c(1.0, 0.0)], None).is_err());
    }

    #[test]
    fn reduced_fidelity_matches_pure_overlap() {
        let h = FRAC_1_SQRT_2;
        let psi = JointState::product(&[[c(h, 0.0), c(0.0, h)]], &[[c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let rho = partial_trace(&psi, &[Subsystem::Atom(0)]).unwrap();
        let target = [c(h, 0.0), c(h, 0.0)];
        assert_relative_eq!(reduced_fidelity(&rho, &target, false).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(reduced_fidelity(&rho, &target, true).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn traces_of_standard_states() {
        let h = FRAC_1_SQRT_2;
        // (|+,0> + |-,1>)/sqrt2, basis order |-,0>,|-,1>,|+,0>,|+,1>.
        let s = JointState::new(1, 1, vec![c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
        let atom = partial_trace(&s, &[Subsystem::Atom(0)]).unwrap();
        assert_relative_eq!(atom[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(atom[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_eq!(atom[(0, 1)], c(0.0, 0.0));
        assert_relative_eq!(entanglement_entropy(&atom).unwrap(), 1.0, epsilon = 1e-12);

        let product = JointState::basis(&[true, false], &[0]).unwrap();
        let rho = partial_trace(&product, &[Subsystem::Atom(0), Subsystem::Atom(1)]).unwrap();
        assert_relative_eq!(rho[(2, 2)].re, 1.0);
        assert!(entanglement_entropy(&rho).unwrap().abs() < 1e-12);
        assert!(concurrence(&rho).unwrap().abs() < 1e-12);

        assert!(partial_trace(&product, &[Subsystem::Atom(0), Subsystem::Atom(0)]).is_err());
        assert!(partial_trace(&product, &[Subsystem::Cavity(3)]).is_err());
        assert!(partial_trace(&product, &[]).is_err());
    }

    #[test]
    fn concurrence_of_bell_type_states() {
        let h = FRAC_1_SQRT_2;
        let bell = |phi: f64| {
            DensityMatrix::from_fn(4, 4, |i, j| {
                let v = [c(0.0, 0.0), C64::from_polar(h, phi), c(h, 0.0), c(0.0, 0.0)];
                v[i] * v[j].conj()
            })
        };
        for phi in [0.0, 0.7, 2.0] {
            assert_relative_eq!(concurrence(&bell(phi)).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn entropy_examples() {
        let rho = DensityMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.25, 0.0), c(0.75, 0.0)]));
        // -(1/4) log2(1/4) - (3/4) log2(3/4) = 0.5 + 0.75 log2(4/3)
        let expected = 0.5 + 0.75 * (4.0f64 / 3.0).log2();
        assert_relative_eq!(entanglement_entropy(&rho).unwrap(), expected, epsilon = 1e-14);
        assert_relative_eq!(expected, 0.811_278_124_459_132_8, epsilon = 1e-15);
        let half = DensityMatrix::identity(2, 2) * c(0.5, 0.0);
        assert_relative_eq!(entanglement_entropy(&half).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn non_physical_inputs() {
        let bad = DensityMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(matches!(entanglement_entropy(&bad), Err(Error::NonPhysical(_))));
        let unnormalized = DensityMatrix::identity(4, 4);
        assert!(matches!(concurrence(&unnormalized), Err(Error::NonPhysical(_))));
        assert!(concurrence(&DensityMatrix::identity(2, 2)).is_err());
    }
}
