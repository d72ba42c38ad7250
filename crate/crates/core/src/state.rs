//! Joint state of `k` two-level atoms and `m` cavity modes truncated to
//! `n <= 1`.
//!
//! Basis states are ordered with the first atom as the most significant
//! digit and the last cavity as the least significant one. Atom digits are
//! `-` (0) and `+` (1); cavity digits are photon numbers.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Normalization tolerance accepted at construction.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Atom(usize),
    Cavity(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    atoms: usize,
    cavities: usize,
    amps: Vec<C64>,
}

impl JointState {
    pub fn new(atoms: usize, cavities: usize, amps: Vec<C64>) -> Result<Self> {
        let state = Self::unchecked(atoms, cavities, amps)?;
        let n = state.norm();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(state)
    }

    /// Like [`JointState::new`] but without the normalization check, for
    /// states that went through a lossy pass.
    pub fn unchecked(atoms: usize, cavities: usize, amps: Vec<C64>) -> Result<Self> {
        if atoms == 0 || cavities == 0 {
            return Err(Error::InvalidSelector("need at least one atom and one cavity".into()));
        }
        let dim = 1usize << (atoms + cavities);
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: amps.len() });
        }
        Ok(JointState { atoms, cavities, amps })
    }

    /// Tensor product of single-qubit states. Atom components are ordered
    /// `[|->, |+>]`, cavity components `[|0>, |1>]`.
    pub fn product(atom_states: &[[C64; 2]], cavity_states: &[[C64; 2]]) -> Result<Self> {
        let mut amps = vec![C64::new(1.0, 0.0)];
        for q in atom_states.iter().chain(cavity_states) {
            amps = amps.iter().flat_map(|a| [a * q[0], a * q[1]]).collect();
        }
        Self::new(atom_states.len(), cavity_states.len(), amps)
    }

    /// Basis state from digits, e.g. `basis(&[true, false], &[0])` is |+,-,0>.
    pub fn basis(excited: &[bool], photons: &[u8]) -> Result<Self> {
        let atoms = excited.len();
        let cavities = photons.len();
        if photons.iter().any(|&n| n > 1) {
            return Err(Error::ExcitationOverflow { label: format!("{photons:?}") });
        }
        let digits = excited.iter().map(|&e| e as usize).chain(photons.iter().map(|&n| n as usize));
        let index = digits.fold(0, |acc, d| (acc << 1) | d);
        let mut amps = vec![C64::new(0.0, 0.0); 1 << (atoms + cavities)];
        if let Some(a) = amps.get_mut(index) {
            *a = C64::new(1.0, 0.0);
        }
        Self::new(atoms, cavities, amps)
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn cavities(&self) -> usize {
        self.cavities
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Bit position of a subsystem inside a basis index.
    pub fn bit(&self, sub: Subsystem) -> Result<usize> {
        match sub {
            Subsystem::Atom(i) if i < self.atoms => Ok(self.atoms + self.cavities - 1 - i),
            Subsystem::Cavity(j) if j < self.cavities => Ok(self.cavities - 1 - j),
            other => Err(Error::InvalidSelector(format!(
                "{other:?} not present in a state with {} atoms and {} cavities",
                self.atoms, self.cavities
            ))),
        }
    }

    pub fn label(&self, index: usize) -> String {
        let width = self.atoms + self.cavities;
        (0..width)
            .map(|pos| {
                let digit = (index >> (width - 1 - pos)) & 1;
                match (pos < self.atoms, digit) {
                    (true, 0) => "-",
                    (true, _) => "+",
                    (false, 0) => "0",
                    (false, _) => "1",
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|i| self.label(i)).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        (0..self.dim()).find(|&i| self.label(i) == label)
    }

    pub fn probability(&self, label: &str) -> Option<f64> {
        self.index_of(label).map(|i| self.amps[i].norm_sqr())
    }

    /// Number of excited atoms plus photons in basis state `index`.
    pub fn excitation(index: usize) -> u32 {
        index.count_ones()
    }

    pub fn mean_excitation(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * Self::excitation(i) as f64)
            .sum()
    }

    /// Probability that `sub` is in its upper level (`+` or one photon).
    pub fn excited_probability(&self, sub: Subsystem) -> Result<f64> {
        let bit = self.bit(sub)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> bit) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Linear combination `a * self + b * other` on the same space.
    pub fn combine(&self, a: C64, other: &JointState, b: C64) -> Result<JointState> {
        if other.dim() != self.dim() || other.atoms != self.atoms {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let amps = self.amps.iter().zip(&other.amps).map(|(x, y)| a * x + b * y).collect();
        JointState::unchecked(self.atoms, self.cavities, amps)
    }
}
