//! Dense state-vector and density-matrix engine over labeled qubit registers.
//!
//! Amplitudes are indexed in label-list order with the first label as the
//! most significant bit. Photons use |L> = |0>, |R> = |1>; spins use
//! |up> = |0>, |down> = |1>.

mod density;
pub mod gates;
mod label;
mod pure;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use density::DensityOperator;
pub use gates::Gate;
pub use label::{QubitKind, QubitLabel};
pub use pure::PureState;

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 14;

pub(crate) const NORM_SLACK: f64 = 1e-12;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    /// Eigenket for eigenvalue `+1` (`positive == true`) or `-1`.
    pub fn eigenket(self, positive: bool) -> [C64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match (self, positive) {
            (Basis::Z, true) => [ONE, ZERO],
            (Basis::Z, false) => [ZERO, ONE],
            (Basis::X, true) => [C64::new(s, 0.0), C64::new(s, 0.0)],
            (Basis::X, false) => [C64::new(s, 0.0), C64::new(-s, 0.0)],
            (Basis::Y, true) => [C64::new(s, 0.0), C64::new(0.0, s)],
            (Basis::Y, false) => [C64::new(s, 0.0), C64::new(0.0, -s)],
        }
    }
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn gate(self) -> Gate {
        match self {
            Pauli::I => gates::identity(),
            Pauli::X => gates::pauli_x(),
            Pauli::Y => gates::pauli_y(),
            Pauli::Z => gates::pauli_z(),
        }
    }

    /// Product `self * other` up to a phase.
    pub fn compose(self, other: Pauli) -> Pauli {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => p,
            (a, b) if a == b => I,
            (X, Y) | (Y, X) => Z,
            (Y, Z) | (Z, Y) => X,
            (X, Z) | (Z, X) => Y,
            _ => unreachable!(),
        }
    }
}

/// Per-qubit Pauli error channel `(1-p) rho + x X rho X + y Y rho Y + z Z rho Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PauliChannel {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let ch = PauliChannel { x, y, z };
        ch.validate()?;
        Ok(ch)
    }

    pub fn noiseless() -> Self {
        PauliChannel {
            x: 0.0,
            y: 0.0,
            z: 0.0,
        }
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p / 3.0, p / 3.0, p / 3.0)
    }

    /// Physical error rate `p = x + y + z`.
    pub fn error_rate(&self) -> f64 {
        self.x + self.y + self.z
    }

    /// Channel conjugated by a Hadamard: X and Z errors exchange roles.
    pub fn hadamard_dual(&self) -> Self {
        PauliChannel {
            x: self.z,
            y: self.y,
            z: self.x,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.x, self.y, self.z]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
            && self.error_rate() <= 1.0 + NORM_SLACK;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidChannel {
                x: self.x,
                y: self.y,
                z: self.z,
            })
        }
    }

    /// Maps a uniform sample in `[0, 1)` onto an error.
    pub fn sample(&self, u: f64) -> Pauli {
        if u < self.x {
            Pauli::X
        } else if u < self.x + self.y {
            Pauli::Y
        } else if u < self.error_rate() {
            Pauli::Z
        } else {
            Pauli::I
        }
    }
}

/// One outcome of a projective single-qubit measurement.
#[derive(Debug, Clone)]
pub struct MeasurementBranch<S> {
    /// Eigenvalue, `+1` or `-1`.
    pub outcome: i8,
    pub probability: f64,
    /// Renormalized post-measurement state; the measured qubit stays in the register.
    pub state: S,
}

/// Operations shared by [`PureState`] and [`DensityOperator`].
pub trait QuantumState: Clone + Sized {
    fn labels(&self) -> &[QubitLabel];

    /// `<psi|psi>` or `Tr rho`.
    fn weight(&self) -> f64;

    fn is_subnormalized(&self) -> bool;

    fn apply_single_qubit(&self, label: QubitLabel, gate: &Gate) -> Result<Self>;

    fn apply_two_qubit_diagonal(
        &self,
        a: QubitLabel,
        b: QubitLabel,
        diag: [C64; 4],
    ) -> Result<Self>;

    /// Appends a fresh qubit prepared in `ket` as the least significant position.
    fn with_qubit(&self, label: QubitLabel, ket: [C64; 2]) -> Result<Self>;

    /// Contracts `label` against `<ket|` and removes it from the register.
    /// The result is not renormalized; its weight is the branch probability
    /// times the input weight.
    fn project_out(&self, label: QubitLabel, ket: [C64; 2]) -> Result<Self>;

    /// Unnormalized expectation `<psi| P |psi>` or `Tr[P rho]` of a Pauli string.
    fn pauli_expectation(&self, ops: &[(QubitLabel, Pauli)]) -> Result<f64>;

    /// Scales the state so that its weight is `weight() * factor`.
    fn scale_weight(&self, factor: f64) -> Self;

    fn normalized(&self) -> Self {
        let w = self.weight();
        if w > 0.0 {
            self.scale_weight(1.0 / w)
        } else {
            self.clone()
        }
    }

    fn measure_in_basis(
        &self,
        label: QubitLabel,
        basis: Basis,
    ) -> Result<Vec<MeasurementBranch<Self>>> {
        let total = self.weight();
        let mut branches = Vec::with_capacity(2);
        for positive in [true, false] {
            let ket = basis.eigenket(positive);
            let projector = gates::projector(ket);
            let collapsed = self.apply_single_qubit(label, &projector)?;
            let p = collapsed.weight();
            if p > 1e-28 * total {
                branches.push(MeasurementBranch {
                    outcome: if positive { 1 } else { -1 },
                    probability: p,
                    state: collapsed.normalized(),
                });
            }
        }
        Ok(branches)
    }
}

pub(crate) fn check_labels(labels: &[QubitLabel]) -> Result<()> {
    if labels.len() > MAX_QUBITS {
        return Err(Error::TooLarge {
            qubits: labels.len(),
            max: MAX_QUBITS,
        });
    }
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(Error::DuplicateLabel(*a));
        }
    }
    Ok(())
}

pub(crate) fn position(labels: &[QubitLabel], label: QubitLabel) -> Result<usize> {
    labels
        .iter()
        .position(|l| *l == label)
        .ok_or(Error::UnknownLabel(label))
}

/// Bit mask of `label` inside a register of `n` qubits.
pub(crate) fn mask_at(n: usize, pos: usize) -> usize {
    1usize << (n - 1 - pos)
}

pub(crate) fn is_unit_modulus(c: C64) -> bool {
    (c.norm_sqr() - 1.0).abs() <= NORM_SLACK
}
