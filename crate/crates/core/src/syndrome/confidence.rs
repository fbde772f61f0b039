use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{DensityOperator, PauliChannel, QuantumState, C64};
use crate::surface_code::{
    quiescent_state, StabilizerChoice, StabilizerKind, StabilizerRecord, SurfaceCodeLattice,
    MAX_QUIESCENT_QUBITS,
};

use super::protocol::spin_ancilla_readout;
use super::{InteractionModel, ProtocolOptions, ReadoutBasis, Syndrome};

/// Below this the readout probability is treated as zero.
pub const MIN_READOUT_PROBABILITY: f64 = 1e-300;

/// Which stabilizer to interrogate and how.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfidenceSettings {
    pub kind: StabilizerKind,
    pub choice: StabilizerChoice,
    pub options: ProtocolOptions,
}

impl ConfidenceSettings {
    pub fn new(kind: StabilizerKind) -> Self {
        ConfidenceSettings {
            kind,
            choice: StabilizerChoice::First,
            options: ProtocolOptions::default(),
        }
    }
}

/// Readout distribution of one stabilizer measurement on the noisy
/// quiescent state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutStatistics {
    pub stabilizer_id: usize,
    pub weight: usize,
    pub readout_basis: ReadoutBasis,
    /// Probability of reading `+1` and `-1`.
    pub probability: [f64; 2],
    /// Probability of reading `b` while the data is in the `b` eigenspace.
    pub correct: [f64; 2],
    pub loss_probability: f64,
}

impl ReadoutStatistics {
    fn slot(readout: Syndrome) -> usize {
        match readout {
            Syndrome::Plus => 0,
            Syndrome::Minus => 1,
        }
    }

    pub fn probability_of(&self, readout: Syndrome) -> f64 {
        self.probability[Self::slot(readout)]
    }

    /// `P(data eigenvalue = b | readout b)`.
    pub fn confidence(&self, readout: Syndrome) -> Result<f64> {
        let i = Self::slot(readout);
        let denominator = self.probability[i];
        if denominator < MIN_READOUT_PROBABILITY {
            return Err(Error::ZeroProbabilityReadout { denominator });
        }
        Ok((self.correct[i] / denominator).clamp(0.0, 1.0))
    }
}

/// Channel with a single error type that the given stabilizer detects:
/// X errors at rate `p` for plaquettes, Z errors for stars.
pub fn single_type_channel(p: f64, kind: StabilizerKind) -> Result<PauliChannel> {
    match kind {
        StabilizerKind::Plaquette => PauliChannel::new(p, 0.0, 0.0),
        StabilizerKind::Star => PauliChannel::new(0.0, 0.0, p),
    }
}

/// Reduced state of the quiescent state on a stabilizer's support.
///
/// Small lattices use the dense quiescent state. On larger ones no other
/// element of the stabilizer group fits inside a single support, so the
/// reduced state is `(1 + S) / 2^w`.
pub(crate) fn support_density(
    lattice: &SurfaceCodeLattice,
    stab: &StabilizerRecord,
) -> Result<DensityOperator> {
    if lattice.num_qubits() <= MAX_QUIESCENT_QUBITS {
        return quiescent_state(lattice)?.reduced_density(&stab.support);
    }
    let w = stab.weight();
    let dim = 1usize << w;
    let scale = 1.0 / dim as f64;
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        data[i * dim + i] += scale;
        match stab.kind {
            StabilizerKind::Star => data[i * dim + (i ^ (dim - 1))] += scale,
            StabilizerKind::Plaquette => {
                let sign = if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                data[i * dim + i] += sign * scale;
            }
        }
    }
    DensityOperator::new(stab.support.clone(), data)
}

/// Readout statistics of `stab` after `channel` acts independently on every
/// data qubit of the quiescent state.
pub fn readout_statistics(
    lattice: &SurfaceCodeLattice,
    channel: &PauliChannel,
    model: &InteractionModel,
    settings: &ConfidenceSettings,
) -> Result<ReadoutStatistics> {
    channel.validate()?;
    let stab = lattice.select(settings.kind, settings.choice)?;
    let mut rho = support_density(lattice, stab)?;
    for l in &stab.support {
        rho = rho.apply_pauli_channel(*l, channel)?;
    }
    statistics_for(&rho, stab, model, &settings.options)
}

pub(crate) fn statistics_for(
    rho: &DensityOperator,
    stab: &StabilizerRecord,
    model: &InteractionModel,
    options: &ProtocolOptions,
) -> Result<ReadoutStatistics> {
    let raw = spin_ancilla_readout(rho, stab.kind, &stab.support, model, options)?;
    let pauli = stab.pauli_string();
    let total = raw.input_weight;
    let mut probability = [0.0; 2];
    let mut correct = [0.0; 2];
    for (i, (branch, sign)) in raw.branches.iter().zip([1.0, -1.0]).enumerate() {
        let w = branch.weight();
        let s = branch.pauli_expectation(&pauli)?;
        probability[i] = (w / total).max(0.0);
        correct[i] = (0.5 * (w + sign * s) / total).max(0.0);
    }
    Ok(ReadoutStatistics {
        stabilizer_id: stab.id,
        weight: stab.weight(),
        readout_basis: raw.basis,
        probability,
        correct,
        loss_probability: (1.0 - probability[0] - probability[1]).max(0.0),
    })
}

/// Probability that the data is in the `readout` eigenspace of the first
/// stabilizer of `kind`, given the measure qubit reported `readout`.
pub fn confidence(
    lattice: &SurfaceCodeLattice,
    channel: &PauliChannel,
    model: &InteractionModel,
    kind: StabilizerKind,
    readout: Syndrome,
) -> Result<f64> {
    confidence_with(
        lattice,
        channel,
        model,
        &ConfidenceSettings::new(kind),
        readout,
    )
}

pub fn confidence_with(
    lattice: &SurfaceCodeLattice,
    channel: &PauliChannel,
    model: &InteractionModel,
    settings: &ConfidenceSettings,
    readout: Syndrome,
) -> Result<f64> {
    readout_statistics(lattice, channel, model, settings)?.confidence(readout)
}
