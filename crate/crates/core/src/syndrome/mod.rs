//! Stabilizer measurement with a cavity-coupled spin as the measure qubit
//! (or, swapped, a probe photon measuring spin data qubits).
//!
//! Every photon reflected from the cavity picks up `r_h` when its circular
//! polarization matches the spin's allowed transition (`L` with up, `R` with
//! down) and `r_0` otherwise. With a quarter-wave conditional phase the
//! relative spin phase after `w` photons encodes the photonic parity.

mod confidence;
mod protocol;
mod sampling;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cavity::{phase_difference, CavitySystem, PhaseSign, ReflectionPair};
use crate::error::{Error, Result};
use crate::quantum::{Basis, C64};

pub use confidence::{
    confidence, confidence_with, readout_statistics, single_type_channel, ConfidenceSettings,
    ReadoutStatistics,
};
pub use protocol::{
    correct_swapped_phases, measure_boundary, measure_plaquette, measure_stabilizer, measure_star,
    measure_swapped,
};
pub use sampling::{
    sample_shot, sample_syndromes, SamplingOptions, StabilizerTally, SyndromeRecord, SyndromeTally,
};

/// Reflection model used for every spin-photon interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InteractionModel {
    /// Lossless reflection with a conditional phase of exactly `+-pi/2`.
    IdealPhase { sign: PhaseSign },
    /// Reflection amplitudes of `system` at cavity detuning `delta`. `sign`
    /// is the quarter-wave target the readout basis is designed for.
    Physical {
        system: CavitySystem,
        delta: f64,
        sign: PhaseSign,
    },
}

impl InteractionModel {
    pub fn ideal(sign: PhaseSign) -> Self {
        InteractionModel::IdealPhase { sign }
    }

    /// Physical model whose readout sign follows the actual conditional phase.
    pub fn physical(system: CavitySystem, delta: f64) -> Result<Self> {
        let phase = phase_difference(&system, delta);
        Self::physical_with_sign(system, delta, PhaseSign::of(phase))
    }

    pub fn physical_with_sign(system: CavitySystem, delta: f64, sign: PhaseSign) -> Result<Self> {
        system.validate()?;
        if !delta.is_finite() {
            return Err(Error::InvalidModel(format!(
                "detuning {delta} is not finite"
            )));
        }
        let phase = phase_difference(&system, delta);
        if phase == 0.0 {
            return Err(Error::InvalidModel(
                "conditional phase is zero at this detuning".into(),
            ));
        }
        Ok(InteractionModel::Physical {
            system,
            delta,
            sign,
        })
    }

    pub fn sign(&self) -> PhaseSign {
        match *self {
            InteractionModel::IdealPhase { sign } | InteractionModel::Physical { sign, .. } => sign,
        }
    }

    pub fn reflections(&self) -> ReflectionPair {
        match *self {
            InteractionModel::IdealPhase { sign } => ReflectionPair {
                r_coupled: quarter_wave(sign),
                r_cold: Complex64::new(1.0, 0.0),
            },
            InteractionModel::Physical { system, delta, .. } => {
                system.reflections(system.frequency_for(delta))
            }
        }
    }

    /// Actual conditional phase `arg(r_h) - arg(r_0)`.
    pub fn phase_difference(&self) -> f64 {
        match *self {
            InteractionModel::IdealPhase { sign } => sign.angle(),
            InteractionModel::Physical { system, delta, .. } => phase_difference(&system, delta),
        }
    }

    /// Unit phasor `e^{i phi~}`; exact `+-i` in the ideal model.
    pub fn conditional_phasor(&self) -> C64 {
        match *self {
            InteractionModel::IdealPhase { sign } => quarter_wave(sign),
            InteractionModel::Physical { .. } => {
                let r = self.reflections();
                let ratio = r.r_coupled / r.r_cold;
                ratio / ratio.norm()
            }
        }
    }
}

fn quarter_wave(sign: PhaseSign) -> C64 {
    match sign {
        PhaseSign::Plus => Complex64::new(0.0, 1.0),
        PhaseSign::Minus => Complex64::new(0.0, -1.0),
    }
}

/// Diagonal two-qubit coefficients for `(L up, L down, R up, R down)`.
pub fn interaction_coefficients(model: &InteractionModel) -> [C64; 4] {
    coefficients_from(model.reflections())
}

pub fn coefficients_from(r: ReflectionPair) -> [C64; 4] {
    [r.r_coupled, r.r_cold, r.r_cold, r.r_coupled]
}

/// Initial state of the measure qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SpinInit {
    #[default]
    Plus,
    Minus,
}

impl SpinInit {
    pub fn ket(self) -> [C64; 2] {
        match self {
            SpinInit::Plus => Basis::X.eigenket(true),
            SpinInit::Minus => Basis::X.eigenket(false),
        }
    }

    fn relative_sign(self) -> f64 {
        match self {
            SpinInit::Plus => 1.0,
            SpinInit::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    pub spin_init: SpinInit,
    /// Apply the `R -> e^{i phi~} R` retarder to every support photon.
    pub phase_correction: bool,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        ProtocolOptions {
            spin_init: SpinInit::Plus,
            phase_correction: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Syndrome {
    Plus,
    Minus,
}

impl Syndrome {
    pub fn value(self) -> i8 {
        match self {
            Syndrome::Plus => 1,
            Syndrome::Minus => -1,
        }
    }

    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Syndrome::Minus
        } else {
            Syndrome::Plus
        }
    }

    pub fn both() -> [Syndrome; 2] {
        [Syndrome::Plus, Syndrome::Minus]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReadoutBasis {
    X,
    Y,
    PhotonHV,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyndromeOutcome {
    pub value: Syndrome,
    pub readout_basis: ReadoutBasis,
    pub heralded_loss: bool,
    pub probability: f64,
}

#[derive(Debug, Clone)]
pub struct SyndromeBranch<S> {
    pub outcome: SyndromeOutcome,
    /// Renormalized data state after the ancilla is discarded.
    pub state: S,
}

/// Outcome distribution of one stabilizer measurement.
#[derive(Debug, Clone)]
pub struct SyndromeMeasurement<S> {
    pub readout_basis: ReadoutBasis,
    pub branches: Vec<SyndromeBranch<S>>,
    /// Norm deficit from `|r| < 1`, a heralded photon loss.
    pub loss_probability: f64,
}

impl<S> SyndromeMeasurement<S> {
    pub fn probability(&self, value: Syndrome) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.outcome.value == value)
            .map(|b| b.outcome.probability)
            .sum()
    }

    pub fn branch(&self, value: Syndrome) -> Option<&SyndromeBranch<S>> {
        self.branches.iter().find(|b| b.outcome.value == value)
    }
}

/// Measure-qubit readout for a weight-`w` operator: the basis and the
/// eigenkets flagging syndrome `+1` and `-1`.
///
/// The `+1` ket is the state an even-parity input drives the measure qubit
/// to under the nominal quarter-wave phase: `|up> + s e^{-i w phi} |down>`
/// with `s = +-1` from the initial state. Even weights give an X-basis
/// readout, odd weights a Y-basis one.
pub(crate) fn readout_kets(
    model: &InteractionModel,
    weight: usize,
    init: SpinInit,
) -> (Basis, [[C64; 2]; 2]) {
    let step = quarter_wave(model.sign()).conj();
    let mut ratio = Complex64::new(init.relative_sign(), 0.0);
    for _ in 0..weight {
        ratio *= step;
    }
    let (basis, positive) = if ratio.im.abs() < 1e-12 {
        (Basis::X, ratio.re > 0.0)
    } else {
        (Basis::Y, ratio.im > 0.0)
    };
    (basis, [basis.eigenket(positive), basis.eigenket(!positive)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ideal_coefficients_are_exact() {
        let c = interaction_coefficients(&InteractionModel::ideal(PhaseSign::Plus));
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(c, [i, one, one, i]);
        let c = interaction_coefficients(&InteractionModel::ideal(PhaseSign::Minus));
        assert_eq!(c, [-i, one, one, -i]);
    }

    #[test]
    fn uncoupled_physical_has_no_conditionality() {
        let sys = CavitySystem::resonant(0.0, 0.0, 0.1).unwrap();
        let c = coefficients_from(sys.reflections(sys.frequency_for(0.7)));
        assert!(c.iter().all(|v| *v == c[0]));
        assert!(InteractionModel::physical(sys, 0.7).is_err());
    }

    #[test]
    fn solved_detuning_gives_quarter_wave_ratio() {
        let sys = CavitySystem::resonant(2.4, 0.0, 0.1).unwrap();
        let roots = crate::cavity::solve_detuning(&sys, -PI / 2.0).unwrap();
        for delta in roots {
            let model = InteractionModel::physical(sys, delta).unwrap();
            assert_eq!(model.sign(), PhaseSign::Minus);
            let c = interaction_coefficients(&model);
            assert!(((c[0] / c[1]).arg() + PI / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn readout_basis_by_weight() {
        let plus = InteractionModel::ideal(PhaseSign::Plus);
        let minus = InteractionModel::ideal(PhaseSign::Minus);
        let (b, k) = readout_kets(&plus, 4, SpinInit::Plus);
        assert_eq!(b, Basis::X);
        assert_eq!(k[0], Basis::X.eigenket(true));
        let (b, k) = readout_kets(&minus, 4, SpinInit::Minus);
        assert_eq!(b, Basis::X);
        assert_eq!(k[0], Basis::X.eigenket(false));
        // Even parity on three photons leaves the spin in (|up> + i|down>)/sqrt 2.
        let (b, k) = readout_kets(&plus, 3, SpinInit::Plus);
        assert_eq!(b, Basis::Y);
        assert_eq!(k[0], Basis::Y.eigenket(true));
        let (_, k) = readout_kets(&minus, 3, SpinInit::Plus);
        assert_eq!(k[0], Basis::Y.eigenket(false));
    }
}
