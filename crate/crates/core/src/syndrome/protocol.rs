use crate::error::{Error, Result};
use crate::quantum::{gates, Basis, QuantumState, QubitKind, QubitLabel, C64};
use crate::surface_code::{StabilizerKind, StabilizerRecord};

use super::{
    interaction_coefficients, quarter_wave, readout_kets, InteractionModel, ProtocolOptions,
    ReadoutBasis, Syndrome, SyndromeBranch, SyndromeMeasurement, SyndromeOutcome,
};

/// Unnormalized data states for readouts `+1` and `-1`, before renormalization.
pub(crate) struct RawReadout<S> {
    pub basis: ReadoutBasis,
    pub branches: [S; 2],
    pub input_weight: f64,
}

fn fresh_label(labels: &[QubitLabel], kind: QubitKind) -> QubitLabel {
    let index = labels
        .iter()
        .filter(|l| l.kind == kind)
        .map(|l| l.index + 1)
        .max()
        .unwrap_or(0);
    QubitLabel { kind, index }
}

fn check_support<S: QuantumState>(
    state: &S,
    support: &[QubitLabel],
    kind: QubitKind,
) -> Result<()> {
    for (i, l) in support.iter().enumerate() {
        if l.kind != kind || !state.labels().contains(l) {
            return Err(Error::UnknownSupport(*l));
        }
        if support[..i].contains(l) {
            return Err(Error::DuplicateLabel(*l));
        }
    }
    if support.is_empty() {
        return Err(Error::WeightMismatch {
            expected: 3,
            actual: 0,
        });
    }
    Ok(())
}

fn sorted(support: &[QubitLabel]) -> Vec<QubitLabel> {
    let mut s = support.to_vec();
    s.sort();
    s
}

/// Spin-ancilla measurement of the Z-parity (plaquette) or, with Hadamards
/// on the support, X-parity (star) of the photons in `support`.
pub(crate) fn spin_ancilla_readout<S: QuantumState>(
    state: &S,
    kind: StabilizerKind,
    support: &[QubitLabel],
    model: &InteractionModel,
    opts: &ProtocolOptions,
) -> Result<RawReadout<S>> {
    check_support(state, support, QubitKind::Photon)?;
    let support = sorted(support);
    let hadamard = gates::hadamard();
    let mut s = state.clone();
    if kind == StabilizerKind::Star {
        for l in &support {
            s = s.apply_single_qubit(*l, &hadamard)?;
        }
    }
    let spin = fresh_label(s.labels(), QubitKind::Spin);
    s = s.with_qubit(spin, opts.spin_init.ket())?;
    let coeffs = interaction_coefficients(model);
    for l in &support {
        s = s.apply_two_qubit_diagonal(*l, spin, coeffs)?;
    }
    if opts.phase_correction {
        let fix = gates::diagonal(C64::new(1.0, 0.0), model.conditional_phasor());
        for l in &support {
            s = s.apply_single_qubit(*l, &fix)?;
        }
    }
    if kind == StabilizerKind::Star {
        for l in &support {
            s = s.apply_single_qubit(*l, &hadamard)?;
        }
    }
    let (basis, kets) = readout_kets(model, support.len(), opts.spin_init);
    let branches = [s.project_out(spin, kets[0])?, s.project_out(spin, kets[1])?];
    Ok(RawReadout {
        basis: match basis {
            Basis::Y => ReadoutBasis::Y,
            _ => ReadoutBasis::X,
        },
        branches,
        input_weight: state.weight(),
    })
}

fn finish<S: QuantumState>(raw: RawReadout<S>) -> SyndromeMeasurement<S> {
    let total = raw.input_weight;
    let mut kept = 0.0;
    let mut branches = Vec::with_capacity(2);
    for (value, state) in Syndrome::both().into_iter().zip(raw.branches) {
        let w = state.weight();
        kept += w;
        if w > 1e-28 * total {
            branches.push(SyndromeBranch {
                outcome: SyndromeOutcome {
                    value,
                    readout_basis: raw.basis,
                    heralded_loss: false,
                    probability: w / total,
                },
                state: state.normalized(),
            });
        }
    }
    SyndromeMeasurement {
        readout_basis: raw.basis,
        branches,
        loss_probability: ((total - kept) / total).max(0.0),
    }
}

fn require_weight(support: &[QubitLabel], weight: usize) -> Result<()> {
    if support.len() == weight {
        Ok(())
    } else {
        Err(Error::WeightMismatch {
            expected: weight,
            actual: support.len(),
        })
    }
}

/// Weight-4 Z-parity measurement.
pub fn measure_plaquette<S: QuantumState>(
    state: &S,
    support: &[QubitLabel],
    model: &InteractionModel,
    opts: &ProtocolOptions,
) -> Result<SyndromeMeasurement<S>> {
    require_weight(support, 4)?;
    Ok(finish(spin_ancilla_readout(
        state,
        StabilizerKind::Plaquette,
        support,
        model,
        opts,
    )?))
}

/// Weight-4 X-parity measurement.
pub fn measure_star<S: QuantumState>(
    state: &S,
    support: &[QubitLabel],
    model: &InteractionModel,
    opts: &ProtocolOptions,
) -> Result<SyndromeMeasurement<S>> {
    require_weight(support, 4)?;
    Ok(finish(spin_ancilla_readout(
        state,
        StabilizerKind::Star,
        support,
        model,
        opts,
    )?))
}

/// Weight-3 measurement on a lattice edge, read out in the Y basis.
pub fn measure_boundary<S: QuantumState>(
    state: &S,
    kind: StabilizerKind,
    support: &[QubitLabel],
    model: &InteractionModel,
    opts: &ProtocolOptions,
) -> Result<SyndromeMeasurement<S>> {
    require_weight(support, 3)?;
    Ok(finish(spin_ancilla_readout(
        state, kind, support, model, opts,
    )?))
}

pub fn measure_stabilizer<S: QuantumState>(
    state: &S,
    stab: &StabilizerRecord,
    model: &InteractionModel,
    opts: &ProtocolOptions,
) -> Result<SyndromeMeasurement<S>> {
    match (stab.weight(), stab.kind) {
        (4, StabilizerKind::Plaquette) => measure_plaquette(state, &stab.support, model, opts),
        (4, StabilizerKind::Star) => measure_star(state, &stab.support, model, opts),
        (3, kind) => measure_boundary(state, kind, &stab.support, model, opts),
        (w, _) => Err(Error::WeightMismatch {
            expected: 4,
            actual: w,
        }),
    }
}

/// Swapped roles: a probe photon in `|H>` reflects off each spin of
/// `support` and is detected in the H/V basis. `H` flags even Z-parity of
/// the spins. Branch states still carry the configuration-dependent phase
/// removed by [`correct_swapped_phases`].
pub fn measure_swapped<S: QuantumState>(
    state: &S,
    support: &[QubitLabel],
    model: &InteractionModel,
) -> Result<SyndromeMeasurement<S>> {
    check_support(state, support, QubitKind::Spin)?;
    let support = sorted(support);
    let s_half = std::f64::consts::FRAC_1_SQRT_2;
    let probe = fresh_label(state.labels(), QubitKind::Photon);
    let mut s = state.with_qubit(probe, Basis::X.eigenket(true))?;
    let coeffs = interaction_coefficients(model);
    for l in &support {
        s = s.apply_two_qubit_diagonal(probe, *l, coeffs)?;
    }
    let mut retard = C64::new(1.0, 0.0);
    for _ in 0..support.len() {
        retard *= quarter_wave(model.sign());
    }
    s = s.apply_single_qubit(probe, &gates::diagonal(C64::new(1.0, 0.0), retard))?;
    let h = [C64::new(s_half, 0.0), C64::new(s_half, 0.0)];
    let v = [C64::new(0.0, -s_half), C64::new(0.0, s_half)];
    Ok(finish(RawReadout {
        basis: ReadoutBasis::PhotonHV,
        branches: [s.project_out(probe, h)?, s.project_out(probe, v)?],
        input_weight: state.weight(),
    }))
}

/// Applies the `R`-photon reflection `diag(r_0, r_h)` to every spin of
/// `support`, which makes the phase picked up during [`measure_swapped`]
/// uniform across the surviving parity sector.
pub fn correct_swapped_phases<S: QuantumState>(
    state: &S,
    support: &[QubitLabel],
    model: &InteractionModel,
) -> Result<S> {
    check_support(state, support, QubitKind::Spin)?;
    let c = interaction_coefficients(model);
    let gate = gates::diagonal(c[2], c[3]);
    let mut s = state.clone();
    for l in support {
        s = s.apply_single_qubit(*l, &gate)?;
    }
    Ok(s)
}
