//! Monte-Carlo syndrome statistics.
//!
//! Each shot draws an iid Pauli error on every data qubit of the quiescent
//! state and measures every stabilizer of the errored state once. The
//! outcome distribution of a stabilizer only depends on the error pattern
//! restricted to its support, so it is computed exactly once per pattern and
//! cached. Shot `k` uses the ChaCha8 stream `k` of the run seed, which keeps
//! results independent of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{DensityOperator, Pauli, PauliChannel, QuantumState};
use crate::surface_code::{StabilizerKind, StabilizerRecord, SurfaceCodeLattice};

use super::confidence::{statistics_for, support_density};
use super::protocol::spin_ancilla_readout;
use super::{InteractionModel, ProtocolOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SamplingOptions {
    pub protocol: ProtocolOptions,
}

/// One simulated readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyndromeRecord {
    pub stab_id: usize,
    pub kind: StabilizerKind,
    /// `None` when the photon was lost.
    pub outcome: Option<i8>,
    pub probability: f64,
    pub heralded_loss: bool,
}

/// Per-stabilizer counts with the exact rates they estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerTally {
    pub stab_id: usize,
    pub kind: StabilizerKind,
    pub weight: usize,
    pub plus: u64,
    pub minus: u64,
    pub lost: u64,
    pub exact_plus: f64,
    pub exact_minus: f64,
    pub exact_loss: f64,
}

impl StabilizerTally {
    pub fn shots(&self) -> u64 {
        self.plus + self.minus + self.lost
    }

    pub fn minus_rate(&self) -> f64 {
        self.minus as f64 / self.shots() as f64
    }

    /// Binomial standard deviation of the `-1` rate at the exact value.
    pub fn minus_sigma(&self) -> f64 {
        let p = self.exact_minus;
        (p * (1.0 - p) / self.shots() as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyndromeTally {
    pub shots: u64,
    pub seed: u64,
    pub stabilizers: Vec<StabilizerTally>,
}

/// Outcome probabilities `(+1, -1)` for every error pattern on one support,
/// indexed by the base-4 pattern code.
struct PatternTable {
    stab: StabilizerRecord,
    outcomes: Vec<(f64, f64)>,
}

fn pauli_code(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

impl PatternTable {
    fn build(
        rho: &DensityOperator,
        stab: &StabilizerRecord,
        model: &InteractionModel,
        opts: &ProtocolOptions,
    ) -> Result<Self> {
        let w = stab.weight();
        let mut outcomes = Vec::with_capacity(1 << (2 * w));
        for code in 0..1usize << (2 * w) {
            let ops: Vec<_> = stab
                .support
                .iter()
                .enumerate()
                .map(|(j, l)| (*l, PAULIS[(code >> (2 * (w - 1 - j))) & 3]))
                .collect();
            let errored = conjugate(rho, &ops)?;
            let raw = spin_ancilla_readout(&errored, stab.kind, &stab.support, model, opts)?;
            let total = raw.input_weight;
            outcomes.push((
                raw.branches[0].weight() / total,
                raw.branches[1].weight() / total,
            ));
        }
        Ok(PatternTable {
            stab: stab.clone(),
            outcomes,
        })
    }

    fn code(&self, errors: &[Pauli]) -> usize {
        self.stab.support.iter().fold(0, |acc, l| {
            (acc << 2) | pauli_code(errors[l.index as usize])
        })
    }
}

/// `P rho P` for a Pauli string `P`.
fn conjugate(
    rho: &DensityOperator,
    ops: &[(crate::quantum::QubitLabel, Pauli)],
) -> Result<DensityOperator> {
    let mut out = rho.clone();
    for (l, p) in ops {
        if *p != Pauli::I {
            out = out.apply_pauli_channel(*l, &certain(*p))?;
        }
    }
    Ok(out)
}

fn certain(p: Pauli) -> PauliChannel {
    match p {
        Pauli::X => PauliChannel {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        },
        Pauli::Y => PauliChannel {
            x: 0.0,
            y: 1.0,
            z: 0.0,
        },
        Pauli::Z => PauliChannel {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        },
        Pauli::I => PauliChannel::noiseless(),
    }
}

#[derive(Clone)]
struct Counts(Vec<[u64; 3]>);

impl Counts {
    fn zero(n: usize) -> Self {
        Counts(vec![[0; 3]; n])
    }

    #[cfg(feature = "parallel")]
    fn merge(mut self, other: Counts) -> Counts {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
        self
    }
}

fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Draws one shot: the error on every data qubit, then one readout per stabilizer.
fn run_shot(
    seed: u64,
    shot: u64,
    n: usize,
    channel: &PauliChannel,
    tables: &[PatternTable],
) -> Vec<SyndromeRecord> {
    let mut rng = shot_rng(seed, shot);
    let errors: Vec<Pauli> = (0..n).map(|_| channel.sample(rng.gen::<f64>())).collect();
    tables
        .iter()
        .map(|t| {
            let (plus, minus) = t.outcomes[t.code(&errors)];
            let u: f64 = rng.gen();
            let (outcome, probability) = if u < plus {
                (Some(1), plus)
            } else if u < plus + minus {
                (Some(-1), minus)
            } else {
                (None, (1.0 - plus - minus).max(0.0))
            };
            SyndromeRecord {
                stab_id: t.stab.id,
                kind: t.stab.kind,
                outcome,
                probability,
                heralded_loss: outcome.is_none(),
            }
        })
        .collect()
}

fn tally_shot(mut counts: Counts, records: &[SyndromeRecord]) -> Counts {
    for (c, r) in counts.0.iter_mut().zip(records) {
        match r.outcome {
            Some(1) => c[0] += 1,
            Some(_) => c[1] += 1,
            None => c[2] += 1,
        }
    }
    counts
}

/// Records of a single shot, for inspection.
pub fn sample_shot(
    lattice: &SurfaceCodeLattice,
    channel: &PauliChannel,
    model: &InteractionModel,
    seed: u64,
    shot: u64,
    options: &SamplingOptions,
) -> Result<Vec<SyndromeRecord>> {
    let tables = build_tables(lattice, model, &options.protocol)?;
    channel.validate()?;
    Ok(run_shot(seed, shot, lattice.num_qubits(), channel, &tables))
}

fn build_tables(
    lattice: &SurfaceCodeLattice,
    model: &InteractionModel,
    opts: &ProtocolOptions,
) -> Result<Vec<PatternTable>> {
    lattice
        .all_stabilizers()
        .map(|stab| PatternTable::build(&support_density(lattice, stab)?, stab, model, opts))
        .collect()
}

/// Samples `shots` rounds of syndrome extraction over the whole lattice.
pub fn sample_syndromes(
    lattice: &SurfaceCodeLattice,
    channel: &PauliChannel,
    model: &InteractionModel,
    shots: u64,
    seed: u64,
    options: &SamplingOptions,
) -> Result<SyndromeTally> {
    channel.validate()?;
    if shots == 0 {
        return Err(Error::InvalidParameter {
            name: "shots",
            value: 0.0,
            reason: "must be positive",
        });
    }
    let tables = build_tables(lattice, model, &options.protocol)?;
    let n = lattice.num_qubits();
    let m = tables.len();
    let one =
        |counts: Counts, shot: u64| tally_shot(counts, &run_shot(seed, shot, n, channel, &tables));

    #[cfg(feature = "parallel")]
    let counts = {
        use rayon::prelude::*;
        (0..shots)
            .into_par_iter()
            .fold(|| Counts::zero(m), one)
            .reduce(|| Counts::zero(m), Counts::merge)
    };
    #[cfg(not(feature = "parallel"))]
    let counts = (0..shots).fold(Counts::zero(m), one);

    let mut stabilizers = Vec::with_capacity(m);
    for (t, c) in tables.iter().zip(counts.0) {
        let mut rho = support_density(lattice, &t.stab)?;
        for l in &t.stab.support {
            rho = rho.apply_pauli_channel(*l, channel)?;
        }
        let exact = statistics_for(&rho, &t.stab, model, &options.protocol)?;
        stabilizers.push(StabilizerTally {
            stab_id: t.stab.id,
            kind: t.stab.kind,
            weight: t.stab.weight(),
            plus: c[0],
            minus: c[1],
            lost: c[2],
            exact_plus: exact.probability[0],
            exact_minus: exact.probability[1],
            exact_loss: exact.loss_probability,
        });
    }
    Ok(SyndromeTally {
        shots,
        seed,
        stabilizers,
    })
}
