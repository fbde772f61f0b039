use rayon::prelude::*;
use serde_json::Value;
use spinphoton_core::cavity::{
    phase_difference, solve_detuning_with, CavitySystem, DetuningSearch, PhaseSign,
};
use spinphoton_core::entanglement::{efficiency_sweep, PairTemplate, PointStatus};
use spinphoton_core::surface_code::{Geometry, SurfaceCodeLattice, MAX_QUIESCENT_QUBITS};
use spinphoton_core::syndrome::{
    readout_statistics, sample_syndromes, single_type_channel, ConfidenceSettings,
    InteractionModel, ReadoutStatistics, SamplingOptions, Syndrome,
};
use spinphoton_core::Error;

use crate::config::{
    ConfidenceSweepConfig, Config, EntangleSweepConfig, ModelSpec, Readout, SolveDetuningConfig,
    SyndromeSimConfig,
};
use crate::error::CliError;
use crate::report::{Cell, Report};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
}

pub fn execute(config: &Config, overrides: &Overrides) -> Result<Report, CliError> {
    match config {
        Config::SolveDetuning(c) => solve_detuning(c),
        Config::ConfidenceSweep(c) => confidence_sweep(c),
        Config::EntangleSweep(c) => entangle_sweep(c),
        Config::SyndromeSim(c) => syndrome_sim(c, overrides),
    }
}

fn sign_name(sign: PhaseSign) -> &'static str {
    match sign {
        PhaseSign::Plus => "plus",
        PhaseSign::Minus => "minus",
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(v)?)
}

pub fn solve_detuning(c: &SolveDetuningConfig) -> Result<Report, CliError> {
    let sys = CavitySystem::resonant(c.g, c.kappa_s, c.gamma)?;
    let mut search = DetuningSearch::default();
    if let Some([lo, hi]) = c.bracket {
        search.bracket = Some((lo, hi));
    }
    if let Some(n) = c.scan_points {
        search.scan_points = n;
    }
    let signs = match c.sign {
        Some(s) => vec![s],
        None => vec![PhaseSign::Plus, PhaseSign::Minus],
    };
    let mut report = Report::new(
        "solve-detuning",
        vec!["sign", "target", "delta", "phase", "residual"],
    );
    for sign in signs {
        let target = sign.angle();
        for root in solve_detuning_with(&sys, target, &search)? {
            report.push(vec![
                sign_name(sign).into(),
                Cell::Float(target),
                Cell::Float(root.delta),
                Cell::Float(phase_difference(&sys, root.delta)),
                Cell::Float(root.residual),
            ]);
        }
    }
    report.meta.insert("system".into(), to_value(&sys)?);
    Ok(report)
}

fn lattice(geometry: Geometry, distance: usize) -> Result<SurfaceCodeLattice, CliError> {
    let built = match geometry {
        Geometry::Planar => SurfaceCodeLattice::planar(distance),
        Geometry::Toric => SurfaceCodeLattice::toric(distance),
    };
    built.map_err(|e| CliError::invalid("distance", e.to_string()))
}

enum PointStats {
    Ok(ReadoutStatistics),
    NoConditionalPhase,
}

pub fn confidence_sweep(c: &ConfidenceSweepConfig) -> Result<Report, CliError> {
    let lattice = lattice(c.geometry, c.distance)?;
    if lattice.num_qubits() > MAX_QUIESCENT_QUBITS {
        return Err(CliError::invalid(
            "distance",
            format!(
                "lattice has {} data qubits, at most {MAX_QUIESCENT_QUBITS} are supported",
                lattice.num_qubits()
            ),
        ));
    }
    lattice
        .select(c.kind, c.stabilizer)
        .map_err(|e| CliError::invalid("stabilizer", e.to_string()))?;
    let gs = c.g.values("g")?;
    let ps = c.p_star.values("p_star")?;
    let deltas = c.delta.values("delta")?;
    let settings = ConfidenceSettings {
        kind: c.kind,
        choice: c.stabilizer,
        options: c.protocol(),
    };

    let mut grid = Vec::with_capacity(gs.len() * ps.len() * deltas.len());
    for &g in &gs {
        for &p in &ps {
            grid.extend(deltas.iter().map(|&d| (g, p, d)));
        }
    }
    let stats: Vec<PointStats> = grid
        .par_iter()
        .map(|&(g, p, delta)| {
            let channel = single_type_channel(p, c.kind)
                .map_err(|e| CliError::invalid("p_star", e.to_string()))?;
            let sys = CavitySystem::resonant(g, c.kappa_s, c.gamma)?;
            let model = match InteractionModel::physical_with_sign(sys, delta, c.sign) {
                Ok(m) => m,
                Err(Error::InvalidModel(_)) => return Ok(PointStats::NoConditionalPhase),
                Err(e) => return Err(e.into()),
            };
            Ok(PointStats::Ok(readout_statistics(
                &lattice, &channel, &model, &settings,
            )?))
        })
        .collect::<Result<_, CliError>>()?;

    let mut report = Report::new(
        "confidence-sweep",
        vec!["delta", "g", "p_star", "readout", "confidence", "flag"],
    );
    for (&(g, p, delta), st) in grid.iter().zip(&stats) {
        for &readout in &c.readouts {
            let syndrome = match readout {
                Readout::Plus => Syndrome::Plus,
                Readout::Minus => Syndrome::Minus,
            };
            let (confidence, flag) = match st {
                PointStats::NoConditionalPhase => (Cell::Empty, "no_conditional_phase"),
                PointStats::Ok(s) => match s.confidence(syndrome) {
                    Ok(v) => (Cell::Float(v), ""),
                    Err(Error::ZeroProbabilityReadout { .. }) => (Cell::Empty, "zero_probability"),
                    Err(e) => return Err(e.into()),
                },
            };
            report.push(vec![
                Cell::Float(delta),
                Cell::Float(g),
                Cell::Float(p),
                Cell::Int(syndrome.value() as i64),
                confidence,
                flag.into(),
            ]);
        }
    }
    report.meta.insert("gamma".into(), Value::from(c.gamma));
    report.meta.insert("kappa_s".into(), Value::from(c.kappa_s));
    report.meta.insert("kind".into(), to_value(&c.kind)?);
    report
        .meta
        .insert("geometry".into(), to_value(&c.geometry)?);
    report
        .meta
        .insert("distance".into(), Value::from(c.distance));
    report.meta.insert("sign".into(), to_value(&c.sign)?);
    Ok(report)
}

pub fn entangle_sweep(c: &EntangleSweepConfig) -> Result<Report, CliError> {
    let deltas = c.delta_energy.values("delta_energy")?;
    let mut report = Report::new(
        "entangle-sweep",
        vec![
            "g",
            "gamma_ratio",
            "kappa_s",
            "delta_energy",
            "probe_frequency",
            "eta",
            "eta_ratio",
            "fidelity",
            "status",
        ],
    );
    for &ratio in &c.gamma_ratios {
        for &kappa_s in &c.kappa_s {
            let template = PairTemplate {
                g: c.g,
                kappa_s,
                gamma1: c.gamma1,
                gamma2: c.gamma1 * ratio,
            };
            let sweep = efficiency_sweep(&template, &deltas, c.mode)?;
            for p in sweep.points {
                let status = match p.status {
                    PointStatus::Ok => "ok",
                    PointStatus::NoRoot => "no_root",
                };
                report.push(vec![
                    Cell::Float(c.g),
                    Cell::Float(ratio),
                    Cell::Float(kappa_s),
                    Cell::Float(p.delta_energy),
                    Cell::opt(p.probe_frequency),
                    Cell::opt(p.eta),
                    Cell::opt(p.eta_ratio),
                    Cell::opt(p.fidelity),
                    status.into(),
                ]);
            }
        }
    }
    report.meta.insert("gamma1".into(), Value::from(c.gamma1));
    report.meta.insert("mode".into(), to_value(&c.mode)?);
    Ok(report)
}

fn interaction_model(spec: &ModelSpec) -> Result<InteractionModel, CliError> {
    match *spec {
        ModelSpec::Ideal { sign } => Ok(InteractionModel::ideal(sign)),
        ModelSpec::Physical {
            g,
            gamma,
            kappa_s,
            delta,
            sign,
            root,
        } => {
            let sys = CavitySystem::resonant(g, kappa_s, gamma)?;
            let delta = match delta {
                Some(d) => d,
                None => {
                    let roots: Vec<f64> =
                        solve_detuning_with(&sys, sign.angle(), &DetuningSearch::default())?
                            .into_iter()
                            .map(|r| r.delta)
                            .collect();
                    root.pick(&roots).ok_or_else(|| {
                        CliError::invalid("model.root", "no root matches the selection")
                    })?
                }
            };
            Ok(InteractionModel::physical_with_sign(sys, delta, sign)?)
        }
    }
}

pub fn syndrome_sim(c: &SyndromeSimConfig, overrides: &Overrides) -> Result<Report, CliError> {
    let seed = overrides.seed.or(c.seed).ok_or_else(|| {
        CliError::invalid(
            "seed",
            "required for sampling (set it in the config or pass --seed)",
        )
    })?;
    let lattice = lattice(c.geometry, c.distance)?;
    let channel = c.channel.channel()?;
    let model = interaction_model(&c.model)?;
    let options = SamplingOptions {
        protocol: c.protocol(),
    };
    let tally = sample_syndromes(&lattice, &channel, &model, c.shots, seed, &options)?;

    let mut report = Report::new(
        "syndrome-sim",
        vec![
            "kind",
            "stab_id",
            "weight",
            "plus",
            "minus",
            "lost",
            "empirical_minus",
            "exact_minus",
            "exact_loss",
            "sigma",
            "deviation_sigma",
        ],
    );
    for t in &tally.stabilizers {
        let sigma = t.minus_sigma();
        let dev = t.minus_rate() - t.exact_minus;
        let dev_sigma = if sigma > 0.0 {
            Cell::Float(dev / sigma)
        } else {
            Cell::Empty
        };
        report.push(vec![
            Cell::Text(to_value(&t.kind)?.as_str().unwrap_or_default().to_string()),
            Cell::Int(t.stab_id as i64),
            Cell::Int(t.weight as i64),
            Cell::Int(t.plus as i64),
            Cell::Int(t.minus as i64),
            Cell::Int(t.lost as i64),
            Cell::Float(t.minus_rate()),
            Cell::Float(t.exact_minus),
            Cell::Float(t.exact_loss),
            Cell::Float(sigma),
            dev_sigma,
        ]);
    }
    report
        .meta
        .insert("geometry".into(), to_value(&c.geometry)?);
    report
        .meta
        .insert("distance".into(), Value::from(c.distance));
    report.meta.insert("channel".into(), to_value(&channel)?);
    report.meta.insert("model".into(), to_value(&model)?);
    report.meta.insert("shots".into(), Value::from(tally.shots));
    report.meta.insert("seed".into(), Value::from(tally.seed));
    Ok(report)
}
