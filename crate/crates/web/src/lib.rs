//! Browser bindings: each export takes plain numbers and returns a JSON
//! document that `www/index.html` plots on a canvas.

use serde::Serialize;
use spinphoton_core::cavity::{phase_difference, solve_detuning, CavitySystem, PhaseSign};
use spinphoton_core::entanglement::{efficiency_sweep, EntanglementMode, PairTemplate};
use spinphoton_core::surface_code::{StabilizerKind, SurfaceCodeLattice};
use spinphoton_core::syndrome::{
    readout_statistics, single_type_channel, ConfidenceSettings, InteractionModel, Syndrome,
};
use spinphoton_core::Error;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 4001;

fn grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, Error> {
    if !(2..=MAX_POINTS).contains(&points) || !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter {
            name: "points",
            value: points as f64,
            reason: "need 2..=4001 points over a nonempty range",
        });
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|i| lo + i as f64 * step).collect())
}

#[derive(Debug, Serialize)]
pub struct PhaseCurve {
    pub delta: Vec<f64>,
    pub phase: Vec<f64>,
    pub abs_r_coupled: Vec<f64>,
    pub abs_r_cold: Vec<f64>,
    pub roots_plus: Vec<f64>,
    pub roots_minus: Vec<f64>,
}

pub fn phase_curve_data(
    g: f64,
    gamma: f64,
    kappa_s: f64,
    delta_max: f64,
    points: usize,
) -> Result<PhaseCurve, Error> {
    let sys = CavitySystem::resonant(g, kappa_s, gamma)?;
    let delta = grid(-delta_max, delta_max, points)?;
    let mut curve = PhaseCurve {
        phase: delta.iter().map(|&d| phase_difference(&sys, d)).collect(),
        abs_r_coupled: Vec::with_capacity(points),
        abs_r_cold: Vec::with_capacity(points),
        roots_plus: solve_detuning(&sys, PhaseSign::Plus.angle()).unwrap_or_default(),
        roots_minus: solve_detuning(&sys, PhaseSign::Minus.angle()).unwrap_or_default(),
        delta,
    };
    for &d in &curve.delta {
        let r = sys.reflections(sys.frequency_for(d));
        curve.abs_r_coupled.push(r.r_coupled.norm());
        curve.abs_r_cold.push(r.r_cold.norm());
    }
    Ok(curve)
}

#[derive(Debug, Serialize)]
pub struct ConfidenceCurve {
    pub delta: Vec<f64>,
    /// `None` where the readout never occurs or the coupling gives no phase.
    pub plus: Vec<Option<f64>>,
    pub minus: Vec<Option<f64>>,
}

/// Confidence of both readouts of a weight-4 stabilizer on a distance-3
/// planar lattice, against the cavity detuning.
pub fn confidence_curve_data(
    g: f64,
    gamma: f64,
    p_star: f64,
    star: bool,
    delta_max: f64,
    points: usize,
) -> Result<ConfidenceCurve, Error> {
    let kind = if star {
        StabilizerKind::Star
    } else {
        StabilizerKind::Plaquette
    };
    let sys = CavitySystem::resonant(g, 0.0, gamma)?;
    let lattice = SurfaceCodeLattice::planar(3)?;
    let channel = single_type_channel(p_star, kind)?;
    let settings = ConfidenceSettings {
        choice: spinphoton_core::surface_code::StabilizerChoice::Weight(4),
        ..ConfidenceSettings::new(kind)
    };
    let delta = grid(0.0, delta_max, points)?;
    let mut curve = ConfidenceCurve {
        plus: Vec::new(),
        minus: Vec::new(),
        delta: Vec::new(),
    };
    for &d in &delta {
        let (plus, minus) = match InteractionModel::physical_with_sign(sys, d, PhaseSign::Minus) {
            Ok(model) => {
                let s = readout_statistics(&lattice, &channel, &model, &settings)?;
                (
                    s.confidence(Syndrome::Plus).ok(),
                    s.confidence(Syndrome::Minus).ok(),
                )
            }
            Err(Error::InvalidModel(_)) => (None, None),
            Err(e) => return Err(e),
        };
        curve.delta.push(d);
        curve.plus.push(plus);
        curve.minus.push(minus);
    }
    Ok(curve)
}

#[derive(Debug, Serialize)]
pub struct EfficiencyCurve {
    pub delta_energy: Vec<f64>,
    pub eta_ratio: Vec<Option<f64>>,
    pub fidelity: Vec<Option<f64>>,
}

pub fn efficiency_curve_data(
    g: f64,
    gamma1: f64,
    gamma_ratio: f64,
    kappa_s: f64,
    delta_max: f64,
    points: usize,
) -> Result<EfficiencyCurve, Error> {
    let template = PairTemplate {
        g,
        kappa_s,
        gamma1,
        gamma2: gamma1 * gamma_ratio,
    };
    let deltas = grid(0.0, delta_max, points)?;
    let sweep = efficiency_sweep(&template, &deltas, EntanglementMode::AntiSymmetric)?;
    Ok(EfficiencyCurve {
        delta_energy: deltas,
        eta_ratio: sweep.points.iter().map(|p| p.eta_ratio).collect(),
        fidelity: sweep.points.iter().map(|p| p.fidelity).collect(),
    })
}

fn to_js<T: Serialize>(r: Result<T, Error>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// Conditional phase and reflection magnitudes over `[-delta_max, delta_max]`.
#[wasm_bindgen]
pub fn phase_curve(
    g: f64,
    gamma: f64,
    kappa_s: f64,
    delta_max: f64,
    points: usize,
) -> Result<String, JsError> {
    to_js(phase_curve_data(g, gamma, kappa_s, delta_max, points))
}

#[wasm_bindgen]
pub fn confidence_curve(
    g: f64,
    gamma: f64,
    p_star: f64,
    star: bool,
    delta_max: f64,
    points: usize,
) -> Result<String, JsError> {
    to_js(confidence_curve_data(
        g, gamma, p_star, star, delta_max, points,
    ))
}

#[wasm_bindgen]
pub fn efficiency_curve(
    g: f64,
    gamma1: f64,
    gamma_ratio: f64,
    kappa_s: f64,
    delta_max: f64,
    points: usize,
) -> Result<String, JsError> {
    to_js(efficiency_curve_data(
        g,
        gamma1,
        gamma_ratio,
        kappa_s,
        delta_max,
        points,
    ))
}
