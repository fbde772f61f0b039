//! Heralded entanglement of two quantum-dot spins with different transition
//! energies, each in its own cavity.
//!
//! A probe photon in `|H>` reflects off both cavities and is detected in
//! `|V>`. The herald leaves the spins in
//! `A_sym (|up up> - |down down>) + A_anti (|up down> - |down up>)` with
//! `A_sym = r_h1 r_h2 - r_01 r_02` and `A_anti = r_h1 r_02 - r_01 r_h2`, so the
//! probe frequency is chosen to null one of the two amplitudes.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::cavity::{solve_detuning, CavitySystem, ReflectionPair};
use crate::error::{Error, Result};
use crate::quantum::{Basis, Pauli, PureState, QuantumState, QubitLabel, C64};
use crate::roots::{angle_roots, DEFAULT_SCAN_POINTS};
use crate::syndrome::coefficients_from;

/// V-herald probability for two identical lossless systems at a quarter-wave phase.
pub const ETA_MAX: f64 = 0.5;

/// Roots with `|sin phi_1|` below this are the trivial, conditionality-free kind.
const TRIVIAL_PHASE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EntanglementMode {
    /// `phi_1 = -phi_2`; target `(|up down> - |down up>)/sqrt 2`.
    #[default]
    AntiSymmetric,
    /// `phi_1 = phi_2`; target `(|up up> - |down down>)/sqrt 2`.
    Symmetric,
}

impl EntanglementMode {
    pub fn target(self, a: QubitLabel, b: QubitLabel) -> PureState {
        let h = FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let amps = match self {
            EntanglementMode::AntiSymmetric => [z, C64::new(h, 0.0), C64::new(-h, 0.0), z],
            EntanglementMode::Symmetric => [C64::new(h, 0.0), z, z, C64::new(-h, 0.0)],
        };
        PureState::new(vec![a, b], amps.to_vec()).expect("normalized target")
    }
}

/// Linewidths and losses shared by a family of pairs; only the energy
/// splitting varies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTemplate {
    pub g: f64,
    pub kappa_s: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

/// Two QD-cavity systems addressed by the same probe photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QDPair {
    pub sys1: CavitySystem,
    pub sys2: CavitySystem,
    /// `omega_x1 - omega_x2`.
    pub delta_energy: f64,
}

impl QDPair {
    pub fn new(sys1: CavitySystem, sys2: CavitySystem) -> Result<Self> {
        sys1.validate()?;
        sys2.validate()?;
        if sys1.kappa != sys2.kappa {
            return Err(Error::InvalidParameter {
                name: "kappa",
                value: sys2.kappa,
                reason: "both systems must share the same kappa",
            });
        }
        Ok(QDPair {
            sys1,
            sys2,
            delta_energy: sys1.omega_x - sys2.omega_x,
        })
    }

    /// Pair with each QD resonant with its own cavity at `+-delta_energy / 2`.
    pub fn detuned(t: &PairTemplate, delta_energy: f64) -> Result<Self> {
        if !delta_energy.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta_energy",
                value: delta_energy,
                reason: "must be finite",
            });
        }
        let half = delta_energy / 2.0;
        Self::new(
            CavitySystem::resonant_at(half, t.g, t.kappa_s, t.gamma1)?,
            CavitySystem::resonant_at(-half, t.g, t.kappa_s, t.gamma2)?,
        )
    }

    pub fn swapped(&self) -> Self {
        QDPair {
            sys1: self.sys2,
            sys2: self.sys1,
            delta_energy: -self.delta_energy,
        }
    }

    /// Midpoint of the two transition frequencies.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.sys1.omega_x + self.sys2.omega_x)
    }

    pub fn reflections(&self, omega: f64) -> (ReflectionPair, ReflectionPair) {
        (self.sys1.reflections(omega), self.sys2.reflections(omega))
    }

    fn bracket(&self) -> (f64, f64) {
        let (a, b) = (self.sys1, self.sys2);
        let g = a.g.max(b.g) / a.kappa;
        let half = 5.0 * a.kappa * g.max(1.0);
        let lo = a.omega_c.min(a.omega_x).min(b.omega_c).min(b.omega_x);
        let hi = a.omega_c.max(a.omega_x).max(b.omega_c).max(b.omega_x);
        (lo - half, hi + half)
    }
}

/// Probe frequency nulling the unwanted herald amplitude, nearest to the
/// midpoint of the two transitions.
pub fn solve_probe_frequency(pair: &QDPair, mode: EntanglementMode) -> Result<f64> {
    let (lo, hi) = pair.bracket();
    let mid = pair.midpoint();
    if mode == EntanglementMode::Symmetric && pair.sys1 == pair.sys2 {
        // Every frequency satisfies phi_1 = phi_2; take a quarter-wave point.
        let sys = pair.sys1;
        let mut candidates = Vec::new();
        for target in [std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2] {
            if let Ok(roots) = solve_detuning(&sys, target) {
                candidates.extend(roots.into_iter().map(|d| sys.frequency_for(d)));
            }
        }
        return nearest(&candidates, mid).ok_or(Error::NoRootInBracket { lo, hi });
    }
    let phases = |w: f64| {
        let (r1, r2) = pair.reflections(w);
        (r1.phase_difference(), r2.phase_difference())
    };
    let sign = match mode {
        EntanglementMode::AntiSymmetric => 1.0,
        EntanglementMode::Symmetric => -1.0,
    };
    let roots: Vec<f64> = angle_roots(
        |w| {
            let (p1, p2) = phases(w);
            p1 + sign * p2
        },
        lo,
        hi,
        DEFAULT_SCAN_POINTS,
    )
    .into_iter()
    .filter(|r| phases(r.x).0.sin().abs() >= TRIVIAL_PHASE)
    .map(|r| r.x)
    .collect();
    nearest(&roots, mid).ok_or(Error::NoRootInBracket { lo, hi })
}

fn nearest(xs: &[f64], target: f64) -> Option<f64> {
    xs.iter()
        .copied()
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
}

/// Herald amplitudes `(A_sym, A_anti)`.
pub fn herald_amplitudes(r1: ReflectionPair, r2: ReflectionPair) -> (C64, C64) {
    (
        r1.r_coupled * r2.r_coupled - r1.r_cold * r2.r_cold,
        r1.r_coupled * r2.r_cold - r1.r_cold * r2.r_coupled,
    )
}

/// Closed-form fidelity of the heralded state with the target of `mode`.
pub fn fidelity_formula(
    r_h1: C64,
    r_01: C64,
    r_h2: C64,
    r_02: C64,
    mode: EntanglementMode,
) -> Result<f64> {
    let (a_sym, a_anti) = herald_amplitudes(
        ReflectionPair {
            r_coupled: r_h1,
            r_cold: r_01,
        },
        ReflectionPair {
            r_coupled: r_h2,
            r_cold: r_02,
        },
    );
    let (s, a) = (a_sym.norm_sqr(), a_anti.norm_sqr());
    if s < 1e-300 && a < 1e-300 {
        return Err(Error::Indeterminate);
    }
    Ok(match mode {
        EntanglementMode::Symmetric => s / (s + a),
        EntanglementMode::AntiSymmetric => a / (s + a),
    })
}

/// Analytic V-herald probability `(|A_sym|^2 + |A_anti|^2) / 8`.
pub fn herald_efficiency(r1: ReflectionPair, r2: ReflectionPair) -> f64 {
    let (s, a) = herald_amplitudes(r1, r2);
    (s.norm_sqr() + a.norm_sqr()) / 8.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementResult {
    pub probe_frequency: f64,
    pub mode: EntanglementMode,
    /// V-herald probability.
    pub efficiency: f64,
    /// Probability of the photon returning in `|H>`.
    pub h_probability: f64,
    pub loss_probability: f64,
    /// `None` when the herald never fires.
    pub fidelity: Option<f64>,
    /// Normalized state of `spin(0)` and `spin(1)` after the herald.
    pub heralded_state: Option<PureState>,
}

fn probe() -> QubitLabel {
    QubitLabel::photon(0)
}

fn h_ket() -> [C64; 2] {
    Basis::X.eigenket(true)
}

fn v_ket() -> [C64; 2] {
    [C64::new(0.0, -FRAC_1_SQRT_2), C64::new(0.0, FRAC_1_SQRT_2)]
}

/// State-vector simulation of one probe photon on two spins in `|+>`.
pub fn entangle_with_reflections(
    r1: ReflectionPair,
    r2: ReflectionPair,
    mode: EntanglementMode,
) -> Result<EntanglementResult> {
    let (s1, s2) = (QubitLabel::spin(0), QubitLabel::spin(1));
    let plus = Basis::X.eigenket(true);
    let state = PureState::product(vec![probe(), s1, s2], &[h_ket(), plus, plus])?
        .apply_two_qubit_diagonal(probe(), s1, coefficients_from(r1))?
        .apply_two_qubit_diagonal(probe(), s2, coefficients_from(r2))?;
    let heralded = state.project_out(probe(), v_ket())?;
    let other = state.project_out(probe(), h_ket())?;
    let efficiency = heralded.weight();
    let h_probability = other.weight();
    let (fidelity, heralded_state) = if efficiency > 1e-300 {
        let norm = heralded.normalized();
        let f = norm.fidelity(&mode.target(s1, s2))?;
        (Some(f), Some(norm))
    } else {
        (None, None)
    };
    Ok(EntanglementResult {
        probe_frequency: f64::NAN,
        mode,
        efficiency,
        h_probability,
        loss_probability: (1.0 - efficiency - h_probability).max(0.0),
        fidelity,
        heralded_state,
    })
}

pub fn entangle_pair(
    pair: &QDPair,
    omega: f64,
    mode: EntanglementMode,
) -> Result<EntanglementResult> {
    let (r1, r2) = pair.reflections(omega);
    let mut out = entangle_with_reflections(r1, r2, mode)?;
    out.probe_frequency = omega;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    NoRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub delta_energy: f64,
    pub probe_frequency: Option<f64>,
    pub eta: Option<f64>,
    pub eta_ratio: Option<f64>,
    pub fidelity: Option<f64>,
    pub status: PointStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub template: PairTemplate,
    pub mode: EntanglementMode,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Largest `eta / eta_max` over the non-gap points.
    pub fn peak_ratio(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.eta_ratio.map(|r| (p.delta_energy, r)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

fn sweep_point(t: &PairTemplate, delta: f64, mode: EntanglementMode) -> Result<SweepPoint> {
    let pair = QDPair::detuned(t, delta)?;
    match solve_probe_frequency(&pair, mode) {
        Ok(omega) => {
            let r = entangle_pair(&pair, omega, mode)?;
            Ok(SweepPoint {
                delta_energy: delta,
                probe_frequency: Some(omega),
                eta: Some(r.efficiency),
                eta_ratio: Some(r.efficiency / ETA_MAX),
                fidelity: r.fidelity,
                status: PointStatus::Ok,
            })
        }
        Err(Error::NoRootInBracket { .. }) => Ok(SweepPoint {
            delta_energy: delta,
            probe_frequency: None,
            eta: None,
            eta_ratio: None,
            fidelity: None,
            status: PointStatus::NoRoot,
        }),
        Err(e) => Err(e),
    }
}

/// Efficiency and fidelity over a list of energy splittings. Points without
/// a nontrivial probe frequency are kept as gaps.
pub fn efficiency_sweep(
    template: &PairTemplate,
    deltas: &[f64],
    mode: EntanglementMode,
) -> Result<SweepResult> {
    if deltas.is_empty() {
        return Err(Error::InvalidParameter {
            name: "delta_range",
            value: 0.0,
            reason: "must not be empty",
        });
    }
    #[cfg(feature = "parallel")]
    let points: Result<Vec<SweepPoint>> = {
        use rayon::prelude::*;
        deltas
            .par_iter()
            .map(|&d| sweep_point(template, d, mode))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let points: Result<Vec<SweepPoint>> = deltas
        .iter()
        .map(|&d| sweep_point(template, d, mode))
        .collect();
    Ok(SweepResult {
        template: *template,
        mode,
        points: points?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourSpinResult {
    /// State over `spin(0..4)`; pair A is spins 0-1, pair B spins 2-3.
    pub state: PureState,
    pub probe_frequency: f64,
    pub merge_probability: f64,
    /// Product of the three herald probabilities.
    pub herald_probability: f64,
}

/// Merges two heralded pairs by running the probe protocol on spin 1 (via
/// `merge.sys1`) and spin 2 (via `merge.sys2`). `omega = None` solves for
/// the anti-symmetric probe frequency of `merge`.
pub fn entangle_four(
    pair_a: &EntanglementResult,
    pair_b: &EntanglementResult,
    merge: &QDPair,
    omega: Option<f64>,
) -> Result<FourSpinResult> {
    let a = pair_a.heralded_state.as_ref().ok_or(Error::NoHerald)?;
    let b = pair_b.heralded_state.as_ref().ok_or(Error::NoHerald)?;
    let omega = match omega {
        Some(w) => w,
        None => solve_probe_frequency(merge, EntanglementMode::AntiSymmetric)?,
    };
    let spins: Vec<QubitLabel> = (0..4).map(QubitLabel::spin).collect();
    let b = b.relabeled(vec![spins[2], spins[3]])?;
    let joint = a.tensor(&b)?;
    let (r1, r2) = merge.reflections(omega);
    let with_probe = joint
        .with_qubit(probe(), h_ket())?
        .apply_two_qubit_diagonal(probe(), spins[1], coefficients_from(r1))?
        .apply_two_qubit_diagonal(probe(), spins[2], coefficients_from(r2))?;
    let heralded = with_probe.project_out(probe(), v_ket())?;
    let merge_probability = heralded.weight();
    if merge_probability <= 1e-300 {
        return Err(Error::NoHerald);
    }
    Ok(FourSpinResult {
        state: heralded.normalized().permuted(&spins)?,
        probe_frequency: omega,
        merge_probability,
        herald_probability: pair_a.efficiency * pair_b.efficiency * merge_probability,
    })
}

/// `(|0...0> + |1...1>)/sqrt 2` over `labels`.
pub fn ghz_state(labels: Vec<QubitLabel>) -> Result<PureState> {
    let n = labels.len();
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
    PureState::new(labels, amps)
}

/// Local Pauli corrections mapping a GHZ-class state onto the standard GHZ
/// state: X on every spin set in the largest basis amplitude, then Z on the
/// first spin if the two surviving amplitudes differ in sign.
pub fn ghz_correction(state: &PureState) -> Result<(PureState, Vec<(QubitLabel, Pauli)>)> {
    let labels = state.labels().to_vec();
    let n = labels.len();
    let amps = state.amplitudes();
    let (top, _) = amps
        .iter()
        .enumerate()
        .max_by(|a, b| {
            a.1.norm_sqr()
                .total_cmp(&b.1.norm_sqr())
                .then(b.0.cmp(&a.0))
        })
        .ok_or(Error::InvalidState("empty register".into()))?;
    let mut ops: Vec<(QubitLabel, Pauli)> = (0..n)
        .filter(|&q| top & (1 << (n - 1 - q)) != 0)
        .map(|q| (labels[q], Pauli::X))
        .collect();
    let mut out = state.apply_pauli_string(&ops)?;
    let last = out.amplitudes()[(1 << n) - 1];
    let first = out.amplitudes()[0];
    if (last / first).re < 0.0 {
        out = out.apply_pauli_string(&[(labels[0], Pauli::Z)])?;
        ops.push((labels[0], Pauli::Z));
    }
    Ok((out, ops))
}

/// Fidelity of the decohered entangled state relative to the ideal one
/// after `n` spins each dephase for time `t`.
pub fn decoherence_factor(t: f64, t2: f64, n: u32) -> Result<f64> {
    if !(t >= 0.0 && t2 > 0.0 && t2.is_finite()) || n == 0 {
        return Err(Error::InvalidTime { t, t2, n });
    }
    Ok(0.5 * (1.0 + (-(n as f64) * t / t2).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::PhaseSign;
    use crate::quantum::DensityOperator;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ideal(sign: PhaseSign) -> ReflectionPair {
        crate::syndrome::InteractionModel::ideal(sign).reflections()
    }

    fn template(gamma_ratio: f64) -> PairTemplate {
        PairTemplate {
            g: 2.4,
            kappa_s: 0.0,
            gamma1: 0.1,
            gamma2: 0.1 * gamma_ratio,
        }
    }

    #[test]
    fn formula_examples() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let f = fidelity_formula(i, one, -i, one, EntanglementMode::AntiSymmetric).unwrap();
        assert_eq!(f, 1.0);
        let f = fidelity_formula(i, one, -i, one, EntanglementMode::Symmetric).unwrap();
        assert_eq!(f, 0.0);
        let r2 = Complex64::new(0.3, -0.4);
        for mode in [EntanglementMode::AntiSymmetric, EntanglementMode::Symmetric] {
            let f = fidelity_formula(Complex64::new(0.1, 0.9), one, r2, r2, mode).unwrap();
            assert_abs_diff_eq!(f, 0.5, epsilon = 1e-15);
        }
        assert_eq!(
            fidelity_formula(one, one, one, one, EntanglementMode::Symmetric),
            Err(Error::Indeterminate)
        );
    }

    #[test]
    fn ideal_pairs_are_maximally_entangled() {
        let r = entangle_with_reflections(
            ideal(PhaseSign::Plus),
            ideal(PhaseSign::Minus),
            EntanglementMode::AntiSymmetric,
        )
        .unwrap();
        assert_abs_diff_eq!(r.fidelity.unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.efficiency, ETA_MAX, epsilon = 1e-15);
        let r = entangle_with_reflections(
            ideal(PhaseSign::Plus),
            ideal(PhaseSign::Plus),
            EntanglementMode::Symmetric,
        )
        .unwrap();
        assert_abs_diff_eq!(r.fidelity.unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.efficiency, ETA_MAX, epsilon = 1e-15);
    }

    #[test]
    fn uncoupled_systems_never_herald() {
        let t = PairTemplate {
            g: 0.0,
            kappa_s: 0.0,
            gamma1: 0.1,
            gamma2: 0.1,
        };
        let pair = QDPair::detuned(&t, 1.0).unwrap();
        let r = entangle_pair(&pair, 0.3, EntanglementMode::AntiSymmetric).unwrap();
        assert!(r.efficiency < 1e-30);
        assert_eq!(r.fidelity, None);
    }

    #[test]
    fn herald_probabilities_sum_to_one() {
        let t = PairTemplate {
            g: 1.3,
            kappa_s: 0.4,
            gamma1: 0.1,
            gamma2: 0.2,
        };
        let pair = QDPair::detuned(&t, 1.7).unwrap();
        for omega in [-2.0, -0.3, 0.0, 0.9] {
            let r = entangle_pair(&pair, omega, EntanglementMode::AntiSymmetric).unwrap();
            assert!(r.loss_probability > 0.0);
            assert_abs_diff_eq!(
                r.efficiency + r.h_probability + r.loss_probability,
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn formula_matches_state_vector_on_random_quadruples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut draw = || Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(-3.2..3.2));
        for _ in 0..1000 {
            let r1 = ReflectionPair {
                r_coupled: draw(),
                r_cold: draw(),
            };
            let r2 = ReflectionPair {
                r_coupled: draw(),
                r_cold: draw(),
            };
            for mode in [EntanglementMode::AntiSymmetric, EntanglementMode::Symmetric] {
                let sv = entangle_with_reflections(r1, r2, mode).unwrap();
                let f = fidelity_formula(r1.r_coupled, r1.r_cold, r2.r_coupled, r2.r_cold, mode)
                    .unwrap();
                assert!((sv.fidelity.unwrap() - f).abs() < 1e-10);
                assert!((sv.efficiency - herald_efficiency(r1, r2)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn identical_antisymmetric_has_no_root() {
        let pair = QDPair::detuned(&template(1.0), 0.0).unwrap();
        assert!(matches!(
            solve_probe_frequency(&pair, EntanglementMode::AntiSymmetric),
            Err(Error::NoRootInBracket { .. })
        ));
    }

    #[test]
    fn identical_symmetric_picks_quarter_wave() {
        let pair = QDPair::detuned(&template(1.0), 0.0).unwrap();
        let w = solve_probe_frequency(&pair, EntanglementMode::Symmetric).unwrap();
        let (r1, _) = pair.reflections(w);
        assert_abs_diff_eq!(
            r1.phase_difference().abs(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-10
        );
    }

    #[test]
    fn antisymmetric_root_between_resonances() {
        let t = PairTemplate {
            g: 1.0,
            kappa_s: 0.0,
            gamma1: 0.1,
            gamma2: 0.1,
        };
        let pair = QDPair::detuned(&t, 2.0).unwrap();
        let w = solve_probe_frequency(&pair, EntanglementMode::AntiSymmetric).unwrap();
        assert!(w > -1.0 && w < 1.0);
        let (r1, r2) = pair.reflections(w);
        let sum = crate::roots::wrap_angle(r1.phase_difference() + r2.phase_difference());
        assert!(sum.abs() < 1e-10);
        // Dense-grid oracle: a sign change of the wrapped sum brackets w.
        let f = |x: f64| {
            let (a, b) = pair.reflections(x);
            crate::roots::wrap_angle(a.phase_difference() + b.phase_difference())
        };
        let n = 200_000;
        let mut hits = Vec::new();
        for k in 0..n {
            let x0 = -1.0 + 2.0 * k as f64 / n as f64;
            let x1 = x0 + 2.0 / n as f64;
            let (a, b) = (f(x0), f(x1));
            if a.signum() != b.signum() && (a - b).abs() < std::f64::consts::PI {
                hits.push(0.5 * (x0 + x1));
            }
        }
        assert!(hits.iter().any(|h| (h - w).abs() < 2e-5), "{hits:?} vs {w}");
    }

    #[test]
    fn solved_pair_matches_formula() {
        let pair = QDPair::detuned(&template(1.0), 3.0).unwrap();
        let w = solve_probe_frequency(&pair, EntanglementMode::AntiSymmetric).unwrap();
        let r = entangle_pair(&pair, w, EntanglementMode::AntiSymmetric).unwrap();
        let (r1, r2) = pair.reflections(w);
        let f = fidelity_formula(
            r1.r_coupled,
            r1.r_cold,
            r2.r_coupled,
            r2.r_cold,
            EntanglementMode::AntiSymmetric,
        )
        .unwrap();
        assert!((r.fidelity.unwrap() - f).abs() < 1e-10);
    }

    #[test]
    fn sweep_records_gaps_and_is_deterministic() {
        let deltas: Vec<f64> = (0..21).map(|k| k as f64 * 0.5).collect();
        let a = efficiency_sweep(&template(1.0), &deltas, EntanglementMode::AntiSymmetric).unwrap();
        let b = efficiency_sweep(&template(1.0), &deltas, EntanglementMode::AntiSymmetric).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), deltas.len());
        let zero = &a.points[0];
        assert!(zero.status == PointStatus::NoRoot || zero.eta.unwrap() < 1e-6);
        assert!(a.points.iter().any(|p| p.status == PointStatus::Ok));
        assert!(efficiency_sweep(&template(1.0), &[], EntanglementMode::AntiSymmetric).is_err());
    }

    #[test]
    fn ideal_four_spin_merge_is_ghz() {
        let pair = entangle_with_reflections(
            ideal(PhaseSign::Plus),
            ideal(PhaseSign::Minus),
            EntanglementMode::AntiSymmetric,
        )
        .unwrap();
        let t = PairTemplate {
            g: 2.4,
            kappa_s: 0.0,
            gamma1: 0.1,
            gamma2: 0.1,
        };
        let merge = QDPair::detuned(&t, 3.0).unwrap();
        // Ideal merge: quarter-wave reflections by construction.
        let spins: Vec<QubitLabel> = (0..4).map(QubitLabel::spin).collect();
        let ideal_merge = merge_with(
            &pair,
            &pair,
            ideal(PhaseSign::Plus),
            ideal(PhaseSign::Minus),
        );
        let mut expected = vec![C64::new(0.0, 0.0); 16];
        expected[0b0101] = C64::new(-FRAC_1_SQRT_2, 0.0);
        expected[0b1010] = C64::new(FRAC_1_SQRT_2, 0.0);
        let expected = PureState::new(spins.clone(), expected).unwrap();
        assert_abs_diff_eq!(
            ideal_merge.fidelity(&expected).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let (fixed, ops) = ghz_correction(&ideal_merge).unwrap();
        assert!(ops.len() >= 2);
        assert_abs_diff_eq!(
            fixed.fidelity(&ghz_state(spins.clone()).unwrap()).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            fixed.inner(&ghz_state(spins).unwrap()).unwrap().re.abs(),
            1.0,
            epsilon = 1e-10
        );
        let _ = merge;
    }

    fn merge_with(
        a: &EntanglementResult,
        b: &EntanglementResult,
        r1: ReflectionPair,
        r2: ReflectionPair,
    ) -> PureState {
        let spins: Vec<QubitLabel> = (0..4).map(QubitLabel::spin).collect();
        let joint = a
            .heralded_state
            .as_ref()
            .unwrap()
            .tensor(
                &b.heralded_state
                    .as_ref()
                    .unwrap()
                    .relabeled(vec![spins[2], spins[3]])
                    .unwrap(),
            )
            .unwrap();
        joint
            .with_qubit(probe(), h_ket())
            .unwrap()
            .apply_two_qubit_diagonal(probe(), spins[1], coefficients_from(r1))
            .unwrap()
            .apply_two_qubit_diagonal(probe(), spins[2], coefficients_from(r2))
            .unwrap()
            .project_out(probe(), v_ket())
            .unwrap()
            .normalized()
    }

    #[test]
    fn physical_four_spin_merge() {
        let t = template(1.0);
        let pair = QDPair::detuned(&t, 3.0).unwrap();
        let w = solve_probe_frequency(&pair, EntanglementMode::AntiSymmetric).unwrap();
        let a = entangle_pair(&pair, w, EntanglementMode::AntiSymmetric).unwrap();
        let out = entangle_four(&a, &a, &pair, None).unwrap();
        assert_abs_diff_eq!(out.state.norm_sqr(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            out.herald_probability,
            a.efficiency * a.efficiency * out.merge_probability,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(out.probe_frequency, w, epsilon = 1e-12);
        let rho = DensityOperator::from_pure(&out.state);
        for q in 0..4 {
            let single = rho.partial_trace(&[QubitLabel::spin(q)]).unwrap();
            assert_abs_diff_eq!(single.get(0, 0).re, 0.5, epsilon = 1e-10);
            assert!(single.get(0, 1).norm() < 1e-10);
        }
        let (fixed, _) = ghz_correction(&out.state).unwrap();
        let f = fixed
            .fidelity(&ghz_state((0..4).map(QubitLabel::spin).collect()).unwrap())
            .unwrap();
        assert!(f > 0.95, "{f}");
    }

    #[test]
    fn four_spin_needs_heralds() {
        let t = PairTemplate {
            g: 0.0,
            kappa_s: 0.0,
            gamma1: 0.1,
            gamma2: 0.1,
        };
        let pair = QDPair::detuned(&t, 1.0).unwrap();
        let dead = entangle_pair(&pair, 0.0, EntanglementMode::AntiSymmetric).unwrap();
        assert_eq!(
            entangle_four(&dead, &dead, &pair, Some(0.0)),
            Err(Error::NoHerald)
        );
    }

    #[test]
    fn decoherence_examples() {
        assert_eq!(decoherence_factor(0.0, 1.0, 3).unwrap(), 1.0);
        assert_abs_diff_eq!(
            decoherence_factor(1e6, 1.0, 1).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        for n in [1u32, 2, 4, 8] {
            let t0 = 0.37;
            assert_eq!(
                decoherence_factor(t0 / n as f64, 2.0, n).unwrap(),
                decoherence_factor(t0, 2.0, 1).unwrap()
            );
        }
        assert!(decoherence_factor(-1.0, 1.0, 1).is_err());
        assert!(decoherence_factor(1.0, 0.0, 1).is_err());
        assert!(decoherence_factor(1.0, 1.0, 0).is_err());
        assert!(decoherence_factor(f64::NAN, 1.0, 1).is_err());
    }

    proptest! {
        #[test]
        fn relabeling_symmetry(delta in -4.0f64..4.0, omega in -3.0f64..3.0, ratio in 0.3f64..1.5) {
            let pair = QDPair::detuned(&template(ratio), delta).unwrap();
            let swapped = pair.swapped();
            prop_assert!((swapped.delta_energy + pair.delta_energy).abs() == 0.0);
            for mode in [EntanglementMode::AntiSymmetric, EntanglementMode::Symmetric] {
                let a = entangle_pair(&pair, omega, mode).unwrap();
                let b = entangle_pair(&swapped, omega, mode).unwrap();
                prop_assert!((a.efficiency - b.efficiency).abs() < 1e-12);
                if let (Some(fa), Some(fb)) = (a.fidelity, b.fidelity) {
                    prop_assert!((fa - fb).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn decoherence_in_range(t in 0.0f64..100.0, t2 in 0.01f64..10.0, n in 1u32..16) {
            let f = decoherence_factor(t, t2, n).unwrap();
            prop_assert!((0.5..=1.0).contains(&f));
        }
    }
}
