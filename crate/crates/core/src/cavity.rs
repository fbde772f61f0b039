//! Reflection from a single-sided micropillar cavity containing a charged
//! quantum dot, and the detuning that produces a target conditional phase.
//!
//! All rates and frequencies are in units of the output-mode decay rate
//! `kappa`, which is 1.0 for every system built with [`CavitySystem::resonant`].

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{angle_roots, wrap_angle, DEFAULT_SCAN_POINTS};

/// Physical parameters of one QD-micropillar system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySystem {
    pub omega_c: f64,
    pub omega_x: f64,
    pub g: f64,
    pub kappa: f64,
    pub kappa_s: f64,
    pub gamma: f64,
}

impl CavitySystem {
    pub fn new(
        omega_c: f64,
        omega_x: f64,
        g: f64,
        kappa: f64,
        kappa_s: f64,
        gamma: f64,
    ) -> Result<Self> {
        let sys = CavitySystem {
            omega_c,
            omega_x,
            g,
            kappa,
            kappa_s,
            gamma,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Cavity and trion on resonance at frequency zero, `kappa = 1`.
    pub fn resonant(g: f64, kappa_s: f64, gamma: f64) -> Result<Self> {
        Self::new(0.0, 0.0, g, 1.0, kappa_s, gamma)
    }

    /// Resonant system centred on `omega`.
    pub fn resonant_at(omega: f64, g: f64, kappa_s: f64, gamma: f64) -> Result<Self> {
        Self::new(omega, omega, g, 1.0, kappa_s, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool, &'static str); 6] = [
            (
                "omega_c",
                self.omega_c,
                self.omega_c.is_finite(),
                "must be finite",
            ),
            (
                "omega_x",
                self.omega_x,
                self.omega_x.is_finite(),
                "must be finite",
            ),
            (
                "kappa",
                self.kappa,
                self.kappa > 0.0 && self.kappa.is_finite(),
                "must be > 0",
            ),
            (
                "g",
                self.g,
                self.g >= 0.0 && self.g.is_finite(),
                "must be >= 0",
            ),
            (
                "kappa_s",
                self.kappa_s,
                self.kappa_s >= 0.0 && self.kappa_s.is_finite(),
                "must be >= 0",
            ),
            (
                "gamma",
                self.gamma,
                self.gamma > 0.0 && self.gamma.is_finite(),
                "must be > 0",
            ),
        ];
        for (name, value, ok, reason) in checks {
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason,
                });
            }
        }
        Ok(())
    }

    pub fn is_resonant(&self) -> bool {
        self.omega_c == self.omega_x
    }

    /// Same system with the QD decoupled.
    pub fn cold(&self) -> Self {
        CavitySystem { g: 0.0, ..*self }
    }

    /// Photon frequency for a cavity detuning `delta = omega_c - omega`.
    pub fn frequency_for(&self, delta: f64) -> f64 {
        self.omega_c - delta
    }

    /// `true` iff `g > (kappa + kappa_s) / 4`.
    pub fn is_strong_coupling(&self) -> bool {
        self.g > (self.kappa + self.kappa_s) / 4.0
    }

    /// Reflection amplitudes at photon frequency `omega`.
    pub fn reflections(&self, omega: f64) -> ReflectionPair {
        ReflectionPair {
            r_coupled: reflection_coupled(self, omega),
            r_cold: reflection_cold(self, omega),
        }
    }
}

/// Coupled (`r_h`) and cold-cavity (`r_0`) reflection amplitudes at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionPair {
    pub r_coupled: Complex64,
    pub r_cold: Complex64,
}

impl ReflectionPair {
    /// Lossless pair with `arg(r_h) - arg(r_0) = phase` and `r_0 = 1`.
    pub fn ideal(phase: f64) -> Self {
        ReflectionPair {
            r_coupled: Complex64::from_polar(1.0, phase),
            r_cold: Complex64::new(1.0, 0.0),
        }
    }

    /// `arg(r_h) - arg(r_0)` wrapped to `(-pi, pi]`.
    pub fn phase_difference(&self) -> f64 {
        wrap_angle(self.r_coupled.arg() - self.r_cold.arg())
    }
}

/// Reflection coefficient of the QD-coupled cavity at photon frequency `omega`.
pub fn reflection_coupled(sys: &CavitySystem, omega: f64) -> Complex64 {
    if sys.g == 0.0 {
        return reflection_cold(sys, omega);
    }
    let trion = Complex64::new(sys.gamma / 2.0, sys.omega_x - omega);
    let detuned = Complex64::new(sys.kappa_s / 2.0, sys.omega_c - omega);
    let half_kappa = sys.kappa / 2.0;
    let g2 = sys.g * sys.g;
    (trion * (detuned - half_kappa) + g2) / (trion * (detuned + half_kappa) + g2)
}

/// Reflection coefficient of the empty cavity at photon frequency `omega`.
pub fn reflection_cold(sys: &CavitySystem, omega: f64) -> Complex64 {
    let detuned = Complex64::new(sys.kappa_s / 2.0, sys.omega_c - omega);
    let half_kappa = sys.kappa / 2.0;
    (detuned - half_kappa) / (detuned + half_kappa)
}

/// Conditional phase at photon frequency `omega`, wrapped to `(-pi, pi]`.
pub fn phase_difference_at(sys: &CavitySystem, omega: f64) -> f64 {
    sys.reflections(omega).phase_difference()
}

/// Conditional phase `arg(r_h) - arg(r_0)` at cavity detuning `delta = omega_c - omega`.
pub fn phase_difference(sys: &CavitySystem, delta: f64) -> f64 {
    phase_difference_at(sys, sys.frequency_for(delta))
}

pub fn is_strong_coupling(sys: &CavitySystem) -> bool {
    sys.is_strong_coupling()
}

/// Which sign of the quarter-wave conditional phase a protocol targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSign {
    #[default]
    Plus,
    Minus,
}

impl PhaseSign {
    /// `+pi/2` or `-pi/2`.
    pub fn angle(self) -> f64 {
        match self {
            PhaseSign::Plus => FRAC_PI_2,
            PhaseSign::Minus => -FRAC_PI_2,
        }
    }

    pub fn of(phase: f64) -> Self {
        if phase >= 0.0 {
            PhaseSign::Plus
        } else {
            PhaseSign::Minus
        }
    }
}

/// How a protocol picks one detuning out of the solver's root list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RootSelection {
    #[default]
    SmallestMagnitude,
    Index(usize),
    Nearest(f64),
}

impl RootSelection {
    pub fn pick(self, roots: &[f64]) -> Option<f64> {
        match self {
            RootSelection::SmallestMagnitude => roots
                .iter()
                .copied()
                .min_by(|a, b| a.abs().total_cmp(&b.abs())),
            RootSelection::Index(i) => roots.get(i).copied(),
            RootSelection::Nearest(x) => roots
                .iter()
                .copied()
                .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs())),
        }
    }
}

/// Scan settings for [`solve_detuning_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningSearch {
    /// Detuning bracket; `None` means `+-5 kappa max(1, g/kappa)`.
    pub bracket: Option<(f64, f64)>,
    pub scan_points: usize,
}

impl Default for DetuningSearch {
    fn default() -> Self {
        DetuningSearch {
            bracket: None,
            scan_points: DEFAULT_SCAN_POINTS,
        }
    }
}

impl DetuningSearch {
    pub fn bracket_for(&self, sys: &CavitySystem) -> (f64, f64) {
        self.bracket.unwrap_or_else(|| {
            let half = 5.0 * sys.kappa * (sys.g / sys.kappa).max(1.0);
            (-half, half)
        })
    }
}

/// A detuning that solves the phase condition together with its residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningRoot {
    pub delta: f64,
    pub residual: f64,
}

/// Detunings `delta` with `phase_difference(sys, delta) = target`, ascending.
pub fn solve_detuning(sys: &CavitySystem, target: f64) -> Result<Vec<f64>> {
    Ok(
        solve_detuning_with(sys, target, &DetuningSearch::default())?
            .into_iter()
            .map(|r| r.delta)
            .collect(),
    )
}

pub fn solve_detuning_with(
    sys: &CavitySystem,
    target: f64,
    search: &DetuningSearch,
) -> Result<Vec<DetuningRoot>> {
    let (lo, hi) = search.bracket_for(sys);
    let roots: Vec<DetuningRoot> = angle_roots(
        |delta| phase_difference(sys, delta) - target,
        lo,
        hi,
        search.scan_points,
    )
    .into_iter()
    .map(|r| DetuningRoot {
        delta: r.x,
        residual: r.residual,
    })
    .collect();
    if roots.is_empty() {
        Err(Error::NoRootInBracket { lo, hi })
    } else {
        Ok(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sys(g: f64, kappa_s: f64, gamma: f64) -> CavitySystem {
        CavitySystem::resonant(g, kappa_s, gamma).unwrap()
    }

    #[test]
    fn rejects_unphysical_parameters() {
        assert!(CavitySystem::resonant(-1.0, 0.0, 0.1).is_err());
        assert!(CavitySystem::resonant(1.0, -0.1, 0.1).is_err());
        assert!(CavitySystem::resonant(1.0, 0.0, 0.0).is_err());
        assert!(CavitySystem::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn coupled_reduces_to_cold_without_coupling() {
        let s = sys(0.0, 0.3, 0.1);
        for omega in [-3.0, -0.2, 0.0, 1.7] {
            assert_eq!(reflection_coupled(&s, omega), reflection_cold(&s, omega));
        }
    }

    #[test]
    fn cold_cavity_limits() {
        let s = sys(0.0, 0.0, 0.1);
        assert_eq!(reflection_cold(&s, 0.0), Complex64::new(-1.0, 0.0));
        let far = reflection_cold(&s, -1e9);
        assert!((far - 1.0).norm() < 1e-8);
        let far = reflection_cold(&s, 1e9);
        assert!((far - 1.0).norm() < 1e-8);
    }

    #[test]
    fn extended_precision_values() {
        // 50-digit evaluations of the two reflection formulas.
        let s = sys(2.4, 0.0, 0.1);
        let r = reflection_coupled(&s, s.frequency_for(2.4));
        assert!((r.re - -0.818_247_013_095_050_3).abs() < 1e-14);
        assert!((r.im - 0.003_442_291_418_654_350_9).abs() < 1e-14);

        let lossy = sys(0.0, 0.2, 0.1);
        let r0 = reflection_cold(&lossy, lossy.frequency_for(1.0));
        assert!((r0.re - 0.558_823_529_411_764_7).abs() < 1e-15);
        assert!((r0.im - 0.735_294_117_647_058_8).abs() < 1e-15);
    }

    #[test]
    fn phase_difference_vanishes_without_coupling_or_far_detuned() {
        let s = sys(0.0, 0.0, 0.1);
        for d in [-5.0, 0.3, 2.0] {
            assert_eq!(phase_difference(&s, d), 0.0);
        }
        let s = sys(2.4, 0.0, 0.1);
        assert!(phase_difference(&s, 1e6).abs() < 1e-5);
        assert!(phase_difference(&s, -1e6).abs() < 1e-5);
    }

    #[test]
    fn phase_crosses_quarter_wave_on_dense_grid() {
        // Oracle: sign change of wrapped (phi + pi/2) with |jump| < pi on a dense grid.
        let s = sys(2.4, 0.0, 0.1);
        let n = 100_000;
        let mut crossings = 0;
        let mut prev = wrap_angle(phase_difference(&s, 0.0) + PI / 2.0);
        for i in 1..=n {
            let d = 4.0 * i as f64 / n as f64;
            let cur = wrap_angle(phase_difference(&s, d) + PI / 2.0);
            if prev.signum() != cur.signum() && (prev - cur).abs() < PI {
                crossings += 1;
            }
            prev = cur;
        }
        assert!(crossings >= 1);
    }

    #[test]
    fn strong_coupling_threshold() {
        assert!(!sys(0.25, 0.0, 0.1).is_strong_coupling());
        assert!(sys(2.4, 0.0, 0.1).is_strong_coupling());
        assert!(!sys(0.3, 0.5, 0.1).is_strong_coupling());
        assert!(sys(0.38, 0.5, 0.1).is_strong_coupling());
    }

    #[test]
    fn no_root_without_coupling() {
        let s = sys(0.0, 0.0, 0.1);
        assert!(matches!(
            solve_detuning(&s, PI / 2.0),
            Err(Error::NoRootInBracket { .. })
        ));
    }

    #[test]
    fn degenerate_target_zero_is_deduplicated() {
        // phi == 0 everywhere: the whole grid solves it, one root survives.
        let s = sys(0.0, 0.0, 0.1);
        let roots = solve_detuning(&s, 0.0).unwrap();
        assert_eq!(roots.len(), 1);
    }

    #[test]
    fn target_zero_with_coupling_has_no_spurious_roots() {
        let s = sys(2.4, 0.0, 0.1);
        match solve_detuning_with(&s, 0.0, &DetuningSearch::default()) {
            Ok(roots) => {
                for r in roots {
                    assert!(r.residual.abs() < 1e-10);
                }
            }
            Err(Error::NoRootInBracket { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn quarter_wave_root_near_coupling_strength() {
        let s = sys(2.4, 0.0, 0.1);
        let roots = solve_detuning(&s, -PI / 2.0).unwrap();
        assert!(roots.windows(2).all(|w| w[0] < w[1]));
        for &d in &roots {
            assert!((phase_difference(&s, d) + PI / 2.0).abs() < 1e-10);
        }
        assert!(roots.iter().any(|d| (d - 2.4).abs() < 0.6), "{roots:?}");
    }

    #[test]
    fn root_selection() {
        let roots = [-2.7, 0.56, 2.05];
        assert_eq!(RootSelection::SmallestMagnitude.pick(&roots), Some(0.56));
        assert_eq!(RootSelection::Index(2).pick(&roots), Some(2.05));
        assert_eq!(RootSelection::Index(5).pick(&roots), None);
        assert_eq!(RootSelection::Nearest(2.4).pick(&roots), Some(2.05));
    }

    proptest! {
        #[test]
        fn lossless_cold_cavity_is_unitary(delta in -50.0f64..50.0) {
            let s = sys(0.0, 0.0, 0.1);
            let r = reflection_cold(&s, s.frequency_for(delta));
            prop_assert!((r.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn passive_reflection(g in 0.0f64..4.0, ks in 0.0f64..1.0, gamma in 0.01f64..1.0, delta in -10.0f64..10.0) {
            let s = sys(g, ks, gamma);
            let pair = s.reflections(s.frequency_for(delta));
            prop_assert!(pair.r_coupled.norm() <= 1.0 + 1e-12);
            prop_assert!(pair.r_cold.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn phase_is_odd_in_detuning(g in 0.0f64..4.0, ks in 0.0f64..1.0, gamma in 0.01f64..1.0, delta in 0.01f64..10.0) {
            let s = sys(g, ks, gamma);
            let plus = phase_difference(&s, delta);
            let minus = phase_difference(&s, -delta);
            // At exactly +-pi the principal branch is not symmetric.
            prop_assume!((plus.abs() - PI).abs() > 1e-9);
            prop_assert!((plus + minus).abs() < 1e-10);
        }

        #[test]
        fn solver_roots_meet_residual(g in 0.3f64..3.0, gamma in 0.05f64..0.5, positive in any::<bool>()) {
            let s = sys(g, 0.0, gamma);
            let target = if positive { PI / 2.0 } else { -PI / 2.0 };
            if let Ok(roots) = solve_detuning(&s, target) {
                for d in roots {
                    prop_assert!(wrap_angle(phase_difference(&s, d) - target).abs() < 1e-10);
                }
            }
        }
    }
}
