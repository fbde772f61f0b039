//! Unrotated planar and toric surface-code lattices.
//!
//! Planar distance `d` lives on a `(2d-1) x (2d-1)` grid: data qubits sit at
//! `(row, col)` with `row + col` even, stars (X-type) at even rows / odd
//! columns and plaquettes (Z-type) at odd rows / even columns. Ancilla sites
//! on the grid edge have three data neighbours, giving the weight-3 boundary
//! operators.
//!
//! Toric distance `d` uses a periodic `2d x 2d` grid with data at
//! `row + col` odd, stars at (even, even) and plaquettes at (odd, odd).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Pauli, PureState, QuantumState, QubitLabel, C64, ONE, ZERO};

/// Largest lattice for which the quiescent state is built densely.
pub const MAX_QUIESCENT_QUBITS: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Planar,
    Toric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilizerKind {
    Star,
    Plaquette,
}

impl StabilizerKind {
    pub fn pauli(self) -> Pauli {
        match self {
            StabilizerKind::Star => Pauli::X,
            StabilizerKind::Plaquette => Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataQubit {
    pub id: usize,
    pub row: usize,
    pub col: usize,
}

impl DataQubit {
    pub fn label(&self) -> QubitLabel {
        QubitLabel::photon(self.id as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerRecord {
    /// Index within its kind.
    pub id: usize,
    pub kind: StabilizerKind,
    /// Ancilla site.
    pub row: usize,
    pub col: usize,
    /// Data qubits in ascending id order.
    pub support: Vec<QubitLabel>,
}

impl StabilizerRecord {
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_boundary(&self) -> bool {
        self.support.len() < 4
    }

    pub fn pauli_string(&self) -> Vec<(QubitLabel, Pauli)> {
        self.support
            .iter()
            .map(|l| (*l, self.kind.pauli()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCodeLattice {
    pub geometry: Geometry,
    pub distance: usize,
    pub data_qubits: Vec<DataQubit>,
    pub stars: Vec<StabilizerRecord>,
    pub plaquettes: Vec<StabilizerRecord>,
}

/// Picks one stabilizer of a kind out of a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StabilizerChoice {
    /// First in row-major ancilla order; on a planar lattice this is always a
    /// weight-3 boundary operator, whatever the distance.
    #[default]
    First,
    /// First with the given weight.
    Weight(usize),
    Index(usize),
}

impl SurfaceCodeLattice {
    pub fn planar(distance: usize) -> Result<Self> {
        build_planar(distance)
    }

    pub fn toric(distance: usize) -> Result<Self> {
        build_toric(distance)
    }

    pub fn num_qubits(&self) -> usize {
        self.data_qubits.len()
    }

    pub fn labels(&self) -> Vec<QubitLabel> {
        self.data_qubits.iter().map(DataQubit::label).collect()
    }

    pub fn stabilizers(&self, kind: StabilizerKind) -> &[StabilizerRecord] {
        match kind {
            StabilizerKind::Star => &self.stars,
            StabilizerKind::Plaquette => &self.plaquettes,
        }
    }

    pub fn all_stabilizers(&self) -> impl Iterator<Item = &StabilizerRecord> {
        self.stars.iter().chain(&self.plaquettes)
    }

    pub fn select(
        &self,
        kind: StabilizerKind,
        choice: StabilizerChoice,
    ) -> Result<&StabilizerRecord> {
        let stabs = self.stabilizers(kind);
        match choice {
            StabilizerChoice::First => stabs.first(),
            StabilizerChoice::Weight(w) => stabs.iter().find(|s| s.weight() == w),
            StabilizerChoice::Index(i) => stabs.get(i),
        }
        .ok_or(Error::NoSuchStabilizer)
    }

    /// Stabilizers of `kind` whose support contains `label`.
    pub fn stabilizers_touching(&self, kind: StabilizerKind, label: QubitLabel) -> Vec<usize> {
        self.stabilizers(kind)
            .iter()
            .filter(|s| s.support.contains(&label))
            .map(|s| s.id)
            .collect()
    }

    /// Every star shares an even number of qubits with every plaquette.
    pub fn stars_commute_with_plaquettes(&self) -> bool {
        self.stars.iter().all(|s| {
            self.plaquettes
                .iter()
                .all(|p| s.support.iter().filter(|q| p.support.contains(q)).count() % 2 == 0)
        })
    }

    /// GF(2) rank of the star and plaquette generators.
    pub fn independent_stabilizer_count(&self) -> usize {
        let n = self.num_qubits();
        let rows = |stabs: &[StabilizerRecord]| -> Vec<Vec<u64>> {
            stabs
                .iter()
                .map(|s| {
                    let mut bits = vec![0u64; n.div_ceil(64)];
                    for l in &s.support {
                        let i = l.index as usize;
                        bits[i / 64] |= 1 << (i % 64);
                    }
                    bits
                })
                .collect()
        };
        // X- and Z-type generators are independent of each other.
        gf2_rank(rows(&self.stars)) + gf2_rank(rows(&self.plaquettes))
    }

    pub fn to_json_description(&self) -> LatticeDescription {
        let ids = |stabs: &[StabilizerRecord]| -> Vec<Vec<usize>> {
            stabs
                .iter()
                .map(|s| s.support.iter().map(|l| l.index as usize).collect())
                .collect()
        };
        LatticeDescription {
            geometry: self.geometry,
            distance: self.distance,
            qubits: self.data_qubits.clone(),
            stars: ids(&self.stars),
            plaquettes: ids(&self.plaquettes),
        }
    }
}

/// Serialized lattice layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDescription {
    pub geometry: Geometry,
    pub distance: usize,
    pub qubits: Vec<DataQubit>,
    pub stars: Vec<Vec<usize>>,
    pub plaquettes: Vec<Vec<usize>>,
}

fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let Some(words) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut rank = 0;
    for bit in 0..words * 64 {
        let (w, m) = (bit / 64, 1u64 << (bit % 64));
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] & m != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & m != 0 {
                row.iter_mut().zip(&pivot_row).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

pub fn build_planar(distance: usize) -> Result<SurfaceCodeLattice> {
    if distance < 2 {
        return Err(Error::InvalidDistance(distance));
    }
    let size = 2 * distance - 1;
    let mut id_at = vec![vec![None; size]; size];
    let mut data_qubits = Vec::new();
    for row in 0..size {
        for col in 0..size {
            if (row + col) % 2 == 0 {
                id_at[row][col] = Some(data_qubits.len());
                data_qubits.push(DataQubit {
                    id: data_qubits.len(),
                    row,
                    col,
                });
            }
        }
    }
    let mut stars = Vec::new();
    let mut plaquettes = Vec::new();
    for row in 0..size {
        for col in 0..size {
            if (row + col) % 2 == 0 {
                continue;
            }
            let mut support: Vec<QubitLabel> = neighbours(row, col)
                .into_iter()
                .filter(|&(r, c)| r < size && c < size)
                .filter_map(|(r, c)| id_at[r][c])
                .map(|id| QubitLabel::photon(id as u32))
                .collect();
            support.sort();
            let (kind, list) = if row % 2 == 0 {
                (StabilizerKind::Star, &mut stars)
            } else {
                (StabilizerKind::Plaquette, &mut plaquettes)
            };
            list.push(StabilizerRecord {
                id: list.len(),
                kind,
                row,
                col,
                support,
            });
        }
    }
    Ok(SurfaceCodeLattice {
        geometry: Geometry::Planar,
        distance,
        data_qubits,
        stars,
        plaquettes,
    })
}

pub fn build_toric(distance: usize) -> Result<SurfaceCodeLattice> {
    if distance < 2 {
        return Err(Error::InvalidDistance(distance));
    }
    let size = 2 * distance;
    let mut id_at = vec![vec![None; size]; size];
    let mut data_qubits = Vec::new();
    for row in 0..size {
        for col in 0..size {
            if (row + col) % 2 == 1 {
                id_at[row][col] = Some(data_qubits.len());
                data_qubits.push(DataQubit {
                    id: data_qubits.len(),
                    row,
                    col,
                });
            }
        }
    }
    let wrap = |v: usize, dv: isize| ((v as isize + dv).rem_euclid(size as isize)) as usize;
    let mut stars = Vec::new();
    let mut plaquettes = Vec::new();
    for row in 0..size {
        for col in 0..size {
            if (row + col) % 2 == 1 {
                continue;
            }
            let mut support: Vec<QubitLabel> = [(-1, 0), (1, 0), (0, -1), (0, 1)]
                .iter()
                .filter_map(|&(dr, dc)| id_at[wrap(row, dr)][wrap(col, dc)])
                .map(|id| QubitLabel::photon(id as u32))
                .collect();
            support.sort();
            let (kind, list) = if row % 2 == 0 {
                (StabilizerKind::Star, &mut stars)
            } else {
                (StabilizerKind::Plaquette, &mut plaquettes)
            };
            list.push(StabilizerRecord {
                id: list.len(),
                kind,
                row,
                col,
                support,
            });
        }
    }
    Ok(SurfaceCodeLattice {
        geometry: Geometry::Toric,
        distance,
        data_qubits,
        stars,
        plaquettes,
    })
}

fn neighbours(row: usize, col: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(row + 1, col), (row, col + 1)];
    if row > 0 {
        out.push((row - 1, col));
    }
    if col > 0 {
        out.push((row, col - 1));
    }
    out
}

/// Normalized `prod_s (1 + X_s) |0...0>`.
pub fn quiescent_state(lattice: &SurfaceCodeLattice) -> Result<PureState> {
    let n = lattice.num_qubits();
    if n > MAX_QUIESCENT_QUBITS {
        return Err(Error::TooLarge {
            qubits: n,
            max: MAX_QUIESCENT_QUBITS,
        });
    }
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = ONE;
    for star in &lattice.stars {
        let flip: usize = star
            .support
            .iter()
            .map(|l| 1usize << (n - 1 - l.index as usize))
            .sum();
        let prev = amps.clone();
        for (i, a) in amps.iter_mut().enumerate() {
            *a += prev[i ^ flip];
        }
    }
    let norm = amps.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    PureState::new(lattice.labels(), amps)
}

/// `<psi| prod P |psi> / <psi|psi>` with `P = X` for stars and `Z` for plaquettes.
pub fn stabilizer_expectation<S: QuantumState>(state: &S, stab: &StabilizerRecord) -> Result<f64> {
    Ok(state.pauli_expectation(&stab.pauli_string())? / state.weight())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::gates;
    use approx::assert_abs_diff_eq;

    #[test]
    fn planar_counts() {
        assert_eq!(build_planar(1), Err(Error::InvalidDistance(1)));
        for (d, n, s) in [(2, 5, 2), (3, 13, 6), (4, 25, 12)] {
            let l = build_planar(d).unwrap();
            assert_eq!(l.num_qubits(), n);
            assert_eq!(l.stars.len(), s);
            assert_eq!(l.plaquettes.len(), s);
            assert!(l.stars_commute_with_plaquettes());
            assert!(l
                .all_stabilizers()
                .all(|st| st.weight() == 3 || st.weight() == 4));
            assert_eq!(l.independent_stabilizer_count(), n - 1);
        }
    }

    #[test]
    fn distance_two_layout_by_hand() {
        // Data: 0=(0,0) 1=(0,2) 2=(1,1) 3=(2,0) 4=(2,2).
        let l = build_planar(2).unwrap();
        let ids = |s: &StabilizerRecord| s.support.iter().map(|q| q.index).collect::<Vec<_>>();
        assert_eq!(ids(&l.stars[0]), vec![0, 1, 2]);
        assert_eq!(ids(&l.stars[1]), vec![2, 3, 4]);
        assert_eq!(ids(&l.plaquettes[0]), vec![0, 2, 3]);
        assert_eq!(ids(&l.plaquettes[1]), vec![1, 2, 4]);
    }

    #[test]
    fn toric_counts() {
        for d in 2..=5 {
            let l = build_toric(d).unwrap();
            assert_eq!(l.num_qubits(), 2 * d * d);
            assert_eq!(l.stars.len(), d * d);
            assert!(l.all_stabilizers().all(|s| s.weight() == 4));
            assert!(l.stars_commute_with_plaquettes());
            // Two logical qubits on the torus.
            assert_eq!(l.independent_stabilizer_count(), l.num_qubits() - 2);
        }
    }

    #[test]
    fn quiescent_state_too_large() {
        let l = build_planar(4).unwrap();
        assert!(matches!(quiescent_state(&l), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn quiescent_d2_is_uniform_over_star_orbit() {
        let l = build_planar(2).unwrap();
        let psi = quiescent_state(&l).unwrap();
        // Brute-force orbit of |00000> under products of the two stars.
        let masks: Vec<usize> = l
            .stars
            .iter()
            .map(|s| s.support.iter().map(|q| 1usize << (4 - q.index)).sum())
            .collect();
        let orbit = [0, masks[0], masks[1], masks[0] ^ masks[1]];
        for (i, a) in psi.amplitudes().iter().enumerate() {
            let expect = if orbit.contains(&i) { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(a.re, expect, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn quiescent_is_stabilized() {
        for d in [2, 3] {
            let l = build_planar(d).unwrap();
            let psi = quiescent_state(&l).unwrap();
            for s in l.all_stabilizers() {
                assert_abs_diff_eq!(
                    stabilizer_expectation(&psi, s).unwrap(),
                    1.0,
                    epsilon = 1e-12
                );
            }
            let x = psi.apply_pauli_string(&l.stars[0].pauli_string()).unwrap();
            assert_abs_diff_eq!(x.fidelity(&psi).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_errors_flip_adjacent_stabilizers() {
        // Exhaustive for d = 2, 3: X errors flip the plaquettes touching the
        // qubit, Z errors flip the stars; everything else stays +1.
        for d in [2, 3] {
            let l = build_planar(d).unwrap();
            let psi = quiescent_state(&l).unwrap();
            for q in l.labels() {
                for (err, flipped_kind) in [
                    (gates::pauli_x(), StabilizerKind::Plaquette),
                    (gates::pauli_z(), StabilizerKind::Star),
                ] {
                    let e = psi.apply_single_qubit(q, &err).unwrap();
                    let touched = l.stabilizers_touching(flipped_kind, q);
                    assert!((1..=2).contains(&touched.len()));
                    for s in l.all_stabilizers() {
                        let v = stabilizer_expectation(&e, s).unwrap();
                        let expect = if s.kind == flipped_kind && touched.contains(&s.id) {
                            -1.0
                        } else {
                            1.0
                        };
                        assert_abs_diff_eq!(v, expect, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn shared_qubit_flips_two_plaquettes() {
        let l = build_planar(2).unwrap();
        let psi = quiescent_state(&l).unwrap();
        let centre = QubitLabel::photon(2);
        let e = psi.apply_single_qubit(centre, &gates::pauli_x()).unwrap();
        for p in &l.plaquettes {
            assert_abs_diff_eq!(
                stabilizer_expectation(&e, p).unwrap(),
                -1.0,
                epsilon = 1e-12
            );
        }
        for s in &l.stars {
            assert_abs_diff_eq!(stabilizer_expectation(&e, s).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn z_error_inside_star_support() {
        let l = build_planar(3).unwrap();
        let psi = quiescent_state(&l).unwrap();
        let star = l
            .select(StabilizerKind::Star, StabilizerChoice::Weight(4))
            .unwrap();
        let e = psi
            .apply_single_qubit(star.support[0], &gates::pauli_z())
            .unwrap();
        assert_abs_diff_eq!(
            stabilizer_expectation(&e, star).unwrap(),
            -1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn json_description_shape() {
        let l = build_planar(2).unwrap();
        let v = serde_json::to_value(l.to_json_description()).unwrap();
        assert_eq!(v["geometry"], "planar");
        assert_eq!(v["distance"], 2);
        assert_eq!(
            v["qubits"][2],
            serde_json::json!({"id": 2, "row": 1, "col": 1})
        );
        assert_eq!(v["stars"][0], serde_json::json!([0, 1, 2]));
        assert_eq!(v["plaquettes"][1], serde_json::json!([1, 2, 4]));
    }

    #[test]
    fn selection() {
        let l = build_planar(3).unwrap();
        assert_eq!(
            l.select(StabilizerKind::Star, StabilizerChoice::First)
                .unwrap()
                .weight(),
            3
        );
        assert_eq!(
            l.select(StabilizerKind::Plaquette, StabilizerChoice::Weight(4))
                .unwrap()
                .weight(),
            4
        );
        assert!(l
            .select(StabilizerKind::Star, StabilizerChoice::Index(99))
            .is_err());
        let d2 = build_planar(2).unwrap();
        assert!(d2
            .select(StabilizerKind::Star, StabilizerChoice::Weight(4))
            .is_err());
    }
}
