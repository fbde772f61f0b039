use nalgebra::{DMatrix, SymmetricEigen};

use super::{
    check_labels, gates, is_unit_modulus, mask_at, position, Gate, Pauli, PauliChannel, PureState,
    QuantumState, QubitLabel, C64, NORM_SLACK, ZERO,
};
use crate::error::{Error, Result};

/// Density operator stored row-major, `dim x dim` with `dim = 2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    labels: Vec<QubitLabel>,
    data: Vec<C64>,
    subnormalized: bool,
}

impl DensityOperator {
    /// Validates Hermiticity, trace in `(0, 1]` and positive semidefiniteness.
    pub fn new(labels: Vec<QubitLabel>, data: Vec<C64>) -> Result<Self> {
        check_labels(&labels)?;
        let dim = 1usize << labels.len();
        if data.len() != dim * dim {
            return Err(Error::InvalidState(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        let rho = Self::from_raw(labels, data);
        for i in 0..dim {
            for j in 0..=i {
                if (rho.get(i, j) - rho.get(j, i).conj()).norm() > 1e-12 {
                    return Err(Error::InvalidState("not Hermitian".into()));
                }
            }
        }
        let tr = rho.weight();
        if !(tr > 0.0 && tr <= 1.0 + NORM_SLACK) {
            return Err(Error::InvalidState(format!("trace {tr} outside (0, 1]")));
        }
        if rho.eigenvalues().iter().any(|&e| e < -1e-10) {
            return Err(Error::InvalidState("negative eigenvalue".into()));
        }
        Ok(rho)
    }

    pub(crate) fn from_raw(labels: Vec<QubitLabel>, data: Vec<C64>) -> Self {
        let dim = 1usize << labels.len();
        let tr: f64 = (0..dim).map(|i| data[i * dim + i].re).sum();
        DensityOperator {
            labels,
            data,
            subnormalized: tr < 1.0 - NORM_SLACK,
        }
    }

    pub fn from_pure(state: &PureState) -> Self {
        state.to_density()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        self.weight()
    }

    fn to_matrix(&self) -> DMatrix<C64> {
        let dim = self.dim();
        DMatrix::from_row_slice(dim, dim, &self.data)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.to_matrix();
        let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let dim = self.dim();
        (0..dim).all(|i| (0..=i).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// Applies `(1-p) rho + x X rho X + y Y rho Y + z Z rho Z` on one qubit.
    pub fn apply_pauli_channel(&self, label: QubitLabel, ch: &PauliChannel) -> Result<Self> {
        ch.validate()?;
        position(&self.labels, label)?;
        let mut out: Vec<C64> = self
            .data
            .iter()
            .map(|v| v * (1.0 - ch.error_rate()))
            .collect();
        for (p, weight) in [(Pauli::X, ch.x), (Pauli::Y, ch.y), (Pauli::Z, ch.z)] {
            if weight == 0.0 {
                continue;
            }
            let conj = self.apply_single_qubit(label, &p.gate())?;
            out.iter_mut()
                .zip(&conj.data)
                .for_each(|(o, c)| *o += c * weight);
        }
        Ok(DensityOperator {
            data: out,
            ..self.clone()
        })
    }

    pub fn partial_trace(&self, keep: &[QubitLabel]) -> Result<Self> {
        check_labels(keep)?;
        let n = self.labels.len();
        let keep_pos: Vec<usize> = keep
            .iter()
            .map(|l| position(&self.labels, *l))
            .collect::<Result<_>>()?;
        let k = keep.len();
        let dk = 1usize << k;
        let keep_mask: usize = keep_pos.iter().map(|&p| mask_at(n, p)).sum();
        let rest_mask = (self.dim() - 1) & !keep_mask;
        let embed: Vec<usize> = (0..dk)
            .map(|kidx| {
                keep_pos
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| kidx & (1 << (k - 1 - j)) != 0)
                    .map(|(_, &p)| mask_at(n, p))
                    .sum()
            })
            .collect();
        let mut rest_configs = Vec::new();
        let mut sub = rest_mask;
        loop {
            rest_configs.push(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest_mask;
        }
        let mut data = vec![ZERO; dk * dk];
        for (i, &ei) in embed.iter().enumerate() {
            for (j, &ej) in embed.iter().enumerate() {
                data[i * dk + j] = rest_configs.iter().map(|&r| self.get(ei | r, ej | r)).sum();
            }
        }
        Ok(DensityOperator::from_raw(keep.to_vec(), data))
    }

    /// `<psi| rho |psi>` for a normalized copy of both.
    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64> {
        if self.labels != psi.labels() {
            return Err(Error::LabelMismatch);
        }
        let dim = self.dim();
        let a = psi.amplitudes();
        let mut acc = ZERO;
        for i in 0..dim {
            for j in 0..dim {
                acc += a[i].conj() * self.get(i, j) * a[j];
            }
        }
        Ok((acc.re / (self.trace() * psi.norm_sqr())).clamp(0.0, 1.0))
    }

    /// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` of the normalized operators.
    pub fn fidelity(&self, other: &DensityOperator) -> Result<f64> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        let a = self.to_matrix() / C64::new(self.trace(), 0.0);
        let b = other.to_matrix() / C64::new(other.trace(), 0.0);
        let sqrt_a = hermitian_sqrt(&a);
        let inner = &sqrt_a * b * &sqrt_a;
        let herm = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
        let root_trace: f64 = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .map(|e| e.max(0.0).sqrt())
            .sum();
        Ok((root_trace * root_trace).clamp(0.0, 1.0))
    }

    fn transform(&self, label: QubitLabel, gate: &Gate) -> Result<Vec<C64>> {
        let n = self.labels.len();
        let mask = mask_at(n, position(&self.labels, label)?);
        let dim = self.dim();
        let mut tmp = self.data.clone();
        // rows: G rho
        for i in (0..dim).filter(|i| i & mask == 0) {
            for c in 0..dim {
                let a0 = self.data[i * dim + c];
                let a1 = self.data[(i | mask) * dim + c];
                tmp[i * dim + c] = gate[0][0] * a0 + gate[0][1] * a1;
                tmp[(i | mask) * dim + c] = gate[1][0] * a0 + gate[1][1] * a1;
            }
        }
        // columns: (G rho) G^dagger
        let mut out = tmp.clone();
        for r in 0..dim {
            for j in (0..dim).filter(|j| j & mask == 0) {
                let a0 = tmp[r * dim + j];
                let a1 = tmp[r * dim + (j | mask)];
                out[r * dim + j] = a0 * gate[0][0].conj() + a1 * gate[0][1].conj();
                out[r * dim + (j | mask)] = a0 * gate[1][0].conj() + a1 * gate[1][1].conj();
            }
        }
        Ok(out)
    }
}

fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let roots = eig.eigenvalues.map(|e| C64::new(e.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

impl QuantumState for DensityOperator {
    fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    fn weight(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).sum()
    }

    fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    fn apply_single_qubit(&self, label: QubitLabel, gate: &Gate) -> Result<Self> {
        let data = self.transform(label, gate)?;
        Ok(DensityOperator {
            labels: self.labels.clone(),
            data,
            subnormalized: self.subnormalized || !gates::is_unitary(gate),
        })
    }

    fn apply_two_qubit_diagonal(
        &self,
        a: QubitLabel,
        b: QubitLabel,
        diag: [C64; 4],
    ) -> Result<Self> {
        if a == b {
            return Err(Error::DuplicateLabel(a));
        }
        let n = self.labels.len();
        let ma = mask_at(n, position(&self.labels, a)?);
        let mb = mask_at(n, position(&self.labels, b)?);
        let factor: Vec<C64> = (0..self.dim())
            .map(|i| diag[(usize::from(i & ma != 0) << 1) | usize::from(i & mb != 0)])
            .collect();
        let dim = self.dim();
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, v)| v * factor[idx / dim] * factor[idx % dim].conj())
            .collect();
        Ok(DensityOperator {
            labels: self.labels.clone(),
            data,
            subnormalized: self.subnormalized || !diag.iter().all(|c| is_unit_modulus(*c)),
        })
    }

    fn with_qubit(&self, label: QubitLabel, ket: [C64; 2]) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.push(label);
        check_labels(&labels)?;
        let dim = self.dim();
        let nd = dim * 2;
        let mut data = vec![ZERO; nd * nd];
        for i in 0..dim {
            for j in 0..dim {
                let v = self.data[i * dim + j];
                for (bi, ki) in ket.iter().enumerate() {
                    for (bj, kj) in ket.iter().enumerate() {
                        data[(2 * i + bi) * nd + 2 * j + bj] = v * ki * kj.conj();
                    }
                }
            }
        }
        Ok(DensityOperator {
            labels,
            data,
            subnormalized: self.subnormalized,
        })
    }

    fn project_out(&self, label: QubitLabel, ket: [C64; 2]) -> Result<Self> {
        let n = self.labels.len();
        let pos = position(&self.labels, label)?;
        let mask = mask_at(n, pos);
        let low = mask - 1;
        let dim = self.dim();
        let half = dim / 2;
        let expand = |r: usize| ((r & !low) << 1) | (r & low);
        let bra = [ket[0].conj(), ket[1].conj()];
        let mut data = vec![ZERO; half * half];
        for i in 0..half {
            let i0 = expand(i);
            for j in 0..half {
                let j0 = expand(j);
                let mut acc = ZERO;
                for (bi, ri) in [(0, i0), (1, i0 | mask)] {
                    for (bj, cj) in [(0, j0), (1, j0 | mask)] {
                        acc += bra[bi] * self.data[ri * dim + cj] * ket[bj];
                    }
                }
                data[i * half + j] = acc;
            }
        }
        let mut labels = self.labels.clone();
        labels.remove(pos);
        Ok(DensityOperator::from_raw(labels, data))
    }

    fn pauli_expectation(&self, ops: &[(QubitLabel, Pauli)]) -> Result<f64> {
        // Tr[P rho]: P acts on rows only.
        let n = self.labels.len();
        let dim = self.dim();
        let mut flip = 0usize;
        let mut ys = Vec::new();
        let mut zs = Vec::new();
        for (label, p) in ops {
            let m = mask_at(n, position(&self.labels, *label)?);
            match p {
                Pauli::I => {}
                Pauli::X => flip ^= m,
                Pauli::Y => {
                    flip ^= m;
                    ys.push(m);
                }
                Pauli::Z => zs.push(m),
            }
        }
        // (P rho)_{ii} = sum_k P_{ik} rho_{ki}; P is a signed permutation.
        let mut acc = ZERO;
        for i in 0..dim {
            let k = i ^ flip;
            let mut coeff = C64::new(1.0, 0.0);
            for &m in &zs {
                if k & m != 0 {
                    coeff = -coeff;
                }
            }
            for &m in &ys {
                // Y|0> = i|1>, Y|1> = -i|0>; entry P_{ik} with k the source bit.
                coeff *= if k & m == 0 {
                    C64::new(0.0, 1.0)
                } else {
                    C64::new(0.0, -1.0)
                };
            }
            acc += coeff * self.data[k * dim + i];
        }
        Ok(acc.re)
    }

    fn scale_weight(&self, factor: f64) -> Self {
        let data = self.data.iter().map(|v| v * factor).collect();
        DensityOperator::from_raw(self.labels.clone(), data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{Basis, ONE};
    use approx::assert_abs_diff_eq;

    fn q(i: u32) -> QubitLabel {
        QubitLabel::photon(i)
    }

    fn assert_close(a: &DensityOperator, b: &DensityOperator, tol: f64) {
        assert_eq!(a.labels(), b.labels());
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!((x - y).norm() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn channel_examples() {
        let zero = PureState::basis(vec![q(0)], 0).unwrap().to_density();
        let same = zero
            .apply_pauli_channel(q(0), &PauliChannel::noiseless())
            .unwrap();
        assert_close(&same, &zero, 0.0);

        let flipped = zero
            .apply_pauli_channel(q(0), &PauliChannel::new(1.0, 0.0, 0.0).unwrap())
            .unwrap();
        assert_close(
            &flipped,
            &PureState::basis(vec![q(0)], 1).unwrap().to_density(),
            1e-15,
        );

        let y_plus = PureState::product(vec![q(0)], &[Basis::Y.eigenket(true)])
            .unwrap()
            .to_density();
        let mixed = y_plus
            .apply_pauli_channel(q(0), &PauliChannel::new(0.25, 0.25, 0.25).unwrap())
            .unwrap();
        let half = DensityOperator::new(
            vec![q(0)],
            vec![C64::new(0.5, 0.0), ZERO, ZERO, C64::new(0.5, 0.0)],
        )
        .unwrap();
        assert_close(&mixed, &half, 1e-15);
    }

    #[test]
    fn invalid_channel_rejected() {
        let zero = PureState::basis(vec![q(0)], 0).unwrap().to_density();
        let bad = PauliChannel {
            x: 0.7,
            y: 0.7,
            z: 0.0,
        };
        assert!(matches!(
            zero.apply_pauli_channel(q(0), &bad),
            Err(Error::InvalidChannel { .. })
        ));
        assert!(PauliChannel::new(-0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(
            vec![q(0), q(1)],
            vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)],
        )
        .unwrap()
        .to_density();
        let all = bell.partial_trace(&[q(0), q(1)]).unwrap();
        assert_close(&all, &bell, 0.0);
        let half = bell.partial_trace(&[q(1)]).unwrap();
        assert_abs_diff_eq!(half.get(0, 0).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(half.get(1, 1).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(half.get(0, 1).norm(), 0.0, epsilon = 1e-12);

        let a = PureState::product(vec![q(0)], &[Basis::Y.eigenket(false)]).unwrap();
        let b = PureState::product(vec![q(1)], &[Basis::X.eigenket(true)]).unwrap();
        let ab = a.tensor(&b).unwrap().to_density();
        assert_close(&ab.partial_trace(&[q(0)]).unwrap(), &a.to_density(), 1e-12);
        assert_close(&ab.partial_trace(&[q(1)]).unwrap(), &b.to_density(), 1e-12);
        assert!(matches!(
            ab.partial_trace(&[q(7)]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let s = PureState::from_unnormalized(
            vec![q(0), q(1), q(2)],
            (0..8)
                .map(|k| C64::new(k as f64 + 1.0, (k * k) as f64 * 0.3))
                .collect(),
        )
        .unwrap();
        let keep = [q(2), q(0)];
        let a = s.reduced_density(&keep).unwrap();
        let b = s.to_density().partial_trace(&keep).unwrap();
        assert_close(&a, &b, 1e-14);
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let not_herm = vec![
            C64::new(0.5, 0.0),
            C64::new(0.1, 0.0),
            ZERO,
            C64::new(0.5, 0.0),
        ];
        assert!(DensityOperator::new(vec![q(0)], not_herm).is_err());
        let negative = vec![C64::new(1.5, 0.0), ZERO, ZERO, C64::new(-0.5, 0.0)];
        assert!(DensityOperator::new(vec![q(0)], negative).is_err());
        let ok = vec![ONE, ZERO, ZERO, ZERO];
        assert!(DensityOperator::new(vec![q(0)], ok).is_ok());
    }

    #[test]
    fn uhlmann_fidelity_reduces_to_overlap() {
        let a = PureState::product(vec![q(0)], &[Basis::X.eigenket(true)]).unwrap();
        let b = PureState::basis(vec![q(0)], 0).unwrap();
        let f = a.to_density().fidelity(&b.to_density()).unwrap();
        assert_abs_diff_eq!(f, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(
            a.to_density().fidelity_with_pure(&b).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        let mixed = DensityOperator::new(
            vec![q(0)],
            vec![C64::new(0.5, 0.0), ZERO, ZERO, C64::new(0.5, 0.0)],
        )
        .unwrap();
        assert_abs_diff_eq!(mixed.fidelity(&mixed).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn pauli_expectation_matches_pure() {
        let s = PureState::from_unnormalized(
            vec![q(0), q(1)],
            vec![
                C64::new(0.3, 0.1),
                C64::new(-0.2, 0.5),
                C64::new(0.7, 0.0),
                C64::new(0.1, -0.4),
            ],
        )
        .unwrap();
        let rho = s.to_density();
        for a in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
            for b in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                let ops = [(q(0), a), (q(1), b)];
                assert_abs_diff_eq!(
                    rho.pauli_expectation(&ops).unwrap(),
                    s.pauli_expectation(&ops).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
    }
}
