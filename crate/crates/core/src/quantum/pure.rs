use super::{
    check_labels, gates, is_unit_modulus, mask_at, position, Gate, Pauli, QuantumState, QubitLabel,
    C64, NORM_SLACK, ONE, ZERO,
};
use crate::error::{Error, Result};

/// State vector over an ordered list of qubit labels.
///
/// A state may be subnormalized (norm below one) after non-unitary
/// evolution; the deficit is the probability of a loss branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    labels: Vec<QubitLabel>,
    amplitudes: Vec<C64>,
    subnormalized: bool,
}

impl PureState {
    pub fn new(labels: Vec<QubitLabel>, amplitudes: Vec<C64>) -> Result<Self> {
        check_labels(&labels)?;
        if amplitudes.len() != 1 << labels.len() {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                labels.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !(norm > 0.0 && norm <= 1.0 + NORM_SLACK) {
            return Err(Error::InvalidState(format!(
                "norm^2 = {norm} outside (0, 1]"
            )));
        }
        let subnormalized = norm < 1.0 - NORM_SLACK;
        Ok(PureState {
            labels,
            amplitudes,
            subnormalized,
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_unnormalized(labels: Vec<QubitLabel>, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(labels, amplitudes)
    }

    pub(crate) fn from_raw(labels: Vec<QubitLabel>, amplitudes: Vec<C64>) -> Self {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        PureState {
            labels,
            amplitudes,
            subnormalized: norm < 1.0 - NORM_SLACK,
        }
    }

    /// Computational basis state; `index` uses the first label as the most significant bit.
    pub fn basis(labels: Vec<QubitLabel>, index: usize) -> Result<Self> {
        check_labels(&labels)?;
        let dim = 1usize << labels.len();
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} >= {dim}")));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(PureState {
            labels,
            amplitudes,
            subnormalized: false,
        })
    }

    /// Product state `kets[0] (x) kets[1] (x) ...`.
    pub fn product(labels: Vec<QubitLabel>, kets: &[[C64; 2]]) -> Result<Self> {
        if kets.len() != labels.len() {
            return Err(Error::InvalidState("one ket per label required".into()));
        }
        check_labels(&labels)?;
        let mut amplitudes = vec![ONE];
        for ket in kets {
            amplitudes = amplitudes
                .iter()
                .flat_map(|a| [a * ket[0], a * ket[1]])
                .collect();
        }
        Self::new(labels, amplitudes)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<a|b>|^2 / (<a|a><b|b>)`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        let overlap = self.inner(other)?.norm_sqr();
        Ok((overlap / (self.norm_sqr() * other.norm_sqr())).clamp(0.0, 1.0))
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        check_labels(&labels)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self::from_raw(labels, amplitudes))
    }

    /// Reorders the register so that it follows `labels`.
    pub fn permuted(&self, labels: &[QubitLabel]) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::LabelMismatch);
        }
        let n = labels.len();
        let src: Vec<usize> = labels
            .iter()
            .map(|l| position(&self.labels, *l))
            .collect::<Result<_>>()?;
        let mut amplitudes = vec![ZERO; self.amplitudes.len()];
        for (idx, amp) in amplitudes.iter_mut().enumerate() {
            let mut old = 0usize;
            for (new_pos, &old_pos) in src.iter().enumerate() {
                if idx & mask_at(n, new_pos) != 0 {
                    old |= mask_at(n, old_pos);
                }
            }
            *amp = self.amplitudes[old];
        }
        Ok(PureState {
            labels: labels.to_vec(),
            amplitudes,
            subnormalized: self.subnormalized,
        })
    }

    /// Relabels qubits in place of their current labels, order unchanged.
    pub fn relabeled(&self, labels: Vec<QubitLabel>) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::LabelMismatch);
        }
        check_labels(&labels)?;
        Ok(PureState {
            labels,
            ..self.clone()
        })
    }

    /// Applies a Pauli string in place of one gate per qubit.
    pub fn apply_pauli_string(&self, ops: &[(QubitLabel, Pauli)]) -> Result<Self> {
        let mut out = self.clone();
        for (label, p) in ops {
            if *p != Pauli::I {
                out = out.apply_single_qubit(*label, &p.gate())?;
            }
        }
        Ok(out)
    }

    /// Reduced density matrix on `keep` (row-major, `keep` order) without
    /// materializing the full outer product.
    pub fn reduced_density(&self, keep: &[QubitLabel]) -> Result<super::DensityOperator> {
        let n = self.labels.len();
        let keep_pos: Vec<usize> = keep
            .iter()
            .map(|l| position(&self.labels, *l))
            .collect::<Result<_>>()?;
        check_labels(keep)?;
        let k = keep.len();
        let dk = 1usize << k;
        let keep_mask: usize = keep_pos.iter().map(|&p| mask_at(n, p)).sum();
        let rest_mask = ((1usize << n) - 1) & !keep_mask;
        // Enumerate all assignments of the traced-out qubits.
        let mut rest_configs = Vec::new();
        let mut sub = rest_mask;
        loop {
            rest_configs.push(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest_mask;
        }
        let embed = |kidx: usize| -> usize {
            keep_pos
                .iter()
                .enumerate()
                .filter(|(j, _)| kidx & (1 << (k - 1 - j)) != 0)
                .map(|(_, &p)| mask_at(n, p))
                .sum()
        };
        let embedded: Vec<usize> = (0..dk).map(embed).collect();
        let mut data = vec![ZERO; dk * dk];
        for &rest in &rest_configs {
            for (i, &ei) in embedded.iter().enumerate() {
                let ai = self.amplitudes[ei | rest];
                if ai == ZERO {
                    continue;
                }
                for (j, &ej) in embedded.iter().enumerate() {
                    data[i * dk + j] += ai * self.amplitudes[ej | rest].conj();
                }
            }
        }
        Ok(super::DensityOperator::from_raw(keep.to_vec(), data))
    }

    pub fn to_density(&self) -> super::DensityOperator {
        let dim = self.amplitudes.len();
        let mut data = vec![ZERO; dim * dim];
        for (i, a) in self.amplitudes.iter().enumerate() {
            for (j, b) in self.amplitudes.iter().enumerate() {
                data[i * dim + j] = a * b.conj();
            }
        }
        super::DensityOperator::from_raw(self.labels.clone(), data)
    }

    fn map_pairs(&self, label: QubitLabel, gate: &Gate) -> Result<Vec<C64>> {
        let pos = position(&self.labels, label)?;
        let mask = mask_at(self.labels.len(), pos);
        let mut out = self.amplitudes.clone();
        for i in (0..out.len()).filter(|i| i & mask == 0) {
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[i | mask];
            out[i] = gate[0][0] * a0 + gate[0][1] * a1;
            out[i | mask] = gate[1][0] * a0 + gate[1][1] * a1;
        }
        Ok(out)
    }
}

impl QuantumState for PureState {
    fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    fn weight(&self) -> f64 {
        self.norm_sqr()
    }

    fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    fn apply_single_qubit(&self, label: QubitLabel, gate: &Gate) -> Result<Self> {
        let amplitudes = self.map_pairs(label, gate)?;
        let subnormalized = self.subnormalized || !gates::is_unitary(gate);
        Ok(PureState {
            labels: self.labels.clone(),
            amplitudes,
            subnormalized,
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
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, amp)| {
                let k = (usize::from(i & ma != 0) << 1) | usize::from(i & mb != 0);
                amp * diag[k]
            })
            .collect();
        let subnormalized = self.subnormalized || !diag.iter().all(|c| is_unit_modulus(*c));
        Ok(PureState {
            labels: self.labels.clone(),
            amplitudes,
            subnormalized,
        })
    }

    fn with_qubit(&self, label: QubitLabel, ket: [C64; 2]) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.push(label);
        check_labels(&labels)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| [a * ket[0], a * ket[1]])
            .collect();
        Ok(PureState {
            labels,
            amplitudes,
            subnormalized: self.subnormalized,
        })
    }

    fn project_out(&self, label: QubitLabel, ket: [C64; 2]) -> Result<Self> {
        let n = self.labels.len();
        let pos = position(&self.labels, label)?;
        let mask = mask_at(n, pos);
        let low = mask - 1;
        let bra = [ket[0].conj(), ket[1].conj()];
        let amplitudes = (0..self.amplitudes.len() / 2)
            .map(|r| {
                // Re-insert a zero bit at `pos`.
                let i0 = ((r & !low) << 1) | (r & low);
                bra[0] * self.amplitudes[i0] + bra[1] * self.amplitudes[i0 | mask]
            })
            .collect();
        let mut labels = self.labels.clone();
        labels.remove(pos);
        Ok(Self::from_raw(labels, amplitudes))
    }

    fn pauli_expectation(&self, ops: &[(QubitLabel, Pauli)]) -> Result<f64> {
        let applied = self.apply_pauli_string(ops)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&applied.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re)
    }

    fn scale_weight(&self, factor: f64) -> Self {
        let s = factor.sqrt();
        let amplitudes: Vec<C64> = self.amplitudes.iter().map(|a| a * s).collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        PureState {
            labels: self.labels.clone(),
            amplitudes,
            subnormalized: norm < 1.0 - NORM_SLACK,
        }
    }
}
