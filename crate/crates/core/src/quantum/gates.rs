//! 2x2 complex gates, row-major: `gate[row][col]`.

use super::{C64, ONE, ZERO};

pub type Gate = [[C64; 2]; 2];

pub fn identity() -> Gate {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn hadamard() -> Gate {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

pub fn pauli_x() -> Gate {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Gate {
    let i = C64::new(0.0, 1.0);
    [[ZERO, -i], [i, ZERO]]
}

pub fn pauli_z() -> Gate {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn diagonal(d0: C64, d1: C64) -> Gate {
    [[d0, ZERO], [ZERO, d1]]
}

/// `|1> -> e^{i theta} |1>`. On a photon this is the R-only retarder.
pub fn phase(theta: f64) -> Gate {
    diagonal(ONE, C64::from_polar(1.0, theta))
}

/// Rank-one projector `|k><k|`.
pub fn projector(ket: [C64; 2]) -> Gate {
    [
        [ket[0] * ket[0].conj(), ket[0] * ket[1].conj()],
        [ket[1] * ket[0].conj(), ket[1] * ket[1].conj()],
    ]
}

pub fn adjoint(g: &Gate) -> Gate {
    [
        [g[0][0].conj(), g[1][0].conj()],
        [g[0][1].conj(), g[1][1].conj()],
    ]
}

pub fn mul(a: &Gate, b: &Gate) -> Gate {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn is_unitary(g: &Gate) -> bool {
    let p = mul(&adjoint(g), g);
    let id = identity();
    p.iter()
        .flatten()
        .zip(id.iter().flatten())
        .all(|(a, b)| (a - b).norm() <= 1e-12)
}
