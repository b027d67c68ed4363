//! Two-component states and 2x2 propagators.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// General complex 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

/// Row swap `[[0, 1], [1, 0]]`. Conjugating the Hamiltonian with it undoes
/// the sign flip of the drive under `tau -> tau + pi`.
pub const TRANSPOSITION: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn from_columns(c0: [Complex64; 2], c1: [Complex64; 2]) -> Self {
        Mat2([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn column(&self, col: usize) -> [Complex64; 2] {
        [self.0[0][col], self.0[1][col]]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[0][1].conj()],
            [m[1][0].conj(), m[1][1].conj()],
        ])
    }

    pub fn adjoint(&self) -> Self {
        self.conj().transpose()
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    /// Distance of `self^dagger self` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::IDENTITY)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

/// State `(psi1, psi2)` with `psi_k = u_k + i v_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorState {
    pub psi1: Complex64,
    pub psi2: Complex64,
}

impl SpinorState {
    pub const UP: SpinorState = SpinorState {
        psi1: ONE,
        psi2: ZERO,
    };
    pub const DOWN: SpinorState = SpinorState {
        psi1: ZERO,
        psi2: ONE,
    };

    pub fn new(psi1: Complex64, psi2: Complex64) -> Self {
        Self { psi1, psi2 }
    }

    pub fn from_components(u1: f64, v1: f64, u2: f64, v2: f64) -> Self {
        Self::new(Complex64::new(u1, v1), Complex64::new(u2, v2))
    }

    /// `(u1, v1, u2, v2)`.
    pub fn components(&self) -> [f64; 4] {
        [self.psi1.re, self.psi1.im, self.psi2.re, self.psi2.im]
    }

    pub fn as_array(&self) -> [Complex64; 2] {
        [self.psi1, self.psi2]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi1.norm_sqr() + self.psi2.norm_sqr()
    }

    pub fn norm_error(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    pub fn distance(&self, other: &SpinorState) -> f64 {
        (self.psi1 - other.psi1)
            .norm()
            .max((self.psi2 - other.psi2).norm())
    }
}

/// Propagator of the form `[[psi1, -conj(psi2)], [psi2, conj(psi1)]]`.
///
/// The form is closed under products, complex conjugation and conjugation by
/// [`TRANSPOSITION`], so every operation below stays inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionMatrix {
    psi1: Complex64,
    psi2: Complex64,
}

impl EvolutionMatrix {
    pub const IDENTITY: EvolutionMatrix = EvolutionMatrix {
        psi1: ONE,
        psi2: ZERO,
    };

    /// The propagator whose first column is `state`.
    pub fn from_first_column(state: SpinorState) -> Self {
        Self {
            psi1: state.psi1,
            psi2: state.psi2,
        }
    }

    pub fn first_column(&self) -> SpinorState {
        SpinorState::new(self.psi1, self.psi2)
    }

    pub fn second_column(&self) -> SpinorState {
        SpinorState::new(-self.psi2.conj(), self.psi1.conj())
    }

    pub fn to_mat(&self) -> Mat2 {
        Mat2([
            [self.psi1, -self.psi2.conj()],
            [self.psi2, self.psi1.conj()],
        ])
    }

    pub fn conj(&self) -> Self {
        Self {
            psi1: self.psi1.conj(),
            psi2: self.psi2.conj(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            psi1: self.psi1.conj(),
            psi2: -self.psi2,
        }
    }

    /// `T U T` with `T` the row swap.
    pub fn swap_conjugated(&self) -> Self {
        Self {
            psi1: self.psi1.conj(),
            psi2: -self.psi2.conj(),
        }
    }

    pub fn det(&self) -> f64 {
        self.psi1.norm_sqr() + self.psi2.norm_sqr()
    }
}

impl Mul for EvolutionMatrix {
    type Output = EvolutionMatrix;

    fn mul(self, rhs: EvolutionMatrix) -> EvolutionMatrix {
        // First column of the product is self applied to rhs's first column.
        EvolutionMatrix {
            psi1: self.psi1 * rhs.psi1 - self.psi2.conj() * rhs.psi2,
            psi2: self.psi2 * rhs.psi1 + self.psi1.conj() * rhs.psi2,
        }
    }
}
