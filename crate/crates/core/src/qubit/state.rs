//! Two-level states, Bloch vectors and projective measurement in the σ1/σ3 bases.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use super::matrix::{Mat2, C64};
use crate::error::{Error, Result};

/// Tolerance for exact algebraic identities (Hermiticity, trace, PSD).
pub const STATE_TOL: f64 = 1e-12;

/// Bloch lengths at or below this are treated as the chaotic state.
const LAMBDA_ZERO: f64 = 1e-14;

/// A 2×2 Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm_dev = m.max_abs_diff(&m.adjoint());
        if herm_dev > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm_dev:e})"
            )));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let (low, _) = hermitian_eigenvalues(&m);
        if low < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {low:e}"
            )));
        }
        Ok(DensityMatrix(m))
    }

    /// The chaotic state ½I.
    pub fn chaotic() -> Self {
        DensityMatrix(Mat2::identity().scale_real(0.5))
    }

    /// `p·a + (1−p)·b`.
    pub fn mix(p: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        crate::error::check_unit_interval("p", p)?;
        DensityMatrix::new(a.0.scale_real(p) + b.0.scale_real(1.0 - p))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        hermitian_eigenvalues(&self.0)
    }

    /// Tr(σ_j ρ) for j = 1, 2, 3.
    pub fn pauli_expectations(&self) -> [f64; 3] {
        pauli_coefficients(&self.0)
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }
}

/// Closed-form eigenvalues (ascending) of the Hermitian part of a 2×2 matrix.
pub(crate) fn hermitian_eigenvalues(m: &Mat2) -> (f64, f64) {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = 0.5 * (m.get(0, 1) + m.get(1, 0).conj());
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - radius, mean + radius)
}

/// Pauli expansion coefficients Tr(σ_j M), real parts.
pub(crate) fn pauli_coefficients(m: &Mat2) -> [f64; 3] {
    let off = 0.5 * (m.get(0, 1) + m.get(1, 0).conj());
    [
        2.0 * off.re,
        -2.0 * off.im,
        m.get(0, 0).re - m.get(1, 1).re,
    ]
}

/// Bloch parameterization ρ = ½(I + λ(v1σ1 + v2σ2 + v3σ3)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    lambda: f64,
    v: [f64; 3],
}

impl BlochVector {
    pub const CANONICAL_DIRECTION: [f64; 3] = [0.0, 0.0, 1.0];

    /// Validates `lambda ∈ [0, 1]` and `|v| = 1`; a zero length takes the
    /// canonical direction (0, 0, 1) regardless of `v`.
    pub fn new(lambda: f64, v: [f64; 3]) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidBloch(format!("lambda {lambda} outside [0, 1]")));
        }
        if lambda == 0.0 {
            return Ok(BlochVector {
                lambda: 0.0,
                v: Self::CANONICAL_DIRECTION,
            });
        }
        let norm2: f64 = v.iter().map(|c| c * c).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidBloch(format!(
                "direction is not a unit vector (|v|² = {norm2})"
            )));
        }
        Ok(BlochVector { lambda, v })
    }

    /// Builds from the Cartesian vector λv.
    pub fn from_cartesian(r: [f64; 3]) -> Result<Self> {
        let len = r.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !len.is_finite() {
            return Err(Error::InvalidBloch("non-finite component".into()));
        }
        if len <= LAMBDA_ZERO {
            return BlochVector::new(0.0, Self::CANONICAL_DIRECTION);
        }
        // PSD is only enforced to STATE_TOL, so the length may overshoot 1 by about that much.
        if len > 1.0 + 4.0 * STATE_TOL {
            return Err(Error::InvalidBloch(format!("length {len} exceeds 1")));
        }
        Ok(BlochVector {
            lambda: len.min(1.0),
            v: [r[0] / len, r[1] / len, r[2] / len],
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn direction(&self) -> [f64; 3] {
        self.v
    }

    pub fn cartesian(&self) -> [f64; 3] {
        self.v.map(|c| self.lambda * c)
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda={} v=({}, {}, {})",
            self.lambda, self.v[0], self.v[1], self.v[2]
        )
    }
}

pub fn density_from_bloch(b: &BlochVector) -> DensityMatrix {
    let [r1, r2, r3] = b.cartesian();
    let m = Mat2::new([
        [C64::new(0.5 * (1.0 + r3), 0.0), C64::new(0.5 * r1, -0.5 * r2)],
        [C64::new(0.5 * r1, 0.5 * r2), C64::new(0.5 * (1.0 - r3), 0.0)],
    ]);
    DensityMatrix(m)
}

pub fn bloch_from_density(rho: &DensityMatrix) -> BlochVector {
    // A valid density matrix always has |r| ≤ 1 + O(STATE_TOL).
    BlochVector::from_cartesian(rho.pauli_expectations())
        .expect("density matrix invariants bound the Bloch length")
}

/// Bob's four preparations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolPureState {
    Zero,
    One,
    Plus,
    Minus,
}

impl ProtocolPureState {
    pub const ALL: [ProtocolPureState; 4] = [
        ProtocolPureState::Zero,
        ProtocolPureState::One,
        ProtocolPureState::Plus,
        ProtocolPureState::Minus,
    ];

    pub fn ket(self) -> [C64; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            ProtocolPureState::Zero => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            ProtocolPureState::One => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            ProtocolPureState::Plus => [C64::new(h, 0.0), C64::new(h, 0.0)],
            ProtocolPureState::Minus => [C64::new(h, 0.0), C64::new(-h, 0.0)],
        }
    }

    /// Exact projector; the ± states are written as ½[[1, ±1], [±1, 1]].
    pub fn density(self) -> DensityMatrix {
        let m = match self {
            ProtocolPureState::Zero => Mat2::diag(1.0, 0.0),
            ProtocolPureState::One => Mat2::diag(0.0, 1.0),
            ProtocolPureState::Plus => Mat2::from_real([[0.5, 0.5], [0.5, 0.5]]),
            ProtocolPureState::Minus => Mat2::from_real([[0.5, -0.5], [-0.5, 0.5]]),
        };
        DensityMatrix(m)
    }

    /// The measurement whose eigenbasis contains this state.
    pub fn basis(self) -> MeasurementBasis {
        match self {
            ProtocolPureState::Zero | ProtocolPureState::One => MeasurementBasis::Sigma3,
            ProtocolPureState::Plus | ProtocolPureState::Minus => MeasurementBasis::Sigma1,
        }
    }

    /// Eigenvalue of this state under its own basis.
    pub fn eigen_result(self) -> MeasurementResult {
        match self {
            ProtocolPureState::Zero | ProtocolPureState::Plus => MeasurementResult::Plus,
            ProtocolPureState::One | ProtocolPureState::Minus => MeasurementResult::Minus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolPureState::Zero => "zero",
            ProtocolPureState::One => "one",
            ProtocolPureState::Plus => "plus",
            ProtocolPureState::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasurementBasis {
    Sigma1,
    Sigma3,
}

impl MeasurementBasis {
    pub const ALL: [MeasurementBasis; 2] = [MeasurementBasis::Sigma1, MeasurementBasis::Sigma3];

    pub fn observable(self) -> Mat2 {
        match self {
            MeasurementBasis::Sigma1 => Mat2::pauli_x(),
            MeasurementBasis::Sigma3 => Mat2::pauli_z(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MeasurementBasis::Sigma1 => "sigma1",
            MeasurementBasis::Sigma3 => "sigma3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasurementResult {
    Plus,
    Minus,
}

impl MeasurementResult {
    pub fn value(self) -> i8 {
        match self {
            MeasurementResult::Plus => 1,
            MeasurementResult::Minus => -1,
        }
    }

    /// 1 when the result flips the coded bit, else 0.
    pub fn flip_bit(self) -> u8 {
        match self {
            MeasurementResult::Plus => 0,
            MeasurementResult::Minus => 1,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            MeasurementResult::Plus => MeasurementResult::Minus,
            MeasurementResult::Minus => MeasurementResult::Plus,
        }
    }
}

impl fmt::Display for MeasurementResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasurementResult::Plus => "+1",
            MeasurementResult::Minus => "-1",
        })
    }
}

/// Born rule: Tr(½(I + mσ)ρ).
pub fn measurement_prob(rho: &DensityMatrix, basis: MeasurementBasis, m: MeasurementResult) -> f64 {
    let r = rho.pauli_expectations();
    let expectation = match basis {
        MeasurementBasis::Sigma1 => r[0],
        MeasurementBasis::Sigma3 => r[2],
    };
    (0.5 * (1.0 + f64::from(m.value()) * expectation)).clamp(0.0, 1.0)
}
