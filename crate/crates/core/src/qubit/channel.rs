//! Quantum operations in Kraus form and the builtin example channels.

use serde::{Deserialize, Serialize};

use super::matrix::{Mat2, C64};
use super::state::{bloch_from_density, BlochVector, DensityMatrix};
use crate::error::{check_unit_interval, Error, Result};

/// Completeness tolerance on ‖Σ E†E − I‖_F.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Kraus operators with Frobenius norm below this are dropped on construction.
pub const NEGLIGIBLE_OPERATOR: f64 = 1e-14;

/// A single-qubit quantum operation ρ ↦ Σ E_i ρ E_i†.
///
/// Construction only checks shape and finiteness; completeness is reported by
/// [`validate_channel`] and enforced by [`apply_channel`].
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    label: String,
    operators: Vec<Mat2>,
}

impl KrausChannel {
    pub fn new(label: impl Into<String>, operators: Vec<Mat2>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        if let Some(i) = operators.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidChannel(format!("operator {i} has a non-finite entry")));
        }
        let mut kept: Vec<Mat2> = operators
            .iter()
            .copied()
            .filter(|e| e.frobenius_norm() >= NEGLIGIBLE_OPERATOR)
            .collect();
        if kept.is_empty() {
            kept.push(operators[0]);
        }
        Ok(KrausChannel {
            label: label.into(),
            operators: kept,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn operators(&self) -> &[Mat2] {
        &self.operators
    }

    /// Σ E_i ρ E_i† without any validation.
    pub fn act_raw(&self, rho: &Mat2) -> Mat2 {
        self.operators.iter().map(|e| e.sandwich(rho)).sum()
    }

    pub fn completeness_deviation(&self) -> f64 {
        let sum: Mat2 = self.operators.iter().map(|e| e.adjoint() * *e).sum();
        (sum - Mat2::identity()).frobenius_norm()
    }

    /// Parses the JSON channel document
    /// `{"label": ..., "operators": [[[[re, im], [re, im]], [[re, im], [re, im]]], ...]}`.
    pub fn from_json(text: &str) -> std::result::Result<Result<Self>, serde_json::Error> {
        let file: ChannelFile = serde_json::from_str(text)?;
        Ok(file.into_channel())
    }

    pub fn to_json(&self) -> String {
        let file = ChannelFile {
            label: self.label.clone(),
            operators: self
                .operators
                .iter()
                .map(|m| m.0.map(|row| row.map(|z| [z.re, z.im])))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("channel serializes")
    }
}

/// On-disk channel representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub label: String,
    pub operators: Vec<[[[f64; 2]; 2]; 2]>,
}

impl ChannelFile {
    pub fn into_channel(self) -> Result<KrausChannel> {
        let ops = self
            .operators
            .iter()
            .map(|m| Mat2::new(m.map(|row| row.map(|[re, im]| C64::new(re, im)))))
            .collect();
        KrausChannel::new(self.label, ops)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// ‖Σ E_i†E_i − I‖_F
    pub deviation: f64,
    pub passed: bool,
    /// Raw image of ½I (not renormalized).
    pub chaotic_image_matrix: Mat2,
    /// Bloch form of the chaotic-state image, when that image is a valid state.
    pub chaotic_image: Option<BlochVector>,
    pub unital: bool,
}

pub fn validate_channel(ch: &KrausChannel) -> ValidationReport {
    let deviation = ch.completeness_deviation();
    let half = Mat2::identity().scale_real(0.5);
    let image = ch.act_raw(&half);
    let chaotic_image = DensityMatrix::new(image).ok().map(|rho| bloch_from_density(&rho));
    ValidationReport {
        deviation,
        passed: deviation <= COMPLETENESS_TOL,
        chaotic_image_matrix: image,
        chaotic_image,
        unital: (image - half).frobenius_norm() <= COMPLETENESS_TOL,
    }
}

/// ℰ(ρ) = Σ E_i ρ E_i†.
///
/// The output is projected onto its Hermitian part and rescaled to unit trace,
/// absorbing the rounding allowed by [`COMPLETENESS_TOL`].
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let deviation = ch.completeness_deviation();
    if deviation > COMPLETENESS_TOL {
        return Err(Error::IncompleteChannel {
            label: ch.label.clone(),
            deviation,
        });
    }
    let out = ch.act_raw(rho.matrix()).hermitian_part();
    let tr = out.trace().re;
    let out = if tr == 1.0 { out } else { out.scale_real(1.0 / tr) };
    DensityMatrix::new(out)
}

pub fn identity_channel() -> KrausChannel {
    KrausChannel {
        label: "identity".into(),
        operators: vec![Mat2::identity()],
    }
}

/// The amplitude-damping family ℰx: E0 = diag(1, √(1−x)), E1 = √x |0⟩⟨1|.
///
/// x = 0 is the identity and x = 1 sends every state to |0⟩⟨0|.
pub fn seal_example_channel(x: f64) -> Result<KrausChannel> {
    check_unit_interval("x", x)?;
    let e0 = Mat2::diag(1.0, (1.0 - x).sqrt());
    let e1 = Mat2::from_real([[0.0, x.sqrt()], [0.0, 0.0]]);
    KrausChannel::new(format!("seal({x})"), vec![e0, e1])
}

/// ρ ↦ (1−p)ρ + (p/2)I.
pub fn depolarizing_channel(p: f64) -> Result<KrausChannel> {
    check_unit_interval("p", p)?;
    let a = (1.0 - 0.75 * p).sqrt();
    let b = (0.25 * p).sqrt();
    KrausChannel::new(
        format!("depolarizing({p})"),
        vec![
            Mat2::identity().scale_real(a),
            Mat2::pauli_x().scale_real(b),
            Mat2::pauli_y().scale_real(b),
            Mat2::pauli_z().scale_real(b),
        ],
    )
}

/// Complete dephasing in the σ3 basis: off-diagonal entries are zeroed.
pub fn dephasing_channel() -> KrausChannel {
    KrausChannel {
        label: "dephasing".into(),
        operators: vec![Mat2::diag(1.0, 0.0), Mat2::diag(0.0, 1.0)],
    }
}
