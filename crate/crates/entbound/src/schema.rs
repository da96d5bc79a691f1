//! On-disk JSON representation of dephasing instances and the CSV layout of
//! sweep outputs.

use serde::{Deserialize, Serialize};

use crate::dynamics::DephasingModel;
use crate::error::{Error, Result};
use crate::linalg::{CMat, DensityMatrix};
use num_complex::Complex64;

pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the sweep CSV emitted by the command-line tool.
pub const SWEEP_CSV_HEADER: &str =
    "s,T_over_Lambda,alpha,Lambda_t,B_vac,B_th,B,raw_bound,clamped_bound";

/// Complex matrix as parallel nested arrays of real and imaginary parts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrix {
    pub fn from_mat(m: &CMat) -> Self {
        let (r, c) = m.dim();
        Self {
            re: (0..r).map(|i| (0..c).map(|j| m[[i, j]].re).collect()).collect(),
            im: (0..r).map(|i| (0..c).map(|j| m[[i, j]].im).collect()).collect(),
        }
    }

    /// Convert to a dense matrix, enforcing a square shape of size `dim`.
    pub fn to_mat(&self, dim: usize, what: &str) -> Result<CMat> {
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != dim || part.iter().any(|row| row.len() != dim) {
                return Err(Error::Schema(format!(
                    "{what}.{name} must be a {dim}x{dim} array"
                )));
            }
        }
        Ok(CMat::from_shape_fn((dim, dim), |(i, j)| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

/// Serialized dephasing instance: model, initial product state, and the time
/// grid to evaluate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[allow(non_snake_case)] // field names mirror the on-disk JSON keys
pub struct InstanceFile {
    pub schema_version: u32,
    pub d_S: usize,
    pub d_E: usize,
    pub pointer_energies: Vec<f64>,
    pub H_E: ComplexMatrix,
    pub V: Vec<ComplexMatrix>,
    pub rho_S: ComplexMatrix,
    pub rho_E: ComplexMatrix,
    pub times: Vec<f64>,
}

impl InstanceFile {
    pub fn from_parts(
        model: &DephasingModel,
        rho_s: &DensityMatrix,
        rho_e: &DensityMatrix,
        times: Vec<f64>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            d_S: model.d_s(),
            d_E: model.d_e(),
            pointer_energies: model.pointer_energies().to_vec(),
            H_E: ComplexMatrix::from_mat(model.env_hamiltonian()),
            V: model.couplings().iter().map(ComplexMatrix::from_mat).collect(),
            rho_S: ComplexMatrix::from_mat(rho_s.mat()),
            rho_E: ComplexMatrix::from_mat(rho_e.mat()),
            times,
        }
    }

    /// Validate and convert into in-memory objects. State and operator
    /// validity checks (Hermiticity, positivity, unit trace) are surfaced as
    /// schema errors since the file is the source of the violation.
    pub fn into_parts(self) -> Result<(DephasingModel, DensityMatrix, DensityMatrix, Vec<f64>)> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.d_S == 0 || self.d_E == 0 {
            return Err(Error::Schema("d_S and d_E must be positive".into()));
        }
        if self.pointer_energies.len() != self.d_S {
            return Err(Error::Schema(format!(
                "pointer_energies has {} entries for d_S = {}",
                self.pointer_energies.len(),
                self.d_S
            )));
        }
        if self.V.len() != self.d_S {
            return Err(Error::Schema(format!(
                "V has {} entries for d_S = {}",
                self.V.len(),
                self.d_S
            )));
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Schema("times must be finite and nonnegative".into()));
        }
        let h_e = self.H_E.to_mat(self.d_E, "H_E")?;
        let couplings: Vec<CMat> = self
            .V
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_mat(self.d_E, &format!("V[{i}]")))
            .collect::<Result<_>>()?;
        let model = DephasingModel::new(self.pointer_energies, h_e, couplings)
            .map_err(|e| Error::Schema(format!("invalid model: {e}")))?;
        let rho_s = DensityMatrix::from_matrix(self.rho_S.to_mat(self.d_S, "rho_S")?)
            .map_err(|e| Error::Schema(format!("invalid rho_S: {e}")))?;
        let rho_e = DensityMatrix::from_matrix(self.rho_E.to_mat(self.d_E, "rho_E")?)
            .map_err(|e| Error::Schema(format!("invalid rho_E: {e}")))?;
        Ok((model, rho_s, rho_e, self.times))
    }
}

/// Parse an instance from JSON text.
pub fn parse_instance(json: &str) -> Result<InstanceFile> {
    serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))
}

/// Serialize an instance to pretty JSON.
pub fn instance_to_json(file: &InstanceFile) -> Result<String> {
    serde_json::to_string_pretty(file).map_err(|e| Error::Schema(e.to_string()))
}
