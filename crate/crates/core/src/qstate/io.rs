//! JSON representations of states and density matrices.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major.

use serde::{Deserialize, Serialize};

use super::{CMatrix, CVector, DensityMatrix, StateVector, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl From<&StateVector> for StateFile {
    fn from(psi: &StateVector) -> Self {
        Self {
            dims: psi.dims().to_vec(),
            amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<StateFile> for StateVector {
    type Error = Error;

    fn try_from(file: StateFile) -> Result<Self> {
        let v = CVector::from_iterator(
            file.amplitudes.len(),
            file.amplitudes.iter().map(|&[re, im]| C64::new(re, im)),
        );
        StateVector::new(file.dims, v)
    }
}

impl From<&DensityMatrix> for DensityFile {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        Self {
            dims: rho.dims().to_vec(),
            matrix: (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<DensityFile> for DensityMatrix {
    type Error = Error;

    fn try_from(file: DensityFile) -> Result<Self> {
        let n = file.matrix.len();
        if file.matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension("density matrix rows are ragged".into()));
        }
        let m = CMatrix::from_fn(n, n, |r, c| {
            let [re, im] = file.matrix[r][c];
            C64::new(re, im)
        });
        DensityMatrix::new(file.dims, m)
    }
}

impl StateVector {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<StateFile>(text)?.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateFile::from(self)).expect("state serialization")
    }
}

impl DensityMatrix {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<DensityFile>(text)?.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DensityFile::from(self)).expect("density serialization")
    }
}
