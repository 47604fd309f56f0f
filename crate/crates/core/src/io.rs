//! JSON file formats shared with the command-line front end.
//!
//! A state is `{"dim_a": .., "dim_b": .., "re": [[..]], "im": [[..]]}` with
//! row-major `dim x dim` arrays, `dim = dim_a * dim_b`; single systems use
//! `dim_b = 1`. A basis is the same object (dimension fields optional) and a
//! Lüders measurement is a JSON list of such objects. Numbers are written in
//! shortest round-trip form, so a dumped state reloads bit for bit.

use serde::{Deserialize, Serialize};

use crate::coherence::LudersMeasurement;
use crate::error::{Error, Result};
use crate::linalg::{from_parts, to_parts, CMatrix};
use crate::states::{BipartiteState, DensityMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl StateFile {
    pub fn from_matrix(m: &CMatrix, dim_a: usize, dim_b: usize) -> Self {
        let (re, im) = to_parts(m);
        Self { dim_a, dim_b, re, im }
    }

    pub fn from_state(state: &BipartiteState) -> Self {
        Self::from_matrix(state.matrix(), state.d_a(), state.d_b())
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        let m = from_parts(&self.re, &self.im)?;
        if self.dim_a * self.dim_b != m.nrows() {
            return Err(Error::Parse(format!(
                "dim_a * dim_b = {} but the matrix is {}x{}",
                self.dim_a * self.dim_b,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m)
    }

    /// Validated state with the declared factorization.
    pub fn to_state(&self) -> Result<BipartiteState> {
        BipartiteState::new(DensityMatrix::new(self.matrix()?)?, self.dim_a, self.dim_b)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_b: Option<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (re, im) = to_parts(m);
        Self {
            dim_a: None,
            dim_b: None,
            re,
            im,
        }
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        from_parts(&self.re, &self.im)
    }
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.matrix()
}

pub fn parse_measurement(text: &str) -> Result<LudersMeasurement> {
    let files: Vec<MatrixFile> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let projectors = files.iter().map(MatrixFile::matrix).collect::<Result<Vec<_>>>()?;
    LudersMeasurement::new(projectors)
}

pub fn measurement_to_json(measurement: &LudersMeasurement) -> String {
    let files: Vec<MatrixFile> = measurement
        .projectors()
        .iter()
        .map(MatrixFile::from_matrix)
        .collect();
    serde_json::to_string(&files).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_density, werner};
    use proptest::prelude::*;

    #[test]
    fn werner_file_roundtrip() {
        let w = werner(3, -0.37).unwrap();
        let text = StateFile::from_state(&w).to_json();
        let back = StateFile::from_json(&text).unwrap().to_state().unwrap();
        assert_eq!(back.matrix(), w.matrix());
        assert_eq!((back.d_a(), back.d_b()), (3, 3));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(StateFile::from_json("{"), Err(Error::Parse(_))));
        let bad_dims = r#"{"dim_a":2,"dim_b":2,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(StateFile::from_json(bad_dims).unwrap().to_state(), Err(Error::Parse(_))));
        let ragged = r#"{"dim_a":2,"dim_b":1,"re":[[1,0],[0]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(StateFile::from_json(ragged).unwrap().to_state(), Err(Error::Parse(_))));
        let not_state = r#"{"dim_a":2,"dim_b":1,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(
            StateFile::from_json(not_state).unwrap().to_state(),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn measurement_roundtrip() {
        let l = LudersMeasurement::from_block_sizes(&[1, 2]).unwrap();
        let back = parse_measurement(&measurement_to_json(&l)).unwrap();
        assert_eq!(back.projectors(), l.projectors());
        assert!(parse_measurement(r#"[{"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}]"#).is_err());
    }

    proptest! {
        #[test]
        fn dumped_states_reload_bit_exact(seed in any::<u64>(), d in 1usize..5) {
            let rho = random_density(d, d, seed).unwrap();
            let file = StateFile::from_matrix(rho.matrix(), d, 1);
            let back = StateFile::from_json(&file.to_json()).unwrap();
            prop_assert_eq!(back.matrix().unwrap(), rho.matrix().clone());
        }
    }
}
