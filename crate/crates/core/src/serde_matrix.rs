//! JSON encoding of complex matrices: row-major nested arrays whose leaves
//! are `[re, im]` pairs.
//!
//! ```json
//! [[[1.0, 0.0], [0.0, 0.0]],
//!  [[0.0, 0.0], [0.0, -1.0]]]
//! ```

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{ComplexMatrix, C64};

type Rows = Vec<Vec<[f64; 2]>>;

pub fn to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn from_rows(rows: &Rows) -> Result<ComplexMatrix, String> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err("matrix has no rows".into());
    }
    let ncols = rows[0].len();
    if ncols == 0 {
        return Err("matrix has no columns".into());
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(format!("row {bad} has {} entries, expected {ncols}", rows[bad].len()));
    }
    if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err("non-finite matrix entry".into());
    }
    Ok(ComplexMatrix::from_fn(nrows, ncols, |r, c| {
        C64::new(rows[r][c][0], rows[r][c][1])
    }))
}

pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
    to_rows(m).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
    let rows = Rows::deserialize(d)?;
    from_rows(&rows).map_err(D::Error::custom)
}

/// Same encoding for a list of matrices.
pub mod list {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[ComplexMatrix], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ComplexMatrix>, D::Error> {
        let lists = Vec::<Rows>::deserialize(d)?;
        lists
            .iter()
            .enumerate()
            .map(|(k, rows)| from_rows(rows).map_err(|e| D::Error::custom(format!("operator {k}: {e}"))))
            .collect()
    }
}

/// Complex scalars as `[re, im]`.
pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

pub mod scalar_list {
    use super::*;

    pub fn serialize<S: Serializer>(zs: &[C64], s: S) -> Result<S::Ok, S::Error> {
        zs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?
            .into_iter()
            .map(|[re, im]| C64::new(re, im))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Wrap {
        #[serde(with = "crate::serde_matrix")]
        m: ComplexMatrix,
    }

    #[test]
    fn row_major_layout() {
        let m = ComplexMatrix::from_row_slice(
            1,
            2,
            &[C64::new(1.0, 2.0), C64::new(3.0, -4.0)],
        );
        let json = serde_json::to_string(&Wrap { m: m.clone() }).unwrap();
        assert_eq!(json, r#"{"m":[[[1.0,2.0],[3.0,-4.0]]]}"#);
        let back: Wrap = serde_json::from_str(&json).unwrap();
        assert_eq!(back.m, m);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = serde_json::from_str::<Wrap>(r#"{"m":[[[1,0],[0,0]],[[1,0]]]}"#).unwrap_err();
        assert!(err.to_string().contains("row 1"));
    }
}
