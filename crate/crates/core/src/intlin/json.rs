use std::str::FromStr;

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::matrix::{Int, IntMatrix};

/// Exact decimal JSON number for an arbitrary-precision integer.
pub fn int_to_json(v: &Int) -> Value {
    Value::Number(serde_json::Number::from_str(&v.to_string()).expect("integer literal is valid JSON"))
}

pub fn int_from_json(v: &Value) -> Result<Int, String> {
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            Int::from_str(&s).map_err(|_| format!("not an integer: {s}"))
        }
        Value::String(s) => Int::from_str(s.trim()).map_err(|_| format!("not an integer: {s:?}")),
        other => Err(format!("expected an integer, found {other}")),
    }
}

pub fn ints_to_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

pub fn ints_from_json(v: &Value) -> Result<Vec<Int>, String> {
    match v {
        Value::Array(items) => items.iter().map(int_from_json).collect(),
        other => Err(format!("expected an integer array, found {other}")),
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Value> = (0..self.rows()).map(|i| ints_to_json(self.row(i))).collect();
        let mut st = serializer.serialize_struct("Matrix", 3)?;
        st.serialize_field("rows", &self.rows())?;
        st.serialize_field("cols", &self.cols())?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Value>>,
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(deserializer)?;
        if raw.entries.len() != raw.rows {
            return Err(D::Error::custom(format!("expected {} rows, found {}", raw.rows, raw.entries.len())));
        }
        let mut data = Vec::with_capacity(raw.rows * raw.cols);
        for (i, row) in raw.entries.iter().enumerate() {
            if row.len() != raw.cols {
                return Err(D::Error::custom(format!("row {i} has {} entries, expected {}", row.len(), raw.cols)));
            }
            for v in row {
                data.push(int_from_json(v).map_err(D::Error::custom)?);
            }
        }
        IntMatrix::from_vec(raw.rows, raw.cols, data).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_big_entries() {
        let big = Int::from_str("123456789012345678901234567890").unwrap();
        let m = IntMatrix::from_vec(1, 2, vec![big.clone(), -big]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("123456789012345678901234567890"));
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(serde_json::from_str::<IntMatrix>(r#"{"rows":2,"cols":1,"entries":[[1]]}"#).is_err());
        assert!(serde_json::from_str::<IntMatrix>(r#"{"rows":1,"cols":1,"entries":[[1.5]]}"#).is_err());
        let m: IntMatrix = serde_json::from_str(r#"{"rows":1,"cols":2,"entries":[[3,-4]]}"#).unwrap();
        assert_eq!(m, IntMatrix::from_rows(&[[3, -4]]));
    }
}
