//! Finitely supported real sequences, indexed from 1 in the mathematical
//! sense and from 0 in storage. Entries past the stored length are zero.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Seq {
    values: Vec<Scalar>,
}

impl Seq {
    pub fn new(values: Vec<Scalar>) -> Self {
        Seq { values }
    }

    pub fn zeros(len: usize) -> Self {
        Seq::new(vec![Scalar::zero(); len])
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Seq::new(values.iter().map(|&v| Scalar::int(v)).collect())
    }

    pub fn from_f64s(values: &[f64]) -> Self {
        Seq::new(values.iter().map(|&v| Scalar::float(v)).collect())
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry at zero-based index `i`; zero past the end.
    pub fn get(&self, i: usize) -> Scalar {
        self.values.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Exact only if every entry is exact.
    pub fn mode(&self) -> Mode {
        if self.values.iter().all(Scalar::is_exact) {
            Mode::Exact
        } else {
            Mode::Float
        }
    }

    pub fn in_mode(&self, mode: Mode) -> Seq {
        Seq::new(self.values.iter().map(|v| v.in_mode(mode)).collect())
    }

    /// One past the last nonzero entry.
    pub fn support_len(&self) -> usize {
        self.values
            .iter()
            .rposition(|v| !v.is_zero())
            .map_or(0, |i| i + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.support_len() == 0
    }

    pub fn padded(&self, len: usize) -> Seq {
        let mut values = self.values.clone();
        if values.len() < len {
            values.resize(len, Scalar::zero());
        }
        Seq::new(values)
    }

    /// Keeps the first `n` entries, zeroing the rest (length is preserved).
    pub fn truncate_to(&self, n: usize) -> Seq {
        Seq::new(
            self.values
                .iter()
                .enumerate()
                .map(|(i, v)| if i < n { v.clone() } else { Scalar::zero() })
                .collect(),
        )
    }

    pub fn abs(&self) -> Seq {
        Seq::new(self.values.iter().map(Scalar::abs).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Seq {
        Seq::new(self.values.iter().map(|v| v * c).collect())
    }

    /// Nonincreasing rearrangement of the absolute values; same length.
    pub fn rearrange(&self) -> Seq {
        let mut values: Vec<Scalar> = self.values.iter().map(Scalar::abs).collect();
        values.sort_by(|a, b| b.partial_cmp(a).expect("comparable scalars"));
        Seq::new(values)
    }

    pub fn is_nonincreasing_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
            && self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// `Σ_{n≤m} x*_n` for `m ≥ 1`.
    pub fn head_sum(&self, m: usize) -> Scalar {
        self.rearrange().values.iter().take(m).sum()
    }

    /// `Σ_{n≤m} (x*_n)^q`.
    pub fn head_power_sum(&self, q: &Scalar, m: usize) -> Result<Scalar> {
        let r = self.rearrange();
        r.values.iter().take(m).map(|v| v.pow(q)).sum()
    }

    /// `Σ_{n≥m} (x*_n)^q`, with `m` one-based.
    pub fn tail_power_sum(&self, q: &Scalar, m: usize) -> Result<Scalar> {
        let r = self.rearrange();
        r.values
            .iter()
            .skip(m.saturating_sub(1))
            .map(|v| v.pow(q))
            .sum()
    }

    /// All partial sums `Σ_{n≤m}` of a slice, `m = 1..=len`.
    pub(crate) fn prefix_sums(values: &[Scalar]) -> Vec<Scalar> {
        let mut acc = Scalar::zero();
        values
            .iter()
            .map(|v| {
                acc = &acc + v;
                acc.clone()
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("sequence serializes")
    }
}

impl std::iter::FromIterator<Scalar> for Seq {
    fn from_iter<I: IntoIterator<Item = Scalar>>(iter: I) -> Self {
        Seq::new(iter.into_iter().collect())
    }
}

#[derive(Serialize, Deserialize)]
struct SeqJson {
    mode: String,
    values: Vec<serde_json::Value>,
}

impl Serialize for Seq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let json = match self.mode() {
            Mode::Exact => SeqJson {
                mode: "rational".into(),
                values: self.values.iter().map(|v| v.to_string().into()).collect(),
            },
            Mode::Float => SeqJson {
                mode: "float".into(),
                values: self.values.iter().map(|v| v.to_f64().into()).collect(),
            },
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Seq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = SeqJson::deserialize(deserializer)?;
        let parse = |v: &serde_json::Value| -> Result<Scalar> {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(Error::Parse(format!("bad sequence entry {other}"))),
            };
            match json.mode.as_str() {
                "rational" => Scalar::parse_exact(&text),
                "float" => Scalar::parse_float(&text),
                m => Err(Error::Parse(format!("unknown mode {m:?}"))),
            }
        };
        json.values
            .iter()
            .map(parse)
            .collect::<Result<Vec<_>>>()
            .map(Seq::new)
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rearrange_examples() {
        assert_eq!(Seq::from_ints(&[0, 2, -1]).rearrange(), Seq::from_ints(&[2, 1, 0]));
        assert_eq!(Seq::from_ints(&[5]).rearrange(), Seq::from_ints(&[5]));
        assert_eq!(
            Seq::from_ints(&[1, 3, 2, 3]).rearrange(),
            Seq::from_ints(&[3, 3, 2, 1])
        );
    }

    #[test]
    fn partial_sum_examples() {
        let two = Scalar::int(2);
        assert_eq!(Seq::from_ints(&[1, 1]).head_power_sum(&two, 2).unwrap(), Scalar::int(2));
        assert_eq!(Seq::from_ints(&[2, 1]).tail_power_sum(&two, 2).unwrap(), Scalar::int(1));
        assert_eq!(Seq::from_ints(&[3, 1, 2]).head_sum(2), Scalar::int(5));
    }

    #[test]
    fn exact_mode_rejects_fractional_power() {
        let q = Scalar::ratio(3, 2);
        assert!(matches!(
            Seq::from_ints(&[1]).head_power_sum(&q, 1),
            Err(Error::ArithmeticModeMismatch(_))
        ));
    }

    #[test]
    fn json_round_trip_both_modes() {
        let exact = Seq::new(vec![Scalar::ratio(3, 2), Scalar::int(-1)]);
        let text = serde_json::to_string(&exact).unwrap();
        assert_eq!(text, r#"{"mode":"rational","values":["3/2","-1"]}"#);
        assert_eq!(serde_json::from_str::<Seq>(&text).unwrap(), exact);

        let float = Seq::from_f64s(&[1.5, 0.25]);
        let text = serde_json::to_string(&float).unwrap();
        assert_eq!(serde_json::from_str::<Seq>(&text).unwrap(), float);

        assert!(serde_json::from_str::<Seq>(r#"{"mode":"odd","values":[1]}"#).is_err());
    }

    #[test]
    fn support_ignores_trailing_zeros() {
        assert_eq!(Seq::from_ints(&[0, 3, 0, 0]).support_len(), 2);
        assert!(Seq::from_ints(&[0, 0]).is_zero());
    }
}
