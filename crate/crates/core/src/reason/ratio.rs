//! `{"num": n, "den": d}` encoding for exact confidences.

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Frac {
    num: u64,
    den: u64,
}

pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    Frac { num: *r.numer(), den: *r.denom() }.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
    let f = Frac::deserialize(d)?;
    if f.den == 0 {
        return Err(serde::de::Error::custom("zero denominator"));
    }
    Ok(Ratio::new(f.num, f.den))
}
