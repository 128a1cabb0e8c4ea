//! Serde adapters: big integers are written as decimal strings.

use std::fmt::Display;

use serde::ser::{SerializeSeq, Serializer};

pub(crate) fn text<T: Display, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub(crate) fn text_seq<T: Display, S: Serializer>(xs: &[T], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

/// Rounds to 10 decimal places.
pub(crate) fn ten_places<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64((x * 1e10).round() / 1e10)
}
