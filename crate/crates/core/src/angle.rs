//! Parsing of angles written as plain numbers or multiples of `pi`
//! (`pi`, `-pi/2`, `3pi/4`, `0.25*pi`).

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};

use crate::error::{Error, Result};

pub fn parse_angle(text: &str) -> Result<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("cannot parse angle `{text}`"));
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let coeff = s[..pos].trim_end_matches('*');
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &s[pos + 2..];
    let divisor = match rest {
        "" => 1.0,
        r => r
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?,
    };
    Ok(coeff * PI / divisor)
}

/// Serde helper accepting either a number or a `pi` expression.
pub fn deserialize_angle<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    struct AngleVisitor;
    impl<'de> Visitor<'de> for AngleVisitor {
        type Value = f64;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an angle in radians or an expression such as \"3pi/4\"")
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<f64, E> {
            Ok(v)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<f64, E> {
            parse_angle(v).map_err(E::custom)
        }
    }
    d.deserialize_any(AngleVisitor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.25*pi").unwrap(), 0.25 * PI);
        assert_eq!(parse_angle(" 1.5 ").unwrap(), 1.5);
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        for bad in ["pie", "pi/0", "x", "2pi/", ""] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }
}
