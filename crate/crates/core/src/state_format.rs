//! Serialized question-and-answer states:
//! `{"j":0.5,"dir":[0,0,1],"h":0.5,"amplitudes":[[0,0],[1,0]]}`.
//!
//! Integer-valued numbers are written without a fractional part; all other
//! numbers use the shortest representation that parses back to the same
//! bits.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexVector};
use crate::spin::{Direction, HalfInt, QuestionAnswerState, SpinSystem};

/// Compact JSON that writes `1.0` as `1` and keeps `-0.0` distinct.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompactNumbers;

impl Formatter for CompactNumbers {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.fract() == 0.0 && value.abs() < 1e15 && !(value == 0.0 && value.is_sign_negative()) {
            write!(writer, "{}", value as i64)
        } else {
            // The default rendering is already the shortest round-trip form.
            serde_json::ser::CompactFormatter.write_f64(writer, value)
        }
    }
}

pub fn to_compact_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CompactNumbers);
    value.serialize(&mut ser).map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Serialization(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub j: f64,
    pub dir: [f64; 3],
    pub h: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateRecord {
    pub fn from_state(s: &QuestionAnswerState) -> Self {
        Self {
            j: s.system.j().value(),
            dir: s.direction.components(),
            h: s.answer.value(),
            amplitudes: s.ket.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn into_state(self) -> Result<QuestionAnswerState> {
        let system = SpinSystem::from_f64(self.j)?;
        let direction = Direction::new(self.dir[0], self.dir[1], self.dir[2])?;
        let answer = HalfInt::from_f64(self.h)?;
        system.index_of(answer)?;
        if self.amplitudes.len() != system.dim() {
            return Err(Error::DimensionMismatch { expected: system.dim(), found: self.amplitudes.len() });
        }
        let ket = ComplexVector::new(self.amplitudes.iter().map(|[re, im]| c(*re, *im)).collect())?;
        if !ket.is_unit() {
            return Err(Error::NotUnit { norm: ket.norm() });
        }
        Ok(QuestionAnswerState { system, direction, answer, ket })
    }
}

fn check_format(format: &str) -> Result<()> {
    if format == "json" {
        Ok(())
    } else {
        Err(Error::UnsupportedFormat(format.to_string()))
    }
}

pub fn emit_state(format: &str, s: &QuestionAnswerState) -> Result<String> {
    check_format(format)?;
    to_compact_string(&StateRecord::from_state(s))
}

pub fn parse_state(format: &str, text: &str) -> Result<QuestionAnswerState> {
    check_format(format)?;
    let record: StateRecord = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
    record.into_state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spin_half_up_example() {
        let sys = SpinSystem::from_f64(0.5).unwrap();
        let s = spin::eigenstate_recursion(&sys, &Direction::Z, HalfInt::from_twice(1)).unwrap();
        assert_eq!(
            emit_state("json", &s).unwrap(),
            r#"{"j":0.5,"dir":[0,0,1],"h":0.5,"amplitudes":[[0,0],[1,0]]}"#
        );
    }

    #[test]
    fn negative_zero_survives() {
        assert_eq!(to_compact_string(&[-0.0f64, 0.0, 2.5, -3.0, 1e20]).unwrap(), "[-0.0,0,2.5,-3,1e+20]");
    }

    #[test]
    fn random_states_round_trip_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sys = SpinSystem::from_f64(1.0).unwrap();
        for _ in 0..50 {
            let a = Direction::random(&mut rng);
            for h in sys.m_values() {
                let s = spin::eigenstate_recursion(&sys, &a, h).unwrap();
                let text = emit_state("json", &s).unwrap();
                let back = parse_state("json", &text).unwrap();
                assert_eq!(back, s);
                assert!((back.ket.norm() - 1.0).abs() <= 1e-12);
                for (x, y) in back.ket.amplitudes().iter().zip(s.ket.amplitudes()) {
                    assert_eq!(x.re.to_bits(), y.re.to_bits());
                    assert_eq!(x.im.to_bits(), y.im.to_bits());
                }
            }
        }
    }

    #[test]
    fn format_and_schema_errors() {
        let sys = SpinSystem::from_f64(0.5).unwrap();
        let s = spin::eigenstate_recursion(&sys, &Direction::Z, HalfInt::from_twice(1)).unwrap();
        assert!(matches!(emit_state("yaml", &s), Err(Error::UnsupportedFormat(_))));
        assert!(parse_state("json", r#"{"j":0.5,"dir":[0,0,1],"h":1.5,"amplitudes":[[0,0],[1,0]]}"#).is_err());
        assert!(parse_state("json", r#"{"j":0.5,"dir":[0,0,2],"h":0.5,"amplitudes":[[0,0],[1,0]]}"#).is_err());
        assert!(parse_state("json", r#"{"j":0.5,"dir":[0,0,1],"h":0.5,"amplitudes":[[1,0]]}"#).is_err());
        assert!(parse_state("json", r#"{"j":0.5,"dir":[0,0,1],"h":0.5,"amplitudes":[[1,0],[1,0]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn compact_floats_parse_back_bit_exact(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let text = to_compact_string(&x).unwrap();
            let back: f64 = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
