//! Balanced-ternary codec: every integer m with |m| <= (3^N - 1)/2 has a
//! unique digit vector (e_0, ..., e_{N-1}) over {-1, 0, 1} with m = sum e_j 3^j.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Error;

/// Fixed-length balanced-ternary digit vector, least significant digit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BtDigits {
    digits: Vec<i8>,
}

impl BtDigits {
    /// Validates entries in {-1, 0, 1}.
    pub fn new(digits: Vec<i8>) -> Result<Self, Error> {
        if let Some(&bad) = digits.iter().find(|d| d.abs() > 1) {
            return Err(Error::InvalidSet(format!(
                "balanced ternary digit {bad} not in {{-1,0,1}}"
            )));
        }
        Ok(BtDigits { digits })
    }

    pub fn digits(&self) -> &[i8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

/// Half-window bound (3^len - 1)/2.
pub fn bt_window(len: usize) -> BigInt {
    (BigInt::from(3).pow(len as u32) - 1) / 2
}

/// Encodes m as exactly `len` balanced-ternary digits.
///
/// Repeated division by 3 with the remainder normalized into {-1, 0, 1}
/// (remainder 2 becomes digit -1 with a carry).
pub fn bt_digits(m: &BigInt, len: usize) -> Result<BtDigits, Error> {
    let bound = bt_window(len);
    if m.abs() > bound {
        return Err(Error::BtOutOfRange {
            value: m.clone(),
            len,
            bound,
        });
    }
    let three = BigInt::from(3);
    let mut digits = Vec::with_capacity(len);
    let mut v = m.clone();
    for _ in 0..len {
        let (mut q, r) = v.div_mod_floor(&three);
        let d = match u8::try_from(&r).expect("mod_floor in 0..3") {
            0 => 0i8,
            1 => 1,
            _ => {
                q += 1;
                -1
            }
        };
        digits.push(d);
        v = q;
    }
    debug_assert!(v.is_zero(), "range check guarantees exhaustion");
    Ok(BtDigits { digits })
}

/// Decodes a digit vector: sum of digits[j]·3^j. Inverse of [`bt_digits`].
pub fn bt_value(d: &BtDigits) -> BigInt {
    let three = BigInt::from(3);
    let mut acc = BigInt::zero();
    for &dj in d.digits.iter().rev() {
        acc = acc * &three + BigInt::from(dj);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc(m: i64, len: usize) -> Vec<i8> {
        bt_digits(&BigInt::from(m), len).unwrap().digits().to_vec()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(enc(0, 4), vec![0, 0, 0, 0]);
        assert_eq!(enc(5, 3), vec![-1, -1, 1]); // -1 - 3 + 9 = 5
        assert_eq!(enc(13, 3), vec![1, 1, 1]); // window maximum at N=3
    }

    #[test]
    fn encode_matches_exhaustive_search_n3() {
        // independent oracle: search all 27 digit vectors for each target
        for m in -13i64..=13 {
            let got = enc(m, 3);
            let mut found = None;
            for a in -1i8..=1 {
                for b in -1i8..=1 {
                    for c in -1i8..=1 {
                        if a as i64 + 3 * b as i64 + 9 * c as i64 == m {
                            assert!(found.is_none(), "duplicate representation of {m}");
                            found = Some(vec![a, b, c]);
                        }
                    }
                }
            }
            assert_eq!(Some(got), found, "m = {m}");
        }
    }

    #[test]
    fn decode_examples() {
        assert_eq!(bt_value(&BtDigits::new(vec![0, 0, 0]).unwrap()), 0.into());
        assert_eq!(bt_value(&BtDigits::new(vec![-1, -1, 1]).unwrap()), 5.into());
        assert_eq!(
            bt_value(&BtDigits::new(vec![1, 1, 1, 1]).unwrap()),
            40.into()
        );
    }

    #[test]
    fn out_of_range_names_the_bound() {
        let err = bt_digits(&BigInt::from(14), 3).unwrap_err();
        match err {
            Error::BtOutOfRange { bound, .. } => assert_eq!(bound, BigInt::from(13)),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_digit() {
        assert!(BtDigits::new(vec![0, 2]).is_err());
    }
}
