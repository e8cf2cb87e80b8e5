//! Laurent polynomials (integer coefficients, negative exponents allowed) and
//! the expanded triadic product whose closed form is the all-ones window.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;

/// Upper guard for [`euler_product`]: 3^N coefficients must stay at desk scale.
pub const EULER_PRODUCT_MAX_N: u32 = 20;

/// A Laurent polynomial stored densely from its lowest exponent.
///
/// Canonical form: first and last stored coefficients are nonzero, except the
/// zero polynomial which stores nothing and has offset 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    offset: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn new(mut offset: i64, mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead_zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            coeffs.drain(..lead_zeros);
            offset += lead_zeros as i64;
        }
        if coeffs.is_empty() {
            offset = 0;
        }
        LaurentPoly { offset, coeffs }
    }

    pub fn zero() -> Self {
        LaurentPoly {
            offset: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        LaurentPoly {
            offset: 0,
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.offset)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.offset + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff_at(&self, exp: i64) -> BigInt {
        if exp < self.offset {
            return BigInt::zero();
        }
        self.coeffs
            .get((exp - self.offset) as usize)
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn mul(&self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentPoly::new(self.offset + rhs.offset, out)
    }
}

/// Expands the product of the N trinomials x^(-3^k) + 1 + x^(3^k), k < N.
///
/// The product is computed directly (no closed form), so the all-ones window
/// on [-(3^N-1)/2, (3^N-1)/2] is a testable postcondition rather than an
/// assumption.
pub fn euler_product(n: u32) -> Result<LaurentPoly, Error> {
    if n < 1 || n > EULER_PRODUCT_MAX_N {
        return Err(Error::WindowGuard {
            n,
            max: EULER_PRODUCT_MAX_N,
        });
    }
    let mut acc = LaurentPoly::one();
    let mut pow3: i64 = 1; // 3^k, fits i64 for k < 20
    for _ in 0..n {
        let mut coeffs = vec![BigInt::zero(); (2 * pow3 + 1) as usize];
        coeffs[0] = BigInt::one();
        coeffs[pow3 as usize] = BigInt::one();
        coeffs[(2 * pow3) as usize] = BigInt::one();
        let factor = LaurentPoly::new(-pow3, coeffs);
        acc = acc.mul(&factor);
        pow3 *= 3;
    }
    Ok(acc)
}
