//! Arithmetic over the prime field Z_q.
//!
//! Code symbols live in Z_q for a small prime q. When K transmitters each
//! send digits bounded by p - 1, any q with K * (p - 1) <= q - 1 guarantees
//! that digit sums never wrap modulo q, so the modulo-q sum of codewords
//! carries the natural (integer) sum of the transmitted digits. Use
//! [`smallest_valid_q`] to pick the cheapest such field.

use thiserror::Error;

/// Errors from field construction and arithmetic.
#[derive(Error, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldError {
    /// The requested order is not a prime number.
    #[error("field order {0} is not prime")]
    NotPrime(u32),
    /// Two elements from different fields were combined.
    #[error("mixed elements of Z_{0} and Z_{1}")]
    FieldMismatch(u32, u32),
    /// Zero has no multiplicative inverse.
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    /// A raw value lies outside [0, q).
    #[error("value {value} out of range for Z_{order}")]
    ValueOutOfRange { value: u32, order: u32 },
}

/// The prime field Z_q, acting as a context for modular arithmetic.
///
/// The raw-value methods (`add`, `mul`, ...) operate on `u32` residues and
/// are the hot path; [`FieldElement`] wraps them with per-operand field
/// checks for code where mixing fields is a plausible bug.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    order: u32,
}

impl PrimeField {
    /// Creates the field Z_q, rejecting composite or trivial orders.
    pub fn new(order: u32) -> Result<Self, FieldError> {
        if !is_prime(order) {
            return Err(FieldError::NotPrime(order));
        }
        Ok(Self { order })
    }

    /// The field order q.
    pub fn order(self) -> u32 {
        self.order
    }

    /// Wraps a raw value, reducing it modulo q.
    pub fn element(self, value: u32) -> FieldElement {
        FieldElement {
            value: value % self.order,
            field: self,
        }
    }

    /// Checks that a raw residue is in range for this field.
    pub fn check(self, value: u32) -> Result<u32, FieldError> {
        if value < self.order {
            Ok(value)
        } else {
            Err(FieldError::ValueOutOfRange {
                value,
                order: self.order,
            })
        }
    }

    /// (a + b) mod q for residues already in range.
    pub fn add(self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.order && b < self.order);
        let s = a + b;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    /// (a - b) mod q for residues already in range.
    pub fn sub(self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.order && b < self.order);
        if a >= b {
            a - b
        } else {
            a + self.order - b
        }
    }

    /// -a mod q for a residue already in range.
    pub fn neg(self, a: u32) -> u32 {
        debug_assert!(a < self.order);
        if a == 0 {
            0
        } else {
            self.order - a
        }
    }

    /// (a * b) mod q for residues already in range.
    pub fn mul(self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.order && b < self.order);
        ((a as u64 * b as u64) % self.order as u64) as u32
    }

    /// a^e mod q by square and multiply.
    pub fn pow(self, a: u32, mut e: u32) -> u32 {
        debug_assert!(a < self.order);
        let mut base = a as u64;
        let q = self.order as u64;
        let mut acc = 1u64 % q;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        acc as u32
    }

    /// Multiplicative inverse via Fermat's little theorem: a^(q-2) mod q.
    pub fn inv(self, a: u32) -> Result<u32, FieldError> {
        debug_assert!(a < self.order);
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.order - 2))
    }
}

/// An element of Z_q carrying its field, with checked operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldElement {
    value: u32,
    field: PrimeField,
}

impl FieldElement {
    /// The residue in [0, q).
    pub fn value(self) -> u32 {
        self.value
    }

    /// The field this element belongs to.
    pub fn field(self) -> PrimeField {
        self.field
    }

    fn same_field(self, other: Self) -> Result<PrimeField, FieldError> {
        if self.field == other.field {
            Ok(self.field)
        } else {
            Err(FieldError::FieldMismatch(
                self.field.order,
                other.field.order,
            ))
        }
    }

    /// Field addition; fails if the operands belong to different fields.
    pub fn add(self, other: Self) -> Result<Self, FieldError> {
        let field = self.same_field(other)?;
        Ok(Self {
            value: field.add(self.value, other.value),
            field,
        })
    }

    /// Field subtraction; fails if the operands belong to different fields.
    pub fn sub(self, other: Self) -> Result<Self, FieldError> {
        let field = self.same_field(other)?;
        Ok(Self {
            value: field.sub(self.value, other.value),
            field,
        })
    }

    /// Field multiplication; fails if the operands belong to different fields.
    pub fn mul(self, other: Self) -> Result<Self, FieldError> {
        let field = self.same_field(other)?;
        Ok(Self {
            value: field.mul(self.value, other.value),
            field,
        })
    }

    /// Additive inverse.
    pub fn neg(self) -> Self {
        Self {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }

    /// Multiplicative inverse; fails on zero.
    pub fn inv(self) -> Result<Self, FieldError> {
        Ok(Self {
            value: self.field.inv(self.value)?,
            field: self.field,
        })
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime q such that `num_tx` digit sums in base `radix` fit below
/// q, i.e. q - 1 >= num_tx * (radix - 1).
///
/// This is the cheapest field order for which the modulo-q sum of per-digit
/// values equals their natural sum.
pub fn smallest_valid_q(num_tx: u32, radix: u32) -> u32 {
    assert!(num_tx >= 1, "need at least one transmitter");
    assert!(radix >= 2, "digit radix must be at least 2");
    let mut q = num_tx * (radix - 1) + 1;
    while !is_prime(q) {
        q += 1;
    }
    q
}
