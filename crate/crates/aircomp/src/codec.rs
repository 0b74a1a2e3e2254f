//! Base-p digit packing of application integers.
//!
//! Each transmitter's integers are decomposed into fixed-length, most
//! significant digit first vectors before encoding. On the receive side the
//! same positional weights recompose digit vectors whose entries may exceed
//! the radix, which is exactly what happens when digit-wise sums of several
//! transmitters are recomposed into the sum of their integers.

use thiserror::Error;

/// Errors from digit packing and unpacking.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CodecError {
    /// The value does not fit in the requested number of digits.
    #[error("value {value} needs more than {len} base-{radix} digits")]
    ValueTooLarge { value: u64, radix: u64, len: usize },
    /// The radix must be at least 2.
    #[error("radix {0} is not a valid digit base")]
    BadRadix(u64),
    /// Digit vectors of mismatched shape were combined.
    #[error("digit vectors have mismatched length or radix")]
    ShapeMismatch,
    /// A digit block cannot be split into whole values.
    #[error("block of {block} digits is not a multiple of {digits_per_value}")]
    UnevenBlock { block: usize, digits_per_value: usize },
    /// The values do not fill the requested block exactly.
    #[error("{values} values of {digits_per_value} digits do not fill a block of {block}")]
    BlockSizeMismatch {
        values: usize,
        digits_per_value: usize,
        block: usize,
    },
    /// A composed value overflows u64.
    #[error("composed value overflows u64")]
    Overflow,
}

/// A fixed-radix digit vector, most significant digit first.
///
/// Transmit-side vectors hold digits below the radix; receive-side vectors
/// may hold larger entries (sums of several transmitters' digits) and
/// recompose with the same positional weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitVector {
    digits: Vec<u64>,
    radix: u64,
}

impl DigitVector {
    /// Wraps existing digits without bounding them by the radix.
    pub fn from_digits(digits: Vec<u64>, radix: u64) -> Result<Self, CodecError> {
        if radix < 2 {
            return Err(CodecError::BadRadix(radix));
        }
        Ok(Self { digits, radix })
    }

    /// The digits, most significant first.
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// The positional base.
    pub fn radix(&self) -> u64 {
        self.radix
    }

    /// Number of digits.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    /// Whether the vector holds no digits.
    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Recomposes the integer sum(digit[i] * radix^(len-1-i)).
    ///
    /// Digits are not reduced modulo the radix, so composing a digit-wise
    /// sum of vectors yields the sum of their composed values.
    pub fn compose(&self) -> Result<u64, CodecError> {
        let mut acc: u64 = 0;
        for &d in &self.digits {
            acc = acc
                .checked_mul(self.radix)
                .and_then(|v| v.checked_add(d))
                .ok_or(CodecError::Overflow)?;
        }
        Ok(acc)
    }

    /// Digit-wise natural addition; shapes must match.
    pub fn add(&self, other: &Self) -> Result<Self, CodecError> {
        if self.radix != other.radix || self.digits.len() != other.digits.len() {
            return Err(CodecError::ShapeMismatch);
        }
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| a.checked_add(b).ok_or(CodecError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            digits,
            radix: self.radix,
        })
    }
}

/// Decomposes `value` into exactly `len` base-`radix` digits, most
/// significant first. Fails if the value needs more digits.
pub fn decompose(value: u64, radix: u64, len: usize) -> Result<DigitVector, CodecError> {
    if radix < 2 {
        return Err(CodecError::BadRadix(radix));
    }
    let fits = match radix.checked_pow(len as u32) {
        Some(cap) => value < cap,
        // radix^len overflows u64, so every u64 value fits.
        None => true,
    };
    if !fits {
        return Err(CodecError::ValueTooLarge { value, radix, len });
    }
    let mut digits = vec![0u64; len];
    let mut rest = value;
    for slot in digits.iter_mut().rev() {
        *slot = rest % radix;
        rest /= radix;
    }
    Ok(DigitVector { digits, radix })
}

/// Packs `values` into one flat digit block of `block_len` digits,
/// `digits_per_value` per value, in order.
pub fn pack_block(
    values: &[u64],
    radix: u64,
    digits_per_value: usize,
    block_len: usize,
) -> Result<Vec<u64>, CodecError> {
    if digits_per_value == 0 || values.len() * digits_per_value != block_len {
        return Err(CodecError::BlockSizeMismatch {
            values: values.len(),
            digits_per_value,
            block: block_len,
        });
    }
    let mut block = Vec::with_capacity(block_len);
    for &v in values {
        block.extend_from_slice(decompose(v, radix, digits_per_value)?.digits());
    }
    Ok(block)
}

/// Splits a flat digit block back into composed values, `digits_per_value`
/// digits each. Receive-side digits may exceed the radix.
pub fn unpack_block(
    block: &[u64],
    radix: u64,
    digits_per_value: usize,
) -> Result<Vec<u64>, CodecError> {
    if radix < 2 {
        return Err(CodecError::BadRadix(radix));
    }
    if digits_per_value == 0 || block.len() % digits_per_value != 0 {
        return Err(CodecError::UnevenBlock {
            block: block.len(),
            digits_per_value,
        });
    }
    block
        .chunks(digits_per_value)
        .map(|chunk| {
            DigitVector::from_digits(chunk.to_vec(), radix)
                .and_then(|v| v.compose())
        })
        .collect()
}
