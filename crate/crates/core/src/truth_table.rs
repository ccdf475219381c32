//! Boolean functions as explicit truth tables.
//!
//! Entry `k` holds `f(x)` where input `i` is bit `i` of `k`. The textual form
//! is LSB-first: character `k` of the string is entry `k`, so `"0001"` is AND2
//! and `"0111"` is OR2.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("truth table length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid character {0:?} in truth table")]
    BadChar(char),
    #[error("arity {0} exceeds supported maximum of 16")]
    TooWide(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: usize,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self, TableError> {
        let len = bits.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(TableError::NotPowerOfTwo(len));
        }
        let arity = len.trailing_zeros() as usize;
        if arity > 16 {
            return Err(TableError::TooWide(arity));
        }
        Ok(Self { arity, bits })
    }

    pub fn from_fn(arity: usize, mut f: impl FnMut(&[bool]) -> bool) -> Self {
        assert!(arity <= 16, "arity {arity} too wide to tabulate");
        let bits = (0..1usize << arity)
            .map(|k| f(&index_to_inputs(k, arity)))
            .collect();
        Self { arity, bits }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn eval(&self, inputs: &[bool]) -> bool {
        self.bits[inputs_to_index(inputs)]
    }

    pub fn is_constant(&self) -> bool {
        self.bits.iter().all(|&b| b == self.bits[0])
    }

    /// True when raising any input never lowers the output.
    pub fn is_monotone(&self) -> bool {
        (0..self.len()).all(|k| {
            (0..self.arity).all(|i| k & (1 << i) != 0 || !self.bits[k] || self.bits[k | (1 << i)])
        })
    }

    /// True when `self(x) ⇒ other(x)` for every x.
    pub fn implies(&self, other: &TruthTable) -> bool {
        self.arity == other.arity && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for TruthTable {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(TableError::BadChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bits(bits)
    }
}

pub fn index_to_inputs(index: usize, arity: usize) -> Vec<bool> {
    (0..arity).map(|i| index >> i & 1 == 1).collect()
}

pub fn inputs_to_index(inputs: &[bool]) -> usize {
    inputs
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
}
