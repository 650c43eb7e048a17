//! Hadamard matrices: Sylvester and Paley constructions, normalization,
//! verification, and the correspondence between normalized Hadamard
//! matrices of order `4t` and SBIBD(4t − 1, 2t − 1, t − 1).

use std::fmt;

use thiserror::Error;

use crate::designs::{paley_design, verify_design, Design, DesignError};
use crate::exactmat::ExactMatrix;
use crate::numtheory::{is_prime, power_of_two_exponent};
use crate::qfield::QuadNum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HadamardError {
    #[error("row {row} has {found} entries, expected {expected}")]
    NotSquare { row: usize, expected: usize, found: usize },
    #[error("entry ({row},{col}) is {value}, expected +1 or -1")]
    NotPlusMinusOne { row: usize, col: usize, value: i64 },
    #[error("order {0} is not 1, 2 or a multiple of 4")]
    BadOrder(usize),
    #[error("order {0} is not of the form 4t")]
    NotMultipleOfFour(usize),
    #[error("rows ({0},{1}) have inner product {value}, expected 0", rows.0, rows.1)]
    NotOrthogonal { rows: (usize, usize), value: i64 },
    #[error("core fails BBᵀ = 4tI − J at ({0},{1})", at.0, at.1)]
    CoreGram { at: (usize, usize) },
    #[error("design ({v},{k},{lambda}) is not of the form (4t−1, 2t−1, t−1)")]
    WrongFamily { v: usize, k: usize, lambda: usize },
    #[error("no Hadamard generator for order {0}")]
    NoGenerator(usize),
    #[error(transparent)]
    Design(#[from] DesignError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HadamardMatrix {
    order: usize,
    entries: Vec<i8>,
    normalized: bool,
}

/// How a Hadamard matrix was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Sylvester,
    Paley,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Sylvester => "sylvester",
            Generator::Paley => "paley",
        })
    }
}

impl HadamardMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.order + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.entries.chunks(self.order)
    }

    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        self.rows().map(<[i8]>::to_vec).collect()
    }

    pub fn to_exact(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.order, |i, j| QuadNum::from_int(i64::from(self.get(i, j))))
            .expect("±1 entries are rational")
    }

    /// Negates every column whose first entry is −1, then every row whose
    /// first entry is −1.
    pub fn normalize(&self) -> HadamardMatrix {
        let n = self.order;
        let mut entries = self.entries.clone();
        for col in 0..n {
            if entries[col] < 0 {
                for row in 0..n {
                    entries[row * n + col] = -entries[row * n + col];
                }
            }
        }
        for row in 0..n {
            if entries[row * n] < 0 {
                for col in 0..n {
                    entries[row * n + col] = -entries[row * n + col];
                }
            }
        }
        HadamardMatrix { order: n, entries, normalized: true }
    }

    /// Same matrix with row `row` negated; stays Hadamard.
    pub fn negate_row(&self, row: usize) -> HadamardMatrix {
        let n = self.order;
        let mut entries = self.entries.clone();
        entries[row * n..(row + 1) * n].iter_mut().for_each(|e| *e = -*e);
        Self::from_verified(n, entries)
    }

    pub fn negate_column(&self, col: usize) -> HadamardMatrix {
        let n = self.order;
        let mut entries = self.entries.clone();
        for row in 0..n {
            entries[row * n + col] = -entries[row * n + col];
        }
        Self::from_verified(n, entries)
    }

    fn from_verified(order: usize, entries: Vec<i8>) -> Self {
        let normalized = is_normalized(order, &entries);
        HadamardMatrix { order, entries, normalized }
    }

    /// Core extraction: normalize, strip the border, send −1 to
    /// 0. The core `B` is checked against `BBᵀ = 4tI − J` before the 0/1
    /// matrix `A = (J + B)/2` is verified as an SBIBD(4t−1, 2t−1, t−1).
    pub fn core_to_sbibd(&self) -> Result<Design, HadamardError> {
        let n = self.order;
        if n < 4 || !n.is_multiple_of(4) {
            return Err(HadamardError::NotMultipleOfFour(n));
        }
        let normal = self.normalize();
        let core: Vec<Vec<i8>> = (1..n).map(|i| (1..n).map(|j| normal.get(i, j)).collect()).collect();
        let t = (n / 4) as i64;
        for i in 0..n - 1 {
            for j in i..n - 1 {
                let dot: i64 = core[i].iter().zip(&core[j]).map(|(&a, &b)| i64::from(a * b)).sum();
                let expected = if i == j { 4 * t - 1 } else { -1 };
                if dot != expected {
                    return Err(HadamardError::CoreGram { at: (i, j) });
                }
            }
        }
        let incidence: Vec<Vec<u8>> = core.iter().map(|r| r.iter().map(|&b| u8::from(b > 0)).collect()).collect();
        let design = verify_design(&incidence)?;
        match design.mersenne_t() {
            Some(_) => Ok(design),
            None => {
                let (v, k, lambda) = design.params();
                Err(HadamardError::WrongFamily { v, k, lambda })
            }
        }
    }
}

fn is_normalized(n: usize, entries: &[i8]) -> bool {
    (0..n).all(|i| entries[i] == 1 && entries[i * n] == 1)
}

/// Order-`2^k` matrix by repeated doubling `H ↦ [[H, H], [H, −H]]`.
pub fn sylvester(k: u32) -> HadamardMatrix {
    let mut order = 1usize;
    let mut entries = vec![1i8];
    for _ in 0..k {
        let next = 2 * order;
        let mut doubled = vec![0i8; next * next];
        for i in 0..order {
            for j in 0..order {
                let e = entries[i * order + j];
                doubled[i * next + j] = e;
                doubled[i * next + j + order] = e;
                doubled[(i + order) * next + j] = e;
                doubled[(i + order) * next + j + order] = -e;
            }
        }
        order = next;
        entries = doubled;
    }
    HadamardMatrix { order, entries, normalized: true }
}

/// Order `q + 1` matrix from the quadratic-residue design, bordered through
/// [`sbibd_to_hadamard`].
pub fn paley_hadamard(q: u64) -> Result<HadamardMatrix, HadamardError> {
    sbibd_to_hadamard(&paley_design(q)?)
}

/// Checks `HHᵀ = nI` for a ±1 matrix of order 1, 2 or `4t`.
pub fn verify_hadamard(rows: &[Vec<i64>]) -> Result<HadamardMatrix, HadamardError> {
    let n = rows.len();
    let mut entries = Vec::with_capacity(n * n);
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(HadamardError::NotSquare { row, expected: n, found: r.len() });
        }
        for (col, &value) in r.iter().enumerate() {
            match value {
                1 => entries.push(1i8),
                -1 => entries.push(-1i8),
                _ => return Err(HadamardError::NotPlusMinusOne { row, col, value }),
            }
        }
    }
    if !(n == 1 || n == 2 || (n > 0 && n.is_multiple_of(4))) {
        return Err(HadamardError::BadOrder(n));
    }
    for i in 0..n {
        for j in i + 1..n {
            let value: i64 = (0..n).map(|c| i64::from(entries[i * n + c] * entries[j * n + c])).sum();
            if value != 0 {
                return Err(HadamardError::NotOrthogonal { rows: (i, j), value });
            }
        }
    }
    Ok(HadamardMatrix::from_verified(n, entries))
}

impl HadamardMatrix {
    /// Re-verifies a matrix given as ±1 rows.
    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self, HadamardError> {
        let wide: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|&e| i64::from(e)).collect()).collect();
        verify_hadamard(&wide)
    }
}

/// Borders `B = 2A − J` with a row and column of ones, for `A` an
/// SBIBD(4t−1, 2t−1, t−1). The result is verified and normalized.
pub fn sbibd_to_hadamard(design: &Design) -> Result<HadamardMatrix, HadamardError> {
    if design.mersenne_t().is_none() {
        let (v, k, lambda) = design.params();
        return Err(HadamardError::WrongFamily { v, k, lambda });
    }
    let n = design.v() + 1;
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n).map(|j| if i == 0 || j == 0 { 1 } else { 2 * i64::from(design.get(i - 1, j - 1)) - 1 }).collect()
        })
        .collect();
    verify_hadamard(&rows)
}

/// A Hadamard matrix of order `4t` when one of the built-in generators
/// applies: Sylvester for powers of two, otherwise Paley when `4t − 1` is
/// prime.
pub fn construct_for_t(t: usize) -> Result<(Generator, HadamardMatrix), HadamardError> {
    let n = 4 * t;
    if t == 0 {
        return Err(HadamardError::NoGenerator(0));
    }
    if let Some(k) = power_of_two_exponent(n as u64) {
        return Ok((Generator::Sylvester, sylvester(k)));
    }
    let q = (n - 1) as u64;
    if is_prime(q) {
        return Ok((Generator::Paley, paley_hadamard(q)?));
    }
    Err(HadamardError::NoGenerator(n))
}
