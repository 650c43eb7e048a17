//! Dense square matrices over [`QuadNum`].
//!
//! Every matrix fixes a single radicand (`disc`, `1` when all entries are
//! rational). Products, Gram matrices and determinants are exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::qfield::{QfieldError, QuadNum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("expected {expected} entries for a square matrix, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error(transparent)]
    Field(#[from] QfieldError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    order: usize,
    disc: u64,
    entries: Vec<QuadNum>,
}

impl ExactMatrix {
    /// Row-major constructor; checks shape and radicand compatibility.
    pub fn new(order: usize, entries: Vec<QuadNum>) -> Result<Self, MatrixError> {
        if entries.len() != order * order {
            return Err(MatrixError::Shape { expected: order * order, found: entries.len() });
        }
        let mut disc = 1u64;
        for e in &entries {
            disc = match (disc, e.radicand()) {
                (1, d) | (d, 1) => d,
                (d, e) if d == e => d,
                (d, e) => return Err(QfieldError::RadicandMismatch(d, e).into()),
            };
        }
        Ok(Self { order, disc, entries })
    }

    pub fn from_rows(rows: Vec<Vec<QuadNum>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::RaggedRow { row, expected: n, found: r.len() });
            }
            entries.extend(r);
        }
        Self::new(n, entries)
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> QuadNum) -> Result<Self, MatrixError> {
        let entries = (0..order * order).map(|idx| f(idx / order, idx % order)).collect();
        Self::new(order, entries)
    }

    /// Integer matrix; panics if the rows are ragged.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| QuadNum::from_int(x)).collect()).collect();
        Self::from_rows(rows).expect("integer rows must form a square matrix")
    }

    pub fn identity(order: usize) -> Self {
        Self::scalar(order, &QuadNum::one())
    }

    /// `J`, the all-ones matrix.
    pub fn ones(order: usize) -> Self {
        Self { order, disc: 1, entries: vec![QuadNum::one(); order * order] }
    }

    pub fn scalar(order: usize, value: &QuadNum) -> Self {
        let entries = (0..order * order)
            .map(|idx| if idx / order == idx % order { value.clone() } else { QuadNum::zero() })
            .collect();
        Self { order, disc: value.radicand(), entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn disc(&self) -> u64 {
        self.disc
    }

    pub fn get(&self, row: usize, col: usize) -> &QuadNum {
        &self.entries[row * self.order + col]
    }

    pub fn row(&self, row: usize) -> &[QuadNum] {
        &self.entries[row * self.order..(row + 1) * self.order]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[QuadNum]> {
        self.entries.chunks(self.order.max(1))
    }

    pub fn entries(&self) -> &[QuadNum] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let n = self.order;
        let entries = (0..n * n).map(|idx| self.get(idx % n, idx / n).clone()).collect();
        Self { order: n, disc: self.disc, entries }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.order != other.order {
            return Err(MatrixError::OrderMismatch(self.order, other.order));
        }
        let n = self.order;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = QuadNum::zero();
                for k in 0..n {
                    acc = acc.checked_add(&self.get(i, k).checked_mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Self::new(n, entries)
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.order != other.order {
            return Err(MatrixError::OrderMismatch(self.order, other.order));
        }
        let entries =
            self.entries.iter().zip(&other.entries).map(|(x, y)| x.checked_add(y)).collect::<Result<Vec<_>, _>>()?;
        Self::new(self.order, entries)
    }

    pub fn scale(&self, factor: &QuadNum) -> Result<Self, MatrixError> {
        let entries = self.entries.iter().map(|x| x.checked_mul(factor)).collect::<Result<Vec<_>, _>>()?;
        Self::new(self.order, entries)
    }

    /// `M·Mᵀ`: the matrix of inner products of rows.
    pub fn gram(&self) -> Self {
        if let Some(g) = self.gram_scaled_integers() {
            return g;
        }
        let n = self.order;
        let mut entries = vec![QuadNum::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = QuadNum::zero();
                for (x, y) in self.row(i).iter().zip(self.row(j)) {
                    acc = &acc + &(x * y);
                }
                entries[j * n + i] = acc.clone();
                entries[i * n + j] = acc;
            }
        }
        Self { order: n, disc: self.disc, entries }
    }

    /// Gram matrix via a common denominator `L`: each entry is
    /// `(p + q√d)/L` with machine integers `p`, `q`, and inner products are
    /// accumulated in `i128`. Returns `None` when anything would overflow.
    fn gram_scaled_integers(&self) -> Option<Self> {
        let lcm = self
            .entries
            .iter()
            .fold(<BigInt as One>::one(), |l, e| l.lcm(e.rational_part().denom()).lcm(e.radical_part().denom()));
        let scaled: Vec<(i64, i64)> = self
            .entries
            .iter()
            .map(|e| {
                let p = (e.rational_part() * &lcm).to_integer().to_i64()?;
                let q = (e.radical_part() * &lcm).to_integer().to_i64()?;
                Some((p, q))
            })
            .collect::<Option<_>>()?;
        let d = i128::from(self.disc);
        let n = self.order;
        let lcm_sq = Rational::from_integer(&lcm * &lcm);
        let mut entries = vec![QuadNum::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let (mut rat, mut rad) = (0i128, 0i128);
                for k in 0..n {
                    let (p1, q1) = scaled[i * n + k];
                    let (p2, q2) = scaled[j * n + k];
                    let (p1, q1, p2, q2) = (p1 as i128, q1 as i128, p2 as i128, q2 as i128);
                    let t = p1.checked_mul(p2)?.checked_add(q1.checked_mul(q2)?.checked_mul(d)?)?;
                    rat = rat.checked_add(t)?;
                    rad = rad.checked_add(p1.checked_mul(q2)?.checked_add(q1.checked_mul(p2)?)?)?;
                }
                let value = QuadNum::new(
                    Rational::from_integer(BigInt::from(rat)) / &lcm_sq,
                    Rational::from_integer(BigInt::from(rad)) / &lcm_sq,
                    self.disc,
                );
                entries[j * n + i] = value.clone();
                entries[i * n + j] = value;
            }
        }
        Some(Self { order: n, disc: self.disc, entries })
    }

    /// Exact determinant by Bareiss elimination. Pivots are the first nonzero
    /// entry in the column scanning rows top-down; each swap flips the sign.
    /// Integer matrices take a pure `BigInt` path.
    pub fn det(&self) -> QuadNum {
        let integers: Option<Vec<BigInt>> = self
            .entries
            .iter()
            .map(|e| (e.is_rational() && e.rational_part().is_integer()).then(|| e.rational_part().to_integer()))
            .collect();
        match integers {
            Some(ints) => QuadNum::from(bareiss(self.order, ints)),
            None => bareiss(self.order, self.entries.clone()),
        }
    }

    /// `Some(ω)` exactly when the matrix equals `ωI`.
    pub fn is_scalar_identity(&self) -> Option<QuadNum> {
        let n = self.order;
        if n == 0 {
            return None;
        }
        let omega = self.get(0, 0);
        for i in 0..n {
            for j in 0..n {
                let e = self.get(i, j);
                let ok = if i == j { e == omega } else { e.is_zero() };
                if !ok {
                    return None;
                }
            }
        }
        Some(omega.clone())
    }

    /// `Some((a, b))` exactly when the matrix equals `aI + bJ`. An order-1
    /// matrix is reported with `b = 0`.
    pub fn is_a_i_plus_b_j(&self) -> Option<(QuadNum, QuadNum)> {
        let n = self.order;
        if n == 0 {
            return None;
        }
        if n == 1 {
            return Some((self.get(0, 0).clone(), QuadNum::zero()));
        }
        let b = self.get(0, 1);
        let diag = self.get(0, 0);
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { diag } else { b };
                if self.get(i, j) != expected {
                    return None;
                }
            }
        }
        Some((diag - b, b.clone()))
    }

    /// First off-diagonal pair `(i, j)`, `i < j`, that is nonzero.
    pub fn first_nonzero_off_diagonal(&self) -> Option<(usize, usize)> {
        let n = self.order;
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !self.get(i, j).is_zero())
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// The ring operations Bareiss elimination needs; `exact_div` is only ever
/// called when the division is exact.
trait EliminationRing: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn mul_sub(&self, pivot: &Self, left: &Self, top: &Self) -> Self;
    fn exact_div(self, divisor: &Self) -> Self;
    fn negate(self) -> Self;
}

impl EliminationRing for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul_sub(&self, pivot: &Self, left: &Self, top: &Self) -> Self {
        self * pivot - left * top
    }
    fn exact_div(self, divisor: &Self) -> Self {
        self / divisor
    }
    fn negate(self) -> Self {
        -self
    }
}

impl EliminationRing for QuadNum {
    fn zero() -> Self {
        QuadNum::zero()
    }
    fn one() -> Self {
        QuadNum::one()
    }
    fn is_zero(&self) -> bool {
        QuadNum::is_zero(self)
    }
    fn mul_sub(&self, pivot: &Self, left: &Self, top: &Self) -> Self {
        self * pivot - left * top
    }
    fn exact_div(self, divisor: &Self) -> Self {
        self / divisor
    }
    fn negate(self) -> Self {
        -self
    }
}

fn bareiss<T: EliminationRing>(n: usize, mut m: Vec<T>) -> T {
    if n == 0 {
        return T::one();
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i * n + k].is_zero()) else {
                return T::zero();
            };
            for j in 0..n {
                m.swap(k * n + j, swap * n + j);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let updated = m[i * n + j].mul_sub(&m[k * n + k], &m[i * n + k], &m[k * n + j]).exact_div(&prev);
                m[i * n + j] = updated;
            }
        }
        prev = m[k * n + k].clone();
    }
    let det = m[n * n - 1].clone();
    if negate {
        det.negate()
    } else {
        det
    }
}
