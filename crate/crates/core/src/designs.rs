//! Symmetric balanced incomplete block designs, stored as their incidence
//! matrices.
//!
//! An SBIBD(v, k, λ) is a `v × v` 0/1 matrix with `k` ones in every row and
//! column whose distinct rows meet in exactly `λ` positions. Its Gram matrix
//! is `(k − λ)I + λJ`.

use thiserror::Error;

use crate::exactmat::ExactMatrix;
use crate::numtheory::is_prime;
use crate::qfield::QuadNum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("a design needs at least 2 points, got {0}")]
    TooSmall(usize),
    #[error("row {row} has {found} entries, expected {expected}")]
    NotSquare { row: usize, expected: usize, found: usize },
    #[error("entry ({row},{col}) is {value}, expected 0 or 1")]
    NotBinary { row: usize, col: usize, value: u8 },
    #[error("row {row} has {found} ones, expected {expected}")]
    RowSum { row: usize, expected: usize, found: usize },
    #[error("column {col} has {found} ones, expected {expected}")]
    ColumnSum { col: usize, expected: usize, found: usize },
    #[error("rows ({0},{1}) meet in {found} positions, expected {expected}", rows.0, rows.1)]
    PairProduct { rows: (usize, usize), expected: usize, found: usize },
    #[error("rows are not distinct: k = λ = {0}")]
    Degenerate(usize),
    #[error("λ(v−1) ≠ k(k−1) for (v,k,λ) = ({v},{k},{lambda})")]
    ParameterIdentity { v: usize, k: usize, lambda: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not congruent to 3 mod 4")]
    WrongResidueClass(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Design {
    v: usize,
    k: usize,
    lambda: usize,
    cells: Vec<u8>,
}

impl Design {
    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn params(&self) -> (usize, usize, usize) {
        (self.v, self.k, self.lambda)
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.v + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.cells[row * self.v..(row + 1) * self.v]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.cells.chunks(self.v)
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows().map(<[u8]>::to_vec).collect()
    }

    /// The usual orientation `v > 2k` and `k > 2λ`. Reported, never enforced.
    pub fn follows_convention(&self) -> bool {
        self.v > 2 * self.k && self.k > 2 * self.lambda
    }

    /// `t` when the parameters are `(4t − 1, 2t − 1, t − 1)`.
    pub fn mersenne_t(&self) -> Option<usize> {
        let t = (self.v + 1) / 4;
        (t >= 1 && self.v == 4 * t - 1 && self.k == 2 * t - 1 && self.lambda == t - 1).then_some(t)
    }

    /// Swaps zeros and ones; the result is an SBIBD(v, v − k, v − 2k + λ).
    pub fn complement(&self) -> Design {
        Design {
            v: self.v,
            k: self.v - self.k,
            lambda: self.v + self.lambda - 2 * self.k,
            cells: self.cells.iter().map(|&c| 1 - c).collect(),
        }
    }

    pub fn incidence_matrix(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.v, |i, j| QuadNum::from_int(i64::from(self.get(i, j))))
            .expect("0/1 entries are rational")
    }

    /// The ±1 form `B = 2A − J`.
    pub fn pm_form(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.v, |i, j| QuadNum::from_int(2 * i64::from(self.get(i, j)) - 1))
            .expect("±1 entries are rational")
    }

    /// `(a, b)` with `BBᵀ = aI + bJ` for the ±1 form: `a = 4(k − λ)`,
    /// `b = v − 4(k − λ)`.
    pub fn pm_gram_coefficients(&self) -> (i64, i64) {
        let a = 4 * (self.k as i64 - self.lambda as i64);
        (a, self.v as i64 - a)
    }
}

/// Checks every SBIBD invariant of a square 0/1 matrix and reads off its
/// parameters.
pub fn verify_design(rows: &[Vec<u8>]) -> Result<Design, DesignError> {
    let v = rows.len();
    if v < 2 {
        return Err(DesignError::TooSmall(v));
    }
    let mut cells = Vec::with_capacity(v * v);
    for (row, r) in rows.iter().enumerate() {
        if r.len() != v {
            return Err(DesignError::NotSquare { row, expected: v, found: r.len() });
        }
        if let Some((col, &value)) = r.iter().enumerate().find(|(_, &c)| c > 1) {
            return Err(DesignError::NotBinary { row, col, value });
        }
        cells.extend_from_slice(r);
    }
    let k = count_ones(&rows[0]);
    for (row, r) in rows.iter().enumerate() {
        let found = count_ones(r);
        if found != k {
            return Err(DesignError::RowSum { row, expected: k, found });
        }
    }
    for col in 0..v {
        let found = rows.iter().filter(|r| r[col] == 1).count();
        if found != k {
            return Err(DesignError::ColumnSum { col, expected: k, found });
        }
    }
    let lambda = meet(&rows[0], &rows[1]);
    for i in 0..v {
        for j in i + 1..v {
            let found = meet(&rows[i], &rows[j]);
            if found != lambda {
                return Err(DesignError::PairProduct { rows: (i, j), expected: lambda, found });
            }
        }
    }
    if lambda >= k {
        return Err(DesignError::Degenerate(k));
    }
    if lambda * (v - 1) != k * (k - 1) {
        return Err(DesignError::ParameterIdentity { v, k, lambda });
    }
    Ok(Design { v, k, lambda, cells })
}

fn count_ones(row: &[u8]) -> usize {
    row.iter().filter(|&&c| c == 1).count()
}

fn meet(r: &[u8], s: &[u8]) -> usize {
    r.iter().zip(s).filter(|(&a, &b)| a == 1 && b == 1).count()
}

/// Nonzero quadratic residues mod a prime `q ≡ 3 (mod 4)`, sorted. They form
/// a `(q, (q−1)/2, (q−3)/4)` difference set.
pub fn qr_difference_set(q: u64) -> Result<Vec<u64>, DesignError> {
    if !is_prime(q) {
        return Err(DesignError::NotPrime(q));
    }
    if q % 4 != 3 {
        return Err(DesignError::WrongResidueClass(q));
    }
    let mut residues: Vec<u64> = (1..=(q - 1) / 2).map(|i| i * i % q).collect();
    residues.sort_unstable();
    residues.dedup();
    Ok(residues)
}

/// Circulant whose row `i` is `first_row` rotated right by `i`, verified as
/// an SBIBD.
pub fn circulant_incidence(first_row: &[u8]) -> Result<Design, DesignError> {
    let v = first_row.len();
    if v < 3 {
        return Err(DesignError::TooSmall(v));
    }
    let rows: Vec<Vec<u8>> = (0..v).map(|i| (0..v).map(|j| first_row[(j + v - i) % v]).collect()).collect();
    verify_design(&rows)
}

/// Circulant design built from a difference set of `Z_v`.
pub fn design_from_difference_set(v: usize, set: &[u64]) -> Result<Design, DesignError> {
    let mut first_row = vec![0u8; v];
    for &s in set {
        first_row[s as usize % v] = 1;
    }
    circulant_incidence(&first_row)
}

/// The Paley design `(q, (q−1)/2, (q−3)/4)` for a prime `q ≡ 3 (mod 4)`.
pub fn paley_design(q: u64) -> Result<Design, DesignError> {
    design_from_difference_set(q as usize, &qr_difference_set(q)?)
}

/// Squared determinant `(a + n·b)·aⁿ⁻¹` of any order-`n` matrix `M` with
/// `MMᵀ = aI + bJ`.
pub fn gram_det_formula(a: &QuadNum, b: &QuadNum, n: usize) -> QuadNum {
    if n == 0 {
        return QuadNum::one();
    }
    let exp = u32::try_from(n - 1).expect("order fits in u32");
    (a + &(b * &QuadNum::from_int(n as i64))) * a.pow(exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_742() -> Vec<Vec<u8>> {
        [
            [1, 1, 1, 0, 1, 0, 0],
            [0, 1, 1, 1, 0, 1, 0],
            [0, 0, 1, 1, 1, 0, 1],
            [1, 0, 0, 1, 1, 1, 0],
            [0, 1, 0, 0, 1, 1, 1],
            [1, 0, 1, 0, 0, 1, 1],
            [1, 1, 0, 1, 0, 0, 1],
        ]
        .iter()
        .map(|r| r.to_vec())
        .collect()
    }

    fn identity_rows(v: usize) -> Vec<Vec<u8>> {
        (0..v).map(|i| (0..v).map(|j| u8::from(i == j)).collect()).collect()
    }

    #[test]
    fn residues() {
        assert_eq!(qr_difference_set(7).unwrap(), vec![1, 2, 4]);
        assert_eq!(qr_difference_set(3).unwrap(), vec![1]);
        assert_eq!(qr_difference_set(11).unwrap(), vec![1, 3, 4, 5, 9]);
        assert_eq!(qr_difference_set(9), Err(DesignError::NotPrime(9)));
        assert_eq!(qr_difference_set(13), Err(DesignError::WrongResidueClass(13)));
    }

    #[test]
    fn circulants() {
        let d = circulant_incidence(&[1, 1, 1, 0, 1, 0, 0]).unwrap();
        assert_eq!(d.params(), (7, 4, 2));
        assert_eq!(d.to_rows(), example_742());
        assert_eq!(paley_design(7).unwrap().params(), (7, 3, 1));
        assert_eq!(circulant_incidence(&[1, 1, 1, 1]), Err(DesignError::Degenerate(4)));
        assert_eq!(circulant_incidence(&[1, 1]), Err(DesignError::TooSmall(2)));
    }

    #[test]
    fn verification() {
        assert_eq!(verify_design(&example_742()).unwrap().params(), (7, 4, 2));
        assert_eq!(verify_design(&identity_rows(5)).unwrap().params(), (5, 1, 0));
        let j_minus_i: Vec<Vec<u8>> = identity_rows(5).iter().map(|r| r.iter().map(|c| 1 - c).collect()).collect();
        assert_eq!(verify_design(&j_minus_i).unwrap().params(), (5, 4, 3));
    }

    #[test]
    fn verification_failures() {
        let mut rows = example_742();
        rows[2][0] = 1;
        assert_eq!(verify_design(&rows), Err(DesignError::RowSum { row: 2, expected: 4, found: 5 }));
        rows[2][0] = 2;
        assert!(matches!(verify_design(&rows), Err(DesignError::NotBinary { row: 2, col: 0, value: 2 })));
        // constant row and column sums, but non-uniform meets
        let rows = vec![vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 1, 1]];
        assert!(matches!(verify_design(&rows), Err(DesignError::PairProduct { rows: (0, 2), .. })));
        // complement of I₃
        let rows = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        assert_eq!(verify_design(&rows).unwrap().params(), (3, 2, 1));
        assert_eq!(verify_design(&[vec![1]]), Err(DesignError::TooSmall(1)));
        let shifted = vec![vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]];
        assert!(verify_design(&shifted).is_err());
    }

    #[test]
    fn complements() {
        let d = verify_design(&example_742()).unwrap();
        let c = d.complement();
        assert_eq!(c.params(), (7, 3, 1));
        assert_eq!(verify_design(&c.to_rows()).unwrap(), c);
        assert_eq!(c.complement(), d);
        let d11 = paley_design(11).unwrap();
        assert_eq!(d11.params(), (11, 5, 2));
        assert_eq!(d11.mersenne_t(), Some(3));
        assert_eq!(d11.complement().params(), (11, 6, 3));
        assert!(d11.follows_convention());
        assert!(!d11.complement().follows_convention());
    }

    #[test]
    fn gram_is_a_i_plus_b_j() {
        let d = verify_design(&example_742()).unwrap();
        let (a, b) = d.incidence_matrix().gram().is_a_i_plus_b_j().unwrap();
        assert_eq!((a, b), (QuadNum::from_int(2), QuadNum::from_int(2)));
        // the ±1 form: 8I − J, i.e. 4(k−λ) on the diagonal part
        let (a, b) = d.pm_form().gram().is_a_i_plus_b_j().unwrap();
        assert_eq!((a, b), (QuadNum::from_int(8), QuadNum::from_int(-1)));
        assert_eq!(d.pm_gram_coefficients(), (8, -1));
    }

    #[test]
    fn determinant_formula() {
        let sq = gram_det_formula(&QuadNum::from_int(2), &QuadNum::from_int(2), 7);
        assert_eq!(sq, QuadNum::from_int(1024));
        assert_eq!(gram_det_formula(&QuadNum::one(), &QuadNum::zero(), 9), QuadNum::one());
        assert_eq!(gram_det_formula(&QuadNum::from_int(8), &QuadNum::from_int(-1), 7), QuadNum::from_int(262_144));
        // |det A| = k(k−λ)^((v−1)/2) = 4·2³
        let d = circulant_incidence(&[1, 1, 1, 0, 1, 0, 0]).unwrap();
        assert_eq!(d.incidence_matrix().det().abs(), QuadNum::from_int(32));
        assert_eq!(d.pm_form().det().abs(), QuadNum::from_int(512));
    }
}
