//! Two-level Cretan matrices.
//!
//! A Cretan matrix `S` of order `v` has entries of modulus at most one, a
//! 1 in every row and column, and satisfies `SSᵀ = ωI`; `ω` is its weight.
//! The two-level matrices built here put level `x = 1` on the 1-cells of an
//! SBIBD mask and level `y` on the 0-cells, with `y` a root of the pattern's
//! characteristic equation.

mod bounds;
mod levels;
mod roundtrip;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::designs::{verify_design, Design, DesignError};
use crate::exactmat::{ExactMatrix, MatrixError};
use crate::qfield::QuadNum;

pub use bounds::{det_bounds, DetBounds};
pub use levels::{
    characteristic_coeffs, mersenne_level, solve_characteristic, solve_levels, CharacteristicCoeffs, LevelSolution,
};
pub use roundtrip::{roundtrip, scan, RoundtripError, RoundtripReport, ScanOutcome, ScanRow, Stage};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CretanError {
    #[error("rows ({0},{1}) of the pattern break the uniform pair structure", rows.0, rows.1)]
    NonUniform { rows: (usize, usize) },
    #[error("characteristic equation {0} does not determine y")]
    NoLevelEquation(CharacteristicCoeffs),
    #[error("negative discriminant {0}: no real level")]
    NegativeDiscriminant(i64),
    #[error("no root with |y| ≤ 1 among {}", fmt_roots(roots))]
    Infeasible { roots: Vec<QuadNum> },
    #[error("entry ({row},{col}) has modulus greater than 1")]
    EntryTooLarge { row: usize, col: usize },
    #[error("row {0} contains no entry equal to 1")]
    NoUnitInRow(usize),
    #[error("column {0} contains no entry equal to 1")]
    NoUnitInColumn(usize),
    #[error("characteristic equation violated at rows ({0},{1})", rows.0, rows.1)]
    CharacteristicViolated { rows: (usize, usize) },
    #[error("radius equation violated at row {row}")]
    RadiusViolated { row: usize },
    #[error("weight {0} is not positive")]
    NonPositiveWeight(Box<QuadNum>),
    #[error("empty matrix")]
    Empty,
    #[error("expected two levels, found {0}")]
    NotTwoLevel(usize),
    #[error("stated {field} {stated} disagrees with computed {computed}")]
    Metadata { field: &'static str, stated: String, computed: String },
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn fmt_roots(roots: &[QuadNum]) -> String {
    let parts: Vec<String> = roots.iter().map(|r| r.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Which cells of an SBIBD receive the level `x = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Convention {
    XOnOnes,
    #[default]
    XOnZeros,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::XOnOnes => "x-on-ones",
            Convention::XOnZeros => "x-on-zeros",
        }
    }

    pub fn other(&self) -> Convention {
        match self {
            Convention::XOnOnes => Convention::XOnZeros,
            Convention::XOnZeros => Convention::XOnOnes,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "x-on-ones" => Ok(Convention::XOnOnes),
            "x-on-zeros" => Ok(Convention::XOnZeros),
            _ => Err(format!("unknown convention {s:?}")),
        }
    }
}

/// A design used as a two-level mask: 1-cells take `x`, 0-cells take `y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoLevelPattern {
    mask: Design,
}

impl TwoLevelPattern {
    pub fn new(mask: Design) -> Self {
        Self { mask }
    }

    pub fn mask(&self) -> &Design {
        &self.mask
    }

    pub fn order(&self) -> usize {
        self.mask.v()
    }

    /// `x`-cells per row.
    pub fn k(&self) -> usize {
        self.mask.k()
    }

    pub fn lambda(&self) -> usize {
        self.mask.lambda()
    }

    pub fn substitute(&self, x: &QuadNum, y: &QuadNum) -> ExactMatrix {
        ExactMatrix::from_fn(self.order(), |i, j| if self.mask.get(i, j) == 1 { x.clone() } else { y.clone() })
            .expect("two levels from one field")
    }
}

/// A verified two-level Cretan matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CretanMatrix {
    pattern: TwoLevelPattern,
    convention: Convention,
    solution: LevelSolution,
    x: QuadNum,
    omega: QuadNum,
    matrix: ExactMatrix,
}

/// Weight and determinant of a Cretan matrix. `det_sq = ωᵛ` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightAndDet {
    pub omega: QuadNum,
    pub det_sq: QuadNum,
    pub det_float: f64,
}

impl CretanMatrix {
    /// Solves the pattern's levels and certifies the result. `convention`
    /// records how the pattern relates to its source design.
    pub fn from_pattern(pattern: TwoLevelPattern, convention: Convention) -> Result<Self, CretanError> {
        let solution = solve_levels(&pattern)?;
        let x = QuadNum::one();
        let matrix = pattern.substitute(&x, &solution.y);
        let omega = verify_cretan(&matrix)?;
        let cretan = Self { pattern, convention, solution, x, omega, matrix };
        cretan.check_invariants()?;
        Ok(cretan)
    }

    /// Rebuilds a Cretan matrix from its entries: the 1-cells form the mask,
    /// everything else must be a single second level.
    pub fn from_matrix(matrix: ExactMatrix, convention: Convention) -> Result<Self, CretanError> {
        let omega = verify_cretan(&matrix)?;
        let mut levels: Vec<&QuadNum> = Vec::new();
        for e in matrix.entries() {
            if !levels.contains(&e) {
                levels.push(e);
            }
        }
        if levels.len() != 2 {
            return Err(CretanError::NotTwoLevel(levels.len()));
        }
        let rows: Vec<Vec<u8>> = matrix.rows().map(|r| r.iter().map(|e| u8::from(e.is_one())).collect()).collect();
        let pattern = TwoLevelPattern::new(verify_design(&rows)?);
        let solution = solve_levels(&pattern)?;
        let y = levels.into_iter().find(|e| !e.is_one()).expect("two levels, one is 1").clone();
        let computed = Self::from_pattern(pattern, convention)?;
        if y != solution.y {
            // a legitimate root other than the preferred one
            if !solution.coeffs.eval(&y).is_zero() {
                return Err(CretanError::CharacteristicViolated { rows: (0, 1) });
            }
            let solution = LevelSolution { y, ..solution };
            let cretan = Self { solution, omega, matrix, ..computed };
            cretan.check_invariants()?;
            return Ok(cretan);
        }
        Ok(computed)
    }

    fn check_invariants(&self) -> Result<(), CretanError> {
        let v = self.order() as i64;
        let k = self.pattern.k() as i64;
        let radius = &QuadNum::from_int(k) * &self.x.square() + &QuadNum::from_int(v - k) * &self.y().square();
        if radius != self.omega {
            return Err(CretanError::RadiusViolated { row: 0 });
        }
        if !self.solution.coeffs.eval(self.y()).is_zero() {
            return Err(CretanError::CharacteristicViolated { rows: (0, 1) });
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.pattern.order()
    }

    pub fn pattern(&self) -> &TwoLevelPattern {
        &self.pattern
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn solution(&self) -> &LevelSolution {
        &self.solution
    }

    pub fn x(&self) -> &QuadNum {
        &self.x
    }

    pub fn y(&self) -> &QuadNum {
        &self.solution.y
    }

    pub fn omega(&self) -> &QuadNum {
        &self.omega
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    /// The design the matrix was built from: the mask itself under
    /// `x-on-ones`, its complement under `x-on-zeros`.
    pub fn source_design(&self) -> Design {
        match self.convention {
            Convention::XOnOnes => self.pattern.mask().clone(),
            Convention::XOnZeros => self.pattern.mask().complement(),
        }
    }

    pub fn weight_and_det(&self) -> WeightAndDet {
        let v = u32::try_from(self.order()).expect("order fits in u32");
        WeightAndDet {
            omega: self.omega.clone(),
            det_sq: self.omega.pow(v),
            det_float: self.omega.to_f64().powf(f64::from(v) / 2.0),
        }
    }

    /// Zeroes every entry that is not exactly 1 and verifies the result.
    pub fn to_incidence(&self) -> Result<Design, CretanError> {
        let rows: Vec<Vec<u8>> = self.matrix.rows().map(|r| r.iter().map(|e| u8::from(e.is_one())).collect()).collect();
        Ok(verify_design(&rows)?)
    }
}

/// Cretan matrix of an SBIBD: `x = 1` on the mask cells, `y` solved exactly.
pub fn cretan_from_sbibd(design: &Design, convention: Convention) -> Result<CretanMatrix, CretanError> {
    let mask = match convention {
        Convention::XOnOnes => design.clone(),
        Convention::XOnZeros => design.complement(),
    };
    CretanMatrix::from_pattern(TwoLevelPattern::new(mask), convention)
}

pub fn cretan_to_incidence(cretan: &CretanMatrix) -> Result<Design, CretanError> {
    cretan.to_incidence()
}

/// Full certificate for the Cretan property of an arbitrary matrix; returns
/// the weight `ω`.
///
/// Checks, in order: every `|entry| ≤ 1`, a 1 in every row and column, the
/// characteristic equations (off-diagonal Gram entries vanish), the radius
/// equations (constant diagonal), and `ω > 0`.
pub fn verify_cretan(matrix: &ExactMatrix) -> Result<QuadNum, CretanError> {
    let n = matrix.order();
    if n == 0 {
        return Err(CretanError::Empty);
    }
    let one = QuadNum::one();
    for (row, r) in matrix.rows().enumerate() {
        for (col, e) in r.iter().enumerate() {
            if e.abs().try_cmp(&one).map_err(MatrixError::from)? == Ordering::Greater {
                return Err(CretanError::EntryTooLarge { row, col });
            }
        }
        if !r.iter().any(QuadNum::is_one) {
            return Err(CretanError::NoUnitInRow(row));
        }
    }
    for col in 0..n {
        if !(0..n).any(|row| matrix.get(row, col).is_one()) {
            return Err(CretanError::NoUnitInColumn(col));
        }
    }
    let gram = matrix.gram();
    if let Some(rows) = gram.first_nonzero_off_diagonal() {
        return Err(CretanError::CharacteristicViolated { rows });
    }
    let omega = gram.get(0, 0).clone();
    if let Some(row) = (1..n).find(|&i| gram.get(i, i) != &omega) {
        return Err(CretanError::RadiusViolated { row });
    }
    if omega.signum() != Ordering::Greater {
        return Err(CretanError::NonPositiveWeight(Box::new(omega)));
    }
    Ok(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{circulant_incidence, paley_design};
    use crate::qfield::rational;

    fn d742() -> Design {
        circulant_incidence(&[1, 1, 1, 0, 1, 0, 0]).unwrap()
    }

    fn identity_pattern(v: usize) -> TwoLevelPattern {
        let rows: Vec<Vec<u8>> = (0..v).map(|i| (0..v).map(|j| u8::from(i == j)).collect()).collect();
        TwoLevelPattern::new(verify_design(&rows).unwrap())
    }

    #[test]
    fn principal_order_seven() {
        let c = cretan_from_sbibd(&d742(), Convention::XOnOnes).unwrap();
        assert_eq!(c.y(), &QuadNum::new(rational(-2, 1), rational(1, 1), 2));
        assert_eq!(c.omega(), &QuadNum::new(rational(22, 1), rational(-12, 1), 2));
        let wd = c.weight_and_det();
        assert!((wd.omega.to_f64() - 5.0294).abs() < 1e-4);
        assert!((wd.det_float - 285.31).abs() < 0.01);
        assert_eq!(wd.det_sq, c.matrix().det().square());
    }

    #[test]
    fn complementary_order_seven() {
        let c = cretan_from_sbibd(&paley_design(7).unwrap(), Convention::XOnOnes).unwrap();
        assert_eq!(c.y(), &QuadNum::new(rational(-1, 1), rational(1, 2), 2));
        let wd = c.weight_and_det();
        assert!((wd.omega.to_f64() - 3.3431).abs() < 1e-4);
        // ω^{7/2} = 68.319…
        assert!((wd.det_float - 68.319).abs() < 1e-3);
    }

    #[test]
    fn conventions_are_dual() {
        let d = paley_design(7).unwrap();
        let zeros = cretan_from_sbibd(&d, Convention::XOnZeros).unwrap();
        let ones = cretan_from_sbibd(&d.complement(), Convention::XOnOnes).unwrap();
        assert_eq!(zeros.matrix(), ones.matrix());
        assert_eq!(zeros.y(), &mersenne_level(2));
        assert_eq!(zeros.source_design(), d);
        assert_eq!(zeros.to_incidence().unwrap().params(), (7, 4, 2));
        assert_eq!(ones.to_incidence().unwrap(), d.complement());
    }

    #[test]
    fn example_order_five() {
        let c = CretanMatrix::from_pattern(identity_pattern(5), Convention::XOnOnes).unwrap();
        assert_eq!(c.y(), &QuadNum::from_ratio(-2, 3));
        let wd = c.weight_and_det();
        // 1 + 4·(2/3)² = 25/9
        assert_eq!(wd.omega, QuadNum::from_ratio(25, 9));
        assert!((wd.det_float - 12.860).abs() < 1e-3);
    }

    #[test]
    fn trivial_identity() {
        let c = CretanMatrix::from_pattern(identity_pattern(2), Convention::XOnOnes).unwrap();
        let wd = c.weight_and_det();
        assert_eq!(wd.omega, QuadNum::one());
        assert_eq!(wd.det_sq, QuadNum::one());
        assert_eq!(c.matrix(), &ExactMatrix::identity(2));
    }

    #[test]
    fn order_three_both_conventions() {
        let d = paley_design(3).unwrap();
        assert_eq!(d.params(), (3, 1, 0));
        let zeros = cretan_from_sbibd(&d, Convention::XOnZeros).unwrap();
        assert_eq!(zeros.y(), &QuadNum::from_ratio(-1, 2));
        assert_eq!(zeros.omega(), &QuadNum::from_ratio(9, 4));
        assert_eq!(zeros.to_incidence().unwrap().params(), (3, 2, 1));
        let ones = cretan_from_sbibd(&d, Convention::XOnOnes).unwrap();
        assert_eq!(ones.y(), &QuadNum::zero());
        assert_eq!(ones.to_incidence().unwrap().params(), (3, 1, 0));
    }

    #[test]
    fn certificates() {
        let c = cretan_from_sbibd(&d742(), Convention::XOnOnes).unwrap();
        let mut entries = c.matrix().entries().to_vec();
        entries[3] = QuadNum::from_ratio(-1, 2);
        let broken = ExactMatrix::new(7, entries).unwrap();
        assert!(matches!(verify_cretan(&broken), Err(CretanError::CharacteristicViolated { rows: (0, _) })));

        let big = ExactMatrix::from_int_rows(&[vec![1, 2], vec![2, 1]]);
        assert_eq!(verify_cretan(&big), Err(CretanError::EntryTooLarge { row: 0, col: 1 }));
        let no_unit = ExactMatrix::from_int_rows(&[vec![1, 0], vec![0, -1]]);
        assert_eq!(verify_cretan(&no_unit), Err(CretanError::NoUnitInRow(1)));
        let cols = ExactMatrix::from_int_rows(&[vec![1, 0], vec![1, 0]]);
        assert_eq!(verify_cretan(&cols), Err(CretanError::NoUnitInColumn(1)));
        let h = QuadNum::from_ratio(1, 2);
        let radius = ExactMatrix::from_rows(vec![
            vec![QuadNum::one(), QuadNum::zero(), QuadNum::zero()],
            vec![QuadNum::zero(), QuadNum::one(), h.clone()],
            vec![QuadNum::zero(), -&h, QuadNum::one()],
        ])
        .unwrap();
        assert_eq!(verify_cretan(&radius), Err(CretanError::RadiusViolated { row: 1 }));
        assert_eq!(verify_cretan(&ExactMatrix::identity(3)), Ok(QuadNum::one()));
    }

    #[test]
    fn rebuild_from_entries() {
        let c = cretan_from_sbibd(&paley_design(11).unwrap(), Convention::XOnZeros).unwrap();
        let rebuilt = CretanMatrix::from_matrix(c.matrix().clone(), Convention::XOnZeros).unwrap();
        assert_eq!(rebuilt, c);
        let three = ExactMatrix::from_rows(vec![
            vec![QuadNum::one(), QuadNum::from_ratio(1, 2), QuadNum::from_ratio(-1, 2)],
            vec![QuadNum::from_ratio(-1, 2), QuadNum::one(), QuadNum::from_ratio(1, 2)],
            vec![QuadNum::from_ratio(1, 2), QuadNum::from_ratio(-1, 2), QuadNum::one()],
        ])
        .unwrap();
        assert!(CretanMatrix::from_matrix(three, Convention::XOnOnes).is_err());
    }

    #[test]
    fn conventions_parse() {
        assert_eq!("x-on-ones".parse(), Ok(Convention::XOnOnes));
        assert_eq!("x_on_zeros".parse(), Ok(Convention::XOnZeros));
        assert!("x-on-twos".parse::<Convention>().is_err());
        assert_eq!(Convention::default(), Convention::XOnZeros);
    }
}
