//! Characteristic equations of two-level patterns and their exact roots.

use std::cmp::Ordering;
use std::fmt;

use crate::numtheory::squarefree_decompose;
use crate::qfield::{rational_int, QuadNum, Rational};

use super::{CretanError, TwoLevelPattern};

/// Coefficients of the characteristic polynomial
/// `yy·y² + xy·x·y + xx·x²`: the inner product of any two distinct rows of
/// a pattern with level `x` on its 1-cells and `y` on its 0-cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CharacteristicCoeffs {
    pub yy: i64,
    pub xy: i64,
    pub xx: i64,
}

impl CharacteristicCoeffs {
    /// Value of the polynomial at `x = 1`.
    pub fn eval(&self, y: &QuadNum) -> QuadNum {
        &(&QuadNum::from_int(self.yy) * &y.square())
            + &(&(&QuadNum::from_int(self.xy) * y) + &QuadNum::from_int(self.xx))
    }

    pub fn discriminant(&self) -> i64 {
        self.xy * self.xy - 4 * self.yy * self.xx
    }

    /// Coefficients forced by the parameters of an SBIBD mask: two rows
    /// share `λ` ones, `v − 2k + λ` zeros, and differ in `2(k − λ)` columns.
    pub fn from_params(v: usize, k: usize, lambda: usize) -> Self {
        let (v, k, l) = (v as i64, k as i64, lambda as i64);
        CharacteristicCoeffs { yy: v - 2 * k + l, xy: 2 * (k - l), xx: l }
    }
}

impl fmt::Display for CharacteristicCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [(self.xx, "x²"), (self.xy, "xy"), (self.yy, "y²")];
        let mut first = true;
        for (c, name) in terms.into_iter().filter(|(c, _)| *c != 0) {
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            if !first {
                f.write_str(" ")?;
            }
            let mag = c.unsigned_abs();
            let mag = if mag == 1 { String::new() } else { mag.to_string() };
            if first {
                write!(f, "{sign}{mag}{name}")?;
            } else {
                write!(f, "{sign} {mag}{name}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        f.write_str(" = 0")
    }
}

/// The solved characteristic equation at `x = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSolution {
    pub coeffs: CharacteristicCoeffs,
    pub discriminant: i64,
    /// All real roots, `+√m` branch first.
    pub roots: Vec<QuadNum>,
    /// The selected root, with `|y| ≤ 1`.
    pub y: QuadNum,
}

/// Counts, over every pair of distinct rows, how many columns hold
/// `(x, x)`, one `x`, or `(y, y)`. All pairs must agree.
pub fn characteristic_coeffs(pattern: &TwoLevelPattern) -> Result<CharacteristicCoeffs, CretanError> {
    let mask = pattern.mask();
    let v = mask.v();
    let pair_counts = |i: usize, j: usize| {
        let mut c = CharacteristicCoeffs { yy: 0, xy: 0, xx: 0 };
        for (&a, &b) in mask.row(i).iter().zip(mask.row(j)) {
            match (a, b) {
                (1, 1) => c.xx += 1,
                (0, 0) => c.yy += 1,
                _ => c.xy += 1,
            }
        }
        c
    };
    let reference = pair_counts(0, 1);
    for i in 0..v {
        for j in i + 1..v {
            if pair_counts(i, j) != reference {
                return Err(CretanError::NonUniform { rows: (i, j) });
            }
        }
    }
    Ok(reference)
}

/// Fixes `x = 1` and solves the characteristic equation exactly.
///
/// Among the real roots with `|y| ≤ 1`, nonzero roots are preferred (a zero
/// level erases the pattern), then the smallest `|y|`, then the root with
/// the larger radical part.
pub fn solve_levels(pattern: &TwoLevelPattern) -> Result<LevelSolution, CretanError> {
    solve_characteristic(characteristic_coeffs(pattern)?)
}

/// Root selection of [`solve_levels`] applied to bare coefficients.
pub fn solve_characteristic(coeffs: CharacteristicCoeffs) -> Result<LevelSolution, CretanError> {
    let discriminant = coeffs.discriminant();
    let roots = real_roots(&coeffs)?;

    let one = QuadNum::one();
    let mut feasible: Vec<QuadNum> = roots
        .iter()
        .filter(|r| r.abs().try_cmp(&one).map(|o| o != Ordering::Greater).unwrap_or(false))
        .cloned()
        .collect();
    if feasible.is_empty() {
        return Err(CretanError::Infeasible { roots });
    }
    feasible.sort_by(|p, q| {
        p.is_zero()
            .cmp(&q.is_zero())
            .then_with(|| p.abs().try_cmp(&q.abs()).unwrap_or(Ordering::Equal))
            .then_with(|| q.radical_part().cmp(p.radical_part()))
    });
    let y = feasible.swap_remove(0);
    debug_assert!(coeffs.eval(&y).is_zero());
    Ok(LevelSolution { coeffs, discriminant, roots, y })
}

fn real_roots(c: &CharacteristicCoeffs) -> Result<Vec<QuadNum>, CretanError> {
    if c.yy == 0 {
        // linear: xy·y + xx = 0
        if c.xy == 0 {
            return Err(CretanError::NoLevelEquation(*c));
        }
        return Ok(vec![QuadNum::from_ratio(-c.xx, c.xy)]);
    }
    let disc = c.discriminant();
    if disc < 0 {
        return Err(CretanError::NegativeDiscriminant(disc));
    }
    let (s, m) = squarefree_decompose(disc as u64);
    let denom = rational_int(2 * c.yy);
    let centre = rational_int(-c.xy) / &denom;
    let offset = Rational::from_integer(s.into()) / &denom;
    let plus = QuadNum::new(centre.clone(), offset.clone(), m);
    let minus = QuadNum::new(centre, -offset, m);
    // "+√m branch" means the positive radical coefficient
    let (first, second) = if plus.radical_part() >= minus.radical_part() { (plus, minus) } else { (minus, plus) };
    if first == second {
        Ok(vec![first])
    } else {
        Ok(vec![first, second])
    }
}

/// Closed-form level `(−t + √t)/(t − 1)`; `t = 1` is the root `−1/2` of the
/// linear equation `2y + 1 = 0`.
pub fn mersenne_level(t: u64) -> QuadNum {
    assert!(t >= 1, "t must be positive");
    if t == 1 {
        return QuadNum::from_ratio(-1, 2);
    }
    let ti = i64::try_from(t).expect("t fits in i64");
    let den = rational_int(ti - 1);
    QuadNum::new(rational_int(-ti) / &den, Rational::from_integer(1.into()) / den, t)
}
