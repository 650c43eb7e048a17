//! The Hadamard → SBIBD → Cretan → SBIBD → Hadamard round trip, and scans of
//! it over `t`.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::hadamard::{construct_for_t, Generator, HadamardError, HadamardMatrix};
use crate::qfield::QuadNum;

use super::{cretan_from_sbibd, det_bounds, mersenne_level, Convention, CretanError, CretanMatrix, DetBounds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    CoreToSbibd,
    CretanFromSbibd,
    MersenneLevel,
    CretanToIncidence,
    SbibdToHadamard,
    Recovery,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::CoreToSbibd => "core-to-sbibd",
            Stage::CretanFromSbibd => "cretan-from-sbibd",
            Stage::MersenneLevel => "mersenne-level",
            Stage::CretanToIncidence => "cretan-to-incidence",
            Stage::SbibdToHadamard => "sbibd-to-hadamard",
            Stage::Recovery => "recovery",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundtripError {
    #[error("stage {stage}: {source}")]
    Hadamard { stage: Stage, source: HadamardError },
    #[error("stage {stage}: {source}")]
    Cretan { stage: Stage, source: CretanError },
    #[error("stage mersenne-level: solver root {found} differs from closed form {expected}")]
    LevelMismatch { expected: Box<QuadNum>, found: Box<QuadNum> },
    #[error("stage recovery: recovered matrix differs from the normalized input at ({0},{1})", at.0, at.1)]
    NotRecovered { at: (usize, usize) },
}

impl RoundtripError {
    pub fn stage(&self) -> Stage {
        match self {
            RoundtripError::Hadamard { stage, .. } | RoundtripError::Cretan { stage, .. } => *stage,
            RoundtripError::LevelMismatch { .. } => Stage::MersenneLevel,
            RoundtripError::NotRecovered { .. } => Stage::Recovery,
        }
    }
}

/// Levels and weight under the convention the round trip did not use.
#[derive(Clone, Debug, PartialEq)]
pub struct AlternativeLevels {
    pub convention: Convention,
    pub y: QuadNum,
    pub omega: QuadNum,
    pub det: f64,
}

#[derive(Clone, Debug)]
pub struct RoundtripReport {
    pub t: usize,
    pub hadamard_order: usize,
    pub core_params: (usize, usize, usize),
    pub cretan: CretanMatrix,
    pub y: QuadNum,
    pub omega: QuadNum,
    /// `ωᵛ`, the exact squared determinant of the Cretan matrix.
    pub det_sq: QuadNum,
    pub det: f64,
    pub bounds: DetBounds,
    pub barba_ratio: f64,
    pub hadamard_ratio: f64,
    /// Parameters of the 1-cell incidence read back from the Cretan matrix.
    pub incidence_params: (usize, usize, usize),
    pub alternative: Option<AlternativeLevels>,
    pub larger_det_convention: Convention,
    pub recovered: HadamardMatrix,
    pub final_equals_initial: bool,
}

fn hadamard_stage(stage: Stage) -> impl Fn(HadamardError) -> RoundtripError {
    move |source| RoundtripError::Hadamard { stage, source }
}

fn cretan_stage(stage: Stage) -> impl Fn(CretanError) -> RoundtripError {
    move |source| RoundtripError::Cretan { stage, source }
}

/// Runs the full equivalence pipeline on a Hadamard matrix of order `4t`.
///
/// The x-on-zeros Cretan matrix puts `x = 1` on the zeros of the
/// (4t−1, 2t−1, t−1) core, so its 1-cells form the complementary
/// (4t−1, 2t, t) design; that is complemented back before bordering.
pub fn roundtrip(h: &HadamardMatrix) -> Result<RoundtripReport, RoundtripError> {
    let normal = h.normalize();
    let design = normal.core_to_sbibd().map_err(hadamard_stage(Stage::CoreToSbibd))?;
    let t = design.mersenne_t().expect("core_to_sbibd checks the family");

    let cretan = cretan_from_sbibd(&design, Convention::XOnZeros).map_err(cretan_stage(Stage::CretanFromSbibd))?;
    let expected = mersenne_level(t as u64);
    if cretan.y() != &expected {
        return Err(RoundtripError::LevelMismatch {
            expected: Box::new(expected),
            found: Box::new(cretan.y().clone()),
        });
    }

    let incidence = cretan.to_incidence().map_err(cretan_stage(Stage::CretanToIncidence))?;
    let recovered =
        crate::hadamard::sbibd_to_hadamard(&incidence.complement()).map_err(hadamard_stage(Stage::SbibdToHadamard))?;
    if let Some(at) = first_difference(&recovered, &normal) {
        return Err(RoundtripError::NotRecovered { at });
    }

    let weight = cretan.weight_and_det();
    let v = cretan.order();
    let bounds = det_bounds(v);
    let omega_f = weight.omega.to_f64();
    let alternative = cretan_from_sbibd(&design, Convention::XOnOnes).ok().map(|alt| AlternativeLevels {
        convention: Convention::XOnOnes,
        y: alt.y().clone(),
        omega: alt.omega().clone(),
        det: alt.weight_and_det().det_float,
    });
    let larger_det_convention = match &alternative {
        Some(alt) => {
            let ord = alt.omega.try_cmp(&weight.omega).unwrap_or_else(|_| alt.omega.to_f64().total_cmp(&omega_f));
            if ord == Ordering::Greater {
                alt.convention
            } else {
                Convention::XOnZeros
            }
        }
        None => Convention::XOnZeros,
    };

    Ok(RoundtripReport {
        t,
        hadamard_order: h.order(),
        core_params: design.params(),
        y: cretan.y().clone(),
        omega: weight.omega.clone(),
        det_sq: weight.det_sq,
        det: weight.det_float,
        barba_ratio: bounds.barba_ratio(omega_f).unwrap_or(f64::NAN),
        hadamard_ratio: bounds.hadamard_ratio(omega_f),
        bounds,
        incidence_params: incidence.params(),
        alternative,
        larger_det_convention,
        final_equals_initial: true,
        recovered,
        cretan,
    })
}

fn first_difference(a: &HadamardMatrix, b: &HadamardMatrix) -> Option<(usize, usize)> {
    if a.order() != b.order() {
        return Some((0, 0));
    }
    let n = a.order();
    (0..n * n).map(|idx| (idx / n, idx % n)).find(|&(i, j)| a.get(i, j) != b.get(i, j))
}

#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)] // Pass is the common row
pub enum ScanOutcome {
    Pass {
        generator: Generator,
        y: QuadNum,
        omega: QuadNum,
        det: f64,
        barba_ratio: f64,
    },
    /// Neither Sylvester nor Paley applies; says nothing about existence.
    NoGenerator,
    Fail(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub t: usize,
    pub order: usize,
    pub outcome: ScanOutcome,
}

/// Round trips for every `t ≤ t_max` with a built-in generator. Rows are
/// computed in parallel and returned in order of `t`.
pub fn scan(t_max: usize) -> Vec<ScanRow> {
    (1..=t_max)
        .into_par_iter()
        .map(|t| {
            let outcome = match construct_for_t(t) {
                Err(HadamardError::NoGenerator(_)) => ScanOutcome::NoGenerator,
                Err(e) => ScanOutcome::Fail(e.to_string()),
                Ok((generator, h)) => match roundtrip(&h) {
                    Ok(r) => {
                        ScanOutcome::Pass { generator, y: r.y, omega: r.omega, det: r.det, barba_ratio: r.barba_ratio }
                    }
                    Err(e) => ScanOutcome::Fail(e.to_string()),
                },
            };
            ScanRow { t, order: 4 * t, outcome }
        })
        .collect()
}
