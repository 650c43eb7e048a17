//! Text interchange formats.
//!
//! * incidence: optional `sbibd v k lambda` header, then `v` lines of `0`/`1`.
//! * ± grid: `n` lines of `+`/`-`.
//! * matrix JSON: `{"order": n, "disc": d, "entries": [[{"a":[p,q],"b":[r,s]}, …], …]}`,
//!   entry = p/q + (r/s)·√d, with an optional `"cretan"` metadata object.
//! * PGM: plain `P2` portrait, one gray level per entry.
//!
//! Writers are deterministic, and parsing then re-writing a file produced by
//! a writer reproduces it byte for byte.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Number;
use thiserror::Error;

use crate::cretan::{Convention, CretanError, CretanMatrix};
use crate::designs::{verify_design, Design, DesignError};
use crate::exactmat::{ExactMatrix, MatrixError};
use crate::hadamard::{verify_hadamard, HadamardError, HadamardMatrix};
use crate::qfield::{QuadNum, Rational};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header says ({0},{1},{2}) but the incidence is ({3},{4},{5})", stated.0, stated.1, stated.2, found.0, found.1, found.2)]
    HeaderMismatch { stated: (usize, usize, usize), found: (usize, usize, usize) },
    #[error("invalid JSON matrix: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid JSON matrix: {0}")]
    Schema(String),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Hadamard(#[from] HadamardError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Cretan(#[from] CretanError),
}

/// What a file holds, judged by its first non-blank line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Incidence,
    PlusMinusGrid,
    MatrixJson,
    Pgm,
}

pub fn detect(text: &str) -> Option<FileKind> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty())?;
    if first.starts_with('{') {
        Some(FileKind::MatrixJson)
    } else if first.starts_with("P2") {
        Some(FileKind::Pgm)
    } else if first.starts_with("sbibd") || first.chars().all(|c| c == '0' || c == '1') {
        Some(FileKind::Incidence)
    } else if first.chars().all(|c| c == '+' || c == '-') {
        Some(FileKind::PlusMinusGrid)
    } else {
        None
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

pub fn write_incidence(design: &Design) -> String {
    let (v, k, lambda) = design.params();
    let mut out = format!("sbibd {v} {k} {lambda}\n");
    for row in design.rows() {
        out.extend(row.iter().map(|&c| if c == 1 { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

pub fn parse_incidence(text: &str) -> Result<Design, FormatError> {
    let mut lines = content_lines(text).peekable();
    let mut header = None;
    if let Some(&(line, first)) = lines.peek() {
        if let Some(rest) = first.strip_prefix("sbibd") {
            let nums: Vec<usize> = rest
                .split_whitespace()
                .map(usize::from_str)
                .collect::<Result<_, _>>()
                .map_err(|e| FormatError::Syntax { line, message: format!("bad header: {e}") })?;
            if nums.len() != 3 {
                return Err(FormatError::Syntax { line, message: "header needs v k lambda".into() });
            }
            header = Some((nums[0], nums[1], nums[2]));
            lines.next();
        }
    }
    let mut rows = Vec::new();
    for (line, l) in lines {
        let row = l
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(FormatError::Syntax { line, message: format!("unexpected {other:?} in incidence row") }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let design = verify_design(&rows)?;
    if let Some(stated) = header {
        if stated != design.params() {
            return Err(FormatError::HeaderMismatch { stated, found: design.params() });
        }
    }
    Ok(design)
}

pub fn write_grid(h: &HadamardMatrix) -> String {
    let mut out = String::with_capacity(h.order() * (h.order() + 1));
    for row in h.rows() {
        out.extend(row.iter().map(|&e| if e > 0 { '+' } else { '-' }));
        out.push('\n');
    }
    out
}

pub fn parse_grid(text: &str) -> Result<HadamardMatrix, FormatError> {
    let rows = content_lines(text)
        .map(|(line, l)| {
            l.chars()
                .map(|c| match c {
                    '+' => Ok(1i64),
                    '-' => Ok(-1i64),
                    other => Err(FormatError::Syntax { line, message: format!("unexpected {other:?} in ± grid") }),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(verify_hadamard(&rows)?)
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    a: [Number; 2],
    b: [Number; 2],
}

/// Metadata block attached to a serialized Cretan matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CretanMeta {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
    pub convention: String,
    pub y: String,
    pub omega: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    order: usize,
    disc: u64,
    entries: Vec<Vec<EntryJson>>,
    #[serde(default)]
    cretan: Option<CretanMeta>,
}

fn number(n: &BigInt) -> Number {
    Number::from_str(&n.to_string()).expect("integers are valid JSON numbers")
}

fn big_int(n: &Number) -> Result<BigInt, FormatError> {
    BigInt::from_str(&n.to_string()).map_err(|_| FormatError::Schema(format!("{n} is not an integer")))
}

fn fraction(pair: &[Number; 2]) -> Result<Rational, FormatError> {
    let den = big_int(&pair[1])?;
    if den == BigInt::from(0) {
        return Err(FormatError::Schema("zero denominator".into()));
    }
    Ok(Rational::new(big_int(&pair[0])?, den))
}

fn entry_json(e: &QuadNum) -> String {
    let a = e.rational_part();
    let b = e.radical_part();
    let entry = EntryJson { a: [number(a.numer()), number(a.denom())], b: [number(b.numer()), number(b.denom())] };
    serde_json::to_string(&entry).expect("entries serialize")
}

fn write_matrix_body(m: &ExactMatrix, out: &mut String) {
    let _ = write!(out, "{{\"order\": {}, \"disc\": {}, \"entries\": [", m.order(), m.disc());
    for (i, row) in m.rows().enumerate() {
        out.push_str(if i == 0 { "\n  [" } else { ",\n  [" });
        let cells: Vec<String> = row.iter().map(entry_json).collect();
        out.push_str(&cells.join(", "));
        out.push(']');
    }
    out.push_str("\n]");
}

pub fn write_matrix_json(m: &ExactMatrix) -> String {
    let mut out = String::new();
    write_matrix_body(m, &mut out);
    out.push_str("}\n");
    out
}

pub fn cretan_meta(c: &CretanMatrix) -> CretanMeta {
    let (v, k, lambda) = c.source_design().params();
    CretanMeta {
        v,
        k,
        lambda,
        convention: c.convention().to_string(),
        y: c.y().to_string(),
        omega: c.omega().to_string(),
    }
}

pub fn write_cretan_json(c: &CretanMatrix) -> String {
    let mut out = String::new();
    write_matrix_body(c.matrix(), &mut out);
    let meta = serde_json::to_string(&cretan_meta(c)).expect("metadata serializes");
    let _ = writeln!(out, ",\n\"cretan\": {meta}}}");
    out
}

/// A parsed matrix file: the matrix and its Cretan metadata, if present.
pub fn parse_matrix_json(text: &str) -> Result<(ExactMatrix, Option<CretanMeta>), FormatError> {
    let raw: MatrixJson = serde_json::from_str(text)?;
    if raw.entries.len() != raw.order {
        return Err(FormatError::Schema(format!("order {} but {} rows", raw.order, raw.entries.len())));
    }
    let mut rows = Vec::with_capacity(raw.order);
    for row in &raw.entries {
        let parsed = row
            .iter()
            .map(|e| Ok(QuadNum::new(fraction(&e.a)?, fraction(&e.b)?, raw.disc)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        rows.push(parsed);
    }
    let m = ExactMatrix::from_rows(rows)?;
    if m.disc() != 1 && m.disc() != raw.disc {
        return Err(FormatError::Schema(format!("disc {} is not squarefree", raw.disc)));
    }
    Ok((m, raw.cretan))
}

/// Rebuilds and re-certifies a Cretan matrix file, cross-checking every
/// metadata field against the recomputed values.
pub fn parse_cretan_json(text: &str) -> Result<CretanMatrix, FormatError> {
    let (m, meta) = parse_matrix_json(text)?;
    let convention = match &meta {
        Some(meta) => Convention::from_str(&meta.convention).map_err(FormatError::Schema)?,
        None => Convention::XOnOnes,
    };
    let c = CretanMatrix::from_matrix(m, convention)?;
    if let Some(meta) = meta {
        let computed = cretan_meta(&c);
        let check = |field: &'static str, stated: &str, computed: &str, same: bool| {
            if same {
                Ok(())
            } else {
                Err(CretanError::Metadata { field, stated: stated.to_string(), computed: computed.to_string() })
            }
        };
        let params = (meta.v, meta.k, meta.lambda);
        let computed_params = (computed.v, computed.k, computed.lambda);
        check("parameters", &format!("{params:?}"), &format!("{computed_params:?}"), params == computed_params)?;
        let y = QuadNum::from_str(&meta.y).map_err(|e| FormatError::Schema(e.to_string()))?;
        check("y", &meta.y, &computed.y, &y == c.y())?;
        let omega = QuadNum::from_str(&meta.omega).map_err(|e| FormatError::Schema(e.to_string()))?;
        check("omega", &meta.omega, &computed.omega, &omega == c.omega())?;
    }
    Ok(c)
}

/// Gray level `round(255·(value + 1)/2)`, rounding half away from zero and
/// clamping to `[0, 255]`. Decided exactly, not in floating point.
pub fn gray_level(value: &QuadNum) -> u8 {
    let scaled = &(&(value + &QuadNum::one()) * &QuadNum::from_int(255)) / &QuadNum::from_int(2);
    let guess = scaled.to_f64().round();
    if guess.is_nan() || guess <= 0.0 {
        // negative values clamp; an exact check covers the tie at 0
        let half = QuadNum::from_ratio(1, 2);
        return if scaled.try_cmp(&half).map(|o| o.is_ge()).unwrap_or(false) { 1 } else { 0 };
    }
    if guess >= 256.0 {
        return 255;
    }
    let mut g = guess as i64;
    let half = QuadNum::from_ratio(1, 2);
    let at = |g: i64| QuadNum::from_int(g);
    // g is right iff g − 1/2 ≤ scaled < g + 1/2 (ties go up, values are positive here)
    while g > 0 && (&at(g) - &half).try_cmp(&scaled).map(|o| o.is_gt()).unwrap_or(false) {
        g -= 1;
    }
    while (&at(g) + &half).try_cmp(&scaled).map(|o| o.is_le()).unwrap_or(false) {
        g += 1;
    }
    g.clamp(0, 255) as u8
}

pub fn render_pgm(m: &ExactMatrix, scale: usize) -> String {
    let scale = scale.max(1);
    let n = m.order();
    let side = n * scale;
    let mut out = format!("P2\n{side} {side}\n255\n");
    let grays: Vec<Vec<u8>> = m.rows().map(|r| r.iter().map(gray_level).collect()).collect();
    for row in grays.iter().take(n) {
        let line: Vec<String> =
            row.iter().flat_map(|&g| std::iter::repeat_n(g, scale)).map(|g| g.to_string()).collect();
        let line = line.join(" ");
        for _ in 0..scale {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

impl Pgm {
    pub fn pixel(&self, row: usize, col: usize) -> u16 {
        self.pixels[row * self.width + col]
    }
}

/// Plain PGM reader; `#` comments are skipped.
pub fn parse_pgm(text: &str) -> Result<Pgm, FormatError> {
    let syntax = |message: &str| FormatError::Syntax { line: 0, message: message.to_string() };
    let mut tokens = text.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(str::split_whitespace);
    if tokens.next() != Some("P2") {
        return Err(syntax("missing P2 magic"));
    }
    let mut next_num = |what: &str| -> Result<usize, FormatError> {
        tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| syntax(&format!("bad {what}")))
    };
    let width = next_num("width")?;
    let height = next_num("height")?;
    let maxval = next_num("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(syntax("maxval out of range"));
    }
    let pixels = (0..width * height)
        .map(|_| {
            let p = next_num("pixel")?;
            if p > maxval {
                return Err(syntax("pixel exceeds maxval"));
            }
            Ok(p as u16)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Pgm { width, height, maxval: maxval as u16, pixels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cretan::cretan_from_sbibd;
    use crate::designs::{circulant_incidence, paley_design};
    use crate::hadamard::{paley_hadamard, sylvester};
    use crate::qfield::rational;

    #[test]
    fn incidence_text() {
        let d = paley_design(7).unwrap();
        let text = write_incidence(&d);
        assert!(text.starts_with("sbibd 7 3 1\n0110100\n"));
        assert_eq!(parse_incidence(&text).unwrap(), d);
        let headless: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert_eq!(parse_incidence(&headless).unwrap(), d);
        let lying = text.replacen("sbibd 7 3 1", "sbibd 7 4 2", 1);
        assert!(matches!(parse_incidence(&lying), Err(FormatError::HeaderMismatch { .. })));
        assert!(matches!(parse_incidence("sbibd 3 1 0\n102\n"), Err(FormatError::Syntax { line: 2, .. })));
    }

    #[test]
    fn grid_text() {
        let h = paley_hadamard(11).unwrap();
        let text = write_grid(&h);
        assert_eq!(parse_grid(&text).unwrap(), h);
        assert_eq!(write_grid(&sylvester(1)), "++\n+-\n");
        assert!(parse_grid("++\n++\n").is_err());
    }

    #[test]
    fn matrix_json() {
        let c = cretan_from_sbibd(&circulant_incidence(&[1, 1, 1, 0, 1, 0, 0]).unwrap(), Convention::XOnOnes).unwrap();
        let text = write_matrix_json(c.matrix());
        assert!(text.starts_with("{\"order\": 7, \"disc\": 2, \"entries\": [\n  [{\"a\":[1,1],\"b\":[0,1]}"));
        let (m, meta) = parse_matrix_json(&text).unwrap();
        assert_eq!(&m, c.matrix());
        assert_eq!(meta, None);
        assert_eq!(write_matrix_json(&m), text);
    }

    #[test]
    fn cretan_json() {
        let c = cretan_from_sbibd(&paley_design(7).unwrap(), Convention::XOnZeros).unwrap();
        let text = write_cretan_json(&c);
        assert!(text.contains(
            r#""cretan": {"v":7,"k":3,"lambda":1,"convention":"x-on-zeros","y":"-2/1 + 1/1*sqrt(2)","omega":"22/1 + -12/1*sqrt(2)"}"#
        ));
        let back = parse_cretan_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(write_cretan_json(&back), text);
        let lying = text.replace("\"omega\":\"22/1", "\"omega\":\"23/1");
        assert!(matches!(
            parse_cretan_json(&lying),
            Err(FormatError::Cretan(CretanError::Metadata { field: "omega", .. }))
        ));
    }

    #[test]
    fn json_rejects_garbage() {
        assert!(parse_matrix_json("{\"order\": 1, \"disc\": 1, \"entries\": [[{\"a\":[1,0],\"b\":[0,1]}]]}").is_err());
        assert!(parse_matrix_json("{\"order\": 2, \"disc\": 1, \"entries\": [[{\"a\":[1,1],\"b\":[0,1]}]]}").is_err());
        assert!(parse_matrix_json("{\"order\": 1, \"disc\": 1, \"entries\": [], \"extra\": 1}").is_err());
        assert!(parse_matrix_json("{\"order\": 1, \"disc\": 1, \"entries\": [[{\"a\":[1.5,1],\"b\":[0,1]}]]}").is_err());
        // big integers survive
        let (m, _) = parse_matrix_json(
            "{\"order\": 1, \"disc\": 1, \"entries\": [[{\"a\":[123456789012345678901234567890,1],\"b\":[0,1]}]]}",
        )
        .unwrap();
        assert_eq!(m.get(0, 0).rational_part().numer().to_string(), "123456789012345678901234567890");
    }

    #[test]
    fn detection() {
        assert_eq!(detect("sbibd 3 1 0\n100\n"), Some(FileKind::Incidence));
        assert_eq!(detect("\n011\n"), Some(FileKind::Incidence));
        assert_eq!(detect("+-\n"), Some(FileKind::PlusMinusGrid));
        assert_eq!(detect("{\"order\""), Some(FileKind::MatrixJson));
        assert_eq!(detect("P2\n1 1\n255\n0\n"), Some(FileKind::Pgm));
        assert_eq!(detect("hello"), None);
        assert_eq!(detect(""), None);
    }

    #[test]
    fn gray_levels() {
        assert_eq!(gray_level(&QuadNum::one()), 255);
        assert_eq!(gray_level(&QuadNum::from_int(-1)), 0);
        assert_eq!(gray_level(&QuadNum::zero()), 128);
        assert_eq!(gray_level(&QuadNum::new(rational(-2, 1), rational(1, 1), 2)), 53);
        assert_eq!(gray_level(&QuadNum::from_int(5)), 255);
        assert_eq!(gray_level(&QuadNum::from_int(-5)), 0);
        // 255(v+1)/2 = 1/2 exactly: rounds up to 1
        assert_eq!(gray_level(&QuadNum::from_ratio(-254, 255)), 1);
        assert_eq!(gray_level(&QuadNum::from_ratio(-2, 3)), 43);
    }

    #[test]
    fn portraits() {
        let c = cretan_from_sbibd(&circulant_incidence(&[1, 1, 1, 0, 1, 0, 0]).unwrap(), Convention::XOnOnes).unwrap();
        let text = render_pgm(c.matrix(), 1);
        assert!(text.starts_with("P2\n7 7\n255\n255 255 255 53 255 53 53\n"));
        let pgm = parse_pgm(&text).unwrap();
        assert_eq!((pgm.width, pgm.height, pgm.maxval), (7, 7, 255));
        let big = parse_pgm(&render_pgm(c.matrix(), 3)).unwrap();
        assert_eq!(big.width, 21);
        assert_eq!(big.pixel(4, 10), pgm.pixel(1, 3));
        let h = render_pgm(&sylvester(3).to_exact(), 1);
        let px = parse_pgm(&h).unwrap().pixels;
        assert!(px.iter().all(|&p| p == 0 || p == 255));
        assert!(parse_pgm("P5\n1 1\n255\n0").is_err());
        assert!(parse_pgm("P2\n2 1\n255\n0").is_err());
    }
}
