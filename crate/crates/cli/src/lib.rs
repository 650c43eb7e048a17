//! Argument parsing, dispatch and report rendering for the `cretan-forge`
//! binary. Everything writes through caller-supplied streams so the whole
//! command surface runs in-process under test.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use cretan_forge::cretan::{det_bounds, roundtrip, scan, verify_cretan, Convention, RoundtripReport, ScanOutcome};
use cretan_forge::formats::{self, FileKind};
use cretan_forge::hadamard::{construct_for_t, paley_hadamard, sbibd_to_hadamard, sylvester, HadamardMatrix};
use cretan_forge::numtheory::power_of_two_exponent;
use cretan_forge::{cretan_from_sbibd, CretanMatrix, ExactMatrix, QuadNum};

/// Version of the JSON report layout.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "cretan-forge", version, about = "Exact Hadamard, SBIBD and Cretan matrix toolkit")]
pub struct Cli {
    /// Emit reports as JSON.
    #[arg(long, global = true, env = "CRETAN_FORGE_JSON", value_parser = clap::builder::FalseyValueParser::new())]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Io {
    /// Input file; stdin when omitted.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Sylvester,
    Paley,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    XOnOnes,
    XOnZeros,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::XOnOnes => Convention::XOnOnes,
            ConventionArg::XOnZeros => Convention::XOnZeros,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a Hadamard matrix as a ± grid.
    GenHadamard {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Normalize a Hadamard matrix so its first row and column are +1.
    Normalize(Io),
    /// Extract the SBIBD(4t−1, 2t−1, t−1) core of a Hadamard matrix.
    ToSbibd(Io),
    /// Complement an incidence matrix.
    Complement(Io),
    /// Solve the two-level Cretan matrix of an SBIBD.
    ToCretan {
        #[arg(long, value_enum, default_value = "x-on-zeros")]
        convention: ConventionArg,
        #[command(flatten)]
        io: Io,
    },
    /// Read the 1-cells of a Cretan matrix back as an incidence matrix.
    ToIncidence(Io),
    /// Border an SBIBD(4t−1, 2t−1, t−1) into a normalized Hadamard matrix.
    ToHadamard(Io),
    /// Certify any supported file.
    Verify {
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
    },
    /// Determinant bounds at an order.
    Bounds {
        #[arg(long)]
        order: usize,
    },
    /// Hadamard → SBIBD → Cretan → SBIBD → Hadamard, from `--t` or a ± grid.
    #[command(group = clap::ArgGroup::new("source"))]
    Roundtrip {
        #[arg(long, group = "source")]
        t: Option<usize>,
        #[arg(long = "in", value_name = "FILE", group = "source")]
        input: Option<PathBuf>,
    },
    /// Round trips for every t up to a limit.
    Scan {
        #[arg(long)]
        t_max: usize,
    },
    /// Plain PGM portrait of a matrix file.
    Render {
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=64))]
        scale: u32,
    },
}

/// A failed command; `message` names the failing certificate.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn check(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }
}

/// Ordered key/value result of a command.
#[derive(Debug, Default)]
pub struct Report {
    verb: &'static str,
    fields: Vec<(&'static str, Value)>,
}

impl Report {
    fn new(verb: &'static str) -> Self {
        Report { verb, fields: Vec::new() }
    }

    fn field(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.fields.push((key, value.into()));
        self
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("schema".into(), json!(SCHEMA));
        map.insert("verb".into(), json!(self.verb));
        for (k, v) in &self.fields {
            map.insert((*k).into(), v.clone());
        }
        Value::Object(map)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&text_value(v));
            out.push('\n');
        }
        out
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "n/a".into(),
        Value::Array(items) => items.iter().map(text_value).collect::<Vec<_>>().join(" "),
        Value::Object(map) => match (map.get("exact"), map.get("float")) {
            (Some(e), Some(f)) => format!("{} (≈ {})", text_value(e), text_value(f)),
            _ => map.iter().map(|(k, v)| format!("{k}={}", text_value(v))).collect::<Vec<_>>().join(", "),
        },
        other => other.to_string(),
    }
}

/// Floats for reports: shortest round-trip form, exponent form outside a
/// readable range.
fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = if x == 0.0 || (1e-4..1e15).contains(&x.abs()) { format!("{x}") } else { format!("{x:e}") };
    Value::Number(text.parse().expect("finite floats are JSON numbers"))
}

fn exact(q: &QuadNum) -> Value {
    json!({ "exact": q.to_string(), "float": float(q.to_f64()) })
}

fn params(p: (usize, usize, usize)) -> Value {
    json!([p.0, p.1, p.2])
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Parses `argv`, runs the command, and returns the exit code. Usage errors
/// exit 2 through clap's own reporting.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli, stdin, stdout) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &Option<PathBuf>, stdin: &mut dyn Read) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::input(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn write_output(path: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::input(format!("cannot write stdout: {e}"))),
    }
}

fn emit(cli: &Cli, report: &Report, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = if cli.json {
        let mut s = serde_json::to_string_pretty(&report.to_json()).expect("reports serialize");
        s.push('\n');
        s
    } else {
        report.to_text()
    };
    write_output(&None, &text, stdout)
}

/// Artifact-producing verbs write the artifact. With `--json` and no
/// `--out`, the artifact is embedded in the report instead.
fn deliver(
    cli: &Cli,
    out: &Option<PathBuf>,
    artifact: String,
    report: Report,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    if !cli.json {
        return write_output(out, &artifact, stdout);
    }
    let report = match out {
        Some(_) => {
            write_output(out, &artifact, stdout)?;
            report
        }
        None => report.field("output", artifact),
    };
    emit(cli, &report, stdout)
}

fn grid(text: &str) -> Result<HadamardMatrix, Failure> {
    formats::parse_grid(text).map_err(Failure::check)
}

fn incidence(text: &str) -> Result<cretan_forge::Design, Failure> {
    formats::parse_incidence(text).map_err(Failure::check)
}

/// A Cretan matrix file; bare matrices without metadata read as x-on-ones.
fn cretan(text: &str) -> Result<CretanMatrix, Failure> {
    formats::parse_cretan_json(text).map_err(Failure::check)
}

fn any_matrix(text: &str) -> Result<ExactMatrix, Failure> {
    match formats::detect(text) {
        Some(FileKind::MatrixJson) => Ok(formats::parse_matrix_json(text).map_err(Failure::check)?.0),
        Some(FileKind::PlusMinusGrid) => Ok(grid(text)?.to_exact()),
        Some(FileKind::Incidence) => Ok(incidence(text)?.incidence_matrix()),
        Some(FileKind::Pgm) => Err(Failure::input("a PGM image is not a matrix file")),
        None => Err(Failure::input("unrecognized input format")),
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::GenHadamard { order, method, out } => {
            let h = match method {
                Method::Sylvester => {
                    let k = power_of_two_exponent(*order as u64)
                        .ok_or_else(|| Failure::check(format!("sylvester: order {order} is not a power of two")))?;
                    sylvester(k)
                }
                Method::Paley => {
                    if *order < 4 {
                        return Err(Failure::check(format!("paley: order {order} is too small")));
                    }
                    paley_hadamard(*order as u64 - 1).map_err(|e| Failure::check(format!("paley: {e}")))?
                }
            };
            let report = Report::new("gen-hadamard")
                .field("order", h.order())
                .field("method", format!("{method:?}").to_lowercase());
            deliver(cli, out, formats::write_grid(&h), report, stdout)
        }
        Command::Normalize(io) => {
            let h = grid(&read_input(&io.input, stdin)?)?;
            let n = h.normalize();
            let report = Report::new("normalize").field("order", n.order()).field("was_normalized", h.is_normalized());
            deliver(cli, &io.out, formats::write_grid(&n), report, stdout)
        }
        Command::ToSbibd(io) => {
            let h = grid(&read_input(&io.input, stdin)?)?;
            let d = h.core_to_sbibd().map_err(Failure::check)?;
            let report = Report::new("to-sbibd").field("params", params(d.params()));
            deliver(cli, &io.out, formats::write_incidence(&d), report, stdout)
        }
        Command::Complement(io) => {
            let d = incidence(&read_input(&io.input, stdin)?)?.complement();
            let report = Report::new("complement").field("params", params(d.params()));
            deliver(cli, &io.out, formats::write_incidence(&d), report, stdout)
        }
        Command::ToCretan { convention, io } => {
            let d = incidence(&read_input(&io.input, stdin)?)?;
            let c = cretan_from_sbibd(&d, (*convention).into()).map_err(Failure::check)?;
            let report = cretan_report(Report::new("to-cretan"), &c);
            deliver(cli, &io.out, formats::write_cretan_json(&c), report, stdout)
        }
        Command::ToIncidence(io) => {
            let c = cretan(&read_input(&io.input, stdin)?)?;
            let d = c.to_incidence().map_err(Failure::check)?;
            let report = Report::new("to-incidence").field("params", params(d.params()));
            deliver(cli, &io.out, formats::write_incidence(&d), report, stdout)
        }
        Command::ToHadamard(io) => {
            let d = incidence(&read_input(&io.input, stdin)?)?;
            let h = sbibd_to_hadamard(&d).map_err(Failure::check)?;
            let report = Report::new("to-hadamard").field("order", h.order());
            deliver(cli, &io.out, formats::write_grid(&h), report, stdout)
        }
        Command::Verify { input } => {
            let report = verify(&read_input(input, stdin)?)?;
            emit(cli, &report, stdout)
        }
        Command::Bounds { order } => {
            if *order == 0 {
                return Err(Failure::input("order must be positive"));
            }
            let b = det_bounds(*order);
            let report = Report::new("bounds")
                .field("order", *order)
                .field("hadamard", float(b.hadamard))
                .field("barba", b.barba.map_or(Value::Null, float))
                .field("wojtas", b.wojtas.map_or(Value::Null, float))
                .field("best", float(b.best()));
            emit(cli, &report, stdout)
        }
        Command::Roundtrip { t, input } => {
            let (generator, h) = match t {
                Some(t) => {
                    let (g, h) = construct_for_t(*t).map_err(Failure::check)?;
                    (Some(g.to_string()), h)
                }
                None => (None, grid(&read_input(input, stdin)?)?),
            };
            let r = roundtrip(&h).map_err(Failure::check)?;
            let report = roundtrip_report(generator, &r);
            emit(cli, &report, stdout)
        }
        Command::Scan { t_max } => {
            if *t_max == 0 {
                return Err(Failure::input("t-max must be at least 1"));
            }
            let rows = scan(*t_max);
            let failed = rows.iter().filter(|r| matches!(r.outcome, ScanOutcome::Fail(_))).count();
            if cli.json {
                let items: Vec<Value> = rows.iter().map(scan_row_json).collect();
                emit(
                    cli,
                    &Report::new("scan").field("t_max", *t_max).field("failed", failed).field("rows", items),
                    stdout,
                )?;
            } else {
                write_output(&None, &scan_table(&rows), stdout)?;
            }
            if failed > 0 {
                return Err(Failure::check(format!("scan: {failed} round trip(s) failed")));
            }
            Ok(())
        }
        Command::Render { input, out, scale } => {
            let m = any_matrix(&read_input(input, stdin)?)?;
            let pgm = formats::render_pgm(&m, *scale as usize);
            let side = m.order() * *scale as usize;
            let report = Report::new("render").field("width", side).field("height", side);
            deliver(cli, out, pgm, report, stdout)
        }
    }
}

fn cretan_report(report: Report, c: &CretanMatrix) -> Report {
    let wd = c.weight_and_det();
    let bounds = det_bounds(c.order());
    let omega_f = wd.omega.to_f64();
    report
        .field("order", c.order())
        .field("source", params(c.source_design().params()))
        .field("convention", c.convention().to_string())
        .field("equation", c.solution().coeffs.to_string())
        .field("y", exact(c.y()))
        .field("omega", exact(&wd.omega))
        .field("det", float(wd.det_float))
        .field("hadamard_ratio", float(bounds.hadamard_ratio(omega_f)))
        .field("barba_ratio", bounds.barba_ratio(omega_f).map_or(Value::Null, float))
        .field("gram", "pass")
}

fn roundtrip_report(generator: Option<String>, r: &RoundtripReport) -> Report {
    let alternative = match &r.alternative {
        Some(a) => json!({
            "convention": a.convention.to_string(),
            "y": exact(&a.y),
            "omega": exact(&a.omega),
            "det": float(a.det),
        }),
        None => Value::Null,
    };
    Report::new("roundtrip")
        .field("t", r.t)
        .field("order", r.hadamard_order)
        .field("generator", generator.map_or(Value::Null, Value::String))
        .field("core", params(r.core_params))
        .field("convention", r.cretan.convention().to_string())
        .field("y", exact(&r.y))
        .field("omega", exact(&r.omega))
        .field("det_sq", r.det_sq.to_string())
        .field("det", float(r.det))
        .field("hadamard_bound", float(r.bounds.hadamard))
        .field("barba_bound", r.bounds.barba.map_or(Value::Null, float))
        .field("hadamard_ratio", float(r.hadamard_ratio))
        .field("barba_ratio", float(r.barba_ratio))
        .field("incidence", params(r.incidence_params))
        .field("alternative", alternative)
        .field("larger_det_convention", r.larger_det_convention.to_string())
        .field("gram", "pass")
        .field("final_equals_initial", pass(r.final_equals_initial))
}

fn scan_row_json(row: &cretan_forge::cretan::ScanRow) -> Value {
    let mut v = json!({ "t": row.t, "order": row.order });
    let obj = v.as_object_mut().expect("object literal");
    match &row.outcome {
        ScanOutcome::Pass { generator, y, omega, det, barba_ratio } => {
            obj.insert("status".into(), json!("pass"));
            obj.insert("generator".into(), json!(generator.to_string()));
            obj.insert("y".into(), exact(y));
            obj.insert("omega".into(), exact(omega));
            obj.insert("det".into(), float(*det));
            obj.insert("barba_ratio".into(), float(*barba_ratio));
        }
        ScanOutcome::NoGenerator => {
            obj.insert("status".into(), json!("no generator"));
        }
        ScanOutcome::Fail(msg) => {
            obj.insert("status".into(), json!("fail"));
            obj.insert("error".into(), json!(msg));
        }
    }
    v
}

fn scan_table(rows: &[cretan_forge::cretan::ScanRow]) -> String {
    let mut out = format!(
        "{:>4} {:>6} {:<12} {:<10} {:<36} {:<44} {:>12}\n",
        "t", "order", "status", "generator", "y", "omega", "det/barba"
    );
    for row in rows {
        let line = match &row.outcome {
            ScanOutcome::Pass { generator, y, omega, barba_ratio, .. } => format!(
                "{:>4} {:>6} {:<12} {:<10} {:<36} {:<44} {:>12.6}",
                row.t,
                row.order,
                "pass",
                generator.to_string(),
                y.to_string(),
                omega.to_string(),
                barba_ratio
            ),
            ScanOutcome::NoGenerator => format!("{:>4} {:>6} {:<12}", row.t, row.order, "no generator"),
            ScanOutcome::Fail(msg) => format!("{:>4} {:>6} {:<12} {msg}", row.t, row.order, "fail"),
        };
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn verify(text: &str) -> Result<Report, Failure> {
    let report = Report::new("verify");
    match formats::detect(text) {
        Some(FileKind::Incidence) => {
            let d = incidence(text)?;
            Ok(report.field("kind", "sbibd").field("params", params(d.params())).field("result", "pass"))
        }
        Some(FileKind::PlusMinusGrid) => {
            let h = grid(text)?;
            Ok(report
                .field("kind", "hadamard")
                .field("order", h.order())
                .field("normalized", h.is_normalized())
                .field("result", "pass"))
        }
        Some(FileKind::MatrixJson) => {
            let (m, meta) = formats::parse_matrix_json(text).map_err(Failure::check)?;
            if meta.is_some() {
                let c = cretan(text)?;
                return Ok(cretan_report(report.field("kind", "cretan"), &c).field("result", "pass"));
            }
            let omega = verify_cretan(&m).map_err(Failure::check)?;
            Ok(report
                .field("kind", "cretan")
                .field("order", m.order())
                .field("omega", exact(&omega))
                .field("gram", "pass")
                .field("result", "pass"))
        }
        Some(FileKind::Pgm) => {
            let p = formats::parse_pgm(text).map_err(Failure::check)?;
            Ok(report.field("kind", "pgm").field("width", p.width).field("height", p.height).field("result", "pass"))
        }
        None => Err(Failure::input("unrecognized input format")),
    }
}

/// Entry point for the binary: real process streams.
pub fn main_with_env() -> i32 {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}
