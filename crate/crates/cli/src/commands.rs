use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use loopk_core::cartan::CorootVector;
use loopk_core::conv::{Convolver, DEFAULT_LENGTH_CAP};
use loopk_core::laurent::LaurentPoly;
use loopk_core::positivity::{format_xpoly, scan_convolution, scan_qk, ScanReport};
use loopk_core::qk::{default_depth, qk_product};
use loopk_core::weyl::{AffElem, WeylGroup};
use loopk_core::Error;
use serde::Serialize;

use crate::cache::{convolve_cached, Cache};
use crate::checks::{run_suite, TypeFilter};
use crate::render::{q_monomial, Format, Table};
use crate::words::{parse_affine, parse_coroot, parse_finite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_POSITIVITY_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTEGRITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "loopk", version, about = "Structure constants of affine Grassmannians and quantum K-theory of flag varieties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,

    /// Directory for cached convolution tables.
    #[arg(long, global = true, env = "LOOPK_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads for scans (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Longest word the convolution engine accepts.
    #[arg(long, global = true, default_value_t = DEFAULT_LENGTH_CAP)]
    pub length_cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cartan data and positive roots.
    Roots {
        #[arg(long = "type")]
        type_label: String,
    },
    /// Finite Weyl group elements, or minimal affine representatives with --max-len.
    Weyl {
        #[arg(long = "type")]
        type_label: String,
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Convolution product of two Schubert classes of the affine Grassmannian.
    Conv {
        #[arg(long = "type")]
        type_label: String,
        /// Reduced word over 0..=rank, or `x@q`.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Quantum K-theory product of two Schubert classes of G/B.
    Qk {
        #[arg(long = "type")]
        type_label: String,
        /// Reduced word over 1..=rank.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Strictly antidominant coroot vector, e.g. `-1,-1`.
        #[arg(long, allow_hyphen_values = true)]
        depth: Option<String>,
    },
    /// Positivity scan over all pairs up to a length.
    Scan {
        #[arg(long = "type")]
        type_label: String,
        #[arg(long)]
        max_len: usize,
        #[arg(long, value_enum, default_value = "all")]
        kind: ScanKind,
        #[arg(long, allow_hyphen_values = true)]
        depth: Option<String>,
    },
    /// Golden values and property suites.
    Selftest {
        /// Comma-separated type labels (default: A1,A2,C2).
        #[arg(long = "type", value_delimiter = ',')]
        types: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    Conv,
    Qk,
    All,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Argument(_) | Error::LengthCap { .. } => EXIT_USAGE,
            Error::NotDivisible { .. } | Error::Singular(_) | Error::Integrity(_) => EXIT_INTEGRITY,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Io<'_> {
    fn print(&mut self, s: &str) {
        let _ = self.out.write_all(s.as_bytes());
    }

    fn warn(&mut self, s: &str) {
        let _ = writeln!(self.err, "warning: {s}");
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("report serializes");
    s.push('\n');
    s
}

fn emit(io: &mut Io, format: Format, table: &Table, value: &impl Serialize) {
    let s = match format {
        Format::Table => table.to_text(),
        Format::Csv => table.to_csv(),
        Format::Json => json(value),
    };
    io.print(&s);
}

fn convolver(cli: &Cli, label: &str) -> std::result::Result<Convolver, Failure> {
    if cli.length_cap == 0 {
        return Err(Failure::usage("--length-cap must be positive"));
    }
    Ok(Convolver::from_label(label)?.with_length_cap(cli.length_cap))
}

fn bracket(word: &[usize]) -> String {
    format!("[{}]", WeylGroup::format_word(word))
}

#[derive(Serialize)]
struct PairJson {
    x: Vec<usize>,
    q: Vec<i32>,
}

fn pair(g: &WeylGroup, w: &AffElem) -> PairJson {
    PairJson { x: g.word(w.x).to_vec(), q: w.q.coords().to_vec() }
}

fn cmd_roots(cli: &Cli, io: &mut Io, label: &str) -> CmdResult {
    let c = convolver(cli, label)?;
    let rs = c.root_system();
    #[derive(Serialize)]
    struct RootJson {
        omega: Vec<i32>,
        simple: Vec<i64>,
        coroot: Vec<i32>,
    }
    #[derive(Serialize)]
    struct RootsJson {
        #[serde(rename = "type")]
        type_label: String,
        cartan_matrix: Vec<Vec<i32>>,
        positive_roots: Vec<RootJson>,
        highest_root: Vec<i32>,
        theta_coroot: Vec<i32>,
        rho: Vec<i32>,
        dual_coxeter_number: i32,
        weyl_group_order: usize,
    }
    let roots: Vec<RootJson> = rs
        .positive_roots()
        .iter()
        .zip(rs.positive_coroots())
        .map(|(a, ac)| RootJson {
            omega: a.coords().to_vec(),
            simple: rs.root_lattice_coords(a).expect("roots lie in the root lattice"),
            coroot: ac.coords().to_vec(),
        })
        .collect();
    let mut t = Table::new(&["root (omega)", "root (simple)", "coroot (simple)"]);
    for r in &roots {
        let s: Vec<String> = r.simple.iter().map(|c| c.to_string()).collect();
        let cv: Vec<String> = r.coroot.iter().map(|c| c.to_string()).collect();
        let om: Vec<String> = r.omega.iter().map(|c| c.to_string()).collect();
        t.push(vec![format!("({})", om.join(",")), format!("({})", s.join(",")), format!("({})", cv.join(","))]);
    }
    let v = RootsJson {
        type_label: rs.cartan_type().to_string(),
        cartan_matrix: rs.cartan_matrix().to_vec(),
        positive_roots: roots,
        highest_root: rs.highest_root().coords().to_vec(),
        theta_coroot: rs.theta_coroot().coords().to_vec(),
        rho: rs.rho().coords().to_vec(),
        dual_coxeter_number: rs.dual_coxeter_number(),
        weyl_group_order: c.group().order(),
    };
    if cli.format == Format::Table {
        let rows: Vec<String> = v.cartan_matrix.iter().map(|r| format!("{r:?}")).collect();
        io.print(&format!(
            "type {}\ncartan matrix {}\nhighest root {}  theta coroot {}  rho {}  dual Coxeter number {}  |W| = {}\n\n",
            v.type_label,
            rows.join(" "),
            rs.highest_root(),
            rs.theta_coroot(),
            rs.rho(),
            v.dual_coxeter_number,
            v.weyl_group_order
        ));
    }
    emit(io, cli.format, &t, &v);
    Ok(EXIT_OK)
}

fn cmd_weyl(cli: &Cli, io: &mut Io, label: &str, max_len: Option<usize>) -> CmdResult {
    let c = convolver(cli, label)?;
    let g = c.group();
    #[derive(Serialize)]
    struct ElemJson {
        word: Vec<usize>,
        length: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        q: Option<Vec<i32>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        x: Option<Vec<usize>>,
    }
    let mut rows = Vec::new();
    match max_len {
        None => {
            for w in g.elements() {
                rows.push(ElemJson { word: g.word(w).to_vec(), length: g.length(w), q: None, x: None });
            }
        }
        Some(n) => {
            for w in g.minimal_reps_by_length(n).into_iter().flatten() {
                rows.push(ElemJson {
                    word: g.reduced_word(&w),
                    length: g.length_affine(&w),
                    x: Some(g.word(w.x).to_vec()),
                    q: Some(w.q.coords().to_vec()),
                });
            }
        }
    }
    let mut t = if max_len.is_some() { Table::new(&["word", "length", "x", "q"]) } else { Table::new(&["word", "length"]) };
    for r in &rows {
        let mut row = vec![bracket(&r.word), r.length.to_string()];
        if let (Some(x), Some(q)) = (&r.x, &r.q) {
            row.push(bracket(x));
            row.push(CorootVector::from_slice(q).to_string());
        }
        t.push(row);
    }
    emit(io, cli.format, &t, &rows);
    Ok(EXIT_OK)
}

fn cmd_conv(cli: &Cli, io: &mut Io, label: &str, u: &str, v: &str) -> CmdResult {
    let c = convolver(cli, label)?;
    let g = c.group();
    let mut parsed = Vec::new();
    for s in [u, v] {
        let p = parse_affine(g, s).map_err(Failure::usage)?;
        if let Some(w) = &p.warning {
            io.warn(w);
        }
        if !g.is_minimal(&p.value) {
            return Err(Failure::usage(format!(
                "{} is not a minimal coset representative (try {})",
                bracket(&g.reduced_word(&p.value)),
                bracket(&g.reduced_word(&g.min_coset_rep(&p.value)))
            )));
        }
        parsed.push(p.value);
    }
    let (u, v) = (parsed[0], parsed[1]);
    let cache = cli.cache_dir.as_ref().map(Cache::new);
    let mut warnings = Vec::new();
    let table = convolve_cached(&c, cache.as_ref(), &u, &v, &mut |w| warnings.push(w))?;
    for w in &warnings {
        io.warn(w);
    }

    #[derive(Serialize)]
    struct Row {
        w: Vec<usize>,
        pair: PairJson,
        length: usize,
        coeff: LaurentPoly,
    }
    #[derive(Serialize)]
    struct ConvJson {
        #[serde(rename = "type")]
        type_label: String,
        u: Vec<usize>,
        v: Vec<usize>,
        table: Vec<Row>,
    }
    let rows: Vec<Row> = table
        .iter()
        .map(|(w, coeff)| Row { w: g.reduced_word(w), pair: pair(g, w), length: g.length_affine(w), coeff: coeff.clone() })
        .collect();
    let mut t = Table::new(&["w", "x", "q", "length", "coeff"]);
    for r in &rows {
        t.push(vec![
            bracket(&r.w),
            bracket(&r.pair.x),
            CorootVector::from_slice(&r.pair.q).to_string(),
            r.length.to_string(),
            r.coeff.to_string(),
        ]);
    }
    let value = ConvJson {
        type_label: g.root_system().cartan_type().to_string(),
        u: g.reduced_word(&u),
        v: g.reduced_word(&v),
        table: rows,
    };
    emit(io, cli.format, &t, &value);
    Ok(EXIT_OK)
}

fn parse_depth(g: &WeylGroup, depth: Option<&str>) -> std::result::Result<CorootVector, Failure> {
    let d = match depth {
        Some(s) => parse_coroot(g, s).map_err(Failure::usage)?,
        None => default_depth(g.root_system()),
    };
    if !g.root_system().is_strictly_antidominant(&d) {
        return Err(Failure::usage(format!("depth {d} is not strictly antidominant")));
    }
    Ok(d)
}

fn cmd_qk(cli: &Cli, io: &mut Io, label: &str, x: &str, y: &str, depth: Option<&str>) -> CmdResult {
    let c = convolver(cli, label)?;
    let g = c.group();
    let d = parse_depth(g, depth)?;
    let mut parsed = Vec::new();
    for s in [x, y] {
        let p = parse_finite(g, s).map_err(Failure::usage)?;
        if let Some(w) = &p.warning {
            io.warn(w);
        }
        parsed.push(p.value);
    }
    let table = qk_product(&c, parsed[0], parsed[1], d)?;

    #[derive(Serialize)]
    struct Row {
        z: Vec<usize>,
        eta: Vec<i32>,
        coeff: LaurentPoly,
        source: Vec<usize>,
    }
    #[derive(Serialize)]
    struct QkJson {
        #[serde(rename = "type")]
        type_label: String,
        x: Vec<usize>,
        y: Vec<usize>,
        depth: Vec<i32>,
        table: Vec<Row>,
    }
    let rows: Vec<Row> = table
        .entries
        .iter()
        .map(|((z, eta), e)| Row {
            z: g.word(*z).to_vec(),
            eta: eta.coords().to_vec(),
            coeff: e.coeff.clone(),
            source: g.reduced_word(&e.source),
        })
        .collect();
    let mut t = Table::new(&["z", "q", "coeff", "source"]);
    for r in &rows {
        t.push(vec![bracket(&r.z), q_monomial(&r.eta), r.coeff.to_string(), bracket(&r.source)]);
    }
    let value = QkJson {
        type_label: g.root_system().cartan_type().to_string(),
        x: g.word(parsed[0]).to_vec(),
        y: g.word(parsed[1]).to_vec(),
        depth: d.coords().to_vec(),
        table: rows,
    };
    emit(io, cli.format, &t, &value);
    Ok(EXIT_OK)
}

/// Renders scan reports and picks the exit code: 1 iff any FAIL occurred.
pub fn report_scans(io: &mut Io, format: Format, reports: &[ScanReport]) -> i32 {
    let mut t = Table::new(&["kind", "type", "pairs", "constants", "passes", "fails", "complete", "max |coeff|", "max x-coeff"]);
    for r in reports {
        t.push(vec![
            r.kind.clone(),
            r.type_label.clone(),
            r.pairs.to_string(),
            r.constants.to_string(),
            r.passes.to_string(),
            r.failures.len().to_string(),
            (!r.incomplete).to_string(),
            r.max_abs_coeff.clone(),
            r.max_x_coeff.clone(),
        ]);
    }
    emit(io, format, &t, &reports);
    let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
    if format == Format::Table {
        for r in reports {
            for s in &r.skipped {
                io.print(&format!("skipped ({}): {s}\n", r.kind));
            }
            for f in &r.failures {
                io.print(&format!(
                    "FAIL ({}) {} x {} -> {}: coeff {} sign exponent {} status {:?} witness {} partial {}\n",
                    r.kind,
                    f.left,
                    f.right,
                    f.target,
                    f.coeff,
                    f.sign_exponent,
                    f.verdict.status,
                    f.verdict.witness.as_deref().unwrap_or("-"),
                    format_xpoly(&f.verdict.x_polynomial)
                ));
            }
        }
    }
    if failures > 0 {
        let _ = writeln!(io.err, "positivity FAIL found: {failures} constant(s); witnesses above");
        EXIT_POSITIVITY_FAIL
    } else {
        if reports.iter().any(|r| r.incomplete) {
            io.warn("scan incomplete: some pairs exceeded the length cap");
        }
        EXIT_OK
    }
}

fn cmd_scan(cli: &Cli, io: &mut Io, label: &str, max_len: usize, kind: ScanKind, depth: Option<&str>) -> CmdResult {
    let c = convolver(cli, label)?;
    let g = c.group();
    let mut reports = Vec::new();
    if matches!(kind, ScanKind::Conv | ScanKind::All) {
        reports.push(scan_convolution(&c, 0..=max_len)?);
    }
    if matches!(kind, ScanKind::Qk | ScanKind::All) {
        let d = parse_depth(g, depth)?;
        reports.push(scan_qk(&c, max_len, d)?);
    }
    Ok(report_scans(io, cli.format, &reports))
}

fn cmd_selftest(cli: &Cli, io: &mut Io, types: &[String]) -> CmdResult {
    let types: Vec<String> = if types.is_empty() {
        vec!["A1".into(), "A2".into(), "C2".into()]
    } else {
        types.iter().map(|t| t.trim().to_string()).collect()
    };
    for t in &types {
        loopk_core::cartan::build_root_system(t)?;
    }
    let report = run_suite(&TypeFilter(Some(types)));
    match cli.format {
        Format::Json => io.print(&json(&report)),
        Format::Table | Format::Csv => {
            let mut t = Table::new(&["criterion", "check", "result", "detail"]);
            for c in &report.checks {
                t.push(vec![
                    c.criterion.to_string(),
                    c.name.clone(),
                    if c.passed { "PASS" } else { "FAIL" }.into(),
                    c.detail.clone(),
                ]);
            }
            io.print(&if cli.format == Format::Csv { t.to_csv() } else { t.to_text() });
            if cli.format == Format::Table {
                io.print(&format!("\n{} passed, {} failed\n", report.passed, report.failed));
                for d in &report.discrepancies {
                    io.print(&format!("note: {d}\n"));
                }
            }
        }
    }
    Ok(if report.ok() { EXIT_OK } else { EXIT_INTEGRITY })
}

pub fn run(cli: &Cli, io: &mut Io) -> i32 {
    if let Some(n) = cli.jobs {
        if n == 0 {
            let _ = writeln!(io.err, "error: --jobs must be positive");
            return EXIT_USAGE;
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let res = match &cli.command {
        Command::Roots { type_label } => cmd_roots(cli, io, type_label),
        Command::Weyl { type_label, max_len } => cmd_weyl(cli, io, type_label, *max_len),
        Command::Conv { type_label, u, v } => cmd_conv(cli, io, type_label, u, v),
        Command::Qk { type_label, x, y, depth } => cmd_qk(cli, io, type_label, x, y, depth.as_deref()),
        Command::Scan { type_label, max_len, kind, depth } => {
            cmd_scan(cli, io, type_label, *max_len, *kind, depth.as_deref())
        }
        Command::Selftest { types } => cmd_selftest(cli, io, types),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.err, "error: {}", f.message);
            f.code
        }
    }
}

/// Parses arguments and runs; clap usage errors exit with code 2.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    run(&cli, &mut Io { out, err })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["loopk"];
        full.extend_from_slice(args);
        let code = main_with_args(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn conv_sl2_table() {
        let (code, out, _) = run_args(&["conv", "--type", "A1", "--u", "0", "--v", "0"]);
        assert_eq!(code, 0);
        // τ_2 = s_1 s_0 has the single reduced word [1,0]
        let rows: Vec<&str> = out.lines().skip(2).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].starts_with("[1,0] ") && rows[0].ends_with("e^(2)"));
        assert!(rows[1].starts_with("[0,1,0] ") && rows[1].ends_with("1 - e^(2)"));
    }

    #[test]
    fn conv_identity_and_json() {
        let (code, out, _) = run_args(&["conv", "--type", "A1", "--u", "", "--v", "0", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["type"], "A1");
        assert_eq!(v["table"].as_array().unwrap().len(), 1);
        assert_eq!(v["table"][0]["w"], serde_json::json!([0]));
        assert_eq!(v["table"][0]["coeff"], serde_json::json!([[[0], "1"]]));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&["conv", "--type", "Q7", "--u", "0", "--v", "0"]).0, 2);
        assert_eq!(run_args(&["conv", "--type", "A1", "--u", "1", "--v", "0"]).0, 2);
        assert_eq!(run_args(&["conv", "--type", "A1"]).0, 2);
        assert_eq!(run_args(&["qk", "--type", "A2", "--x", "1", "--y", "1", "--depth", "-1,0"]).0, 2);
        assert_eq!(run_args(&["scan", "--type", "A1", "--max-len", "2", "--jobs", "0"]).0, 2);
        assert_eq!(run_args(&["conv", "--type", "A1", "--u", "0,1,0,1", "--v", "0", "--length-cap", "3"]).0, 2);
    }

    #[test]
    fn non_reduced_input_warns() {
        let (code, out, err) = run_args(&["conv", "--type", "A1", "--u", "0,1,1", "--v", ""]);
        assert_eq!(code, 0);
        assert!(err.contains("not reduced"));
        assert!(out.contains("[0]"));
    }

    #[test]
    fn qk_example() {
        let (code, out, _) = run_args(&["qk", "--type", "A1", "--x", "1", "--y", "1", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["depth"], serde_json::json!([-1]));
        let rows = v["table"].as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0]["z"], serde_json::json!([]));
        assert_eq!(rows[0]["eta"], serde_json::json!([1]));
        assert_eq!(rows[1]["z"], serde_json::json!([1]));
        assert_eq!(rows[1]["eta"], serde_json::json!([0]));
    }

    #[test]
    fn roots_and_weyl() {
        let (code, out, _) = run_args(&["roots", "--type", "A2", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["positive_roots"].as_array().unwrap().len(), 3);
        assert_eq!(v["dual_coxeter_number"], 3);
        let (code, out, _) = run_args(&["weyl", "--type", "A2", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 7);
        let (code, out, _) = run_args(&["weyl", "--type", "A1", "--max-len", "3", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 4);
    }

    #[test]
    fn scan_exit_codes() {
        let (code, out, _) = run_args(&["scan", "--type", "A1", "--max-len", "4"]);
        assert_eq!(code, 0, "{out}");
        // a capped scan is reported incomplete but is not a FAIL
        let (code, _, err) = run_args(&["scan", "--type", "A1", "--max-len", "4", "--kind", "conv", "--length-cap", "3"]);
        assert_eq!(code, 0);
        assert!(err.contains("incomplete"));
    }
}
