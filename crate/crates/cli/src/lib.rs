//! Batch front end: reads a family file, runs one analysis, and renders a
//! report as JSON or text.

pub mod parse;

use std::fmt::Write as _;

use num::BigRational;
use ratdyn_core::hybrid::{
    classify_family, conjugated_family_limit, family_limit, verify_convergence, ConvergenceReport, FamilySpec,
};
use ratdyn_core::multipoly::MultiPoly;
use ratdyn_core::pgr::{minimize_ord_res, PgrReport, SearchConfig, Verdict};
use ratdyn_core::{Error, Exponent};
use serde::Serialize;

pub use parse::{parse_family, serialize_family, FamilyFile, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Limit,
    Pgr,
    Classify,
    Verify,
    Iterate,
}

impl Command {
    fn as_str(self) -> &'static str {
        match self {
            Command::Limit => "limit",
            Command::Pgr => "pgr",
            Command::Classify => "classify",
            Command::Verify => "verify",
            Command::Iterate => "iterate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Command-line overrides; `None` falls back to the file, then the default.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub format: Format,
    pub precision: Option<i64>,
    pub max_ramification: Option<u32>,
    pub search_depth: Option<i64>,
    pub max_probes: Option<usize>,
    pub t0: Option<BigRational>,
    pub samples: Option<u32>,
    pub iterate_power: Option<u32>,
}

const DEFAULT_SAMPLES: u32 = 30;
const DEFAULT_ITERATE_POWER: u32 = 2;

struct Settings {
    cfg: SearchConfig,
    t0: BigRational,
    samples: u32,
    iterate_power: u32,
}

fn settings(file: &FamilyFile, opts: &Options) -> Result<Settings, String> {
    let mut cfg = SearchConfig::default();
    if let Some(p) = opts.precision.or(file.precision) {
        if p < 1 {
            return Err("precision must be positive".into());
        }
        cfg.relative_precision = p;
    }
    if let Some(e) = opts.max_ramification.or(file.max_ramification) {
        if e < 1 {
            return Err("max-ramification must be positive".into());
        }
        cfg.e_max = e;
        cfg.delta_min = Exponent::new(1, e as i64);
    }
    if let Some(s) = opts.search_depth.or(file.search_depth) {
        if s < 1 {
            return Err("search-depth must be positive".into());
        }
        cfg.s_bound = Exponent::from(s);
    }
    if let Some(m) = opts.max_probes.or(file.max_probes) {
        if m < 1 {
            return Err("max-probes must be positive".into());
        }
        cfg.max_probes = m;
    }
    let t0 = opts.t0.clone().or_else(|| file.t0.clone()).unwrap_or_else(|| BigRational::new(1.into(), 2.into()));
    Ok(Settings {
        cfg,
        t0,
        samples: opts.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
        iterate_power: opts.iterate_power.or(file.iterate_power).unwrap_or(DEFAULT_ITERATE_POWER),
    })
}

/// One row of the convergence table.
#[derive(Serialize, Debug)]
pub struct SampleRow {
    pub n: u32,
    pub epsilon: String,
    pub measured_log: Option<f64>,
    pub predicted_log: Option<f64>,
    pub deviation: Option<f64>,
}

#[derive(Serialize, Debug)]
pub struct ConvergenceEntry {
    pub polynomial: String,
    pub valuation: Option<String>,
    pub tail_start: u32,
    pub tail_max_deviation: Option<f64>,
    pub final_deviation: Option<f64>,
    pub samples: Vec<SampleRow>,
}

#[derive(Serialize, Debug, Default)]
pub struct Report {
    pub command: String,
    pub input: String,
    pub limit: Option<String>,
    pub classification: Option<String>,
    pub ord_res: Option<String>,
    pub pgr: Option<String>,
    pub witness: Option<String>,
    pub witness_recheck: Option<bool>,
    pub min_ord_res: Option<String>,
    pub ramification: Option<u32>,
    pub probes: Option<usize>,
    pub conjugated: Option<ConjugatedEntry>,
    pub iterate: Option<IterateEntry>,
    pub convergence: Option<Vec<ConvergenceEntry>>,
    pub precision: i64,
    pub error: Option<String>,
}

#[derive(Serialize, Debug)]
pub struct ConjugatedEntry {
    pub matrix: String,
    pub map: String,
    pub ord_res: String,
    pub orders_agree: bool,
    pub beth_landing: bool,
}

#[derive(Serialize, Debug)]
pub struct IterateEntry {
    pub power: u32,
    pub map: String,
    pub ord_res: String,
    pub good_reduction: bool,
}

/// Rounds to 12 significant digits; non-finite values become `None`.
fn sig12(x: f64) -> Option<f64> {
    x.is_finite().then(|| format!("{x:.11e}").parse().expect("float"))
}

fn convergence_entry(name: String, rep: &ConvergenceReport) -> ConvergenceEntry {
    ConvergenceEntry {
        polynomial: name,
        valuation: rep.valuation.finite().map(|v| v.to_string()),
        tail_start: rep.tail_start,
        tail_max_deviation: sig12(rep.tail_max_deviation),
        final_deviation: sig12(rep.final_deviation),
        samples: rep
            .samples
            .iter()
            .map(|s| SampleRow {
                n: s.n,
                epsilon: s.epsilon.to_string(),
                measured_log: sig12(s.measured_log),
                predicted_log: sig12(s.predicted_log),
                deviation: sig12(s.deviation),
            })
            .collect(),
    }
}

fn fill_pgr(report: &mut Report, pgr: &PgrReport) {
    report.pgr = Some(pgr.verdict.to_string());
    report.witness = Some(pgr.witness.to_string());
    report.witness_recheck = pgr.witness_rechecked;
    report.min_ord_res = Some(pgr.min_ord_res.to_string());
    report.ramification = Some(pgr.ramification);
    report.probes = Some(pgr.probes);
}

fn verdict_exit(v: Verdict) -> i32 {
    if v == Verdict::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

/// Test polynomials for `verify`: the resultant and every coordinate that is
/// not identically zero.
fn probe_polynomials(family: &FamilySpec) -> Vec<MultiPoly> {
    let n = 2 * family.degree + 2;
    let mut out = vec![MultiPoly::resultant(family.degree)];
    for (i, c) in family.coefficients().iter().enumerate() {
        if !c.is_zero() {
            out.push(MultiPoly::var(n, i));
        }
    }
    out
}

fn execute(command: Command, file: &FamilyFile, s: &Settings, report: &mut Report) -> Result<i32, Error> {
    let family = FamilySpec::new(file.degree, file.num.clone(), file.den.clone())?;
    let relative = s.cfg.relative_precision;
    match command {
        Command::Limit => {
            let limit = family_limit(&family, relative)?;
            report.limit = Some(limit.to_string());
            report.ord_res = Some(limit.ord_res().to_string());
            if let Some(m) = &file.matrix {
                let out = conjugated_family_limit(&family, m, relative)?;
                let [a, b, c, d] = m;
                report.conjugated = Some(ConjugatedEntry {
                    matrix: format!("[[{a},{b}],[{c},{d}]]"),
                    map: out.map.to_string(),
                    ord_res: out.map.ord_res().to_string(),
                    orders_agree: out.orders_agree,
                    beth_landing: out.beth_landing,
                });
            }
            Ok(EXIT_OK)
        }
        Command::Pgr => {
            let limit = family_limit(&family, relative)?;
            report.limit = Some(limit.to_string());
            report.ord_res = Some(limit.ord_res().to_string());
            let pgr = minimize_ord_res(&limit, &s.cfg)?;
            fill_pgr(report, &pgr);
            Ok(verdict_exit(pgr.verdict))
        }
        Command::Classify => {
            let c = classify_family(&family, &s.cfg)?;
            report.limit = Some(c.limit.to_string());
            report.ord_res = Some(c.ord_res.to_string());
            report.classification = Some(c.label.as_str().to_string());
            if let Some(pgr) = &c.report {
                fill_pgr(report, pgr);
            }
            Ok(EXIT_OK)
        }
        Command::Verify => {
            let mut entries = Vec::new();
            for p in probe_polynomials(&family) {
                let rep = verify_convergence(&family, &p, &s.t0, s.samples)?;
                entries.push(convergence_entry(p.to_string(), &rep));
            }
            report.convergence = Some(entries);
            Ok(EXIT_OK)
        }
        Command::Iterate => {
            let limit = family_limit(&family, relative)?;
            report.limit = Some(limit.to_string());
            report.ord_res = Some(limit.ord_res().to_string());
            let g = limit.iterate(s.iterate_power)?;
            report.iterate = Some(IterateEntry {
                power: s.iterate_power,
                map: g.to_string(),
                ord_res: g.ord_res().to_string(),
                good_reduction: g.good_reduction()?,
            });
            let pgr = minimize_ord_res(&g, &s.cfg)?;
            fill_pgr(report, &pgr);
            Ok(verdict_exit(pgr.verdict))
        }
    }
}

/// Runs `command` on the text of a family file; returns the rendered report
/// and the exit code.
pub fn run(command: Command, text: &str, opts: &Options) -> (String, i32) {
    let mut report = Report { command: command.as_str().to_string(), ..Report::default() };
    let code = match parse_family(text) {
        Err(e) => {
            report.error = Some(e.to_string());
            EXIT_INPUT
        }
        Ok(file) => {
            report.input = serialize_family(&file);
            match settings(&file, opts) {
                Err(msg) => {
                    report.error = Some(msg);
                    EXIT_INPUT
                }
                Ok(s) => {
                    report.precision = s.cfg.relative_precision;
                    match execute(command, &file, &s, &mut report) {
                        Ok(code) => code,
                        Err(Error::Inconclusive(pgr)) => {
                            report.classification = Some(Verdict::Inconclusive.to_string());
                            fill_pgr(&mut report, &pgr);
                            EXIT_INCONCLUSIVE
                        }
                        Err(e @ Error::PrecisionExhausted(_)) => {
                            report.error = Some(e.to_string());
                            EXIT_INCONCLUSIVE
                        }
                        Err(e) => {
                            report.error = Some(e.to_string());
                            EXIT_INPUT
                        }
                    }
                }
            }
        }
    };
    let out = match opts.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => render_text(&report),
    };
    (out, code)
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(out, "{k:<18}{v}");
    };
    line("command", &r.command);
    if let Some(e) = &r.error {
        line("error", e);
    }
    let fields = [
        ("limit", &r.limit),
        ("classification", &r.classification),
        ("ord_res", &r.ord_res),
        ("pgr", &r.pgr),
        ("witness", &r.witness),
        ("min_ord_res", &r.min_ord_res),
    ];
    for (k, v) in fields {
        if let Some(v) = v {
            line(k, v);
        }
    }
    if let Some(b) = r.witness_recheck {
        line("witness_recheck", &b);
    }
    if let Some(e) = r.ramification {
        line("ramification", &e);
    }
    if let Some(p) = r.probes {
        line("probes", &p);
    }
    if let Some(c) = &r.conjugated {
        line("conjugated", &c.map);
        line("  ord_res", &c.ord_res);
        line("  orders_agree", &c.orders_agree);
        line("  beth_landing", &c.beth_landing);
    }
    if let Some(i) = &r.iterate {
        line("iterate", &format!("f^{} = {}", i.power, i.map));
        line("  ord_res", &i.ord_res);
        line("  good_reduction", &i.good_reduction);
    }
    if let Some(entries) = &r.convergence {
        for e in entries {
            let v = e.valuation.as_deref().unwrap_or("inf");
            let dev = e.tail_max_deviation.map_or("inf".to_string(), |d| format!("{d:.6e}"));
            line("convergence", &format!("{}  v = {v}  tail max deviation = {dev}", e.polynomial));
        }
    }
    if r.error.is_none() {
        line("precision", &r.precision);
    }
    out
}
