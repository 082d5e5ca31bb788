//! `toprec`: exact topological recursion from the command line.
//!
//! Exit codes: 0 success, 1 invalid input or curve, 2 computation failure
//! (precision, non-invertible series, internal), 3 a verification check failed.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use toprec::catalog::{catalog_entries, catalog_get, CatalogParams, WP_GERM_WINDOW};
use toprec::coeff::{format_rat, parse_rat, Coeff, Rat};
use toprec::curve::{validate_curve, Family, SpectralCurve};
use toprec::curve_file::CurveSpec;
use toprec::engine::{EngineOptions, OmegaTable};
use toprec::error::Error;
use toprec::extract::{hurwitz_extract, map_count_extract, HurwitzRequest, MapCountRequest};
use toprec::kernel::{KernelMode, PrintedKernel};
use toprec::suite::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "toprec", version, about = "Exact topological recursion on genus-zero spectral curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute ω_{g,n} (or F_g when n = 0) on a curve.
    Compute(ComputeArgs),
    /// Run a verification suite.
    Check(CheckArgs),
    /// List the built-in curves.
    Catalog(FormatArg),
    /// Check a curve file against the recursion's requirements.
    Validate(CurveArgs),
    /// Tabulate Hurwitz numbers (lambert) or quadrangulation counts (maps-quad).
    Extract(ExtractArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    General,
    Printed,
}

#[derive(Args)]
struct FormatArg {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CurveArgs {
    /// Catalog curve name.
    #[arg(long, conflicts_with = "curve_file", required_unless_present = "curve_file")]
    curve: Option<String>,
    /// JSON curve description.
    #[arg(long)]
    curve_file: Option<std::path::PathBuf>,
    /// Quadrangle weight for maps-quad.
    #[arg(long, value_parser = rat_arg)]
    t4: Option<Rat>,
    /// Numeric value of γ for maps-quad; symbolic p when omitted.
    #[arg(long, value_parser = rat_arg)]
    gamma: Option<Rat>,
    /// Known terms of the Weil-Petersson y germ.
    #[arg(long, default_value_t = WP_GERM_WINDOW)]
    germ_window: i32,
    #[command(flatten)]
    fmt: FormatArg,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long)]
    g: u32,
    #[arg(long)]
    n: usize,
    /// Fixed series window; chosen automatically when omitted.
    #[arg(long)]
    window: Option<i32>,
    #[arg(long, value_enum, default_value = "general")]
    mode: ModeArg,
    /// Multiplier of the general kernel (default: the calibrated value).
    #[arg(long, value_parser = rat_arg)]
    kappa: Option<Rat>,
    /// Rational value of p at which to evaluate every coefficient. Repeatable.
    #[arg(long, value_parser = rat_arg)]
    probe: Vec<Rat>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[command(flatten)]
    fmt: FormatArg,
}

#[derive(Args)]
struct ExtractArgs {
    /// lambert (Hurwitz numbers) or maps-quad (rooted quadrangulations).
    #[arg(long)]
    curve: String,
    #[arg(long)]
    g: u32,
    /// Number of parts of μ (Hurwitz only).
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Largest |μ| (Hurwitz only).
    #[arg(long, default_value_t = 6)]
    max_degree: u32,
    /// Total face counts to tabulate, comma separated (maps only).
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    faces: Vec<u32>,
    /// Size of the marked face (maps only).
    #[arg(long, default_value_t = 4)]
    boundary: u32,
    #[arg(long, value_parser = rat_arg, default_value = "1")]
    t4: Rat,
    #[command(flatten)]
    fmt: FormatArg,
}

fn rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Validation(_) | Error::Parse(_) | Error::Domain(_) | Error::Pole(_) => 1,
            Error::Precision { .. }
            | Error::LogTerm
            | Error::NotInvertible(_)
            | Error::Valuation(_)
            | Error::Internal(_) => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type Out = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Check(a) => check(a),
        Command::Catalog(f) => catalog(f.format),
        Command::Validate(a) => validate(a),
        Command::Extract(a) => extract(a),
    };
    match result {
        Ok((text, code)) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            let _ = out.flush();
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn load_curve(a: &CurveArgs) -> Result<SpectralCurve, Failure> {
    match (&a.curve, &a.curve_file) {
        (Some(name), None) => {
            let params = CatalogParams {
                t4: a.t4.clone().unwrap_or_else(|| CatalogParams::default().t4),
                gamma: a.gamma.clone().map(Coeff::from_rat),
                germ_window: a.germ_window,
            };
            Ok(catalog_get(name, &params)?)
        }
        (None, Some(path)) => {
            if a.t4.is_some() || a.gamma.is_some() {
                return Err(invalid("--t4 and --gamma only apply to catalog curves"));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
            Ok(CurveSpec::parse(&text)?.into_curve()?)
        }
        _ => Err(invalid("give exactly one of --curve and --curve-file")),
    }
}

fn validate(a: CurveArgs) -> Out {
    let curve = load_curve(&a)?;
    let diags = validate_curve(&curve);
    let code = if diags.is_empty() { 0 } else { 1 };
    let text = match a.fmt.format {
        Format::Json => to_json(&json!({ "curve": curve.name, "valid": diags.is_empty(), "diagnostics": diags })),
        Format::Csv => csv_text(
            &["branchpoint", "predicate", "message"],
            diags
                .iter()
                .map(|d| {
                    vec![
                        d.branchpoint.map(|b| b.to_string()).unwrap_or_default(),
                        d.predicate.clone(),
                        d.message.clone(),
                    ]
                })
                .collect(),
        ),
        Format::Pretty => {
            let mut s = String::new();
            for d in &diags {
                s += &format!("{d}\n");
            }
            s += &format!("{}: {}\n", curve.name, if diags.is_empty() { "valid" } else { "invalid" });
            s
        }
    };
    Ok((text, code))
}

fn slot_text(key: &[toprec::form::Slot]) -> String {
    key.iter()
        .map(|s| format!("{}:{}", s.bp, s.order))
        .collect::<Vec<_>>()
        .join(" ")
}

fn eval_at(c: &Coeff, p: &Rat) -> Result<String, Failure> {
    Ok(format_rat(&c.eval(p)?))
}

fn compute(a: ComputeArgs) -> Out {
    let curve = load_curve(&a.curve)?;
    let mode = match a.mode {
        ModeArg::General => KernelMode::General,
        ModeArg::Printed => {
            let k = curve
                .family
                .as_ref()
                .and_then(PrintedKernel::for_family)
                .ok_or_else(|| invalid(format!("curve '{}' has no printed kernel", curve.name)))?;
            KernelMode::Printed(k)
        }
    };
    let mut opts = EngineOptions::default().with_mode(mode).with_window(a.window);
    if let Some(k) = &a.kappa {
        opts.kappa = k.clone();
    }
    let branchpoints: Vec<String> = curve.branchpoints.iter().map(|b| b.a.to_string()).collect();
    let name = curve.name.clone();
    let parameter = match &curve.family {
        Some(Family::MapsQuad { .. }) => "p = γ",
        Some(Family::WeilPetersson) => "p = π²",
        _ => "p",
    };
    let mut table = OmegaTable::new(curve, opts)?;

    let mut header = json!({
        "curve": name,
        "g": a.g,
        "n": a.n,
        "mode": mode.to_string(),
        "kappa": format_rat(table.kappa()),
        "parameter": parameter,
        "branchpoints": branchpoints,
    });

    if a.n == 0 {
        let f = table.f_g(a.g)?;
        let values: Vec<(String, String)> = a
            .probe
            .iter()
            .map(|p| Ok((format_rat(p), eval_at(&f, p)?)))
            .collect::<Result<_, Failure>>()?;
        header["window"] = json!(table.window());
        let text = match a.curve.fmt.format {
            Format::Json => {
                header["f_g"] = json!({ "coeff": f, "display": f.to_string() });
                if !values.is_empty() {
                    header["probes"] = Value::Array(
                        values.iter().map(|(p, v)| json!({ "p": p, "value": v })).collect(),
                    );
                }
                to_json(&header)
            }
            Format::Csv => {
                let mut cols = vec!["g".to_string(), "n".into(), "slots".into(), "coeff".into()];
                cols.extend(values.iter().map(|(p, _)| format!("p={p}")));
                let mut row = vec![a.g.to_string(), "0".into(), String::new(), f.to_string()];
                row.extend(values.iter().map(|(_, v)| v.clone()));
                let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
                csv_text(&cols, vec![row])
            }
            Format::Pretty => {
                let mut s = format!("F_{} on {name} = {f}\n", a.g);
                for (p, v) in &values {
                    s += &format!("  at p = {p}: {v}\n");
                }
                s
            }
        };
        return Ok((text, 0));
    }

    let w = table.omega(a.g, a.n)?;
    header["window"] = json!(table.window());
    let mut probes = Vec::new();
    for p in &a.probe {
        let vals: Vec<String> = w
            .terms()
            .values()
            .map(|c| eval_at(c, p))
            .collect::<Result<_, Failure>>()?;
        probes.push((format_rat(p), vals));
    }
    let text = match a.curve.fmt.format {
        Format::Json => {
            header["omega"] = serde_json::to_value(&w).expect("forms serialize");
            if !probes.is_empty() {
                header["probes"] = Value::Array(
                    probes
                        .iter()
                        .map(|(p, vals)| {
                            let terms: Vec<Value> = w
                                .terms()
                                .keys()
                                .zip(vals)
                                .map(|(k, v)| json!({ "slots": k, "value": v }))
                                .collect();
                            json!({ "p": p, "terms": terms })
                        })
                        .collect(),
                );
            }
            to_json(&header)
        }
        Format::Csv => {
            let mut cols = vec!["g".to_string(), "n".into(), "slots".into(), "coeff".into()];
            cols.extend(probes.iter().map(|(p, _)| format!("p={p}")));
            let rows = w
                .terms()
                .iter()
                .enumerate()
                .map(|(i, (k, c))| {
                    let mut r = vec![a.g.to_string(), a.n.to_string(), slot_text(k), c.to_string()];
                    r.extend(probes.iter().map(|(_, v)| v[i].clone()));
                    r
                })
                .collect();
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            csv_text(&cols, rows)
        }
        Format::Pretty => {
            let mut s = format!(
                "ω_{{{},{}}} on {name} ({mode}, window {}), branchpoints a = [{}]\n",
                a.g,
                a.n,
                table.window(),
                header["branchpoints"]
                    .as_array()
                    .map(|v| v.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(", "))
                    .unwrap_or_default()
            );
            for (i, (k, c)) in w.terms().iter().enumerate() {
                let basis: Vec<String> = k
                    .iter()
                    .enumerate()
                    .map(|(j, sl)| format!("dz{}/(z{}-a{})^{}", j + 1, j + 1, sl.bp, sl.order))
                    .collect();
                s += &format!("  {}  ·  {}\n", c, basis.join(" "));
                for (p, v) in &probes {
                    s += &format!("      at p = {p}: {}\n", v[i]);
                }
            }
            if w.is_empty() {
                s += "  0\n";
            }
            s
        }
    };
    Ok((text, 0))
}

fn check(a: CheckArgs) -> Out {
    let suite = Suite::parse(&a.suite)?;
    let report = run_suite(suite);
    let code = if report.passed() { 0 } else { 3 };
    let criteria: BTreeMap<String, &str> = report
        .criteria()
        .into_iter()
        .map(|(c, ok)| (c.to_string(), if ok { "pass" } else { "fail" }))
        .collect();
    let text = match a.fmt.format {
        Format::Json => to_json(&json!({
            "suite": report.suite,
            "passed": report.passed(),
            "criteria": criteria,
            "items": report.items,
            "artifacts": report.artifacts,
        })),
        Format::Csv => csv_text(
            &["criterion", "name", "passed", "detail"],
            report
                .items
                .iter()
                .map(|i| vec![i.criterion.to_string(), i.name.clone(), i.passed.to_string(), i.detail.clone()])
                .collect(),
        ),
        Format::Pretty => {
            let mut s = String::new();
            for (c, ok) in report.criteria() {
                s += &format!("criterion {c}: {}\n", if ok { "PASS" } else { "FAIL" });
            }
            s.push('\n');
            s += &report.to_string();
            s
        }
    };
    Ok((text, code))
}

fn catalog(format: Format) -> Out {
    let entries = catalog_entries();
    let text = match format {
        Format::Json => to_json(&entries),
        Format::Csv => csv_text(
            &["name", "x", "y", "branchpoints", "parameters"],
            entries
                .iter()
                .map(|e| {
                    [e.name, e.x, e.y, e.branchpoints, e.parameters]
                        .map(String::from)
                        .to_vec()
                })
                .collect(),
        ),
        Format::Pretty => entries
            .iter()
            .map(|e| {
                format!(
                    "{}\n  x = {}\n  y = {}\n  branchpoints: {}\n  parameters: {}\n",
                    e.name, e.x, e.y, e.branchpoints, e.parameters
                )
            })
            .collect(),
    };
    Ok((text, 0))
}

fn extract(a: ExtractArgs) -> Out {
    let text = match a.curve.as_str() {
        "lambert" | "hurwitz" => {
            let t = hurwitz_extract(&HurwitzRequest {
                g: a.g,
                n: a.n,
                max_degree: a.max_degree,
            })?;
            match a.fmt.format {
                Format::Json => to_json(&t),
                Format::Csv => csv_text(
                    &["g", "mu", "hurwitz", "coefficient", "stabilizer"],
                    t.entries
                        .iter()
                        .map(|e| {
                            vec![
                                t.g.to_string(),
                                mu_text(&e.mu),
                                format_rat(&e.hurwitz),
                                format_rat(&e.coefficient),
                                e.stabilizer.to_string(),
                            ]
                        })
                        .collect(),
                ),
                Format::Pretty => {
                    let mut s = format!("Hurwitz numbers, genus {}, {} parts ({})\n", t.g, t.n, t.normalization);
                    for e in &t.entries {
                        s += &format!("  H({}) = {}\n", mu_text(&e.mu), format_rat(&e.hurwitz));
                    }
                    s
                }
            }
        }
        "maps-quad" | "maps" => {
            let t = map_count_extract(&MapCountRequest {
                g: a.g,
                faces: a.faces.clone(),
                boundary: a.boundary,
                t4: a.t4.clone(),
            })?;
            match a.fmt.format {
                Format::Json => to_json(&t),
                Format::Csv => csv_text(
                    &["g", "faces", "unmarked", "vertices", "count"],
                    t.entries
                        .iter()
                        .map(|e| {
                            vec![
                                t.g.to_string(),
                                e.faces.to_string(),
                                e.unmarked.to_string(),
                                e.vertices.to_string(),
                                format_rat(&e.count),
                            ]
                        })
                        .collect(),
                ),
                Format::Pretty => {
                    let mut s = format!(
                        "rooted maps, genus {}, marked face of size {}, t4 = {} ({})\n",
                        t.g,
                        t.boundary,
                        format_rat(&t.t4),
                        t.normalization
                    );
                    for e in &t.entries {
                        s += &format!("  {} faces: {}\n", e.faces, format_rat(&e.count));
                    }
                    s
                }
            }
        }
        other => {
            return Err(invalid(format!(
                "extraction is available for lambert and maps-quad, not '{other}'"
            )))
        }
    };
    Ok((text, 0))
}

fn mu_text(mu: &[u32]) -> String {
    mu.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}
