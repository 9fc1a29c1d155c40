use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rug::{Complex, Float};
use serde_json::{json, Map, Value};

use gfn_core::flat_coords::{invert, linearization, s_of_t, t_of_s, LinearizationFile};
use gfn_core::g_function::{
    caustic_data, coxeter_g_coefficient, dg_dt_closed_at_s, dg_dt_ring, dg_dt_symmetric, folding_g,
    g_closed_at_s, CoxeterGroup, FoldingSystem, RingTraces,
};
use gfn_core::getzler::{getzler_scan, PolynomialG, PolynomialPrepotential};
use gfn_core::halphen::{
    candidate_with_derivative, d4_oracles, halphen_integrate, theta_candidate, StepControl,
};
use gfn_core::milnor_ring::{build_model, multiplication_table};
use gfn_core::numeric::{
    format_complex, format_float, parse_complex, parse_rational, Precision, PRECISION_ENV,
};
use gfn_core::{GfnError, ModelName, MultiPoly, Rat, Result, SAssignment};

use crate::config::{parse_grid, OutputFormat, RunConfig};
use crate::report::SuiteReport;
use crate::suites::{g_derivative_fd, run_suite, SUITES};

#[derive(Debug, Parser)]
#[command(
    name = "gfn",
    version,
    about = "G-functions of elliptic Frobenius manifolds"
)]
pub struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = Precision::DEFAULT_DIGITS)]
    pub precision: u32,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jacobi-ring structure constants at a marginal value.
    Table {
        #[arg(long, default_value = "e6t")]
        model: String,
        #[arg(long, default_value = "1")]
        s: String,
        /// Non-marginal deformation index carrying the first-order jet.
        #[arg(long)]
        jet: Option<usize>,
    },
    /// Solve t(s) = t for the marginal s.
    Invert {
        #[arg(long, default_value = "e6t")]
        model: String,
        #[arg(long)]
        t: String,
    },
    /// G or dG/dt at a flat or marginal point.
    G(GArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// G-function coefficients of a Coxeter group.
    Coxeter {
        #[arg(long)]
        group: String,
    },
    /// G-function data of a folded elliptic root system.
    Fold {
        #[arg(long)]
        system: String,
    },
    /// Getzler residual scan for a polynomial prepotential.
    Getzler {
        #[arg(long)]
        prepotential: PathBuf,
        /// `zero` or `t<k>` for G = t^k.
        #[arg(long, default_value = "zero")]
        g: String,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Theta solution of the Halphen system, optionally integrated to a second point.
    Halphen {
        #[arg(long, default_value = "2i")]
        tau: String,
        #[arg(long)]
        to: Option<String>,
    },
    /// Getzler residual of the D4^(1,1) oracles.
    D4Getzler {
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct GArgs {
    #[arg(long, default_value = "e6t")]
    pub model: String,
    /// Flat marginal coordinate.
    #[arg(long, conflicts_with = "s")]
    pub t: Option<String>,
    /// Marginal deformation parameter.
    #[arg(long)]
    pub s: Option<String>,
    /// Report dG/dt instead of G.
    #[arg(long)]
    pub derivative: bool,
    /// closed, ring, symmetric or fd.
    #[arg(long, default_value = "closed")]
    pub route: String,
    /// Admissible index for the ring route.
    #[arg(long, default_value_t = 2)]
    pub mu: usize,
    /// Linearization data file for the ring route.
    #[arg(long)]
    pub linearization: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub model: Option<String>,
    /// Comma-separated marginal grid.
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub system: Option<String>,
}

/// Rendered output and whether every check passed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Cli {
    pub fn format(&self) -> OutputFormat {
        if self.json {
            OutputFormat::Json
        } else if self.csv {
            OutputFormat::Csv
        } else {
            OutputFormat::Pretty
        }
    }
}

fn render(fields: Map<String, Value>, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&Value::Object(fields)).expect("json"),
        OutputFormat::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in &fields {
                let v = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let v = if v.contains([',', '"']) {
                    format!("\"{}\"", v.replace('"', "\"\""))
                } else {
                    v
                };
                out.push_str(&format!("{k},{v}\n"));
            }
            out
        }
        OutputFormat::Pretty => {
            let mut out = String::new();
            for (k, v) in &fields {
                match v {
                    Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
                    other => out.push_str(&format!("{k}: {other}\n")),
                }
            }
            out
        }
    }
}

fn render_report(r: &SuiteReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => r.to_json(),
        OutputFormat::Csv => r.to_csv(true),
        OutputFormat::Pretty => r.to_pretty(),
    }
}

fn obj(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn float_to_rat(x: &Float) -> Result<Rat> {
    x.to_rational()
        .ok_or_else(|| GfnError::Domain("non-finite marginal value".into()))
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let prec = Precision::new(cli.precision)?;
    let format = cli.format();
    let digits = prec.digits().min(40);
    let ok = |fields: Map<String, Value>| Outcome {
        text: render(fields, format),
        success: true,
    };
    match &cli.command {
        Command::Table { model, s, jet } => {
            let m = build_model(model.parse()?);
            let mut point = SAssignment::marginal(&m, parse_rational(s)?);
            if let Some(a) = jet {
                point = point.with_jet(*a);
            }
            let table = multiplication_table(&m, &point)?;
            let text = match format {
                OutputFormat::Json => serde_json::to_string_pretty(&table.to_json())?,
                _ => {
                    let mut out = if format == OutputFormat::Csv {
                        String::from("a,b,c,value,slope\n")
                    } else {
                        String::new()
                    };
                    for a in 1..=m.n {
                        for b in 1..=m.n {
                            for c in 1..=m.n {
                                let v = table.get(a, b, c);
                                if v.value == 0 && v.slope == 0 {
                                    continue;
                                }
                                if format == OutputFormat::Csv {
                                    out.push_str(&format!("{a},{b},{c},{},{}\n", v.value, v.slope));
                                } else {
                                    out.push_str(&format!("c[{a},{b}]^{c} = {v}\n"));
                                }
                            }
                        }
                    }
                    out
                }
            };
            Ok(Outcome {
                text,
                success: true,
            })
        }
        Command::Invert { model, t } => {
            let model: ModelName = model.parse()?;
            let t = prec.rat(&parse_rational(t)?);
            let inv = invert(model, &t, prec)?;
            let back = t_of_s(model, &inv.s, prec)?;
            let err = Float::with_val(prec.bits(), &back - &t).abs();
            Ok(ok(obj(vec![
                ("model", json!(model.to_string())),
                ("s", json!(format_float(&inv.s, digits))),
                ("newton_steps", json!(inv.newton_steps)),
                ("bisection_steps", json!(inv.bisection_steps)),
                ("residual", json!(format_float(&err, 6))),
                ("precision_digits", json!(prec.digits())),
            ])))
        }
        Command::G(args) => g_command(args, prec, digits).map(ok),
        Command::Verify(args) => {
            let cfg = RunConfig {
                precision: prec,
                model: args.model.as_deref().map(str::parse).transpose()?,
                group: args.group.clone(),
                system: args.system.clone(),
                s_grid: args.s.as_deref().map(parse_grid).transpose()?,
                tol: args.tol,
                points: args.points,
                seed: args.seed,
                format,
            };
            let reports: Vec<SuiteReport> = if args.suite == "all" {
                SUITES
                    .iter()
                    .map(|s| run_suite(s, &cfg))
                    .collect::<Result<_>>()?
            } else {
                vec![run_suite(&args.suite, &cfg)?]
            };
            let success = reports.iter().all(|r| r.pass);
            let text = match format {
                OutputFormat::Csv => reports
                    .iter()
                    .enumerate()
                    .map(|(i, r)| r.to_csv(i == 0))
                    .collect::<String>(),
                OutputFormat::Json if reports.len() > 1 => serde_json::to_string_pretty(&reports)?,
                _ => reports
                    .iter()
                    .map(|r| render_report(r, format))
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            Ok(Outcome { text, success })
        }
        Command::Coxeter { group } => {
            let g: CoxeterGroup = group.parse()?;
            let data = caustic_data(&g);
            let coeffs = coxeter_g_coefficient(group)?;
            let terms: Vec<Value> = coeffs
                .iter()
                .map(|(n, c)| json!({"N": n, "coefficient": c.to_string()}))
                .collect();
            Ok(ok(obj(vec![
                ("group", json!(data.group)),
                ("caustics", json!(data.caustic_count)),
                ("N", json!(data.n_values)),
                ("log_kappa_terms", Value::Array(terms)),
            ])))
        }
        Command::Fold { system } => {
            let sys: FoldingSystem = system.parse()?;
            let g = folding_g(sys);
            let d = g.datum();
            let others: Map<String, Value> = g
                .other_terms
                .iter()
                .map(|(k, c)| (k.clone(), json!(c.to_string())))
                .collect();
            Ok(ok(obj(vec![
                ("system", json!(d.system)),
                ("gamma", json!(d.gamma)),
                ("deg_kappa", json!(d.deg_kappa)),
                ("sigma", json!(d.sigma)),
                ("log_kappa", json!(g.kappa_coefficient.to_string())),
                ("log_eta", json!(g.eta_coefficient.to_string())),
                ("other_terms", Value::Object(others)),
            ])))
        }
        Command::Getzler {
            prepotential,
            g,
            points,
            seed,
        } => {
            let f = PolynomialPrepotential::load(prepotential)?;
            let n = f.f.arity();
            let g = parse_g(g, n)?;
            let report = getzler_scan(&f, &g, *points, *seed, prec)?;
            let max = format_float(&report.max_residual, 6);
            let mut fields = obj(vec![
                ("dimension", json!(n)),
                ("points", json!(points)),
                ("seed", json!(seed)),
                ("max_residual", json!(max)),
                ("precision_digits", json!(prec.digits())),
            ]);
            if format == OutputFormat::Json {
                fields.insert("samples".into(), json!(report.samples));
            }
            Ok(ok(fields))
        }
        Command::Halphen { tau, to } => {
            let tau = parse_complex(tau, prec)?;
            let (state, conv) = theta_candidate(&tau, prec)?;
            let mut fields = obj(vec![
                ("convention", json!(conv.to_string())),
                ("tau", json!(format_complex(&state.tau, digits))),
                ("u", json!(format_complex(&state.u, digits))),
                ("v", json!(format_complex(&state.v, digits))),
                ("w", json!(format_complex(&state.w, digits))),
            ]);
            if let Some(to) = to {
                let tau1 = parse_complex(to, prec)?;
                let end = halphen_integrate(&state, &tau1, &StepControl::default(), prec)?;
                let (direct, _) = candidate_with_derivative(&tau1, conv, prec)?;
                let mut err = Float::with_val(prec.bits(), 0);
                for (a, b) in end.components().iter().zip(direct.components()) {
                    let e = Complex::with_val(prec.bits(), *a - b).abs().real().clone();
                    if e > err {
                        err = e;
                    }
                }
                fields.insert("to".into(), json!(format_complex(&end.tau, digits)));
                fields.insert("u_end".into(), json!(format_complex(&end.u, digits)));
                fields.insert("v_end".into(), json!(format_complex(&end.v, digits)));
                fields.insert("w_end".into(), json!(format_complex(&end.w, digits)));
                fields.insert(
                    "max_deviation_from_theta".into(),
                    json!(format_float(&err, 6)),
                );
            }
            Ok(ok(fields))
        }
        Command::D4Getzler { points, seed } => {
            let (f, g) = d4_oracles(prec)?;
            let report = getzler_scan(&f, &g, *points, *seed, prec)?;
            let mut fields = obj(vec![
                ("convention", json!(f.convention.to_string())),
                ("points", json!(points)),
                ("seed", json!(seed)),
                ("max_residual", json!(format_float(&report.max_residual, 6))),
                ("precision_digits", json!(prec.digits())),
            ]);
            if format == OutputFormat::Json {
                fields.insert("samples".into(), json!(report.samples));
            }
            let success = report.max_residual < 1e-20;
            Ok(Outcome {
                text: render(fields, format),
                success,
            })
        }
    }
}

fn parse_g(spec: &str, n: usize) -> Result<PolynomialG> {
    if spec == "zero" {
        return Ok(PolynomialG::zero(n));
    }
    let k: usize = spec
        .strip_prefix('t')
        .and_then(|k| k.parse().ok())
        .filter(|k| (1..=n).contains(k))
        .ok_or_else(|| GfnError::Usage(format!("--g must be `zero` or t1..t{n}, got {spec:?}")))?;
    Ok(PolynomialG::new(MultiPoly::var(n, k - 1)))
}

fn g_command(args: &GArgs, prec: Precision, digits: u32) -> Result<Map<String, Value>> {
    let model: ModelName = args.model.parse()?;
    let (s, t) = match (&args.s, &args.t) {
        (Some(s), None) => {
            let s = prec.rat(&parse_rational(s)?);
            let t = t_of_s(model, &s, prec)?;
            (s, t)
        }
        (None, Some(t)) => {
            let t = prec.rat(&parse_rational(t)?);
            (s_of_t(model, &t, prec)?, t)
        }
        _ => return Err(GfnError::Usage("give exactly one of --t or --s".into())),
    };
    let value = match (args.derivative, args.route.as_str()) {
        (false, "closed") => g_closed_at_s(model, &s, prec)?,
        (false, other) => {
            return Err(GfnError::Usage(format!(
                "route {other:?} computes dG/dt; add --derivative"
            )));
        }
        (true, "closed") => dg_dt_closed_at_s(model, &s, prec)?,
        (true, "fd") => g_derivative_fd(model, &t, prec)?,
        (true, route @ ("ring" | "symmetric")) => {
            let m = build_model(model);
            let exact_s = match &args.s {
                Some(text) => parse_rational(text)?,
                None => float_to_rat(&s)?,
            };
            let lin = match &args.linearization {
                Some(path) => {
                    let file = LinearizationFile::load(path)?;
                    if file.model_name()? != model {
                        return Err(GfnError::Usage(
                            "linearization file is for a different model".into(),
                        ));
                    }
                    file.evaluate(&s, prec)?
                }
                None => linearization(model, &s, prec)?,
            };
            let traces = RingTraces::compute(&m, &exact_s)?;
            if route == "ring" {
                dg_dt_ring(&m, &lin, &traces, args.mu)?.value
            } else {
                dg_dt_symmetric(&m, &lin, &traces)?
            }
        }
        (true, other) => return Err(GfnError::Usage(format!("unknown route {other:?}"))),
    };
    Ok(obj(vec![
        ("model", json!(model.to_string())),
        ("route", json!(args.route)),
        (
            "quantity",
            json!(if args.derivative { "dG/dt" } else { "G" }),
        ),
        ("s", json!(format_float(&s, digits))),
        ("t", json!(format_float(&t, digits))),
        ("value", json!(format_float(&value, digits))),
        ("precision_digits", json!(prec.digits())),
    ]))
}
