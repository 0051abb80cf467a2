use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ratbs::annihilator::{annihilator_with, global_b, AnnMethod, BSIdealData};
use ratbs::corpus::{self, describe, Runner};
use ratbs::fixture::{CertificateFile, Fixture};
use ratbs::groebner::{ds_order, GbOptions, GroebnerBasis, Saturation, Strategy};
use ratbs::parse::parse_comm;
use ratbs::poly::{CommPoly, MonomialOrder};
use ratbs::rational::{linear_order, BsValue, RationalBSResult, RationalFunction, StepMode};
use ratbs::univariate::Univariate;
use ratbs::weyl::{AlgebraSignature, WeylElement};
use ratbs::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "ratbs", version, about = "Annihilators and Bernstein-Sato polynomials of rational functions f/g")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Comma-separated variable names (default: x, y, z as needed).
    #[arg(long, global = true, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    /// Select S-pairs by sugar degree.
    #[arg(long, global = true)]
    sugar: bool,
    /// Abort a Gröbner basis computation after this many S-pairs.
    #[arg(long, global = true)]
    max_pairs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnnMethodArg {
    Shift,
    Homogenized,
}

#[derive(Clone, Copy, ValueEnum)]
enum StepArg {
    Direct,
    Iterated,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BsMethodArg {
    Linear,
    Elimination,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    /// s block first, then degrevlex on x, ∂.
    Linear,
    /// degrevlex on x, ∂ with the s block last.
    Ds,
}

#[derive(clap::Args)]
struct Pair {
    #[arg(short = 'f', allow_hyphen_values = true)]
    f: String,
    #[arg(short = 'g', allow_hyphen_values = true)]
    g: String,
    /// File with trusted generators of B_{f,g} in s1, s2, one per line.
    #[arg(long)]
    bs_fixture: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Annihilator of f^s1 g^s2 in D[s1,s2].
    AnnPair {
        #[arg(short = 'f', allow_hyphen_values = true)]
        f: String,
        #[arg(short = 'g', allow_hyphen_values = true)]
        g: String,
        #[arg(long, value_enum, default_value_t = AnnMethodArg::Shift)]
        method: AnnMethodArg,
    },
    /// Annihilator of f^s in D[s].
    AnnOne {
        #[arg(short = 'f', allow_hyphen_values = true)]
        f: String,
        #[arg(long, value_enum, default_value_t = AnnMethodArg::Shift)]
        method: AnnMethodArg,
    },
    /// Bernstein-Sato polynomial b_f(s).
    GlobalB {
        #[arg(short = 'f', allow_hyphen_values = true)]
        f: String,
    },
    /// Bernstein-Sato ideal of the pair (f, g).
    BsIdeal {
        #[arg(short = 'f', allow_hyphen_values = true)]
        f: String,
        #[arg(short = 'g', allow_hyphen_values = true)]
        g: String,
    },
    /// Annihilator I_m(s) of (1/g^m)(f/g)^s.
    AnnRational {
        #[command(flatten)]
        pair: Pair,
        #[arg(short = 'm')]
        m: u32,
        #[arg(long, value_enum, default_value_t = StepArg::Direct)]
        step_mode: StepArg,
    },
    /// b^(N)_{f/g,m}(s) for one N or a range `a..b`.
    BsRational {
        #[command(flatten)]
        pair: Pair,
        #[arg(short = 'm')]
        m: u32,
        #[arg(short = 'N')]
        n: String,
        #[arg(long, value_enum, default_value_t = BsMethodArg::Linear)]
        method: BsMethodArg,
        #[arg(long, default_value_t = 24)]
        max_degree: u32,
        #[arg(long, value_enum, default_value_t = OrderArg::Linear)]
        order: OrderArg,
        /// Also compute and verify a certificate.
        #[arg(long)]
        certificate: bool,
    },
    /// Operators P_1..P_N with b·g^N − Σ P_k f^k g^(N−k) ∈ I_{m+N}(s).
    Certificate {
        #[command(flatten)]
        pair: Pair,
        #[arg(short = 'm')]
        m: u32,
        #[arg(short = 'N')]
        n: u32,
        #[arg(short = 'b', allow_hyphen_values = true)]
        b: String,
        /// Write the certificate file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file.
    Verify {
        file: PathBuf,
        #[arg(long)]
        bs_fixture: Option<PathBuf>,
    },
    /// Run the bundled regression cases.
    Corpus {
        #[arg(long)]
        list: bool,
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        include_stretch: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Engine(Error),
    Io(String),
    Inconclusive(String),
    Verification(String),
    CorpusFailed(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Engine(Error::Syntax { .. } | Error::InvalidInput(_) | Error::TooManyVariables(_)) => 2,
            Failure::Engine(e) if e.is_resource_limit() => 3,
            Failure::Inconclusive(_) => 4,
            Failure::Verification(_) => 5,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Engine(e) => e.to_string(),
            Failure::Io(s) | Failure::Inconclusive(s) | Failure::Verification(s) => s.clone(),
            Failure::CorpusFailed(k) => format!("{k} corpus case(s) failed"),
        }
    }
}

type Outcome = std::result::Result<Report, (Report, Failure)>;

/// The document printed for a run.
struct Report {
    command: &'static str,
    input: Map<String, Value>,
    result: Map<String, Value>,
}

impl Report {
    fn new(command: &'static str) -> Report {
        Report {
            command,
            input: Map::new(),
            result: Map::new(),
        }
    }

    fn input(mut self, k: &str, v: impl Into<Value>) -> Self {
        self.input.insert(k.into(), v.into());
        self
    }

    fn set(&mut self, k: &str, v: impl Into<Value>) {
        self.result.insert(k.into(), v.into());
    }

    fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "input": self.input,
            "result": self.result,
        })
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.result {
            text_field(&mut out, k, v, 0);
        }
        out
    }
}

fn text_field(out: &mut String, k: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Array(items) => {
            out.push_str(&format!("{pad}{k}:\n"));
            for item in items {
                match item {
                    Value::Object(map) => {
                        out.push_str(&format!("{pad}  -\n"));
                        for (k2, v2) in map {
                            text_field(out, k2, v2, indent + 2);
                        }
                    }
                    other => out.push_str(&format!("{pad}  {}\n", scalar(other))),
                }
            }
        }
        Value::Object(map) => {
            out.push_str(&format!("{pad}{k}:\n"));
            for (k2, v2) in map {
                text_field(out, k2, v2, indent + 1);
            }
        }
        other => out.push_str(&format!("{pad}{k}: {}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

struct Ctx {
    vars: Option<Vec<String>>,
    opts: GbOptions,
}

impl Ctx {
    /// Parses the polynomials over the declared variables or, by default,
    /// over the first of x, y, z needed to cover them.
    fn polys(&self, texts: &[&str]) -> Result<(Vec<String>, Vec<CommPoly>), Failure> {
        if let Some(vars) = &self.vars {
            let names: Vec<&str> = vars.iter().map(String::as_str).collect();
            let ps = texts.iter().map(|t| parse_comm(t, &names)).collect::<Result<Vec<_>, _>>()?;
            return Ok((vars.clone(), ps));
        }
        let all = ["x", "y", "z"];
        let ps = texts.iter().map(|t| parse_comm(t, &all)).collect::<Result<Vec<_>, _>>()?;
        let used = (0..3)
            .rev()
            .find(|&i| ps.iter().any(|p| p.degree_in(i).unwrap_or(0) > 0))
            .map_or(1, |i| i + 1);
        let names: Vec<&str> = all[..used].to_vec();
        let ps = texts.iter().map(|t| parse_comm(t, &names)).collect::<Result<Vec<_>, _>>()?;
        Ok((names.iter().map(|s| s.to_string()).collect(), ps))
    }

    fn rational(&self, pair: &Pair) -> Result<(Vec<String>, RationalFunction), Failure> {
        let (vars, ps) = self.polys(&[&pair.f, &pair.g])?;
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let mut r = RationalFunction::new(&names, &ps[0], &ps[1], &self.opts)?;
        match &pair.bs_fixture {
            Some(path) => {
                let gens = Fixture::parse(&read(path)?).polynomials(&["s1", "s2"])?;
                r.supply_bs_ideal(gens)?;
            }
            None => {
                r.compute_bs_ideal()?;
            }
        }
        Ok((vars, r))
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn strings(gens: &[WeylElement]) -> Value {
    Value::from(gens.iter().map(|g| g.to_string()).collect::<Vec<_>>())
}

fn gb_json(gb: &GroebnerBasis) -> Value {
    let st = gb.stats();
    json!({ "generators": strings(gb.elements()), "pairs": st.pairs, "size": gb.len() })
}

fn poly_json(b: &Univariate) -> Value {
    json!({ "expanded": b.to_string_in("s"), "factored": b.factor_linear().to_string_in("s") })
}

fn bs_json(b: &BSIdealData) -> Value {
    let names = ["s1".to_string(), "s2".to_string()];
    let gens: Vec<Value> = b
        .generators
        .iter()
        .map(|g| json!({ "b": g.b.to_string_with(&names), "lines": g.lines, "e": g.e }))
        .collect();
    json!({ "generators": gens, "epsilon": b.epsilon, "from_fixture": b.from_fixture })
}

fn saturation_json(s: &Saturation) -> Value {
    let steps: Vec<Value> = s
        .steps
        .iter()
        .map(|st| json!({ "factor": st.factor.to_string_in("s"), "applications": st.applications }))
        .collect();
    json!({
        "q": poly_json(&s.q),
        "steps": steps,
        "witness": s.witness.as_ref().map(|w| w.to_string_in("s")),
        "changed": s.changed(),
    })
}

fn value_json(v: &BsValue) -> Value {
    match v {
        BsValue::Poly(b) => json!({ "status": "polynomial", "b": poly_json(b) }),
        BsValue::Zero => json!({ "status": "zero" }),
        BsValue::Inconclusive { max_degree } => json!({ "status": "inconclusive", "max_degree": max_degree }),
    }
}

fn parse_range(text: &str) -> Result<(u32, u32), Failure> {
    let bad = || Failure::Engine(Error::InvalidInput(format!("`{text}` is not N or a range a..b")));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = text.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a == 0 || b < a {
        return Err(Failure::Engine(Error::InvalidInput("N must be at least 1".into())));
    }
    Ok((a, b))
}

fn ann_method(m: AnnMethodArg) -> AnnMethod {
    match m {
        AnnMethodArg::Shift => AnnMethod::Shift,
        AnnMethodArg::Homogenized => AnnMethod::Homogenized,
    }
}

fn run(cli: &Cli) -> Outcome {
    let mut opts = GbOptions::default();
    if cli.sugar {
        opts.strategy = Strategy::Sugar;
    }
    if let Some(p) = cli.max_pairs {
        opts.limits.max_pairs = p;
    }
    let ctx = Ctx {
        vars: cli.vars.clone(),
        opts,
    };
    let fail = |r: Report| move |e: Failure| (r, e);
    match &cli.command {
        Command::AnnPair { f, g, method } => {
            let mut rep = Report::new("ann-pair").input("f", f.as_str()).input("g", g.as_str());
            let body = (|| {
                let (vars, ps) = ctx.polys(&[f, g])?;
                let names: Vec<&str> = vars.iter().map(String::as_str).collect();
                let sig = Arc::new(AlgebraSignature::weyl(&names, &["s1", "s2"])?);
                let gb = annihilator_with(&sig, &ps, ann_method(*method), &ctx.opts)?;
                Ok::<_, Failure>((vars, gb))
            })();
            let (vars, gb) = body.map_err(fail(Report::new("ann-pair")))?;
            rep = rep.input("vars", vars);
            rep.set("annihilator", gb_json(&gb));
            Ok(rep)
        }
        Command::AnnOne { f, method } => {
            let mut rep = Report::new("ann-one").input("f", f.as_str());
            let (vars, gb) = (|| {
                let (vars, ps) = ctx.polys(&[f])?;
                let names: Vec<&str> = vars.iter().map(String::as_str).collect();
                let sig = Arc::new(AlgebraSignature::weyl(&names, &["s"])?);
                Ok::<_, Failure>((vars, annihilator_with(&sig, &ps, ann_method(*method), &ctx.opts)?))
            })()
            .map_err(fail(Report::new("ann-one")))?;
            rep = rep.input("vars", vars);
            rep.set("annihilator", gb_json(&gb));
            Ok(rep)
        }
        Command::GlobalB { f } => {
            let mut rep = Report::new("global-b").input("f", f.as_str());
            let (vars, b) = (|| {
                let (vars, ps) = ctx.polys(&[f])?;
                let names: Vec<&str> = vars.iter().map(String::as_str).collect();
                let sig = Arc::new(AlgebraSignature::weyl(&names, &["s"])?);
                Ok::<_, Failure>((vars, global_b(&sig, &ps[0], &ctx.opts)?))
            })()
            .map_err(fail(Report::new("global-b")))?;
            rep = rep.input("vars", vars);
            rep.set("b", poly_json(&b));
            Ok(rep)
        }
        Command::BsIdeal { f, g } => {
            let mut rep = Report::new("bs-ideal").input("f", f.as_str()).input("g", g.as_str());
            let pair = Pair {
                f: f.clone(),
                g: g.clone(),
                bs_fixture: None,
            };
            let (vars, r) = ctx.rational(&pair).map_err(fail(Report::new("bs-ideal")))?;
            rep = rep.input("vars", vars);
            rep.set("bs_ideal", bs_json(r.bs_ideal().expect("computed")));
            Ok(rep)
        }
        Command::AnnRational { pair, m, step_mode } => {
            let mut rep = Report::new("ann-rational")
                .input("f", pair.f.as_str())
                .input("g", pair.g.as_str())
                .input("m", *m);
            let mode = match step_mode {
                StepArg::Direct => StepMode::Direct,
                StepArg::Iterated => StepMode::Iterated,
            };
            let (vars, r, ann) = (|| {
                let (vars, r) = ctx.rational(pair)?;
                let ann = r.ann_rational(*m, mode)?;
                Ok::<_, Failure>((vars, r, ann))
            })()
            .map_err(fail(Report::new("ann-rational")))?;
            rep = rep.input("vars", vars);
            rep.set("bs_ideal", bs_json(r.bs_ideal().expect("set")));
            rep.set("case", format!("{:?}", ann.case));
            rep.set("annihilator", gb_json(&ann.basis));
            rep.set("saturation", saturation_json(&ann.saturation));
            Ok(rep)
        }
        Command::BsRational {
            pair,
            m,
            n,
            method,
            max_degree,
            order,
            certificate,
        } => {
            let rep = Report::new("bs-rational")
                .input("f", pair.f.as_str())
                .input("g", pair.g.as_str())
                .input("m", *m)
                .input("N", n.as_str());
            bs_rational(&ctx, rep, pair, *m, n, *method, *max_degree, *order, *certificate)
        }
        Command::Certificate { pair, m, n, b, out } => {
            let mut rep = Report::new("certificate")
                .input("f", pair.f.as_str())
                .input("g", pair.g.as_str())
                .input("m", *m)
                .input("N", *n)
                .input("b", b.as_str());
            let res = (|| {
                let (vars, r) = ctx.rational(pair)?;
                let bu = parse_comm(b, &["s"])?.to_univariate(0)?;
                let ops = r.certificate(*m, *n, &bu)?;
                let v = r.verify_certificate(*m, *n, &bu, &ops)?;
                let file = CertificateFile {
                    vars: vars.clone(),
                    f: pair.f.clone(),
                    g: pair.g.clone(),
                    m: *m,
                    n: *n,
                    b: bu.to_string_in("s"),
                    operators: ops.iter().map(|p| p.to_string()).collect(),
                };
                if let Some(path) = out {
                    std::fs::write(path, file.to_text()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                }
                Ok::<_, Failure>((vars, ops, v))
            })();
            let (vars, ops, v) = res.map_err(fail(Report::new("certificate")))?;
            rep = rep.input("vars", vars);
            rep.set("operators", strings(&ops));
            rep.set("verification", json!({ "normal_form": v.normal_form, "action": v.action }));
            if !v.passed() {
                return Err((rep, Failure::Verification("the computed certificate did not verify".into())));
            }
            Ok(rep)
        }
        Command::Verify { file, bs_fixture } => {
            let mut rep = Report::new("verify").input("file", file.display().to_string());
            let res = (|| {
                let cert = CertificateFile::parse(&read(file)?)?;
                let pair = Pair {
                    f: cert.f.clone(),
                    g: cert.g.clone(),
                    bs_fixture: bs_fixture.clone(),
                };
                let ctx = Ctx {
                    vars: Some(cert.vars.clone()),
                    opts: ctx.opts.clone(),
                };
                let (_, r) = ctx.rational(&pair)?;
                let ops = cert.parse_operators(&r)?;
                let v = r.verify_certificate(cert.m, cert.n, &cert.parse_b()?, &ops)?;
                Ok::<_, Failure>((cert, v))
            })();
            let (cert, v) = res.map_err(fail(Report::new("verify")))?;
            rep = rep
                .input("f", cert.f.as_str())
                .input("g", cert.g.as_str())
                .input("m", cert.m)
                .input("N", cert.n)
                .input("b", cert.b.as_str());
            rep.set("verification", json!({ "normal_form": v.normal_form, "action": v.action }));
            rep.set("passed", v.passed());
            if !v.passed() {
                let which = if v.normal_form { "action" } else { "normal form" };
                return Err((rep, Failure::Verification(format!("certificate failed the {which} check"))));
            }
            Ok(rep)
        }
        Command::Corpus {
            list,
            filter,
            include_stretch,
        } => {
            let mut rep = Report::new("corpus").input("list", *list).input("include_stretch", *include_stretch);
            if let Some(f) = filter {
                rep = rep.input("filter", f.as_str());
            }
            let selected: Vec<_> = corpus::cases()
                .into_iter()
                .filter(|c| filter.as_ref().map_or(true, |f| c.matches(f)))
                .filter(|c| *list || *include_stretch || !c.stretch)
                .collect();
            if *list {
                let rows: Vec<Value> = selected
                    .iter()
                    .map(|c| {
                        json!({
                            "id": c.id, "f": c.f, "g": c.g, "stretch": c.stretch,
                            "tags": c.tags, "expected": c.expected(),
                        })
                    })
                    .collect();
                rep.set("cases", rows);
                return Ok(rep);
            }
            let mut runner = Runner::new(ctx.opts.clone());
            let mut rows = Vec::new();
            let mut failed = 0;
            for c in &selected {
                let o = runner.run(c);
                eprintln!(
                    "{} {:<32} {:>9.2}s  {}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.id,
                    o.elapsed.as_secs_f64(),
                    o.detail
                );
                failed += usize::from(!o.passed);
                rows.push(json!({
                    "id": o.id, "passed": o.passed, "expected": c.expected(), "observed": o.detail,
                    "seconds": (o.elapsed.as_secs_f64() * 100.0).round() / 100.0,
                }));
            }
            rep.set("cases", rows);
            rep.set("failed", failed);
            if failed > 0 {
                return Err((rep, Failure::CorpusFailed(failed)));
            }
            Ok(rep)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn bs_rational(
    ctx: &Ctx,
    mut rep: Report,
    pair: &Pair,
    m: u32,
    n: &str,
    method: BsMethodArg,
    max_degree: u32,
    order: OrderArg,
    certificate: bool,
) -> Outcome {
    let fail = |e: Failure| (Report::new("bs-rational"), e);
    let (lo, hi) = parse_range(n).map_err(fail)?;
    let (vars, r) = ctx.rational(pair).map_err(fail)?;
    rep = rep.input("vars", vars);
    let ord: MonomialOrder = match order {
        OrderArg::Linear => linear_order(r.sig()),
        OrderArg::Ds => ds_order(r.sig()),
    };
    let mut rows = Vec::new();
    let mut inconclusive = Vec::new();
    let mut bad_cert = None;
    for n in lo..=hi {
        let mut results: Vec<RationalBSResult> = Vec::new();
        if method != BsMethodArg::Elimination {
            results.push(r.bs_rational_linear(m, n, max_degree, Some(&ord)).map_err(|e| fail(e.into()))?);
        }
        if method != BsMethodArg::Linear {
            results.push(r.bs_rational_elim(m, n).map_err(|e| fail(e.into()))?);
        }
        for res in &results {
            let mut row = json!({
                "N": n,
                "method": format!("{:?}", res.method).to_lowercase(),
                "value": value_json(&res.value),
                "basis_size": res.stats.basis_size,
                "steps": res.stats.steps,
            });
            eprintln!("N = {n} {:?}: {} ({:.2?})", res.method, describe(&res.value), res.stats.elapsed);
            if let BsValue::Inconclusive { .. } = res.value {
                inconclusive.push(n);
            }
            if certificate {
                if let BsValue::Poly(b) = &res.value {
                    let ops = r.certificate(m, n, b).map_err(|e| fail(e.into()))?;
                    let v = r.verify_certificate(m, n, b, &ops).map_err(|e| fail(e.into()))?;
                    if !v.passed() {
                        bad_cert = Some(n);
                    }
                    row["certificate"] = json!({
                        "operators": strings(&ops),
                        "normal_form": v.normal_form,
                        "action": v.action,
                    });
                }
            }
            rows.push(row);
        }
    }
    rep.set("results", rows);
    if let Some(n) = bad_cert {
        return Err((rep, Failure::Verification(format!("certificate for N = {n} did not verify"))));
    }
    if !inconclusive.is_empty() {
        return Err((
            rep,
            Failure::Inconclusive(format!(
                "linear search reached degree {max_degree} without a relation for N = {inconclusive:?}"
            )),
        ));
    }
    Ok(rep)
}

fn emit(rep: &Report, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rep.to_json()).expect("serializable")),
        Format::Text => print!("{}", rep.to_text()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = run(&cli);
    let code = match &outcome {
        Ok(rep) => {
            emit(rep, cli.format);
            0
        }
        Err((rep, failure)) => {
            if !rep.result.is_empty() {
                emit(rep, cli.format);
            }
            eprintln!("error: {}", failure.message());
            failure.exit_code()
        }
    };
    if cli.format == Format::Text {
        eprintln!("elapsed: {:.2?}", start.elapsed());
    }
    ExitCode::from(code)
}
