mod caps;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use loopforge::brackets::{decompose, BaseOp};
use loopforge::bridge::{check_jennings_finite, TheoremCheckResult};
use loopforge::finite_loop::{self, corpus_loop, periodicity_witness, CayleyLoop};
use loopforge::graded::{akivis_check, primitivity_suite};
use loopforge::identities::{random_regular_word, verify_formula, verify_multilinearity, verify_regularity, Formula, Mutation};
use loopforge::series::dimension_degree;
use loopforge::{degree, eval_term, parse_term, Error, LoopTerm, Series, SeriesContext};

use caps::Caps;

#[derive(Parser, Debug)]
#[command(name = "loopforge", version, about = "Exact computations with loops, brackets and truncated series")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Truncation order of the series model.
    #[arg(long, global = true, default_value_t = 5)]
    order: u32,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// A Cayley table file, or the name of a bundled loop.
    #[arg(long = "loop", global = true, value_name = "FILE")]
    loop_file: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a word in the free series model, or in a loop with --loop.
    Eval {
        expr: String,
        /// Loop elements for x1, x2, .. (comma separated) when --loop is given.
        #[arg(long, value_delimiter = ',')]
        at: Vec<usize>,
    },
    /// Multidegree and dimension degree of a word.
    Degree { expr: String },
    /// Verify one of the bracket decomposition formulas.
    Verify {
        #[arg(long)]
        formula: u8,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        /// Negate the sign of the right side (a control that must fail).
        #[arg(long)]
        flip_sign: bool,
    },
    /// Multilinearity residues of brackets on elements of degrees p, q, r.
    Multilin {
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Degree additivity of the deviations of a word, or of random words.
    Regularity {
        expr: Option<String>,
        #[arg(long, default_value_t = 1)]
        var: usize,
        /// Degrees of the arguments (one more than the generators of the word).
        #[arg(long, value_delimiter = ',', default_value = "1,1,1")]
        degrees: Vec<u32>,
        /// Number of random words when no expression is given.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// γ, Bruck and dimension series of a Cayley loop.
    Analyze {
        file: Option<String>,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Print the product decomposition of a bracket on block arguments.
    Decompose {
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value = "assoc")]
        base: String,
        /// Evaluate both sides in the series model.
        #[arg(long)]
        check: bool,
    },
    /// Periodicity witnesses for the elements of a loop.
    Witness {
        file: Option<String>,
        #[arg(long)]
        element: Option<usize>,
    },
    /// The Akivis identity on induced degree-one operations.
    Akivis,
    /// Primitivity of bracket leading terms.
    Primitivity {
        #[arg(long, default_value_t = 4)]
        max_weight: usize,
    },
    /// Isolated γ terms against dimension subloops on finite loops.
    Jennings {
        file: Option<String>,
        /// Run every bundled loop.
        #[arg(long)]
        all: bool,
    },
}

/// A failed run: usage problems exit with 2.
enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let caps = Caps::from_env().map_err(usage)?;
    let c = &cli.common;
    if c.order == 0 || c.order > caps.order {
        return Err(usage(format!("order must be in 1..={} (raise with LOOPFORGE_CAPS=order=N)", caps.order)));
    }
    if let Some(j) = c.jobs {
        if j == 0 {
            return Err(usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().map_err(|e| usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Eval { expr, at } => cmd_eval(c, expr, at),
        Command::Degree { expr } => cmd_degree(c, expr),
        Command::Verify { formula, p, q, flip_sign } => cmd_verify(c, &caps, *formula, *p, *q, *flip_sign),
        Command::Multilin { p, q, r } => cmd_multilin(c, *p, *q, *r),
        Command::Regularity { expr, var, degrees, count } => cmd_regularity(c, expr.as_deref(), *var, degrees, *count),
        Command::Analyze { file, n_max } => cmd_analyze(c, &caps, file.as_deref(), *n_max),
        Command::Decompose { p, q, base, check } => cmd_decompose(c, &caps, *p, *q, base, *check),
        Command::Witness { file, element } => cmd_witness(c, file.as_deref(), *element),
        Command::Akivis => cmd_akivis(c),
        Command::Primitivity { max_weight } => cmd_primitivity(c, &caps, *max_weight),
        Command::Jennings { file, all } => cmd_jennings(c, file.as_deref(), *all),
    }
}

fn emit(c: &Common, value: &Value, text: impl FnOnce() -> String) {
    let out = if c.json { serde_json::to_string_pretty(value).expect("json") } else { text() };
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{out}");
}

fn load(spec: &str) -> Result<(String, CayleyLoop), Failure> {
    if Path::new(spec).exists() {
        let name = Path::new(spec).file_stem().map_or(spec.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok((name, CayleyLoop::load(spec)?));
    }
    match corpus_loop(spec) {
        Ok(l) => Ok((spec.to_string(), l)),
        Err(_) => Err(usage(format!("no such file or bundled loop: {spec}"))),
    }
}

fn loop_arg(c: &Common, positional: Option<&str>) -> Result<(String, CayleyLoop), Failure> {
    let spec = positional.or(c.loop_file.as_deref()).ok_or_else(|| usage("a loop is required (file or bundled name)"))?;
    load(spec)
}

fn cmd_eval(c: &Common, expr: &str, at: &[usize]) -> Outcome {
    let w = parse_term(expr)?;
    if let Some(spec) = &c.loop_file {
        let (_, l) = load(spec)?;
        let v = eval_term(&w, &l, at)?;
        emit(c, &json!({ "word": w.to_string(), "value": v }), || v.to_string());
    } else {
        let ctx = SeriesContext::new(c.order);
        let v = ctx.eval_free(&w)?;
        emit(c, &serde_json::to_value(&v).expect("series serializes"), || v.to_string());
    }
    Ok(true)
}

fn cmd_degree(c: &Common, expr: &str) -> Outcome {
    let w = parse_term(expr)?;
    let d = degree(&w);
    let nu = dimension_degree(&w, c.order)?;
    let parts: Vec<String> = d.entries().map(|(g, k)| format!("{g}: {k}")).collect();
    let value = json!({
        "word": w.to_string(),
        "degree": d.entries().map(|(g, k)| (g.to_string(), json!(k))).collect::<serde_json::Map<_, _>>(),
        "total": d.total(),
        "order": c.order,
        "dimension_degree": nu.degree(),
    });
    emit(c, &value, || {
        format!("multidegree {{{}}} (total {})\ndimension degree {} at order {}", parts.join(", "), d.total(), nu, c.order)
    });
    Ok(true)
}

fn cmd_verify(c: &Common, caps: &Caps, formula: u8, p: usize, q: usize, flip: bool) -> Outcome {
    let f = Formula::from_id(formula)?;
    if p == 0 || q == 0 {
        return Err(usage("p and q must be positive"));
    }
    if p > caps.p || q > caps.q {
        return Err(usage(format!("p ≤ {} and q ≤ {} (raise with LOOPFORGE_CAPS)", caps.p, caps.q)));
    }
    let mutation = if flip { Mutation::FlipSign } else { Mutation::None };
    let r = verify_formula(f, p, q, c.order, mutation)?;
    emit(c, &r.to_json(), || {
        let qs = r.q.map_or(String::new(), |q| format!(", q = {q}"));
        let mut s = format!(
            "formula {} (p = {}{qs}, order {}): {} [{} terms, {} ms]",
            f.id(),
            r.p,
            r.order,
            if r.pass { "pass" } else { "FAIL" },
            r.terms,
            r.elapsed.as_millis()
        );
        if let Some(w) = &r.witness {
            s.push_str(&format!("\nlowest nonzero difference: {w}"));
        }
        s
    });
    Ok(r.pass)
}

fn cmd_multilin(c: &Common, p: u32, q: u32, r: u32) -> Outcome {
    let rep = verify_multilinearity(p, q, r, c.order)?;
    emit(c, &rep.to_json(), || {
        let mut s = String::new();
        for ch in &rep.checks {
            s.push_str(&format!("{}: valuation {} (need {}) {}\n", ch.name, ch.valuation, ch.bound, if ch.pass { "ok" } else { "FAIL" }));
        }
        s.push_str(if rep.pass { "pass" } else { "FAIL" });
        s
    });
    Ok(rep.pass)
}

fn cmd_regularity(c: &Common, expr: Option<&str>, var: usize, degrees: &[u32], count: usize) -> Outcome {
    let words: Vec<LoopTerm> = match expr {
        Some(e) => vec![parse_term(e)?],
        None => {
            let k = degrees.len().saturating_sub(1).max(1);
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            (0..count).map(|_| random_regular_word(&mut rng, k, 2)).collect::<Result<_, _>>()?
        }
    };
    let mut reports = Vec::new();
    for w in &words {
        reports.push(verify_regularity(w, var, degrees, c.order)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let value = json!({ "check": "regularity", "pass": pass, "words": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>() });
    emit(c, &value, || {
        let mut s = String::new();
        for r in &reports {
            s.push_str(&format!("{}: valuation {} (need {}) {}\n", r.word, r.deviation.valuation, r.deviation.bound, if r.pass { "ok" } else { "FAIL" }));
        }
        s.push_str(if pass { "pass" } else { "FAIL" });
        s
    });
    Ok(pass)
}

fn cmd_analyze(c: &Common, caps: &Caps, file: Option<&str>, n_max: usize) -> Outcome {
    let (name, l) = loop_arg(c, file)?;
    if n_max == 0 {
        return Err(usage("--n-max must be positive"));
    }
    if l.order() > caps.linear_order {
        return Err(usage(format!("loop order {} exceeds the cap {}", l.order(), caps.linear_order)));
    }
    let gamma_caps = finite_loop::Caps { max_order: caps.loop_order, max_weight: caps.index };
    let full = finite_loop::analyze_with(&l, n_max, gamma_caps)?;
    let pass = full.bruck_in_gamma && full.gamma_in_dims;
    let mut value = full.to_json();
    value["loop"] = json!(name);
    emit(c, &value, || format!("{name}: {full}"));
    Ok(pass)
}

fn parse_base(s: &str) -> Result<BaseOp, Failure> {
    s.parse::<BaseOp>().map_err(|e: Error| usage(e.to_string()))
}

fn cmd_decompose(c: &Common, caps: &Caps, p: usize, q: usize, base: &str, check: bool) -> Outcome {
    let base = parse_base(base)?;
    if p == 0 || q == 0 {
        return Err(usage("p and q must be positive"));
    }
    if p > caps.p || q > caps.q {
        return Err(usage(format!("p ≤ {} and q ≤ {} (raise with LOOPFORGE_CAPS)", caps.p, caps.q)));
    }
    let blocks = match base {
        BaseOp::Associator => vec![1, p, q],
        BaseOp::AntiAssociator => vec![p, 1, q],
        BaseOp::Commutator => vec![p, 1],
    };
    let d = decompose(base, &blocks)?;
    let mut verified = None;
    if check {
        let order = c.order.max(d.atom_count() as u32);
        let ctx = SeriesContext::new(order);
        let atoms: Vec<Series> = (1..=d.atom_count() as u32).map(|i| ctx.x(i)).collect();
        verified = Some(d.evaluate(&ctx, &atoms)? == d.target(&ctx, &atoms)?);
    }
    let mut value = d.to_json();
    value["leaf_count"] = json!(d.leaf_count());
    if let Some(v) = verified {
        value["verified"] = json!(v);
    }
    emit(c, &value, || {
        let mut s = format!("{} leaves\n", d.leaf_count());
        for i in 0..d.leaf_count() {
            s.push_str(&format!("w{} = {}\n", i + 1, d.leaf_string(i)));
        }
        s.push_str(&format!("product: {}", d.tree));
        match verified {
            Some(true) => s.push_str("\nverified"),
            Some(false) => s.push_str("\nMISMATCH"),
            None => {}
        }
        s
    });
    Ok(verified.unwrap_or(true))
}

fn cmd_witness(c: &Common, file: Option<&str>, element: Option<usize>) -> Outcome {
    let (name, l) = loop_arg(c, file)?;
    let elements: Vec<usize> = match element {
        Some(x) => vec![x],
        None => l.elements().collect(),
    };
    let mut rows = Vec::new();
    let mut pass = true;
    for x in elements {
        let w = periodicity_witness(&l, x)?;
        let v = eval_term(&w, &l, &[x])?;
        let d = degree(&w).total();
        pass &= v == 0 && d != 0;
        rows.push((x, w, d, v));
    }
    let value = json!({
        "loop": name,
        "witnesses": rows.iter().map(|(x, w, d, v)| json!({ "element": x, "word": w.to_string(), "degree": d, "value": v })).collect::<Vec<_>>(),
        "pass": pass,
    });
    emit(c, &value, || rows.iter().map(|(x, w, d, _)| format!("{x}: {w} (degree {d})")).collect::<Vec<_>>().join("\n"));
    Ok(pass)
}

fn cmd_akivis(c: &Common) -> Outcome {
    let r = akivis_check(c.order)?;
    emit(c, &r.to_json(), || {
        format!("cyclic sum: {}\nalternating sum: {}\n{}", r.lhs, r.rhs, if r.pass { "pass" } else { "FAIL" })
    });
    Ok(r.pass)
}

fn cmd_primitivity(c: &Common, caps: &Caps, max_weight: usize) -> Outcome {
    if max_weight > caps.weight {
        return Err(usage(format!("max weight ≤ {} (raise with LOOPFORGE_CAPS)", caps.weight)));
    }
    let r = primitivity_suite(max_weight, c.order)?;
    emit(c, &r.to_json(), || {
        let bad: Vec<&str> = r.entries.iter().filter(|e| !e.primitive).map(|e| e.bracket.as_str()).collect();
        let mut s = format!("{} brackets of weight ≤ {max_weight}, {} not primitive", r.entries.len(), bad.len());
        for b in bad {
            s.push_str(&format!("\n  {b}"));
        }
        s.push_str(&format!("\ncontrol u1*u2 primitive: {}\n{}", r.control_primitive, if r.pass { "pass" } else { "FAIL" }));
        s
    });
    Ok(r.pass)
}

fn cmd_jennings(c: &Common, file: Option<&str>, all: bool) -> Outcome {
    let loops: Vec<(String, CayleyLoop)> = if all {
        finite_loop::corpus().into_iter().map(|(n, l)| (n.to_string(), l)).collect()
    } else {
        vec![loop_arg(c, file)?]
    };
    let results: Vec<TheoremCheckResult> = loops.iter().map(|(n, l)| check_jennings_finite(n, l)).collect::<Result<_, _>>()?;
    let pass = results.iter().all(|r| r.pass);
    let value = json!({ "check": "jennings", "pass": pass, "results": results.iter().map(|r| r.to_json()).collect::<Vec<_>>() });
    emit(c, &value, || results.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"));
    Ok(pass)
}
