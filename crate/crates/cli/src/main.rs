//! `hopf-lab`: classify group expressions, run the oracles, and explore the
//! truncated constructions.
//!
//! Exit codes: 0 ok, 2 parse error or bad configuration, 3 classifier/oracle
//! mismatch, 4 input outside the oracle fragment.

mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hopf_core::classifier::{classify_full, explain, Options, Outcome, Property, Verdict};
use hopf_core::constructions::{
    all_permutations, fir_witness, identity_permutation, multiplier_constraints, quotient_orders, rigid,
    tensor_endo_analyze, ConstructionError, InfinConfig,
};
use hopf_core::dsl::{parse, parse_type, print, ParseError, ParseErrorContext};
use hopf_core::integer_linear::IntMatrix;
use hopf_core::oracle::{
    cross_check, sample_free_rank, Certificate, CrossConfig, FiniteConfig, OracleError, OracleReport, Strategy,
    DEFAULT_ENTRY_BOUND,
};
use hopf_core::types_lattice::{dtc_check, type_le, DtcOutcome};
use hopf_core::{GroupExpr, NormalForm, Prime};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use config::{CliConfig, Format};

const SCHEMA: &str = "hopf-lab/1";

#[derive(Parser)]
#[command(name = "hopf-lab", version, about = "Hopficity variants of abelian groups: classifier, oracles, constructions")]
struct Cli {
    /// Output format [default: text, or the config file's value]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// TOML configuration file (overrides HOPF_LAB_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Enable the extended lemmas (EXT rules)
    #[arg(long, global = true)]
    extended: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide properties of a group expression with derivation traces
    Classify(ClassifyArgs),
    /// Decide properties from the definitions and compare with the classifier
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Finite models of the infinite-rank constructions
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// Rank-1 types: comparison and the descending type condition
    #[command(subcommand)]
    Types(TypesCommand),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Group expression, e.g. "Z(2^3) + Q^w"
    expr: String,
    /// Comma-separated properties (hopfian, cohopfian, cfi, cfs, cfh, acfh, afh, fir, bassian)
    #[arg(long, value_delimiter = ',', value_parser = parse_property)]
    props: Vec<Property>,
    /// Print the full derivation of every verdict
    #[arg(long)]
    explain: bool,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Enumerate every endomorphism of a finite group
    Finite {
        expr: String,
        /// Evaluate each endomorphism individually instead of by image class
        #[arg(long)]
        exhaustive: bool,
        /// Largest accepted group order
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Sample endomorphisms of Z^r
    Free {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=6))]
        rank: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_ENTRY_BOUND)]
        entry_bound: i64,
    },
    /// Pick the oracle from the group's shape and compare
    Cross {
        expr: String,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Quotients,
    Multipliers,
    Rigid,
    Fir,
}

#[derive(Subcommand)]
enum ConstructCommand {
    /// The truncations G_{N,K}
    Infin {
        #[arg(long, value_enum)]
        check: Check,
        /// Truncation rank, or a comma-separated list for quotients
        #[arg(long = "N", value_delimiter = ',')]
        big_n: Vec<usize>,
        /// Divisibility depth
        #[arg(long = "K")]
        big_k: Option<u32>,
        /// Multiplier for quotients [default: q_1]
        #[arg(long = "n", allow_hyphen_values = true)]
        n: Option<i64>,
        /// Prime for fir [default: q_1]
        #[arg(long)]
        prime: Option<String>,
        /// Permutation of 1..N as images, e.g. 2,1,3 (repeatable)
        #[arg(long = "perm")]
        perms: Vec<String>,
    },
    /// Endomorphism gamma ⊗ G of G^(n), gamma read from a JSON matrix
    Tensor {
        #[arg(long)]
        gamma: PathBuf,
    },
}

#[derive(Subcommand)]
enum TypesCommand {
    /// Descending type condition of a family such as "R1[def=0]:w, R1[def=inf]"
    Dtc { family: String },
    /// Compare two types given as characteristics, e.g. "def=0; 2->inf"
    Cmp { a: String, b: String },
}

fn parse_property(s: &str) -> Result<Property, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    OutOfFragment(String),
}

impl Failure {
    fn parse(src: &str, e: &ParseError) -> Self {
        Failure::Usage(ParseErrorContext { source: src, error: e }.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::OutOfFragment(_) => 4,
        }
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::OutOfFragment(e.to_string())
    }
}

/// A rendered result and its exit code.
struct Output {
    text: String,
    json: String,
    code: u8,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    result: &'a T,
}

fn output<T: Serialize>(command: &str, result: &T, text: String, code: u8) -> Output {
    let json = serde_json::to_string_pretty(&Envelope { schema: SCHEMA, command, result }).expect("serializable");
    Output { text, json, code }
}

struct Ctx {
    cfg: CliConfig,
}

impl Ctx {
    fn options(&self) -> Options {
        Options { extended_lemmas: self.cfg.extended_lemmas }
    }
}

fn parse_expr(src: &str) -> Result<GroupExpr, Failure> {
    parse(src).map_err(|e| Failure::parse(src, &e))
}

fn verdict_line(out: &mut String, v: &Verdict) {
    let (rule, anchor) = match v.trace.first() {
        Some(s) => (s.rule.to_string(), s.anchor),
        None => ("-".to_string(), "no applicable rule"),
    };
    let _ = writeln!(out, "  {:<9} {:<9} {:<5} {anchor}", v.property.short_name(), v.outcome.to_string(), rule);
    if let Some(w) = &v.witness {
        let _ = writeln!(out, "  {:<25} witness: {w}", "");
    }
}

fn cmd_classify(ctx: &Ctx, a: &ClassifyArgs) -> Result<Output, Failure> {
    let g = parse_expr(&a.expr)?;
    let props = if a.props.is_empty() { Property::ALL.to_vec() } else { a.props.clone() };
    let c = classify_full(&g, ctx.options());
    let report = c.report(&props);
    let mut text = format!("{}\n", report.group);
    for v in &report.verdicts {
        verdict_line(&mut text, v);
    }
    if a.explain {
        for v in &report.verdicts {
            text.push('\n');
            text.push_str(explain(v).trim_end());
            text.push('\n');
        }
    }
    Ok(output("classify", &report, text, 0))
}

fn certificate_line(out: &mut String, report: &OracleReport) {
    for r in &report.properties {
        let detail = match &r.certificate {
            Certificate::Exhaustion { endomorphisms, relevant } => {
                format!("checked all {endomorphisms} endomorphisms, {relevant} relevant")
            }
            Certificate::Sampled { trials, reason } => format!("{trials} samples; {reason}"),
            Certificate::Witness { endo, kernel, cokernel, description } => {
                format!("witness {} ({description}; kernel {kernel}, cokernel {cokernel})", endo.matrix())
            }
        };
        let _ = writeln!(out, "  {:<9} {:<9} {detail}", r.property.short_name(), r.outcome.to_string());
    }
}

#[derive(Serialize)]
struct Comparison {
    property: Property,
    classifier: Outcome,
    oracle: Outcome,
    agrees: bool,
}

fn compare(g: &GroupExpr, oracle: &OracleReport, opts: Options) -> Vec<Comparison> {
    let c = classify_full(g, opts);
    Property::CORE
        .iter()
        .map(|&p| {
            let (ours, theirs) = (c.outcome(p), oracle.outcome(p).expect("core property reported"));
            Comparison { property: p, classifier: ours, oracle: theirs, agrees: ours == Outcome::Undecided || ours == theirs }
        })
        .collect()
}

fn comparison_text(out: &mut String, rows: &[Comparison]) -> u8 {
    out.push_str("classifier comparison:\n");
    for r in rows {
        let mark = if r.agrees { "ok" } else { "MISMATCH" };
        let _ = writeln!(out, "  {:<9} classifier={:<9} oracle={:<9} {mark}", r.property.short_name(), r.classifier.to_string(), r.oracle.to_string());
    }
    let ok = rows.iter().all(|r| r.agrees);
    out.push_str(if ok { "agreement\n" } else { "MISMATCH\n" });
    if ok {
        0
    } else {
        3
    }
}

#[derive(Serialize)]
struct OracleResult<'a> {
    oracle: &'a OracleReport,
    comparison: Vec<Comparison>,
    agrees: bool,
}

fn oracle_output(command: &str, g: &GroupExpr, report: &OracleReport, extra: String, opts: Options) -> Output {
    let comparison = compare(g, report, opts);
    let mut text = format!("{} ({:?}, {} endomorphisms)\n", report.group, report.method, report.endomorphisms);
    text.push_str(&extra);
    certificate_line(&mut text, report);
    let code = comparison_text(&mut text, &comparison);
    let agrees = code == 0;
    output(command, &OracleResult { oracle: report, comparison, agrees }, text, code)
}

fn cmd_oracle(ctx: &Ctx, c: &OracleCommand) -> Result<Output, Failure> {
    let opts = ctx.options();
    match c {
        OracleCommand::Finite { expr, exhaustive, bound, workers } => {
            let g = parse_expr(expr)?;
            let nf = NormalForm::of(&g);
            if nf.finite_decomposition().is_none() {
                return Err(Failure::OutOfFragment(format!("{nf} is not a finite group")));
            }
            let strategy = if *exhaustive { Strategy::Direct } else { Strategy::Auto };
            let finite = FiniteConfig { bound: bound.unwrap_or(ctx.cfg.bound), workers: (*workers).max(1), strategy };
            let check = cross_check(&g, CrossConfig { finite, classifier: opts, ..CrossConfig::default() })?;
            Ok(oracle_output("oracle finite", &g, &check.oracle, String::new(), opts))
        }
        OracleCommand::Free { rank, trials, seed, entry_bound } => {
            let seed = seed.unwrap_or(ctx.cfg.seed);
            let r = sample_free_rank(*rank, *trials, seed, *entry_bound)?;
            let g = parse_expr(&format!("Z^{rank}"))?;
            let extra = format!(
                "seed {seed}: {} injective, {} surjective, {} samples break det/injective/finite-cokernel\n",
                r.injective,
                r.surjective,
                r.violations.len()
            );
            let mut out = oracle_output("oracle free", &g, &r.report, extra, opts);
            if !r.violations.is_empty() {
                out.code = 3;
            }
            Ok(out)
        }
        OracleCommand::Cross { expr, bound, trials, seed } => {
            let g = parse_expr(expr)?;
            let finite = FiniteConfig { bound: bound.unwrap_or(ctx.cfg.bound), ..FiniteConfig::default() };
            let cfg =
                CrossConfig { finite, trials: *trials, seed: seed.unwrap_or(ctx.cfg.seed), classifier: opts, ..CrossConfig::default() };
            let check = cross_check(&g, cfg)?;
            Ok(oracle_output("oracle cross", &g, &check.oracle, String::new(), opts))
        }
    }
}

fn parse_perm(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("bad permutation entry {x:?} in {s:?}"))))
        .collect()
}

fn perm_text(p: &[usize]) -> String {
    let parts: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn cmd_construct(ctx: &Ctx, c: &ConstructCommand) -> Result<Output, Failure> {
    match c {
        ConstructCommand::Infin { check, big_n, big_k, n, prime, perms } => {
            let k = big_k.unwrap_or(ctx.cfg.k);
            let ns = if big_n.is_empty() { vec![ctx.cfg.n] } else { big_n.clone() };
            let cfg = InfinConfig::new(ns[0], k)?;
            let header = format!("G_(N,K) with K={k}, p = {}, q = {}\n", prime_list(&cfg.p), prime_list(&cfg.q));
            match check {
                Check::Quotients => {
                    let m = n.unwrap_or_else(|| cfg.q[0].to_u64().expect("small prime") as i64);
                    let rows = quotient_orders(&cfg, m, &ns)?;
                    let mut text = format!("{header}|G_N / {m} G_N| by N:\n");
                    for (nn, o) in &rows {
                        let _ = writeln!(text, "  N={nn:<3} {o}");
                    }
                    let increasing = rows.windows(2).all(|w| w[0].1 < w[1].1);
                    let _ = writeln!(text, "strictly increasing: {increasing}");
                    let rows: Vec<Value> = rows.iter().map(|(nn, o)| json!({"N": nn, "order": o.to_string()})).collect();
                    let result = json!({"check": "quotients", "K": k, "n": m, "rows": rows, "increasing": increasing});
                    Ok(output("construct infin", &result, text, 0))
                }
                Check::Multipliers => {
                    let mut sigmas = vec![identity_permutation(cfg.n)];
                    if perms.is_empty() && cfg.n >= 2 {
                        let mut t = identity_permutation(cfg.n);
                        t.swap(0, 1);
                        sigmas.push(t);
                    }
                    for p in perms {
                        sigmas.push(parse_perm(p)?);
                    }
                    let mut text = format!("{header}maps G -> G_sigma with e_i -> c_i e_i, N={}\n", cfg.n);
                    let mut results = Vec::new();
                    let mut scope = "";
                    for s in &sigmas {
                        let sol = multiplier_constraints(&cfg, s)?;
                        let verified = sol.verify();
                        let _ = writeln!(text, "sigma={}: {:?} (verified: {verified})", perm_text(s), sol.solution_set);
                        for line in &sol.constraints {
                            let _ = writeln!(text, "  {line}");
                        }
                        scope = sol.scope;
                        results.push(json!({
                            "sigma": s,
                            "solution_set": sol.solution_set,
                            "constraints": sol.constraints,
                            "verified": verified,
                        }));
                    }
                    let _ = writeln!(text, "scope: {scope}");
                    let result = json!({"check": "multipliers", "N": cfg.n, "K": k, "scope": scope, "results": results});
                    Ok(output("construct infin", &result, text, 0))
                }
                Check::Rigid => {
                    if cfg.n > 4 {
                        return Err(Failure::Usage(format!("rigid checks all permutations; N={} is above 4", cfg.n)));
                    }
                    let family = all_permutations(cfg.n);
                    let r = rigid(&cfg, &family)?;
                    let zero = r.pairs.iter().filter(|(i, j, _)| i != j).count();
                    let mut text = format!("{header}family of all {} permutations of 1..{}\n", family.len(), cfg.n);
                    let _ = writeln!(text, "  {} ordered pairs of distinct members, {} diagonal entries", zero, family.len());
                    let _ = writeln!(text, "rigid: {}", r.rigid);
                    let pairs: Vec<Value> =
                        r.pairs.iter().map(|(i, j, s)| json!({"source": i, "target": j, "solution_set": s})).collect();
                    let result = json!({"check": "rigid", "N": cfg.n, "K": k, "permutations": r.permutations, "pairs": pairs, "rigid": r.rigid});
                    Ok(output("construct infin", &result, text, 0))
                }
                Check::Fir => {
                    let p = match prime {
                        Some(s) => s.parse::<Prime>().map_err(|e| Failure::Usage(e.to_string()))?,
                        None => cfg.q[0].clone(),
                    };
                    let w = fir_witness(&cfg, &p)?;
                    let mut text = format!("{header}multiplication by {p} on G_(N={},K={k})\n", cfg.n);
                    let _ = writeln!(text, "  injective: {}", w.injective);
                    let _ = writeln!(text, "  quotient: {}", w.quotient);
                    for (nn, o) in &w.growth {
                        let _ = writeln!(text, "  |G_N / {p} G_N| at N={nn}: {o}");
                    }
                    let growth: Vec<Value> = w.growth.iter().map(|(nn, o)| json!({"N": nn, "order": o.to_string()})).collect();
                    let result = json!({
                        "check": "fir",
                        "N": cfg.n,
                        "K": k,
                        "prime": p,
                        "injective": w.injective,
                        "quotient": w.quotient.to_string(),
                        "growth": growth,
                    });
                    Ok(output("construct infin", &result, text, 0))
                }
            }
        }
        ConstructCommand::Tensor { gamma } => {
            let m = load_matrix(gamma)?;
            let a = tensor_endo_analyze(&m)?;
            let automorphism = a.injective && a.surjective;
            let mut text = format!("gamma = {m}\n");
            let _ = writeln!(text, "  det: {}", a.det);
            let _ = writeln!(text, "  Z^n / gamma Z^n: {}", a.gamma_cokernel);
            let _ = writeln!(text, "  injective: {}", a.injective);
            let _ = writeln!(text, "  surjective: {}", a.surjective);
            let _ = writeln!(text, "  cokernel finite: {}", a.cokernel_finite);
            let _ = writeln!(text, "  cfH consistent: {}", a.cfh_consistent);
            let _ = writeln!(text, "{}", if automorphism { "automorphism" } else { "not an automorphism" });
            let result = json!({
                "gamma": m,
                "det": a.det.to_string(),
                "gamma_cokernel": a.gamma_cokernel.to_string(),
                "injective": a.injective,
                "surjective": a.surjective,
                "cokernel_finite": a.cokernel_finite,
                "cfh_consistent": a.cfh_consistent,
                "automorphism": automorphism,
            });
            Ok(output("construct tensor", &result, text, 0))
        }
    }
}

fn prime_list(ps: &[Prime]) -> String {
    let parts: Vec<String> = ps.iter().map(ToString::to_string).collect();
    parts.join(",")
}

/// A JSON array of rows; entries are integers or decimal strings.
fn load_matrix(path: &PathBuf) -> Result<IntMatrix, Failure> {
    let bad = |m: String| Failure::Usage(format!("{}: {m}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let rows = v.as_array().ok_or_else(|| bad("expected an array of rows".into()))?;
    let rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let r = r.as_array().ok_or_else(|| bad("expected an array of rows".into()))?;
            r.iter()
                .map(|x| {
                    let s = match x {
                        Value::Number(n) => n.to_string(),
                        Value::String(s) => s.trim().to_string(),
                        _ => return Err(bad(format!("bad entry {x}"))),
                    };
                    s.parse::<BigInt>().map_err(|_| bad(format!("bad integer {s:?}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    IntMatrix::from_rows(&rows).map_err(|e| bad(e.to_string()))
}

fn cmd_types(c: &TypesCommand) -> Result<Output, Failure> {
    match c {
        TypesCommand::Dtc { family } => {
            let src = format!("CD{{{family}}}");
            let g = parse(&src).map_err(|e| Failure::parse(&src, &e))?;
            let outcome = dtc_check(&NormalForm::of(&g).type_family());
            let witness = match &outcome {
                DtcOutcome::Holds => None,
                DtcOutcome::Fails { witness } => Some(witness.to_string()),
            };
            let group = print(&g);
            let mut text = format!("{group}\ndescending type condition: {}\n", if outcome.holds() { "Holds" } else { "Fails" });
            if let Some(w) = &witness {
                let _ = writeln!(text, "  witness: {w}");
            }
            let result = json!({"group": group, "holds": outcome.holds(), "witness": witness});
            Ok(output("types dtc", &result, text, 0))
        }
        TypesCommand::Cmp { a, b } => {
            let ta = parse_type(a).map_err(|e| Failure::parse(a, &e))?;
            let tb = parse_type(b).map_err(|e| Failure::parse(b, &e))?;
            let (le, ge) = (type_le(&ta, &tb), type_le(&tb, &ta));
            let relation = match (le, ge) {
                (true, true) => "equal",
                (true, false) => "less",
                (false, true) => "greater",
                (false, false) => "incomparable",
            };
            let text = format!("[{ta}] vs [{tb}]: {relation}\n");
            let result = json!({"a": ta.to_string(), "b": tb.to_string(), "relation": relation, "le": le, "ge": ge});
            Ok(output("types cmp", &result, text, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match CliConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    cfg.extended_lemmas |= cli.extended;
    let ctx = Ctx { cfg };
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(&ctx, a),
        Command::Oracle(c) => cmd_oracle(&ctx, c),
        Command::Construct(c) => cmd_construct(&ctx, c),
        Command::Types(c) => cmd_types(c),
    };
    match result {
        Ok(out) => {
            // a closed pipe is not an error worth reporting
            let mut stdout = std::io::stdout().lock();
            let _ = match ctx.cfg.format {
                Format::Text => stdout.write_all(out.text.as_bytes()),
                Format::Json => writeln!(stdout, "{}", out.json),
            };
            ExitCode::from(out.code)
        }
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::OutOfFragment(m) => eprintln!("out of fragment: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
