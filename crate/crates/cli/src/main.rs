//! `rls`: command-line front end for the regular-language state toolkit.
//!
//! The payload of every command goes to standard output as JSON; `--json` wraps
//! it in a report with the command name, an input digest and the tool version.
//! A one-line human summary and the wall-clock time go to standard error.

mod demo;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use rls_core::algebra::{check_rls, check_shift_invariant_algebraic, check_ti_mpsx};
use rls_core::automata::{compile, minimal_dfa, remove_epsilon, trim, Nfa};
use rls_core::canonical::canonical_decompose;
use rls_core::lang::{all_words, format_word, infer_alphabet, parse_regex, render, Alphabet};
use rls_core::mps::{nfa_to_mps, parse_mps_json, AnyMps, MpsX, Num};
use rls_core::peps2d::{ota_accepts, ota_to_peps, peps_evaluate, Ota, Picture};
use rls_core::sparse_lu::{growth_is_polynomial, is_sparse, lu_equivalent, verify_product_map, VERIFY_N_MAX};

const EXIT_USAGE: u8 = 64;
const EXIT_COMPUTE: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "rls", version, about = "Regular-language quantum states: automata, MPS, canonical forms, LU checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Wrap the payload in a report with command, input digest and version.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for commands given several inputs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and pretty-print regular expressions.
    Parse(LangArgs),
    /// List the words of length N.
    Words {
        #[command(flatten)]
        lang: LangArgs,
        #[arg(long)]
        n: usize,
    },
    /// Compile to an epsilon-free, trimmed automaton.
    Nfa(LangArgs),
    /// Minimal DFA and its number of useful states.
    Minimize(LangArgs),
    /// Decide whether a binary MPS (or an automaton's MPS) has 0/1 amplitudes.
    IsRls(SourceArgs),
    /// Decide closure under cyclic rotation.
    ShiftInvariant(SourceArgs),
    /// Decide translational invariance of an MPS with boundary matrix X.
    TiMpsx {
        #[arg(long)]
        mps: Vec<PathBuf>,
    },
    /// Canonical decomposition as JSON.
    Canonical(LangArgs),
    /// Sparsity verdict, optionally with the growth oracle up to --n-max.
    Sparse {
        #[command(flatten)]
        lang: LangArgs,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Decide local-unitary equivalence of two sparse languages.
    LuCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a single-site map against two languages up to --n-max.
    VerifyMap {
        #[command(flatten)]
        pair: PairArgs,
        /// Matrix JSON: rows of numbers or [re, im] pairs.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = VERIFY_N_MAX)]
        n_max: usize,
    },
    /// Binary MPS document of an automaton.
    MpsExport(LangArgs),
    /// Contract the PEPS of a 2D automaton on one picture.
    PepsEval {
        #[arg(long)]
        ota: PathBuf,
        /// Picture JSON file, or the row-array JSON itself.
        #[arg(long)]
        picture: String,
    },
    /// Run the reference examples and print a pass/fail table.
    Demo,
}

#[derive(Args, Debug, Default)]
struct LangArgs {
    /// Regular expression over digit symbols (repeatable).
    #[arg(long)]
    regex: Vec<String>,
    /// Automaton JSON file (repeatable).
    #[arg(long)]
    nfa: Vec<PathBuf>,
    /// Alphabet size; inferred from each expression when omitted.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args, Debug)]
struct SourceArgs {
    #[command(flatten)]
    lang: LangArgs,
    /// MPS JSON file (repeatable).
    #[arg(long)]
    mps: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// First automaton JSON file.
    #[arg(long)]
    a: Option<PathBuf>,
    /// Second automaton JSON file.
    #[arg(long)]
    b: Option<PathBuf>,
    /// Alternatively, exactly two expressions.
    #[arg(long)]
    regex: Vec<String>,
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(rls_core::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<rls_core::Error> for Failure {
    fn from(e: rls_core::Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome<T> = Result<T, Failure>;

/// One input as given on the command line, with the bytes that feed the digest.
#[derive(Debug, Clone)]
enum Source {
    Regex(String),
    Nfa(String),
    Mps(PathBuf, String),
    /// Any other document (matrix, 2D automaton, picture).
    Doc(&'static str, String),
}

impl Source {
    fn digest_bytes(&self) -> Vec<u8> {
        let (tag, body) = match self {
            Source::Regex(t) => ("regex", t.as_str()),
            Source::Nfa(t) => ("nfa", t.as_str()),
            Source::Mps(_, t) => ("mps", t.as_str()),
            Source::Doc(tag, t) => (*tag, t.as_str()),
        };
        [tag.as_bytes(), b"\0", body.as_bytes(), b"\0"].concat()
    }
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn lang_sources(lang: &LangArgs) -> Outcome<Vec<Source>> {
    let mut out: Vec<Source> = lang.regex.iter().cloned().map(Source::Regex).collect();
    for p in &lang.nfa {
        out.push(Source::Nfa(read(p)?));
    }
    Ok(out)
}

fn alphabet_for(text: &str, d: Option<usize>) -> Outcome<Alphabet> {
    Ok(match d {
        Some(d) => Alphabet::new(d)?,
        None => infer_alphabet(text)?,
    })
}

fn automaton(src: &Source, d: Option<usize>) -> Outcome<Nfa> {
    match src {
        Source::Regex(t) => {
            let alphabet = alphabet_for(t, d)?;
            Ok(compile(&parse_regex(t, alphabet)?, alphabet.size())?)
        }
        Source::Nfa(text) => Ok(trim(&remove_epsilon(&Nfa::from_json_str(text)?))?),
        Source::Mps(p, _) => Err(Failure::Usage(format!("{} is an MPS, expected a language", p.display()))),
        Source::Doc(tag, _) => Err(Failure::Usage(format!("a {tag} document is not a language"))),
    }
}

fn json_of<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serialises")
}

fn run_each(sources: &[Source], f: impl Fn(&Source) -> Outcome<Value> + Sync) -> Outcome<Value> {
    if sources.is_empty() {
        return Err(Failure::Usage("no input given".into()));
    }
    let mut results: Vec<Value> = sources.par_iter().map(&f).collect::<Outcome<_>>()?;
    Ok(if results.len() == 1 { results.pop().expect("one result") } else { Value::Array(results) })
}

fn load_mps(src: &Source) -> Outcome<AnyMps> {
    match src {
        Source::Mps(_, text) => Ok(parse_mps_json(text)?),
        _ => unreachable!("only MPS sources are loaded as MPS"),
    }
}

fn binary_mps_of(src: &Source, d: Option<usize>) -> Outcome<rls_core::mps::BinaryMps> {
    match src {
        Source::Mps(p, _) => match load_mps(src)? {
            AnyMps::Binary(m) => Ok(m),
            AnyMps::X(_) => Err(Failure::Usage(format!("{} has a boundary matrix X; use ti-mpsx", p.display()))),
        },
        _ => Ok(nfa_to_mps(&automaton(src, d)?)?),
    }
}

fn source_args(args: &SourceArgs) -> Outcome<Vec<Source>> {
    let mut sources = lang_sources(&args.lang)?;
    for p in &args.mps {
        sources.push(Source::Mps(p.clone(), read(p)?));
    }
    Ok(sources)
}

fn pair(args: &PairArgs) -> Outcome<(Vec<Source>, Nfa, Nfa)> {
    let sources = match (&args.a, &args.b, args.regex.as_slice()) {
        (Some(a), Some(b), []) => vec![Source::Nfa(read(a)?), Source::Nfa(read(b)?)],
        (None, None, [x, y]) => vec![Source::Regex(x.clone()), Source::Regex(y.clone())],
        _ => return Err(Failure::Usage("give --a and --b files, or exactly two --regex values".into())),
    };
    // Both expressions share one alphabet unless --d says otherwise.
    let d = match (args.d, &sources[0], &sources[1]) {
        (None, Source::Regex(x), Source::Regex(y)) => {
            Some(alphabet_for(x, None)?.size().max(alphabet_for(y, None)?.size()))
        }
        (d, _, _) => d,
    };
    let (l1, l2) = (automaton(&sources[0], d)?, automaton(&sources[1], d)?);
    Ok((sources, l1, l2))
}

fn parse_matrix(text: &str) -> Outcome<DMatrix<Complex64>> {
    let rows: Vec<Vec<Num>> = serde_json::from_str(text).map_err(|e| Failure::Usage(format!("matrix: {e}")))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Failure::Usage("matrix must be square and non-empty".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j].to_complex()))
}

fn picture_text(arg: &str) -> Outcome<String> {
    if arg.trim_start().starts_with('[') {
        Ok(arg.to_string())
    } else {
        read(Path::new(arg))
    }
}

struct Report {
    payload: Value,
    sources: Vec<Source>,
    exit: u8,
}

fn report(payload: Value, sources: Vec<Source>) -> Report {
    Report { payload, sources, exit: 0 }
}

fn execute(command: &Command) -> Outcome<Report> {
    match command {
        Command::Parse(lang) => {
            let sources = lang_sources(lang)?;
            let payload = run_each(&sources, |src| match src {
                Source::Regex(t) => {
                    let alphabet = alphabet_for(t, lang.d)?;
                    let ast = parse_regex(t, alphabet)?;
                    Ok(json!({"regex": render(&ast, alphabet), "d": alphabet.size(), "size": ast.size()}))
                }
                _ => Err(Failure::Usage("parse takes --regex only".into())),
            })?;
            Ok(report(payload, sources))
        }
        Command::Words { lang, n } => {
            let sources = lang_sources(lang)?;
            let payload = run_each(&sources, |src| {
                let nfa = automaton(src, lang.d)?;
                let words: Vec<String> =
                    all_words(nfa.d(), *n)?.filter(|w| nfa.accepts(w)).map(|w| format_word(&w, nfa.d())).collect();
                Ok(json!({"n": n, "count": words.len(), "words": words}))
            })?;
            Ok(report(payload, sources))
        }
        Command::Nfa(lang) => {
            let sources = lang_sources(lang)?;
            let payload = run_each(&sources, |src| Ok(json_of(&automaton(src, lang.d)?.to_json())))?;
            Ok(report(payload, sources))
        }
        Command::Minimize(lang) => {
            let sources = lang_sources(lang)?;
            let payload = run_each(&sources, |src| {
                let dfa = minimal_dfa(&automaton(src, lang.d)?)?;
                Ok(json!({"size": dfa.size(), "dfa": dfa.to_trimmed_nfa().to_json()}))
            })?;
            Ok(report(payload, sources))
        }
        Command::IsRls(args) => {
            let sources = source_args(args)?;
            let payload = run_each(&sources, |src| Ok(json_of(&check_rls(&binary_mps_of(src, args.lang.d)?))))?;
            Ok(report(payload, sources))
        }
        Command::ShiftInvariant(args) => {
            let sources = source_args(args)?;
            let payload = run_each(&sources, |src| {
                let mps = match src {
                    Source::Mps(..) => binary_mps_of(src, None)?,
                    // Rotation closure is a property of the language; the minimal
                    // DFA gives an MPS whose amplitudes are exactly 0 or 1.
                    _ => nfa_to_mps(&minimal_dfa(&automaton(src, args.lang.d)?)?.to_trimmed_nfa())?,
                };
                Ok(json_of(&check_shift_invariant_algebraic(&mps)))
            })?;
            Ok(report(payload, sources))
        }
        Command::TiMpsx { mps } => {
            let sources = mps.iter().map(|p| Ok(Source::Mps(p.clone(), read(p)?))).collect::<Outcome<Vec<_>>>()?;
            let payload = run_each(&sources, |src| {
                let mpsx = match load_mps(src)? {
                    AnyMps::X(m) => m,
                    AnyMps::Binary(b) => MpsX::from_binary(&b),
                };
                Ok(json_of(&check_ti_mpsx(&mpsx)))
            })?;
            Ok(report(payload, sources))
        }
        Command::Canonical(lang) => {
            let sources = lang_sources(lang)?;
            let payload =
                run_each(&sources, |src| Ok(json_of(&canonical_decompose(&automaton(src, lang.d)?)?.to_json())))?;
            Ok(report(payload, sources))
        }
        Command::Sparse { lang, n_max } => {
            let sources = lang_sources(lang)?;
            let payload = run_each(&sources, |src| {
                let nfa = automaton(src, lang.d)?;
                let mut v = json_of(&is_sparse(&nfa)?);
                if let Some(n) = n_max {
                    v["growth_polynomial"] = json!(growth_is_polynomial(&nfa, *n)?);
                }
                Ok(v)
            })?;
            Ok(report(payload, sources))
        }
        Command::LuCheck { pair: args, seed } => {
            let (sources, l1, l2) = pair(args)?;
            let verdict = lu_equivalent(&l1, &l2, *seed)?;
            let exit = u8::try_from(verdict.status.exit_code()).expect("small exit code");
            Ok(Report { payload: verdict.to_json(), sources, exit })
        }
        Command::VerifyMap { pair: args, matrix, n_max } => {
            let (mut sources, l1, l2) = pair(args)?;
            let text = read(matrix)?;
            let m = parse_matrix(&text)?;
            let result = verify_product_map(&m, &l1, &l2, *n_max)?;
            sources.push(Source::Doc("matrix", text));
            Ok(Report { payload: json!({"result": result, "n_max": n_max}), sources, exit: u8::from(!result) })
        }
        Command::MpsExport(lang) => {
            let sources = lang_sources(lang)?;
            let payload = run_each(&sources, |src| Ok(json_of(&nfa_to_mps(&automaton(src, lang.d)?)?.to_json())))?;
            Ok(report(payload, sources))
        }
        Command::PepsEval { ota, picture } => {
            let ota_text = read(ota)?;
            let pic_text = picture_text(picture)?;
            let automaton = Ota::from_json_str(&ota_text)?;
            let pic: Picture = serde_json::from_str(&pic_text).map_err(|e| Failure::Usage(format!("picture: {e}")))?;
            let value = peps_evaluate(&ota_to_peps(&automaton), &pic)?;
            let value = u64::try_from(value).map_or_else(|_| json!(value.to_string()), |v| json!(v));
            let payload = json!({"value": value, "accepted": ota_accepts(&automaton, &pic)?});
            let sources = vec![Source::Doc("ota", ota_text), Source::Doc("picture", pic_text)];
            Ok(report(payload, sources))
        }
        Command::Demo => {
            let rows = demo::run();
            let failed = rows.iter().any(|r| !r.pass && !r.known);
            eprint!("{}", demo::table(&rows));
            Ok(Report { payload: json_of(&rows), sources: Vec::new(), exit: u8::from(failed) })
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Parse(_) => "parse",
        Command::Words { .. } => "words",
        Command::Nfa(_) => "nfa",
        Command::Minimize(_) => "minimize",
        Command::IsRls(_) => "is-rls",
        Command::ShiftInvariant(_) => "shift-invariant",
        Command::TiMpsx { .. } => "ti-mpsx",
        Command::Canonical(_) => "canonical",
        Command::Sparse { .. } => "sparse",
        Command::LuCheck { .. } => "lu-check",
        Command::VerifyMap { .. } => "verify-map",
        Command::MpsExport(_) => "mps-export",
        Command::PepsEval { .. } => "peps-eval",
        Command::Demo => "demo",
    }
}

fn digest(sources: &[Source]) -> String {
    let mut hasher = Sha256::new();
    for s in sources {
        hasher.update(s.digest_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn summary(payload: &Value) -> String {
    match payload {
        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
            format!("{} results", items.len())
        }
        Value::Object(map) => ["result", "status", "sparse", "size", "value", "count"]
            .iter()
            .find_map(|k| map.get(*k).map(|v| format!("{k} {v}")))
            .unwrap_or_else(|| "done".into()),
        _ => "done".into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let name = command_name(&cli.command);
    let start = Instant::now();
    let outcome = match cli.jobs {
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Failure::Usage(e.to_string())),
        },
        None => execute(&cli.command),
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(r) => {
            let out = if cli.json {
                json!({
                    "command": name,
                    "inputs_digest": digest(&r.sources),
                    "result": r.payload,
                    "version": env!("CARGO_PKG_VERSION"),
                })
            } else {
                r.payload
            };
            println!("{}", serde_json::to_string(&out).expect("report serialises"));
            eprintln!("rls {name}: {} ({elapsed:.1} ms)", summary(&out_payload(&out, cli.json)));
            ExitCode::from(r.exit)
        }
        Err(f) => {
            eprintln!("rls {name}: error: {f} ({elapsed:.1} ms)");
            ExitCode::from(match f {
                Failure::Usage(_) => EXIT_USAGE,
                Failure::Compute(_) => EXIT_COMPUTE,
            })
        }
    }
}

fn out_payload(out: &Value, wrapped: bool) -> Value {
    if wrapped {
        out["result"].clone()
    } else {
        out.clone()
    }
}
