//! Command-line front end.
//!
//! Exit codes: 0 on success or a verified property, 2 when a check is verified false
//! (the report carries the counterexample), 1 on usage, input or domain errors.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arbor::{self, ArbComoulds};
use crate::catalog;
use crate::error::{Error, Result};
use crate::localobj::field::RawTerm;
use crate::localobj::jet::{degree, monomials};
use crate::localobj::normal::{monomial_weight, nonlinear_support, tram_iteration};
use crate::localobj::{self, OracleMode, PreparedDiffeo, PreparedField, VectorField};
use crate::mould::{Alphabet, Mould};
use crate::scalar::{fmt_scalar, int, is_zero, parse_scalar, random_nonzero, rat, Scalar, Weights};
use crate::symmetry::{self, il, CheckMode, SymmetryKind};
use crate::words::{Letter, Word};

#[derive(Parser, Debug)]
#[command(name = "moulcalc", version, about = "Exact mould calculus: moulds, symmetries, normal forms, arborification")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report format; `mould show` and `mould op` default to text, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate, check and combine moulds.
    #[command(subcommand)]
    Mould(MouldCmd),
    /// Normal forms of prepared vector fields.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Linearization of prepared diffeomorphisms.
    #[command(subcommand)]
    Diffeo(DiffeoCmd),
    /// Arborification.
    #[command(subcommand)]
    Arb(ArbCmd),
}

#[derive(Args, Debug, Clone)]
pub struct AlphabetArgs {
    /// Comma-separated letters, e.g. "1,2,3" or "[1,0],[0,1]".
    #[arg(long)]
    pub alphabet: Option<String>,
    /// Spectrum, comma-separated rationals (default all 1).
    #[arg(long)]
    pub lambda: Option<String>,
    /// Multipliers, comma-separated rationals (default all 2).
    #[arg(long)]
    pub q: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum MouldCmd {
    /// Value on a word, or the table up to a length.
    Show {
        /// Catalog name or `@path` to a mould JSON file.
        #[arg(long)]
        name: String,
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        /// Dump the table up to `--max-len` as mould JSON.
        #[arg(long)]
        export: bool,
        #[command(flatten)]
        alphabet: AlphabetArgs,
    },
    /// Verify a symmetry.
    Check {
        #[arg(long)]
        name: String,
        #[arg(long)]
        symmetry: String,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// `sampled` (generic random weights) or `fixed` (all pairs over the alphabet).
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, default_value_t = symmetry::DEFAULT_SAMPLES)]
        samples: usize,
        #[command(flatten)]
        alphabet: AlphabetArgs,
    },
    /// Apply an operation and tabulate the result.
    Op {
        /// add, sub, mul, bracket, compose (binary); inverse, comp-inverse, exp, log, nabla, retro, neg (unary).
        #[arg(long)]
        op: String,
        #[arg(long)]
        name: String,
        #[arg(long)]
        with: Option<String>,
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[command(flatten)]
        alphabet: AlphabetArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum FieldCmd {
    /// Mould-built linearizing change of variables.
    Linearize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        degree: u32,
        /// Compare with the order-by-order oracle.
        #[arg(long)]
        verify_oracle: bool,
    },
    /// Prenormal form `X_lin + sum Tram^w D_w`.
    Prenormal {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        degree: u32,
        /// Compare with the jet iteration and the Dulac-mode oracle.
        #[arg(long)]
        verify_oracle: bool,
    },
    /// Resonant words over the field alphabet.
    Scan {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum DiffeoCmd {
    /// `Ne_inv`-built linearization of `f = q x + ...`.
    Linearize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[arg(long)]
        verify_oracle: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum ArbCmd {
    /// Arborescent sequences of a word, their proj counts and the expansion check.
    Expand {
        #[arg(long)]
        word: String,
        /// Field whose parts are used; random derivations otherwise.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        degree: u32,
    },
}

/// A finished report: JSON payload, text rendering and exit code.
struct Report {
    json: Value,
    text: String,
    code: i32,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, code: 0 }
    }

    fn verdict(json: Value, text: String, verified: bool) -> Self {
        Report { json, text, code: if verified { 0 } else { 2 } }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 1 } else { 0 };
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => return Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let default = match cli.command {
        Command::Mould(MouldCmd::Show { .. } | MouldCmd::Op { .. }) => Format::Text,
        _ => Format::Json,
    };
    let body = match cli.format.unwrap_or(default) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.json).expect("serializable")),
        Format::Text => report.text,
    };
    match &cli.output {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Outcome { code: report.code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: writing {}: {e}\n", path.display()) },
        },
        None => Outcome { code: report.code, stdout: body, stderr: String::new() },
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Mould(cmd) => mould_cmd(cmd, cli.seed),
        Command::Field(cmd) => field_cmd(cmd),
        Command::Diffeo(cmd) => diffeo_cmd(cmd),
        Command::Arb(ArbCmd::Expand { word, input, degree }) => arb_expand(word, input.as_ref(), *degree, cli.seed),
    }
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn scalar_list(s: &str) -> Result<Vec<Scalar>> {
    s.split(',').map(parse_scalar).collect()
}

/// Alphabet from the flags; without `--alphabet`, the letters of `words` or `1,2,3`.
fn build_alphabet(args: &AlphabetArgs, words: &[&Word]) -> Result<Alphabet> {
    let letters: Vec<Letter> = match &args.alphabet {
        Some(s) => s.parse::<Word>()?.0,
        None => {
            let mut seen: Vec<Letter> = Vec::new();
            for a in words.iter().flat_map(|w| w.letters()) {
                if !seen.contains(a) {
                    seen.push(a.clone());
                }
            }
            if seen.is_empty() {
                Word::ints(&[1, 2, 3]).0
            } else {
                seen
            }
        }
    };
    let dim = letters.iter().filter_map(|a| a.degree().map(<[i64]>::len)).max().unwrap_or(1);
    let spectrum = match &args.lambda {
        Some(s) => scalar_list(s)?,
        None => vec![int(1); dim],
    };
    let multipliers = match &args.q {
        Some(s) => scalar_list(s)?,
        None => vec![int(2); dim],
    };
    Ok(Alphabet::new(letters, Weights::new(spectrum, multipliers)))
}

/// Catalog name, or `@path` to a tabulated mould.
fn load_mould(source: &str, alphabet: Alphabet, bound: usize) -> Result<Mould> {
    match source.strip_prefix('@') {
        Some(path) => Mould::from_json(path, &read_json(&PathBuf::from(path))?),
        None => catalog::make(source, alphabet, bound),
    }
}

fn table_report(m: &Mould, word: Option<&Word>, max_len: usize) -> Result<Report> {
    if let Some(w) = word {
        let v = fmt_scalar(&m.eval(w)?);
        return Ok(Report::ok(json!({"mould": m.name(), "word": w.to_string(), "value": v}), format!("{v}\n")));
    }
    let json = m.to_json(max_len)?;
    let mut text = String::new();
    for (w, v) in m.tabulate(max_len)? {
        text.push_str(&format!("({w}) {}\n", fmt_scalar(&v)));
    }
    Ok(Report::ok(json!({"mould": m.name(), "table": json}), text))
}

fn mould_cmd(cmd: &MouldCmd, seed: u64) -> Result<Report> {
    match cmd {
        MouldCmd::Show { name, word, max_len, export, alphabet } => {
            let word: Option<Word> = word.as_deref().map(str::parse).transpose()?;
            let bound = word.as_ref().map_or(*max_len, Word::len).max(*max_len);
            let alpha = build_alphabet(alphabet, &word.iter().collect::<Vec<_>>())?;
            let m = load_mould(name, alpha, bound)?;
            if *export {
                let table = m.to_json(*max_len)?;
                let text = format!("{}\n", serde_json::to_string_pretty(&table).expect("serializable"));
                return Ok(Report::ok(table, text));
            }
            table_report(&m, word.as_ref(), *max_len)
        }
        MouldCmd::Check { name, symmetry: kind, max_len, mode, samples, alphabet } => {
            let kind = SymmetryKind::parse(kind)?;
            let explicit = alphabet.alphabet.is_some() || name.starts_with('@');
            let fixed = match mode.as_deref() {
                Some("fixed") => true,
                Some("sampled") => false,
                Some(other) => return Err(Error::Parse(format!("unknown mode {other:?}"))),
                None => explicit,
            };
            let alpha = if explicit { build_alphabet(alphabet, &[])? } else { Alphabet::default() };
            let m = load_mould(name, alpha, *max_len)?;
            let report = match kind {
                SymmetryKind::Alternil | SymmetryKind::Symetril => il::check_il(&m, kind, *max_len, seed, *samples)?,
                _ => {
                    let mode = if fixed { CheckMode::Fixed } else { CheckMode::Sampled { seed, samples: *samples } };
                    symmetry::check(&m, kind, *max_len, &mode)?
                }
            };
            let mut text = format!(
                "{} {} up to length {}: {} ({} pairs)\n",
                m.name(),
                kind.name(),
                max_len,
                if report.verdict { "verified" } else { "FALSE" },
                report.pairs_checked
            );
            if let Some(c) = &report.counterexample {
                text.push_str(&format!("counterexample: ({}) x ({}) residual {}\n", c.left, c.right, fmt_scalar(&c.residual)));
                if let Some(s) = &c.sample {
                    text.push_str(&format!("at {s}\n"));
                }
            }
            let json = json!({"mould": m.name(), "report": report.to_json()});
            Ok(Report::verdict(json, text, report.verdict))
        }
        MouldCmd::Op { op, name, with, word, max_len, alphabet } => {
            let word: Option<Word> = word.as_deref().map(str::parse).transpose()?;
            let bound = word.as_ref().map_or(*max_len, Word::len).max(*max_len);
            let alpha = build_alphabet(alphabet, &word.iter().collect::<Vec<_>>())?;
            let a = load_mould(name, alpha.clone(), bound)?;
            let b = with.as_deref().map(|s| load_mould(s, alpha, bound)).transpose()?;
            let need = || b.clone().ok_or(Error::Precondition("binary operation needs --with"));
            let m = match op.as_str() {
                "add" => a.add(&need()?)?,
                "sub" => a.sub(&need()?)?,
                "mul" => a.mul(&need()?)?,
                "bracket" => a.bracket(&need()?)?,
                "compose" => a.compose(&need()?)?,
                "inverse" => a.mul_inverse()?,
                "comp-inverse" => a.comp_inverse()?,
                "exp" => a.exp()?,
                "log" => a.log()?,
                "nabla" => a.nabla()?,
                "retro" => a.retro(),
                "neg" => a.neg(),
                other => return Err(Error::Parse(format!("unknown operation {other:?}"))),
            };
            let label = match &with {
                Some(b) => format!("{op}({name}, {b})"),
                None => format!("{op}({name})"),
            };
            table_report(&m.renamed(&label), word.as_ref(), *max_len)
        }
    }
}

fn jets_text(label: &str, jets: &[localobj::Jet]) -> String {
    let mut s = String::new();
    for (i, j) in jets.iter().enumerate() {
        let terms: Vec<String> = j.terms().iter().map(|(m, c)| format!("{} x^{:?}", fmt_scalar(c), m)).collect();
        s.push_str(&format!("{label}[{i}] = {}\n", if terms.is_empty() { "0".into() } else { terms.join(" + ") }));
    }
    s
}

fn field_cmd(cmd: &FieldCmd) -> Result<Report> {
    match cmd {
        FieldCmd::Linearize { input, degree, verify_oracle } => {
            let x = PreparedField::from_json(&read_json(input)?)?;
            let resonant = localobj::resonance_scan(&x, *degree as usize)?;
            let lin = localobj::linearize(&x, *degree)?;
            let mut json = lin.to_json();
            json["resonant_words"] = json!(resonant.iter().map(|w| w.to_string()).collect::<Vec<_>>());
            let mut text = jets_text("h", &lin.normalizer) + &jets_text("Y", &lin.conjugated);
            let mut ok = true;
            if *verify_oracle {
                let oracle = localobj::oracle_normalize(&x, *degree, OracleMode::Linearize)?;
                ok = oracle == lin;
                json["oracle_agrees"] = json!(ok);
                text.push_str(&format!("oracle agrees: {ok}\n"));
            }
            Ok(Report::verdict(json, text, ok))
        }
        FieldCmd::Prenormal { input, degree, verify_oracle } => {
            let x = PreparedField::from_json(&read_json(input)?)?;
            let tram = localobj::prenormal_tram(&x, *degree)?;
            let nonresonant: Vec<(usize, Vec<u32>)> =
                nonlinear_support(&tram).into_iter().filter(|(i, m)| !is_zero(&monomial_weight(&x.lambda, *i, m))).collect();
            let mut ok = nonresonant.is_empty();
            let mut json = json!({
                "field": tram.to_json(),
                "nonlinear_monomials": nonlinear_support(&tram).len(),
                "only_resonant": ok,
            });
            let mut text = jets_text("X", &tram.comps);
            text.push_str(&format!("only resonant monomials: {ok}\n"));
            if *verify_oracle {
                let iterated = tram_iteration(&x, *degree)?;
                let dulac = localobj::oracle_normalize(&x, *degree, OracleMode::Dulac)?;
                let same_iter = iterated == tram;
                let same_dulac = dulac.conjugated == tram.comps;
                json["iteration_agrees"] = json!(same_iter);
                json["dulac_agrees"] = json!(same_dulac);
                text.push_str(&format!("iteration agrees: {same_iter}\ndulac oracle agrees: {same_dulac}\n"));
                ok = ok && same_iter && same_dulac;
            }
            Ok(Report::verdict(json, text, ok))
        }
        FieldCmd::Scan { input, max_len } => {
            let x = PreparedField::from_json(&read_json(input)?)?;
            let words = localobj::resonance_scan(&x, *max_len)?;
            let list: Vec<String> = words.iter().map(|w| w.to_string()).collect();
            let text = list.iter().map(|w| format!("({w})\n")).collect::<String>();
            Ok(Report::ok(json!({"alphabet": x.parts.keys().map(|a| a.to_string()).collect::<Vec<_>>(), "resonant_words": list}), text))
        }
    }
}

fn diffeo_cmd(cmd: &DiffeoCmd) -> Result<Report> {
    let DiffeoCmd::Linearize { input, degree, verify_oracle } = cmd;
    let f = PreparedDiffeo::from_json(&read_json(input)?, *degree)?;
    let lin = localobj::diffeo_linearize(&f)?;
    let mut json = lin.to_json();
    let mut text = jets_text("h", &lin.normalizer) + &jets_text("F", &lin.conjugated);
    let mut ok = true;
    if *verify_oracle {
        let oracle = localobj::diffeo_oracle(&f)?;
        let assembled = f.assembled() == f.substitution();
        ok = oracle == lin.normalizer && assembled;
        json["oracle_agrees"] = json!(oracle == lin.normalizer);
        json["parts_reproduce_map"] = json!(assembled);
        text.push_str(&format!("oracle agrees: {}\nparts reproduce the map: {assembled}\n", oracle == lin.normalizer));
    }
    Ok(Report::verdict(json, text, ok))
}

/// Random homogeneous derivation `D_n` with `D_n(x^m)` a multiple of `x^{m+n}`.
fn random_part(n: &Letter, rng: &mut ChaCha8Rng) -> Result<VectorField> {
    let deg = n.degree().ok_or(Error::NoSemigroup)?;
    if !n.is_admissible() {
        return Err(Error::InadmissibleDegree(deg.to_vec()));
    }
    let nu = deg.len();
    let mut terms = Vec::new();
    for i in 0..nu {
        let m: Vec<i64> = (0..nu).map(|k| deg[k] + i64::from(k == i)).collect();
        if m.iter().all(|&e| e >= 0) {
            let coef = rat(random_nonzero(rng, 6), rng.gen_range(1..=3));
            terms.push(RawTerm { coef, exponents: m.iter().map(|&e| e as u32).collect(), direction: i });
        }
    }
    let x = PreparedField::decompose(nu, vec![Scalar::one(); nu], &terms)?;
    x.parts.get(n).cloned().ok_or_else(|| Error::InadmissibleDegree(deg.to_vec()))
}

fn arb_expand(word: &str, input: Option<&PathBuf>, order: u32, seed: u64) -> Result<Report> {
    let w: Word = word.parse()?;
    let (nu, parts): (usize, BTreeMap<Letter, VectorField>) = match input {
        Some(path) => {
            let x = PreparedField::from_json(&read_json(path)?)?;
            (x.nu, x.parts)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut parts = BTreeMap::new();
            for a in w.letters() {
                if !parts.contains_key(a) {
                    parts.insert(a.clone(), random_part(a, &mut rng)?);
                }
            }
            let nu = w.letters().iter().filter_map(|a| a.degree().map(<[i64]>::len)).max().unwrap_or(1);
            (nu, parts)
        }
    };
    let classes = arbor::arb_classes(&w, arbor::DEFAULT_CAP)?;
    let residual = arbor::check_arb_identity(&w, &parts, nu, order)?;
    let mut arb = ArbComoulds::new(&parts, nu, order);
    let mut forests = Vec::new();
    let mut text = format!("B_({w}) =\n");
    for (a, p) in &classes {
        let order_of_op = a.forest().len();
        let zero = arb.operator(a)?.is_zero();
        forests.push(json!({"shape": a.to_string(), "proj": p, "differential_order": order_of_op, "vanishes_at_degree": zero}));
        text.push_str(&format!("  {p} * B[{a}]  (order {order_of_op})\n"));
    }
    let ok = residual.is_zero();
    text.push_str(&format!("residual at degree {order}: {}\n", if ok { "zero" } else { "NONZERO" }));
    let monomial_count = monomials(nu, order).iter().filter(|m| degree(m) >= 1).count();
    let json = json!({
        "word": w.to_string(),
        "degree": order,
        "forests": forests,
        "residual_zero": ok,
        "monomials_checked": monomial_count,
    });
    Ok(Report::verdict(json, text, ok))
}
