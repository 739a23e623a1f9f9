use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::Rational64;
use serde_json::{json, Value};

use qchar_core::cartan::{build_cartan, AffineType, CartanData};
use qchar_core::qchar::{
    char_product, char_trunc_geq, char_trunc_leq, load_table, save_table, CharacterTable, Provenance,
};
use qchar_core::sl2engine::{extract_qchar, realize_simple};
use qchar_core::sl2theory::{
    check_alternate, check_duality, check_lzero, check_useqt2, check_zeta, chi_simple_sl2, factor_into_strings,
    tensor_simple_sl2, verify_factg, window, CheckReport,
};
use qchar_core::ylattice::{
    a_monomial, bar_monomial, decompose_over_a, dual_highest_monomial, trunc_parts, APosition, Monomial,
    SpectralPoint,
};
use qchar_core::{Error, Result};

#[derive(Parser)]
#[command(name = "qchar", version, about = "Exact q-character computations for quantum affine algebras")]
struct Cli {
    #[command(flatten)]
    opts: Opts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Affine type, e.g. A1^1, A2^2, D4^3
    #[arg(long = "type", global = true, default_value = "A1^1")]
    affine_type: String,
    #[arg(long, global = true)]
    ell: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    level: Option<i64>,
    /// Report errors as JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Write the result to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    /// Monomial literal: Y[i,kappa,lambda]^e factors joined by * or ;
    #[arg(long, global = true, allow_hyphen_values = true)]
    monomial: Option<String>,
    /// Semicolon-separated monomials, factors joined by *
    #[arg(long, global = true, allow_hyphen_values = true)]
    monomials: Option<String>,
    #[arg(long, global = true, default_value_t = 2)]
    maxk: u32,
    #[arg(long, global = true, default_value_t = 3)]
    tuples: usize,
    #[arg(long, global = true, default_value_t = 64)]
    samples: usize,
    #[arg(long, global = true)]
    node: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    kappa: i64,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// sl2-hat computations
    Sl2 {
        #[command(subcommand)]
        op: Sl2Op,
    },
    /// The monomial A_{i,a} (--node, --kappa, --lambda)
    Amonomial,
    /// Split a monomial at --level into its <=, = and >= parts
    Trunc,
    /// Decompose the first of --monomials below the second over the A-monomials
    Decompose,
    /// Highest monomial of the dual
    Dual,
    /// Bar involution on C_ell (--ell)
    Bar,
    /// Exhaustive checks over a window of sl2 monomials
    Verify {
        #[command(subcommand)]
        what: VerifyOp,
    },
    /// Character tables
    Table {
        #[command(subcommand)]
        op: TableOp,
    },
}

#[derive(Subcommand)]
enum Sl2Op {
    /// Character of L(m)
    Char,
    /// Character of L(m_1) ⊗ ... ⊗ L(m_N)
    TensorChar,
    /// Whether L(m_1) ⊗ ... ⊗ L(m_N) is simple
    Simple,
    /// Kirillov-Reshetikhin strings of m
    Factor,
    /// Matrices of L(m)
    Realize,
}

#[derive(Subcommand)]
enum VerifyOp {
    Factg,
    Useqt2,
    Alternate,
    Duality,
    Zeta,
    Lzero,
}

#[derive(Subcommand)]
enum TableOp {
    /// Load and validate a table (--table)
    Load,
    /// Write the sl2 simple characters of the window to --out
    Save,
}

struct Output {
    value: Value,
    ok: bool,
}

fn ok(value: Value) -> Result<Output> {
    Ok(Output { value, ok: true })
}

fn cartan(o: &Opts) -> Result<CartanData> {
    let t: AffineType = o.affine_type.parse()?;
    build_cartan(t)
}

fn require_sl2(cd: &CartanData) -> Result<()> {
    if cd.affine_type == AffineType::sl2() {
        Ok(())
    } else {
        Err(Error::NotSl2(format!("type {}", cd.affine_type)))
    }
}

fn one_monomial(o: &Opts, cd: &CartanData) -> Result<Monomial> {
    let s = o.monomial.as_deref().ok_or_else(|| Error::Parse("--monomial is required".into()))?;
    let m: Monomial = s.parse()?;
    m.check_in(cd)?;
    Ok(m)
}

fn monomial_list(o: &Opts, cd: &CartanData) -> Result<Vec<Monomial>> {
    let s = o.monomials.as_deref().ok_or_else(|| Error::Parse("--monomials is required".into()))?;
    let ms = s
        .split(';')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.parse::<Monomial>())
        .collect::<Result<Vec<_>>>()?;
    for m in &ms {
        m.check_in(cd)?;
    }
    Ok(ms)
}

fn need(v: Option<i64>, flag: &str) -> Result<i64> {
    v.ok_or_else(|| Error::Parse(format!("--{flag} is required")))
}

fn check_value(r: &CheckReport) -> Result<Output> {
    Ok(Output { value: serde_json::to_value(r)?, ok: r.passed() })
}

fn run(cli: &Cli) -> Result<Output> {
    let o = &cli.opts;
    let cd = cartan(o)?;
    match &cli.command {
        Command::Sl2 { op } => {
            require_sl2(&cd)?;
            match op {
                Sl2Op::Char => ok(serde_json::to_value(chi_simple_sl2(&one_monomial(o, &cd)?)?)?),
                Sl2Op::TensorChar => {
                    let ms = monomial_list(o, &cd)?;
                    let chars = ms.iter().map(chi_simple_sl2).collect::<Result<Vec<_>>>()?;
                    ok(serde_json::to_value(char_product(&chars))?)
                }
                Sl2Op::Simple => ok(json!({ "simple": tensor_simple_sl2(&monomial_list(o, &cd)?)? })),
                Sl2Op::Factor => ok(json!({ "strings": factor_into_strings(&one_monomial(o, &cd)?)? })),
                Sl2Op::Realize => {
                    let m = one_monomial(o, &cd)?;
                    let r = realize_simple(&m)?;
                    ok(json!({
                        "monomial": m,
                        "dim": r.dim,
                        "factors": r.factors,
                        "weights": r.weights,
                        "character": extract_qchar(&r)?,
                        "matrices": r.dump(),
                    }))
                }
            }
        }
        Command::Amonomial => {
            let node = o.node.ok_or_else(|| Error::Parse("--node is required".into()))?;
            let lambda = o.lambda.as_deref().ok_or_else(|| Error::Parse("--lambda is required".into()))?;
            let lambda: Rational64 = lambda.parse().map_err(|_| Error::Parse(format!("invalid lambda '{lambda}'")))?;
            let pos = APosition::new(node, SpectralPoint::new(&cd, o.kappa, lambda));
            let a = a_monomial(&cd, pos)?;
            ok(json!({ "position": pos.to_string(), "monomial": a, "literal": a.to_string() }))
        }
        Command::Trunc => {
            let m = one_monomial(o, &cd)?;
            let cut = need(o.level, "level")?;
            let (le, eq, ge) = trunc_parts(&cd, &m, cut)?;
            let mut out = json!({ "leq": le, "eq": eq, "geq": ge });
            if cd.affine_type == AffineType::sl2() {
                let c = chi_simple_sl2(&m)?;
                out["char_leq"] = serde_json::to_value(char_trunc_leq(&cd, &c, cut)?)?;
                out["char_geq"] = serde_json::to_value(char_trunc_geq(&cd, &c, cut)?)?;
            }
            ok(out)
        }
        Command::Decompose => {
            let ms = monomial_list(o, &cd)?;
            let [m, mref] = ms.as_slice() else {
                return Err(Error::Parse("--monomials needs exactly two monomials: m;mref".into()));
            };
            let s = decompose_over_a(&cd, m, mref);
            ok(json!({
                "leq": s.is_some(),
                "positions": s.map(|v| v.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
            }))
        }
        Command::Dual => {
            let d = dual_highest_monomial(&cd, &one_monomial(o, &cd)?)?;
            ok(json!({ "dual": d, "literal": d.to_string() }))
        }
        Command::Bar => {
            let b = bar_monomial(&cd, &one_monomial(o, &cd)?, need(o.ell, "ell")?)?;
            ok(json!({ "bar": b, "literal": b.to_string() }))
        }
        Command::Verify { what } => {
            require_sl2(&cd)?;
            let ell = o.ell.unwrap_or(4);
            match what {
                VerifyOp::Factg => {
                    let r = verify_factg(ell, o.maxk, o.tuples, o.seed, o.samples)?;
                    Ok(Output { ok: r.passed(0), value: serde_json::to_value(r)? })
                }
                VerifyOp::Useqt2 => check_value(&check_useqt2(ell, o.maxk)?),
                VerifyOp::Alternate => check_value(&check_alternate(ell, o.maxk)?),
                VerifyOp::Duality => check_value(&check_duality(ell, o.maxk)?),
                VerifyOp::Zeta => {
                    let ells: Vec<i64> = match o.ell {
                        Some(e) => vec![e],
                        None => vec![2, 3, 4],
                    };
                    let (zeta, literal) = check_zeta(&ells, o.maxk)?;
                    Ok(Output { ok: zeta.passed(), value: json!({ "zeta": zeta, "literal_bar": literal }) })
                }
                VerifyOp::Lzero => check_value(&check_lzero(o.maxk, o.tuples)?),
            }
        }
        Command::Table { op } => match op {
            TableOp::Load => {
                let path = o.table.as_ref().ok_or_else(|| Error::Parse("--table is required".into()))?;
                let t = load_table(&cd, path)?;
                ok(json!({ "entries": t.len(), "keys": t.entries.keys().collect::<Vec<_>>() }))
            }
            TableOp::Save => {
                require_sl2(&cd)?;
                let path = o.out.as_ref().or(o.table.as_ref()).ok_or_else(|| Error::Parse("--out is required".into()))?;
                let mut t = CharacterTable::new();
                for m in window(o.ell.unwrap_or(4), o.maxk) {
                    t.insert(chi_simple_sl2(&m)?, Provenance::ComputedSl2);
                }
                save_table(&t, path)?;
                // the table itself is the output file
                ok(json!({ "entries": t.len(), "path": path }))
            }
        },
    }
}

fn emit(o: &Opts, value: &Value, to_file: bool) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match (&o.out, to_file) {
        (Some(p), true) => std::fs::write(p, text)?,
        _ => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let writes_table = matches!(cli.command, Command::Table { op: TableOp::Save });
    match run(&cli).and_then(|out| emit(&cli.opts, &out.value, !writes_table).map(|_| out.ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            if cli.opts.json {
                println!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(1)
        }
    }
}

