use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use hwmt_core::arith::{format_rational, parse_rational, Prime};
use hwmt_core::census::{self, ReportFormat};
use hwmt_core::family::FamilyTag;
use hwmt_core::hasse_witt::{self, HwError};
use hwmt_core::hypergeometric::{clausen_compare, truncated_pfq, Argument, HypergeometricData, HypergeometricError};
use hwmt_core::lattice_polytope::{
    double_kernel_pair, is_kernel_pair, mirror_kernel_witness, parse_polytopes, LatticePoint, LatticePolytope,
};
use hwmt_core::pencil::build_vertex_pencil;
use hwmt_core::picard_fuchs::analyze_family;
use hwmt_core::point_count::{congruence_check, count_family, CountError};

/// Hasse–Witt invariants, point counts and hypergeometric data of toric
/// vertex pencils.
#[derive(Parser)]
#[command(name = "hwmt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polytope queries.
    #[command(subcommand)]
    Polytope(PolytopeCommand),
    /// Kernel and mirror kernel pair tests.
    #[command(subcommand)]
    Pair(PairCommand),
    /// Vertex pencils.
    #[command(subcommand)]
    Pencil(PencilCommand),
    /// Hasse–Witt invariants of a vertex pencil.
    Hw(HwArgs),
    /// Brute-force point counts of a family member.
    Count(GridArgs),
    /// Truncated hypergeometric series mod p.
    Hyp(HypArgs),
    /// Picard–Fuchs analysis.
    #[command(subcommand)]
    Pf(PfCommand),
    /// Kernel types and mirror kernel pairs of a polytope file.
    Census(CensusArgs),
    /// Congruence checks; exit status 1 if any check fails.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum PolytopeCommand {
    /// Vertices of the polar dual.
    Dual(PolytopeArgs),
    /// Whether the polytope is reflexive.
    Reflexive(PolytopeArgs),
    /// Integer kernel of the vertex matrix.
    Kernel(PolytopeArgs),
}

#[derive(Subcommand)]
enum PairCommand {
    /// Kernel pair, double kernel pair and mirror kernel pair tests; exit 1
    /// unless the pair is a mirror kernel pair.
    Check(PairArgs),
}

#[derive(Subcommand)]
enum PencilCommand {
    Build(SourceArgs),
}

#[derive(Subcommand)]
enum PfCommand {
    Analyze {
        #[arg(long)]
        family: FamilyTag,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Equal Hasse–Witt values for the two polytopes of a pair.
    KeyLemma {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        grid: Grid,
    },
    /// Hasse–Witt value against the binomial period sum and the family's pFq.
    Truncation(GridArgs),
    /// Point count against 1 +- truncated pFq.
    Congruence(GridArgs),
    /// Truncated 2F1 squared against truncated 3F2.
    Clausen(GridArgs),
}

#[derive(Args)]
struct PolytopeArgs {
    /// Vertices as "x1,y1,z1;x2,y2,z2;..."
    #[arg(long, allow_hyphen_values = true, conflicts_with = "id", required_unless_present = "id")]
    vertices: Option<String>,
    /// Id of a record in --input (default: the bundled 3D fixtures).
    #[arg(long)]
    id: Option<u32>,
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long, conflicts_with_all = ["vertices", "id"])]
    family: Option<FamilyTag>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "id")]
    vertices: Option<String>,
    #[arg(long)]
    id: Option<u32>,
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    /// Two record ids, "a,b".
    #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
    pair: Vec<u32>,
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct Grid {
    /// Comma-separated rationals r/s.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_q, required = true)]
    psi: Vec<BigRational>,
    #[arg(long, alias = "prime", value_delimiter = ',', value_parser = parse_prime, required = true)]
    primes: Vec<Prime>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    family: FamilyTag,
    #[command(flatten)]
    grid: Grid,
}

#[derive(Args)]
struct HwArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    grid: Grid,
    /// Also print the Hasse–Witt polynomial in psi for each prime.
    #[arg(long)]
    polynomial: bool,
}

#[derive(Args)]
struct HypArgs {
    /// Parameters "a1,a2,...;b1,..." (the n! is implicit).
    #[arg(long)]
    params: String,
    /// Argument "c,e" meaning c*psi^e.
    #[arg(long, allow_hyphen_values = true)]
    arg: String,
    #[command(flatten)]
    grid: Grid,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    report: String,
}

fn parse_q(s: &str) -> Result<BigRational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational r/s"))
}

fn parse_prime(s: &str) -> Result<Prime, String> {
    let n: u64 = s.trim().parse().map_err(|_| format!("`{s}` is not an integer"))?;
    Prime::new(n).map_err(|e| e.to_string())
}

type CliResult<T> = Result<T, String>;

fn fixture_dir() -> PathBuf {
    std::env::var_os("HWMT_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"))
}

fn read_polytopes(path: &Path) -> CliResult<Vec<LatticePolytope>> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_polytopes(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn lookup(id: u32, input: Option<&Path>) -> CliResult<LatticePolytope> {
    let files = match input {
        Some(p) => vec![p.to_path_buf()],
        None => vec![fixture_dir().join("tables3d.txt"), fixture_dir().join("reflexive3d.txt")],
    };
    for f in &files {
        if let Some(p) = read_polytopes(f)?.into_iter().find(|p| p.id() == Some(id)) {
            return Ok(p);
        }
    }
    Err(format!("no polytope with id {id}"))
}

fn parse_vertices(s: &str) -> CliResult<LatticePolytope> {
    let rows = s
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad coordinate `{x}`")))
                .collect::<CliResult<Vec<i64>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    let dim = rows.first().map_or(0, Vec::len);
    LatticePolytope::new(dim, rows.into_iter().map(LatticePoint).collect()).map_err(|e| e.to_string())
}

fn polytope(vertices: Option<&str>, id: Option<u32>, input: Option<&Path>) -> CliResult<LatticePolytope> {
    match (vertices, id) {
        (Some(v), _) => parse_vertices(v),
        (None, Some(id)) => lookup(id, input),
        (None, None) => Err("give --vertices or --id".into()),
    }
}

fn points(p: &LatticePolytope) -> Value {
    json!(p.vertices().iter().map(|v| v.coords().to_vec()).collect::<Vec<_>>())
}

fn q(x: &BigRational) -> String {
    format_rational(x)
}

fn emit(v: &Value) {
    println!("{v}");
}

/// Prints the closing status line of a verification and returns whether all passed.
fn finish(total: usize, failed: usize, skipped: usize) -> bool {
    let status = if failed == 0 { "ok" } else { "fail" };
    emit(&json!({"status": status, "checked": total, "failed": failed, "skipped": skipped}));
    failed == 0
}

fn skipped(psi: &BigRational, p: Prime, reason: &str) -> Value {
    json!({"psi": q(psi), "p": p.get(), "skipped": reason})
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Polytope(cmd) => {
            let (args, what) = match &cmd {
                PolytopeCommand::Dual(a) => (a, 0),
                PolytopeCommand::Reflexive(a) => (a, 1),
                PolytopeCommand::Kernel(a) => (a, 2),
            };
            let p = polytope(args.vertices.as_deref(), args.id, args.input.as_deref())?;
            let out = match what {
                0 => {
                    let d = p.polar_dual().map_err(|e| e.to_string())?;
                    json!({"vertices": points(&d)})
                }
                1 => json!({"reflexive": p.is_reflexive().map_err(|e| e.to_string())?}),
                _ => {
                    let k = p.vertex_kernel();
                    json!({"rank": k.rank(), "basis": k.basis})
                }
            };
            emit(&out);
            Ok(true)
        }
        Command::Pair(PairCommand::Check(args)) => {
            let (a, b) = pair_of(&args)?;
            let kernel = is_kernel_pair(&a, &b, None).is_some();
            let double = double_kernel_pair(&a, &b).map_err(|e| e.to_string())?.is_some();
            let witness = mirror_kernel_witness(&a, &b).map_err(|e| e.to_string())?;
            let mirror = witness.is_some();
            let mut out = json!({"pair": args.pair, "kernel_pair": kernel, "double_kernel_pair": double, "mirror_kernel_pair": mirror});
            if let Some(w) = witness {
                out["vertex_map"] = json!(w.isomorphism.vertex_map);
                out["facet_map"] = json!(w.isomorphism.facet_map);
            }
            emit(&out);
            Ok(mirror)
        }
        Command::Pencil(PencilCommand::Build(src)) => {
            let (label, delta) = source(&src)?;
            let pencil = build_vertex_pencil(&delta).map_err(|e| e.to_string())?;
            emit(&json!({"source": label, "pencil": pencil.to_string(), "terms": pencil.terms}));
            Ok(true)
        }
        Command::Hw(args) => {
            let (label, delta) = source(&args.source)?;
            let pencil = build_vertex_pencil(&delta).map_err(|e| e.to_string())?;
            for &p in &args.grid.primes {
                if args.polynomial {
                    let poly = hasse_witt::hasse_witt_polynomial(&pencil, p).map_err(|e| e.to_string())?;
                    emit(&json!({"source": label, "p": p.get(), "polynomial": poly}));
                }
                for psi in &args.grid.psi {
                    let report = match args.source.family {
                        Some(f) => hasse_witt::family_truncation_check(f, psi, p),
                        None => hasse_witt::truncation_relation_check(&delta, None, psi, p),
                    };
                    match report {
                        Ok(r) => emit(&json!({"family": label, "psi": q(psi), "p": p.get(), "hw": r.hw, "match": r.holds})),
                        Err(HwError::SingularMember(_)) => emit(&skipped(psi, p, "singular member")),
                        Err(e) => return Err(e.to_string()),
                    }
                }
            }
            Ok(true)
        }
        Command::Count(args) => {
            for &p in &args.grid.primes {
                for psi in &args.grid.psi {
                    let count = count_family(args.family, psi, p).map_err(|e| e.to_string())?;
                    let ok = match congruence_check(args.family, psi, p) {
                        Ok(r) => json!(r.holds),
                        Err(CountError::SingularMember(_)) => Value::Null,
                        Err(e) => return Err(e.to_string()),
                    };
                    emit(&json!({"family": args.family.name(), "model": count.model, "psi": q(psi), "p": p.get(), "count": count.count, "congruence_ok": ok}));
                }
            }
            Ok(true)
        }
        Command::Hyp(args) => {
            let arg = Argument::parse(&args.arg).map_err(|e| e.to_string())?;
            let data = HypergeometricData::parse(&args.params, arg).map_err(|e| e.to_string())?;
            for &p in &args.grid.primes {
                for psi in &args.grid.psi {
                    let t = truncated_pfq(&data, psi, p).map_err(|e| e.to_string())?;
                    emit(&json!({"function": data.to_string(), "psi": q(psi), "p": p.get(), "value": t.value, "terms_used": t.terms_used}));
                }
            }
            Ok(true)
        }
        Command::Pf(PfCommand::Analyze { family, json }) => {
            let r = analyze_family(family).map_err(|e| e.to_string())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r).expect("json"));
            } else {
                println!("family: {}", family.name());
                println!("companion: {}", r.companion);
                println!("sheared: {}", r.sheared);
                println!("substituted (z = psi^{}): {}", r.substitution.0, r.substituted);
                println!("rescaled (z = {} lambda): {}", q(&r.substitution.1), r.rescaled);
                println!("residue at 0: {}", matrix(&r.residue_at_zero));
                println!("residue at infinity: {}", matrix(&r.residue_at_infinity));
                println!("exponents at 0: {}", list(&r.exponents.at_zero));
                println!("exponents at infinity: {}", list(&r.exponents.at_infinity));
                println!("extracted: {}", r.extracted);
                println!("result: {}", r.result);
            }
            Ok(r.matches_family)
        }
        Command::Census(args) => {
            let format: ReportFormat = args.report.parse().map_err(|e: census::CensusError| e.to_string())?;
            let path = args.input.unwrap_or_else(|| fixture_dir().join("tables3d.txt"));
            let records = census::load_polytopes(&path).map_err(|e| e.to_string())?;
            let result = census::run_census(&records).map_err(|e| e.to_string())?;
            print!("{}", census::report(&result, format));
            Ok(true)
        }
        Command::Verify(cmd) => verify(cmd),
    }
}

fn matrix(m: &[Vec<BigRational>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| format!("[{}]", list(r))).collect();
    format!("[{}]", rows.join(", "))
}

fn list(v: &[BigRational]) -> String {
    v.iter().map(q).collect::<Vec<_>>().join(", ")
}

fn pair_of(args: &PairArgs) -> CliResult<(LatticePolytope, LatticePolytope)> {
    let [a, b] = args.pair[..] else {
        return Err("--pair takes two ids a,b".into());
    };
    Ok((lookup(a, args.input.as_deref())?, lookup(b, args.input.as_deref())?))
}

fn source(src: &SourceArgs) -> CliResult<(String, LatticePolytope)> {
    match src.family {
        Some(f) => Ok((f.name().to_string(), f.representative())),
        None => {
            let p = polytope(src.vertices.as_deref(), src.id, src.input.as_deref())?;
            let label = p.id().map_or_else(|| "polytope".to_string(), |id| format!("polytope {id}"));
            Ok((label, p))
        }
    }
}

fn verify(cmd: VerifyCommand) -> CliResult<bool> {
    let (mut total, mut failed, mut skip) = (0, 0, 0);
    let mut record = |row: Value, ok: Option<bool>| {
        match ok {
            Some(true) => total += 1,
            Some(false) => {
                total += 1;
                failed += 1;
            }
            None => skip += 1,
        }
        emit(&row);
    };
    match cmd {
        VerifyCommand::KeyLemma { pair, grid } => {
            let (a, b) = pair_of(&pair)?;
            for &p in &grid.primes {
                for psi in &grid.psi {
                    match hasse_witt::key_lemma_check(&a, &b, psi, p) {
                        Ok(r) => record(
                            json!({"pair": pair.pair, "psi": q(psi), "p": p.get(), "hw": [r.delta.value, r.gamma.value], "match": r.equal}),
                            Some(r.equal),
                        ),
                        Err(HwError::SingularMember(_)) => record(skipped(psi, p, "singular member"), None),
                        Err(e) => return Err(e.to_string()),
                    }
                }
            }
        }
        VerifyCommand::Truncation(args) => {
            for &p in &args.grid.primes {
                for psi in &args.grid.psi {
                    match hasse_witt::family_truncation_check(args.family, psi, p) {
                        Ok(r) => record(
                            json!({"family": args.family.name(), "psi": q(psi), "p": p.get(), "hw": r.hw, "binomial_sum": r.binomial_sum, "hypergeometric": r.hypergeometric, "match": r.holds}),
                            Some(r.holds),
                        ),
                        Err(HwError::SingularMember(_)) => record(skipped(psi, p, "singular member"), None),
                        Err(HwError::Hypergeometric(HypergeometricError::PsiNotInvertible(_))) => {
                            record(skipped(psi, p, "psi not invertible mod p"), None)
                        }
                        Err(e) => return Err(e.to_string()),
                    }
                }
            }
        }
        VerifyCommand::Congruence(args) => {
            for &p in &args.grid.primes {
                for psi in &args.grid.psi {
                    match congruence_check(args.family, psi, p) {
                        Ok(r) => {
                            let ok = r.holds;
                            record(json!(r), Some(ok));
                        }
                        Err(CountError::SingularMember(_)) => record(skipped(psi, p, "singular member"), None),
                        Err(CountError::Hypergeometric(HypergeometricError::PsiNotInvertible(_))) => {
                            record(skipped(psi, p, "psi not invertible mod p"), None)
                        }
                        Err(e) => return Err(e.to_string()),
                    }
                }
            }
        }
        VerifyCommand::Clausen(args) => {
            let pair = args
                .family
                .clausen_pair()
                .ok_or_else(|| format!("family {} has no Clausen factorisation", args.family))?;
            for &p in &args.grid.primes {
                for psi in &args.grid.psi {
                    match clausen_compare(&pair, psi, p) {
                        Ok(r) => record(
                            json!({"family": args.family.name(), "psi": q(psi), "p": p.get(), "f21": r.f21, "f21_squared": r.f21_squared, "f32": r.f32, "match": r.holds}),
                            Some(r.holds),
                        ),
                        Err(HypergeometricError::PsiNotInvertible(_)) => record(skipped(psi, p, "psi not invertible mod p"), None),
                        Err(e) => return Err(e.to_string()),
                    }
                }
            }
        }
    }
    Ok(finish(total, failed, skip))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hwmt: {e}");
            ExitCode::from(2)
        }
    }
}
