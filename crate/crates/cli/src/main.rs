use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use cmlab::algcore::d_vector;
use cmlab::exactfield::FieldSpec;
use cmlab::parcount::{
    b_estimate, findim_par, par_estimate, semicont_experiment, truncated_polynomial,
    EstimateOptions, FamilyMember, FiniteDimSpec, LatticeSetting, OverringSelector,
    ParameterEstimate, ENUMERATION_BUDGET,
};
use cmlab::singlab::{
    build_singularity, build_standard, classify_type, derive_overring, normalized_valuation_type,
    tameness_report, valuation_type, OverringKind, SingularitySpec, StandardKind,
};
use cmlab::{CmError, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

mod models;

#[derive(Parser, Serialize, Debug)]
#[command(
    name = "cmlab",
    version,
    about = "Exact computations for one-dimensional Cohen-Macaulay algebras"
)]
struct Cli {
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Leave the timestamp out of the provenance block.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Cap on candidate subspaces examined per enumeration.
    #[arg(long, global = true, default_value_t = ENUMERATION_BUDGET, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    budget: usize,
    /// Skip codimensions over budget instead of failing.
    #[arg(long, global = true)]
    skip_over_budget: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case", tag = "name")]
enum Command {
    /// Conductor, delta, valuation type, class and overrings with d-vectors.
    Analyze(SpecArg),
    /// Recognize T(p,q) and P(p,q) valuation types.
    Classify(SpecArg),
    /// Tameness criterion on the overring d-vectors.
    Tame(SpecArg),
    /// Parameter count par(n, d) for one overring.
    Par(ParArgs),
    /// b(n) over a list of overrings.
    B(BArgs),
    /// Semicontinuity check across a one-parameter family.
    Semicont(SemicontArgs),
    /// Parameter count for a finite-dimensional algebra.
    FindimPar(FindimArgs),
    /// Orbit partition of the points of B at one prime.
    Orbits(OrbitArgs),
    /// Density and flag refinement for a semisimple model.
    Dense(FileArg),
    /// Column normalization of a dense submodule.
    Normalize(FileArg),
    /// Emit the standard T(p,q) spec.
    BuildTpq(BuildArgs),
    /// Emit a member of the degeneration family.
    BuildFamily(FamilyArgs),
}

#[derive(Args, Serialize, Debug)]
struct SpecArg {
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args, Serialize, Debug)]
struct FileArg {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Serialize, Debug)]
struct CountArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Comma-separated distinct primes.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    primes: Vec<u32>,
    /// Codimensions; all of them when omitted.
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
}

#[derive(Args, Serialize, Debug)]
struct ParArgs {
    #[arg(long)]
    spec: PathBuf,
    #[command(flatten)]
    count: CountArgs,
    /// lambda, lambda0, prime, double_prime, prime_e:I+J or a spec file.
    #[arg(long, default_value = "lambda0")]
    overring: String,
}

#[derive(Args, Serialize, Debug)]
struct BArgs {
    #[arg(long)]
    spec: PathBuf,
    #[command(flatten)]
    count: CountArgs,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "lambda0,prime,double_prime"
    )]
    overrings: Vec<String>,
}

#[derive(Args, Serialize, Debug)]
struct SemicontArgs {
    /// JSON list of {parameter, spec}; parameter 0 marks the special member.
    #[arg(long, conflicts_with_all = ["p", "q"])]
    family: Option<PathBuf>,
    #[arg(long, requires = "q")]
    p: Option<usize>,
    #[arg(long, requires = "p")]
    q: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    lambdas: Vec<u32>,
    #[arg(long = "char", default_value_t = 5)]
    characteristic: u32,
    #[command(flatten)]
    count: CountArgs,
    #[arg(long, value_delimiter = ',', default_value = "lambda0")]
    overrings: Vec<String>,
}

#[derive(Args, Serialize, Debug)]
struct FindimArgs {
    /// Structure-constant file; otherwise k[x_1..x_vars]/(x)^nilpotency.
    #[arg(long, conflicts_with_all = ["vars", "nilpotency"])]
    algebra: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    vars: usize,
    #[arg(long, default_value_t = 2)]
    nilpotency: usize,
    #[command(flatten)]
    count: CountArgs,
}

#[derive(Args, Serialize, Debug)]
struct OrbitArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    prime: u32,
    #[arg(long, default_value = "lambda0")]
    overring: String,
}

#[derive(Args, Serialize, Debug)]
struct BuildArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    q: usize,
    #[arg(long = "char", default_value_t = 5)]
    characteristic: u32,
    #[arg(long, default_value_t = 1)]
    degree: u32,
}

#[derive(Args, Serialize, Debug)]
struct FamilyArgs {
    #[command(flatten)]
    build: BuildArgs,
    #[arg(long)]
    lambda: u32,
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmError::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CmError::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<SingularitySpec> {
    let spec: SingularitySpec = read(path)?;
    spec.validate()?;
    Ok(spec)
}

fn selector(s: &str) -> Result<OverringSelector> {
    Ok(match s {
        "lambda" => OverringSelector::Lambda,
        "lambda0" => OverringSelector::Lambda0,
        "prime" => OverringSelector::Prime,
        "double_prime" => OverringSelector::DoublePrime,
        _ => {
            if let Some(list) = s.strip_prefix("prime_e:") {
                let branches = list
                    .split(['+', ' '])
                    .filter(|x| !x.is_empty())
                    .map(|x| {
                        x.parse()
                            .map_err(|_| CmError::InvalidInput(format!("bad branch index in {s}")))
                    })
                    .collect::<Result<_>>()?;
                OverringSelector::PrimeE { branches }
            } else {
                let path = Path::new(s);
                let name = path
                    .file_stem()
                    .map_or(s.to_string(), |x| x.to_string_lossy().into_owned());
                OverringSelector::Explicit {
                    name,
                    spec: load_spec(path)?,
                }
            }
        }
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

struct Outcome {
    result: Value,
    primes: Vec<u32>,
    exhaustive: Option<bool>,
    raw: bool,
}

impl Outcome {
    fn plain(result: Value) -> Self {
        Outcome {
            result,
            primes: Vec::new(),
            exhaustive: None,
            raw: false,
        }
    }

    fn estimate(result: Value, primes: &[u32], est: &[&ParameterEstimate]) -> Self {
        Outcome {
            result,
            primes: primes.to_vec(),
            exhaustive: Some(est.iter().all(|e| e.exhaustive)),
            raw: false,
        }
    }
}

fn analyze(spec: &SingularitySpec) -> Result<Value> {
    let base = build_singularity(spec)?;
    let vt = valuation_type(spec)?;
    let mut overrings = Vec::new();
    for (name, kind) in [
        ("lambda0", OverringKind::Lambda0),
        ("prime", OverringKind::Prime),
        ("double_prime", OverringKind::DoublePrime),
    ] {
        let g = derive_overring(&base, kind, None)?;
        overrings.push(json!({
            "name": name,
            "dim": g.dim(),
            "d_vector": d_vector(&g, &base.lambda)?,
        }));
    }
    Ok(json!({
        "field": spec.field,
        "branches": spec.branches,
        "truncation": spec.truncation,
        "conductor_exponent": base.conductor_exponent,
        "margin": base.margin,
        "dim_lambda": base.lambda.dim(),
        "delta": base.ambient.total_dim() - base.lambda.dim(),
        "valuation_type": vt.to_string(),
        "type": classify_type(&vt),
        "overrings": overrings,
    }))
}

fn classify(spec: &SingularitySpec) -> Result<Value> {
    let vt = valuation_type(spec)?;
    let nvt = normalized_valuation_type(spec)?;
    let class = classify_type(&vt);
    let nclass = classify_type(&nvt);
    Ok(json!({
        "valuation_type": vt.to_string(),
        "x": vt.x,
        "y": vt.y,
        "type": class,
        "normalized_valuation_type": nvt.to_string(),
        "normalized_type": nclass,
        "mismatch": class != nclass,
    }))
}

fn family(args: &SemicontArgs) -> Result<Vec<FamilyMember>> {
    if let Some(path) = &args.family {
        return read(path);
    }
    let (Some(p), Some(q)) = (args.p, args.q) else {
        return Err(CmError::InvalidInput(
            "semicont needs --family or --p and --q".into(),
        ));
    };
    let field = FieldSpec {
        characteristic: args.characteristic,
        degree: 1,
    };
    args.lambdas
        .iter()
        .map(|&lam| {
            Ok(FamilyMember {
                parameter: i64::from(lam),
                spec: build_standard(StandardKind::FamilyMember, p, q, Some(lam), field)?,
            })
        })
        .collect()
}

fn run(cli: &Cli) -> Result<Outcome> {
    let opts = EstimateOptions {
        budget: cli.budget,
        skip_over_budget: cli.skip_over_budget,
    };
    Ok(match &cli.command {
        Command::Analyze(a) => Outcome::plain(analyze(&load_spec(&a.spec)?)?),
        Command::Classify(a) => Outcome::plain(classify(&load_spec(&a.spec)?)?),
        Command::Tame(a) => {
            let base = build_singularity(&load_spec(&a.spec)?)?;
            let mut r = to_value(&tameness_report(&base)?);
            r["conductor_exponent"] = json!(base.conductor_exponent);
            Outcome::plain(r)
        }
        Command::Par(a) => {
            let spec = load_spec(&a.spec)?;
            let g = selector(&a.overring)?;
            let c = &a.count;
            let est = par_estimate(&spec, &g, c.n, c.d.as_deref(), &c.primes, opts)?;
            let mut r = to_value(&est);
            r["overring"] = json!(g.to_string());
            Outcome::estimate(r, &c.primes, &[&est])
        }
        Command::B(a) => {
            let spec = load_spec(&a.spec)?;
            let gs = a
                .overrings
                .iter()
                .map(|s| selector(s))
                .collect::<Result<Vec<_>>>()?;
            let c = &a.count;
            let rep = b_estimate(&spec, &gs, c.n, c.d.as_deref(), &c.primes, opts)?;
            let ests: Vec<&ParameterEstimate> = rep.breakdown.iter().map(|x| &x.1).collect();
            Outcome::estimate(to_value(&rep), &c.primes, &ests)
        }
        Command::Semicont(a) => {
            let fam = family(a)?;
            let gs = a
                .overrings
                .iter()
                .map(|s| selector(s))
                .collect::<Result<Vec<_>>>()?;
            let c = &a.count;
            let rep = semicont_experiment(&fam, &gs, c.n, c.d.as_deref(), &c.primes, opts)?;
            let ests: Vec<&ParameterEstimate> = rep
                .members
                .iter()
                .flat_map(|m| m.b.breakdown.iter().map(|x| &x.1))
                .collect();
            Outcome::estimate(to_value(&rep), &c.primes, &ests)
        }
        Command::FindimPar(a) => {
            let spec: FiniteDimSpec = match &a.algebra {
                Some(path) => read(path)?,
                None => truncated_polynomial(a.vars, a.nilpotency)?,
            };
            let c = &a.count;
            let est = findim_par(&spec, c.n, c.d.as_deref(), &c.primes, opts)?;
            let mut r = to_value(&est);
            r["algebra_dim"] = json!(spec.dim);
            Outcome::estimate(r, &c.primes, &[&est])
        }
        Command::Orbits(a) => {
            let spec = load_spec(&a.spec)?.reinstantiate(a.prime)?;
            let base = build_singularity(&spec)?;
            let g = selector(&a.overring)?.instantiate(&base)?;
            let setting = LatticeSetting::sandwiched(&base, &g, a.n)?;
            let points = setting.enumerate_b(a.d, cli.budget)?;
            let part = setting.orbit_partition(&points, cli.seed);
            let exhaustive = part.exhaustive;
            let r = json!({
                "prime": a.prime,
                "n": a.n,
                "d": a.d,
                "points": points.len(),
                "orbits": part.records.len(),
                "partition": part,
            });
            Outcome {
                result: r,
                primes: vec![a.prime],
                exhaustive: Some(exhaustive),
                raw: false,
            }
        }
        Command::Dense(a) => Outcome::plain(to_value(&models::run_dense(&read(&a.input)?)?)),
        Command::Normalize(a) => {
            Outcome::plain(to_value(&models::run_normalize(&read(&a.input)?)?))
        }
        Command::BuildTpq(a) => {
            let field = FieldSpec {
                characteristic: a.characteristic,
                degree: a.degree,
            };
            let spec = build_standard(StandardKind::Tpq, a.p, a.q, None, field)?;
            Outcome {
                raw: true,
                ..Outcome::plain(to_value(&spec))
            }
        }
        Command::BuildFamily(a) => {
            let b = &a.build;
            let field = FieldSpec {
                characteristic: b.characteristic,
                degree: b.degree,
            };
            let spec = build_standard(StandardKind::FamilyMember, b.p, b.q, Some(a.lambda), field)?;
            Outcome {
                raw: true,
                ..Outcome::plain(to_value(&spec))
            }
        }
    })
}

fn command_name(c: &Command) -> String {
    to_value(c)["name"].as_str().unwrap_or_default().to_string()
}

fn report(cli: &Cli, out: Outcome) -> Value {
    if out.raw {
        return out.result;
    }
    let mut prov = json!({
        "config": to_value(cli),
        "seed": cli.seed,
        "primes": out.primes,
        "exhaustive": out.exhaustive,
        "version": env!("CARGO_PKG_VERSION"),
    });
    if !cli.no_timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        prov["timestamp"] = json!(secs);
    }
    json!({
        "command": command_name(&cli.command),
        "result": out.result,
        "provenance": prov,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&report(&cli, out)).expect("json") + "\n";
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
