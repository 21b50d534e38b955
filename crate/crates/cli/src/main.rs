//! `polytrain`: batch front end for the law suites and experiments.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.
//! Every command writes CSV reports plus a `*.meta.json` sidecar into `--out`.
//! Wall-clock times go to `timing.csv` so the other files replay byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use polytrain::bernoulli::{closure_experiment, BernoulliLab};
use polytrain::gen;
use polytrain::laws::{self, LawConfig, StarRule};
use polytrain::mellin::{operator_norm, transform, NormExponent, NORM_TOL};
use polytrain::train::{dcoset_of, mult_reps};
use polytrain::{format_q, parse_q, Partition, Polymorphism};

#[derive(Parser)]
#[command(name = "polytrain", version, about = "Exact polymorphism law suites and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized law batteries for the semiring, the category and the transform.
    Laws(LawsArgs),
    /// Functor checks on the train of the infinite symmetric group.
    Train(TrainArgs),
    /// Compress a polymorphism along a refining chain of partitions.
    Closure(ClosureArgs),
    /// Transform entries and operator norms of a polymorphism over a grid.
    Mellin(MellinArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Comma-separated `r:s` points; `r` must lie in [0, 1].
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value = "polytrain-out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum StarChoice {
    Standard,
    /// Deliberately wrong mass factor, for mutation testing.
    InvertedMass,
}

#[derive(Args)]
struct LawsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    /// Largest number of atoms in a generated space.
    #[arg(long, default_value_t = 6)]
    support: usize,
    #[arg(long, value_enum, default_value_t = StarChoice::Standard)]
    star_rule: StarChoice,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 1)]
    alpha: u32,
    /// Middle index; `B1,B2` gives the right index of the first factor and the
    /// left index of the second, which must agree.
    #[arg(long, default_value = "1")]
    beta: String,
    #[arg(long, default_value_t = 1)]
    gamma: u32,
    /// Random permutations move points in `1..=support`.
    #[arg(long, default_value_t = 4)]
    support: u32,
    #[arg(long, default_value = "1/2")]
    p: String,
}

#[derive(Args)]
struct ClosureArgs {
    #[command(flatten)]
    common: Common,
    /// Polymorphism JSON with equal source and destination.
    #[arg(long = "in")]
    input: PathBuf,
    /// JSON array of partitions, coarsest first.
    #[arg(long)]
    chain: PathBuf,
}

#[derive(Args)]
struct MellinArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "in")]
    input: PathBuf,
}

enum Failure {
    Usage(String),
    Property(String),
}

impl From<polytrain::Error> for Failure {
    fn from(e: polytrain::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Laws(a) => cmd_laws(a),
        Command::Train(a) => cmd_train(a),
        Command::Closure(a) => cmd_closure(a),
        Command::Mellin(a) => cmd_mellin(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property(msg)) => {
            eprintln!("property failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_grid(text: Option<&str>) -> Result<Vec<(f64, f64)>, Failure> {
    let Some(text) = text else {
        return Ok(laws::default_grid());
    };
    text.split(',')
        .map(|point| {
            let (r, s) = point
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("grid point {point:?} is not r:s")))?;
            let r: f64 = r.trim().parse().map_err(|_| Failure::Usage(format!("bad r in {point:?}")))?;
            let s: f64 = s.trim().parse().map_err(|_| Failure::Usage(format!("bad s in {point:?}")))?;
            if !(0.0..=1.0).contains(&r) || !s.is_finite() {
                return Err(Failure::Usage(format!("grid point {point:?}: r must lie in [0, 1]")));
            }
            Ok((r, s))
        })
        .collect()
}

fn check_common(c: &Common) -> Result<Vec<(f64, f64)>, Failure> {
    if !(c.tol > 0.0) {
        return Err(Failure::Usage("tolerance must be positive".into()));
    }
    parse_grid(c.grid.as_deref())
}

fn grid_json(grid: &[(f64, f64)]) -> Value {
    Value::Array(grid.iter().map(|(r, s)| json!([r, s])).collect())
}

fn write(dir: &Path, name: &str, body: String) -> Outcome {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), body)?;
    Ok(())
}

fn write_meta(dir: &Path, name: &str, meta: Value) -> Outcome {
    write(dir, name, serde_json::to_string_pretty(&meta).expect("json") + "\n")
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

fn cmd_laws(a: LawsArgs) -> Outcome {
    let grid = check_common(&a.common)?;
    let (star, rule): (StarRule, &str) = match a.star_rule {
        StarChoice::Standard => (laws::standard_star, "standard"),
        StarChoice::InvertedMass => (laws::inverted_mass_star, "inverted-mass"),
    };
    let cfg = LawConfig {
        seed: a.common.seed,
        cases: a.cases,
        tol: a.common.tol,
        grid: grid.clone(),
        max_atoms: a.support.max(1),
        star,
    };
    let mut outcomes = Vec::new();
    let mut timing = Vec::new();
    if a.cases > 0 {
        for &(name, law) in laws::LAWS {
            let start = Instant::now();
            outcomes.push(laws::run_law(name, law, &cfg));
            timing.push(format!("{name},{:.6}", start.elapsed().as_secs_f64()));
        }
    }
    let out = &a.common.out;
    write(
        out,
        "laws.csv",
        csv(
            "law,cases,failures,max_defect",
            outcomes
                .iter()
                .map(|o| format!("{},{},{},{:e}", o.law, o.cases, o.failures, o.max_defect)),
        ),
    )?;
    write(out, "timing.csv", csv("law,seconds", timing))?;
    let failed: Vec<&laws::LawOutcome> = outcomes.iter().filter(|o| !o.passed()).collect();
    let dump: Vec<Value> = failed
        .iter()
        .map(|o| {
            let witness = o.counterexample.as_deref().unwrap_or("null");
            json!({ "law": o.law, "counterexample": serde_json::from_str::<Value>(witness).unwrap_or(Value::Null) })
        })
        .collect();
    write_meta(
        out,
        "laws.meta.json",
        json!({
            "command": "laws",
            "seed": a.common.seed,
            "cases": a.cases,
            "tol": a.common.tol,
            "support": a.support,
            "star_rule": rule,
            "grid": grid_json(&grid),
            "passed": failed.is_empty(),
            "failures": dump,
        }),
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        let names: Vec<&str> = failed.iter().map(|o| o.law).collect();
        Err(Failure::Property(format!("laws failed: {}", names.join(", "))))
    }
}

fn parse_beta(text: &str) -> Result<u32, Failure> {
    let parts: Vec<u32> = text
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Failure::Usage(format!("bad --beta {text:?}"))))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [b] => Ok(*b),
        [b1, b2] if b1 == b2 => Ok(*b1),
        [b1, b2] => Err(Failure::Usage(format!(
            "inner indices differ: first factor ends at {b1}, second starts at {b2}"
        ))),
        _ => Err(Failure::Usage(format!("bad --beta {text:?}"))),
    }
}

fn cmd_train(a: TrainArgs) -> Outcome {
    check_common(&a.common)?;
    let beta = parse_beta(&a.beta)?;
    let p = parse_q(&a.p)?;
    let lab = BernoulliLab::new(p.clone())?;
    let (alpha, gamma, seed, support) = (a.alpha, a.gamma, a.common.seed, a.support);
    let start = Instant::now();
    let rows: Vec<Result<(String, bool), String>> = (0..a.cases as u64)
        .into_par_iter()
        .map(|case| {
            let mut rng = gen::case_rng(seed, "train", case);
            let g = gen::fin_perm(&mut rng, support);
            let h = gen::fin_perm(&mut rng, support);
            let prod = mult_reps(&g, &h, alpha, beta, gamma).map_err(|e| e.to_string())?;
            let thm = lab.theorem1_check(&g, &h, alpha, beta, gamma).map_err(|e| e.to_string())?;
            let mc = lab.multiplicativity_check(&g, &h, alpha, beta, gamma).map_err(|e| e.to_string())?;
            let ok = thm.holds && num_is_zero(&mc.defect);
            Ok((
                format!(
                    "{case},{g},{h},{},{},{},{},{}",
                    dcoset_of(&g, alpha, beta),
                    dcoset_of(&h, beta, gamma),
                    prod.n,
                    prod.coset,
                    format!("{},{}", thm.holds, format_q(&mc.defect))
                ),
                ok,
            ))
        })
        .collect();
    let elapsed = start.elapsed();
    let mut lines = Vec::with_capacity(rows.len());
    let mut failures = 0usize;
    for row in rows {
        let (line, ok) = row.map_err(Failure::Property)?;
        failures += usize::from(!ok);
        lines.push(line);
    }
    let out = &a.common.out;
    write(
        out,
        "train.csv",
        csv("case,g,h,g_coset,h_coset,n,product,theorem1,multiplicativity_defect", lines),
    )?;
    write(out, "timing.csv", csv("command,seconds", [format!("train,{:.6}", elapsed.as_secs_f64())]))?;
    write_meta(
        out,
        "train.meta.json",
        json!({
            "command": "train",
            "seed": seed,
            "cases": a.cases,
            "alpha": alpha,
            "beta": beta,
            "gamma": gamma,
            "support": support,
            "p": format_q(&p),
            "failures": failures,
            "passed": failures == 0,
        }),
    )?;
    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::Property(format!("{failures} train cases failed")))
    }
}

fn num_is_zero(q: &polytrain::Q) -> bool {
    q == &polytrain::Q::from_integer(0.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_chain(path: &Path) -> Result<Vec<Partition>, Failure> {
    let raw: Vec<Value> =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    raw.iter().map(|v| Ok(Partition::from_json(&v.to_string())?)).collect()
}

fn cmd_closure(a: ClosureArgs) -> Outcome {
    let grid = check_common(&a.common)?;
    let r = Polymorphism::from_json(&read(&a.input)?)?;
    if !r.is_valid() {
        return Err(Failure::Usage("input polymorphism violates its marginal conditions".into()));
    }
    let chain = read_chain(&a.chain)?;
    let n = r.src().len();
    let mut rng = gen::case_rng(a.common.seed, "closure", 0);
    let phi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let psi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let start = Instant::now();
    let rep = closure_experiment(&r, &chain, &phi, &psi, &grid)?;
    let elapsed = start.elapsed();
    let out = &a.common.out;
    write(
        out,
        "closure.csv",
        csv("k,blocks,distance", rep.distances.iter().enumerate().map(|(k, d)| format!("{k},{},{d:e}", chain[k].len()))),
    )?;
    write(
        out,
        "closure_bilinear.csv",
        csv(
            "k,r,s,defect",
            rep.bilinear_defects.iter().map(|(k, r, s, d)| format!("{k},{r},{s},{d:e}")),
        ),
    )?;
    write(out, "timing.csv", csv("command,seconds", [format!("closure,{:.6}", elapsed.as_secs_f64())]))?;
    let monotone = rep.distances.windows(2).all(|w| w[1] <= w[0]);
    let ends_at_singletons = chain.last().is_some_and(|p| p.len() == n);
    let final_zero = rep.distances.last().is_some_and(|d| *d == 0.0);
    write_meta(
        out,
        "closure.meta.json",
        json!({
            "command": "closure",
            "seed": a.common.seed,
            "grid": grid_json(&grid),
            "phi": phi,
            "psi": psi,
            "nonincreasing": monotone,
            "identity_defect": rep.identity_defect,
            "ends_at_singletons": ends_at_singletons,
        }),
    )?;
    if rep.identity_defect > a.common.tol.max(1e-12) {
        return Err(Failure::Property(format!("bilinear identity defect {:e}", rep.identity_defect)));
    }
    if ends_at_singletons && !final_zero {
        return Err(Failure::Property("singleton-terminated chain does not end at distance 0".into()));
    }
    Ok(())
}

fn cmd_mellin(a: MellinArgs) -> Outcome {
    let grid = check_common(&a.common)?;
    let p = Polymorphism::from_json(&read(&a.input)?)?;
    let start = Instant::now();
    let mut entries = Vec::new();
    let mut norms = Vec::new();
    let mut worst: f64 = 0.0;
    for &(r, s) in &grid {
        let mat = transform(&p, r, s)?;
        entries.extend(mat.csv_lines());
        match NormExponent::for_r(r) {
            Ok(e) => {
                let norm = operator_norm(&mat, e);
                worst = worst.max(norm);
                norms.push(format!("{r},{s},{},{norm:.17e}", exponent_name(e)));
            }
            Err(_) => norms.push(format!("{r},{s},,")),
        }
    }
    let elapsed = start.elapsed();
    let out = &a.common.out;
    write(out, "mellin.csv", csv("r,s,x,y,re,im", entries))?;
    write(out, "norms.csv", csv("r,s,exponent,norm", norms))?;
    write(out, "timing.csv", csv("command,seconds", [format!("mellin,{:.6}", elapsed.as_secs_f64())]))?;
    let bounded = worst <= 1.0 + NORM_TOL;
    write_meta(
        out,
        "mellin.meta.json",
        json!({
            "command": "mellin",
            "grid": grid_json(&grid),
            "valid": p.is_valid(),
            "max_norm": worst,
            "norm_bound_holds": bounded,
        }),
    )?;
    if p.is_valid() && !bounded {
        return Err(Failure::Property(format!("operator norm {worst} exceeds 1")));
    }
    Ok(())
}

fn exponent_name(e: NormExponent) -> &'static str {
    match e {
        NormExponent::One => "1",
        NormExponent::Two => "2",
        NormExponent::Infinity => "inf",
    }
}
