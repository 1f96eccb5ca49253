use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use zerosum::abelian::{Group, GroupSpec};
use zerosum::labelling::{
    lower_bound_labelling, random_edge_labelling, random_labelling, ArcLabelling, EdgeLabelling, LabellingFile,
};
use zerosum::minors::{extract_divisible_cycle, random_minor_model, validate_minor_model, ModelFile, ModelShape};
use zerosum::oracle::{find_zero_sum_cycle_exhaustive, WitnessFile};
use zerosum::ramsey::{
    compute_n_a, parse_model, sat_export, sat_import_verify, solve_cnf, SatOptions, SatOutcome, SearchOptions,
    DEFAULT_NODE_BUDGET,
};
use zerosum::solver::{solve_general_with, solve_prime, solve_undirected, Method, ReportFile, SolveOptions};
use zerosum::Error;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_BUG: u8 = 70;

#[derive(Parser)]
#[command(name = "zerosum", version, about = "Zero-sum cycles in group-labelled complete digraphs")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a labelling file is zero-sum-free. Exits 1 when it is.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        min_len: u8,
        #[arg(long)]
        json: bool,
    },
    /// Find a zero-sum cycle. Exits 1 when the labelling is zero-sum-free.
    Solve {
        /// Arc labelling file, or an edge labelling file (cycles of length >= 3).
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMethod::Constructive)]
        method: SolveMethod,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        min_len: u8,
        #[arg(long)]
        json: bool,
        /// Write the full report (witness, trace, switchings) here.
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Compute n(A) by exhaustive search.
    Na {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        /// Worker threads; 0 picks the machine default.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
        /// Search only labellings whose column into vertex 0 is non-decreasing.
        #[arg(long)]
        symmetry_breaking: bool,
        #[arg(long)]
        json: bool,
        /// Write search statistics (with wall time) as JSON here.
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Emit the zero-sum-free labelling of K_q over Z_q.
    Lowerbound {
        #[arg(long)]
        q: u32,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Write a DIMACS CNF that is satisfiable iff K_n has a zero-sum-free labelling.
    SatExport {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        symmetry_breaking: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Decode and verify a SAT model, or solve the instance with the built-in solver.
    SatVerify {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long)]
        n: usize,
        /// Model with DIMACS `v` lines. Without it the built-in DPLL is run.
        model: Option<PathBuf>,
        #[arg(long)]
        symmetry_breaking: bool,
        #[arg(long, default_value_t = 1 << 32)]
        max_conflicts: u64,
        /// Write the decoded labelling here.
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Expand a zero-sum cycle of the auxiliary labelling into a host cycle of
    /// length divisible by q.
    MinorExtract {
        file: PathBuf,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        json: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Generate a seeded fixture.
    Random {
        #[arg(long, value_enum, default_value_t = Fixture::Arcs)]
        kind: Fixture,
        #[arg(long)]
        group: Option<GroupSpec>,
        /// Vertices, or index pairs for a minor model.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Largest supernode of a minor model; 1 gives singletons.
        #[arg(long, default_value_t = 1)]
        max_size: usize,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Constructive,
    Exhaustive,
    Prime,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Arcs,
    Edges,
    Minor,
}

/// Failure of a subcommand, carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GroupSyntax { .. } | Error::SpecMismatch(_) | Error::InvalidInput(_) => EXIT_INPUT,
            Error::ZeroSumFree(_) => EXIT_NEGATIVE,
            Error::Budget(_) | Error::Inconclusive(_) => EXIT_BUDGET,
            Error::Internal(_) => EXIT_BUG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn input_error(message: String) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input_error(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Internal(e.to_string()).into())
}

fn load_arcs(path: &Path) -> Result<ArcLabelling, Failure> {
    Ok(ArcLabelling::from_json(&read(path)?)?)
}

fn check(file: &Path, min_len: usize, json: bool) -> Outcome {
    let w = load_arcs(file)?;
    let witness = find_zero_sum_cycle_exhaustive(&w, min_len)?;
    if json {
        let witness = witness.as_ref().map(|c| WitnessFile::cycle(&w, c)).transpose()?;
        print!("{}", to_json(&json!({ "zero_sum_free": witness.is_none(), "witness": witness }))?);
    } else {
        match &witness {
            Some(c) => println!("zero-sum cycle {:?}", c.vertices()),
            None => println!("zero-sum-free"),
        }
    }
    Ok(if witness.is_some() { 0 } else { EXIT_NEGATIVE })
}

fn solve(file: &Path, method: SolveMethod, min_len: usize, json: bool, out: Option<&Path>) -> Outcome {
    let text = read(file)?;
    let (w, report) = match ArcLabelling::from_json(&text) {
        Ok(w) => {
            let report = match method {
                SolveMethod::Constructive => solve_general_with(
                    &w,
                    SolveOptions {
                        min_len,
                        ..SolveOptions::default()
                    },
                )?,
                SolveMethod::Prime if min_len == 2 => solve_prime(&w)?,
                SolveMethod::Prime => return Err(input_error("the prime method finds cycles of any length; drop --min-len".into())),
                SolveMethod::Exhaustive => {
                    let c = find_zero_sum_cycle_exhaustive(&w, min_len)?
                        .ok_or_else(|| Error::ZeroSumFree(format!("no zero-sum cycle of length >= {min_len}")))?;
                    let witness = WitnessFile::cycle(&w, &c)?;
                    let report = ReportFile {
                        method: Method::ExhaustiveFallback,
                        witness,
                        trace: Vec::new(),
                        switchings: Vec::new(),
                    };
                    return emit_report(&report, json, out);
                }
            };
            (w, report)
        }
        Err(arc_error) => match EdgeLabelling::from_json(&text) {
            Ok(e) => {
                if !matches!(method, SolveMethod::Constructive) {
                    return Err(input_error("edge labellings are solved constructively".into()));
                }
                (e.lift(), solve_undirected(&e)?)
            }
            Err(_) => return Err(arc_error.into()),
        },
    };
    emit_report(&report.to_file(&w)?, json, out)
}

fn emit_report(report: &ReportFile, json: bool, out: Option<&Path>) -> Outcome {
    let text = to_json(report)?;
    if let Some(p) = out {
        write_or_print(Some(p), &text)?;
    }
    if json {
        print!("{text}");
    } else {
        println!(
            "zero-sum cycle {:?} ({}, {} descents)",
            report.witness.vertices,
            report.method.as_str(),
            report.trace.len()
        );
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn na(
    group: &GroupSpec,
    max_n: usize,
    threads: usize,
    node_budget: u64,
    symmetry_breaking: bool,
    json: bool,
    out: Option<&Path>,
) -> Outcome {
    let opts = SearchOptions {
        threads,
        node_budget,
        symmetry_breaking,
    };
    let r = compute_n_a(group, max_n, &opts)?;
    let per_n: Vec<_> = r
        .per_n
        .iter()
        .map(|(n, exists, s)| json!({ "n": n, "zero_sum_free_exists": exists, "stats": s }))
        .collect();
    let doc = json!({
        "group": group.to_string(),
        "n_a": r.n_a,
        "witness": LabellingFile::from_labelling(&r.witness)?,
        "stats": r.stats,
        "per_n": per_n,
    });
    if let Some(p) = out {
        let mut stats = doc.clone();
        stats["wall_time_s"] = json!(r.wall_time.as_secs_f64());
        write_or_print(Some(p), &to_json(&stats)?)?;
    }
    if json {
        print!("{}", to_json(&doc)?);
    } else {
        println!("n({group}) = {}", r.n_a);
        println!(
            "nodes={} prune_digon={} prune_cycle={} prune_symmetry={} time={:.3}s",
            r.stats.nodes,
            r.stats.prune_digon,
            r.stats.prune_cycle,
            r.stats.prune_symmetry,
            r.wall_time.as_secs_f64()
        );
    }
    Ok(0)
}

fn sat_verify(
    group: &GroupSpec,
    n: usize,
    model: Option<&Path>,
    symmetry_breaking: bool,
    max_conflicts: u64,
    out: Option<&Path>,
) -> Outcome {
    let lits = match model {
        Some(path) => parse_model(&read(path)?)?,
        None => {
            let inst = sat_export(group, n, SatOptions { symmetry_breaking })?;
            match solve_cnf(inst.num_vars, &inst.clauses, max_conflicts)? {
                SatOutcome::Sat(lits) => lits,
                SatOutcome::Unsat => {
                    println!("unsatisfiable: every labelling of K_{n} over {group} has a zero-sum cycle");
                    return Ok(EXIT_NEGATIVE);
                }
            }
        }
    };
    let w = sat_import_verify(&lits, group, n)?;
    println!("verified zero-sum-free labelling of K_{n} over {group}");
    if let Some(p) = out {
        write_or_print(Some(p), &(w.to_json()? + "\n"))?;
    }
    Ok(0)
}

fn minor_extract(file: &Path, q: u32, json: bool, out: Option<&Path>) -> Outcome {
    let (g, model) = ModelFile::from_json(&read(file)?)?.parse()?;
    for v in validate_minor_model(&g, &model).iter().filter(|v| v.is_advisory()) {
        log::warn!("{v}");
    }
    let ex = extract_divisible_cycle(&g, &model, q)?;
    let text = to_json(&ex.host_cycle)?;
    if let Some(p) = out {
        write_or_print(Some(p), &text)?;
    }
    if json {
        print!("{text}");
    } else {
        println!(
            "cycle of length {} = {} x {q}: {:?}",
            ex.host_cycle.length,
            ex.host_cycle.length / q as usize,
            ex.host_cycle.cycle
        );
    }
    Ok(0)
}

fn random(
    kind: Fixture,
    group: Option<&GroupSpec>,
    n: usize,
    seed: u64,
    max_size: usize,
    out: Option<&Path>,
) -> Outcome {
    let need_group = || {
        group
            .ok_or_else(|| input_error("--group is required for labelling fixtures".into()))
            .and_then(|s| Group::from_spec(s).map_err(Failure::from))
    };
    let text = match kind {
        Fixture::Arcs => random_labelling(&need_group()?, n, seed)?.to_json()?,
        Fixture::Edges => random_edge_labelling(&need_group()?, n, seed)?.to_json()?,
        Fixture::Minor => {
            let shape = if max_size <= 1 {
                ModelShape::Singletons
            } else {
                ModelShape::Trees { max_size }
            };
            let (g, model) = random_minor_model(n, shape, seed)?;
            ModelFile::new(&g, &model).to_json()?
        }
    };
    write_or_print(out, &(text + "\n"))?;
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check { file, min_len, json } => check(&file, min_len.into(), json),
        Command::Solve {
            file,
            method,
            min_len,
            json,
            o,
        } => solve(&file, method, min_len.into(), json, o.as_deref()),
        Command::Na {
            group,
            max_n,
            threads,
            node_budget,
            symmetry_breaking,
            json,
            o,
        } => na(&group, max_n, threads, node_budget, symmetry_breaking, json, o.as_deref()),
        Command::Lowerbound { q, o } => {
            let text = lower_bound_labelling(q)?.to_json()?;
            write_or_print(o.as_deref(), &(text + "\n"))?;
            Ok(0)
        }
        Command::SatExport {
            group,
            n,
            symmetry_breaking,
            o,
        } => {
            let inst = sat_export(&group, n, SatOptions { symmetry_breaking })?;
            write_or_print(o.as_deref(), &inst.to_dimacs())?;
            if o.is_some() {
                println!("{} variables, {} clauses, {} cycles", inst.num_vars, inst.clauses.len(), inst.cycles);
            }
            Ok(0)
        }
        Command::SatVerify {
            group,
            n,
            model,
            symmetry_breaking,
            max_conflicts,
            o,
        } => sat_verify(&group, n, model.as_deref(), symmetry_breaking, max_conflicts, o.as_deref()),
        Command::MinorExtract { file, q, json, o } => minor_extract(&file, q, json, o.as_deref()),
        Command::Random {
            kind,
            group,
            n,
            seed,
            max_size,
            o,
        } => random(kind, group.as_ref(), n, seed, max_size, o.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
