//! `mapaug`: solve, scan, oracle, verify, gen and ratio on instance files.
//!
//! Exit codes: 0 success, 2 invalid input or failed verification, 3 abort.

use clap::{Parser, Subcommand};
use mapaug_core::gen::{gen_g1, gen_planted, gen_random, gen_random_ws};
use mapaug_core::graph::{validate_instance, MapInstance};
use mapaug_core::io::{format_instance, format_solution, parse_instance, parse_solution};
use mapaug_core::obstructions::{scan_all, ObstructionKind};
use mapaug_core::oracle::{min_2edge_cover, opt_2ecss, OracleBudget};
use mapaug_core::pipeline::{ratio_report, solve_batch, verify, Family, SolveOptions, SolveReport};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mapaug", version, about = "Approximate minimum-cost 2-ECSS for MAP instances")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one or more instances (several inputs run in parallel).
    Solve {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Solution file; with several inputs, `.<index>` is appended.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Largest instance for which the exact opt is computed.
        #[arg(long, default_value_t = 16)]
        budget_nodes: usize,
        #[arg(long)]
        trace: bool,
        /// Machine-readable report (JSON array, one object per input).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List obstructions, optionally of one kind.
    Scan {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kind: Option<ObstructionKind>,
    },
    /// Exact opt and minimum 2-edge cover.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 16)]
        budget_nodes: usize,
    },
    /// Check a solution file against an instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Claimed cost; defaults to the `# cost` header of the solution file.
        #[arg(long)]
        cost: Option<u64>,
    },
    /// Write a generated instance.
    Gen {
        /// tight-s3, g1, g2, g3, random, random-ws or planted.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        param: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge density for `random`, zero-edge probability for `random-ws`.
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Table of cost(D2), opt and algorithm cost with exact ratios.
    Ratio {
        #[arg(long)]
        family: Family,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        param: Vec<usize>,
        #[arg(long, default_value_t = 16)]
        budget_nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failure with its exit code.
struct Fail(u8, String);

type Run = Result<(), Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Run {
    std::fs::write(path, text).map_err(|e| Fail(2, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<MapInstance, Fail> {
    parse_instance(&read(path)?).map_err(|e| Fail(2, format!("{}: {e}", path.display())))
}

fn load_valid(path: &Path) -> Result<MapInstance, Fail> {
    let inst = load(path)?;
    let report = validate_instance(&inst, true);
    match report.failures.first() {
        Some(f) => Err(Fail(2, format!("{}: invalid instance: {f}", path.display()))),
        None => Ok(inst),
    }
}

fn report_json(r: &SolveReport) -> serde_json::Value {
    json!({
        "id": r.id,
        "cost": r.cost,
        "d2_cost": r.d2_cost,
        "opt": r.opt,
        "bound_ok": r.bound_ok,
        "steps": r.steps,
        "leaves": r.leaves,
        "solution": r.solution.iter().map(|id| id + 1).collect::<Vec<_>>(),
        "traces": r.traces,
    })
}

fn cmd_solve(input: &[PathBuf], output: Option<PathBuf>, budget_nodes: usize, trace: bool, report: Option<PathBuf>) -> Run {
    let mut items = Vec::new();
    for p in input {
        items.push((p.display().to_string(), load(p)?));
    }
    let opts = SolveOptions { budget: OracleBudget::with_max_nodes(budget_nodes), trace, ..SolveOptions::default() };
    let mut worst = 0u8;
    let mut json_rows = Vec::new();
    for (i, res) in solve_batch(&items, &opts).into_iter().enumerate() {
        match res {
            Ok(r) => {
                print!("{r}");
                if let Some(out) = &output {
                    let path = if items.len() == 1 { out.clone() } else { out.with_extension(format!("{i}")) };
                    write(&path, &format_solution(&r.solution.ids(), r.cost))?;
                }
                json_rows.push(report_json(&r));
            }
            Err(e) => {
                eprintln!("{}: {e}", items[i].0);
                if let mapaug_core::pipeline::SolveError::Abort { instance, .. } = &e {
                    eprintln!("offending instance:\n{instance}");
                }
                json_rows.push(json!({ "id": items[i].0, "error": e.to_string(), "exit_code": e.exit_code() }));
                worst = worst.max(e.exit_code() as u8);
            }
        }
    }
    if let Some(path) = report {
        let text = serde_json::to_string_pretty(&json_rows).map_err(|e| Fail(3, e.to_string()))?;
        write(&path, &text)?;
    }
    if worst == 0 {
        Ok(())
    } else {
        Err(Fail(worst, "some instances failed".into()))
    }
}

fn cmd_scan(input: &Path, kind: Option<ObstructionKind>) -> Run {
    let inst = load_valid(input)?;
    let found = scan_all(&inst, kind);
    for ob in &found {
        let nodes: Vec<_> = ob.carrier.nodes.iter().map(|v| v + 1).collect();
        let edges: Vec<_> = ob.carrier.edges.iter().map(|e| e + 1).collect();
        println!("{} nodes={nodes:?} edges={edges:?}", ob.kind);
    }
    println!("{} obstruction(s)", found.len());
    Ok(())
}

fn cmd_oracle(input: &Path, budget_nodes: usize) -> Run {
    let inst = load_valid(input)?;
    let budget = OracleBudget::with_max_nodes(budget_nodes);
    let (opt, sol) = opt_2ecss(&inst, &budget).map_err(|e| Fail(3, e.to_string()))?;
    let (cover, _) = min_2edge_cover(&inst, &budget).map_err(|e| Fail(3, e.to_string()))?;
    println!("opt {opt}");
    println!("min_2edge_cover {cover}");
    println!("solution {:?}", sol.iter().map(|id| id + 1).collect::<Vec<_>>());
    Ok(())
}

fn cmd_verify(input: &Path, solution: &Path, cost: Option<u64>) -> Run {
    let inst = load(input)?;
    let text = read(solution)?;
    let ids = parse_solution(&text).map_err(|e| Fail(2, format!("{}: {e}", solution.display())))?;
    let header = text.lines().find_map(|l| l.trim().strip_prefix("# cost ").and_then(|c| c.trim().parse().ok()));
    let verdict = verify(&inst, &ids, cost.or(header));
    if verdict.passed() {
        println!("pass");
        return Ok(());
    }
    for f in &verdict.failures {
        println!("fail {f}");
    }
    Err(Fail(2, format!("{} failure(s)", verdict.failures.len())))
}

fn cmd_gen(family: &str, param: usize, seed: u64, density: f64, output: Option<PathBuf>) -> Run {
    let bad = |e: mapaug_core::gen::GenError| Fail(2, e.to_string());
    let inst = match family {
        "g1" => gen_g1(),
        "random" => gen_random(param, density, seed).map_err(bad)?,
        "random-ws" => gen_random_ws(param, density, seed).map_err(bad)?,
        "planted" => gen_planted(seed).0,
        other => {
            let fam: Family = other.parse().map_err(|e: mapaug_core::pipeline::UnknownFamily| Fail(2, e.to_string()))?;
            fam.instance(param, seed).map_err(bad)?
        }
    };
    let text = format_instance(&inst);
    match output {
        Some(p) => write(&p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_ratio(family: Family, params: &[usize], budget_nodes: usize, seed: u64) -> Run {
    let rows = ratio_report(family, params, &OracleBudget::with_max_nodes(budget_nodes), seed)
        .map_err(|e| Fail(e.exit_code() as u8, e.to_string()))?;
    for r in rows {
        println!("{r}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve { input, output, budget_nodes, trace, report } => {
            cmd_solve(&input, output, budget_nodes, trace, report)
        }
        Cmd::Scan { input, kind } => cmd_scan(&input, kind),
        Cmd::Oracle { input, budget_nodes } => cmd_oracle(&input, budget_nodes),
        Cmd::Verify { input, solution, cost } => cmd_verify(&input, &solution, cost),
        Cmd::Gen { family, param, seed, density, output } => cmd_gen(&family, param, seed, density, output),
        Cmd::Ratio { family, param, budget_nodes, seed } => cmd_ratio(family, &param, budget_nodes, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
