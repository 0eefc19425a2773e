use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oic_core::bits::Gf2Vec;
use oic_core::bounds::{bounds_report, mais_exact};
use oic_core::oic::{suggest_decompositions, SuggestLimits};
use oic_core::oracle::{minrank_gf2, minrank_gf2_seeded, FittingMatrix};
use oic_core::testkit::{fixture_names, load_fixtures, random_oic, run_fixture, simulate, Profile, SimulationMode};
use oic_core::{
    apply_code, certify_oic, decode_receiver, encode_oic, make_decoding_plan, verify_ic, verify_oic,
    Budget, DecodingPlan, Error, InnerVertexSet, MessageVector, PolytreeDecomposition, SuicpInstance, VerifiedOic,
    VertexId,
};
use serde_json::{json, Value};

/// Index coding with overlapping interlinked-cycle structures.
///
/// Graphs are JSON `{"K": n, "edges": [[u, v], ...], "t": bits}` with
/// 0-based vertices; edge u -> v means receiver u knows message v. A
/// structure is either `{"V_I": [...]}` or a polytree
/// `{"nodes": [{"i", "j", "vertices"}], "edges": [{"parent", "child", "shared"}]}`.
///
/// Exit status: 0 success, 1 verification or check failed, 2 unreadable
/// input, 3 search budget exceeded (see OIC_BUDGET).
#[derive(Parser)]
#[command(name = "oic", version)]
struct Cli {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every structural condition and report witnesses.
    Verify { graph: PathBuf, structure: PathBuf },
    /// Print the linear code of a verified structure.
    Encode { graph: PathBuf, structure: PathBuf },
    /// Print each receiver's decoding combination.
    Plan { graph: PathBuf, structure: PathBuf },
    /// Encode the given messages and decode them at every receiver.
    Decode {
        graph: PathBuf,
        structure: PathBuf,
        /// Comma-separated hex values, one per message.
        #[arg(long)]
        messages: String,
    },
    /// Exact maximum acyclic induced subgraph.
    Mais { graph: PathBuf },
    /// Code length, capacity and the acyclic lower bound.
    Capacity { graph: PathBuf, structure: PathBuf },
    /// Optimal scalar linear code length over GF(2), compared with a structure's code when given.
    Oracle { graph: PathBuf, structure: Option<PathBuf> },
    /// Run encode/decode end to end.
    Simulate {
        graph: PathBuf,
        structure: PathBuf,
        /// Random trials (default 1000 when exhaustive runs are not possible).
        #[arg(long)]
        trials: Option<u64>,
        /// Try every one-bit assignment.
        #[arg(long, conflicts_with = "trials")]
        exhaustive: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate an instance with a valid decomposition.
    Gen {
        /// For example `w=1,2;size=3-4;ni=3`.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write graph.json and structure.json here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for decompositions that verify.
    Suggest { graph: PathBuf },
    /// List, check or export the bundled reference instances.
    Fixtures {
        /// Run the full check on every fixture.
        #[arg(long)]
        run_all: bool,
        /// Write NAME.graph.json and NAME.structure.json files here.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

/// A failure with the exit status it maps to.
struct Failure {
    status: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_)
            | Error::Json(_)
            | Error::InvalidGraph(_)
            | Error::InvalidDecomposition(_)
            | Error::LengthMismatch { .. }
            | Error::Profile(_) => 2,
            Error::BudgetExceeded(_) => 3,
            _ => 1,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

fn in_file(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        status: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_graph(path: &Path) -> std::result::Result<SuicpInstance, Failure> {
    SuicpInstance::parse(&read(path)?).map_err(in_file(path))
}

enum Structure {
    Ic(InnerVertexSet),
    Oic(PolytreeDecomposition),
}

impl Structure {
    fn decomposition(&self) -> PolytreeDecomposition {
        match self {
            Structure::Ic(vi) => PolytreeDecomposition::single(vi.members().clone()),
            Structure::Oic(d) => d.clone(),
        }
    }
}

fn load_structure(path: &Path, k: usize) -> std::result::Result<Structure, Failure> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| in_file(path)(Error::Json(e)))?;
    if value.get("V_I").is_some() {
        Ok(Structure::Ic(InnerVertexSet::parse(k, &text).map_err(in_file(path))?))
    } else if value.get("nodes").is_some() {
        Ok(Structure::Oic(PolytreeDecomposition::parse(&text).map_err(in_file(path))?))
    } else {
        Err(Failure {
            status: 2,
            message: format!("{}: expected a \"V_I\" or \"nodes\" field", path.display()),
        })
    }
}

fn certified(graph: &Path, structure: &Path) -> std::result::Result<(SuicpInstance, VerifiedOic), Failure> {
    let inst = load_graph(graph)?;
    let s = load_structure(structure, inst.k())?;
    let oic = certify_oic(&inst.graph, &s.decomposition())?;
    Ok((inst, oic))
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

fn budget() -> std::result::Result<Budget, Failure> {
    Budget::from_env().map_err(|e| Failure {
        status: 2,
        message: format!("OIC_BUDGET: {e}"),
    })
}

fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    match cli.command {
        Command::Verify { graph, structure } => {
            let inst = load_graph(&graph)?;
            let report = match load_structure(&structure, inst.k())? {
                Structure::Ic(vi) => verify_ic(&inst.graph, &vi),
                Structure::Oic(d) => verify_oic(&inst.graph, &d),
            };
            if json {
                print_json(&json!({ "passed": report.passed(), "conditions": report.conditions }));
            } else {
                print!("{report}");
                println!("{}", if report.passed() { "verified" } else { "not verified" });
            }
            Ok(report.passed())
        }
        Command::Encode { graph, structure } => {
            let (_, oic) = certified(&graph, &structure)?;
            let code = encode_oic(&oic);
            if json {
                print_json(&code.to_json());
            } else {
                print!("{code}");
                println!("length {}", code.len());
            }
            Ok(true)
        }
        Command::Plan { graph, structure } => {
            let (_, oic) = certified(&graph, &structure)?;
            let plan = make_decoding_plan(&oic)?;
            if json {
                print_json(&plan.to_json());
            } else {
                print!("{plan}");
            }
            Ok(true)
        }
        Command::Decode {
            graph,
            structure,
            messages,
        } => {
            let (inst, oic) = certified(&graph, &structure)?;
            let plan = make_decoding_plan(&oic)?;
            decode(&inst, &plan, &messages, json)
        }
        Command::Mais { graph } => {
            let inst = load_graph(&graph)?;
            let m = mais_exact(&inst.graph, &budget()?)?;
            if json {
                print_json(&m);
            } else {
                println!("MAIS {}", m.size);
                println!("witness {}", set_text(&m.witness));
            }
            Ok(true)
        }
        Command::Capacity { graph, structure } => {
            let (_, oic) = certified(&graph, &structure)?;
            let report = bounds_report(&oic, &budget()?)?;
            if json {
                print_json(&report);
            } else {
                println!("{}", report.capacity);
                println!("length {}", report.code_length);
                println!("acyclic witness {}", set_text(&report.witness));
                match &report.mais {
                    Some(m) => println!("MAIS {}", m.size),
                    None => println!("MAIS not computed: graph exceeds the exact solver limit"),
                }
                if let Some(d) = &report.discrepancy {
                    println!("discrepancy: {d}");
                }
            }
            Ok(report.discrepancy.is_none())
        }
        Command::Oracle { graph, structure } => {
            let inst = load_graph(&graph)?;
            let budget = budget()?;
            let mais = mais_exact(&inst.graph, &budget).ok().map(|m| m.size);
            let code = match structure {
                Some(path) => {
                    let s = load_structure(&path, inst.k())?;
                    let oic = certify_oic(&inst.graph, &s.decomposition())?;
                    Some(make_decoding_plan(&oic)?)
                }
                None => None,
            };
            let minrank = match &code {
                Some(plan) => {
                    let seed = FittingMatrix::from_plan(&inst.graph, plan)?;
                    minrank_gf2_seeded(&inst.graph, &budget, mais, &seed)?
                }
                None => minrank_gf2(&inst.graph, &budget, mais)?,
            };
            let length = code.as_ref().map(|p| p.code().len());
            let verdict = match length {
                Some(l) if l == minrank.rank => format!("length {l} is optimal among scalar linear codes"),
                Some(l) => format!("length {l} exceeds the optimum {}", minrank.rank),
                None if mais == Some(minrank.rank) => "minrank meets the acyclic lower bound".to_string(),
                None => "minrank is above the acyclic lower bound".to_string(),
            };
            if json {
                print_json(&json!({
                    "minrank": minrank.rank,
                    "mais": mais,
                    "code_length": length,
                    "search_nodes": minrank.search_nodes,
                    "witness": minrank.witness.hex_rows(),
                    "verdict": verdict,
                }));
            } else {
                println!("minrank {}", minrank.rank);
                match mais {
                    Some(m) => println!("MAIS {m}"),
                    None => println!("MAIS not computed"),
                }
                print!("fitting matrix rows (hex):\n{}", minrank.witness);
                println!("{verdict}");
            }
            Ok(length.is_none_or(|l| l == minrank.rank))
        }
        Command::Simulate {
            graph,
            structure,
            trials,
            exhaustive,
            seed,
        } => {
            let (inst, oic) = certified(&graph, &structure)?;
            let plan = make_decoding_plan(&oic)?;
            let mode = if exhaustive {
                SimulationMode::Exhaustive
            } else if let Some(trials) = trials {
                SimulationMode::Random { trials, seed }
            } else {
                SimulationMode::auto(&inst, 1000, seed)
            };
            let report = simulate(&inst, &plan, &mode)?;
            if json {
                print_json(&report);
            } else {
                let kind = if report.exhaustive { "exhaustive" } else { "random" };
                println!(
                    "{kind}: {} assignments x {} receivers, {} failures",
                    report.trials, report.receivers, report.failure_count
                );
                for f in &report.failures {
                    println!(
                        "receiver {} trial {} seed {:?}: messages [{}] expected {} got {}",
                        VertexId(f.receiver),
                        f.trial,
                        f.seed,
                        f.messages.join(","),
                        f.expected,
                        f.decoded.as_deref().or(f.error.as_deref()).unwrap_or("-")
                    );
                }
            }
            Ok(report.passed())
        }
        Command::Gen { profile, seed, out } => {
            let profile: Profile = profile.parse()?;
            let g = random_oic(&profile, seed)?;
            let graph = serde_json::to_value(g.instance.to_json()).expect("serializable");
            let structure = serde_json::to_value(g.decomposition.to_json()).expect("serializable");
            match out {
                Some(dir) => {
                    let write = |name: &str, v: &Value| {
                        let path = dir.join(name);
                        fs::write(&path, serde_json::to_string_pretty(v).expect("serializable") + "\n").map_err(|e| {
                            Failure {
                                status: 1,
                                message: format!("{}: {e}", path.display()),
                            }
                        })
                    };
                    fs::create_dir_all(&dir).map_err(|e| Failure {
                        status: 1,
                        message: format!("{}: {e}", dir.display()),
                    })?;
                    write("graph.json", &graph)?;
                    write("structure.json", &structure)?;
                    if !json {
                        println!("K = {}, {} nodes, written to {}", g.instance.k(), g.decomposition.node_count(), dir.display());
                    }
                }
                None => print_json(&json!({ "graph": graph, "structure": structure })),
            }
            Ok(true)
        }
        Command::Suggest { graph } => {
            let inst = load_graph(&graph)?;
            let outcome = suggest_decompositions(&inst.graph, &SuggestLimits::default());
            if json {
                let list: Vec<Value> = outcome
                    .suggestions
                    .iter()
                    .map(|s| json!({ "code_length": s.code_length, "structure": s.decomposition.to_json() }))
                    .collect();
                print_json(&json!({ "complete": outcome.complete, "suggestions": list }));
            } else {
                if outcome.suggestions.is_empty() {
                    println!("no decomposition found");
                }
                for s in &outcome.suggestions {
                    let nodes: Vec<String> = s
                        .decomposition
                        .nodes()
                        .map(|(key, verts)| format!("{key} {}", set_text(verts)))
                        .collect();
                    println!("length {}: {}", s.code_length, nodes.join("  "));
                }
                if !outcome.complete {
                    println!("search stopped at a limit; shorter codes may exist");
                }
            }
            Ok(true)
        }
        Command::Fixtures { run_all, export } => fixtures(run_all, export, json),
    }
}

fn set_text<'a>(set: impl IntoIterator<Item = &'a VertexId>) -> String {
    let items: Vec<String> = set.into_iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn decode(inst: &SuicpInstance, plan: &DecodingPlan, messages: &str, json: bool) -> Outcome {
    let bits = inst.message_bits;
    let values = messages
        .split(',')
        .map(|h| Gf2Vec::from_hex(bits, h.trim()))
        .collect::<oic_core::Result<Vec<_>>>()?;
    if values.len() != inst.k() {
        return Err(Error::LengthMismatch {
            expected: inst.k(),
            actual: values.len(),
        }
        .into());
    }
    let messages = MessageVector::new(bits, values)?;
    let broadcast = apply_code(plan.code(), &messages)?;
    let mut all_ok = true;
    let mut rows = Vec::new();
    for r in plan.receivers() {
        let side = messages.restrict(&inst.side_information(r.receiver));
        let got = decode_receiver(r, &broadcast, &side)?;
        let ok = &got == messages.get(inst.want(r.receiver));
        all_ok &= ok;
        rows.push((r.receiver, got.to_hex(), ok));
    }
    if json {
        let symbols: Vec<Value> = plan
            .code()
            .symbols()
            .iter()
            .zip(&broadcast)
            .map(|(s, v)| json!({ "label": s.label, "value": v.to_hex() }))
            .collect();
        let receivers: Vec<Value> = rows
            .iter()
            .map(|(v, hex, ok)| json!({ "receiver": v.0, "decoded": hex, "correct": ok }))
            .collect();
        print_json(&json!({ "broadcast": symbols, "receivers": receivers }));
    } else {
        for (s, v) in plan.code().symbols().iter().zip(&broadcast) {
            println!("{} = {}", s.label, v.to_hex());
        }
        for (v, hex, ok) in rows {
            println!("{v} decodes {hex} {}", if ok { "ok" } else { "WRONG" });
        }
    }
    Ok(all_ok)
}

fn fixtures(run_all: bool, export: Option<PathBuf>, json: bool) -> Outcome {
    let all = load_fixtures()?;
    if let Some(dir) = &export {
        let io = |e: std::io::Error| Failure {
            status: 1,
            message: format!("{}: {e}", dir.display()),
        };
        fs::create_dir_all(dir).map_err(io)?;
        for f in &all {
            let structure = match &f.structure {
                oic_core::testkit::Structure::Ic(vi) => serde_json::to_string_pretty(&vi.to_json()),
                oic_core::testkit::Structure::Oic(d) => serde_json::to_string_pretty(&d.to_json()),
            }
            .expect("serializable");
            let graph = serde_json::to_string_pretty(&f.instance.to_json()).expect("serializable");
            fs::write(dir.join(format!("{}.graph.json", f.name)), graph + "\n").map_err(io)?;
            fs::write(dir.join(format!("{}.structure.json", f.name)), structure + "\n").map_err(io)?;
        }
    }
    if !run_all {
        if json {
            print_json(&fixture_names().collect::<Vec<_>>());
        } else if export.is_none() {
            for f in &all {
                println!("{:<18} K={:<3} {}", f.name, f.graph().vertex_count(), f.description);
            }
        }
        return Ok(true);
    }
    let budget = budget()?;
    let mut passed = true;
    let mut rows = Vec::new();
    for f in &all {
        let out = run_fixture(f, &budget)?;
        passed &= out.passed();
        if !json {
            println!(
                "{} {:<18} length {} mais {} minrank {} capacity {}",
                if out.passed() { "PASS" } else { "FAIL" },
                out.name,
                out.code_length,
                out.mais,
                out.minrank,
                out.capacity
            );
            for p in &out.problems {
                println!("     problem: {p}");
            }
            for r in &out.remarks {
                println!("     note: {r}");
            }
        }
        rows.push(json!({
            "name": out.name,
            "passed": out.passed(),
            "length": out.code_length,
            "mais": out.mais,
            "minrank": out.minrank,
            "capacity": out.capacity.to_string(),
            "problems": out.problems,
            "remarks": out.remarks,
        }));
    }
    if json {
        print_json(&rows);
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
