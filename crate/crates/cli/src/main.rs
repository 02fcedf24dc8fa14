use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vmagic::abelian::GroupSpec;
use vmagic::characterize::{
    classify_group_vertex_magic, construct_labeling, predict, ClassifyVerdict,
};
use vmagic::families::{build, recognize, FamilyInstance, Shape, ATLAS};
use vmagic::graphcore::{parse_graph, to_dot, Graph};
use vmagic::labeling::{verify_magic, Labeling};
use vmagic::solver::{SolveStatus, Solver};
use vmagic::workbench::{
    audit_families, catalog, crosscheck, emit_records, CampaignSummary, DiscrepancyLedger, Grid,
};

#[derive(Parser)]
#[command(
    name = "vmagic",
    version,
    about = "Vertex-magic labelings over finite abelian groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite abelian groups.
    Group {
        #[command(subcommand)]
        command: GroupCommand,
    },
    /// The family atlas.
    Family {
        #[command(subcommand)]
        command: FamilyCommand,
    },
    /// Check a labeling.
    Verify {
        /// Family instance such as `M11(0,0)`, or a graph file.
        target: String,
        #[arg(long)]
        group: String,
        /// Labels as `v0=1,v1=(1,0),...`.
        #[arg(long)]
        labels: String,
    },
    /// Search for a magic labeling.
    Solve {
        target: String,
        #[arg(long)]
        group: String,
        /// Count all magic labelings instead.
        #[arg(long)]
        count: bool,
    },
    /// Evaluate the family theorem for an instance.
    Predict {
        instance: String,
        #[arg(long)]
        group: String,
    },
    /// Decide group vertex magicness from structure.
    Classify { target: String },
    /// Cross-validate theorems against exhaustive search.
    Crosscheck {
        #[arg(long, default_value = "std")]
        grid: String,
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        /// Write one JSON record per line.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with status 1 when the discrepancy ledger is nonempty.
        #[arg(long)]
        strict: bool,
    },
    /// Check that the atlas recognizes every small unicyclic and bicyclic graph.
    Audit {
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
}

#[derive(Subcommand)]
enum GroupCommand {
    List {
        #[arg(long, default_value_t = 8)]
        max_order: usize,
    },
    Info {
        spec: String,
    },
}

#[derive(Subcommand)]
enum FamilyCommand {
    List,
    Build {
        instance: String,
        /// Write Graphviz output to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

/// Bad input: exit status 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn group(spec: &str) -> Result<GroupSpec, Usage> {
    Ok(spec.parse()?)
}

/// A graph file if the path exists, otherwise a family instance.
fn load_target(target: &str) -> Result<Graph, Usage> {
    if Path::new(target).is_file() {
        let text = fs::read_to_string(target)?;
        return Ok(parse_graph(&text)?);
    }
    let instance: FamilyInstance = target.parse()?;
    Ok(build(&instance)?.graph)
}

fn run(command: Command) -> Result<ExitCode, Usage> {
    match command {
        Command::Group { command } => match command {
            GroupCommand::List { max_order } => {
                for a in catalog(max_order) {
                    println!("{a}\torder {}\texponent {}", a.order(), a.exponent());
                }
            }
            GroupCommand::Info { spec } => {
                let a = group(&spec)?;
                let list = |xs: Vec<vmagic::abelian::GroupElement>| {
                    xs.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                println!("group {a}");
                println!("canonical {}", a.canonical());
                println!("order {}", a.order());
                println!("rank {}", a.rank());
                println!("exponent {}", a.exponent());
                println!("squares {}", list(a.squares()));
                println!("involutions {}", list(a.involutions()));
            }
        },
        Command::Family { command } => match command {
            FamilyCommand::List => {
                for e in ATLAS {
                    let params = match e.shape {
                        Shape::Cycle => "k".to_string(),
                        Shape::Sun => "p1..pk".to_string(),
                        Shape::Template => format!("{} params", e.slots.len()),
                    };
                    let hub = if e.has_hub() { ", hub" } else { "" };
                    let covered = if e.covered { "" } else { " [not covered]" };
                    println!("{}\t{params}{hub}\t{}{covered}", e.name, e.summary);
                }
            }
            FamilyCommand::Build { instance, dot } => {
                let instance: FamilyInstance = instance.parse()?;
                let built = build(&instance)?;
                let g = &built.graph;
                println!(
                    "{instance}: {} vertices, {} edges, diameter {}",
                    g.n(),
                    g.edge_count(),
                    g.diameter()
                );
                for (v, role) in built.roles.iter().enumerate() {
                    println!("  {v}\t{role}\tdegree {}", g.degree(v));
                }
                if let Some(path) = dot {
                    fs::write(&path, to_dot(g, Some(&built.roles)))?;
                    println!("wrote {}", path.display());
                }
            }
        },
        Command::Verify {
            target,
            group: spec,
            labels,
        } => {
            let a = group(&spec)?;
            let g = load_target(&target)?;
            let l = Labeling::parse(&a, g.n(), &labels)?;
            match verify_magic(&g, &l)? {
                Some(cert) => println!("magic over {a}, mu = {}", cert.mu),
                None => println!("not magic over {a}"),
            }
        }
        Command::Solve {
            target,
            group: spec,
            count,
        } => {
            let a = group(&spec)?;
            let g = load_target(&target)?;
            let solver = Solver::default();
            if count {
                println!("{}", solver.count_magic(&g, &a)?);
            } else {
                let outcome = solver.exists_magic(&g, &a)?;
                match (outcome.status, &outcome.witness) {
                    (SolveStatus::Witness, Some((l, cert))) => {
                        println!("witness over {a}: {l} (mu = {})", cert.mu)
                    }
                    _ => println!("exhausted over {a}: no magic labeling"),
                }
                println!(
                    "nodes {} prunes {}",
                    outcome.stats.nodes, outcome.stats.prunes
                );
            }
        }
        Command::Predict {
            instance,
            group: spec,
        } => {
            let a = group(&spec)?;
            let instance: FamilyInstance = instance.parse()?;
            let v = predict(&instance, &a)?;
            println!("{instance} over {a}: {} ({})", v.outcome, v.rule);
            if let Some(recipe) = v.recipe {
                println!("recipe: {recipe}");
                match construct_labeling(&instance, &a) {
                    Ok(l) => println!("labeling: {l}"),
                    Err(e) => println!("construction failed: {e}"),
                }
            }
        }
        Command::Classify { target } => {
            let g = load_target(&target)?;
            match classify_group_vertex_magic(&g) {
                ClassifyVerdict::Yes(rule) => println!("group vertex magic ({rule})"),
                ClassifyVerdict::No { rule, refuter } => {
                    println!("not group vertex magic ({rule}), refuted by {refuter}")
                }
                ClassifyVerdict::NotCovered => {
                    let name = recognize(&g).map_or("unrecognized".to_string(), |i| i.to_string());
                    println!("not covered ({name})")
                }
            }
        }
        Command::Crosscheck {
            grid,
            max_order,
            out,
            strict,
        } => {
            if grid != "std" {
                return Err(Usage(format!("unknown grid '{grid}', expected 'std'")));
            }
            let instances = Grid::standard().instances();
            let records = crosscheck(&instances, &catalog(max_order));
            if let Some(path) = out {
                emit_records(&records, &path)?;
            }
            let ledger = DiscrepancyLedger::from_records(&records);
            println!("{}", CampaignSummary::of(&records));
            println!("ledger: {} entries", ledger.entries.len());
            print!("{ledger}");
            if strict && !ledger.is_empty() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Audit { nmax } => {
            if !(3..=vmagic::families::MAX_ENUM_VERTICES).contains(&nmax) {
                return Err(Usage(format!(
                    "--nmax must be between 3 and {}",
                    vmagic::families::MAX_ENUM_VERTICES
                )));
            }
            print!("{}", audit_families(nmax));
        }
    }
    Ok(ExitCode::SUCCESS)
}
