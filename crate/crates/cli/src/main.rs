use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use glc_cli::describe::{is_descriptor, move_entries, resolve};
use glc_cli::{load_graph, parse_move, parse_site, service, Error};
use glc_core::emergent::{check_move_soundness, checkable_moves, coefficient_set};
use glc_core::format::{parse_glc, print_glc, to_dot};
use glc_core::graph::{is_isomorphic, is_isomorphic_labeled, Graph};
use glc_core::lambda::{decode, encode, graph_normalize, parse};
use glc_core::moves::{applied, Direction, MoveKind};
use glc_core::scenarios::{run_all, run_scenario};

#[derive(Parser)]
#[command(name = "glc", version, about = "Graphic lambda calculus workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Normal,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a lambda term as a .glc document.
    Encode {
        term: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decode a lambda-sector graph to a term.
    Decode { file: PathBuf },
    /// Reduce a graph (file) or a term to normal form.
    Reduce {
        input: String,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
        #[arg(long, value_enum, default_value = "normal")]
        strategy: StrategyArg,
        /// Print the decoded term instead of the graph.
        #[arg(long)]
        decode: bool,
    },
    /// List applicable moves as JSON.
    Moves { file: PathBuf },
    /// Apply one move and print the resulting graph.
    Apply {
        file: PathBuf,
        #[arg(long = "move")]
        kind: String,
        /// A site such as `e3`, or a descriptor from `moves`.
        #[arg(long)]
        site: String,
        #[arg(long)]
        reverse: bool,
    },
    /// Test two graphs for isomorphism.
    Iso {
        first: PathBuf,
        second: PathBuf,
        /// Also match leaf names.
        #[arg(long)]
        labeled: bool,
    },
    /// Replay derivation scenarios.
    Scenario {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        all: bool,
    },
    /// Check decoration soundness of the emergent moves.
    Soundness {
        /// Check only this move.
        #[arg(long = "move")]
        kind: Option<String>,
    },
    /// Print a graph as DOT.
    Dot { file: PathBuf },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

/// Reads a file, or standard input for `-`.
fn read(path: &Path) -> Result<String, Error> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(io)
}

fn read_graph(path: &Path) -> Result<Graph, Error> {
    Ok(parse_glc(&read(path)?)?)
}

/// Output text and whether the command succeeded.
fn run(cmd: Command) -> Result<(String, bool), Error> {
    let ok = |s: String| Ok((s, true));
    match cmd {
        Command::Encode { term, output } => {
            let text = print_glc(&encode(&parse(&term)?));
            match output {
                Some(p) => {
                    std::fs::write(&p, text).map_err(|source| Error::Io { path: p.display().to_string(), source })?;
                    ok(String::new())
                }
                None => ok(text),
            }
        }
        Command::Decode { file } => ok(format!("{}\n", decode(&read_graph(&file)?)?)),
        Command::Reduce { input, fuel, strategy: StrategyArg::Normal, decode: as_term } => {
            let g = if input == "-" || Path::new(&input).is_file() {
                load_graph(&read(Path::new(&input))?)?
            } else {
                load_graph(&input)?
            };
            let nf = graph_normalize(&g, fuel)?;
            if as_term {
                ok(format!("{}\n", decode(&nf)?))
            } else {
                ok(print_glc(&nf))
            }
        }
        Command::Moves { file } => {
            let entries = move_entries(&read_graph(&file)?);
            ok(serde_json::to_string_pretty(&entries).expect("serializable") + "\n")
        }
        Command::Apply { file, kind, site, reverse } => {
            let g = read_graph(&file)?;
            let m = parse_move(&kind)?;
            let dir = if reverse { Direction::Reverse } else { Direction::Forward };
            let site = match parse_site(&site) {
                Ok(s) => s,
                Err(_) if is_descriptor(&site) => resolve(&g, &m, dir, &site).ok_or(Error::StaleDescriptor(site))?,
                Err(e) => return Err(e),
            };
            let (h, _) = applied(&g, &m, &site, dir)?;
            ok(print_glc(&h))
        }
        Command::Iso { first, second, labeled } => {
            let (a, b) = (read_graph(&first)?, read_graph(&second)?);
            let same = if labeled { is_isomorphic_labeled(&a, &b) } else { is_isomorphic(&a, &b) };
            Ok((if same { "isomorphic\n" } else { "not isomorphic\n" }.to_string(), same))
        }
        Command::Scenario { name: Some(n), .. } => {
            let r = run_scenario(&n)?;
            let mut s = format!("{}: {}\n", r.name, r.verdict);
            for d in &r.details {
                s += &format!("  {d}\n");
            }
            Ok((s, r.verdict.passed()))
        }
        Command::Scenario { name: None, .. } => {
            let reports = run_all();
            let s = reports.iter().map(|r| format!("{}: {}\n", r.name, r.verdict)).collect();
            Ok((s, reports.iter().all(|r| r.verdict.passed())))
        }
        Command::Soundness { kind } => {
            let (moves, informative): (Vec<MoveKind>, Vec<MoveKind>) = match kind {
                Some(k) => (vec![parse_move(&k)?], vec![]),
                None => {
                    (checkable_moves(&coefficient_set()), vec![MoveKind::BetaStar("a".parse().expect("coefficient"))])
                }
            };
            let mut s = String::new();
            let mut all = true;
            for (m, must) in moves.iter().map(|m| (m, true)).chain(informative.iter().map(|m| (m, false))) {
                let r = check_move_soundness(m);
                let verdict = if r.preserving() { "preserving" } else { "not preserving" };
                s += &format!(
                    "{m}: {verdict} (graphs {}, sites {}, comparisons {}, failures {}, undecided {}, skipped {})\n",
                    r.graphs, r.sites, r.comparisons, r.failures, r.undecided, r.skipped
                );
                all &= !must || r.preserving();
            }
            Ok((s, all))
        }
        Command::Dot { file } => ok(to_dot(&read_graph(&file)?)),
        Command::Serve { port, host } => {
            let rt = tokio::runtime::Runtime::new().map_err(|source| Error::Io { path: "runtime".into(), source })?;
            rt.block_on(async {
                let addr = format!("{host}:{port}");
                let listener = tokio::net::TcpListener::bind(&addr)
                    .await
                    .map_err(|source| Error::Io { path: addr.clone(), source })?;
                eprintln!("listening on {addr}");
                axum::serve(listener, service::router()).await.map_err(|source| Error::Io { path: addr, source })
            })?;
            ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((out, success)) => {
            print!("{out}");
            if success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}
