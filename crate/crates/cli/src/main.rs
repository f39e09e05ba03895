use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use railpath::bench;
use railpath::diagram::{self, PlotOptions};
use railpath::model::{self, InsertionRequest, Network, ParameterSet, Severity, Timetable, Window};
use railpath::oracle;
use railpath::paths::{self, write_frontier_tsv, write_paths};
use railpath::pipeline;
use railpath::synth::{self, GenConfig};
use railpath::time::parse_time;
use railpath::Error;

#[derive(Parser)]
#[command(name = "railpath", version, about = "Insert a train path into a timetable")]
struct Cli {
    /// More logging; repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All non-dominated paths for one request.
    Insert {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        request: RequestArgs,
        /// Print every dynamic-programming table.
        #[arg(long)]
        dump_tables: bool,
        /// Also write the frontier as a tab-separated table.
        #[arg(long)]
        frontier: Option<PathBuf>,
        /// Path records go here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a seeded synthetic corridor.
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        stations: usize,
        #[arg(long, default_value_t = 4)]
        trains: usize,
        #[arg(long, default_value = "06:00")]
        window_start: String,
        #[arg(long, default_value = "10:00")]
        window_end: String,
        /// Share of double-track stretches.
        #[arg(long, default_value_t = 0.5)]
        double_share: f64,
        /// Align all times to this many seconds.
        #[arg(long)]
        grid: Option<i64>,
        #[arg(long, default_value_t = 1)]
        days: u32,
        #[arg(long)]
        bypass: bool,
        #[arg(long)]
        varied_margins: bool,
        /// Write tree (JSON) documents instead of line documents.
        #[arg(long)]
        json: bool,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Time-distance diagram of a timetable and candidate paths.
    Plot {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Path records from `insert`.
        #[arg(long)]
        paths: Option<PathBuf>,
        #[arg(long)]
        window_start: Option<String>,
        #[arg(long)]
        window_end: Option<String>,
        /// Draw distance horizontally and time vertically.
        #[arg(long)]
        distance_horizontal: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Query time over multiples of the request window.
    Bench {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        request: RequestArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        multiples: Vec<u32>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compares the sweep with the brute-force search on a time grid.
    Oracle {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        request: RequestArgs,
        #[arg(long, default_value_t = 60)]
        grid: i64,
    },
    /// Reports inconsistencies in an instance.
    Validate {
        #[command(flatten)]
        instance: InstanceArgs,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    timetable: PathBuf,
    #[arg(long)]
    params: PathBuf,
}

#[derive(Args)]
struct RequestArgs {
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[arg(long)]
    window_start: String,
    #[arg(long)]
    window_end: String,
    /// Number of shortest routes offered to the arc ordering.
    #[arg(long, default_value_t = InsertionRequest::DEFAULT_ROUTES)]
    routes: usize,
    /// Intermediate station where the train may not stop; repeatable.
    #[arg(long)]
    no_stop: Vec<String>,
}

/// Outcome classes mapped to exit codes.
enum Failure {
    Input(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(m) => Failure::Verification(m),
            other => Failure::Input(other),
        }
    }
}

struct Instance {
    network: Network,
    timetable: Timetable,
    params: ParameterSet,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(Error::InvalidValue(format!("{}: {e}", path.display()))))
}

fn with_file<T>(path: &Path, r: railpath::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(Error::InvalidValue(format!("{}: {e}", path.display()))))
}

fn load(args: &InstanceArgs) -> Result<Instance, Failure> {
    let network = with_file(&args.network, model::load_network(&read(&args.network)?))?;
    let timetable = with_file(&args.timetable, model::load_timetable(&read(&args.timetable)?, &network))?;
    let params = with_file(&args.params, model::load_parameters(&read(&args.params)?, &network, &timetable))?;
    Ok(Instance { network, timetable, params })
}

fn request(inst: &Instance, args: &RequestArgs) -> Result<InsertionRequest, Failure> {
    let epoch = inst.timetable.epoch.or(inst.network.epoch);
    let net = &inst.network;
    let window = Window::new(parse_time(&args.window_start, epoch)?, parse_time(&args.window_end, epoch)?);
    let mut req = InsertionRequest::new(net.station_ix(&args.from)?, net.station_ix(&args.to)?, window)?;
    req.route_count = args.routes;
    req.no_stop = args.no_stop.iter().map(|s| net.station_ix(s)).collect::<railpath::Result<_>>()?;
    req.check()?;
    Ok(req)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Insert { instance, request: req_args, dump_tables, frontier, out } => {
            let inst = load(&instance)?;
            let req = request(&inst, &req_args)?;
            let report = pipeline::insert(&inst.network, &inst.timetable, &inst.params, &req, dump_tables)?;
            eprint!("{}", report.summary());
            if let Some(dump) = &report.dump {
                eprint!("{dump}");
            }
            if let Some(path) = frontier {
                emit(Some(&path), &write_frontier_tsv(&report.frontier))?;
            }
            emit(out.as_deref(), &write_paths(&inst.network, &report.paths))?;
            if !report.verified() {
                let lines: Vec<String> =
                    report.violations.iter().map(|(i, v)| format!("path {}: {v}", i + 1)).collect();
                return Err(Failure::Verification(lines.join("\n")));
            }
            Ok(())
        }
        Command::Gen {
            seed,
            stations,
            trains,
            window_start,
            window_end,
            double_share,
            grid,
            days,
            bypass,
            varied_margins,
            json,
            out,
        } => {
            let window = Window::new(parse_time(&window_start, None)?, parse_time(&window_end, None)?);
            let cfg = GenConfig {
                seed,
                stations,
                trains,
                window,
                double_share,
                grid,
                days,
                bypass,
                varied_margins,
                ..GenConfig::default()
            };
            let inst = synth::generate(&cfg)?;
            fs::create_dir_all(&out).map_err(|e| Failure::Input(e.into()))?;
            let (net, tt, params) = if json {
                let pretty = |v: serde_json::Result<String>| v.map(|s| s + "\n").map_err(|e| Failure::Input(e.into()));
                (
                    pretty(serde_json::to_string_pretty(&inst.network.to_doc()))?,
                    pretty(serde_json::to_string_pretty(&inst.timetable.to_doc(&inst.network)))?,
                    pretty(serde_json::to_string_pretty(&inst.params.to_doc(&inst.network, &inst.timetable)))?,
                )
            } else {
                (
                    model::write_network(&inst.network),
                    model::write_timetable(&inst.timetable, &inst.network),
                    model::write_params(&inst.params, &inst.network, &inst.timetable),
                )
            };
            let ext = if json { "json" } else { "txt" };
            for (name, text) in [("network", net), ("timetable", tt), ("params", params)] {
                emit(Some(&out.join(format!("{name}.{ext}"))), &text)?;
            }
            info!("{} trains on {} stations", inst.timetable.trains().len(), inst.network.stations().len());
            Ok(())
        }
        Command::Plot { instance, paths: path_file, window_start, window_end, distance_horizontal, out } => {
            let inst = load(&instance)?;
            let found = match &path_file {
                Some(p) => with_file(p, paths::parse_paths(&inst.network, &read(p)?))?,
                None => Vec::new(),
            };
            let epoch = inst.timetable.epoch.or(inst.network.epoch);
            let window = match (window_start, window_end) {
                (Some(a), Some(b)) => Some(Window::new(parse_time(&a, epoch)?, parse_time(&b, epoch)?)),
                _ => None,
            };
            let options = PlotOptions { distance_horizontal, window, ..PlotOptions::default() };
            let svg = diagram::render_svg(&inst.network, &inst.params, &inst.timetable, &found, &options)?;
            emit(out.as_deref(), &svg)
        }
        Command::Bench { instance, request: req_args, multiples, repetitions, out } => {
            let inst = load(&instance)?;
            let req = request(&inst, &req_args)?;
            let rows = bench::run(&inst.network, &inst.timetable, &inst.params, &req, &multiples, repetitions)?;
            let mut text = bench::timing_tsv(&rows);
            if let Some(last) = rows.last() {
                text.push('\n');
                text.push_str(&bench::table_size_tsv(&last.table_sizes));
            }
            emit(out.as_deref(), &text)
        }
        Command::Oracle { instance, request: req_args, grid } => {
            let inst = load(&instance)?;
            let req = request(&inst, &req_args)?;
            let prepared = pipeline::prepare(&inst.network, &inst.timetable, &inst.params, &req)?;
            let expected: BTreeSet<_> =
                oracle::oracle_frontier(&inst.network, &inst.timetable, &inst.params, &req, &prepared.route_graph, grid)?
                    .into_iter()
                    .collect();
            let (_, frontier, _, _) = pipeline::query(&inst.network, &inst.params, &req, &prepared)?;
            let start = req.window.start.secs();
            let got: BTreeSet<_> = frontier
                .iter()
                .flat_map(|p| p.expand().collect::<Vec<_>>())
                .filter(|(d, _)| (d.secs() - start).rem_euclid(grid) == 0)
                .collect();
            println!("grid pairs: oracle {}, sweep {}", expected.len(), got.len());
            let mut diff = Vec::new();
            for (d, a) in expected.difference(&got) {
                diff.push(format!("only oracle: depart {d} arrive {a}"));
            }
            for (d, a) in got.difference(&expected) {
                diff.push(format!("only sweep: depart {d} arrive {a}"));
            }
            if diff.is_empty() {
                println!("frontiers agree");
                Ok(())
            } else {
                Err(Failure::Verification(diff.join("\n")))
            }
        }
        Command::Validate { instance } => {
            let inst = load(&instance)?;
            let diags = model::validate(&inst.network, &inst.timetable, &inst.params);
            for d in &diags {
                println!("{d}");
            }
            if diags.iter().any(|d| d.severity == Severity::Error) {
                return Err(Failure::Input(Error::InvalidValue("instance has errors".into())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed:\n{m}");
            ExitCode::from(2)
        }
    }
}
