//! Command-line front end.
//!
//! Every subcommand prints a single JSON document by default (`--table`
//! switches to plain text), reads all inputs from flags or files, and is
//! deterministic: the same invocation produces byte-identical output.
//! Exit codes: 0 on success, 1 on a runtime error (bad input data, limit
//! exceeded), 2 on a usage error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::line::{closed_form_capacity, LineNetwork, Schedule};
use crate::punctured::{
    enumerate_primitive, enumerate_punctured, lower_bound_certificate, PuncturedSet,
};
use crate::rational::ExtRational;
use crate::routing::{reduction, CapGraph, Cnf, DEFAULT_MAX_VISITS};
use crate::scheduler::{build_pipeline, rationalize_real, GroupedSchedule, DEFAULT_DENOMINATOR};
use crate::verify::{certify_schedule_optimal, min_cut_exhaustive_with_limit, Certificate};

#[derive(Parser, Debug)]
#[command(
    name = "hdline",
    version,
    about = "Capacities, optimal simple schedules, and hardness gadgets for half-duplex line networks"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit compact JSON (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Emit plain text instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    table: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Approximate capacity of a line network (exact on rational links).
    Capacity(NetworkArgs),
    /// Optimal simple schedule, built by interval coloring.
    Schedule(NetworkArgs),
    /// Certify a schedule's rate against the cut upper bound.
    Verify {
        #[command(flatten)]
        net: NetworkArgs,
        /// Schedule to certify, as JSON; defaults to the built one.
        #[arg(long, value_name = "FILE")]
        schedule_file: Option<PathBuf>,
        /// Also scan all 2^N cuts, refusing above this relay count.
        #[arg(long, value_name = "N")]
        max_exhaustive: Option<usize>,
    },
    /// Enumerate primitive punctured subsets of an integer interval.
    Punctured {
        /// Left end of the interval.
        #[arg(long, default_value_t = 1)]
        a: i64,
        /// Right end of the interval.
        #[arg(long)]
        b: i64,
        /// List all punctured subsets, not only the primitive ones.
        #[arg(long)]
        all: bool,
        /// Report the count without the sets themselves.
        #[arg(long)]
        count_only: bool,
    },
    /// Certify the exponential growth of the primitive-set count.
    LowerBound {
        /// Number of relays.
        #[arg(long)]
        relays: usize,
    },
    /// Best half-duplex simple path in a capacitated digraph.
    Route {
        /// Graph JSON: {"source","dest","edges":[["u","v","cap"],..]}.
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
        /// Bound on search steps before giving up.
        #[arg(long, default_value_t = DEFAULT_MAX_VISITS)]
        max_visits: usize,
    },
    /// Build the routing-hardness graphs for a 3SAT formula.
    #[command(name = "reduce-3sat")]
    Reduce3Sat {
        /// Formula in DIMACS CNF format.
        #[arg(long, value_name = "FILE")]
        dimacs: PathBuf,
        /// Capacity level of an honest traversal.
        #[arg(long, default_value = "1")]
        z: ExtRational,
    },
    /// Cross-check the reduction against a truth table.
    CheckReduction {
        /// Formula in DIMACS CNF format.
        #[arg(long, value_name = "FILE")]
        dimacs: PathBuf,
        /// Capacity level of an honest traversal.
        #[arg(long, default_value = "1")]
        z: ExtRational,
        /// Refuse the truth table above this variable count.
        #[arg(long, default_value_t = 20)]
        max_vars: usize,
        /// Bound on search steps before giving up.
        #[arg(long, default_value_t = DEFAULT_MAX_VISITS)]
        max_visits: usize,
    },
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("input").required(true).args(["links", "links_file", "real"])))]
struct NetworkArgs {
    /// Comma-separated rational capacities, e.g. "2,2,3,1" or "1/2,3,inf".
    #[arg(long, value_name = "LIST")]
    links: Option<String>,
    /// Network JSON file: {"links":["2","2","3","1"]}.
    #[arg(long, value_name = "FILE")]
    links_file: Option<PathBuf>,
    /// Comma-separated real capacities, truncated to rationals first.
    #[arg(long, value_name = "LIST")]
    real: Option<String>,
    /// Denominator used to truncate --real capacities.
    #[arg(long, value_name = "D", default_value_t = DEFAULT_DENOMINATOR)]
    denominator: u64,
}

impl NetworkArgs {
    /// The network to operate on, and the truncation error bound when the
    /// input was real-valued.
    fn resolve(&self) -> Result<(LineNetwork, Option<ExtRational>)> {
        match (&self.links, &self.links_file, &self.real) {
            (Some(list), None, None) => Ok((LineNetwork::parse_links(list)?, None)),
            (None, Some(path), None) => {
                let text = read(path)?;
                let net = serde_json::from_str(&text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                Ok((net, None))
            }
            (None, None, Some(list)) => {
                let floats = parse_float_list(list)?;
                let (net, eps) = rationalize_real(&floats, self.denominator)?;
                Ok((net, Some(ExtRational::from_ratio(eps)?)))
            }
            _ => Err(Error::Parse(
                "provide exactly one of --links, --links-file, --real".into(),
            )),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_float_list(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad real capacity {tok:?}: {e}")))
        })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Internal(e.to_string()))
}

#[derive(Serialize)]
struct CapacityPayload {
    capacity: ExtRational,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<ExtRational>,
}

#[derive(Serialize)]
struct SchedulePayload<'a> {
    rate: &'a ExtRational,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<ExtRational>,
    schedule: &'a GroupedSchedule,
}

#[derive(Serialize)]
struct VerifyPayload {
    #[serde(flatten)]
    certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhaustive_bound: Option<ExtRational>,
}

#[derive(Serialize)]
struct PuncturedPayload {
    a: i64,
    b: i64,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    sets: Option<Vec<Vec<i64>>>,
}

#[derive(Serialize)]
struct RoutePayload {
    capacity: Option<ExtRational>,
    path: Option<Vec<String>>,
}

fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Capacity(args) => {
            let (net, epsilon) = args.resolve()?;
            let capacity = closed_form_capacity(&net);
            if cli.table {
                let mut out = format!("capacity: {capacity}");
                if let Some(eps) = epsilon {
                    out.push_str(&format!("\ntruncation error bound: {eps}"));
                }
                Ok(out)
            } else {
                to_json(&CapacityPayload { capacity, epsilon })
            }
        }
        Command::Schedule(args) => {
            let (net, epsilon) = args.resolve()?;
            let pipeline = build_pipeline(&net)?;
            if cli.table {
                let mut out = format!("rate: {}\nstate  weight  colors", pipeline.rate);
                for g in &pipeline.grouped.groups {
                    out.push_str(&format!(
                        "\n{}  {}  [{}:{}]",
                        g.state, g.weight, g.color_lo, g.color_hi
                    ));
                }
                if let Some(eps) = epsilon {
                    out.push_str(&format!("\ntruncation error bound: {eps}"));
                }
                Ok(out)
            } else {
                to_json(&SchedulePayload {
                    rate: &pipeline.rate,
                    epsilon,
                    schedule: &pipeline.grouped,
                })
            }
        }
        Command::Verify {
            net,
            schedule_file,
            max_exhaustive,
        } => {
            let (network, _) = net.resolve()?;
            let schedule: Schedule = match schedule_file {
                Some(path) => {
                    let text = read(path)?;
                    serde_json::from_str(&text)
                        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
                }
                None => build_pipeline(&network)?.schedule,
            };
            let certificate = certify_schedule_optimal(&schedule, &network)?;
            let exhaustive_bound = match max_exhaustive {
                Some(limit) => {
                    let (bound, _) = min_cut_exhaustive_with_limit(&schedule, &network, *limit)?;
                    Some(bound)
                }
                None => None,
            };
            if cli.table {
                let mut out = format!(
                    "rate: {}\nbound: {}\noptimal: {}\nbottleneck link: {}",
                    certificate.rate, certificate.bound, certificate.optimal, certificate.bottleneck
                );
                if let Some(b) = exhaustive_bound {
                    out.push_str(&format!("\nexhaustive cut bound: {b}"));
                }
                Ok(out)
            } else {
                to_json(&VerifyPayload {
                    certificate,
                    exhaustive_bound,
                })
            }
        }
        Command::Punctured {
            a,
            b,
            all,
            count_only,
        } => {
            let sets: Vec<PuncturedSet> = if *all {
                enumerate_punctured(*a, *b)?
            } else {
                enumerate_primitive(*a, *b)?
            };
            let count = sets.len();
            if cli.table {
                let mut out = format!("count: {count}");
                if !count_only {
                    for s in &sets {
                        let elems: Vec<String> =
                            s.elems().iter().map(|e| e.to_string()).collect();
                        out.push_str(&format!("\n{{{}}}", elems.join(",")));
                    }
                }
                Ok(out)
            } else {
                to_json(&PuncturedPayload {
                    a: *a,
                    b: *b,
                    count,
                    sets: (!count_only)
                        .then(|| sets.iter().map(|s| s.elems().to_vec()).collect()),
                })
            }
        }
        Command::LowerBound { relays } => {
            let report = lower_bound_certificate(*relays)?;
            if cli.table {
                Ok(format!(
                    "relays: {}\nprimitive sets: {}\nbound holds: {}\ngrowth ratio: {}",
                    report.relays, report.enumerated, report.bound_holds, report.growth_ratio
                ))
            } else {
                to_json(&report)
            }
        }
        Command::Route { graph, max_visits } => {
            let text = read(graph)?;
            let g: CapGraph = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", graph.display())))?;
            let best = g.best_path(*max_visits)?;
            if cli.table {
                Ok(match &best {
                    Some(p) => format!("capacity: {}\npath: {}", p.capacity, p.vertices.join(" -> ")),
                    None => "no path".to_string(),
                })
            } else {
                let (capacity, path) = match best {
                    Some(p) => (Some(p.capacity), Some(p.vertices)),
                    None => (None, None),
                };
                to_json(&RoutePayload { capacity, path })
            }
        }
        Command::Reduce3Sat { dimacs, z } => {
            let cnf = Cnf::parse_dimacs(&read(dimacs)?)?;
            let artifacts = reduction::reduce(&cnf, z)?;
            if cli.table {
                Ok(format!(
                    "clauses: {}\nconflicting pairs: {}\nmerged graph: {} vertices, {} edges\nz: {}",
                    cnf.clauses().len(),
                    artifacts.conflicts.len(),
                    artifacts.merged.num_vertices(),
                    artifacts.merged.num_edges(),
                    artifacts.z
                ))
            } else {
                to_json(&artifacts)
            }
        }
        Command::CheckReduction {
            dimacs,
            z,
            max_vars,
            max_visits,
        } => {
            let cnf = Cnf::parse_dimacs(&read(dimacs)?)?;
            let check = reduction::verify_reduction(&cnf, z, *max_vars, *max_visits)?;
            if cli.table {
                Ok(format!(
                    "satisfiable: {}\nbest capacity: {}\ndecision: {}\nagree: {}",
                    check.satisfiable,
                    check
                        .best_capacity
                        .as_ref()
                        .map_or("none".to_string(), |c| c.to_string()),
                    check.decision,
                    check.agree
                ))
            } else {
                to_json(&check)
            }
        }
    }
}

/// Parses the process arguments, runs the command, prints the result.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            println!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
