//! The `chancalc` command line.
//!
//! Every command reads a model from `--model <file>` or `--example <name>` and
//! writes canonical JSON to stdout, or an aligned decimal table with
//! `--format table`. Exit codes: 0 success, 1 invalid input, 2 inference failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::causal::{counterfactual_channel, do_channel, front_door_do, intervene, CounterfactualSpec, InterventionSpec};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::inference::{impossible_rows, infer_channel, jeffrey_update, QuerySpec};
use crate::kernel::{FiniteSpace, Scalar, SubDist};
use crate::nestedq::{coord_agent, Agent};
use crate::netmodel::{builtin_example, max_joint_from_env, parse_network, Builtin, NetworkSpec, BUILTIN_NAMES};

const TABLE_DIGITS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "chancalc", version, about = "Exact inference with discrete probabilistic channels")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Source {
    /// Model file (JSON).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Built-in example name.
    #[arg(long, conflicts_with = "model")]
    example: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a model.
    Validate {
        /// Model file; alternative to --model.
        path: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
    },
    /// Joint distribution over some nodes.
    Joint {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<String>,
        /// Intervention spec (JSON) applied before the query.
        #[arg(long)]
        intervention: Option<PathBuf>,
    },
    /// Conditional channel from evidence nodes to target nodes.
    Infer {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',')]
        evidence: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        /// Intervention spec (JSON) applied before the query.
        #[arg(long)]
        intervention: Option<PathBuf>,
        /// Soft evidence (JSON object from evidence keys to weights) for a Jeffrey update.
        #[arg(long)]
        soft: Option<PathBuf>,
    },
    /// Interventional channel; on a bare joint, the front-door adjustment.
    Do {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        cause: Option<String>,
        #[arg(long)]
        effect: Option<String>,
    },
    /// Counterfactual channel through a twin network.
    Counterfactual {
        #[command(flatten)]
        source: Source,
        /// Counterfactual assignments `NODE=label`.
        #[arg(long, value_delimiter = ',')]
        force: Vec<String>,
        /// Observed factual nodes.
        #[arg(long, value_delimiter = ',')]
        observe: Vec<String>,
        /// Counterfactual target nodes (`Y` or `Y'`).
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        /// Shared exogenous nodes; all exogenous nodes by default.
        #[arg(long, value_delimiter = ',')]
        shared: Option<Vec<String>>,
    },
    /// Coordination-game agent at a given depth.
    Coord {
        /// Location distribution, e.g. `a=3/5,b=2/5`.
        #[arg(long)]
        location: String,
        #[arg(long, value_parser = ["alice", "bob"])]
        agent: String,
        #[arg(long)]
        depth: usize,
    },
    /// List built-in examples, or print one as a model file.
    Examples {
        #[arg(long)]
        name: Option<String>,
    },
}

/// Runs the command line on `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = writeln!(out, "{text}");
            0
        }
        Err(e) => {
            let _ = match cli.format {
                Format::Json => writeln!(err, "{}", json!({"error": {"kind": e.kind(), "message": e.to_string()}})),
                Format::Table => writeln!(err, "error: {e}"),
            };
            e.exit_code()
        }
    }
}

enum Loaded {
    Network(NetworkSpec),
    Joint(Channel),
}

fn load(source: &Source) -> Result<Loaded> {
    let limit = max_joint_from_env()?;
    match (&source.model, &source.example) {
        (Some(path), None) => Ok(Loaded::Network(read_model(path)?.with_max_joint(limit))),
        (None, Some(name)) => Ok(match builtin_example(name)? {
            Builtin::Network(n) => Loaded::Network(n.with_max_joint(limit)),
            Builtin::Joint(j) => Loaded::Joint(j),
        }),
        _ => Err(Error::Invalid("give exactly one of --model or --example".into())),
    }
}

fn read_model(path: &PathBuf) -> Result<NetworkSpec> {
    parse_network(&read(path)?)
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn read_json(path: &PathBuf) -> Result<Value> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Model(format!("{}: invalid JSON: {e}", path.display())))
}

fn network(source: &Source) -> Result<NetworkSpec> {
    match load(source)? {
        Loaded::Network(n) => Ok(n),
        Loaded::Joint(_) => Err(Error::Invalid("this command needs a network, not a bare joint".into())),
    }
}

fn with_intervention(net: NetworkSpec, path: &Option<PathBuf>) -> Result<NetworkSpec> {
    match path {
        None => Ok(net),
        Some(p) => {
            let iv = InterventionSpec::from_json(&read_json(p)?, &net)?;
            intervene(&net, &iv)
        }
    }
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn execute(cli: &Cli) -> Result<String> {
    let fmt = cli.format;
    match &cli.command {
        Command::Validate { path, source } => {
            let net = match (path, &source.model, &source.example) {
                (Some(p), None, None) => read_model(p)?,
                (None, _, _) => network(source)?,
                _ => return Err(Error::Invalid("give the model either as a path or with --model/--example".into())),
            };
            Ok(match fmt {
                Format::Json => json!({"valid": true, "nodes": net.node_names()}).to_string(),
                Format::Table => format!("valid: {} nodes ({})", net.nodes().len(), net.node_names().join(", ")),
            })
        }
        Command::Joint {
            source,
            keep,
            intervention,
        } => {
            let ch = match load(source)? {
                Loaded::Network(n) => with_intervention(n, intervention)?.joint_channel(&strs(keep))?,
                Loaded::Joint(j) => {
                    let pos = keep
                        .iter()
                        .map(|k| {
                            j.outputs()
                                .iter()
                                .position(|s| s.name() == k)
                                .ok_or_else(|| Error::UnknownNode(k.clone()))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    j.marginal(&pos)?
                }
            };
            Ok(render_channel(&ch, fmt, &[]))
        }
        Command::Infer {
            source,
            evidence,
            target,
            intervention,
            soft,
        } => {
            let net = with_intervention(network(source)?, intervention)?;
            let q = QuerySpec {
                evidence: evidence.clone(),
                target: target.clone(),
            };
            match soft {
                None => {
                    let ch = infer_channel(&net, &q)?;
                    Ok(render_channel(&ch, fmt, &impossible_rows(&ch)))
                }
                Some(p) => {
                    let ch = infer_channel(&net, &q)?;
                    let ev_space = FiniteSpace::product(&ch.inputs()[ch.inputs().len() - evidence.len()..]);
                    let soft = soft_evidence(&read_json(p)?, &ev_space)?;
                    let up = jeffrey_update(&net, &q, &soft)?;
                    let state = Channel::joint_state(ch.outputs().to_vec(), up.posterior.weights().to_vec())?;
                    let mut text = render_channel(&state, fmt, &[]);
                    if fmt == Format::Json {
                        let mut v: Value = serde_json::from_str(&text).expect("own JSON");
                        v["lost_mass"] = Value::String(up.lost_mass.to_string());
                        text = v.to_string();
                    } else if !up.lost_mass.is_zero() {
                        text.push_str(&format!("\nlost mass: {}", up.lost_mass.to_significant(TABLE_DIGITS)));
                    }
                    Ok(text)
                }
            }
        }
        Command::Do { source, cause, effect } => {
            let ch = match load(source)? {
                Loaded::Joint(j) => front_door_do(&j)?,
                Loaded::Network(n) => {
                    let (Some(c), Some(e)) = (cause, effect) else {
                        return Err(Error::Invalid("do on a network needs --cause and --effect".into()));
                    };
                    do_channel(&n, c, e)?
                }
            };
            Ok(render_channel(&ch, fmt, &[]))
        }
        Command::Counterfactual {
            source,
            force,
            observe,
            target,
            shared,
        } => {
            let net = network(source)?;
            let forced = force
                .iter()
                .map(|f| {
                    f.split_once('=')
                        .map(|(n, v)| (n.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| Error::Invalid(format!("--force expects NODE=label, got `{f}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let shared = match shared {
                Some(s) => s.clone(),
                None => net.nodes().iter().filter(|n| n.exogenous).map(|n| n.name.clone()).collect(),
            };
            let cf = CounterfactualSpec {
                shared,
                forced,
                observed: observe.clone(),
                cf_target: target.clone(),
            };
            let ch = counterfactual_channel(&net, &cf)?;
            Ok(render_channel(&ch, fmt, &impossible_rows(&ch)))
        }
        Command::Coord { location, agent, depth } => {
            let loc = parse_location(location)?;
            let agent: Agent = agent.parse()?;
            let d = coord_agent(&loc, agent, *depth)?;
            Ok(render_channel(&Channel::from_state(&d), fmt, &[]))
        }
        Command::Examples { name } => match name {
            None => Ok(match fmt {
                Format::Json => json!(BUILTIN_NAMES).to_string(),
                Format::Table => BUILTIN_NAMES.join("\n"),
            }),
            Some(n) => Ok(match builtin_example(n)? {
                Builtin::Network(net) => net.to_json_string(),
                Builtin::Joint(j) => {
                    let spaces: Map<String, Value> = j
                        .outputs()
                        .iter()
                        .map(|s| (s.name().to_string(), json!(s.elements())))
                        .collect();
                    serde_json::to_string_pretty(&json!({"spaces": spaces, "joint": j.to_json()})).expect("JSON")
                }
            }),
        },
    }
}

/// `a=3/5,b=2/5` as a distribution on a space `L` with those labels in order.
fn parse_location(text: &str) -> Result<SubDist> {
    let mut labels = vec![];
    let mut weights = vec![];
    for part in text.split(',') {
        let (l, w) = part
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("location entries look like label=weight, got `{part}`")))?;
        labels.push(l.trim().to_string());
        weights.push(w.trim().parse::<Scalar>()?);
    }
    let space = FiniteSpace::new("L", &labels)?;
    let d = SubDist::from_weights(&space, weights)?;
    if !d.is_proper() {
        return Err(Error::NotTotal {
            context: "location".into(),
            mass: d.weight(),
        });
    }
    Ok(d)
}

fn soft_evidence(v: &Value, space: &FiniteSpace) -> Result<SubDist> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Model("soft evidence must map evidence keys to weights".into()))?;
    let pairs = obj
        .iter()
        .map(|(k, w)| Ok((k.as_str(), crate::channel::scalar_from_json(w)?)))
        .collect::<Result<Vec<_>>>()?;
    SubDist::new(space, &pairs)
}

/// Canonical channel JSON, with the impossible evidence rows listed when there are any;
/// or a decimal table.
fn render_channel(ch: &Channel, fmt: Format, impossible: &[String]) -> String {
    match fmt {
        Format::Json => {
            let mut v = ch.to_json();
            if !impossible.is_empty() {
                v["impossible"] = json!(impossible);
            }
            v.to_string()
        }
        Format::Table => {
            let mut text = decimal_table(ch);
            if !impossible.is_empty() {
                text.push_str(&format!("\nimpossible evidence: {}", impossible.join("; ")));
            }
            text
        }
    }
}

/// Rows are input tuples, columns output tuples, entries at four significant digits.
pub fn decimal_table(ch: &Channel) -> String {
    let corner = ch.inputs().iter().map(FiniteSpace::name).collect::<Vec<_>>().join(",");
    let mut grid: Vec<Vec<String>> = vec![];
    let mut header = vec![corner];
    header.extend((0..ch.n_cols()).map(|c| ch.output_key(c)));
    grid.push(header);
    for r in 0..ch.n_rows() {
        let mut line = vec![ch.input_key(r)];
        line.extend(ch.row(r).iter().map(|w| w.to_significant(TABLE_DIGITS)));
        grid.push(line);
    }
    let widths: Vec<usize> = (0..grid[0].len())
        .map(|c| grid.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
        .collect();
    grid.iter()
        .map(|l| {
            l.iter()
                .enumerate()
                .map(|(c, cell)| {
                    if c == 0 {
                        format!("{cell:<w$}", w = widths[c])
                    } else {
                        format!("{cell:>w$}", w = widths[c])
                    }
                })
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}
