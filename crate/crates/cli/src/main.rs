// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! `slick`: build, encode, decode and forward packets over forwarding
//! subgraphs, sweep header sizes, evaluate failure-reaction stretch, and
//! print FS size bounds.
//!
//! Exit status: 0 success or delivered, 1 dropped, 2 usage error, 3 data
//! error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use slick_core::bits::parse_hex;
use slick_core::bounds::{lower_bound, witness_unweighted, witness_weighted, BoundResult};
use slick_core::codec::{
    decode_default, decode_direct_step, encode_default, encode_direct, DefaultHeader, DefaultStep, DirectHeader,
    DirectStep, GoldenVector, HeaderFormat,
};
use slick_core::failsim::{
    compute_geometries, horizon, run_eval, sample_triples, write_csv, CsvMeta, SampleCounts, Scheme, TimingParams,
};
use slick_core::forward::{forward_packet, EncodedHeader, FailedSet};
use slick_core::fs::{build_fs, FailureModel, ForwardingSubgraph, SrlgGroups};
use slick_core::sizes::{select_pairs, sweep_sizes, write_sizes_csv};
use slick_core::topology::{load_topology, EdgeListOptions};
use slick_core::{Latency, NodeId, Topology};

#[derive(Parser)]
#[command(name = "slick", version, about = "Source routing with embedded alternate paths")]
struct Cli {
    /// Topology edge list: `src dst [latency_ms]` per line.
    #[arg(long, global = true)]
    topo: Option<PathBuf>,
    /// Add the reverse of every link that has no explicit reverse line.
    #[arg(long, global = true)]
    undirected: bool,
    /// Seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Header format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Default)]
    format: FormatArg,
    /// Timing preset for stretch evaluation.
    #[arg(long, global = true, default_value = "sprint")]
    preset: String,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Default,
    Direct,
}

impl From<FormatArg> for HeaderFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Default => HeaderFormat::Default,
            FormatArg::Direct => HeaderFormat::Direct,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Link,
    Node,
    Srlg,
}

#[derive(Subcommand)]
enum Command {
    /// Build the forwarding subgraph for a pair and print it.
    Fs {
        src: u32,
        dst: u32,
        /// Failure each alternate protects against.
        #[arg(long, value_enum, default_value_t = ModelArg::Link)]
        model: ModelArg,
        /// Risk groups, one per line as `src-dst` tokens. Needed for `--model srlg`.
        #[arg(long)]
        srlg: Option<PathBuf>,
    },
    /// Encode a pair's header and print it as a golden-vector record.
    Encode { src: u32, dst: u32 },
    /// Decode a header as printed by `encode` (hex, leading format tag byte)
    /// and show the forwarding step a router takes on it.
    Decode {
        hex: String,
        /// Router holding the packet.
        #[arg(long, default_value_t = 0)]
        at: u32,
    },
    /// Forward a packet and print its trace. Exits 1 if it is dropped.
    Trace {
        src: u32,
        dst: u32,
        /// Failed element: `a-b` for the directed link a -> b, a bare id for a node.
        #[arg(long = "fail", value_name = "TOKEN")]
        fail: Vec<String>,
    },
    /// Batch evaluations writing CSV.
    Eval {
        #[command(subcommand)]
        what: Eval,
    },
    /// Print the FS size lower bounds for a primary of `k` hops.
    Bounds {
        k: i64,
        /// Write the witness graph as an edge list.
        #[arg(long, value_name = "PATH")]
        emit_graph: Option<PathBuf>,
        /// Emit the unit-latency witness instead of the weighted one.
        #[arg(long)]
        unweighted: bool,
    },
}

#[derive(Subcommand)]
enum Eval {
    /// Header sizes, FS edge counts and lower bounds per pair.
    Sizes {
        /// Evaluate all pairs up to this many nodes, sample above it.
        #[arg(long, default_value_t = 1000)]
        threshold: usize,
        /// Pairs to sample above the threshold.
        #[arg(long, default_value_t = 100_000)]
        sample: usize,
    },
    /// Mean and maximum stretch per scheme against packet generation time.
    Stretch {
        /// Schemes to evaluate, comma separated: flooded-sp, fast-sp, e2e-sp,
        /// fast-vsr, ideal-safeguard, ideal-ncr. All by default.
        #[arg(long, value_delimiter = ',')]
        schemes: Vec<Scheme>,
        #[arg(long, default_value_t = SampleCounts::default().links)]
        links: usize,
        #[arg(long, default_value_t = SampleCounts::default().sources)]
        sources: usize,
        #[arg(long, default_value_t = SampleCounts::default().destinations)]
        destinations: usize,
        /// Candidate sources tried per failed link.
        #[arg(long, default_value_t = SampleCounts::default().source_attempts)]
        source_attempts: usize,
        /// Failure time in ms, overriding the preset.
        #[arg(long)]
        t0: Option<Latency>,
        /// FIB update delay in ms, overriding the preset.
        #[arg(long)]
        fib_delay: Option<Latency>,
        /// Per-hop control processing delay in ms, overriding the preset.
        #[arg(long)]
        hop_delay: Option<Latency>,
        /// Packet generation interval in ms, overriding the preset.
        #[arg(long)]
        gen_interval: Option<Latency>,
        /// Last generation time in ms. Defaults to when every scheme has settled.
        #[arg(long)]
        until: Option<Latency>,
    },
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.into())
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn topology(cli: &Cli) -> Result<(Topology, String), Failure> {
    let path = cli.topo.as_ref().ok_or_else(|| Failure::Usage("--topo is required for this command".into()))?;
    let topo = load_topology(path, EdgeListOptions { undirected: cli.undirected })
        .with_context(|| format!("cannot load {}", path.display()))?;
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    Ok((topo, name))
}

fn node(topo: &Topology, id: u32) -> Result<NodeId, Failure> {
    let n = NodeId(id);
    topo.check_node(n).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(n)
}

fn pair(topo: &Topology, src: u32, dst: u32) -> Result<(NodeId, NodeId), Failure> {
    Ok((node(topo, src)?, node(topo, dst)?))
}

fn single_link_fs(topo: &Topology, s: NodeId, d: NodeId) -> Result<ForwardingSubgraph, Failure> {
    Ok(build_fs(topo, s, d, &FailureModel::SingleLink).map_err(anyhow::Error::from)?)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Fs { src, dst, model, srlg } => cmd_fs(cli, *src, *dst, *model, srlg.as_deref()),
        Command::Encode { src, dst } => cmd_encode(cli, *src, *dst),
        Command::Decode { hex, at } => cmd_decode(cli, hex, *at),
        Command::Trace { src, dst, fail } => cmd_trace(cli, *src, *dst, fail),
        Command::Eval { what: Eval::Sizes { threshold, sample } } => cmd_sizes(cli, *threshold, *sample),
        Command::Eval { what: stretch @ Eval::Stretch { .. } } => cmd_stretch(cli, stretch),
        Command::Bounds { k, emit_graph, unweighted } => cmd_bounds(cli, *k, emit_graph.as_deref(), *unweighted),
    }
}

fn cmd_fs(cli: &Cli, src: u32, dst: u32, model: ModelArg, srlg: Option<&Path>) -> Outcome {
    let (topo, _) = topology(cli)?;
    let (s, d) = pair(&topo, src, dst)?;
    let model = match (model, srlg) {
        (ModelArg::Link, _) => FailureModel::SingleLink,
        (ModelArg::Node, _) => FailureModel::SingleNode,
        (ModelArg::Srlg, None) => return Err(Failure::Usage("--model srlg needs --srlg".into())),
        (ModelArg::Srlg, Some(p)) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            FailureModel::Srlg(SrlgGroups::parse(&text, &topo).map_err(anyhow::Error::from)?)
        }
    };
    let fs = build_fs(&topo, s, d, &model).map_err(anyhow::Error::from)?;
    let mut out = output(cli.out.as_deref())?;
    out.write_all(fs.dump(&topo).as_bytes())?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_encode(cli: &Cli, src: u32, dst: u32) -> Outcome {
    let (topo, name) = topology(cli)?;
    let (s, d) = pair(&topo, src, dst)?;
    let v = GoldenVector::build(cli.format.into(), &name, &topo, s, d).map_err(anyhow::Error::from)?;
    let mut out = output(cli.out.as_deref())?;
    out.write_all(v.to_text().as_bytes())?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_decode(cli: &Cli, hex: &str, at: u32) -> Outcome {
    let (topo, _) = topology(cli)?;
    let at = node(&topo, at)?;
    let bytes = parse_hex(hex.trim()).ok_or_else(|| Failure::Usage(format!("`{hex}` is not hex")))?;
    let (&tag, body) = bytes.split_first().ok_or_else(|| Failure::Usage("empty header".into()))?;
    let format = HeaderFormat::from_tag(tag).ok_or_else(|| Failure::Usage(format!("unknown format tag {tag:02x}")))?;
    let mut text = format!("format {format}\nat {at}\n");
    match format {
        HeaderFormat::Default => {
            let h = DefaultHeader::from_bytes(body).map_err(anyhow::Error::from)?;
            text.push_str(&format!("bits {}\n", h.bit_len()));
            match decode_default(&h, &topo, at).map_err(anyhow::Error::from)? {
                DefaultStep::AtDestination => text.push_str("step deliver\n"),
                DefaultStep::Alternate(label) => text.push_str(&format!("step alternate label {label}\n")),
                DefaultStep::Primary(seg) => {
                    text.push_str(&format!("step primary label {}\n", seg.primary));
                    let alt: Vec<String> = seg.alt_labels.iter().map(ToString::to_string).collect();
                    text.push_str(&format!("alternate {}\n", if alt.is_empty() { "none".into() } else { alt.join(" ") }));
                    text.push_str(&format!("segment bits {}\n", seg.bit_len));
                }
            }
        }
        HeaderFormat::Direct => {
            let h = DirectHeader::from_bytes(body).map_err(anyhow::Error::from)?;
            text.push_str(&format!("current pointer {}\n", h.current_ptr().map_err(anyhow::Error::from)?));
            match decode_direct_step(&h, &topo, at).map_err(anyhow::Error::from)? {
                DirectStep::Egress => text.push_str("step deliver\n"),
                DirectStep::Node { nd_bits, successors } => {
                    text.push_str(&format!("node descriptor bits {nd_bits}\n"));
                    for s in successors {
                        let next = match (s.next_ptr, s.has_ptr) {
                            (0, _) => "egress".to_string(),
                            (p, true) => format!("next pointer {p}"),
                            (p, false) => format!("next pointer {p} implicit"),
                        };
                        text.push_str(&format!("successor label {} -> {} {next}\n", s.label, topo.link(s.link).dst));
                    }
                }
            }
        }
    }
    let mut out = output(cli.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_trace(cli: &Cli, src: u32, dst: u32, fail: &[String]) -> Outcome {
    let (topo, _) = topology(cli)?;
    let (s, d) = pair(&topo, src, dst)?;
    let tokens: Vec<&str> = fail.iter().flat_map(|f| f.split(',')).map(str::trim).filter(|t| !t.is_empty()).collect();
    let failed = FailedSet::parse(tokens, &topo).map_err(|e| Failure::Usage(e.to_string()))?;
    let fs = single_link_fs(&topo, s, d)?;
    let header = match cli.format {
        FormatArg::Default => EncodedHeader::Default(encode_default(&fs, &topo).map_err(anyhow::Error::from)?),
        FormatArg::Direct => EncodedHeader::Direct(encode_direct(&fs, &topo).map_err(anyhow::Error::from)?),
    };
    let trace = forward_packet(&header, &topo, s, &failed).map_err(anyhow::Error::from)?;
    let mut out = output(cli.out.as_deref())?;
    out.write_all(trace.render(&topo).as_bytes())?;
    out.flush()?;
    Ok(if trace.delivered() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_sizes(cli: &Cli, threshold: usize, sample: usize) -> Outcome {
    let (topo, name) = topology(cli)?;
    let pairs = select_pairs(&topo, threshold, sample, cli.seed);
    let rows = sweep_sizes(&topo, &pairs).map_err(anyhow::Error::from)?;
    let mut out = output(cli.out.as_deref())?;
    write_sizes_csv(&mut out, &name, &rows)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_stretch(cli: &Cli, args: &Eval) -> Outcome {
    let Eval::Stretch {
        schemes,
        links,
        sources,
        destinations,
        source_attempts,
        t0,
        fib_delay,
        hop_delay,
        gen_interval,
        until,
    } = args
    else {
        unreachable!("called for the stretch command only")
    };
    let mut params = TimingParams::preset(&cli.preset).ok_or_else(|| {
        Failure::Usage(format!("unknown preset `{}`; known: {}", cli.preset, TimingParams::PRESET_NAMES.join(", ")))
    })?;
    params.t0 = t0.unwrap_or(params.t0);
    params.fib_delay = fib_delay.unwrap_or(params.fib_delay);
    params.hop_delay = hop_delay.unwrap_or(params.hop_delay);
    params.gen_interval = gen_interval.unwrap_or(params.gen_interval);
    params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let counts = SampleCounts {
        links: *links,
        sources: *sources,
        destinations: *destinations,
        source_attempts: *source_attempts,
    };
    if [counts.links, counts.sources, counts.destinations, counts.source_attempts].contains(&0) {
        return Err(Failure::Usage("sample sizes must be positive".into()));
    }
    let schemes: Vec<Scheme> = if schemes.is_empty() { Scheme::ALL.to_vec() } else { schemes.clone() };

    let (topo, name) = topology(cli)?;
    let triples = sample_triples(&topo, cli.seed, counts).map_err(anyhow::Error::from)?;
    if triples.is_empty() {
        eprintln!("warning: no (link, source, destination) triples found; the CSV has no rows");
    }
    let geoms = compute_geometries(&topo, &triples).map_err(anyhow::Error::from)?;
    let until = until.unwrap_or_else(|| horizon(&geoms, &schemes, &params));
    let series = run_eval(&geoms, &schemes, &params, until).map_err(anyhow::Error::from)?;
    let mut out = output(cli.out.as_deref())?;
    write_csv(&mut out, &CsvMeta { topology: name, seed: Some(cli.seed), params }, &series)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(cli: &Cli, k: i64, emit: Option<&Path>, unweighted: bool) -> Outcome {
    let bounds = BoundResult::new(k).map_err(|e| Failure::Usage(e.to_string()))?;
    let hops = bounds.primary_hops;
    let weighted = witness_weighted(hops).map_err(anyhow::Error::from)?;
    let unit = witness_unweighted(hops).map_err(anyhow::Error::from)?;
    let edges = |w: &slick_core::bounds::Witness| -> Result<usize, Failure> {
        Ok(build_fs(&w.topology, w.source, w.destination, &FailureModel::SingleLink).map_err(anyhow::Error::from)?.edge_count())
    };
    let mut text = format!("k {hops}\n");
    text.push_str(&format!("weighted_bound {}\n", bounds.weighted_bound));
    text.push_str(&format!("unweighted_bound {}\n", bounds.unweighted_bound));
    text.push_str(&format!("weighted_witness_fs_edges {}\n", edges(&weighted)?));
    text.push_str(&format!("unweighted_witness_fs_edges {}\n", edges(&unit)?));
    debug_assert_eq!(lower_bound(k, true).ok(), Some(bounds.weighted_bound));
    if let Some(path) = emit {
        let w = if unweighted { &unit } else { &weighted };
        std::fs::write(path, w.topology.to_edge_list()).with_context(|| format!("cannot write {}", path.display()))?;
        text.push_str(&format!("witness {} -> {} written to {}\n", w.source, w.destination, path.display()));
    }
    let mut out = output(cli.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
