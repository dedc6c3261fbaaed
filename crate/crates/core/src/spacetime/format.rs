//! Line-oriented text format for configurations.
//!
//! ```text
//! # spacetime-perc configuration v1
//! SEED 42
//! BOX vertices=3 T=1.0000000000000000e0 boundary=periodic-on:0,2 mode=undirected graph=explicit
//! EDGE 0 1
//! COORD 0 0
//! CUT 0 2.5000000000000000e-1
//! BRIDGE 0 1 7.5000000000000000e-1
//! ```
//!
//! Times are written with 17 significant digits, so a parse of the output
//! reproduces every `f64` exactly. Records the reader does not know are
//! handed back to the caller in order (the chain checkpoint uses this for
//! its `SPIN` and `RNG` records).

use std::fmt::Write as _;

use super::{Boundary, Bridge, Configuration, SpaceTimeBox};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const HEADER: &str = "# spacetime-perc configuration v1";

pub fn fmt_time(t: f64) -> String {
    format!("{t:.16e}")
}

fn boundary_token(b: &Boundary) -> String {
    match b {
        Boundary::Free => "free".into(),
        Boundary::PeriodicAll => "periodic".into(),
        Boundary::PeriodicOn(set) => {
            let list: Vec<String> = set.iter().map(|x| x.to_string()).collect();
            format!("periodic-on:{}", list.join(","))
        }
    }
}

pub fn write_configuration(bx: &SpaceTimeBox, config: &Configuration, seed: u64) -> String {
    let mut out = String::new();
    let graph = bx.graph();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "SEED {seed}").unwrap();
    writeln!(
        out,
        "BOX vertices={} T={} boundary={} mode={} graph={}",
        graph.vertex_count(),
        fmt_time(bx.time_length()),
        boundary_token(bx.boundary()),
        if config.is_directed() { "directed" } else { "undirected" },
        if graph.is_complete() { "complete" } else { "explicit" },
    )
    .unwrap();
    if !graph.is_complete() {
        for (x, y) in graph.edges() {
            writeln!(out, "EDGE {x} {y}").unwrap();
        }
    }
    if let Some(coords) = graph.coordinates() {
        for (x, c) in coords.iter().enumerate() {
            let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            writeln!(out, "COORD {x} {}", parts.join(" ")).unwrap();
        }
    }
    for (x, line) in config.cuts().iter().enumerate() {
        for &t in line {
            writeln!(out, "CUT {x} {}", fmt_time(t)).unwrap();
        }
    }
    for b in config.bridges() {
        writeln!(out, "BRIDGE {} {} {}", b.from, b.to, fmt_time(b.time)).unwrap();
    }
    out
}

/// Result of parsing a configuration file.
#[derive(Debug, Clone)]
pub struct ParsedConfiguration {
    pub bx: SpaceTimeBox,
    pub config: Configuration,
    pub seed: u64,
    /// Unrecognised records as `(line number, line)`.
    pub extra: Vec<(usize, String)>,
}

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub(crate) fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what}")))
}

pub fn read_configuration(text: &str) -> Result<ParsedConfiguration> {
    let mut seed = None;
    let mut header: Option<(usize, f64, Boundary, bool, bool)> = None;
    let mut edges = Vec::new();
    let mut coords: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut cut_records = Vec::new();
    let mut bridges = Vec::new();
    let mut extra = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next().unwrap() {
            "SEED" => seed = Some(field::<u64>(toks.next(), ln, "seed")?),
            "BOX" => {
                let (mut n, mut t, mut boundary, mut directed, mut complete) = (None, None, None, false, false);
                for tok in toks {
                    let (k, v) = tok.split_once('=').ok_or_else(|| parse_err(ln, format!("bad BOX field `{tok}`")))?;
                    match k {
                        "vertices" => n = Some(field::<usize>(Some(v), ln, "vertex count")?),
                        "T" => t = Some(field::<f64>(Some(v), ln, "time length")?),
                        "boundary" => {
                            boundary = Some(match v {
                                "free" => Boundary::Free,
                                "periodic" => Boundary::PeriodicAll,
                                _ => {
                                    let list = v
                                        .strip_prefix("periodic-on:")
                                        .ok_or_else(|| parse_err(ln, format!("bad boundary `{v}`")))?;
                                    let set = list
                                        .split(',')
                                        .filter(|s| !s.is_empty())
                                        .map(|s| field::<usize>(Some(s), ln, "periodic vertex"))
                                        .collect::<Result<Vec<_>>>()?;
                                    Boundary::periodic_on(set)
                                }
                            })
                        }
                        "mode" => {
                            directed = match v {
                                "directed" => true,
                                "undirected" => false,
                                _ => return Err(parse_err(ln, format!("bad mode `{v}`"))),
                            }
                        }
                        "graph" => {
                            complete = match v {
                                "complete" => true,
                                "explicit" => false,
                                _ => return Err(parse_err(ln, format!("bad graph kind `{v}`"))),
                            }
                        }
                        _ => return Err(parse_err(ln, format!("unknown BOX field `{k}`"))),
                    }
                }
                header = Some((
                    n.ok_or_else(|| parse_err(ln, "BOX lacks vertices"))?,
                    t.ok_or_else(|| parse_err(ln, "BOX lacks T"))?,
                    boundary.unwrap_or(Boundary::Free),
                    directed,
                    complete,
                ));
            }
            "EDGE" => edges.push((field(toks.next(), ln, "edge endpoint")?, field(toks.next(), ln, "edge endpoint")?)),
            "COORD" => {
                let x = field::<usize>(toks.next(), ln, "vertex")?;
                let c = toks.map(|s| field::<i64>(Some(s), ln, "coordinate")).collect::<Result<Vec<_>>>()?;
                coords.push((x, c));
            }
            "CUT" => cut_records.push((ln, field::<usize>(toks.next(), ln, "vertex")?, field::<f64>(toks.next(), ln, "time")?)),
            "BRIDGE" => bridges.push(Bridge {
                from: field(toks.next(), ln, "bridge endpoint")?,
                to: field(toks.next(), ln, "bridge endpoint")?,
                time: field(toks.next(), ln, "time")?,
            }),
            _ => extra.push((ln, line.to_string())),
        }
    }
    let (n, t, boundary, directed, complete) = header.ok_or_else(|| parse_err(0, "missing BOX record"))?;
    let mut graph = if complete { Graph::complete(n)? } else { Graph::new(n, &edges)? };
    if !coords.is_empty() {
        coords.sort_by_key(|(x, _)| *x);
        graph = graph.with_coordinates(coords.into_iter().map(|(_, c)| c).collect())?;
    }
    let bx = SpaceTimeBox::new(graph, t, boundary)?;
    let mut cuts = vec![Vec::new(); n];
    for (ln, x, time) in cut_records {
        cuts.get_mut(x).ok_or_else(|| parse_err(ln, format!("cut on unknown vertex {x}")))?.push(time);
    }
    let config = Configuration::new(&bx, cuts, bridges, directed)?;
    Ok(ParsedConfiguration { bx, config, seed: seed.ok_or_else(|| parse_err(0, "missing SEED record"))?, extra })
}
