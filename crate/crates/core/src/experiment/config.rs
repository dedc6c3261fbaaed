use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::kinds::{Branching, EntanglementSweep, MeanfieldGiant, QuantumValidate, RadiusCurves, RcChainRun};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spacetime::Boundary;

/// Every experiment kind, as written in the `kind` field.
pub const KINDS: [&str; 7] =
    ["percolation-decay", "contact", "rc-chain", "quantum-validate", "entanglement-sweep", "meanfield-giant", "branching"];

/// Kind-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Experiment {
    PercolationDecay(RadiusCurves),
    Contact(RadiusCurves),
    RcChain(RcChainRun),
    QuantumValidate(QuantumValidate),
    EntanglementSweep(EntanglementSweep),
    MeanfieldGiant(MeanfieldGiant),
    Branching(Branching),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::PercolationDecay(_) => KINDS[0],
            Experiment::Contact(_) => KINDS[1],
            Experiment::RcChain(_) => KINDS[2],
            Experiment::QuantumValidate(_) => KINDS[3],
            Experiment::EntanglementSweep(_) => KINDS[4],
            Experiment::MeanfieldGiant(_) => KINDS[5],
            Experiment::Branching(_) => KINDS[6],
        }
    }
}

/// A parsed experiment file.
///
/// ```toml
/// kind = "branching"
/// seed = 7
/// out = "results/branching"   # optional
///
/// [params]
/// beta = 1.0
/// lambdas = [0.0, 2.0]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: Option<String>,
    pub experiment: Experiment,
    /// The file as given, echoed into the manifest.
    pub source: String,
}

fn params<T: DeserializeOwned>(value: toml::Value, kind: &str) -> Result<T> {
    value.try_into().map_err(|e: toml::de::Error| Error::invalid(format!("[params] for `{kind}`: {}", e.message())))
}

impl ExperimentConfig {
    /// Parses a config; `kind` and `seed` may come from the caller instead
    /// of the file (command-line subcommand and `--seed`).
    pub fn parse(text: &str, kind: Option<&str>, seed: Option<u64>) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::invalid(format!("config: {}", e.message())))?;
        for key in table.keys() {
            if !["kind", "seed", "out", "params"].contains(&key.as_str()) {
                return Err(Error::invalid(format!("config: unknown top-level key `{key}`")));
            }
        }
        let file_kind = table.get("kind").map(|v| v.as_str().ok_or_else(|| Error::invalid("config: `kind` must be a string"))).transpose()?;
        let kind = match (kind, file_kind) {
            (Some(a), Some(b)) if a != b => return Err(Error::invalid(format!("config is for `{b}`, not `{a}`"))),
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(Error::invalid(format!("config: missing `kind` (one of {})", KINDS.join(", ")))),
        };
        let file_seed = match table.get("seed") {
            Some(toml::Value::Integer(s)) if *s >= 0 => Some(*s as u64),
            Some(_) => return Err(Error::invalid("config: `seed` must be a nonnegative integer")),
            None => None,
        };
        let seed = seed.or(file_seed).ok_or_else(|| Error::invalid("a seed is required: set `seed` in the config or pass --seed"))?;
        let out = table.get("out").and_then(|v| v.as_str()).map(str::to_owned);
        let p = table.get("params").cloned().unwrap_or_else(|| toml::Value::Table(toml::Table::new()));
        let experiment = match kind {
            "percolation-decay" => Experiment::PercolationDecay(params(p, kind)?),
            "contact" => Experiment::Contact(params(p, kind)?),
            "rc-chain" => Experiment::RcChain(params(p, kind)?),
            "quantum-validate" => Experiment::QuantumValidate(params(p, kind)?),
            "entanglement-sweep" => Experiment::EntanglementSweep(params(p, kind)?),
            "meanfield-giant" => Experiment::MeanfieldGiant(params(p, kind)?),
            "branching" => Experiment::Branching(params(p, kind)?),
            other => return Err(Error::UnknownExperiment(format!("{other}` (expected one of {})", KINDS.join(", ")))),
        };
        Ok(ExperimentConfig { seed, out, experiment, source: text.to_owned() })
    }
}

/// Graph descriptor: `single`, `path:N`, `cycle:N`, `complete:N` or
/// `lattice:D,R` (the box `[-R, R]^D`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GraphSpec {
    Single,
    Path(usize),
    Cycle(usize),
    Complete(usize),
    Lattice(usize, usize),
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        match *self {
            GraphSpec::Single => Ok(Graph::single_vertex()),
            GraphSpec::Path(n) => Graph::path(n),
            GraphSpec::Cycle(n) => Graph::cycle(n),
            GraphSpec::Complete(n) => Graph::complete(n),
            GraphSpec::Lattice(d, r) => Graph::lattice_box(d, r),
        }
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("bad graph `{s}` (use single, path:N, cycle:N, complete:N or lattice:D,R)"));
        if s == "single" {
            return Ok(GraphSpec::Single);
        }
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        match name {
            "path" => Ok(GraphSpec::Path(num(arg)?)),
            "cycle" => Ok(GraphSpec::Cycle(num(arg)?)),
            "complete" => Ok(GraphSpec::Complete(num(arg)?)),
            "lattice" => {
                let (d, r) = arg.split_once(',').ok_or_else(bad)?;
                Ok(GraphSpec::Lattice(num(d)?, num(r)?))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Single => write!(f, "single"),
            GraphSpec::Path(n) => write!(f, "path:{n}"),
            GraphSpec::Cycle(n) => write!(f, "cycle:{n}"),
            GraphSpec::Complete(n) => write!(f, "complete:{n}"),
            GraphSpec::Lattice(d, r) => write!(f, "lattice:{d},{r}"),
        }
    }
}

impl TryFrom<String> for GraphSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GraphSpec> for String {
    fn from(g: GraphSpec) -> String {
        g.to_string()
    }
}

/// `free`, `periodic` or `periodic-on:a,b,...`.
pub fn parse_boundary(s: &str) -> Result<Boundary> {
    match s {
        "free" => Ok(Boundary::Free),
        "periodic" => Ok(Boundary::PeriodicAll),
        _ => {
            let list = s
                .strip_prefix("periodic-on:")
                .ok_or_else(|| Error::invalid(format!("bad boundary `{s}` (use free, periodic or periodic-on:a,b)")))?;
            let set = list
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| t.trim().parse::<usize>().map_err(|_| Error::invalid(format!("bad vertex `{t}` in boundary"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(Boundary::periodic_on(set))
        }
    }
}
