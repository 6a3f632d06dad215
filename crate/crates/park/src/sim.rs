//! Trace replay over files.

use std::fs;
use std::path::{Path, PathBuf};

use smartpark_core::graph::{GraphError, IlaGraph};
use smartpark_core::knowledge::SpecStore;
use smartpark_core::runtime::{Runtime, RuntimeError};

use crate::formats::{parse_store, parse_topology, parse_trace, render_log, render_store, FormatError};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("{file}: {source}")]
    Format { file: String, source: FormatError },
    #[error("{file}: line {line}: unknown node '{node}'")]
    UnknownNode { file: String, line: usize, node: String },
    #[error("topology: {0}")]
    Topology(#[from] GraphError),
    #[error("trace: {0}")]
    Runtime(#[from] RuntimeError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Rendered outputs of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimOutput {
    pub log: String,
    pub store: String,
    pub entered: usize,
    pub exited: usize,
    pub inside: usize,
}

/// Runs a trace over a topology; all arguments are file contents.
///
/// `names` are the topology and trace file names used in error messages.
pub fn simulate_text(
    topology: &str,
    trace: &str,
    store_in: Option<&str>,
    depth: Option<usize>,
    names: (&str, &str),
) -> Result<SimOutput, SimError> {
    let (topo_name, trace_name) = names;
    let topology = parse_topology(topology).map_err(|source| SimError::Format { file: topo_name.into(), source })?;
    let graph = IlaGraph::build_parking(&topology)?;
    let records = parse_trace(trace).map_err(|source| SimError::Format { file: trace_name.into(), source })?;
    for (line, r) in &records {
        if graph.base().vertex(&r.node).is_none() {
            return Err(SimError::UnknownNode { file: trace_name.into(), line: *line, node: r.node.clone() });
        }
    }
    let store = match store_in {
        Some(text) => parse_store(text).map_err(|source| SimError::Format { file: "store".into(), source })?,
        None => SpecStore::new(),
    };
    let trace: Vec<_> = records.into_iter().map(|(_, r)| r).collect();
    let mut rt = Runtime::new(graph, store, depth);
    rt.run(&trace)?;
    Ok(SimOutput {
        log: render_log(rt.log()),
        store: render_store(rt.store()),
        entered: rt.entered(),
        exited: rt.exited(),
        inside: rt.cars_inside().len(),
    })
}

fn read(path: &Path) -> Result<String, SimError> {
    fs::read_to_string(path).map_err(|source| SimError::Io { path: path.into(), source })
}

fn write(path: &Path, text: &str) -> Result<(), SimError> {
    fs::write(path, text).map_err(|source| SimError::Io { path: path.into(), source })
}

/// Reads the inputs, runs the simulation and writes the log and final store.
/// Nothing is written unless the whole run succeeds.
pub fn simulate(
    topology: &Path,
    trace: &Path,
    store_in: Option<&Path>,
    store_out: &Path,
    log_out: &Path,
    depth: Option<usize>,
) -> Result<SimOutput, SimError> {
    let topo_text = read(topology)?;
    let trace_text = read(trace)?;
    let store_text = store_in.map(read).transpose()?;
    let store_name = store_in.map(|p| p.display().to_string());
    let out = simulate_text(
        &topo_text,
        &trace_text,
        store_text.as_deref(),
        depth,
        (&topology.display().to_string(), &trace.display().to_string()),
    )
    .map_err(|e| match (e, &store_name) {
        (SimError::Format { file, source }, Some(name)) if file == "store" => SimError::Format { file: name.clone(), source },
        (e, _) => e,
    })?;
    write(log_out, &out.log)?;
    write(store_out, &out.store)?;
    Ok(out)
}
