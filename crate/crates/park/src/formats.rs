//! Line-oriented text formats.
//!
//! * topology: `node <G|R|P> <label>` and `edge <from> <to>`
//! * trace: `<timestamp> <object> <node>`
//! * store: `id<TAB>formula<TAB>r`
//! * decision log: `time<TAB>user<TAB>gate<TAB>suggestion<TAB>removed<TAB>candidates`
//!
//! In topology and trace files `#` starts a comment and blank lines are
//! skipped. Store files have no comments: every line is a record.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use smartpark_core::formula::is_atom_name as is_label;
use smartpark_core::graph::{NodeKind, Topology};
use smartpark_core::knowledge::{EventRecord, SpecStore};
use smartpark_core::runtime::{DecisionLogEntry, TraceRecord};
use smartpark_core::time::Timestamp;
use smartpark_core::{parse, render};

/// A rejected line; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, message: message.into() }
}

/// Non-blank lines with comments stripped, numbered from 1.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or_default();
        let fields: Vec<&str> = content.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

pub fn parse_topology(text: &str) -> Result<Topology, FormatError> {
    let mut topology = Topology::default();
    let mut labels = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for (line, fields) in records(text) {
        match fields.as_slice() {
            ["node", kind, label] => {
                let kind = match NodeKind::from_letter(kind) {
                    Some(k @ (NodeKind::Gate | NodeKind::Road | NodeKind::Space)) => k,
                    _ => return Err(err(line, format!("node kind must be G, R or P, got '{kind}'"))),
                };
                if !is_label(label) {
                    return Err(err(line, format!("'{label}' is not a valid label")));
                }
                if !labels.insert(label.to_string()) {
                    return Err(err(line, format!("duplicate node '{label}'")));
                }
                topology.nodes.push((kind, label.to_string()));
            }
            ["edge", from, to] => {
                for end in [from, to] {
                    if !labels.contains(*end) {
                        return Err(err(line, format!("edge mentions undeclared node '{end}'")));
                    }
                }
                if !edges.insert((from.to_string(), to.to_string())) {
                    return Err(err(line, format!("duplicate edge {from} -> {to}")));
                }
                topology.edges.push((from.to_string(), to.to_string()));
            }
            ["node" | "edge", ..] => return Err(err(line, format!("wrong number of fields for '{}'", fields[0]))),
            [other, ..] => return Err(err(line, format!("unknown record '{other}'"))),
            [] => unreachable!("blank lines are skipped"),
        }
    }
    Ok(topology)
}

/// Records in file order; each is paired with its line number.
pub fn parse_trace(text: &str) -> Result<Vec<(usize, TraceRecord)>, FormatError> {
    records(text)
        .map(|(line, fields)| match fields.as_slice() {
            [time, object, node] => {
                let time: Timestamp = time.parse().map_err(|e| err(line, format!("{e}")))?;
                if !is_label(object) || !is_label(node) {
                    return Err(err(line, "object and node must be identifiers"));
                }
                Ok((line, EventRecord::new(*object, *node, time)))
            }
            _ => Err(err(line, format!("expected '<timestamp> <object> <node>', got {} fields", fields.len()))),
        })
        .collect()
}

pub fn parse_store(text: &str) -> Result<SpecStore, FormatError> {
    let mut store = SpecStore::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let fields: Vec<&str> = raw.split('\t').collect();
        let [id, formula, r] = fields.as_slice() else {
            return Err(err(line, format!("expected 3 tab-separated fields, got {}", fields.len())));
        };
        if !is_label(id) {
            return Err(err(line, format!("'{id}' is not a valid user id")));
        }
        let formula = parse(formula).map_err(|e| err(line, format!("{e}")))?;
        let count: i64 = r.trim().parse().map_err(|_| err(line, format!("r must be an integer, got '{r}'")))?;
        if count <= 0 {
            return Err(err(line, format!("r must be positive, got {count}")));
        }
        store.add(id, formula, count as u64).map_err(|e| err(line, format!("{e}")))?;
    }
    Ok(store)
}

/// One line per entry in store order; an empty store is an empty file.
pub fn render_store(store: &SpecStore) -> String {
    let mut out = String::new();
    for e in store.entries() {
        let _ = writeln!(out, "{}\t{}\t{}", e.id, render(&e.formula), e.count);
    }
    out
}

pub fn render_log(log: &[DecisionLogEntry]) -> String {
    let mut out = String::new();
    for entry in log {
        let suggestion = entry.suggestion.as_deref().unwrap_or("-");
        let removed = if entry.removed.is_empty() {
            "-".to_string()
        } else {
            entry.removed.iter().map(render).collect::<Vec<_>>().join(";")
        };
        let candidates = if entry.candidates.is_empty() {
            "-".to_string()
        } else {
            entry.candidates.iter().map(|(s, r)| format!("{s}:{r}")).collect::<Vec<_>>().join(",")
        };
        let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", entry.time, entry.user, entry.gate, suggestion, removed, candidates);
    }
    out
}

/// Human-readable table of a store, sorted by user then by descending count.
pub fn dump_store(store: &SpecStore) -> String {
    let mut rows: Vec<(String, String, u64)> = store.entries().map(|e| (e.id.clone(), render(&e.formula), e.count)).collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(b.2.cmp(&a.2)).then_with(|| a.1.cmp(&b.1)));
    let id_w = rows.iter().map(|r| r.0.len()).chain([2]).max().unwrap_or(2);
    let f_w = rows.iter().map(|r| r.1.len()).chain([7]).max().unwrap_or(7);
    let mut out = String::new();
    let _ = writeln!(out, "{:<id_w$}  {:<f_w$}  r", "id", "formula");
    for (id, formula, r) in rows {
        let _ = writeln!(out, "{id:<id_w$}  {formula:<f_w$}  {r}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use smartpark_core::Formula;

    #[test]
    fn topology_records() {
        let t = parse_topology("# car park\nnode G g1\nnode R r1  # aisle\n\nedge g1 r1\n").unwrap();
        assert_eq!(t.nodes, vec![(NodeKind::Gate, "g1".to_string()), (NodeKind::Road, "r1".to_string())]);
        assert_eq!(t.edges, vec![("g1".to_string(), "r1".to_string())]);
    }

    #[test]
    fn topology_errors_carry_lines() {
        assert_eq!(parse_topology("node G g1\nnode C c1\n").unwrap_err().line, 2);
        assert_eq!(parse_topology("node G g1\n\nedge g1 r9\n").unwrap_err().line, 3);
        assert_eq!(parse_topology("node G g1\nnode P g1\n").unwrap_err().line, 2);
        assert_eq!(parse_topology("vertex G g1\n").unwrap_err().line, 1);
        assert_eq!(parse_topology("node G\n").unwrap_err().line, 1);
    }

    #[test]
    fn trace_records() {
        let t = parse_trace("# morning\nt2014.01.28.09.30.15 idOla91 g2\n").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, 2);
        assert_eq!(t[0].1.node, "g2");
        assert_eq!(parse_trace("t2014.13.28.09.30.15 idOla91 g2\n").unwrap_err().line, 1);
        assert_eq!(parse_trace("\nt2014.01.28.09.30.15 idOla91\n").unwrap_err().line, 2);
    }

    #[test]
    fn store_round_trip() {
        let mut s = SpecStore::new();
        s.add("idOla91", Formula::preference("g2", "p018"), 7).unwrap();
        s.add("idOla91", Formula::preference("g2", "p015"), 2).unwrap();
        let text = render_store(&s);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(parse_store(&text).unwrap(), s);
        assert_eq!(render_store(&SpecStore::new()), "");
        assert_eq!(parse_store("").unwrap(), SpecStore::new());
    }

    #[test]
    fn store_rejects_bad_lines() {
        let good = "idOla91\t(g2 -> F p018)\t7\n";
        assert_eq!(parse_store(&format!("{good}idOla91\tg2 -> F p015\t0\n")).unwrap_err().line, 2);
        assert_eq!(parse_store(&format!("{good}idOla91\tg2 -> F p015\t-3\n")).unwrap_err().line, 2);
        assert_eq!(parse_store(&format!("{good}{good}idOla91 g2 7\n")).unwrap_err().line, 3);
        assert_eq!(parse_store("idOla91\tg2 ->\t1\n").unwrap_err().line, 1);
    }

    #[test]
    fn dump_orders_by_count() {
        let s = parse_store("idOla91\tg2 -> F p015\t2\nidOla91\tg2 -> F p018\t7\n").unwrap();
        let table = dump_store(&s);
        let rows: Vec<&str> = table.lines().collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[1].contains("p018") && rows[1].ends_with(" 7"));
        assert!(rows[2].contains("p015") && rows[2].ends_with(" 2"));
        assert_eq!(dump_store(&SpecStore::new()).lines().count(), 1);
    }
}
