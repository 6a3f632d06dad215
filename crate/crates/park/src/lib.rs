//! File formats, the trace-driven simulator and the store table for the
//! `park` command-line tool.
//!
//! Everything here is text in, text out; [`simulate`] is the only function
//! that touches the file system.

pub mod formats;
pub mod sim;

pub use formats::{
    dump_store, parse_store, parse_topology, parse_trace, render_log, render_store, FormatError,
};
pub use sim::{simulate, simulate_text, SimError, SimOutput};
