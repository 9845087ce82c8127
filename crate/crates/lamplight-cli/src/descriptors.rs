//! Textual graph descriptors: `line:4`, `grid:2:3`, `tree:3:4`, `cycle:8`,
//! `path:5`, `complete:3`. A `-` separator is accepted as well.

use lamplight::graph;
use lamplight::Graph;

use crate::CliError;

pub fn parse_graph(desc: &str, window_override: Option<i64>) -> Result<Graph, CliError> {
    let norm = desc.replace('-', ":");
    let parts: Vec<&str> = norm.split(':').collect();
    let usage = || CliError::Usage(format!("cannot parse graph descriptor {:?}", desc));
    let int = |s: &str| -> Result<i64, CliError> { s.parse().map_err(|_| usage()) };
    let g = match (parts.as_slice(), window_override) {
        (["line", r], ov) => graph::line_window(ov.unwrap_or(int(r)?)),
        (["line"], Some(r)) => graph::line_window(r),
        (["grid", d, r], ov) => graph::grid_window(int(d)? as usize, ov.unwrap_or(int(r)?))?,
        (["tree", d, r], ov) => {
            graph::tree_window(int(d)? as usize, ov.unwrap_or(int(r)?) as u32)?
        }
        (["cycle", k], _) => graph::cycle_graph(int(k)? as usize),
        (["path", k], _) => graph::path_graph(int(k)? as usize),
        (["complete", k], _) => graph::complete_graph(int(k)? as usize),
        _ => return Err(usage()),
    };
    Ok(g)
}
