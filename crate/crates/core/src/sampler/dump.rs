//! Plain-text edge lists: a header line `# n K P p q seed`, then one `i j`
//! line per edge with `i < j`.

use std::io::{self, BufRead, Write};

use super::GraphSample;
use crate::analytic::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeListHeader {
    pub params: ModelParams<f64>,
    pub seed: u64,
}

pub fn write_edge_list<W: Write>(out: &mut W, params: &ModelParams<f64>, graph: &GraphSample) -> io::Result<()> {
    writeln!(
        out,
        "# {} {} {} {} {} {}",
        params.n,
        params.ring_size,
        params.pool_size,
        params.channel_prob,
        params.q,
        graph.seed()
    )?;
    for (i, j) in graph.edges() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

fn bad(line: usize, msg: impl std::fmt::Display) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, format!("line {line}: {msg}"))
}

pub fn read_edge_list<R: BufRead>(input: R) -> io::Result<(EdgeListHeader, GraphSample)> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad(1, "missing header"))??;
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .ok_or_else(|| bad(1, "header must start with '#'"))?
        .split_whitespace()
        .collect();
    if fields.len() != 6 {
        return Err(bad(1, "expected `# n K P p q seed`"));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|e| bad(1, e));
    let params = ModelParams {
        n: int(fields[0])?,
        ring_size: int(fields[1])?,
        pool_size: int(fields[2])?,
        channel_prob: fields[3].parse::<f64>().map_err(|e| bad(1, e))?,
        q: int(fields[4])?,
    };
    let seed = fields[5].parse::<u64>().map_err(|e| bad(1, e))?;

    let mut edges = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let line_no = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace().map(|s| s.parse::<u32>().map_err(|e| bad(line_no, e)));
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad(line_no, "expected `i j`"));
        };
        let (a, b) = (a?, b?);
        if a as usize >= params.n || b as usize >= params.n {
            return Err(bad(line_no, "node index out of range"));
        }
        edges.push((a, b));
    }
    Ok((EdgeListHeader { params, seed }, GraphSample::from_edges(params.n, seed, edges)))
}
