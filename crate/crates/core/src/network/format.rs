//! Line-oriented text format.
//!
//! ```text
//! tdgraph v1 <n> <m>
//! <tail> <head> <k> <t_1> <w_1> ... <t_k> <w_k>
//! ```
//!
//! Times and weights are integer deciseconds, times in `[0, 864000)` and
//! strictly increasing. `#` starts a comment running to the end of the line.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::{TdEdge, TdGraph};
use crate::error::{Error, Result};
use crate::ttf::{BreakPoint, TravelTimeFunction};

const MAGIC: &str = "tdgraph";
const VERSION: &str = "v1";

pub fn load(path: impl AsRef<Path>) -> Result<TdGraph<i64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse(&text, path)
}

/// Parses instance text; `origin` only labels error messages.
pub fn parse(text: &str, origin: &Path) -> Result<TdGraph<i64>> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != MAGIC || fields[1] != VERSION {
        return Err(err(header_line, format!("expected `{MAGIC} {VERSION} <n> <m>`, got `{header}`")));
    }
    let node_count: usize = fields[2]
        .parse()
        .map_err(|_| err(header_line, format!("bad node count `{}`", fields[2])))?;
    let edge_count: usize = fields[3]
        .parse()
        .map_err(|_| err(header_line, format!("bad edge count `{}`", fields[3])))?;

    let mut edges = Vec::with_capacity(edge_count);
    for (line, content) in lines {
        if edges.len() == edge_count {
            return Err(err(line, format!("more than the {edge_count} announced edges")));
        }
        let nums = content
            .split_whitespace()
            .map(|tok| tok.parse::<i64>().map_err(|_| err(line, format!("not an integer: `{tok}`"))))
            .collect::<Result<Vec<_>>>()?;
        if nums.len() < 3 {
            return Err(err(line, "expected `<tail> <head> <k> ...`".into()));
        }
        let k = nums[2];
        if k < 1 || nums.len() as i64 != 3 + 2 * k {
            return Err(err(line, format!("breakpoint count {k} does not match {} values", nums.len() - 3)));
        }
        let node = |v: i64| {
            if v < 0 || v as usize >= node_count {
                Err(err(line, format!("node {v} out of range (n = {node_count})")))
            } else {
                Ok(v as u32)
            }
        };
        let (tail, head) = (node(nums[0])?, node(nums[1])?);
        let points: Vec<_> = nums[3..].chunks(2).map(|c| BreakPoint::new(c[0], c[1])).collect();
        let ttf = TravelTimeFunction::new(points).map_err(|source| Error::InvalidEdge {
            edge: edges.len(),
            tail: tail as usize,
            head: head as usize,
            source,
        })?;
        edges.push(TdEdge { tail, head, ttf });
    }
    if edges.len() != edge_count {
        return Err(err(
            text.lines().count().max(1),
            format!("header announces {edge_count} edges, found {}", edges.len()),
        ));
    }
    TdGraph::new(node_count, edges)
}

pub fn store(graph: &TdGraph<i64>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    write(graph, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write(graph: &TdGraph<i64>, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{MAGIC} {VERSION} {} {}", graph.node_count(), graph.edge_count())?;
    for e in graph.edges() {
        write!(out, "{} {} {}", e.tail, e.head, e.ttf.points().len())?;
        for p in e.ttf.points() {
            write!(out, " {} {}", p.at, p.travel)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(text: &str) -> Result<TdGraph<i64>> {
        parse(text, Path::new("test"))
    }

    #[test]
    fn single_constant_edge() {
        let g = parse_str("tdgraph v1 2 1\n0 1 1 0 1000\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.stats().td_edge_fraction, 0.0);
        assert_eq!(g.edge(0).ttf.eval(5), 1000);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_str("# leading\n\ntdgraph v1 2 1 # header\n0 1 2 0 10 432000 20 # td\n").unwrap();
        assert!(g.edge(0).ttf.is_time_dependent());
    }

    #[test]
    fn empty_graph_is_header_only() {
        let g = TdGraph::<i64>::new(0, vec![]).unwrap();
        let mut buf = Vec::new();
        write(&g, &mut buf).unwrap();
        assert_eq!(buf, b"tdgraph v1 0 0\n");
        assert_eq!(parse_str("tdgraph v1 0 0\n").unwrap(), g);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_str("tdgraph v1 2 1\n0 1 2 0 10\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_str("tdgraph v2 2 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e}");
        let e = parse_str("tdgraph v1 2 1\n0 x 1 0 10\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_str("tdgraph v1 2 2\n0 1 1 0 10\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }), "{e}");
        let e = parse_str("tdgraph v1 2 1\n0 1 1 0 10\n1 0 1 0 10\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_str("tdgraph v1 2 1\n0 5 1 0 10\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn fifo_violation_names_the_edge() {
        let e = parse_str("tdgraph v1 3 2\n0 1 1 0 10\n1 2 2 0 72000 36000 600\n").unwrap_err();
        match e {
            Error::InvalidEdge { edge, tail, head, .. } => assert_eq!((edge, tail, head), (1, 1, 2)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn self_loop_is_rejected() {
        assert!(parse_str("tdgraph v1 2 1\n1 1 1 0 10\n").is_err());
    }
}
