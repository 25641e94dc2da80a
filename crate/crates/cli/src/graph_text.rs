//! Line-oriented text format for dual graphs.
//!
//! ```text
//! # comment
//! components 1 2
//! order 2
//! vertex v maps 1 kind x1
//! vertex w maps 2 kind x2
//! edge e v w
//! delta e 1
//! speeds v 2 0
//! speeds w 0 2
//! orders e 0 -2 2
//! orders e 1 2 -2
//! regular e 0
//! ```
//!
//! `maps` takes a comma-separated component list or `-`; `kind` is optional.
//! `orders EDGE SIDE m...` gives one order per component for the flag at
//! `ends[SIDE]`; both sides must be present or neither.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use covbound_core::snc_balance::{Edge, LabeledDualGraph, Vertex};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Incomplete(String),
    #[error("name {0:?} cannot be written in the text format")]
    Unwritable(String),
}

fn syntax<T>(line: usize, message: impl Into<String>) -> Result<T, GraphFormatError> {
    Err(GraphFormatError::Syntax {
        line,
        message: message.into(),
    })
}

fn number<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T, GraphFormatError> {
    token
        .parse()
        .or_else(|_| syntax(line, format!("invalid {what} {token:?}")))
}

#[derive(Default)]
struct PartialOrders {
    sides: [Option<Vec<i64>>; 2],
}

pub fn parse_graph(text: &str) -> Result<LabeledDualGraph, GraphFormatError> {
    let mut components: Option<Vec<u32>> = None;
    let mut n = None;
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut orders: Vec<PartialOrders> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&keyword, args)) = tokens.split_first() else {
            continue;
        };
        let vertex_of = |name: &str| -> Result<usize, GraphFormatError> {
            vertices
                .iter()
                .position(|v| v.name == name)
                .map_or_else(|| syntax(line, format!("unknown vertex {name:?}")), Ok)
        };
        let edge_of = |name: &str| -> Result<usize, GraphFormatError> {
            edges
                .iter()
                .position(|e| e.name == name)
                .map_or_else(|| syntax(line, format!("unknown edge {name:?}")), Ok)
        };
        match keyword {
            "components" => {
                if components.is_some() {
                    return syntax(line, "components given twice");
                }
                let ids = args
                    .iter()
                    .map(|t| number(line, t, "component"))
                    .collect::<Result<Vec<u32>, _>>()?;
                components = Some(ids);
            }
            "order" => {
                let [t] = args else {
                    return syntax(line, "expected: order N");
                };
                n = Some(number(line, t, "order")?);
            }
            "vertex" => {
                let (name, rest) = match args {
                    [name, "maps", list, rest @ ..] => (*name, (*list, rest)),
                    _ => return syntax(line, "expected: vertex NAME maps LIST [kind KIND]"),
                };
                let (list, tail) = rest;
                let maps_into: BTreeSet<u32> = if list == "-" {
                    BTreeSet::new()
                } else {
                    list.split(',')
                        .map(|t| number(line, t, "component"))
                        .collect::<Result<_, _>>()?
                };
                let kind = match tail {
                    [] => None,
                    ["kind", k] => Some(k.parse().or_else(|e: String| syntax(line, e))?),
                    _ => return syntax(line, "expected: vertex NAME maps LIST [kind KIND]"),
                };
                if vertices.iter().any(|v| v.name == name) {
                    return syntax(line, format!("vertex {name:?} declared twice"));
                }
                vertices.push(Vertex {
                    name: name.to_string(),
                    maps_into,
                    kind,
                    speeds: None,
                });
            }
            "edge" => {
                let [name, a, b] = args else {
                    return syntax(line, "expected: edge NAME VERTEX VERTEX");
                };
                if edges.iter().any(|e| e.name == *name) {
                    return syntax(line, format!("edge {name:?} declared twice"));
                }
                let ends = [vertex_of(a)?, vertex_of(b)?];
                edges.push(Edge {
                    name: name.to_string(),
                    ends,
                    delta: None,
                    orders: None,
                    regular: [false; 2],
                });
                orders.push(PartialOrders::default());
            }
            "delta" => {
                let [name, k] = args else {
                    return syntax(line, "expected: delta EDGE K");
                };
                let e = edge_of(name)?;
                edges[e].delta = Some(number(line, k, "delta")?);
            }
            "speeds" => {
                let Some((name, values)) = args.split_first() else {
                    return syntax(line, "expected: speeds VERTEX n...");
                };
                let v = vertex_of(name)?;
                let values = values
                    .iter()
                    .map(|t| number(line, t, "speed"))
                    .collect::<Result<Vec<u64>, _>>()?;
                vertices[v].speeds = Some(values);
            }
            "orders" => {
                let [name, side, values @ ..] = args else {
                    return syntax(line, "expected: orders EDGE SIDE m...");
                };
                let e = edge_of(name)?;
                let side: usize = number(line, side, "side")?;
                if side > 1 {
                    return syntax(line, "side must be 0 or 1");
                }
                let values = values
                    .iter()
                    .map(|t| number(line, t, "order"))
                    .collect::<Result<Vec<i64>, _>>()?;
                orders[e].sides[side] = Some(values);
            }
            "regular" => {
                let [name, side] = args else {
                    return syntax(line, "expected: regular EDGE SIDE");
                };
                let e = edge_of(name)?;
                let side: usize = number(line, side, "side")?;
                if side > 1 {
                    return syntax(line, "side must be 0 or 1");
                }
                edges[e].regular[side] = true;
            }
            other => return syntax(line, format!("unknown keyword {other:?}")),
        }
    }

    for (edge, partial) in edges.iter_mut().zip(orders) {
        match partial.sides {
            [Some(a), Some(b)] => edge.orders = Some([a, b]),
            [None, None] => {}
            _ => {
                return Err(GraphFormatError::Incomplete(format!(
                    "edge {:?} has orders for only one side",
                    edge.name
                )))
            }
        }
    }
    let components =
        components.ok_or_else(|| GraphFormatError::Incomplete("missing components line".into()))?;
    Ok(LabeledDualGraph {
        components,
        n,
        vertices,
        edges,
    })
}

fn writable(name: &str) -> Result<&str, GraphFormatError> {
    if name.is_empty() || name.contains('#') || name.chars().any(char::is_whitespace) {
        return Err(GraphFormatError::Unwritable(name.to_string()));
    }
    Ok(name)
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// Canonical text form; `parse_graph` inverts it exactly.
pub fn format_graph(g: &LabeledDualGraph) -> Result<String, GraphFormatError> {
    let mut out = String::new();
    let vname = |i: usize| -> Result<&str, GraphFormatError> {
        g.vertices
            .get(i)
            .map(|v| v.name.as_str())
            .ok_or_else(|| GraphFormatError::Incomplete(format!("vertex index {i} out of range")))
    };
    writeln!(out, "components {}", join(&g.components)).unwrap();
    if let Some(n) = g.n {
        writeln!(out, "order {n}").unwrap();
    }
    for v in &g.vertices {
        let maps = if v.maps_into.is_empty() {
            "-".to_string()
        } else {
            v.maps_into.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
        };
        write!(out, "vertex {} maps {maps}", writable(&v.name)?).unwrap();
        if let Some(kind) = v.kind {
            write!(out, " kind {kind}").unwrap();
        }
        out.push('\n');
    }
    for e in &g.edges {
        writeln!(
            out,
            "edge {} {} {}",
            writable(&e.name)?,
            writable(vname(e.ends[0])?)?,
            writable(vname(e.ends[1])?)?
        )
        .unwrap();
    }
    for v in &g.vertices {
        if let Some(speeds) = &v.speeds {
            writeln!(out, "speeds {} {}", v.name, join(speeds)).unwrap();
        }
    }
    for e in &g.edges {
        if let Some(delta) = e.delta {
            writeln!(out, "delta {} {delta}", e.name).unwrap();
        }
        if let Some(orders) = &e.orders {
            for (side, m) in orders.iter().enumerate() {
                writeln!(out, "orders {} {side} {}", e.name, join(m)).unwrap();
            }
        }
        for side in 0..2 {
            if e.regular[side] {
                writeln!(out, "regular {} {side}", e.name).unwrap();
            }
        }
    }
    Ok(out)
}

/// Reads either format: JSON when the first non-blank character is `{`.
pub fn read_graph(text: &str) -> Result<LabeledDualGraph, String> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| format!("invalid graph JSON: {e}"))
    } else {
        parse_graph(text).map_err(|e| e.to_string())
    }
}
