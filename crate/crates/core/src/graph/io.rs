use std::io::Read;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DedupPolicy, Edge, Graph, GraphError, VertexId, Weight, MAX_EDGE_WEIGHT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    EdgeList,
    Json,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    pub dedupe: DedupPolicy,
    /// Factor applied to every weight. Required when any weight is fractional.
    pub scale: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    n: usize,
    #[serde(default)]
    m: Option<usize>,
    edges: Vec<JsonEdge>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    weight_scale: u64,
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    u: VertexId,
    v: VertexId,
    w: Value,
}

fn one() -> u64 {
    1
}

fn is_one(x: &u64) -> bool {
    *x == 1
}

/// Parses one weight token, applying the optional scale.
/// `line` is the source line for edge lists and the 1-based edge position for JSON.
fn parse_weight(token: &str, scale: Option<u64>, line: usize) -> Result<Weight, GraphError> {
    let token = token.trim();
    if token.starts_with('-') {
        let zero = token
            .trim_start_matches('-')
            .trim_start_matches(['0', '.'])
            .is_empty();
        if !zero {
            return Err(GraphError::NegativeWeight { line });
        }
    }
    let overflow = || GraphError::WeightOverflow {
        weight: token.to_string(),
    };
    let w = if let Ok(int) = token.parse::<u64>() {
        int.checked_mul(scale.unwrap_or(1)).ok_or_else(overflow)?
    } else {
        let x: f64 = token.parse().map_err(|_| GraphError::Parse {
            line,
            msg: format!("invalid weight {token:?}"),
        })?;
        let Some(s) = scale else {
            return Err(GraphError::Parse {
                line,
                msg: format!("fractional weight {token:?} needs a declared scale factor"),
            });
        };
        let scaled = (x * s as f64).round();
        if !scaled.is_finite() || scaled > MAX_EDGE_WEIGHT as f64 {
            return Err(overflow());
        }
        scaled.abs() as Weight
    };
    if w > MAX_EDGE_WEIGHT {
        return Err(overflow());
    }
    Ok(w)
}

fn parse_edge_list(text: &str, opts: LoadOptions) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut recorded_scale = 1u64;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tok = raw.split_whitespace();
        let Some(tag) = tok.next() else { continue };
        let bad = |msg: &str| GraphError::Parse {
            line,
            msg: msg.to_string(),
        };
        match tag {
            "c" => {
                if tok.next() == Some("weight_scale") {
                    recorded_scale = tok
                        .next()
                        .and_then(|s| s.parse().ok())
                        .filter(|&s| s > 0)
                        .ok_or_else(|| bad("invalid weight_scale comment"))?;
                }
            }
            "p" => {
                if header.is_some() {
                    return Err(bad("duplicate header"));
                }
                let n = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("bad vertex count"))?;
                let m = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("bad edge count"))?;
                header = Some((n, m));
            }
            "e" => {
                if header.is_none() {
                    return Err(bad("edge before header"));
                }
                let u = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("bad endpoint"))?;
                let v = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("bad endpoint"))?;
                let w = parse_weight(
                    tok.next().ok_or_else(|| bad("missing weight"))?,
                    opts.scale,
                    line,
                )?;
                if tok.next().is_some() {
                    return Err(bad("trailing tokens"));
                }
                edges.push(Edge::new(u, v, w));
            }
            _ => return Err(bad("unknown line tag")),
        }
    }
    let (n, m) = header.ok_or(GraphError::Parse {
        line: 1,
        msg: "missing `p <n> <m>` header".into(),
    })?;
    if m != edges.len() {
        return Err(GraphError::EdgeCountMismatch {
            declared: m,
            found: edges.len(),
        });
    }
    let scale = total_scale(recorded_scale, opts.scale)?;
    Graph::with_scale(n, edges, opts.dedupe, scale)
}

fn total_scale(recorded: u64, applied: Option<u64>) -> Result<u64, GraphError> {
    recorded
        .checked_mul(applied.unwrap_or(1))
        .ok_or(GraphError::Overflow)
}

fn parse_json(text: &str, opts: LoadOptions) -> Result<Graph, GraphError> {
    let raw: JsonGraph = serde_json::from_str(text).map_err(|e| GraphError::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (i, e) in raw.edges.iter().enumerate() {
        let token = match &e.w {
            Value::Number(x) => x.to_string(),
            other => {
                return Err(GraphError::Parse {
                    line: i + 1,
                    msg: format!("weight {other} is not a number"),
                })
            }
        };
        edges.push(Edge::new(
            e.u,
            e.v,
            parse_weight(&token, opts.scale, i + 1)?,
        ));
    }
    if let Some(m) = raw.m {
        if m != edges.len() {
            return Err(GraphError::EdgeCountMismatch {
                declared: m,
                found: edges.len(),
            });
        }
    }
    let scale = total_scale(raw.weight_scale, opts.scale)?;
    Graph::with_scale(raw.n, edges, opts.dedupe, scale)
}

impl Graph {
    pub fn load(
        mut source: impl Read,
        format: GraphFormat,
        opts: LoadOptions,
    ) -> Result<Self, GraphError> {
        let mut text = String::new();
        source
            .read_to_string(&mut text)
            .map_err(|e| GraphError::Parse {
                line: 0,
                msg: e.to_string(),
            })?;
        Self::parse(&text, format, opts)
    }

    pub fn parse(text: &str, format: GraphFormat, opts: LoadOptions) -> Result<Self, GraphError> {
        match format {
            GraphFormat::EdgeList => parse_edge_list(text, opts),
            GraphFormat::Json => parse_json(text, opts),
        }
    }

    /// Serializes in the given format; parsing the output yields an equal graph.
    pub fn to_text(&self, format: GraphFormat) -> String {
        match format {
            GraphFormat::EdgeList => {
                let mut out = format!("p {} {}\n", self.n, self.m());
                if self.weight_scale != 1 {
                    out.push_str(&format!("c weight_scale {}\n", self.weight_scale));
                }
                for e in &self.edges {
                    out.push_str(&format!("e {} {} {}\n", e.u, e.v, e.w));
                }
                out
            }
            GraphFormat::Json => {
                let raw = JsonGraph {
                    n: self.n,
                    m: Some(self.m()),
                    edges: self
                        .edges
                        .iter()
                        .map(|e| JsonEdge {
                            u: e.u,
                            v: e.v,
                            w: e.w.into(),
                        })
                        .collect(),
                    weight_scale: self.weight_scale,
                };
                let mut s = serde_json::to_string(&raw).expect("graph serializes");
                s.push('\n');
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_list(text: &str) -> Result<Graph, GraphError> {
        Graph::parse(text, GraphFormat::EdgeList, LoadOptions::default())
    }

    #[test]
    fn basic_edge_list() {
        let g = edge_list("p 3 2\ne 0 1 5\ne 1 2 7\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        let single = edge_list("p 1 0\n").unwrap();
        assert_eq!((single.n(), single.m()), (1, 0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            edge_list("p 2 1\ne 0 0 3\n").unwrap_err(),
            GraphError::SelfLoop { vertex: 0 }
        );
        assert_eq!(
            edge_list("p 2 1\nc hi\ne 0 1 -4\n").unwrap_err(),
            GraphError::NegativeWeight { line: 3 }
        );
        assert!(matches!(
            edge_list("p 2 1\ne 0 x 1\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            edge_list("p 2 1\ne 0 1 2.5\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            edge_list("p 2 1\ne 0 1 2000000000000\n"),
            Err(GraphError::WeightOverflow { .. })
        ));
    }

    #[test]
    fn fractional_weights_are_scaled() {
        let opts = LoadOptions {
            scale: Some(10),
            ..Default::default()
        };
        let g = Graph::parse("p 3 2\ne 0 1 2.5\ne 1 2 3\n", GraphFormat::EdgeList, opts).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(25));
        assert_eq!(g.edge_weight(1, 2), Some(30));
        assert_eq!(g.weight_scale(), 10);
        let huge = LoadOptions {
            scale: Some(1 << 30),
            ..Default::default()
        };
        assert!(matches!(
            Graph::parse("p 2 1\ne 0 1 2048.5\n", GraphFormat::EdgeList, huge),
            Err(GraphError::WeightOverflow { .. })
        ));
    }

    #[test]
    fn round_trips_are_bit_exact() {
        let opts = LoadOptions {
            scale: Some(4),
            ..Default::default()
        };
        let g = Graph::parse(
            "p 4 3\ne 0 1 1.25\ne 3 1 2\ne 2 1 0\n",
            GraphFormat::EdgeList,
            opts,
        )
        .unwrap();
        for fmt in [GraphFormat::EdgeList, GraphFormat::Json] {
            let text = g.to_text(fmt);
            let back = Graph::parse(&text, fmt, LoadOptions::default()).unwrap();
            assert_eq!(back, g);
            assert_eq!(back.to_text(fmt), text);
        }
    }

    #[test]
    fn json_input() {
        let g = Graph::parse(
            r#"{"n":3,"edges":[{"u":0,"v":1,"w":5},{"u":1,"v":2,"w":7}]}"#,
            GraphFormat::Json,
            LoadOptions::default(),
        )
        .unwrap();
        assert_eq!(g.m(), 2);
        let err = Graph::parse(
            r#"{"n":2,"edges":[{"u":0,"v":1,"w":-1}]}"#,
            GraphFormat::Json,
            LoadOptions::default(),
        );
        assert_eq!(err.unwrap_err(), GraphError::NegativeWeight { line: 1 });
    }
}
