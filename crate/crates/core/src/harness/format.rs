//! Line-oriented instance files.
//!
//! Every file opens with the header `ordsec v1 <kind>` followed by scalar
//! lines (`key: value`) and block sections (a bare `name:` line, then one
//! data line per row until the next key). `#` starts a comment anywhere on a
//! line; blank lines are ignored. Floats are written with the shortest
//! decimal that round-trips, so serialize → parse → serialize is
//! byte-identical and replays are bit-exact.
//!
//! Kinds and their fields:
//!
//! * `bipartite` — `left:`, `right:` scalars; `edges:` rows `l r w`.
//! * `general` — `vertices:` scalar; `edges:` rows `u v w`.
//! * `packing` — `capacities:` (one float per resource); `options:` rows
//!   `request option profit a_0 … a_{m-1}`; counts are inferred and the
//!   request × option grid must be complete.
//! * `graph` — `alpha1:` scalar; `weights:` (one float per vertex);
//!   optional unweighted `edges:` rows `u v`.
//! * `unit-disk` — `radius:` scalar; `points:` rows `x y`; `weights:`;
//!   edges are implied by pairwise distance.
//! * `matroid` — `matroid:` scalar (`uniform <k>`, `partition`, or
//!   `graphic <vertices>`); `weights:`; partition matroids add `blocks:`
//!   and `capacities:` (integers), graphic matroids add `ends:` rows `u v`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::indepset::{LocalGraph, UnitDiskInstance};
use crate::matching::{BipartiteInstance, GeneralInstance};
use crate::matroid::{Matroid, MatroidGround};
use crate::ordinal::ElementId;
use crate::packing::PackingInstance;

/// A problem instance of any supported kind.
#[derive(Clone, Debug)]
pub enum Instance {
    Bipartite(BipartiteInstance),
    General(GeneralInstance),
    Packing(PackingInstance),
    Graph(LocalGraph),
    UnitDisk(UnitDiskInstance),
    Matroid(MatroidGround),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Bipartite(_) => "bipartite",
            Instance::General(_) => "general",
            Instance::Packing(_) => "packing",
            Instance::Graph(_) => "graph",
            Instance::UnitDisk(_) => "unit-disk",
            Instance::Matroid(_) => "matroid",
        }
    }
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// A scanned document: the header kind plus scalars and sections in file
/// order, each remembering its line number for error messages.
pub(crate) struct RawDoc<'a> {
    pub(crate) kind: &'a str,
    scalars: Vec<(usize, &'a str, &'a str, bool)>,
    sections: Vec<(usize, &'a str, Vec<(usize, &'a str)>, bool)>,
}

pub(crate) fn tokenize(text: &str) -> Result<RawDoc<'_>> {
    let mut kind = None;
    let mut scalars: Vec<(usize, &str, &str, bool)> = Vec::new();
    let mut sections: Vec<(usize, &str, Vec<(usize, &str)>, bool)> = Vec::new();
    let mut in_section = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if kind.is_none() {
            let mut parts = content.split_whitespace();
            match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some("ordsec"), Some("v1"), Some(k), None) => kind = Some(k),
                _ => {
                    return Err(parse_err(
                        line_no,
                        format!("expected header 'ordsec v1 <kind>', found '{content}'"),
                    ))
                }
            }
            continue;
        }
        if let Some(colon) = content.find(':') {
            let key = content[..colon].trim();
            let value = content[colon + 1..].trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(parse_err(line_no, format!("malformed key '{key}'")));
            }
            if value.is_empty() {
                if sections.iter().any(|(_, name, _, _)| *name == key) {
                    return Err(parse_err(line_no, format!("duplicate section '{key}'")));
                }
                sections.push((line_no, key, Vec::new(), false));
                in_section = true;
            } else {
                if scalars.iter().any(|(_, name, _, _)| *name == key) {
                    return Err(parse_err(line_no, format!("duplicate key '{key}'")));
                }
                scalars.push((line_no, key, value, false));
                in_section = false;
            }
        } else if in_section {
            sections.last_mut().unwrap().2.push((line_no, content));
        } else {
            return Err(parse_err(line_no, format!("data line '{content}' outside any section")));
        }
    }

    match kind {
        Some(kind) => Ok(RawDoc { kind, scalars, sections }),
        None => Err(parse_err(1, "empty document: missing 'ordsec v1 <kind>' header")),
    }
}

impl<'a> RawDoc<'a> {
    pub(crate) fn scalar(&mut self, key: &str) -> Result<(usize, &'a str)> {
        self.scalar_opt(key)
            .ok_or_else(|| parse_err(1, format!("missing required key '{key}'")))
    }

    pub(crate) fn scalar_opt(&mut self, key: &str) -> Option<(usize, &'a str)> {
        for (line, name, value, used) in self.scalars.iter_mut() {
            if *name == key {
                *used = true;
                return Some((*line, value));
            }
        }
        None
    }

    pub(crate) fn section(&mut self, name: &str) -> Result<(usize, Vec<(usize, &'a str)>)> {
        self.section_opt(name)
            .ok_or_else(|| parse_err(1, format!("missing required section '{name}'")))
    }

    pub(crate) fn section_opt(&mut self, name: &str) -> Option<(usize, Vec<(usize, &'a str)>)> {
        for (line, key, rows, used) in self.sections.iter_mut() {
            if *key == name {
                *used = true;
                return Some((*line, std::mem::take(rows)));
            }
        }
        None
    }

    /// All whitespace-separated tokens of a section, across its lines.
    pub(crate) fn section_tokens(&mut self, name: &str) -> Result<Vec<(usize, &'a str)>> {
        let (_, rows) = self.section(name)?;
        let mut out = Vec::new();
        for (line, row) in rows {
            for tok in row.split_whitespace() {
                out.push((line, tok));
            }
        }
        Ok(out)
    }

    /// Errors on any scalar or section that no builder consumed.
    pub(crate) fn finish(self) -> Result<()> {
        for (line, key, _, used) in &self.scalars {
            if !used {
                return Err(parse_err(*line, format!("unexpected key '{key}'")));
            }
        }
        for (line, key, _, used) in &self.sections {
            if !used {
                return Err(parse_err(*line, format!("unexpected section '{key}'")));
            }
        }
        Ok(())
    }
}

pub(crate) fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, found '{tok}'")))
}

pub(crate) fn parse_u64(line: usize, tok: &str) -> Result<u64> {
    tok.parse::<u64>()
        .map_err(|_| parse_err(line, format!("expected an unsigned integer, found '{tok}'")))
}

pub(crate) fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    let v = tok
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("expected a number, found '{tok}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite number '{tok}'")));
    }
    Ok(v)
}

fn row_tokens<'a, const N: usize>(line: usize, row: &'a str, what: &str) -> Result<[&'a str; N]> {
    let toks: Vec<&str> = row.split_whitespace().collect();
    if toks.len() != N {
        return Err(parse_err(
            line,
            format!("expected {N} fields for {what}, found {}", toks.len()),
        ));
    }
    Ok(std::array::from_fn(|i| toks[i]))
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse an instance file of any kind.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut doc = tokenize(text)?;
    let inst = match doc.kind {
        "bipartite" => Instance::Bipartite(parse_bipartite(&mut doc)?),
        "general" => Instance::General(parse_general(&mut doc)?),
        "packing" => Instance::Packing(parse_packing(&mut doc)?),
        "graph" => Instance::Graph(parse_graph(&mut doc)?),
        "unit-disk" => Instance::UnitDisk(parse_unit_disk(&mut doc)?),
        "matroid" => Instance::Matroid(parse_matroid(&mut doc)?),
        other => return Err(parse_err(1, format!("unknown instance kind '{other}'"))),
    };
    doc.finish()?;
    Ok(inst)
}

fn parse_bipartite(doc: &mut RawDoc) -> Result<BipartiteInstance> {
    let (l_line, left) = doc.scalar("left")?;
    let left = parse_usize(l_line, left)?;
    let (r_line, right) = doc.scalar("right")?;
    let right = parse_usize(r_line, right)?;
    let (_, rows) = doc.section("edges")?;
    let mut edges = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let [l, r, w] = row_tokens(line, row, "an edge 'l r w'")?;
        edges.push((parse_usize(line, l)?, parse_usize(line, r)?, parse_f64(line, w)?));
    }
    BipartiteInstance::new(left, right, edges)
}

fn parse_general(doc: &mut RawDoc) -> Result<GeneralInstance> {
    let (v_line, vertices) = doc.scalar("vertices")?;
    let vertices = parse_usize(v_line, vertices)?;
    let (_, rows) = doc.section("edges")?;
    let mut edges = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let [u, v, w] = row_tokens(line, row, "an edge 'u v w'")?;
        edges.push((parse_usize(line, u)?, parse_usize(line, v)?, parse_f64(line, w)?));
    }
    GeneralInstance::new(vertices, edges)
}

fn parse_packing(doc: &mut RawDoc) -> Result<PackingInstance> {
    let cap_toks = doc.section_tokens("capacities")?;
    let mut capacities = Vec::with_capacity(cap_toks.len());
    for (line, tok) in cap_toks {
        capacities.push(parse_f64(line, tok)?);
    }
    let m = capacities.len();

    let (sec_line, rows) = doc.section("options")?;
    let mut parsed: Vec<(usize, usize, usize, f64, Vec<f64>)> = Vec::with_capacity(rows.len());
    let (mut requests, mut options) = (0usize, 0usize);
    for (line, row) in rows {
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != 3 + m {
            return Err(parse_err(
                line,
                format!(
                    "expected 'request option profit' plus {m} consumptions, found {} fields",
                    toks.len()
                ),
            ));
        }
        let j = parse_usize(line, toks[0])?;
        let k = parse_usize(line, toks[1])?;
        let profit = parse_f64(line, toks[2])?;
        let mut cons = Vec::with_capacity(m);
        for tok in &toks[3..] {
            cons.push(parse_f64(line, tok)?);
        }
        requests = requests.max(j + 1);
        options = options.max(k + 1);
        parsed.push((line, j, k, profit, cons));
    }
    if parsed.is_empty() {
        return Err(parse_err(sec_line, "section 'options' has no rows"));
    }

    let mut profits = vec![vec![f64::NAN; options]; requests];
    let mut consumption = vec![vec![Vec::new(); options]; requests];
    let mut seen = vec![vec![false; options]; requests];
    for (line, j, k, profit, cons) in parsed {
        if seen[j][k] {
            return Err(parse_err(line, format!("duplicate option row ({j}, {k})")));
        }
        seen[j][k] = true;
        profits[j][k] = profit;
        consumption[j][k] = cons;
    }
    for (j, row) in seen.iter().enumerate() {
        if let Some(k) = row.iter().position(|s| !s) {
            return Err(parse_err(sec_line, format!("missing option row ({j}, {k})")));
        }
    }
    PackingInstance::new(capacities, profits, consumption)
}

fn parse_graph(doc: &mut RawDoc) -> Result<LocalGraph> {
    let (a_line, alpha1) = doc.scalar("alpha1")?;
    let alpha1 = parse_usize(a_line, alpha1)?;
    let weight_toks = doc.section_tokens("weights")?;
    let mut weights = Vec::with_capacity(weight_toks.len());
    for (line, tok) in weight_toks {
        weights.push(parse_f64(line, tok)?);
    }
    let mut edges = Vec::new();
    if let Some((_, rows)) = doc.section_opt("edges") {
        for (line, row) in rows {
            let [u, v] = row_tokens(line, row, "an edge 'u v'")?;
            edges.push((parse_usize(line, u)?, parse_usize(line, v)?));
        }
    }
    LocalGraph::new(weights, &edges, alpha1)
}

fn parse_unit_disk(doc: &mut RawDoc) -> Result<UnitDiskInstance> {
    let (r_line, radius) = doc.scalar("radius")?;
    let radius = parse_f64(r_line, radius)?;
    let (_, rows) = doc.section("points")?;
    let mut points = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let [x, y] = row_tokens(line, row, "a point 'x y'")?;
        points.push((parse_f64(line, x)?, parse_f64(line, y)?));
    }
    let weight_toks = doc.section_tokens("weights")?;
    let mut weights = Vec::with_capacity(weight_toks.len());
    for (line, tok) in weight_toks {
        weights.push(parse_f64(line, tok)?);
    }
    UnitDiskInstance::from_points(points, weights, radius)
}

fn parse_matroid(doc: &mut RawDoc) -> Result<MatroidGround> {
    let (m_line, desc) = doc.scalar("matroid")?;
    let weight_toks = doc.section_tokens("weights")?;
    let mut weights = Vec::with_capacity(weight_toks.len());
    for (line, tok) in weight_toks {
        weights.push(parse_f64(line, tok)?);
    }
    let parts: Vec<&str> = desc.split_whitespace().collect();
    let matroid = match parts.as_slice() {
        ["uniform", k] => Matroid::uniform(weights.len(), parse_usize(m_line, k)?),
        ["partition"] => {
            let block_toks = doc.section_tokens("blocks")?;
            let mut block_of = Vec::with_capacity(block_toks.len());
            for (line, tok) in block_toks {
                block_of.push(parse_usize(line, tok)?);
            }
            let cap_toks = doc.section_tokens("capacities")?;
            let mut capacities = Vec::with_capacity(cap_toks.len());
            for (line, tok) in cap_toks {
                capacities.push(parse_usize(line, tok)?);
            }
            Matroid::partition(block_of, capacities)?
        }
        ["graphic", vertices] => {
            let vertices = parse_usize(m_line, vertices)?;
            let (_, rows) = doc.section("ends")?;
            let mut endpoints = Vec::with_capacity(rows.len());
            for (line, row) in rows {
                let [u, v] = row_tokens(line, row, "edge endpoints 'u v'")?;
                endpoints.push((parse_usize(line, u)?, parse_usize(line, v)?));
            }
            Matroid::graphic(vertices, endpoints)?
        }
        _ => {
            return Err(parse_err(
                m_line,
                format!("unknown matroid '{desc}' (expected 'uniform <k>', 'partition', or 'graphic <vertices>')"),
            ))
        }
    };
    MatroidGround::new(matroid, weights)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Render an instance in the line-oriented format. The output is canonical:
/// parsing it and serializing again reproduces the bytes exactly.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ordsec v1 {}", inst.kind());
    match inst {
        Instance::Bipartite(b) => {
            let eval = b.evaluator();
            let _ = writeln!(out, "left: {}", b.left_count());
            let _ = writeln!(out, "right: {}", b.right_count());
            out.push_str("edges:\n");
            for e in 0..b.edge_count() {
                let id = ElementId::new(e);
                let (l, r) = b.endpoints(id);
                let _ = writeln!(out, "{l} {r} {}", eval.weight(id));
            }
        }
        Instance::General(g) => {
            let eval = g.evaluator();
            let _ = writeln!(out, "vertices: {}", g.vertex_count());
            out.push_str("edges:\n");
            for e in 0..g.edge_count() {
                let id = ElementId::new(e);
                let (u, v) = g.endpoints(id);
                let _ = writeln!(out, "{u} {v} {}", eval.weight(id));
            }
        }
        Instance::Packing(p) => {
            let eval = p.profit_evaluator();
            out.push_str("capacities:\n");
            let caps: Vec<String> =
                (0..p.resource_count()).map(|i| p.capacity(i).to_string()).collect();
            let _ = writeln!(out, "{}", caps.join(" "));
            out.push_str("options:\n");
            for j in 0..p.request_count() {
                for k in 0..p.option_count() {
                    let _ = write!(out, "{j} {k} {}", eval.weight(p.flat_id(j, k)));
                    for i in 0..p.resource_count() {
                        let _ = write!(out, " {}", p.consumption(j, k, i));
                    }
                    out.push('\n');
                }
            }
        }
        Instance::Graph(g) => {
            let eval = g.evaluator();
            let _ = writeln!(out, "alpha1: {}", g.alpha1());
            out.push_str("weights:\n");
            for v in 0..g.vertex_count() {
                let _ = writeln!(out, "{}", eval.weight(ElementId::new(v)));
            }
            out.push_str("edges:\n");
            for u in 0..g.vertex_count() {
                for &v in g.neighbors(u) {
                    if u < v {
                        let _ = writeln!(out, "{u} {v}");
                    }
                }
            }
        }
        Instance::UnitDisk(d) => {
            let eval = d.graph().evaluator();
            let _ = writeln!(out, "radius: {}", d.radius);
            out.push_str("points:\n");
            for (x, y) in &d.points {
                let _ = writeln!(out, "{x} {y}");
            }
            out.push_str("weights:\n");
            for v in 0..d.graph().vertex_count() {
                let _ = writeln!(out, "{}", eval.weight(ElementId::new(v)));
            }
        }
        Instance::Matroid(m) => {
            let eval = m.evaluator();
            match m.matroid() {
                Matroid::Uniform { k, .. } => {
                    let _ = writeln!(out, "matroid: uniform {k}");
                }
                Matroid::Partition { .. } => out.push_str("matroid: partition\n"),
                Matroid::Graphic { vertices, .. } => {
                    let _ = writeln!(out, "matroid: graphic {vertices}");
                }
            }
            out.push_str("weights:\n");
            for e in 0..m.element_count() {
                let _ = writeln!(out, "{}", eval.weight(ElementId::new(e)));
            }
            match m.matroid() {
                Matroid::Uniform { .. } => {}
                Matroid::Partition { block_of, capacities } => {
                    out.push_str("blocks:\n");
                    let blocks: Vec<String> = block_of.iter().map(|b| b.to_string()).collect();
                    let _ = writeln!(out, "{}", blocks.join(" "));
                    out.push_str("capacities:\n");
                    let caps: Vec<String> = capacities.iter().map(|c| c.to_string()).collect();
                    let _ = writeln!(out, "{}", caps.join(" "));
                }
                Matroid::Graphic { endpoints, .. } => {
                    out.push_str("ends:\n");
                    for (u, v) in endpoints {
                        let _ = writeln!(out, "{u} {v}");
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(inst: &Instance) -> String {
        let text = serialize_instance(inst);
        let reparsed = parse_instance(&text).expect("serialized instance must parse");
        let again = serialize_instance(&reparsed);
        assert_eq!(text, again, "serialize → parse → serialize must be byte-identical");
        text
    }

    #[test]
    fn bipartite_roundtrip_is_byte_identical() {
        let inst = BipartiteInstance::new(
            3,
            4,
            vec![(0, 2, 0.1 + 0.2), (1, 3, 0.25), (2, 0, 1.0), (0, 2, 0.5)],
        )
        .unwrap();
        let text = roundtrip(&Instance::Bipartite(inst));
        // The awkward decimal expansion of 0.1 + 0.2 must survive exactly.
        assert!(text.contains("0 2 0.30000000000000004"));
        assert!(text.starts_with("ordsec v1 bipartite\nleft: 3\nright: 4\nedges:\n"));
    }

    #[test]
    fn general_roundtrip_is_byte_identical() {
        let inst = GeneralInstance::new(
            5,
            vec![(0, 1, 0.5), (2, 3, 1.0 / 3.0), (1, 4, 0.875)],
        )
        .unwrap();
        roundtrip(&Instance::General(inst));
    }

    #[test]
    fn packing_roundtrip_is_byte_identical() {
        let inst = PackingInstance::new(
            vec![1.5, 2.0],
            vec![vec![1.0, 0.5], vec![0.25, 0.75]],
            vec![
                vec![vec![0.5, 0.0], vec![0.0, 1.0]],
                vec![vec![0.25, 0.25], vec![1.0, 0.0]],
            ],
        )
        .unwrap();
        let text = roundtrip(&Instance::Packing(inst));
        assert!(text.contains("capacities:\n1.5 2\n"));
        assert!(text.contains("0 0 1 0.5 0\n"));
    }

    #[test]
    fn graph_roundtrip_is_byte_identical() {
        let inst = LocalGraph::new(vec![0.5, 0.125, 1.0], &[(0, 1), (1, 2)], 2).unwrap();
        let text = roundtrip(&Instance::Graph(inst));
        assert!(text.contains("alpha1: 2"));
    }

    #[test]
    fn edgeless_graph_roundtrips() {
        let inst = LocalGraph::new(vec![0.5, 0.25], &[], 1).unwrap();
        roundtrip(&Instance::Graph(inst));
    }

    #[test]
    fn unit_disk_roundtrip_is_byte_identical() {
        let inst = UnitDiskInstance::from_points(
            vec![(0.0, 0.0), (0.5, 0.5), (3.0, 3.0)],
            vec![0.25, 0.5, 0.75],
            1.0,
        )
        .unwrap();
        let text = roundtrip(&Instance::UnitDisk(inst));
        assert!(text.contains("radius: 1\npoints:\n0 0\n0.5 0.5\n3 3\n"));
    }

    #[test]
    fn matroid_roundtrips_for_all_kinds() {
        let uniform = MatroidGround::new(Matroid::uniform(4, 2), vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        roundtrip(&Instance::Matroid(uniform));

        let partition = MatroidGround::new(
            Matroid::partition(vec![0, 0, 1, 1, 1], vec![1, 2]).unwrap(),
            vec![5.0, 4.0, 3.0, 2.0, 1.0],
        )
        .unwrap();
        roundtrip(&Instance::Matroid(partition));

        let graphic = MatroidGround::new(
            Matroid::graphic(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap(),
            vec![1.0, 2.0, 3.0],
        )
        .unwrap();
        roundtrip(&Instance::Matroid(graphic));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# a full-line comment\nordsec v1 general # trailing comment\n\nvertices: 3\nedges:\n# interior comment\n0 1 0.5   # trailing\n\n1 2 0.25\n";
        let inst = parse_instance(text).unwrap();
        match &inst {
            Instance::General(g) => {
                assert_eq!(g.vertex_count(), 3);
                assert_eq!(g.edge_count(), 2);
            }
            other => panic!("parsed wrong kind {}", other.kind()),
        }
    }

    #[test]
    fn malformed_documents_report_line_numbers() {
        let cases: &[(&str, usize)] = &[
            ("not a header\n", 1),
            ("ordsec v2 general\n", 1),
            ("ordsec v1 nonsense\nvertices: 1\n", 1),
            ("ordsec v1 general\nvertices: 3\n0 1 0.5\n", 3),
            ("ordsec v1 general\nvertices: three\nedges:\n0 1 0.5\n", 2),
            ("ordsec v1 general\nvertices: 3\nedges:\n0 1 oops\n", 4),
            ("ordsec v1 general\nvertices: 3\nedges:\n0 1\n", 4),
            ("ordsec v1 general\nvertices: 3\nedges:\n0 1 inf\n", 4),
            ("ordsec v1 general\nvertices: 3\nvertices: 4\nedges:\n0 1 0.5\n", 3),
            ("ordsec v1 general\nvertices: 3\nedges:\n0 1 0.5\nbogus: 7\n", 5),
            ("ordsec v1 general\nvertices: 3\nedges:\n0 1 0.5\nextra:\n1 2\n", 5),
        ];
        for (text, want_line) in cases {
            match parse_instance(text) {
                Err(Error::Parse { line, .. }) => {
                    assert_eq!(line, *want_line, "wrong line for {text:?}")
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn missing_required_pieces_are_errors() {
        assert!(matches!(
            parse_instance("ordsec v1 general\nedges:\n0 1 0.5\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_instance("ordsec v1 general\nvertices: 3\n"),
            Err(Error::Parse { .. })
        ));
        // A structurally valid file with a semantic defect surfaces the
        // instance constructor's own validation.
        assert!(matches!(
            parse_instance("ordsec v1 general\nvertices: 3\nedges:\n0 5 0.5\n"),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn packing_grid_must_be_complete_and_unique() {
        let missing = "ordsec v1 packing\ncapacities:\n1\noptions:\n0 0 1 0.5\n0 1 1 0.5\n1 0 1 0.5\n";
        assert!(matches!(parse_instance(missing), Err(Error::Parse { .. })));
        let dup = "ordsec v1 packing\ncapacities:\n1\noptions:\n0 0 1 0.5\n0 0 2 0.5\n";
        assert!(matches!(parse_instance(dup), Err(Error::Parse { .. })));
    }
}
