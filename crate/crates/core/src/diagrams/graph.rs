//! Ribbon-diagram skeletons: vertices, interior/boundary edges and faces with
//! edge multiplicities.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub id: usize,
    #[serde(default)]
    pub marked: bool,
    #[serde(default)]
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    #[serde(default)]
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceEdge {
    pub id: usize,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Face {
    pub marked_vertex: usize,
    pub edges: Vec<FaceEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagram {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
}

/// One broken rule, naming the offending vertex, edge or face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Violation {
    DuplicateVertex { vertex: usize },
    DuplicateEdge { edge: usize },
    UnknownEndpoint { edge: usize, vertex: usize },
    UnknownFaceEdge { face: usize, edge: usize },
    UnknownMarkedVertex { face: usize, vertex: usize },
    UnmarkedDegree { vertex: usize, degree: usize },
    MarkedDegree { vertex: usize, degree: usize },
    BoundaryCount { edges: usize, vertices: usize },
    BoundaryEdgeEndpoint { edge: usize, vertex: usize },
    Multiplicity { face: usize, edge: usize, value: u8 },
    MultiplicitySum { edge: usize, total: u32 },
    MarkedNotOnFace { face: usize, vertex: usize },
    Disconnected,
    NoFaces,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DuplicateVertex { vertex } => write!(f, "vertex id {vertex} repeated"),
            Violation::DuplicateEdge { edge } => write!(f, "edge id {edge} repeated"),
            Violation::UnknownEndpoint { edge, vertex } => write!(f, "edge {edge} refers to missing vertex {vertex}"),
            Violation::UnknownFaceEdge { face, edge } => write!(f, "face {face} refers to missing edge {edge}"),
            Violation::UnknownMarkedVertex { face, vertex } => {
                write!(f, "face {face} is marked by {vertex}, which is not a marked vertex")
            }
            Violation::UnmarkedDegree { vertex, degree } => {
                write!(f, "unmarked vertex {vertex} has degree {degree} < 3")
            }
            Violation::MarkedDegree { vertex, degree } => write!(f, "marked vertex {vertex} has degree {degree} < 2"),
            Violation::BoundaryCount { edges, vertices } => {
                write!(f, "{edges} boundary edges but {vertices} boundary vertices")
            }
            Violation::BoundaryEdgeEndpoint { edge, vertex } => {
                write!(f, "boundary edge {edge} ends at interior vertex {vertex}")
            }
            Violation::Multiplicity { face, edge, value } => {
                write!(f, "face {face} lists edge {edge} with multiplicity {value} outside 0..=2")
            }
            Violation::MultiplicitySum { edge, total } => {
                write!(f, "edge {edge} borders faces {total} times instead of 2")
            }
            Violation::MarkedNotOnFace { face, vertex } => {
                write!(f, "marked vertex {vertex} does not lie on face {face}")
            }
            Violation::Disconnected => write!(f, "diagram is not connected"),
            Violation::NoFaces => write!(f, "diagram has no faces"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub typical: bool,
    /// ℓ = |E| − |V|.
    pub ell: i64,
    pub faces: usize,
    pub has_boundary: bool,
    pub violations: Vec<Violation>,
}

/// Index-based view used by the evaluators: vertices and edges renumbered 0.. in
/// file order, multiplicities as a dense face × edge table.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub vertices: usize,
    pub ends: Vec<(usize, usize)>,
    pub boundary_edge: Vec<bool>,
    pub boundary_vertex: Vec<bool>,
    /// c[j][e]
    pub c: Vec<Vec<u32>>,
}

impl Diagram {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Config { path: e.path().to_string(), message: e.inner().to_string() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serializes")
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn ell(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64
    }

    pub fn has_boundary(&self) -> bool {
        self.edges.iter().any(|e| e.boundary)
    }

    pub fn interior_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.boundary).count()
    }

    pub fn boundary_vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.boundary).count()
    }

    pub fn is_single_vertex(&self) -> bool {
        self.vertices.len() == 1 && self.edges.is_empty() && self.faces.len() == 1
    }

    pub fn validate(&self) -> ValidationReport {
        let mut bad = Vec::new();
        let mut vid = BTreeMap::new();
        for (k, v) in self.vertices.iter().enumerate() {
            if vid.insert(v.id, k).is_some() {
                bad.push(Violation::DuplicateVertex { vertex: v.id });
            }
        }
        let mut eid = BTreeMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            if eid.insert(e.id, k).is_some() {
                bad.push(Violation::DuplicateEdge { edge: e.id });
            }
        }
        let mut degree = vec![0usize; self.vertices.len()];
        for e in &self.edges {
            for end in [e.u, e.v] {
                match vid.get(&end) {
                    Some(&k) => {
                        degree[k] += 1;
                        if e.boundary && !self.vertices[k].boundary {
                            bad.push(Violation::BoundaryEdgeEndpoint { edge: e.id, vertex: end });
                        }
                    }
                    None => bad.push(Violation::UnknownEndpoint { edge: e.id, vertex: end }),
                }
            }
        }
        let single = self.is_single_vertex();
        for (v, &d) in self.vertices.iter().zip(&degree) {
            if v.marked && d < 2 && !single {
                bad.push(Violation::MarkedDegree { vertex: v.id, degree: d });
            }
            if !v.marked && d < 3 {
                bad.push(Violation::UnmarkedDegree { vertex: v.id, degree: d });
            }
        }
        let eb = self.edges.iter().filter(|e| e.boundary).count();
        let vb = self.boundary_vertex_count();
        if (eb > 0 || vb > 0) && eb != vb {
            bad.push(Violation::BoundaryCount { edges: eb, vertices: vb });
        }
        if self.faces.is_empty() {
            bad.push(Violation::NoFaces);
        }
        let mut total = vec![0u32; self.edges.len()];
        for (j, f) in self.faces.iter().enumerate() {
            let marked = vid.get(&f.marked_vertex).map(|&k| self.vertices[k].marked).unwrap_or(false);
            if !marked {
                bad.push(Violation::UnknownMarkedVertex { face: j, vertex: f.marked_vertex });
            }
            let mut on_face = single;
            for fe in &f.edges {
                if fe.multiplicity > 2 {
                    bad.push(Violation::Multiplicity { face: j, edge: fe.id, value: fe.multiplicity });
                }
                match eid.get(&fe.id) {
                    Some(&k) => {
                        total[k] += fe.multiplicity as u32;
                        let e = &self.edges[k];
                        if fe.multiplicity > 0 && (e.u == f.marked_vertex || e.v == f.marked_vertex) {
                            on_face = true;
                        }
                    }
                    None => bad.push(Violation::UnknownFaceEdge { face: j, edge: fe.id }),
                }
            }
            if marked && !on_face {
                bad.push(Violation::MarkedNotOnFace { face: j, vertex: f.marked_vertex });
            }
        }
        for (e, &t) in self.edges.iter().zip(&total) {
            if t != 2 {
                bad.push(Violation::MultiplicitySum { edge: e.id, total: t });
            }
        }
        if !self.connected(&vid) {
            bad.push(Violation::Disconnected);
        }

        let valid = bad.is_empty();
        let s = self.faces.len();
        let marked = self.vertices.iter().filter(|v| v.marked).count();
        let ell = self.ell();
        let typical = valid
            && (single
                || (marked == s
                    && self.vertices.iter().zip(&degree).all(|(v, &d)| if v.marked { d == 2 } else { d == 3 })
                    && ell >= 0
                    && self.edges.len() as i64 == 3 * ell + s as i64
                    && self.vertices.len() as i64 == 2 * ell + s as i64));
        ValidationReport { valid, typical, ell, faces: s, has_boundary: eb > 0, violations: bad }
    }

    fn connected(&self, vid: &BTreeMap<usize, usize>) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            if let (Some(&a), Some(&b)) = (vid.get(&e.u), vid.get(&e.v)) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = BTreeSet::from([0usize]);
        let mut stack = vec![0usize];
        while let Some(a) = stack.pop() {
            for &b in &adj[a] {
                if seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Fails with the first violation if the diagram is invalid.
    pub fn ensure_valid(&self) -> Result<ValidationReport> {
        let r = self.validate();
        match r.violations.first() {
            Some(v) => Err(Error::invalid(format!("invalid diagram: {v}"))),
            None => Ok(r),
        }
    }

    pub(crate) fn layout(&self) -> Result<Layout> {
        self.ensure_valid()?;
        let vid: BTreeMap<usize, usize> = self.vertices.iter().enumerate().map(|(k, v)| (v.id, k)).collect();
        let eid: BTreeMap<usize, usize> = self.edges.iter().enumerate().map(|(k, e)| (e.id, k)).collect();
        let mut c = vec![vec![0u32; self.edges.len()]; self.faces.len()];
        for (j, f) in self.faces.iter().enumerate() {
            for fe in &f.edges {
                c[j][eid[&fe.id]] += fe.multiplicity as u32;
            }
        }
        Ok(Layout {
            vertices: self.vertices.len(),
            ends: self.edges.iter().map(|e| (vid[&e.u], vid[&e.v])).collect(),
            boundary_edge: self.edges.iter().map(|e| e.boundary).collect(),
            boundary_vertex: self.vertices.iter().map(|v| v.boundary).collect(),
            c,
        })
    }
}

pub fn validate_diagram(g: &Diagram) -> ValidationReport {
    g.validate()
}

const CATALOG: [(&str, &str); 5] = [
    ("single_vertex", include_str!("../../catalog/single_vertex.json")),
    ("self_loop", include_str!("../../catalog/self_loop.json")),
    ("theta", include_str!("../../catalog/theta.json")),
    ("dumbbell", include_str!("../../catalog/dumbbell.json")),
    ("two_face_bridge", include_str!("../../catalog/two_face_bridge.json")),
];

pub fn catalog_names() -> Vec<&'static str> {
    CATALOG.iter().map(|c| c.0).collect()
}

pub fn catalog_diagram(name: &str) -> Result<Diagram> {
    let (_, text) = CATALOG
        .iter()
        .find(|c| c.0 == name)
        .ok_or_else(|| Error::invalid(format!("no catalog diagram named {name:?}; known: {:?}", catalog_names())))?;
    Diagram::from_json(text)
}

pub fn catalog() -> Vec<(&'static str, Diagram)> {
    CATALOG.iter().map(|(n, t)| (*n, Diagram::from_json(t).expect("catalog diagrams parse"))).collect()
}
