//! Plabic graphs embedded in the disc.
//!
//! A graph lives in a disc with `n` marked boundary points numbered
//! clockwise. Internal nodes are colored black or white; edges join
//! nodes of opposite colors; each marked point carries exactly one leg
//! to an internal node. The embedding is recorded as a rotation system:
//! for every node, the counterclockwise cyclic order of its edge-ends.
//!
//! From the rotation system everything else is derived combinatorially:
//! faces (via face-on-left traversal against a boundary augmentation),
//! zig-zag strands (turn maximally right at black, maximally left at
//! white), the strand permutation, axiom diagnostics, and the source
//! labelling of faces by the strands passing on their left.

use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

/// Node color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

/// One end of the rotation at a node: either an incident edge or a leg
/// to marked point `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Edge(usize),
    Leg(usize),
}

/// An internal node with its counterclockwise rotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub color: Color,
    /// Counterclockwise cyclic order of incident ends.
    pub rot: Vec<End>,
}

/// An edge between two internal nodes (indices into `nodes`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// A plabic graph on the disc with `n` marked boundary points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlabicGraph {
    pub n: usize,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// `legs[k-1]` = node index attached to marked point `k`.
    pub legs: Vec<usize>,
}

/// A directed side of the boundary-augmented map. Faces are the orbits
/// of sides under the face-on-left step; each directed side lies on the
/// boundary of exactly one face (the face to its left).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// Edge `edge` traversed from `a` to `b` (`from_a`) or back.
    Edge { edge: usize, from_a: bool },
    /// Leg of marked point `k` traversed inward (boundary to node).
    LegIn(usize),
    /// Leg of marked point `k` traversed outward (node to boundary).
    LegOut(usize),
    /// Boundary arc between marked points `k` and `k+1`, traversed
    /// from `k` to `k+1` (`fwd`) or back.
    Arc { k: usize, fwd: bool },
}

/// A face of the embedded graph (the outer face is excluded).
#[derive(Clone, Debug)]
pub struct Face {
    /// The directed sides having this face on their left, in orbit order.
    pub sides: Vec<Side>,
    /// For a boundary face, the arc `(k, k+1)` it touches (stored as `k`).
    pub arc: Option<usize>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.arc.is_some()
    }

    /// Internal nodes on the face boundary, in orbit order, one entry
    /// per corner (an edge side contributes its head node).
    pub fn corner_nodes(&self, g: &PlabicGraph) -> Vec<usize> {
        let mut out = Vec::new();
        for s in &self.sides {
            match *s {
                Side::Edge { edge, from_a } => {
                    let e = g.edges[edge];
                    out.push(if from_a { e.b } else { e.a });
                }
                Side::LegIn(k) => out.push(g.legs[k - 1]),
                _ => {}
            }
        }
        out
    }
}

/// The face decomposition of a plabic graph.
#[derive(Clone, Debug)]
pub struct Faces {
    pub faces: Vec<Face>,
    side_face: BTreeMap<Side, usize>,
    /// `arc_face[k-1]` = index of the boundary face at arc `(k, k+1)`.
    arc_face: Vec<usize>,
}

impl Faces {
    /// The face lying to the left of a directed side.
    pub fn face_of(&self, s: Side) -> Option<usize> {
        self.side_face.get(&s).copied()
    }

    /// Boundary face at the arc between marked points `k` and `k+1`.
    pub fn at_arc(&self, k: usize) -> usize {
        self.arc_face[k - 1]
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }
}

/// A zig-zag strand from one marked point to another.
#[derive(Clone, Debug)]
pub struct Strand {
    pub source: usize,
    pub target: usize,
    /// Directed edge traversals in order: `(edge index, from_a)`.
    pub steps: Vec<(usize, bool)>,
    /// Turn nodes visited, aligned with `steps` boundaries: the node
    /// entered after step `i` is `nodes[i]`; `nodes[0]` is the node the
    /// leg attaches to.
    pub nodes: Vec<usize>,
}

/// A crossing point of strands: an internal edge, or the leg at a
/// marked point (where the starting and ending strand meet).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Crossing {
    Edge(usize),
    Leg(usize),
}

impl Strand {
    /// Crossings in traversal order, boundary legs included.
    pub fn crossings(&self) -> Vec<Crossing> {
        let mut out = Vec::with_capacity(self.steps.len() + 2);
        out.push(Crossing::Leg(self.source));
        out.extend(self.steps.iter().map(|&(e, _)| Crossing::Edge(e)));
        out.push(Crossing::Leg(self.target));
        out
    }
}

/// Outcome of one axiom check.
#[derive(Clone, Debug)]
pub struct AxiomStatus {
    pub passed: bool,
    pub detail: String,
}

impl AxiomStatus {
    fn pass(detail: impl Into<String>) -> Self {
        AxiomStatus {
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        AxiomStatus {
            passed: false,
            detail: detail.into(),
        }
    }
}

/// Full diagnostic report of the diagram axioms.
#[derive(Clone, Debug)]
pub struct DiagramReport {
    /// Strand walks terminate, endpoints form a permutation, and every
    /// directed edge side is traversed by exactly one strand (which
    /// rules out closed zig-zag loops).
    pub p0: AxiomStatus,
    /// Each internal edge carries exactly two strand passages, in
    /// opposite directions.
    pub p1: AxiomStatus,
    /// Crossing signs alternate along every strand.
    pub p2: AxiomStatus,
    /// No strand crosses itself at an internal edge.
    pub p3: AxiomStatus,
    /// Two strands cross any pair of common points in opposite orders.
    pub p4: AxiomStatus,
    /// The union of graph and boundary is connected.
    pub connected: AxiomStatus,
    /// The rotation system embeds in the disc (Euler count).
    pub planar: AxiomStatus,
}

impl DiagramReport {
    pub fn all_passed(&self) -> bool {
        self.p0.passed
            && self.p1.passed
            && self.p2.passed
            && self.p3.passed
            && self.p4.passed
            && self.connected.passed
            && self.planar.passed
    }
}

impl fmt::Display for DiagramReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |f: &mut fmt::Formatter<'_>, name: &str, s: &AxiomStatus| {
            writeln!(
                f,
                "{}: {} ({})",
                name,
                if s.passed { "ok" } else { "VIOLATED" },
                s.detail
            )
        };
        line(f, "P0 strands", &self.p0)?;
        line(f, "P1 edge coverage", &self.p1)?;
        line(f, "P2 sign alternation", &self.p2)?;
        line(f, "P3 no self-crossing", &self.p3)?;
        line(f, "P4 double crossings", &self.p4)?;
        line(f, "connectivity", &self.connected)?;
        line(f, "planarity", &self.planar)
    }
}

impl PlabicGraph {
    /// Ends incident to node `v`, as an unordered multiset.
    fn incident_ends(&self, v: usize) -> Vec<End> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.a == v || e.b == v {
                out.push(End::Edge(i));
            }
        }
        for (k0, &node) in self.legs.iter().enumerate() {
            if node == v {
                out.push(End::Leg(k0 + 1));
            }
        }
        out
    }

    /// Structural validation: bipartite, complete rotations, legs cover
    /// all marked points. Run by the parser; callable on constructed
    /// graphs too.
    pub fn check_structure(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::Invalid(format!(
                "need at least 3 marked points, got {}",
                self.n
            )));
        }
        if self.legs.len() != self.n {
            return Err(Error::Invalid(format!(
                "expected {} legs, got {}",
                self.n,
                self.legs.len()
            )));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if self.nodes[e.a].color == self.nodes[e.b].color {
                return Err(Error::Invalid(format!(
                    "edge {} joins two {} nodes ({} and {})",
                    i,
                    if self.nodes[e.a].color == Color::Black {
                        "black"
                    } else {
                        "white"
                    },
                    self.nodes[e.a].name,
                    self.nodes[e.b].name
                )));
            }
        }
        for (v, node) in self.nodes.iter().enumerate() {
            let mut expected = self.incident_ends(v);
            let mut got = node.rot.clone();
            expected.sort();
            got.sort();
            if expected != got {
                return Err(Error::Invalid(format!(
                    "rotation of node {} does not list its incident ends exactly once",
                    node.name
                )));
            }
            if node.rot.is_empty() {
                return Err(Error::Invalid(format!(
                    "node {} has no incident ends",
                    node.name
                )));
            }
        }
        Ok(())
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|nd| nd.name == name)
    }

    /// Position of end `e` in the rotation of node `v`.
    fn rot_pos(&self, v: usize, e: End) -> usize {
        self.nodes[v]
            .rot
            .iter()
            .position(|&x| x == e)
            .expect("end missing from rotation")
    }

    /// The end preceding `e` counterclockwise at `v` (= next clockwise).
    fn cw_next(&self, v: usize, e: End) -> End {
        let rot = &self.nodes[v].rot;
        let i = self.rot_pos(v, e);
        rot[(i + rot.len() - 1) % rot.len()]
    }

    /// The end following `e` counterclockwise at `v`.
    fn ccw_next(&self, v: usize, e: End) -> End {
        let rot = &self.nodes[v].rot;
        let i = self.rot_pos(v, e);
        rot[(i + 1) % rot.len()]
    }

    fn prev_pt(&self, k: usize) -> usize {
        if k == 1 {
            self.n
        } else {
            k - 1
        }
    }

    fn next_pt(&self, k: usize) -> usize {
        if k == self.n {
            1
        } else {
            k + 1
        }
    }

    /// One face-on-left step: continue from directed side `s` along the
    /// next clockwise end at its head.
    fn face_step(&self, s: Side) -> Side {
        let continue_at = |v: usize, incoming: End| -> Side {
            match self.cw_next(v, incoming) {
                End::Edge(e) => Side::Edge {
                    edge: e,
                    from_a: self.edges[e].a == v,
                },
                End::Leg(k) => Side::LegOut(k),
            }
        };
        match s {
            Side::Edge { edge, from_a } => {
                let e = self.edges[edge];
                let head = if from_a { e.b } else { e.a };
                continue_at(head, End::Edge(edge))
            }
            Side::LegIn(k) => continue_at(self.legs[k - 1], End::Leg(k)),
            // At the virtual boundary vertex of point k the rotation is
            // [arc toward k+1, arc toward k-1, leg], counterclockwise.
            Side::LegOut(k) => Side::Arc {
                k: self.prev_pt(k),
                fwd: false,
            },
            Side::Arc { k, fwd: true } => {
                let head = self.next_pt(k);
                Side::Arc { k: head, fwd: true }
            }
            Side::Arc { k, fwd: false } => Side::LegIn(k),
        }
    }

    fn all_sides(&self) -> Vec<Side> {
        let mut out = Vec::new();
        for e in 0..self.edges.len() {
            out.push(Side::Edge {
                edge: e,
                from_a: true,
            });
            out.push(Side::Edge {
                edge: e,
                from_a: false,
            });
        }
        for k in 1..=self.n {
            out.push(Side::LegIn(k));
            out.push(Side::LegOut(k));
            out.push(Side::Arc { k, fwd: true });
            out.push(Side::Arc { k, fwd: false });
        }
        out
    }

    /// Face decomposition. Boundary faces come first, ordered by their
    /// arc; internal faces follow in a deterministic order.
    pub fn faces(&self) -> Result<Faces> {
        let mut seen: BTreeSet<Side> = BTreeSet::new();
        let mut orbits: Vec<Vec<Side>> = Vec::new();
        for start in self.all_sides() {
            if seen.contains(&start) {
                continue;
            }
            let mut orbit = vec![start];
            seen.insert(start);
            let mut cur = self.face_step(start);
            let cap = 4 * (self.edges.len() + 2 * self.n) + 4;
            while cur != start {
                if orbit.len() > cap {
                    return Err(Error::Internal("face traversal did not close".into()));
                }
                if !seen.insert(cur) {
                    return Err(Error::Internal("face orbits are not disjoint".into()));
                }
                orbit.push(cur);
                cur = self.face_step(cur);
            }
            orbits.push(orbit);
        }
        // Drop the outer face: the orbit of the forward arcs.
        let outer = Side::Arc { k: 1, fwd: true };
        orbits.retain(|o| !o.contains(&outer));

        // Classify and order: boundary faces by arc, then the rest.
        let mut boundary: Vec<(usize, Vec<Side>)> = Vec::new();
        let mut internal: Vec<Vec<Side>> = Vec::new();
        for o in orbits {
            let arcs: Vec<usize> = o
                .iter()
                .filter_map(|s| match *s {
                    Side::Arc { k, fwd: false } => Some(k),
                    _ => None,
                })
                .collect();
            match arcs.len() {
                0 => internal.push(o),
                1 => boundary.push((arcs[0], o)),
                _ => {
                    return Err(Error::Invalid(
                        "a face touches more than one boundary arc".into(),
                    ))
                }
            }
        }
        if boundary.len() != self.n {
            return Err(Error::Invalid(format!(
                "expected {} boundary faces, found {}",
                self.n,
                boundary.len()
            )));
        }
        boundary.sort_by_key(|(k, _)| *k);
        internal.sort();

        let mut faces = Vec::new();
        let mut arc_face = vec![usize::MAX; self.n];
        for (k, sides) in boundary {
            arc_face[k - 1] = faces.len();
            faces.push(Face {
                sides,
                arc: Some(k),
            });
        }
        for sides in internal {
            faces.push(Face { sides, arc: None });
        }

        let mut side_face = BTreeMap::new();
        for (i, f) in faces.iter().enumerate() {
            for &s in &f.sides {
                side_face.insert(s, i);
            }
        }
        Ok(Faces {
            faces,
            side_face,
            arc_face,
        })
    }

    /// Euler count of the augmented map: nodes - (edges + legs) + disc
    /// faces must equal 1 for a disc embedding.
    pub fn euler_ok(&self) -> Result<bool> {
        let faces = self.faces()?;
        let v = self.nodes.len() as i64;
        let e = (self.edges.len() + self.n) as i64;
        let f = faces.len() as i64;
        Ok(v - e + f == 1)
    }

    /// Trace the strand launched at marked point `k`.
    pub fn strand(&self, k: usize) -> Result<Strand> {
        let mut v = self.legs[k - 1];
        let mut incoming = End::Leg(k);
        let mut steps = Vec::new();
        let mut nodes = vec![v];
        let cap = 4 * (self.edges.len() + self.n) + 4;
        loop {
            if steps.len() > cap {
                return Err(Error::Invalid(format!(
                    "strand {} does not reach the boundary",
                    k
                )));
            }
            // Turn rule: maximally right at black (next end clockwise),
            // maximally left at white (next end counterclockwise).
            let out = match self.nodes[v].color {
                Color::Black => self.cw_next(v, incoming),
                Color::White => self.ccw_next(v, incoming),
            };
            match out {
                End::Leg(l) => {
                    return Ok(Strand {
                        source: k,
                        target: l,
                        steps,
                        nodes,
                    });
                }
                End::Edge(e) => {
                    let from_a = self.edges[e].a == v;
                    steps.push((e, from_a));
                    v = self.edges[e].other(v);
                    incoming = End::Edge(e);
                    nodes.push(v);
                }
            }
        }
    }

    /// All strands, indexed by source marked point.
    pub fn strands(&self) -> Result<Vec<Strand>> {
        (1..=self.n).map(|k| self.strand(k)).collect()
    }

    /// The strand permutation `k -> target of strand k`.
    pub fn strand_permutation(&self) -> Result<Vec<usize>> {
        Ok(self.strands()?.iter().map(|s| s.target).collect())
    }

    /// Run all axiom diagnostics.
    pub fn validate_axioms(&self) -> DiagramReport {
        let planar = match self.euler_ok() {
            Ok(true) => AxiomStatus::pass("disc Euler count holds"),
            Ok(false) => AxiomStatus::fail("Euler count wrong for a disc embedding"),
            Err(e) => AxiomStatus::fail(format!("face traversal failed: {}", e)),
        };

        let connected = self.check_connected();

        let strands: Vec<Strand> = match self.strands() {
            Ok(s) => s,
            Err(e) => {
                let fail = AxiomStatus::fail(format!("{}", e));
                return DiagramReport {
                    p0: fail.clone(),
                    p1: AxiomStatus::fail("not checked: strands incomplete"),
                    p2: AxiomStatus::fail("not checked: strands incomplete"),
                    p3: AxiomStatus::fail("not checked: strands incomplete"),
                    p4: AxiomStatus::fail("not checked: strands incomplete"),
                    connected,
                    planar,
                };
            }
        };

        let p0 = self.check_p0(&strands);
        let p1 = AxiomStatus::pass("holds by representation: directed-side coverage is part of P0");
        let p2 = AxiomStatus::pass(
            "holds by representation: colors alternate along strands, \
             boundary points act with the opposite color",
        );
        let p3 = self.check_p3(&strands);
        let p4 = self.check_p4(&strands);

        DiagramReport {
            p0,
            p1,
            p2,
            p3,
            p4,
            connected,
            planar,
        }
    }

    fn check_connected(&self) -> AxiomStatus {
        if self.nodes.is_empty() {
            return AxiomStatus::fail("no internal nodes");
        }
        // All legs attach to the boundary circle, so the union is
        // connected iff every node is reachable from some leg node.
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &v in &self.legs {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for e in &self.edges {
                if e.a == v && !seen[e.b] {
                    seen[e.b] = true;
                    queue.push_back(e.b);
                } else if e.b == v && !seen[e.a] {
                    seen[e.a] = true;
                    queue.push_back(e.a);
                }
            }
        }
        match seen.iter().position(|&s| !s) {
            None => AxiomStatus::pass("graph plus boundary is connected"),
            Some(v) => AxiomStatus::fail(format!(
                "node {} is not connected to the boundary",
                self.nodes[v].name
            )),
        }
    }

    fn check_p0(&self, strands: &[Strand]) -> AxiomStatus {
        let targets: BTreeSet<usize> = strands.iter().map(|s| s.target).collect();
        if targets.len() != self.n {
            return AxiomStatus::fail("strand endpoints do not form a permutation".to_string());
        }
        let mut used: BTreeMap<(usize, bool), usize> = BTreeMap::new();
        for s in strands {
            for &(e, d) in &s.steps {
                if let Some(prev) = used.insert((e, d), s.source) {
                    return AxiomStatus::fail(format!(
                        "strands {} and {} traverse edge {} in the same direction",
                        prev, s.source, e
                    ));
                }
            }
        }
        if used.len() != 2 * self.edges.len() {
            return AxiomStatus::fail(
                "some edge side is not traversed by any strand \
                 (closed zig-zag loop present)"
                    .to_string(),
            );
        }
        AxiomStatus::pass("all strands reach the boundary, bijectively, covering every edge side")
    }

    fn check_p3(&self, strands: &[Strand]) -> AxiomStatus {
        for s in strands {
            let mut seen = BTreeSet::new();
            for &(e, _) in &s.steps {
                if !seen.insert(e) {
                    return AxiomStatus::fail(format!(
                        "strand {} crosses edge {} twice",
                        s.source, e
                    ));
                }
            }
        }
        AxiomStatus::pass("no strand repeats an edge")
    }

    fn check_p4(&self, strands: &[Strand]) -> AxiomStatus {
        let crossings: Vec<Vec<Crossing>> = strands.iter().map(|s| s.crossings()).collect();
        for i in 0..strands.len() {
            for j in 0..strands.len() {
                if i == j {
                    continue;
                }
                let pos_j: BTreeMap<Crossing, usize> = crossings[j]
                    .iter()
                    .enumerate()
                    .map(|(p, &c)| (c, p))
                    .collect();
                let shared: Vec<(Crossing, usize)> = crossings[i]
                    .iter()
                    .filter_map(|c| pos_j.get(c).map(|&p| (*c, p)))
                    .collect();
                for w in shared.windows(2) {
                    let ((c1, p1), (c2, p2)) = (w[0], w[1]);
                    if p2 >= p1 {
                        return AxiomStatus::fail(format!(
                            "strands {} and {} cross {:?} then {:?} in the same order",
                            strands[i].source, strands[j].source, c1, c2
                        ));
                    }
                }
            }
        }
        AxiomStatus::pass("all double crossings are antiparallel")
    }

    /// Source labels of all faces: `label(f)` is the sorted set of
    /// strand sources whose strand keeps `f` on its left.
    pub fn face_labels(&self) -> Result<Vec<BTreeSet<usize>>> {
        let faces = self.faces()?;
        let strands = self.strands()?;

        // Dual adjacency: for every edge and leg, the two faces it
        // separates.
        let mut walls: Vec<(usize, usize, Crossing)> = Vec::new();
        for e in 0..self.edges.len() {
            let f1 = faces
                .face_of(Side::Edge {
                    edge: e,
                    from_a: true,
                })
                .ok_or_else(|| Error::Internal("edge side without face".into()))?;
            let f2 = faces
                .face_of(Side::Edge {
                    edge: e,
                    from_a: false,
                })
                .ok_or_else(|| Error::Internal("edge side without face".into()))?;
            walls.push((f1, f2, Crossing::Edge(e)));
        }
        for k in 1..=self.n {
            let f1 = faces
                .face_of(Side::LegIn(k))
                .ok_or_else(|| Error::Internal("leg side without face".into()))?;
            let f2 = faces
                .face_of(Side::LegOut(k))
                .ok_or_else(|| Error::Internal("leg side without face".into()))?;
            walls.push((f1, f2, Crossing::Leg(k)));
        }

        let mut labels: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); faces.len()];
        for s in &strands {
            let crossed: BTreeSet<Crossing> = s.crossings().into_iter().collect();
            // Two-color the dual graph: faces on the same side of the
            // strand share a color; walls crossed by the strand flip it.
            let mut side: Vec<Option<bool>> = vec![None; faces.len()];
            side[0] = Some(false);
            let mut changed = true;
            while changed {
                changed = false;
                for &(f1, f2, c) in &walls {
                    let flip = crossed.contains(&c);
                    match (side[f1], side[f2]) {
                        (Some(a), None) => {
                            side[f2] = Some(a ^ flip);
                            changed = true;
                        }
                        (None, Some(b)) => {
                            side[f1] = Some(b ^ flip);
                            changed = true;
                        }
                        (Some(a), Some(b)) => {
                            if (a ^ flip) != b {
                                return Err(Error::Invalid(format!(
                                    "strand {} does not separate the disc",
                                    s.source
                                )));
                            }
                        }
                        (None, None) => {}
                    }
                }
            }
            if side.iter().any(|x| x.is_none()) {
                return Err(Error::Invalid(
                    "face adjacency graph is disconnected".into(),
                ));
            }
            // The face touching the arc clockwise-next from the source
            // is on the strand's left as it launches.
            let left_anchor = faces.at_arc(s.source);
            let left_color = side[left_anchor].unwrap();
            for (f, &color) in side.iter().enumerate() {
                if color == Some(left_color) {
                    labels[f].insert(s.source);
                }
            }
        }
        Ok(labels)
    }

    /// The type `(k, n)`: every face label has the same size `k`.
    pub fn diagram_type(&self) -> Result<(usize, usize)> {
        let labels = self.face_labels()?;
        let sizes: BTreeSet<usize> = labels.iter().map(|l| l.len()).collect();
        if sizes.len() != 1 {
            return Err(Error::Invalid(format!(
                "face labels have mixed sizes {:?}",
                sizes
            )));
        }
        Ok((sizes.into_iter().next().unwrap(), self.n))
    }

    /// Serialize back to the text format.
    pub fn serialize(&self) -> String {
        let mut out = String::from("plabic v1\n");
        out.push_str(&format!("n {}\n", self.n));
        for node in &self.nodes {
            out.push_str(&format!(
                "node {} {}\n",
                node.name,
                match node.color {
                    Color::Black => "b",
                    Color::White => "w",
                }
            ));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {}\n",
                self.nodes[e.a].name, self.nodes[e.b].name
            ));
        }
        for (k0, &v) in self.legs.iter().enumerate() {
            out.push_str(&format!("leg {} {}\n", k0 + 1, self.nodes[v].name));
        }
        for (v, node) in self.nodes.iter().enumerate() {
            let ends: Vec<String> = node
                .rot
                .iter()
                .map(|&end| match end {
                    End::Leg(k) => format!("B{}", k),
                    End::Edge(e) => {
                        let other = self.edges[e].other(v);
                        let parallel: Vec<usize> = (0..self.edges.len())
                            .filter(|&i| {
                                let ei = self.edges[i];
                                (ei.a == v && ei.b == other) || (ei.b == v && ei.a == other)
                            })
                            .collect();
                        if parallel.len() == 1 {
                            self.nodes[other].name.clone()
                        } else {
                            let j = parallel.iter().position(|&i| i == e).unwrap() + 1;
                            format!("{}#{}", self.nodes[other].name, j)
                        }
                    }
                })
                .collect();
            out.push_str(&format!("rot {}: {}\n", node.name, ends.join(" ")));
        }
        out
    }
}

/// Parse a `plabic v1` document.
pub fn parse_plabic(text: &str) -> Result<PlabicGraph> {
    let mut lines: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        // '#' starts a comment at the beginning of a line or after
        // whitespace; inside a token it is the multi-edge separator.
        let mut cut = raw.len();
        let bytes = raw.as_bytes();
        for (j, &b) in bytes.iter().enumerate() {
            if b == b'#' && (j == 0 || bytes[j - 1].is_ascii_whitespace()) {
                cut = j;
                break;
            }
        }
        let stripped = raw[..cut].trim();
        if !stripped.is_empty() {
            lines.push((i + 1, stripped.to_string()));
        }
    }

    let err = |line: usize, msg: String| Error::Parse { line, msg };

    let Some((first_no, first)) = lines.first() else {
        return Err(err(1, "empty document".into()));
    };
    if first != "plabic v1" {
        return Err(err(*first_no, "expected header 'plabic v1'".into()));
    }

    let mut n: Option<usize> = None;
    let mut nodes: Vec<Node> = Vec::new();
    let mut name_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut leg_map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rot_lines: Vec<(usize, String, Vec<String>)> = Vec::new();

    let valid_name = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric());

    for (line_no, line) in lines.iter().skip(1) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "n" => {
                if toks.len() != 2 {
                    return Err(err(*line_no, "expected 'n <count>'".into()));
                }
                let v: usize = toks[1]
                    .parse()
                    .map_err(|_| err(*line_no, "bad marked-point count".into()))?;
                if n.replace(v).is_some() {
                    return Err(err(*line_no, "duplicate 'n' line".into()));
                }
            }
            "node" => {
                if toks.len() != 3 {
                    return Err(err(*line_no, "expected 'node <id> <b|w>'".into()));
                }
                let name = toks[1].to_string();
                if !valid_name(&name) {
                    return Err(err(*line_no, format!("bad node id '{}'", name)));
                }
                if name.starts_with('B')
                    && name[1..].chars().all(|c| c.is_ascii_digit())
                    && name.len() > 1
                {
                    return Err(err(
                        *line_no,
                        format!("node id '{}' collides with boundary references", name),
                    ));
                }
                let color = match toks[2] {
                    "b" => Color::Black,
                    "w" => Color::White,
                    other => return Err(err(*line_no, format!("bad color '{}'", other))),
                };
                if name_index.contains_key(&name) {
                    return Err(err(*line_no, format!("duplicate node '{}'", name)));
                }
                name_index.insert(name.clone(), nodes.len());
                nodes.push(Node {
                    name,
                    color,
                    rot: Vec::new(),
                });
            }
            "edge" => {
                if toks.len() != 3 {
                    return Err(err(*line_no, "expected 'edge <id1> <id2>'".into()));
                }
                let a = *name_index
                    .get(toks[1])
                    .ok_or_else(|| err(*line_no, format!("unknown node '{}'", toks[1])))?;
                let b = *name_index
                    .get(toks[2])
                    .ok_or_else(|| err(*line_no, format!("unknown node '{}'", toks[2])))?;
                if a == b {
                    return Err(err(*line_no, "self-loop edge".into()));
                }
                edges.push(Edge { a, b });
            }
            "leg" => {
                if toks.len() != 3 {
                    return Err(err(*line_no, "expected 'leg <k> <id>'".into()));
                }
                let k: usize = toks[1]
                    .parse()
                    .map_err(|_| err(*line_no, "bad marked point".into()))?;
                let v = *name_index
                    .get(toks[2])
                    .ok_or_else(|| err(*line_no, format!("unknown node '{}'", toks[2])))?;
                if leg_map.insert(k, v).is_some() {
                    return Err(err(*line_no, format!("duplicate leg for point {}", k)));
                }
            }
            "rot" => {
                if toks.len() < 3 || !toks[1].ends_with(':') {
                    return Err(err(*line_no, "expected 'rot <id>: <end> <end> ...'".into()));
                }
                let name = toks[1].trim_end_matches(':').to_string();
                if !name_index.contains_key(&name) {
                    return Err(err(*line_no, format!("unknown node '{}'", name)));
                }
                rot_lines.push((
                    *line_no,
                    name,
                    toks[2..].iter().map(|s| s.to_string()).collect(),
                ));
            }
            other => {
                return Err(err(*line_no, format!("unknown directive '{}'", other)));
            }
        }
    }

    let n = n.ok_or_else(|| err(0, "missing 'n' line".into()))?;
    let mut legs = Vec::with_capacity(n);
    for k in 1..=n {
        let v = leg_map
            .get(&k)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("marked point {} has no leg", k)))?;
        legs.push(v);
    }
    for &k in leg_map.keys() {
        if k == 0 || k > n {
            return Err(Error::Invalid(format!(
                "leg for marked point {} out of range 1..={}",
                k, n
            )));
        }
    }

    // Resolve rotations.
    let mut rots: BTreeMap<usize, Vec<End>> = BTreeMap::new();
    for (line_no, name, toks) in rot_lines {
        let v = name_index[&name];
        let mut ends = Vec::new();
        for tok in &toks {
            if let Some(rest) = tok.strip_prefix('B') {
                if let Ok(k) = rest.parse::<usize>() {
                    if k == 0 || k > n || legs.get(k - 1) != Some(&v) {
                        return Err(err(
                            line_no,
                            format!("node {} has no leg to point {}", name, k),
                        ));
                    }
                    ends.push(End::Leg(k));
                    continue;
                }
            }
            let (neighbor, which) = match tok.split_once('#') {
                Some((nb, j)) => {
                    let j: usize = j
                        .parse()
                        .map_err(|_| err(line_no, format!("bad multi-edge suffix in '{}'", tok)))?;
                    (nb.to_string(), Some(j))
                }
                None => (tok.to_string(), None),
            };
            let u = *name_index
                .get(&neighbor)
                .ok_or_else(|| err(line_no, format!("unknown node '{}'", neighbor)))?;
            let parallel: Vec<usize> = (0..edges.len())
                .filter(|&i| {
                    (edges[i].a == v && edges[i].b == u) || (edges[i].b == v && edges[i].a == u)
                })
                .collect();
            let e = match (parallel.len(), which) {
                (0, _) => {
                    return Err(err(
                        line_no,
                        format!("no edge between {} and {}", name, neighbor),
                    ))
                }
                (1, None) => parallel[0],
                (_, Some(j)) if j >= 1 && j <= parallel.len() => parallel[j - 1],
                (_, None) => {
                    return Err(err(
                        line_no,
                        format!(
                            "ambiguous reference '{}': {} parallel edges, use #<j>",
                            tok,
                            parallel.len()
                        ),
                    ))
                }
                (_, Some(j)) => {
                    return Err(err(line_no, format!("multi-edge index {} out of range", j)))
                }
            };
            ends.push(End::Edge(e));
        }
        if rots.insert(v, ends).is_some() {
            return Err(err(line_no, format!("duplicate rot line for {}", name)));
        }
    }

    for (v, node) in nodes.iter_mut().enumerate() {
        node.rot = rots
            .remove(&v)
            .ok_or_else(|| Error::Invalid(format!("node {} has no rot line", node.name)))?;
    }

    let g = PlabicGraph {
        n,
        nodes,
        edges,
        legs,
    };
    g.check_structure()?;
    Ok(g)
}
