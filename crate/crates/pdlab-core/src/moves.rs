//! Local moves on plabic graphs: the square move (urban renewal) and
//! bivalent-node normalization, plus a canonical form for
//! boundary-fixing isomorphism tests.

use crate::error::{Error, Result};
use crate::plabic::{Color, End, Node, PlabicGraph, Side};
use crate::quiver::label_string;
use std::collections::{BTreeMap, BTreeSet};

/// Parse a face label argument ("25" for n <= 9, or "2,5").
pub fn parse_label(arg: &str, n: usize) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    if arg.contains(',') {
        for part in arg.split(',') {
            let v: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::NotFound(format!("bad label '{}'", arg)))?;
            out.insert(v);
        }
    } else {
        for c in arg.chars() {
            let v = c
                .to_digit(10)
                .ok_or_else(|| Error::NotFound(format!("bad label '{}'", arg)))?;
            out.insert(v as usize);
        }
    }
    if out.is_empty() || out.iter().any(|&v| v == 0 || v > n) {
        return Err(Error::NotFound(format!("label '{}' out of range", arg)));
    }
    Ok(out)
}

/// Mutable working copy of a graph where edges can be deleted and nodes
/// fused without invalidating references.
struct Builder {
    n: usize,
    /// name, color, rotation over edge slots / legs; None = deleted.
    nodes: Vec<Option<(String, Color, Vec<BEnd>)>>,
    /// Edge slots; None = deleted.
    edges: Vec<Option<(usize, usize)>>,
    legs: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum BEnd {
    Edge(usize),
    Leg(usize),
}

impl Builder {
    fn from_graph(g: &PlabicGraph) -> Builder {
        Builder {
            n: g.n,
            nodes: g
                .nodes
                .iter()
                .map(|nd| {
                    Some((
                        nd.name.clone(),
                        nd.color,
                        nd.rot
                            .iter()
                            .map(|&e| match e {
                                End::Edge(i) => BEnd::Edge(i),
                                End::Leg(k) => BEnd::Leg(k),
                            })
                            .collect(),
                    ))
                })
                .collect(),
            edges: g.edges.iter().map(|e| Some((e.a, e.b))).collect(),
            legs: g.legs.clone(),
        }
    }

    fn fresh_name(&self, base: &str) -> String {
        let existing: BTreeSet<&str> = self
            .nodes
            .iter()
            .flatten()
            .map(|(n, _, _)| n.as_str())
            .collect();
        if !existing.contains(base) {
            return base.to_string();
        }
        for i in 2.. {
            let cand = format!("{}{}", base, i);
            if !existing.contains(cand.as_str()) {
                return cand;
            }
        }
        unreachable!()
    }

    fn add_node(&mut self, name: String, color: Color) -> usize {
        self.nodes.push(Some((name, color, Vec::new())));
        self.nodes.len() - 1
    }

    fn add_edge(&mut self, a: usize, b: usize) -> usize {
        self.edges.push(Some((a, b)));
        self.edges.len() - 1
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e].expect("deleted edge");
        if a == v {
            b
        } else {
            a
        }
    }

    /// Fuse bivalent nodes whose two ends are both internal edges.
    /// Leg-attached bivalent nodes are kept.
    fn normalize(&mut self) -> Result<()> {
        loop {
            let mut target = None;
            for (v, nd) in self.nodes.iter().enumerate() {
                if let Some((_, _, rot)) = nd {
                    if rot.len() == 2 {
                        if let (BEnd::Edge(e1), BEnd::Edge(e2)) = (rot[0], rot[1]) {
                            target = Some((v, e1, e2));
                            break;
                        }
                    }
                }
            }
            let Some((x, e1, e2)) = target else {
                return Ok(());
            };
            let a = self.other(e1, x);
            let b = self.other(e2, x);
            if a == b {
                return Err(Error::Unsupported(
                    "normalization would create a self-loop".into(),
                ));
            }
            // Splice b's rotation into a's at the contracted corridor.
            let rot_b = self.nodes[b].as_ref().unwrap().2.clone();
            let pos_b = rot_b
                .iter()
                .position(|&e| e == BEnd::Edge(e2))
                .ok_or_else(|| Error::Internal("edge missing from rotation".into()))?;
            let mut splice: Vec<BEnd> = Vec::new();
            for i in 1..rot_b.len() {
                splice.push(rot_b[(pos_b + i) % rot_b.len()]);
            }
            {
                let (_, _, rot_a) = self.nodes[a].as_mut().unwrap();
                let pos_a = rot_a
                    .iter()
                    .position(|&e| e == BEnd::Edge(e1))
                    .ok_or_else(|| Error::Internal("edge missing from rotation".into()))?;
                rot_a.splice(pos_a..=pos_a, splice);
            }
            // Re-point b's edges and legs at a.
            for slot in self.edges.iter_mut().flatten() {
                if slot.0 == b {
                    slot.0 = a;
                }
                if slot.1 == b {
                    slot.1 = a;
                }
            }
            for leg in &mut self.legs {
                if *leg == b {
                    *leg = a;
                }
            }
            self.edges[e1] = None;
            self.edges[e2] = None;
            self.nodes[x] = None;
            self.nodes[b] = None;
        }
    }

    fn finish(self) -> Result<PlabicGraph> {
        let mut node_map = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, nd) in self.nodes.iter().enumerate() {
            if let Some((name, color, _)) = nd {
                node_map[i] = nodes.len();
                nodes.push(Node {
                    name: name.clone(),
                    color: *color,
                    rot: Vec::new(),
                });
            }
        }
        let mut edge_map = vec![usize::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if let Some((a, b)) = e {
                edge_map[i] = edges.len();
                edges.push(crate::plabic::Edge {
                    a: node_map[*a],
                    b: node_map[*b],
                });
            }
        }
        for (i, nd) in self.nodes.iter().enumerate() {
            if let Some((_, _, rot)) = nd {
                let mapped: Vec<End> = rot
                    .iter()
                    .map(|&e| match e {
                        BEnd::Edge(idx) => End::Edge(edge_map[idx]),
                        BEnd::Leg(k) => End::Leg(k),
                    })
                    .collect();
                nodes[node_map[i]].rot = mapped;
            }
        }
        let legs = self.legs.iter().map(|&v| node_map[v]).collect();
        let g = PlabicGraph {
            n: self.n,
            nodes,
            edges,
            legs,
        };
        g.check_structure()?;
        Ok(g)
    }
}

/// Fuse away bivalent nodes with two internal edges (exposed for reuse;
/// square-move output is normalized automatically).
pub fn normalize_bivalent(g: &PlabicGraph) -> Result<PlabicGraph> {
    let mut b = Builder::from_graph(g);
    b.normalize()?;
    b.finish()
}

/// Apply the square move at the internal quadrilateral face with the
/// given label.
pub fn square_move(g: &PlabicGraph, face_label: &str) -> Result<PlabicGraph> {
    let want = parse_label(face_label, g.n)?;
    let faces = g.faces()?;
    let labels = g.face_labels()?;
    let idx = (0..faces.len())
        .find(|&i| labels[i] == want)
        .ok_or_else(|| Error::NotFound(format!("no face labelled {}", label_string(&want, g.n))))?;
    let face = &faces.faces[idx];
    if face.is_boundary() {
        return Err(Error::Unsupported(format!(
            "face {} is a boundary face",
            face_label
        )));
    }
    if face.sides.len() != 4 || face.sides.iter().any(|s| !matches!(s, Side::Edge { .. })) {
        return Err(Error::Unsupported(format!(
            "face {} is not an internal quadrilateral",
            face_label
        )));
    }
    // Corners counterclockwise; corner i is the head of side i.
    let corners = face.corner_nodes(g);
    let face_edges: Vec<usize> = face
        .sides
        .iter()
        .map(|s| match *s {
            Side::Edge { edge, .. } => edge,
            _ => unreachable!(),
        })
        .collect();
    {
        let distinct: BTreeSet<usize> = corners.iter().copied().collect();
        if distinct.len() != 4 {
            return Err(Error::Unsupported(
                "square move needs four distinct corner nodes".into(),
            ));
        }
    }

    let mut b = Builder::from_graph(g);
    // New ring of nodes, one per corner, with the opposite color.
    let mut ring = Vec::new();
    for (i, &corner) in corners.iter().enumerate() {
        let color = g.nodes[corner].color.flip();
        let name = b.fresh_name(&format!("sq{}", i + 1));
        ring.push(b.add_node(name, color));
    }
    let mut spoke = Vec::new();
    for (&corner, &rim) in corners.iter().zip(&ring) {
        spoke.push(b.add_edge(corner, rim));
    }
    let mut ring_edge = Vec::new();
    for i in 0..4 {
        ring_edge.push(b.add_edge(ring[i], ring[(i + 1) % 4]));
    }
    for i in 0..4 {
        // Counterclockwise at the ring node: spoke out, next ring node,
        // previous ring node.
        let rot = vec![
            BEnd::Edge(spoke[i]),
            BEnd::Edge(ring_edge[i]),
            BEnd::Edge(ring_edge[(i + 3) % 4]),
        ];
        b.nodes[ring[i]].as_mut().unwrap().2 = rot;
    }
    // At each corner, the face contributes the arriving edge of side i
    // and the departing edge of side i+1; they sit next to each other
    // in the rotation (departing immediately before arriving, in
    // counterclockwise order). Replace the pair by the spoke.
    for i in 0..4 {
        let arriving = face_edges[i];
        let departing = face_edges[(i + 1) % 4];
        let (_, _, rot) = b.nodes[corners[i]].as_mut().unwrap();
        let pos = rot
            .iter()
            .position(|&e| e == BEnd::Edge(arriving))
            .ok_or_else(|| Error::Internal("face edge missing from corner".into()))?;
        rot[pos] = BEnd::Edge(spoke[i]);
        let dep_pos = rot
            .iter()
            .position(|&e| e == BEnd::Edge(departing))
            .ok_or_else(|| Error::Internal("face edge missing from corner".into()))?;
        rot.remove(dep_pos);
    }
    for &e in &face_edges {
        b.edges[e] = None;
    }
    b.normalize()?;
    b.finish()
}

/// Canonical encoding of a plabic graph under boundary-fixing
/// isomorphism: two graphs get the same key iff there is a
/// name-forgetting bijection of nodes preserving colors, legs, edges
/// and rotations.
pub fn canonical_key(g: &PlabicGraph) -> Result<String> {
    // Deterministic breadth-first discovery anchored at the legs.
    let mut order: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue: Vec<(usize, End)> = Vec::new();
    let mut out = String::new();
    let mut pending: std::collections::VecDeque<(usize, End)> = std::collections::VecDeque::new();
    for k in 1..=g.n {
        let v = g.legs[k - 1];
        if !order.contains_key(&v) {
            let id = order.len();
            order.insert(v, id);
            pending.push_back((v, End::Leg(k)));
        }
    }
    while let Some((v, entry)) = pending.pop_front() {
        queue.push((v, entry));
        let rot = &g.nodes[v].rot;
        let start = rot.iter().position(|&e| e == entry).unwrap();
        for i in 0..rot.len() {
            if let End::Edge(e) = rot[(start + i) % rot.len()] {
                let u = g.edges[e].other(v);
                if !order.contains_key(&u) {
                    let id = order.len();
                    order.insert(u, id);
                    pending.push_back((u, End::Edge(e)));
                }
            }
        }
    }
    if order.len() != g.nodes.len() {
        return Err(Error::Invalid(
            "canonical form requires a boundary-connected graph".into(),
        ));
    }
    // Emit each node's rotation starting at its discovery entry end.
    for (v, entry) in queue {
        let rot = &g.nodes[v].rot;
        let start = rot.iter().position(|&e| e == entry).unwrap();
        out.push_str(&format!(
            "{}[{}]:",
            order[&v],
            match g.nodes[v].color {
                Color::Black => "b",
                Color::White => "w",
            }
        ));
        for i in 0..rot.len() {
            match rot[(start + i) % rot.len()] {
                End::Leg(k) => out.push_str(&format!(" L{}", k)),
                End::Edge(e) => out.push_str(&format!(" {}", order[&g.edges[e].other(v)])),
            }
        }
        out.push(';');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::plabic::parse_plabic;
    use crate::quiver::label_string;

    fn load(name: &str) -> PlabicGraph {
        parse_plabic(corpus::lookup(name).unwrap()).unwrap()
    }

    #[test]
    fn square_move_at_pentagon_face() {
        let g = load("gr25");
        let moved = square_move(&g, "25").unwrap();
        assert!(moved.validate_axioms().all_passed());
        // Same strand permutation, same boundary labels, the moved face
        // relabelled from 25 to 14.
        assert_eq!(
            moved.strand_permutation().unwrap(),
            g.strand_permutation().unwrap()
        );
        let faces = moved.faces().unwrap();
        let labels = moved.face_labels().unwrap();
        let internal: BTreeSet<String> = (0..faces.len())
            .filter(|&i| !faces.faces[i].is_boundary())
            .map(|i| label_string(&labels[i], moved.n))
            .collect();
        assert_eq!(
            internal,
            ["14", "24"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn square_move_is_involutive_up_to_isomorphism() {
        let g = load("gr25");
        let moved = square_move(&g, "25").unwrap();
        let back = square_move(&moved, "14").unwrap();
        assert_eq!(
            canonical_key(&g).unwrap(),
            canonical_key(&back).unwrap(),
            "double square move should restore the diagram"
        );
        assert_ne!(canonical_key(&g).unwrap(), canonical_key(&moved).unwrap());
    }

    #[test]
    fn square_move_rejects_bad_faces() {
        let g = load("gr25");
        assert!(square_move(&g, "15").is_err(), "boundary face");
        assert!(square_move(&g, "99").is_err(), "no such label");
        let t = load("triv13");
        assert!(square_move(&t, "1").is_err(), "no internal quad");
    }

    #[test]
    fn qp_mutation_tracks_the_square_move() {
        // Mutating the reduced QP at an internal quadrilateral face
        // matches building the QP of the square-moved diagram, up to
        // relabelling and arrow sign twists.
        use crate::quiver::{mutate_qp, qp_from_diagram, qp_isomorphic, reduce_qp};
        let g = load("gr25");
        let (qp, _) = reduce_qp(&qp_from_diagram(&g).unwrap()).unwrap();
        for face in ["25", "24"] {
            let mutated = mutate_qp(&qp, face).unwrap();
            let moved = square_move(&g, face).unwrap();
            let (moved_qp, _) = reduce_qp(&qp_from_diagram(&moved).unwrap()).unwrap();
            assert!(
                qp_isomorphic(&mutated, &moved_qp),
                "mutation at {} disagrees with the square move",
                face
            );
        }
        // Mutation refuses frozen vertices.
        assert!(mutate_qp(&qp, "15").is_err());
    }

    #[test]
    fn normalization_collapses_interior_twist() {
        // Fusing the interior bivalent white node of the twisted
        // triangle gives back the plain triangle.
        let tw = load("triv13twi");
        let plain = load("triv13");
        let fused = normalize_bivalent(&tw).unwrap();
        assert_eq!(
            canonical_key(&fused).unwrap(),
            canonical_key(&plain).unwrap()
        );
        // The boundary-twisted triangle has no fusible node.
        let twb = load("triv13twb");
        let kept = normalize_bivalent(&twb).unwrap();
        assert_eq!(canonical_key(&kept).unwrap(), canonical_key(&twb).unwrap());
    }
}
