//! Ice quivers with potential.
//!
//! The quiver of a plabic graph has one vertex per face (boundary faces
//! frozen), one arrow per internal edge and one frozen arrow per leg,
//! and a potential with one cycle per internal node, signed by the node
//! color. Arrows carry weights in Z^n recording which strands separate
//! their two faces; every fundamental cycle has total weight (1,...,1).
//!
//! Conventions: potential words are stored in path order (first arrow
//! traversed first), composed cyclically; a term `c * [a1, ..., am]`
//! means the cycle a1 then a2 ... then am. Cyclic words are
//! canonicalized by rotating to the lexicographically least index
//! sequence.

use crate::error::{Error, Result};
use crate::plabic::{Color, End, PlabicGraph, Side};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A quiver vertex (a face of the diagram, named by its source label).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub frozen: bool,
}

/// A quiver arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub frozen: bool,
}

/// An ice quiver: vertices and arrows, each partitioned into frozen and
/// mutable parts.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IceQuiver {
    pub vertices: Vec<Vertex>,
    pub arrows: Vec<Arrow>,
}

impl IceQuiver {
    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.id == id)
    }

    pub fn is_mutable(&self, v: usize) -> bool {
        !self.vertices[v].frozen
    }

    /// All arrows with tail `v`.
    pub fn arrows_out(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&a| self.arrows[a].tail == v)
            .collect()
    }

    /// All arrows with head `v`.
    pub fn arrows_in(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&a| self.arrows[a].head == v)
            .collect()
    }

    /// Unfrozen arrows with head `v`.
    pub fn mutable_arrows_in(&self, v: usize) -> Vec<usize> {
        self.arrows_in(v)
            .into_iter()
            .filter(|&a| !self.arrows[a].frozen)
            .collect()
    }

    /// Complaints about loops and 2-cycles. With `ignore_frozen_pairs`,
    /// arrows joining two frozen vertices are skipped (they play no
    /// role in the exchange structure).
    pub fn loop_and_two_cycle_complaints(&self, ignore_frozen_pairs: bool) -> Vec<String> {
        let relevant: Vec<usize> = (0..self.arrows.len())
            .filter(|&a| {
                let ar = &self.arrows[a];
                !(ignore_frozen_pairs
                    && self.vertices[ar.tail].frozen
                    && self.vertices[ar.head].frozen)
            })
            .collect();
        let mut out = Vec::new();
        for &a in &relevant {
            let ar = &self.arrows[a];
            if ar.tail == ar.head {
                out.push(format!("loop {} at {}", ar.id, self.vertices[ar.tail].id));
            }
        }
        for &a in &relevant {
            for &b in &relevant {
                if a < b
                    && self.arrows[a].tail == self.arrows[b].head
                    && self.arrows[a].head == self.arrows[b].tail
                    && self.arrows[a].tail != self.arrows[a].head
                {
                    out.push(format!(
                        "2-cycle {} / {} between {} and {}",
                        self.arrows[a].id,
                        self.arrows[b].id,
                        self.vertices[self.arrows[a].tail].id,
                        self.vertices[self.arrows[a].head].id
                    ));
                }
            }
        }
        out
    }
}

/// One potential term: a rational coefficient times a cyclic word of
/// arrow indices in path order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigRational,
    pub word: Vec<usize>,
}

/// A potential: a finite sum of cyclic terms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Potential {
    pub terms: Vec<Term>,
}

fn canonical_rotation(word: &[usize]) -> Vec<usize> {
    if word.is_empty() {
        return Vec::new();
    }
    (0..word.len())
        .map(|r| {
            let mut w = word.to_vec();
            w.rotate_left(r);
            w
        })
        .min()
        .unwrap()
}

impl Potential {
    /// Canonicalize every word, merge equal words, drop zeros.
    pub fn normalize(&mut self) {
        let mut merged: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
        for t in &self.terms {
            let w = canonical_rotation(&t.word);
            let entry = merged.entry(w).or_insert_with(BigRational::zero);
            *entry = entry.clone() + &t.coeff;
        }
        self.terms = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(word, coeff)| Term { coeff, word })
            .collect();
    }

    /// Flip the sign of term `idx` (used to build negative controls).
    pub fn flip_term_sign(&mut self, idx: usize) {
        let c = self.terms[idx].coeff.clone();
        self.terms[idx].coeff = -c;
    }
}

/// A path with a coefficient: arrows in path order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathTerm {
    pub coeff: BigRational,
    pub arrows: Vec<usize>,
}

/// Merge equal words in a sum of paths.
pub fn normalize_paths(paths: Vec<PathTerm>) -> Vec<PathTerm> {
    let mut merged: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
    for p in paths {
        let entry = merged.entry(p.arrows).or_insert_with(BigRational::zero);
        *entry = entry.clone() + &p.coeff;
    }
    merged
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(arrows, coeff)| PathTerm { coeff, arrows })
        .collect()
}

/// Cyclic derivative of a potential with respect to arrow `a`: for each
/// occurrence of `a`, the cycle read starting just after it (a path
/// from head(a) to tail(a)).
pub fn cyclic_derivative(pot: &Potential, a: usize) -> Vec<PathTerm> {
    let mut out = Vec::new();
    for t in &pot.terms {
        for (i, &x) in t.word.iter().enumerate() {
            if x == a {
                let mut rest = Vec::with_capacity(t.word.len() - 1);
                for j in 1..t.word.len() {
                    rest.push(t.word[(i + j) % t.word.len()]);
                }
                out.push(PathTerm {
                    coeff: t.coeff.clone(),
                    arrows: rest,
                });
            }
        }
    }
    normalize_paths(out)
}

/// Strip the first arrow of each path if it is `b` (partial derivative
/// acting on the start of the path), dropping non-matching paths.
pub fn strip_first(paths: &[PathTerm], b: usize) -> Vec<PathTerm> {
    normalize_paths(
        paths
            .iter()
            .filter(|p| p.arrows.first() == Some(&b))
            .map(|p| PathTerm {
                coeff: p.coeff.clone(),
                arrows: p.arrows[1..].to_vec(),
            })
            .collect(),
    )
}

/// Strip the last arrow of each path if it is `a`.
pub fn strip_last(paths: &[PathTerm], a: usize) -> Vec<PathTerm> {
    normalize_paths(
        paths
            .iter()
            .filter(|p| p.arrows.last() == Some(&a))
            .map(|p| PathTerm {
                coeff: p.coeff.clone(),
                arrows: p.arrows[..p.arrows.len() - 1].to_vec(),
            })
            .collect(),
    )
}

/// An ice quiver with potential, plus the strand-weight grading when
/// the QP comes from a diagram (mutation forgets it).
#[derive(Clone, Debug)]
pub struct IceQP {
    /// Number of marked points of the underlying diagram.
    pub n: usize,
    pub quiver: IceQuiver,
    pub potential: Potential,
    /// `weights[arrow]` = Z^n weight vector, when defined.
    pub weights: Option<Vec<Vec<u32>>>,
}

/// Render a face label set as a vertex id.
pub fn label_string(label: &BTreeSet<usize>, n: usize) -> String {
    if n <= 9 {
        label.iter().map(|x| x.to_string()).collect()
    } else {
        label
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// The indicator vector of the cyclic interval `[i, j-1]` in `{1..n}`.
fn cyclic_interval(i: usize, j: usize, n: usize) -> Result<Vec<u32>> {
    if i == j {
        return Err(Error::Invalid(format!(
            "degenerate strand pair at a crossing (both strands from {})",
            i
        )));
    }
    let mut w = vec![0u32; n];
    let mut k = i;
    while k != j {
        w[k - 1] = 1;
        k = if k == n { 1 } else { k + 1 };
    }
    Ok(w)
}

/// Build the ice QP of a plabic graph.
pub fn qp_from_diagram(g: &PlabicGraph) -> Result<IceQP> {
    let faces = g.faces()?;
    let labels = g.face_labels()?;
    let strands = g.strands()?;
    let perm = g.strand_permutation()?;
    let n = g.n;

    // Vertices: one per face, id = source label, boundary faces frozen.
    let mut vertices = Vec::with_capacity(faces.len());
    let mut seen = BTreeSet::new();
    for (i, f) in faces.faces.iter().enumerate() {
        let id = label_string(&labels[i], n);
        if !seen.insert(id.clone()) {
            return Err(Error::Invalid(format!("two faces share the label {}", id)));
        }
        vertices.push(Vertex {
            id,
            frozen: f.is_boundary(),
        });
    }

    let face_of = |s: Side| -> Result<usize> {
        faces
            .face_of(s)
            .ok_or_else(|| Error::Internal("side without a face".into()))
    };

    // Which strand traverses each edge toward its white endpoint /
    // toward its black endpoint.
    let mut toward_white = vec![None; g.edges.len()];
    let mut toward_black = vec![None; g.edges.len()];
    for s in &strands {
        for &(e, from_a) in &s.steps {
            let head = if from_a { g.edges[e].b } else { g.edges[e].a };
            match g.nodes[head].color {
                Color::White => toward_white[e] = Some(s.source),
                Color::Black => toward_black[e] = Some(s.source),
            }
        }
    }

    let inv_perm = {
        let mut inv = vec![0usize; n];
        for (k0, &t) in perm.iter().enumerate() {
            inv[t - 1] = k0 + 1;
        }
        inv
    };

    // Arrows: legs first (frozen), then internal edges.
    let mut arrows = Vec::new();
    let mut weights = Vec::new();
    let mut end_arrow: BTreeMap<(usize, End), usize> = BTreeMap::new();
    for k in 1..=n {
        let v = g.legs[k - 1];
        let (tail_side, head_side) = match g.nodes[v].color {
            Color::Black => (Side::LegIn(k), Side::LegOut(k)),
            Color::White => (Side::LegOut(k), Side::LegIn(k)),
        };
        let (i, j) = match g.nodes[v].color {
            // The marked point acts with the color opposite the node.
            Color::Black => (inv_perm[k - 1], k),
            Color::White => (k, inv_perm[k - 1]),
        };
        end_arrow.insert((v, End::Leg(k)), arrows.len());
        weights.push(cyclic_interval(i, j, n)?);
        arrows.push(Arrow {
            id: format!("g{}", k),
            tail: face_of(tail_side)?,
            head: face_of(head_side)?,
            frozen: true,
        });
    }
    for (e, edge) in g.edges.iter().enumerate() {
        let (white_end, black_end) = match g.nodes[edge.a].color {
            Color::White => (edge.a, edge.b),
            Color::Black => (edge.b, edge.a),
        };
        // Tail = face left of the traversal white -> black.
        let tail = face_of(Side::Edge {
            edge: e,
            from_a: edge.a == white_end,
        })?;
        let head = face_of(Side::Edge {
            edge: e,
            from_a: edge.a == black_end,
        })?;
        let i = toward_white[e]
            .ok_or_else(|| Error::Invalid(format!("edge {} not traversed toward white", e)))?;
        let j = toward_black[e]
            .ok_or_else(|| Error::Invalid(format!("edge {} not traversed toward black", e)))?;
        end_arrow.insert((edge.a, End::Edge(e)), arrows.len());
        end_arrow.insert((edge.b, End::Edge(e)), arrows.len());
        weights.push(cyclic_interval(i, j, n)?);
        arrows.push(Arrow {
            id: format!("a{}", e + 1),
            tail,
            head,
            frozen: false,
        });
    }

    // Potential: one signed cycle per internal node.
    let mut potential = Potential::default();
    for (v, node) in g.nodes.iter().enumerate() {
        let mut seq: Vec<usize> = node.rot.iter().map(|&end| end_arrow[&(v, end)]).collect();
        // Compose counterclockwise at black nodes, clockwise at white.
        if node.color == Color::White {
            seq.reverse();
        }
        for i in 0..seq.len() {
            let a = &arrows[seq[i]];
            let b = &arrows[seq[(i + 1) % seq.len()]];
            if a.head != b.tail {
                return Err(Error::Internal(format!(
                    "fundamental cycle at node {} does not compose",
                    node.name
                )));
            }
        }
        let sign = match node.color {
            Color::White => BigRational::one(),
            Color::Black => -BigRational::one(),
        };
        potential.terms.push(Term {
            coeff: sign,
            word: seq,
        });
    }
    potential.normalize();

    // Grading sanity: every fundamental cycle has weight (1,...,1).
    for t in &potential.terms {
        let mut sum = vec![0u32; n];
        for &a in &t.word {
            for (s, w) in sum.iter_mut().zip(&weights[a]) {
                *s += w;
            }
        }
        if sum.iter().any(|&x| x != 1) {
            return Err(Error::Internal(
                "a fundamental cycle does not have weight (1,...,1)".into(),
            ));
        }
    }

    Ok(IceQP {
        n,
        quiver: IceQuiver { vertices, arrows },
        potential,
        weights: Some(weights),
    })
}

impl IceQP {
    /// Text dump in the quiver output format.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for v in &self.quiver.vertices {
            out.push_str(&format!(
                "vertex {} {}\n",
                v.id,
                if v.frozen { "f" } else { "m" }
            ));
        }
        for a in &self.quiver.arrows {
            out.push_str(&format!(
                "arrow {} {} {} {}\n",
                a.id,
                self.quiver.vertices[a.tail].id,
                self.quiver.vertices[a.head].id,
                if a.frozen { "f" } else { "m" }
            ));
        }
        for t in &self.potential.terms {
            let sign = if t.coeff.is_negative() { "-" } else { "+" };
            let mag = t.coeff.abs();
            let mag_str = if mag.is_one() {
                String::new()
            } else {
                format!(" {}", mag)
            };
            let word: Vec<&str> = t
                .word
                .iter()
                .map(|&a| self.quiver.arrows[a].id.as_str())
                .collect();
            out.push_str(&format!("term {}{} {}\n", sign, mag_str, word.join(" ")));
        }
        out
    }

    /// Remove the given arrows, remapping potential words and weights.
    fn remove_arrows(&mut self, remove: &BTreeSet<usize>) -> Result<()> {
        for t in &self.potential.terms {
            for &a in &t.word {
                if remove.contains(&a) {
                    return Err(Error::Internal(
                        "cannot remove an arrow still used by the potential".into(),
                    ));
                }
            }
        }
        let mut map = vec![usize::MAX; self.quiver.arrows.len()];
        let mut new_arrows = Vec::new();
        let mut new_weights = self.weights.as_ref().map(|_| Vec::new());
        for (i, a) in self.quiver.arrows.iter().enumerate() {
            if remove.contains(&i) {
                continue;
            }
            map[i] = new_arrows.len();
            new_arrows.push(a.clone());
            if let (Some(nw), Some(w)) = (new_weights.as_mut(), self.weights.as_ref()) {
                nw.push(w[i].clone());
            }
        }
        for t in &mut self.potential.terms {
            for a in &mut t.word {
                *a = map[*a];
            }
        }
        self.quiver.arrows = new_arrows;
        self.weights = new_weights;
        Ok(())
    }
}

/// What a reduction pass did.
#[derive(Clone, Debug, Default)]
pub struct ReduceLog {
    /// Ids of arrows removed, in removal order (pairs).
    pub removed: Vec<(String, String)>,
}

/// Remove interior 2-cycle terms (both arrows unfrozen) by the
/// substitution that trades the pair for the composite of their partner
/// cycles. Boundary 2-cycle terms (one frozen arrow) are left alone; a
/// 2-cycle term with both arrows frozen is an error.
pub fn reduce_qp(qp: &IceQP) -> Result<(IceQP, ReduceLog)> {
    let mut qp = qp.clone();
    let mut log = ReduceLog::default();
    loop {
        let mut target = None;
        for (i, t) in qp.potential.terms.iter().enumerate() {
            if t.word.len() != 2 {
                continue;
            }
            let (x, y) = (t.word[0], t.word[1]);
            let fx = qp.quiver.arrows[x].frozen;
            let fy = qp.quiver.arrows[y].frozen;
            if fx && fy {
                return Err(Error::Unsupported(
                    "potential has a 2-cycle term with both arrows frozen".into(),
                ));
            }
            if !fx && !fy {
                if x == y {
                    return Err(Error::Unsupported(
                        "potential has a squared loop term".into(),
                    ));
                }
                target = Some(i);
                break;
            }
        }
        let Some(idx) = target else {
            return Ok((qp, log));
        };

        let term = qp.potential.terms[idx].clone();
        let (alpha, beta) = (term.word[0], term.word[1]);
        let c = term.coeff.clone();
        let two_cycle = canonical_rotation(&term.word);

        // Substitute alpha -> alpha - (1/c) d_beta(W'),
        //            beta  -> beta  - (1/c) d_alpha(W'),
        // where W' is the potential without the 2-cycle term, across the
        // WHOLE potential: the expansion of the 2-cycle term supplies
        // exactly the cross-terms that cancel the rest, splitting W
        // into c*beta*alpha plus a potential avoiding both arrows.
        let mut pot = qp.potential.clone();
        for round in 0.. {
            let offenders: Vec<&Term> = pot
                .terms
                .iter()
                .filter(|t| {
                    canonical_rotation(&t.word) != two_cycle
                        && (t.word.contains(&alpha) || t.word.contains(&beta))
                })
                .collect();
            if offenders.is_empty() {
                break;
            }
            if round > 16 {
                return Err(Error::Unsupported(
                    "interior reduction did not converge".into(),
                ));
            }
            let rest = Potential {
                terms: pot
                    .terms
                    .iter()
                    .filter(|t| canonical_rotation(&t.word) != two_cycle)
                    .cloned()
                    .collect(),
            };
            let minus_inv_c = -c.clone().recip();
            let scale = |paths: Vec<PathTerm>| -> Vec<PathTerm> {
                paths
                    .into_iter()
                    .map(|p| PathTerm {
                        coeff: p.coeff * &minus_inv_c,
                        arrows: p.arrows,
                    })
                    .collect()
            };
            let sub_alpha = scale(cyclic_derivative(&rest, beta));
            let sub_beta = scale(cyclic_derivative(&rest, alpha));
            let mut new_terms: Vec<Term> = Vec::new();
            for t in &pot.terms {
                // Expand the substitution multilinearly over the
                // occurrences of alpha and beta in this word.
                let mut expansions: Vec<(BigRational, Vec<usize>)> =
                    vec![(t.coeff.clone(), Vec::new())];
                for &a in &t.word {
                    if a == alpha || a == beta {
                        let sub = if a == alpha { &sub_alpha } else { &sub_beta };
                        let mut next = Vec::new();
                        for (coeff, prefix) in &expansions {
                            // Keep the arrow itself...
                            let mut keep = prefix.clone();
                            keep.push(a);
                            next.push((coeff.clone(), keep));
                            // ...plus each substituted path.
                            for p in sub {
                                let mut w = prefix.clone();
                                w.extend_from_slice(&p.arrows);
                                next.push((coeff.clone() * &p.coeff, w));
                            }
                        }
                        expansions = next;
                    } else {
                        for (_, prefix) in &mut expansions {
                            prefix.push(a);
                        }
                    }
                }
                for (coeff, word) in expansions {
                    new_terms.push(Term { coeff, word });
                }
            }
            pot = Potential { terms: new_terms };
            pot.normalize();
        }

        // Drop the split-off trivial part and its arrows.
        pot.terms
            .retain(|t| canonical_rotation(&t.word) != two_cycle);
        let a_id = qp.quiver.arrows[alpha].id.clone();
        let b_id = qp.quiver.arrows[beta].id.clone();
        qp.potential = pot;
        qp.remove_arrows(&BTreeSet::from([alpha, beta]))?;
        log.removed.push((a_id, b_id));
    }
}

/// Remove boundary 2-cycle terms: for each term pairing a frozen arrow
/// with an unfrozen one, delete the frozen arrow and its term and
/// freeze the partner.
pub fn untwist_boundary(qp: &IceQP) -> Result<(IceQP, ReduceLog)> {
    let mut qp = qp.clone();
    let mut log = ReduceLog::default();
    loop {
        let mut found = None;
        for (i, t) in qp.potential.terms.iter().enumerate() {
            if t.word.len() != 2 {
                continue;
            }
            let (x, y) = (t.word[0], t.word[1]);
            match (qp.quiver.arrows[x].frozen, qp.quiver.arrows[y].frozen) {
                (true, false) => {
                    found = Some((i, x, y));
                    break;
                }
                (false, true) => {
                    found = Some((i, y, x));
                    break;
                }
                _ => {}
            }
        }
        let Some((idx, frozen_arrow, partner)) = found else {
            return Ok((qp, log));
        };
        let occurrences = qp
            .potential
            .terms
            .iter()
            .enumerate()
            .filter(|(i, t)| *i != idx && t.word.contains(&frozen_arrow))
            .count();
        if occurrences != 0 {
            return Err(Error::Unsupported(
                "frozen arrow of a boundary 2-cycle appears in another term".into(),
            ));
        }
        let f_id = qp.quiver.arrows[frozen_arrow].id.clone();
        let p_id = qp.quiver.arrows[partner].id.clone();
        qp.potential.terms.remove(idx);
        qp.quiver.arrows[partner].frozen = true;
        qp.remove_arrows(&BTreeSet::from([frozen_arrow]))?;
        log.removed.push((f_id, p_id));
    }
}

/// Mutate an ice QP at a mutable vertex: premutation (composites,
/// reversals, substituted potential plus the new triangle terms)
/// followed by interior reduction.
pub fn mutate_qp(qp: &IceQP, at: &str) -> Result<IceQP> {
    let v = qp
        .quiver
        .vertex_index(at)
        .ok_or_else(|| Error::NotFound(format!("vertex {}", at)))?;
    if qp.quiver.vertices[v].frozen {
        return Err(Error::Unsupported(format!("vertex {} is frozen", at)));
    }
    let incoming = qp.quiver.arrows_in(v);
    let outgoing = qp.quiver.arrows_out(v);
    if incoming.iter().any(|a| qp.quiver.arrows[*a].tail == v) {
        return Err(Error::Unsupported(format!("loop at vertex {}", at)));
    }
    if incoming.iter().any(|a| qp.quiver.arrows[*a].frozen)
        || outgoing.iter().any(|a| qp.quiver.arrows[*a].frozen)
    {
        return Err(Error::Unsupported(
            "frozen arrow incident with a mutable vertex".into(),
        ));
    }

    let old = &qp.quiver;
    let mut arrows: Vec<Arrow> = Vec::new();
    let mut map_old: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, a) in old.arrows.iter().enumerate() {
        if a.head == v || a.tail == v {
            continue;
        }
        map_old.insert(i, arrows.len());
        arrows.push(a.clone());
    }
    // Composites [ba] for a: u -> v, b: v -> w.
    let mut composite: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &a in &incoming {
        for &b in &outgoing {
            composite.insert((a, b), arrows.len());
            arrows.push(Arrow {
                id: format!("[{}{}]", old.arrows[b].id, old.arrows[a].id),
                tail: old.arrows[a].tail,
                head: old.arrows[b].head,
                frozen: false,
            });
        }
    }
    // Reversals.
    let mut star: BTreeMap<usize, usize> = BTreeMap::new();
    for &a in &incoming {
        star.insert(a, arrows.len());
        arrows.push(Arrow {
            id: format!("{}*", old.arrows[a].id),
            tail: v,
            head: old.arrows[a].tail,
            frozen: false,
        });
    }
    for &b in &outgoing {
        star.insert(b, arrows.len());
        arrows.push(Arrow {
            id: format!("{}*", old.arrows[b].id),
            tail: old.arrows[b].head,
            head: v,
            frozen: false,
        });
    }

    // Substitute composites through v in every term.
    let mut terms = Vec::new();
    for t in &qp.potential.terms {
        let m = t.word.len();
        let through: Vec<usize> = (0..m)
            .filter(|&i| old.arrows[t.word[i]].head == v)
            .collect();
        let mut word = Vec::new();
        let mut skip = vec![false; m];
        for &i in &through {
            let b = t.word[(i + 1) % m];
            if old.arrows[b].tail != v {
                return Err(Error::Internal(
                    "potential word enters the mutated vertex without leaving".into(),
                ));
            }
            skip[(i + 1) % m] = true;
        }
        for (i, &absorbed) in skip.iter().enumerate() {
            if absorbed {
                continue;
            }
            let a = t.word[i];
            if old.arrows[a].head == v {
                let b = t.word[(i + 1) % m];
                word.push(composite[&(a, b)]);
            } else {
                word.push(map_old[&a]);
            }
        }
        terms.push(Term {
            coeff: t.coeff.clone(),
            word,
        });
    }
    // Triangle terms [ba] b* a*.
    for &a in &incoming {
        for &b in &outgoing {
            terms.push(Term {
                coeff: BigRational::one(),
                word: vec![composite[&(a, b)], star[&b], star[&a]],
            });
        }
    }

    let mut pot = Potential { terms };
    pot.normalize();
    let premutated = IceQP {
        n: qp.n,
        quiver: IceQuiver {
            vertices: old.vertices.clone(),
            arrows,
        },
        potential: pot,
        weights: None,
    };
    let (reduced, _) = reduce_qp(&premutated)?;
    Ok(reduced)
}

/// Structural isomorphism of two ice QPs: a bijection of vertices
/// (frozen to frozen, and fixing nothing else) and of arrows that
/// matches tails, heads, frozenness, and the potential up to rescaling
/// each arrow by a sign.
pub fn qp_isomorphic(a: &IceQP, b: &IceQP) -> bool {
    if a.quiver.vertices.len() != b.quiver.vertices.len()
        || a.quiver.arrows.len() != b.quiver.arrows.len()
        || a.potential.terms.len() != b.potential.terms.len()
    {
        return false;
    }
    // Try all vertex bijections that respect frozenness; the frozen
    // block must match by id when both sides share ids, otherwise by
    // backtracking too. Sizes here are tiny.
    let na = a.quiver.vertices.len();
    let bs: Vec<usize> = (0..na).collect();
    let mut assignment = vec![usize::MAX; na];
    let mut used = vec![false; na];
    fn backtrack(
        a: &IceQP,
        b: &IceQP,
        pos: usize,
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
        bs: &[usize],
    ) -> bool {
        if pos == assignment.len() {
            return arrows_match(a, b, assignment);
        }
        for &cand in bs {
            if used[cand] || a.quiver.vertices[pos].frozen != b.quiver.vertices[cand].frozen {
                continue;
            }
            assignment[pos] = cand;
            used[cand] = true;
            if backtrack(a, b, pos + 1, assignment, used, bs) {
                return true;
            }
            used[cand] = false;
            assignment[pos] = usize::MAX;
        }
        false
    }
    backtrack(a, b, 0, &mut assignment, &mut used, &bs)
}

fn arrows_match(a: &IceQP, b: &IceQP, vmap: &[usize]) -> bool {
    // Group b's arrows by (tail, head, frozen).
    let mut groups: BTreeMap<(usize, usize, bool), Vec<usize>> = BTreeMap::new();
    for (i, ar) in b.quiver.arrows.iter().enumerate() {
        groups
            .entry((ar.tail, ar.head, ar.frozen))
            .or_default()
            .push(i);
    }
    let mut amap = vec![usize::MAX; a.quiver.arrows.len()];
    let mut used = vec![false; b.quiver.arrows.len()];
    fn assign(
        a: &IceQP,
        b: &IceQP,
        vmap: &[usize],
        idx: usize,
        amap: &mut Vec<usize>,
        used: &mut Vec<bool>,
        groups: &BTreeMap<(usize, usize, bool), Vec<usize>>,
    ) -> bool {
        if idx == amap.len() {
            return potentials_match(a, b, amap);
        }
        let ar = &a.quiver.arrows[idx];
        let key = (vmap[ar.tail], vmap[ar.head], ar.frozen);
        let Some(cands) = groups.get(&key) else {
            return false;
        };
        for &c in cands {
            if used[c] {
                continue;
            }
            amap[idx] = c;
            used[c] = true;
            if assign(a, b, vmap, idx + 1, amap, used, groups) {
                return true;
            }
            used[c] = false;
            amap[idx] = usize::MAX;
        }
        false
    }
    assign(a, b, vmap, 0, &mut amap, &mut used, &groups)
}

fn potentials_match(a: &IceQP, b: &IceQP, amap: &[usize]) -> bool {
    // Map a's terms through the arrow bijection; words must match term
    // by term, coefficients up to a consistent sign twist per arrow
    // (arrow rescalings by -1 are right-equivalences).
    let mut b_terms: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
    for t in &b.potential.terms {
        b_terms.insert(canonical_rotation(&t.word), t.coeff.clone());
    }
    // The mapped words must hit each b-term exactly once.
    let mapped_words: BTreeSet<Vec<usize>> = a
        .potential
        .terms
        .iter()
        .map(|t| canonical_rotation(&t.word.iter().map(|&x| amap[x]).collect::<Vec<_>>()))
        .collect();
    if mapped_words != b_terms.keys().cloned().collect() {
        return false;
    }
    // Sign variables: one bit per a-arrow; each matched term imposes a
    // parity constraint. Solve the F2 system by elimination.
    let mut rows: Vec<(Vec<usize>, bool)> = Vec::new();
    for t in &a.potential.terms {
        let mapped: Vec<usize> = t.word.iter().map(|&x| amap[x]).collect();
        let Some(cb) = b_terms.get(&canonical_rotation(&mapped)) else {
            return false;
        };
        let ratio = cb.clone() / t.coeff.clone();
        if ratio.abs() != BigRational::one() {
            return false;
        }
        let flip = ratio.is_negative();
        // Arrows appearing an odd number of times contribute.
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &x in &t.word {
            *counts.entry(x).or_insert(0) += 1;
        }
        let vars: Vec<usize> = counts
            .into_iter()
            .filter(|(_, c)| c % 2 == 1)
            .map(|(x, _)| x)
            .collect();
        rows.push((vars, flip));
    }
    // Gaussian elimination over F2 on sparse rows.
    let mut pivots: BTreeMap<usize, (Vec<usize>, bool)> = BTreeMap::new();
    for (mut vars, mut rhs) in rows {
        loop {
            vars.sort_unstable();
            // Symmetric difference semantics: equal pairs cancel.
            let mut reduced = Vec::new();
            let mut i = 0;
            while i < vars.len() {
                if i + 1 < vars.len() && vars[i] == vars[i + 1] {
                    i += 2;
                } else {
                    reduced.push(vars[i]);
                    i += 1;
                }
            }
            vars = reduced;
            let Some(&lead) = vars.first() else {
                if rhs {
                    return false;
                }
                break;
            };
            if let Some((pvars, prhs)) = pivots.get(&lead) {
                let mut merged = vars.clone();
                merged.extend_from_slice(pvars);
                vars = merged;
                rhs ^= *prhs;
            } else {
                pivots.insert(lead, (vars[1..].to_vec(), rhs));
                break;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::plabic::parse_plabic;

    fn qp(name: &str) -> IceQP {
        let g = parse_plabic(corpus::lookup(name).unwrap()).unwrap();
        qp_from_diagram(&g).unwrap()
    }

    fn arrow_set(qp: &IceQP) -> BTreeSet<(String, String, bool)> {
        qp.quiver
            .arrows
            .iter()
            .map(|a| {
                (
                    qp.quiver.vertices[a.tail].id.clone(),
                    qp.quiver.vertices[a.head].id.clone(),
                    a.frozen,
                )
            })
            .collect()
    }

    #[test]
    fn triangle_qp_shape() {
        let q = qp("triv13");
        assert_eq!(q.quiver.vertices.len(), 3);
        assert!(q.quiver.vertices.iter().all(|v| v.frozen));
        assert_eq!(
            arrow_set(&q),
            BTreeSet::from([
                ("1".into(), "3".into(), true),
                ("2".into(), "1".into(), true),
                ("3".into(), "2".into(), true),
            ])
        );
        assert_eq!(q.potential.terms.len(), 1);
        let t = &q.potential.terms[0];
        assert_eq!(t.coeff, -BigRational::one());
        assert_eq!(t.word.len(), 3);
        // Weights: g1 = {3}, g2 = {1}, g3 = {2}.
        let w = q.weights.as_ref().unwrap();
        let by_id = |id: &str| &w[q.quiver.arrow_index(id).unwrap()];
        assert_eq!(by_id("g1"), &vec![0, 0, 1]);
        assert_eq!(by_id("g2"), &vec![1, 0, 0]);
        assert_eq!(by_id("g3"), &vec![0, 1, 0]);
    }

    #[test]
    fn square_example_qp_shape() {
        let q = qp("gr24frozen");
        assert_eq!(q.quiver.vertices.len(), 4);
        assert!(q.quiver.vertices.iter().all(|v| v.frozen));
        assert_eq!(
            arrow_set(&q),
            BTreeSet::from([
                ("23".into(), "13".into(), false),
                ("13".into(), "34".into(), true),
                ("13".into(), "12".into(), true),
                ("12".into(), "23".into(), true),
                ("34".into(), "23".into(), true),
            ])
        );
        assert_eq!(q.potential.terms.len(), 2);
        let signs: BTreeSet<bool> = q
            .potential
            .terms
            .iter()
            .map(|t| t.coeff.is_negative())
            .collect();
        assert_eq!(signs.len(), 2, "one cycle of each sign");
    }

    #[test]
    fn pentagon_qp_matches_published_quiver() {
        let q = qp("gr25");
        assert_eq!(q.quiver.vertices.len(), 7);
        assert_eq!(q.quiver.vertices.iter().filter(|v| v.frozen).count(), 5);
        assert_eq!(q.quiver.arrows.len(), 14);
        assert_eq!(q.potential.terms.len(), 8);
        let expected: BTreeSet<(String, String, bool)> = [
            // frozen boundary arrows
            ("15", "45", true),
            ("12", "15", true),
            ("23", "12", true),
            ("34", "23", true),
            ("45", "34", true),
            // unfrozen arrows
            ("25", "15", false),
            ("15", "12", false),
            ("12", "25", false),
            ("25", "24", false),
            ("45", "25", false),
            ("24", "45", false),
            ("34", "24", false),
            ("24", "23", false),
            ("23", "34", false),
        ]
        .iter()
        .map(|(t, h, f)| (t.to_string(), h.to_string(), *f))
        .collect();
        assert_eq!(arrow_set(&q), expected);

        // Three 3-cycles with +, five cycles with -.
        let plus = q
            .potential
            .terms
            .iter()
            .filter(|t| !t.coeff.is_negative())
            .count();
        assert_eq!(plus, 3);

        // Weight spot checks against the hand table.
        let w = q.weights.as_ref().unwrap();
        let arrow_by_pair = |tail: &str, head: &str, frozen: bool| {
            q.quiver
                .arrows
                .iter()
                .position(|a| {
                    q.quiver.vertices[a.tail].id == tail
                        && q.quiver.vertices[a.head].id == head
                        && a.frozen == frozen
                })
                .unwrap()
        };
        assert_eq!(w[arrow_by_pair("25", "15", false)], vec![1, 0, 0, 0, 0]);
        assert_eq!(w[arrow_by_pair("15", "12", false)], vec![0, 1, 1, 1, 0]);
        assert_eq!(w[arrow_by_pair("12", "25", false)], vec![0, 0, 0, 0, 1]);
        assert_eq!(w[arrow_by_pair("25", "24", false)], vec![0, 0, 0, 1, 0]);
        assert_eq!(w[arrow_by_pair("24", "45", false)], vec![1, 0, 0, 0, 1]);
        assert_eq!(w[arrow_by_pair("45", "25", false)], vec![0, 1, 1, 0, 0]);
        assert_eq!(w[arrow_by_pair("34", "24", false)], vec![0, 1, 0, 0, 0]);
        assert_eq!(w[arrow_by_pair("24", "23", false)], vec![0, 0, 1, 0, 0]);
        assert_eq!(w[arrow_by_pair("23", "34", false)], vec![1, 0, 0, 1, 1]);
        assert_eq!(w[arrow_by_pair("15", "45", true)], vec![0, 0, 0, 1, 1]);
        assert_eq!(w[arrow_by_pair("12", "15", true)], vec![1, 0, 0, 0, 1]);
        assert_eq!(w[arrow_by_pair("23", "12", true)], vec![1, 1, 0, 0, 0]);
        assert_eq!(w[arrow_by_pair("34", "23", true)], vec![0, 1, 1, 0, 0]);
        assert_eq!(w[arrow_by_pair("45", "34", true)], vec![0, 0, 1, 1, 0]);
    }

    #[test]
    fn pentagon_qp_is_reduce_fixed_point() {
        let q = qp("gr25");
        let (r, log) = reduce_qp(&q).unwrap();
        assert!(log.removed.is_empty());
        assert_eq!(r.quiver.arrows.len(), 14);
        assert_eq!(r.potential.terms.len(), 8);
    }

    #[test]
    fn interior_twist_reduces_to_plain_triangle() {
        let twisted = qp("triv13twi");
        assert_eq!(twisted.quiver.arrows.len(), 5);
        let (reduced, log) = reduce_qp(&twisted).unwrap();
        assert_eq!(log.removed.len(), 1);
        let plain = qp("triv13");
        assert!(qp_isomorphic(&reduced, &plain));
        assert_eq!(reduced.quiver.arrows.len(), 3);
        assert_eq!(reduced.potential.terms.len(), 1);
    }

    #[test]
    fn boundary_twist_unwinds_to_plain_triangle() {
        let twisted = qp("triv13twb");
        // reduce_qp leaves the boundary 2-cycle alone.
        let (reduced, log) = reduce_qp(&twisted).unwrap();
        assert!(log.removed.is_empty());
        assert_eq!(reduced.quiver.arrows.len(), 4);
        // untwist_boundary removes it.
        let (untwisted, log) = untwist_boundary(&reduced).unwrap();
        assert_eq!(log.removed.len(), 1);
        let plain = qp("triv13");
        assert!(qp_isomorphic(&untwisted, &plain));
    }

    #[test]
    fn derivative_conventions() {
        let q = qp("triv13");
        let g1 = q.quiver.arrow_index("g1").unwrap();
        let g2 = q.quiver.arrow_index("g2").unwrap();
        let g3 = q.quiver.arrow_index("g3").unwrap();
        // W = -[g1 g3 g2] cyclically; d_{g1} W = -(g3 g2).
        let d = cyclic_derivative(&q.potential, g1);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].arrows, vec![g3, g2]);
        assert_eq!(d[0].coeff, -BigRational::one());
        // Stripping the first arrow picks out paths starting with it.
        assert_eq!(strip_first(&d, g3)[0].arrows, vec![g2]);
        assert!(strip_first(&d, g2).is_empty());
        assert_eq!(strip_last(&d, g2)[0].arrows, vec![g3]);
    }

    #[test]
    fn loop_two_cycle_reporting_respects_frozen_filter() {
        let q = qp("gr25");
        // Raw quiver has frozen/unfrozen 2-cycles at 12<->15 and 23<->34.
        let raw = q.quiver.loop_and_two_cycle_complaints(false);
        assert_eq!(raw.len(), 2);
        // They join frozen vertices, so the exchange view is clean.
        let filtered = q.quiver.loop_and_two_cycle_complaints(true);
        assert!(filtered.is_empty(), "unexpected: {:?}", filtered);
    }
}
