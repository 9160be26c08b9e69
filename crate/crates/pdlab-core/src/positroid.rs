//! k-subset combinatorics and numeric boundary measurement: weak
//! separation, necklaces, positroid membership via shifted Gale orders,
//! weighted matching sums, and the specialization check tying cluster
//! variables to those sums.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cluster::{mutate_seed, seed_from_diagram};
use crate::error::{Error, Result};
use crate::moves::{parse_label, square_move};
use crate::plabic::{Color, PlabicGraph};
use crate::quiver::label_string;

// ---------------------------------------------------------------------------
// k-subsets
// ---------------------------------------------------------------------------

/// A sorted k-element subset of `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KSubset {
    n: usize,
    elems: Vec<usize>,
}

impl KSubset {
    pub fn new(n: usize, mut elems: Vec<usize>) -> Result<Self> {
        elems.sort_unstable();
        elems.dedup();
        if let Some(&bad) = elems.iter().find(|&&x| x < 1 || x > n) {
            return Err(Error::Invalid(format!(
                "subset entry {} outside 1..{}",
                bad, n
            )));
        }
        Ok(KSubset { n, elems })
    }

    pub fn from_set(n: usize, set: &BTreeSet<usize>) -> Result<Self> {
        Self::new(n, set.iter().copied().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// Compact label form (digits for n ≤ 9, comma-separated otherwise).
    pub fn label(&self) -> String {
        label_string(&self.elems.iter().copied().collect(), self.n)
    }
}

/// All k-subsets of `{1..n}` in lexicographic order.
pub fn all_k_subsets(n: usize, k: usize) -> Vec<KSubset> {
    fn go(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, start: usize, n: usize, k: usize) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            cur.push(x);
            go(out, cur, x + 1, n, k);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    go(&mut raw, &mut Vec::new(), 1, n, k);
    raw.into_iter().map(|elems| KSubset { n, elems }).collect()
}

// ---------------------------------------------------------------------------
// Weak separation
// ---------------------------------------------------------------------------

/// Two k-subsets are weakly separated when no cyclic pattern
/// `a < b < c < d` has `a, c` in one difference set and `b, d` in the
/// other.  Equivalently, walking once around the circle, the elements of
/// `I∖J` and `J∖I` form at most one block each.
pub fn weakly_separated(i: &KSubset, j: &KSubset) -> Result<bool> {
    if i.n != j.n || i.k() != j.k() {
        return Err(Error::Invalid(format!(
            "weak separation needs equal k and n, got ({},{}) vs ({},{})",
            i.k(),
            i.n,
            j.k(),
            j.n
        )));
    }
    let d1: Vec<usize> = i
        .elems
        .iter()
        .filter(|x| !j.contains(**x))
        .copied()
        .collect();
    let d2: Vec<usize> = j
        .elems
        .iter()
        .filter(|x| !i.contains(**x))
        .copied()
        .collect();
    if d1.is_empty() || d2.is_empty() {
        return Ok(true);
    }
    // Merge both difference sets in circular order and count the
    // tag changes around the circle; separated means at most 2.
    let mut tagged: Vec<(usize, bool)> = d1
        .iter()
        .map(|&x| (x, false))
        .chain(d2.iter().map(|&x| (x, true)))
        .collect();
    tagged.sort_unstable();
    let changes = (0..tagged.len())
        .filter(|&t| tagged[t].1 != tagged[(t + 1) % tagged.len()].1)
        .count();
    Ok(changes <= 2)
}

// ---------------------------------------------------------------------------
// Necklaces and positroid membership
// ---------------------------------------------------------------------------

/// How a necklace's entries relate to the shifted Gale orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NecklaceKind {
    /// Entry `i` is the minimum of the positroid in the i-shifted Gale
    /// order; members lie above it.
    Forward,
    /// Entries are boundary-region labels in arc order as drawn (the
    /// reverse reading): the entry governing shift `i` is the label at
    /// arc `i-1`, and members lie below it.
    ReverseArcs,
}

/// A cyclic list of n k-subsets, consecutive entries exchanging at most
/// one element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Necklace {
    pub kind: NecklaceKind,
    pub entries: Vec<KSubset>,
}

fn exchange_distance_ok(a: &KSubset, b: &KSubset) -> bool {
    let extra = a.elems.iter().filter(|x| !b.contains(**x)).count();
    extra <= 1
}

impl Necklace {
    fn validate(entries: &[KSubset]) -> Result<()> {
        let Some(first) = entries.first() else {
            return Err(Error::Invalid("empty necklace".into()));
        };
        if entries.len() != first.n {
            return Err(Error::Invalid(format!(
                "necklace needs {} entries, got {}",
                first.n,
                entries.len()
            )));
        }
        for e in entries {
            if e.n != first.n || e.k() != first.k() {
                return Err(Error::Invalid("necklace entries mix k or n".into()));
            }
        }
        for t in 0..entries.len() {
            let (a, b) = (&entries[t], &entries[(t + 1) % entries.len()]);
            if !exchange_distance_ok(a, b) {
                return Err(Error::Invalid(format!(
                    "necklace entries {} and {} differ by more than one exchange",
                    a.label(),
                    b.label()
                )));
            }
        }
        Ok(())
    }

    /// A necklace of i-shifted Gale minima, entry `i` at position `i-1`.
    pub fn forward(entries: Vec<KSubset>) -> Result<Self> {
        Self::validate(&entries)?;
        Ok(Necklace {
            kind: NecklaceKind::Forward,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn k(&self) -> usize {
        self.entries[0].k()
    }

    /// The entry governing the i-shifted Gale comparison.
    fn entry_for_shift(&self, i: usize) -> &KSubset {
        let n = self.n();
        match self.kind {
            NecklaceKind::Forward => &self.entries[i - 1],
            NecklaceKind::ReverseArcs => &self.entries[(i + n - 2) % n],
        }
    }
}

/// Boundary-region labels in arc order (arc 1 first): the necklace of
/// the diagram in its reverse reading.
pub fn necklace_of(g: &PlabicGraph) -> Result<Necklace> {
    let faces = g.faces()?;
    let labels = g.face_labels()?;
    let entries: Vec<KSubset> = (1..=g.n)
        .map(|k| KSubset::from_set(g.n, &labels[faces.at_arc(k)]))
        .collect::<Result<_>>()?;
    Necklace::validate(&entries)
        .map_err(|e| Error::Internal(format!("diagram produced a bad necklace: {}", e)))?;
    Ok(Necklace {
        kind: NecklaceKind::ReverseArcs,
        entries,
    })
}

/// Rank of `x` in the linear order `i < i+1 < … < n < 1 < … < i-1`.
fn shifted_rank(i: usize, n: usize, x: usize) -> usize {
    (x + n - i) % n
}

/// Componentwise comparison `a ≤ b` in the i-shifted Gale order.
fn gale_leq(i: usize, a: &KSubset, b: &KSubset) -> bool {
    let ranks = |s: &KSubset| -> Vec<usize> {
        let mut r: Vec<usize> = s.elems.iter().map(|&x| shifted_rank(i, s.n, x)).collect();
        r.sort_unstable();
        r
    };
    ranks(a).iter().zip(ranks(b)).all(|(x, y)| *x <= y)
}

/// Whether `I` belongs to the positroid of the necklace: comparable with
/// every shifted entry on the member side of the necklace's reading
/// (above forward minima, below reverse maxima).
pub fn positroid_member(i_set: &KSubset, nk: &Necklace) -> Result<bool> {
    if i_set.n != nk.entries[0].n || i_set.k() != nk.k() {
        return Err(Error::Invalid(
            "subset and necklace have different k or n".into(),
        ));
    }
    let n = nk.n();
    Ok((1..=n).all(|i| {
        let e = nk.entry_for_shift(i);
        match nk.kind {
            NecklaceKind::Forward => gale_leq(i, e, i_set),
            NecklaceKind::ReverseArcs => gale_leq(i, i_set, e),
        }
    }))
}

// ---------------------------------------------------------------------------
// Weighted diagrams and boundary measurement
// ---------------------------------------------------------------------------

/// A plabic graph with a positive exact-rational weight on every
/// internal edge; legs always weigh 1.
#[derive(Clone, Debug)]
pub struct WeightedPlabic {
    pub graph: PlabicGraph,
    pub weights: Vec<BigRational>,
}

impl WeightedPlabic {
    pub fn new(graph: PlabicGraph, weights: Vec<BigRational>) -> Result<Self> {
        if weights.len() != graph.edges.len() {
            return Err(Error::Invalid(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.edges.len()
            )));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Invalid("edge weights must be positive".into()));
        }
        Ok(WeightedPlabic { graph, weights })
    }

    /// All weights 1.
    pub fn unit(graph: &PlabicGraph) -> Self {
        let weights = vec![BigRational::one(); graph.edges.len()];
        WeightedPlabic {
            graph: graph.clone(),
            weights,
        }
    }

    /// Reproducible positive weights: small rationals drawn from a
    /// stream seeded by `seed`.
    pub fn sample(graph: &PlabicGraph, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..graph.edges.len())
            .map(|_| {
                let num = rng.gen_range(1..=9u32);
                let den = rng.gen_range(1..=4u32);
                BigRational::new(BigInt::from(num), BigInt::from(den))
            })
            .collect();
        WeightedPlabic {
            graph: graph.clone(),
            weights,
        }
    }

    /// Parse a weight file: lines `edge <name1> <name2> <p/q>`; edges
    /// not mentioned keep weight 1.
    pub fn from_text(graph: &PlabicGraph, text: &str) -> Result<Self> {
        let mut weights = vec![BigRational::one(); graph.edges.len()];
        let mut assigned = vec![false; graph.edges.len()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            if parts.len() != 4 || parts[0] != "edge" {
                return Err(err("expected `edge <name1> <name2> <p/q>`".into()));
            }
            let node = |name: &str| graph.nodes.iter().position(|nd| nd.name == name);
            let (Some(a), Some(b)) = (node(parts[1]), node(parts[2])) else {
                return Err(err(format!("unknown node in `{} {}`", parts[1], parts[2])));
            };
            let Some(e) = graph
                .edges
                .iter()
                .position(|ed| (ed.a == a && ed.b == b) || (ed.a == b && ed.b == a))
            else {
                return Err(err(format!("no edge {} {}", parts[1], parts[2])));
            };
            if assigned[e] {
                return Err(err(format!(
                    "edge {} {} assigned twice",
                    parts[1], parts[2]
                )));
            }
            let w = parse_rational(parts[3])
                .ok_or_else(|| err(format!("bad rational `{}`", parts[3])))?;
            if !w.is_positive() {
                return Err(err("weights must be positive".into()));
            }
            weights[e] = w;
            assigned[e] = true;
        }
        Ok(WeightedPlabic {
            graph: graph.clone(),
            weights,
        })
    }
}

/// Parse `p` or `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let mut it = s.splitn(2, '/');
    let num: BigInt = it.next()?.parse().ok()?;
    match it.next() {
        None => Some(BigRational::from(num)),
        Some(d) => {
            let den: BigInt = d.parse().ok()?;
            if den.is_zero() {
                None
            } else {
                Some(BigRational::new(num, den))
            }
        }
    }
}

/// One almost-perfect matching: every internal node covered exactly once
/// by an edge or its leg.
struct Matching {
    edges: Vec<usize>,
    legs: BTreeSet<usize>,
}

fn enumerate_matchings(g: &PlabicGraph) -> Vec<Matching> {
    let nn = g.nodes.len();
    let mut edges_at: Vec<Vec<usize>> = vec![Vec::new(); nn];
    for (i, e) in g.edges.iter().enumerate() {
        edges_at[e.a].push(i);
        edges_at[e.b].push(i);
    }
    let mut legs_at: Vec<Vec<usize>> = vec![Vec::new(); nn];
    for (k0, &node) in g.legs.iter().enumerate() {
        legs_at[node].push(k0 + 1);
    }
    let mut out = Vec::new();
    let mut covered = vec![false; nn];
    let mut edges_used = Vec::new();
    let mut legs_used = BTreeSet::new();
    fn go(
        g: &PlabicGraph,
        edges_at: &[Vec<usize>],
        legs_at: &[Vec<usize>],
        covered: &mut Vec<bool>,
        edges_used: &mut Vec<usize>,
        legs_used: &mut BTreeSet<usize>,
        out: &mut Vec<Matching>,
    ) {
        let Some(v) = covered.iter().position(|c| !c) else {
            out.push(Matching {
                edges: edges_used.clone(),
                legs: legs_used.clone(),
            });
            return;
        };
        covered[v] = true;
        for &e in &edges_at[v] {
            let u = g.edges[e].other(v);
            if covered[u] {
                continue;
            }
            covered[u] = true;
            edges_used.push(e);
            go(g, edges_at, legs_at, covered, edges_used, legs_used, out);
            edges_used.pop();
            covered[u] = false;
        }
        for &k in &legs_at[v] {
            legs_used.insert(k);
            go(g, edges_at, legs_at, covered, edges_used, legs_used, out);
            legs_used.remove(&k);
        }
        covered[v] = false;
    }
    go(
        g,
        &edges_at,
        &legs_at,
        &mut covered,
        &mut edges_used,
        &mut legs_used,
        &mut out,
    );
    out
}

/// The boundary set of a matching: marked points whose leg is used at a
/// black node, plus those whose leg is unused at a white node.
fn matching_boundary(g: &PlabicGraph, m: &Matching) -> Vec<usize> {
    (1..=g.n)
        .filter(|&k| {
            let black = g.nodes[g.legs[k - 1]].color == Color::Black;
            let used = m.legs.contains(&k);
            used == black
        })
        .collect()
}

/// The matching partition function for every boundary subset at once:
/// a map from sorted subsets to weighted matching sums.  All subsets of
/// the common boundary size appear, with zero values where no matching
/// realizes them.
pub fn all_boundary_measurements(wg: &WeightedPlabic) -> Result<BTreeMap<Vec<usize>, BigRational>> {
    let g = &wg.graph;
    let matchings = enumerate_matchings(g);
    if matchings.is_empty() {
        return Err(Error::Invalid("diagram admits no matchings".into()));
    }
    let mut sums: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
    let mut sizes: BTreeSet<usize> = BTreeSet::new();
    for m in &matchings {
        let boundary = matching_boundary(g, m);
        sizes.insert(boundary.len());
        let weight: BigRational = m.edges.iter().map(|&e| wg.weights[e].clone()).product();
        *sums.entry(boundary).or_insert_with(BigRational::zero) += weight;
    }
    if sizes.len() != 1 {
        return Err(Error::Internal(format!(
            "matchings produced boundary sizes {:?}",
            sizes
        )));
    }
    let k = *sizes.first().expect("one size");
    for s in all_k_subsets(g.n, k) {
        sums.entry(s.elems().to_vec())
            .or_insert_with(BigRational::zero);
    }
    Ok(sums)
}

/// The single boundary-measurement value for a subset `I`: the weighted
/// sum over matchings whose boundary set is `I` (zero when none is).
pub fn boundary_measurement(wg: &WeightedPlabic, i_set: &KSubset) -> Result<BigRational> {
    if i_set.n() != wg.graph.n {
        return Err(Error::Invalid(format!(
            "subset over {} points on a diagram with {}",
            i_set.n(),
            wg.graph.n
        )));
    }
    let g = &wg.graph;
    let mut total = BigRational::zero();
    for m in enumerate_matchings(g) {
        if matching_boundary(g, &m) == i_set.elems() {
            total += m
                .edges
                .iter()
                .map(|&e| wg.weights[e].clone())
                .product::<BigRational>();
        }
    }
    Ok(total)
}

/// The subset size of the diagram: the common cardinality of its region
/// labels.
pub fn diagram_k(g: &PlabicGraph) -> Result<usize> {
    let faces = g.faces()?;
    let labels = g.face_labels()?;
    Ok(labels[faces.at_arc(1)].len())
}

// ---------------------------------------------------------------------------
// Plücker relations
// ---------------------------------------------------------------------------

/// Check every 3-term Plücker relation on a table of values indexed by
/// sorted k-subsets of `{1..n}`: for each (k-2)-subset `S` and each
/// quadruple `a<b<c<d` disjoint from `S`,
/// `Δ_{Sac} Δ_{Sbd} = Δ_{Sab} Δ_{Scd} + Δ_{Sad} Δ_{Sbc}`.
/// Missing entries count as zero.
pub fn plucker_relations_ok(values: &BTreeMap<Vec<usize>, BigRational>, n: usize) -> bool {
    let Some(k) = values.keys().next().map(|s| s.len()) else {
        return true;
    };
    if k < 2 {
        return true;
    }
    let get = |s: &mut Vec<usize>| -> BigRational {
        s.sort_unstable();
        values.get(s).cloned().unwrap_or_else(BigRational::zero)
    };
    for s in all_k_subsets(n, k - 2) {
        let rest: Vec<usize> = (1..=n).filter(|x| !s.contains(*x)).collect();
        let m = rest.len();
        for p in 0..m {
            for q in (p + 1)..m {
                for r in (q + 1)..m {
                    for t in (r + 1)..m {
                        let (a, b, c, d) = (rest[p], rest[q], rest[r], rest[t]);
                        let with = |x: usize, y: usize| -> BigRational {
                            let mut key = s.elems().to_vec();
                            key.push(x);
                            key.push(y);
                            get(&mut key)
                        };
                        let lhs = with(a, c) * with(b, d);
                        let rhs = with(a, b) * with(c, d) + with(a, d) * with(b, c);
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Specialization of cluster variables to boundary measurements
// ---------------------------------------------------------------------------

/// Follow a mutation word on both sides of the dictionary — seed
/// mutation on the cluster side, square moves on the diagram side — then
/// check that every mutable cluster variable, evaluated at
/// `x_v := Δ_{label(v)}`, equals the measurement of its current region
/// label.  The empty word checks the defining assignment itself.
pub fn verify_specialization(g: &PlabicGraph, wg: &WeightedPlabic, word: &[&str]) -> Result<bool> {
    let seed0 = seed_from_diagram(g)?;
    let initial_labels: Vec<BTreeSet<usize>> = seed0
        .quiver
        .vertices
        .iter()
        .map(|v| parse_label(&v.id, g.n))
        .collect::<Result<_>>()?;
    let mut labels = initial_labels.clone();
    let mut seed = seed0;
    let mut diagram = g.clone();
    for &step in word {
        let k = seed
            .quiver
            .vertex_index(step)
            .ok_or_else(|| Error::NotFound(format!("no seed vertex {}", step)))?;
        let face = label_string(&labels[k], g.n);
        let moved = square_move(&diagram, &face)?;
        let old_labels = internal_label_set(&diagram)?;
        let new_labels = internal_label_set(&moved)?;
        let fresh: Vec<&BTreeSet<usize>> = new_labels.difference(&old_labels).collect();
        match fresh.as_slice() {
            [one] => labels[k] = (*one).clone(),
            [] => {
                return Err(Error::Internal(format!(
                    "square move at {} changed no region label",
                    face
                )))
            }
            _ => {
                return Err(Error::Internal(format!(
                    "square move at {} changed several region labels",
                    face
                )))
            }
        }
        seed = mutate_seed(&seed, k)?;
        diagram = moved;
    }
    let values: Vec<BigRational> = initial_labels
        .iter()
        .map(|l| boundary_measurement(wg, &KSubset::from_set(g.n, l)?))
        .collect::<Result<_>>()?;
    for (slot, label) in labels.iter().enumerate() {
        if !seed.quiver.is_mutable(slot) {
            continue;
        }
        let lhs = seed.vars[slot].eval(&values)?;
        let rhs = boundary_measurement(wg, &KSubset::from_set(g.n, label)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

fn internal_label_set(g: &PlabicGraph) -> Result<BTreeSet<BTreeSet<usize>>> {
    let faces = g.faces()?;
    let labels = g.face_labels()?;
    Ok(labels
        .iter()
        .enumerate()
        .filter(|(i, _)| !faces.faces[*i].is_boundary())
        .map(|(_, l)| l.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::plabic::parse_plabic;

    fn diagram(name: &str) -> PlabicGraph {
        parse_plabic(corpus::lookup(name).expect("corpus name")).expect("corpus parses")
    }

    fn ks(n: usize, elems: &[usize]) -> KSubset {
        KSubset::new(n, elems.to_vec()).expect("valid subset")
    }

    /// Direct quadruple-scan definition of weak separation, used as an
    /// independent oracle for the block-count implementation.
    fn weakly_separated_bruteforce(i: &KSubset, j: &KSubset) -> bool {
        let n = i.n();
        let d1: Vec<usize> = i
            .elems()
            .iter()
            .filter(|x| !j.contains(**x))
            .copied()
            .collect();
        let d2: Vec<usize> = j
            .elems()
            .iter()
            .filter(|x| !i.contains(**x))
            .copied()
            .collect();
        for a in 1..=n {
            for b in (a + 1)..=n {
                for c in (b + 1)..=n {
                    for d in (c + 1)..=n {
                        let in1 = |x: usize| d1.contains(&x);
                        let in2 = |x: usize| d2.contains(&x);
                        if (in1(a) && in2(b) && in1(c) && in2(d))
                            || (in2(a) && in1(b) && in2(c) && in1(d))
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn weak_separation_matches_bruteforce_and_known_cases() {
        assert!(!weakly_separated(&ks(4, &[1, 3]), &ks(4, &[2, 4])).expect("same shape"));
        let i = ks(5, &[2, 5]);
        assert!(weakly_separated(&i, &i).expect("same shape"));
        // Size mismatch is an error, not false.
        assert!(weakly_separated(&ks(5, &[1, 2]), &ks(5, &[1, 2, 3])).is_err());
        // Compare against the quadruple scan on every pair, and check
        // invariance under the cyclic shift of both arguments.
        for k in [2usize, 3] {
            let subsets = all_k_subsets(6, k);
            for a in &subsets {
                for b in &subsets {
                    let got = weakly_separated(a, b).expect("same shape");
                    assert_eq!(got, weakly_separated_bruteforce(a, b));
                    assert_eq!(got, weakly_separated(b, a).expect("same shape"));
                    let shift = |s: &KSubset| {
                        ks(6, &s.elems().iter().map(|&x| x % 6 + 1).collect::<Vec<_>>())
                    };
                    assert_eq!(
                        got,
                        weakly_separated(&shift(a), &shift(b)).expect("same shape")
                    );
                }
            }
        }
    }

    #[test]
    fn pentagon_labels_are_pairwise_weakly_separated() {
        let g = diagram("gr25");
        let labels = g.face_labels().expect("labels");
        let subsets: Vec<KSubset> = labels
            .iter()
            .map(|l| KSubset::from_set(5, l).expect("valid"))
            .collect();
        assert_eq!(subsets.len(), 7);
        for a in &subsets {
            for b in &subsets {
                assert!(weakly_separated(a, b).expect("same shape"));
            }
        }
    }

    #[test]
    fn necklaces_read_off_arc_labels() {
        let nk = necklace_of(&diagram("gr25")).expect("necklace");
        assert_eq!(nk.kind, NecklaceKind::ReverseArcs);
        let got: Vec<String> = nk.entries.iter().map(|e| e.label()).collect();
        assert_eq!(got, ["15", "12", "23", "34", "45"]);
        let triv = necklace_of(&diagram("triv13")).expect("necklace");
        let got: Vec<String> = triv.entries.iter().map(|e| e.label()).collect();
        assert_eq!(got, ["1", "2", "3"]);
        // The square move at an internal face leaves the necklace alone.
        let moved = square_move(&diagram("gr25"), "25").expect("move applies");
        assert_eq!(necklace_of(&moved).expect("necklace"), nk);
        // Necklace entries are pairwise weakly separated on all corpus
        // diagrams.
        for (name, _) in corpus::ALL {
            let nk = necklace_of(&diagram(name)).expect("necklace");
            for a in &nk.entries {
                for b in &nk.entries {
                    assert!(weakly_separated(a, b).expect("same shape"));
                }
            }
        }
    }

    #[test]
    fn positroid_membership_by_shifted_gale_orders() {
        // The uniform necklace admits every 2-subset.
        let uniform = necklace_of(&diagram("gr25")).expect("necklace");
        for s in all_k_subsets(5, 2) {
            assert!(positroid_member(&s, &uniform).expect("consistent"));
        }
        // The square diagram's positroid is every 2-subset except {1,4}.
        let nk = necklace_of(&diagram("gr24frozen")).expect("necklace");
        let members: Vec<String> = all_k_subsets(4, 2)
            .iter()
            .filter(|s| positroid_member(s, &nk).expect("consistent"))
            .map(|s| s.label())
            .collect();
        assert_eq!(members, ["12", "13", "23", "24", "34"]);
        // Necklace entries belong to their own positroid.
        for e in &nk.entries {
            assert!(positroid_member(e, &nk).expect("consistent"));
        }
        // A forward necklace compares upward: {1,2} fails against the
        // 1-shifted minimum {1,3}.
        let fwd = Necklace::forward(vec![
            ks(4, &[1, 3]),
            ks(4, &[2, 3]),
            ks(4, &[3, 4]),
            ks(4, &[1, 4]),
        ])
        .expect("valid necklace");
        assert!(!positroid_member(&ks(4, &[1, 2]), &fwd).expect("consistent"));
        assert!(positroid_member(&ks(4, &[1, 3]), &fwd).expect("consistent"));
        // Mismatched shapes are errors.
        assert!(positroid_member(&ks(5, &[1, 2]), &nk).is_err());
    }

    #[test]
    fn boundary_measurements_count_weighted_matchings() {
        // One-node diagram: each marked point's sum is a single leg
        // matching of weight 1.
        let triv = WeightedPlabic::unit(&diagram("triv13"));
        for k in 1..=3 {
            assert_eq!(
                boundary_measurement(&triv, &ks(3, &[k])).expect("measures"),
                BigRational::one()
            );
        }
        // Square diagram: the edge matching realizes {2,3}; leg pairs
        // realize {1,2}, {1,3}, {2,4}, {3,4}; nothing realizes {1,4}.
        let g = diagram("gr24frozen");
        let weights = "edge b w 5/3\n";
        let wg = WeightedPlabic::from_text(&g, weights).expect("weight file parses");
        let rat = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
        let val = |elems: &[usize]| boundary_measurement(&wg, &ks(4, elems)).expect("measures");
        assert_eq!(val(&[2, 3]), rat(5, 3));
        assert_eq!(val(&[1, 2]), rat(1, 1));
        assert_eq!(val(&[1, 3]), rat(1, 1));
        assert_eq!(val(&[2, 4]), rat(1, 1));
        assert_eq!(val(&[3, 4]), rat(1, 1));
        assert_eq!(val(&[1, 4]), rat(0, 1));
        // Zero exactly off the positroid, positive on it — also under
        // sampled weights.
        let nk = necklace_of(&g).expect("necklace");
        for seed in [0u64, 7] {
            let wg = WeightedPlabic::sample(&g, seed);
            let sums = all_boundary_measurements(&wg).expect("measures");
            for s in all_k_subsets(4, 2) {
                let member = positroid_member(&s, &nk).expect("consistent");
                let positive = sums[s.elems()].is_positive();
                assert_eq!(member, positive);
            }
        }
    }

    #[test]
    fn pentagon_measurements_satisfy_plucker_relations() {
        let g = diagram("gr25");
        for seed in [0u64, 1, 2] {
            let wg = WeightedPlabic::sample(&g, seed);
            let sums = all_boundary_measurements(&wg).expect("measures");
            assert!(plucker_relations_ok(&sums, 5));
            // The uniform positroid has every value positive.
            assert!(sums.values().all(|v| v.is_positive()));
        }
        let unit = all_boundary_measurements(&WeightedPlabic::unit(&g)).expect("measures");
        assert!(plucker_relations_ok(&unit, 5));
    }

    #[test]
    fn plucker_checker_agrees_with_matrix_minors() {
        // Minors of a random 2x5 integer matrix satisfy the three-term
        // relations identically; corrupting one value must break them.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m: Vec<Vec<i64>> = (0..2)
            .map(|_| (0..5).map(|_| rng.gen_range(-9..=9i64)).collect())
            .collect();
        let mut minors: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
        for a in 1..=5usize {
            for b in (a + 1)..=5 {
                let det = m[0][a - 1] * m[1][b - 1] - m[0][b - 1] * m[1][a - 1];
                minors.insert(vec![a, b], BigRational::from(BigInt::from(det)));
            }
        }
        assert!(plucker_relations_ok(&minors, 5));
        let corrupt = minors
            .values()
            .position(|v| !v.is_zero())
            .expect("some nonzero minor");
        let key = minors.keys().nth(corrupt).expect("key").clone();
        *minors.get_mut(&key).expect("entry") += BigRational::one();
        assert!(!plucker_relations_ok(&minors, 5));
    }

    #[test]
    fn specialization_commutes_with_mutation() {
        let g = diagram("gr25");
        for seed in [0u64, 1, 2] {
            let wg = WeightedPlabic::sample(&g, seed);
            assert!(verify_specialization(&g, &wg, &[]).expect("runs"));
            assert!(verify_specialization(&g, &wg, &["25"]).expect("runs"));
            assert!(verify_specialization(&g, &wg, &["25", "24"]).expect("runs"));
            assert!(verify_specialization(&g, &wg, &["24", "25"]).expect("runs"));
        }
        // A boundary region is not square-movable: the word errors out.
        let wg = WeightedPlabic::unit(&g);
        assert!(verify_specialization(&g, &wg, &["15"]).is_err());
    }

    #[test]
    fn sampled_weights_are_reproducible() {
        let g = diagram("gr25");
        let a = WeightedPlabic::sample(&g, 3);
        let b = WeightedPlabic::sample(&g, 3);
        assert_eq!(a.weights, b.weights);
        let c = WeightedPlabic::sample(&g, 4);
        assert_ne!(a.weights, c.weights);
        assert!(a.weights.iter().all(|w| w.is_positive()));
        // Weight files reject unknown edges and non-positive weights.
        assert!(WeightedPlabic::from_text(&g, "edge nope b 1\n").is_err());
        let gsq = diagram("gr24frozen");
        assert!(WeightedPlabic::from_text(&gsq, "edge b w 0\n").is_err());
        assert!(WeightedPlabic::from_text(&gsq, "edge b w 1/2\nedge w b 2\n").is_err());
    }
}
