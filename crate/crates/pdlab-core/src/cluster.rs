//! Seed mutation machinery: exact Laurent polynomials, seeds, exchange
//! graphs, Grothendieck-group classes of simples, and the cluster
//! character on thin modules.
//!
//! Cluster variables live in the Laurent ring over one variable per
//! quiver vertex.  All arithmetic is exact (`BigInt` coefficients);
//! mutation performs genuine exact division, so a division failure is a
//! bug signal rather than a rounding artifact.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::plabic::PlabicGraph;
use crate::quiver::{cyclic_derivative, qp_from_diagram, reduce_qp, Arrow, IceQP, IceQuiver};

// ---------------------------------------------------------------------------
// Laurent polynomials
// ---------------------------------------------------------------------------

/// A Laurent polynomial with integer coefficients in a fixed number of
/// variables.  Stored in canonical form: exponent vectors map to nonzero
/// coefficients, so structural equality is polynomial identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LaurentPoly {
    nv: usize,
    terms: BTreeMap<Vec<i32>, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nv: usize) -> Self {
        LaurentPoly {
            nv,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nv: usize) -> Self {
        Self::monomial(vec![0; nv], BigInt::one())
    }

    /// The variable with index `i`.
    pub fn var(nv: usize, i: usize) -> Self {
        assert!(i < nv, "variable index out of range");
        let mut exps = vec![0; nv];
        exps[i] = 1;
        Self::monomial(exps, BigInt::one())
    }

    /// A single term `coeff * x^exps`.
    pub fn monomial(exps: Vec<i32>, coeff: BigInt) -> Self {
        let nv = exps.len();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps, coeff);
        }
        LaurentPoly { nv, terms }
    }

    pub fn num_vars(&self) -> usize {
        self.nv
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms as (exponent vector, coefficient), in a fixed order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficients_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn add(&self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nv, rhs.nv, "mixed variable counts");
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        LaurentPoly { nv: self.nv, terms }
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            nv: self.nv,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nv, rhs.nv, "mixed variable counts");
        let mut terms: BTreeMap<Vec<i32>, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let entry = terms.entry(e).or_insert_with(BigInt::zero);
                *entry += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentPoly { nv: self.nv, terms }
    }

    /// Exact division: returns `q` with `self = q * rhs`, or an error if
    /// no such Laurent polynomial with integer coefficients exists.
    ///
    /// Both operands are shifted by their componentwise minimal exponents
    /// (a unit in the Laurent ring), which reduces the problem to
    /// ordinary polynomial division by a single divisor; for one divisor,
    /// leading-term division in lexicographic order is a decision
    /// procedure, so a failure genuinely means "not divisible".
    pub fn div_exact(&self, rhs: &LaurentPoly) -> Result<LaurentPoly> {
        assert_eq!(self.nv, rhs.nv, "mixed variable counts");
        if rhs.is_zero() {
            return Err(Error::Invalid("division by the zero polynomial".into()));
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero(self.nv));
        }
        let shift = |p: &LaurentPoly| -> Vec<i32> {
            let mut m = vec![i32::MAX; p.nv];
            for e in p.terms.keys() {
                for (mi, &ei) in m.iter_mut().zip(e) {
                    *mi = (*mi).min(ei);
                }
            }
            m
        };
        let shift_f = shift(self);
        let shift_d = shift(rhs);
        let lift = |p: &LaurentPoly, s: &[i32]| -> BTreeMap<Vec<i32>, BigInt> {
            p.terms
                .iter()
                .map(|(e, c)| {
                    (
                        e.iter().zip(s).map(|(a, b)| a - b).collect::<Vec<i32>>(),
                        c.clone(),
                    )
                })
                .collect()
        };
        let mut rem = lift(self, &shift_f);
        let div = lift(rhs, &shift_d);
        let (lt_d, c_d) = div
            .last_key_value()
            .map(|(e, c)| (e.clone(), c.clone()))
            .expect("nonzero divisor");
        let fail = || Error::Internal("quotient is not an integer Laurent polynomial".into());
        let mut quo: BTreeMap<Vec<i32>, BigInt> = BTreeMap::new();
        while let Some((lt_r, c_r)) = rem.last_key_value().map(|(e, c)| (e.clone(), c.clone())) {
            if lt_r.iter().zip(&lt_d).any(|(r, d)| r < d) {
                return Err(fail());
            }
            if !(&c_r % &c_d).is_zero() {
                return Err(fail());
            }
            let q_exp: Vec<i32> = lt_r.iter().zip(&lt_d).map(|(r, d)| r - d).collect();
            let q_c = &c_r / &c_d;
            for (e, c) in &div {
                let re: Vec<i32> = e.iter().zip(&q_exp).map(|(a, b)| a + b).collect();
                let entry = rem.entry(re).or_insert_with(BigInt::zero);
                *entry -= &q_c * c;
                if entry.is_zero() {
                    let key: Vec<i32> = e.iter().zip(&q_exp).map(|(a, b)| a + b).collect();
                    rem.remove(&key);
                }
            }
            quo.insert(q_exp, q_c);
        }
        // Undo the unit shifts: quotient exponents move by shift_f - shift_d.
        let back: Vec<i32> = shift_f.iter().zip(&shift_d).map(|(a, b)| a - b).collect();
        let terms = quo
            .into_iter()
            .map(|(e, c)| {
                (
                    e.iter()
                        .zip(&back)
                        .map(|(a, b)| a + b)
                        .collect::<Vec<i32>>(),
                    c,
                )
            })
            .collect();
        Ok(LaurentPoly { nv: self.nv, terms })
    }

    /// Evaluate at exact rational values, one per variable.  Zero values
    /// are rejected when they meet a negative exponent.
    pub fn eval(&self, vals: &[num_rational::BigRational]) -> Result<num_rational::BigRational> {
        assert_eq!(vals.len(), self.nv, "value count mismatch");
        let mut acc = num_rational::BigRational::zero();
        for (exps, coeff) in &self.terms {
            let mut term = num_rational::BigRational::from(coeff.clone());
            for (v, &e) in vals.iter().zip(exps) {
                if e == 0 {
                    continue;
                }
                if v.is_zero() && e < 0 {
                    return Err(Error::Invalid(
                        "evaluation divides by a zero variable".into(),
                    ));
                }
                term *= v.pow(e);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Deterministic text form used for seed deduplication keys.
    pub fn canonical_encoding(&self) -> String {
        let mut s = String::new();
        for (e, c) in &self.terms {
            let _ = write!(s, "{:?}:{};", e, c);
        }
        s
    }

    /// Human-readable form with `labels[i]` naming variable `i`.
    pub fn render(&self, labels: &[String]) -> String {
        assert_eq!(labels.len(), self.nv, "label count mismatch");
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (exps, coeff)) in self.terms.iter().enumerate() {
            let negative = coeff.is_negative();
            let mag = coeff.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{}", labels[i])),
                    _ => factors.push(format!("x{}^{}", labels[i], e)),
                }
            }
            if factors.is_empty() {
                let _ = write!(out, "{}", mag);
            } else {
                if !mag.is_one() {
                    let _ = write!(out, "{}*", mag);
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Seeds and mutation
// ---------------------------------------------------------------------------

/// A seed: an ice quiver together with one cluster variable per vertex,
/// each a Laurent polynomial in the initial variables.  Seed quivers
/// carry no arrows between two frozen vertices — such arrows are
/// invisible to mutation and to seed identity, so they are stripped on
/// construction and never recreated.
#[derive(Clone, Debug)]
pub struct Seed {
    pub quiver: IceQuiver,
    pub vars: Vec<LaurentPoly>,
}

impl Seed {
    /// Vertex ids, in slot order (slot i owns variable i).
    pub fn labels(&self) -> Vec<String> {
        self.quiver.vertices.iter().map(|v| v.id.clone()).collect()
    }

    /// Key identifying a seed by its unordered set of cluster variables.
    pub fn cluster_key(&self) -> String {
        let mut enc: Vec<String> = self.vars.iter().map(|p| p.canonical_encoding()).collect();
        enc.sort();
        enc.join("|")
    }
}

/// Build the initial seed of a quiver-with-potential: variable `x_v` at
/// every vertex, and the quiver minus arrows between frozen vertices.
pub fn seed_from_qp(qp: &IceQP) -> Seed {
    let mut quiver = qp.quiver.clone();
    let frozen: Vec<bool> = quiver.vertices.iter().map(|v| v.frozen).collect();
    quiver
        .arrows
        .retain(|a| !(frozen[a.tail] && frozen[a.head]));
    let nv = quiver.vertices.len();
    let vars = (0..nv).map(|i| LaurentPoly::var(nv, i)).collect();
    Seed { quiver, vars }
}

/// Initial seed of a diagram: reduce the diagram's quiver-with-potential
/// first, so the seed quiver is 2-acyclic at the mutable vertices.
pub fn seed_from_diagram(g: &PlabicGraph) -> Result<Seed> {
    let (qp, _) = reduce_qp(&qp_from_diagram(g)?)?;
    Ok(seed_from_qp(&qp))
}

/// The two exchange monomials at slot `k`: the product of variables over
/// arrows out of `k` and the product over arrows into `k`.
pub fn exchange_monomials(seed: &Seed, k: usize) -> (LaurentPoly, LaurentPoly) {
    let nv = seed.vars.len();
    let mut out_m = LaurentPoly::one(nv);
    let mut in_m = LaurentPoly::one(nv);
    for a in &seed.quiver.arrows {
        if a.tail == k {
            out_m = out_m.mul(&seed.vars[a.head]);
        }
        if a.head == k {
            in_m = in_m.mul(&seed.vars[a.tail]);
        }
    }
    (out_m, in_m)
}

/// Quiver mutation at a mutable vertex `k`: compose through `k`, reverse
/// the arrows at `k`, cancel opposing pairs, and drop any composite
/// between two frozen vertices.
fn mutate_quiver(q: &IceQuiver, k: usize) -> Result<IceQuiver> {
    let frozen: Vec<bool> = q.vertices.iter().map(|v| v.frozen).collect();
    let mut count: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for a in &q.arrows {
        if a.tail == a.head {
            return Err(Error::Internal("seed quiver has a loop".into()));
        }
        *count.entry((a.tail, a.head)).or_insert(0) += 1;
    }
    let nv = q.vertices.len();
    for i in 0..nv {
        if count.contains_key(&(i, k)) && count.contains_key(&(k, i)) {
            return Err(Error::Internal(format!(
                "seed quiver has a 2-cycle through {}",
                q.vertices[k].id
            )));
        }
    }
    let mut new: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (&(i, j), &m) in &count {
        if i != k && j != k {
            *new.entry((i, j)).or_insert(0) += m;
        }
    }
    // Composites i -> k -> j, then reversals of every arrow at k.
    for (&(i, kk), &m1) in &count {
        if kk != k {
            continue;
        }
        for (&(kk2, j), &m2) in &count {
            if kk2 != k {
                continue;
            }
            if frozen[i] && frozen[j] {
                continue;
            }
            *new.entry((i, j)).or_insert(0) += m1 * m2;
        }
        *new.entry((k, i)).or_insert(0) += m1;
    }
    for (&(kk, j), &m) in &count {
        if kk == k {
            *new.entry((j, k)).or_insert(0) += m;
        }
    }
    // Cancel opposing pairs.
    let pairs: Vec<(usize, usize)> = new.keys().filter(|(i, j)| i < j).cloned().collect();
    for (i, j) in pairs {
        let fwd = new.get(&(i, j)).copied().unwrap_or(0);
        let bwd = new.get(&(j, i)).copied().unwrap_or(0);
        let t = fwd.min(bwd);
        if t > 0 {
            *new.get_mut(&(i, j)).expect("fwd present") -= t;
            *new.get_mut(&(j, i)).expect("bwd present") -= t;
        }
    }
    let mut arrows = Vec::new();
    for ((i, j), m) in new {
        if i == j && m > 0 {
            return Err(Error::Internal("quiver mutation produced a loop".into()));
        }
        for _ in 0..m {
            arrows.push(Arrow {
                id: format!("e{}", arrows.len()),
                tail: i,
                head: j,
                frozen: false,
            });
        }
    }
    Ok(IceQuiver {
        vertices: q.vertices.clone(),
        arrows,
    })
}

/// Mutate a seed at slot `k`.  The new variable is
/// `(out-monomial + in-monomial) / x_k`, divided exactly; a division
/// failure would falsify the Laurent phenomenon and is reported as an
/// internal error.
pub fn mutate_seed(seed: &Seed, k: usize) -> Result<Seed> {
    if k >= seed.vars.len() {
        return Err(Error::NotFound(format!("seed has no slot {}", k)));
    }
    if !seed.quiver.is_mutable(k) {
        return Err(Error::Unsupported(format!(
            "vertex {} is frozen and cannot be mutated",
            seed.quiver.vertices[k].id
        )));
    }
    let (out_m, in_m) = exchange_monomials(seed, k);
    let new_var = out_m.add(&in_m).div_exact(&seed.vars[k]).map_err(|_| {
        Error::Internal(format!(
            "Laurent phenomenon violated at vertex {}",
            seed.quiver.vertices[k].id
        ))
    })?;
    let quiver = mutate_quiver(&seed.quiver, k)?;
    let mut vars = seed.vars.clone();
    vars[k] = new_var;
    Ok(Seed { quiver, vars })
}

/// Mutate a seed at the vertex with the given id.
pub fn mutate_seed_by_id(seed: &Seed, id: &str) -> Result<Seed> {
    let k = seed
        .quiver
        .vertex_index(id)
        .ok_or_else(|| Error::NotFound(format!("no vertex {}", id)))?;
    mutate_seed(seed, k)
}

// ---------------------------------------------------------------------------
// Exchange graphs
// ---------------------------------------------------------------------------

/// An edge of the exchange graph: seed `from` mutated at slot `slot`
/// yields seed `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeEdge {
    pub from: usize,
    pub to: usize,
    pub slot: usize,
}

/// The exchange graph explored from an initial seed.  Seeds are
/// identified by their unordered sets of cluster variables; `complete`
/// is false when the seed cap stopped the search early.
#[derive(Clone, Debug)]
pub struct ExchangeGraph {
    pub seeds: Vec<Seed>,
    pub edges: Vec<ExchangeEdge>,
    pub complete: bool,
}

impl ExchangeGraph {
    /// Number of distinct cluster variables sitting at mutable slots
    /// across all seeds.
    pub fn mutable_variable_count(&self) -> usize {
        let mut enc = BTreeSet::new();
        for s in &self.seeds {
            for (i, v) in s.vars.iter().enumerate() {
                if s.quiver.is_mutable(i) {
                    enc.insert(v.canonical_encoding());
                }
            }
        }
        enc.len()
    }
}

/// Breadth-first exploration of the exchange graph, deduplicating seeds
/// by cluster-variable sets.  Stops growing once `max_seeds` seeds are
/// known; edges between already-known seeds are still recorded.
pub fn exchange_graph(start: &Seed, max_seeds: usize) -> Result<ExchangeGraph> {
    let mut seeds = vec![start.clone()];
    let mut key_of: HashMap<String, usize> = HashMap::new();
    key_of.insert(start.cluster_key(), 0);
    let mut edges: Vec<ExchangeEdge> = Vec::new();
    let mut seen_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut complete = true;
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(idx) = queue.pop_front() {
        let mutable: Vec<usize> = (0..seeds[idx].vars.len())
            .filter(|&i| seeds[idx].quiver.is_mutable(i))
            .collect();
        for k in mutable {
            let next = mutate_seed(&seeds[idx], k)?;
            let key = next.cluster_key();
            let target = match key_of.get(&key) {
                Some(&t) => t,
                None => {
                    if seeds.len() >= max_seeds {
                        complete = false;
                        continue;
                    }
                    let t = seeds.len();
                    seeds.push(next);
                    key_of.insert(key, t);
                    queue.push_back(t);
                    t
                }
            };
            let pair = (idx.min(target), idx.max(target));
            if seen_pairs.insert(pair) {
                edges.push(ExchangeEdge {
                    from: idx,
                    to: target,
                    slot: k,
                });
            }
        }
    }
    Ok(ExchangeGraph {
        seeds,
        edges,
        complete,
    })
}

// ---------------------------------------------------------------------------
// Grothendieck-group classes
// ---------------------------------------------------------------------------

/// A class in the Grothendieck group of perfect complexes, written in
/// the basis of vertex projectives: `class[i]` is the coefficient of
/// `[P_i]`.
pub type K0Class = Vec<i64>;

/// The class of the vertex projective `P_v`.
pub fn projective_class(nv: usize, v: usize) -> K0Class {
    let mut c = vec![0; nv];
    c[v] = 1;
    c
}

/// The class of the vertex simple `S_v` as an alternating sum over its
/// projective resolution: `[P_v] - Σ_{b: v→·} [P_{h(b)}] +
/// Σ_{a: ·→v mutable} [P_{t(a)}] - [P_v]`, the last term only when `v`
/// is mutable.  Valid once the resolution has been certified exact,
/// which the homology checker establishes degree by degree.
pub fn simple_class(q: &IceQuiver, v: usize) -> K0Class {
    let nv = q.vertices.len();
    let mut c = vec![0i64; nv];
    c[v] += 1;
    for b in q.arrows_out(v) {
        c[q.arrows[b].head] -= 1;
    }
    for a in q.mutable_arrows_in(v) {
        c[q.arrows[a].tail] += 1;
    }
    if q.is_mutable(v) {
        c[v] -= 1;
    }
    c
}

/// All simple classes, as columns of a square matrix (entry `(i, j)` is
/// the `[P_i]`-coefficient of `[S_j]`).
///
/// Over a dimer quiver these columns always sum to zero — the frozen
/// arrows cycle once through the frozen vertices and the unfrozen
/// arrows balance in- against out-degree everywhere — so the full
/// matrix is singular; the basis statement lives on the mutable block
/// (see [`mutable_class_block`]).
pub fn simple_class_matrix(q: &IceQuiver) -> Vec<K0Class> {
    (0..q.vertices.len()).map(|v| simple_class(q, v)).collect()
}

/// The mutable block of the simple-class matrix: one column per mutable
/// vertex `j`, holding the `[P_i]`-coefficients of `[S_j]` at mutable
/// `i` only.  Unimodularity of this block is the precise sense in which
/// mutable simples and projectives are dual bases under the Euler
/// pairing: frozen projectives are fixed by mutation and quotient out.
pub fn mutable_class_block(q: &IceQuiver) -> Vec<K0Class> {
    let mutable: Vec<usize> = (0..q.vertices.len()).filter(|&v| q.is_mutable(v)).collect();
    mutable
        .iter()
        .map(|&j| {
            let col = simple_class(q, j);
            mutable.iter().map(|&i| col[i]).collect()
        })
        .collect()
}

/// Whether the given classes form a Z-basis: the matrix with these
/// columns has determinant ±1.  For the simple classes this is exactly
/// the statement that projectives and simples are dual bases under the
/// Euler pairing.
pub fn classes_unimodular(classes: &[K0Class]) -> bool {
    let n = classes.len();
    if classes.iter().any(|c| c.len() != n) {
        return false;
    }
    let mut m = QMatrix::zeros(n, n);
    for (j, col) in classes.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            m.set(i, j, BigInt::from(v).into());
        }
    }
    m.det().abs().is_one()
}

// ---------------------------------------------------------------------------
// Thin modules and the cluster character
// ---------------------------------------------------------------------------

/// A thin module: dimension at most one at every vertex (the support),
/// with each quiver arrow between supported vertices acting by 1 (listed
/// in `arrows`) or by 0 (absent).  Indices refer to the owning quiver's
/// vertex and arrow orders.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ThinModule {
    pub support: BTreeSet<usize>,
    pub arrows: BTreeSet<usize>,
}

impl ThinModule {
    /// The simple module at a single vertex.
    pub fn simple(v: usize) -> Self {
        ThinModule {
            support: BTreeSet::from([v]),
            arrows: BTreeSet::new(),
        }
    }
}

/// Check that a thin module is well formed over the given
/// quiver-with-potential: arrows act between supported vertices, and
/// every relation (cyclic derivative by an unfrozen arrow) vanishes on
/// the representation.
pub fn validate_thin_module(qp: &IceQP, m: &ThinModule) -> Result<()> {
    let q = &qp.quiver;
    for &v in &m.support {
        if v >= q.vertices.len() {
            return Err(Error::NotFound(format!("no vertex index {}", v)));
        }
    }
    for &a in &m.arrows {
        let Some(ar) = q.arrows.get(a) else {
            return Err(Error::NotFound(format!("no arrow index {}", a)));
        };
        if !m.support.contains(&ar.tail) || !m.support.contains(&ar.head) {
            return Err(Error::Invalid(format!(
                "arrow {} acts outside the module support",
                ar.id
            )));
        }
    }
    for a in 0..q.arrows.len() {
        if q.arrows[a].frozen {
            continue;
        }
        let mut total = num_rational::BigRational::zero();
        for t in cyclic_derivative(&qp.potential, a) {
            if t.arrows.iter().all(|x| m.arrows.contains(x)) {
                total += &t.coeff;
            }
        }
        if !total.is_zero() {
            return Err(Error::Invalid(format!(
                "relation for arrow {} does not vanish on the module",
                q.arrows[a].id
            )));
        }
    }
    Ok(())
}

/// Submodule supports of a thin module: subsets of the support closed
/// under every arrow that acts by 1.
fn successor_closed_subsets(m: &ThinModule, q: &IceQuiver) -> Vec<Vec<usize>> {
    let supp: Vec<usize> = m.support.iter().copied().collect();
    let pos: HashMap<usize, usize> = supp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let acting: Vec<(usize, usize)> = m
        .arrows
        .iter()
        .map(|&a| (pos[&q.arrows[a].tail], pos[&q.arrows[a].head]))
        .collect();
    let s = supp.len();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << s) {
        let closed = acting
            .iter()
            .all(|&(t, h)| mask & (1 << t) == 0 || mask & (1 << h) != 0);
        if closed {
            out.push(
                (0..s)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| supp[i])
                    .collect(),
            );
        }
    }
    out
}

/// The cluster character of a thin module with a caller-supplied index:
/// `Φ = x^index · Σ_S x^{-Σ_{i∈S}[S_i]}` summed over submodule supports
/// `S` (successor-closed subsets).  Exponent vectors are read through
/// the projective-basis classes of the simples.
pub fn cluster_character_thin(qp: &IceQP, index: &[i64], m: &ThinModule) -> Result<LaurentPoly> {
    let nv = qp.quiver.vertices.len();
    if index.len() != nv {
        return Err(Error::Invalid(format!(
            "index has {} entries for {} vertices",
            index.len(),
            nv
        )));
    }
    if m.support.len() > 20 {
        return Err(Error::CapExceeded(
            "thin module support too large to enumerate submodules".into(),
        ));
    }
    validate_thin_module(qp, m)?;
    let simples: HashMap<usize, K0Class> = m
        .support
        .iter()
        .map(|&v| (v, simple_class(&qp.quiver, v)))
        .collect();
    let to_exps = |c: &[i64]| -> Result<Vec<i32>> {
        c.iter()
            .map(|&x| i32::try_from(x).map_err(|_| Error::Internal("exponent overflow".into())))
            .collect()
    };
    let mut phi = LaurentPoly::zero(nv);
    for subset in successor_closed_subsets(m, &qp.quiver) {
        let mut exps: Vec<i64> = index.to_vec();
        for v in subset {
            for (e, s) in exps.iter_mut().zip(&simples[&v]) {
                *e -= s;
            }
        }
        phi = phi.add(&LaurentPoly::monomial(to_exps(&exps)?, BigInt::one()));
    }
    Ok(phi)
}

/// Whether four Laurent polynomials satisfy a genuine exchange relation
/// `Φx · Φy = Φplus + Φminus` with both right-hand terms nonzero (an
/// exchange pair comes from two non-split sequences, so a vanishing term
/// disqualifies the quadruple).
pub fn verify_exchange_relation(
    x: &LaurentPoly,
    y: &LaurentPoly,
    plus: &LaurentPoly,
    minus: &LaurentPoly,
) -> bool {
    !plus.is_zero() && !minus.is_zero() && x.mul(y) == plus.add(minus)
}
