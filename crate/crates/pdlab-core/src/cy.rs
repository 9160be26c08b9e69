//! The weight-sliced complex of projectives attached to a vertex
//! simple, and its exactness and resolution-length certificates.
//!
//! For a vertex `v` of a weighted QP the complex is
//!
//! ```text
//!   P(-3) --mu3--> P(-2) --mu2--> P(-1) --mu1--> P(0) --> S_v --> 0
//! ```
//!
//! with `P(0) = A e_v`, `P(-1)` a sum over arrows out of `v`,
//! `P(-2)` a sum over unfrozen arrows into `v` (differential through
//! second derivatives of the potential), and `P(-3) = A e_v` again
//! when `v` is mutable. Every differential preserves the `Z^n` weight
//! after the standard shifts, so the whole complex splits into
//! finite-dimensional slices indexed by weight vectors; each slice is
//! checked independently with exact rational arithmetic.

use crate::algebra::{weight_total, ThinData, Weight};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::quiver::{cyclic_derivative, normalize_paths, strip_first, strip_last, IceQP};

use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Positions of the complex that can be checked.
pub const ALL_POSITIONS: [i32; 4] = [-3, -2, -1, 0];

/// A failed slice: nonzero homology or a broken differential square.
#[derive(Clone, Debug)]
pub enum CyFailure {
    Homology {
        weight: Weight,
        position: i32,
        dim: usize,
    },
    DSquared {
        weight: Weight,
        which: &'static str,
    },
}

impl std::fmt::Display for CyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CyFailure::Homology {
                weight,
                position,
                dim,
            } => write!(
                f,
                "homology of dimension {} at position {} in slice {:?}",
                dim, position, weight
            ),
            CyFailure::DSquared { weight, which } => {
                write!(f, "{} fails to square to zero in slice {:?}", which, weight)
            }
        }
    }
}

/// Exactness certificate for one vertex.
#[derive(Clone, Debug)]
pub struct ExactnessReport {
    pub vertex: String,
    pub maxdeg: u32,
    pub positions: Vec<i32>,
    pub slices: usize,
    pub failures: Vec<CyFailure>,
    pub passed: bool,
}

/// Basis element of one slice: (component arrow or NONE, endpoint
/// vertex, weight of the path-class part).
type Key = (usize, usize, Weight);
const NONE: usize = usize::MAX;

struct Basis {
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
}

impl Basis {
    fn new() -> Basis {
        Basis {
            keys: Vec::new(),
            index: HashMap::new(),
        }
    }
    fn push(&mut self, k: Key) {
        if !self.index.contains_key(&k) {
            self.index.insert(k.clone(), self.keys.len());
            self.keys.push(k);
        }
    }
    fn len(&self) -> usize {
        self.keys.len()
    }
}

/// Check exactness of the sliced complex at `v` in the given
/// positions, over every slice of total degree at most the cap the
/// thin data was built with.
pub fn check_exactness(td: &ThinData, v: usize, positions: &[i32]) -> Result<ExactnessReport> {
    let qp = &td.qp;
    let n = qp.n;
    let nv = qp.quiver.vertices.len();
    for &p in positions {
        if !ALL_POSITIONS.contains(&p) {
            return Err(Error::Invalid(format!("no position {} in the complex", p)));
        }
    }
    let weights = qp
        .weights
        .as_ref()
        .ok_or_else(|| Error::Invalid("QP carries no arrow weights".into()))?;
    let one: Weight = vec![1; n];
    let tails: Vec<usize> = qp.quiver.arrows_out(v);
    let heads_mut: Vec<usize> = qp.quiver.mutable_arrows_in(v);
    let mutable = qp.quiver.is_mutable(v);

    // Derivative relations used by mu2, indexed by arrow.
    let mut deriv: BTreeMap<usize, Vec<crate::quiver::PathTerm>> = BTreeMap::new();
    for &a in &heads_mut {
        deriv.insert(a, cyclic_derivative(&qp.potential, a));
    }

    // Collect the slice weights that can host any basis element.
    let mut slices: BTreeSet<Weight> = BTreeSet::new();
    let ladder =
        |from: usize, shift_add: &Weight, shift_sub: &Weight, slices: &mut BTreeSet<Weight>| {
            for u in 0..nv {
                let Some((_, min_wt)) = td.min_path[from][u].clone() else {
                    continue;
                };
                let mut m = 0u32;
                loop {
                    let class_wt: Weight = min_wt.iter().map(|c| c + m).collect();
                    if weight_total(&class_wt) > td.maxdeg {
                        break;
                    }
                    let mut lam: Weight =
                        class_wt.iter().zip(shift_add).map(|(a, b)| a + b).collect();
                    let ok = lam.iter_mut().zip(shift_sub).all(|(a, b)| {
                        if *a >= *b {
                            *a -= *b;
                            true
                        } else {
                            false
                        }
                    });
                    if ok && weight_total(&lam) <= td.maxdeg {
                        slices.insert(lam);
                    }
                    m += 1;
                }
            }
        };
    let zero: Weight = vec![0; n];
    ladder(v, &zero, &zero, &mut slices);
    if mutable {
        ladder(v, &one, &zero, &mut slices);
    }
    for &b in &tails {
        ladder(qp.quiver.arrows[b].head, &weights[b], &zero, &mut slices);
    }
    for &a in &heads_mut {
        ladder(qp.quiver.arrows[a].tail, &one, &weights[a], &mut slices);
    }

    let mut failures = Vec::new();
    let mut checked = 0usize;
    for lam in &slices {
        checked += 1;
        // Assemble the four slice bases.
        let mut b0 = Basis::new();
        let mut b1 = Basis::new();
        let mut b2 = Basis::new();
        let mut b3 = Basis::new();
        for u in 0..nv {
            if td.bucket(v, u, lam).is_some_and(|b| b.dim == 1) {
                b0.push((NONE, u, lam.clone()));
            }
        }
        for &b in &tails {
            let Some(wx) = sub(lam, &weights[b]) else {
                continue;
            };
            for u in 0..nv {
                if td
                    .bucket(qp.quiver.arrows[b].head, u, &wx)
                    .is_some_and(|bk| bk.dim == 1)
                {
                    b1.push((b, u, wx.clone()));
                }
            }
        }
        for &a in &heads_mut {
            let lifted = add(lam, &weights[a]);
            let Some(wx) = sub(&lifted, &one) else {
                continue;
            };
            for u in 0..nv {
                if td
                    .bucket(qp.quiver.arrows[a].tail, u, &wx)
                    .is_some_and(|bk| bk.dim == 1)
                {
                    b2.push((a, u, wx.clone()));
                }
            }
        }
        if mutable {
            if let Some(wx) = sub(lam, &one) {
                for u in 0..nv {
                    if td.bucket(v, u, &wx).is_some_and(|b| b.dim == 1) {
                        b3.push((NONE, u, wx.clone()));
                    }
                }
            }
        }

        // mu1 : P(-1) -> P(0), x (x) [b] |-> b . x
        let mut m1 = QMatrix::zeros(b0.len(), b1.len());
        for (col, (b, u, wx)) in b1.keys.iter().enumerate() {
            let bk = td
                .bucket(qp.quiver.arrows[*b].head, *u, wx)
                .expect("basis bucket");
            let rep = bk.paths[bk.rep].clone();
            let mut word = vec![*b];
            word.extend_from_slice(&rep);
            if let Some((u2, wt2, c)) = td.class_in_basis(v, &word)? {
                let row = *b0
                    .index
                    .get(&(NONE, u2, wt2))
                    .ok_or_else(|| Error::Internal("image outside basis".into()))?;
                m1.add_to(row, col, &c);
            }
        }

        // mu2 : P(-2) -> P(-1), via second derivatives of W.
        let mut m2 = QMatrix::zeros(b1.len(), b2.len());
        for (col, (a, u, wx)) in b2.keys.iter().enumerate() {
            let bucket = td
                .bucket(qp.quiver.arrows[*a].tail, *u, wx)
                .expect("basis bucket");
            let rep = bucket.paths[bucket.rep].clone();
            for t in deriv.get(a).into_iter().flatten() {
                let Some((&b, rest)) = t.arrows.split_first() else {
                    continue;
                };
                debug_assert_eq!(qp.quiver.arrows[b].tail, v);
                let mut word = rest.to_vec();
                word.extend_from_slice(&rep);
                if let Some((u2, wt2, c)) = td.class_in_basis(qp.quiver.arrows[b].head, &word)? {
                    let row = *b1
                        .index
                        .get(&(b, u2, wt2))
                        .ok_or_else(|| Error::Internal("image outside basis".into()))?;
                    m2.add_to(row, col, &(t.coeff.clone() * &c));
                }
            }
        }

        // mu3 : P(-3) -> P(-2), x |-> sum_a (a . x) (x) [a]
        let mut m3 = QMatrix::zeros(b2.len(), b3.len());
        for (col, (_, u, wx)) in b3.keys.iter().enumerate() {
            let bucket = td.bucket(v, *u, wx).expect("basis bucket");
            let rep = bucket.paths[bucket.rep].clone();
            for &a in &heads_mut {
                let mut word = vec![a];
                word.extend_from_slice(&rep);
                if let Some((u2, wt2, c)) = td.class_in_basis(qp.quiver.arrows[a].tail, &word)? {
                    let row = *b2
                        .index
                        .get(&(a, u2, wt2))
                        .ok_or_else(|| Error::Internal("image outside basis".into()))?;
                    m3.add_to(row, col, &c);
                }
            }
        }

        if !m1.mul(&m2).is_zero() {
            failures.push(CyFailure::DSquared {
                weight: lam.clone(),
                which: "mu1 . mu2",
            });
            continue;
        }
        if !m2.mul(&m3).is_zero() {
            failures.push(CyFailure::DSquared {
                weight: lam.clone(),
                which: "mu2 . mu3",
            });
            continue;
        }

        let r1 = m1.rank();
        let r2 = m2.rank();
        let r3 = m3.rank();
        let mut record = |pos: i32, dim: usize| {
            if dim > 0 && positions.contains(&pos) {
                failures.push(CyFailure::Homology {
                    weight: lam.clone(),
                    position: pos,
                    dim,
                });
            }
        };
        record(-3, b3.len() - r3);
        record(-2, b2.len() - r2 - r3);
        record(-1, b1.len() - r1 - r2);
        let expected = if lam.iter().all(|&c| c == 0) { 1 } else { 0 };
        record(0, b0.len() - r1 - expected);
    }

    Ok(ExactnessReport {
        vertex: qp.quiver.vertices[v].id.clone(),
        maxdeg: td.maxdeg,
        positions: positions.to_vec(),
        slices: checked,
        passed: failures.is_empty(),
        failures,
    })
}

fn add(a: &Weight, b: &Weight) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &Weight, b: &Weight) -> Option<Weight> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}

/// Tor dimensions of the vertex simple against the complex, after
/// certifying that the complex is a resolution (exact away from
/// position 0). Returns `(length, [tor0, tor1, tor2, tor3])`.
pub fn graded_resolution_length(td: &ThinData, v: usize) -> Result<(usize, [usize; 4])> {
    let report = check_exactness(td, v, &[-3, -2, -1])?;
    if !report.passed {
        return Err(Error::Invalid(format!(
            "complex at {} is not a resolution within degree {}: {}",
            report.vertex, report.maxdeg, report.failures[0]
        )));
    }
    let qp = &td.qp;
    let tails = qp.quiver.arrows_out(v);
    let heads_mut = qp.quiver.mutable_arrows_in(v);
    // The simple-coefficients differential keeps only the degree-zero
    // (idempotent) part of each matrix entry; for mu2 that is the
    // coefficient of the length-one derivative word, nonzero exactly
    // when the potential has a 2-cycle term through the arrow pair.
    let mut m = QMatrix::zeros(tails.len(), heads_mut.len());
    for (col, &a) in heads_mut.iter().enumerate() {
        for t in cyclic_derivative(&qp.potential, a) {
            if t.arrows.len() == 1 {
                if let Some(row) = tails.iter().position(|&b| b == t.arrows[0]) {
                    m.add_to(row, col, &t.coeff);
                }
            }
        }
    }
    let rank = m.rank();
    let tor = [
        1,
        tails.len() - rank,
        heads_mut.len() - rank,
        if qp.quiver.is_mutable(v) { 1 } else { 0 },
    ];
    let length = (0..4).rev().find(|&p| tor[p] > 0).unwrap_or(0);
    Ok((length, tor))
}

/// Verify the interchange identity between left and right one-sided
/// derivatives of the potential: stripping `b` from the front of
/// `d_a W` agrees with stripping `a` from the back of `d_b W`, and
/// both sides are well-formed sums of composable paths sharing their
/// endpoints. A potential term that is not a closed cycle produces a
/// dangling derivative word and fails the well-formedness half.
pub fn der_interchange_check(qp: &IceQP) -> bool {
    let count = qp.quiver.arrows.len();
    let composable = |paths: &[crate::quiver::PathTerm], src: usize, dst: usize| {
        paths.iter().all(|t| {
            let mut cur = src;
            for &x in &t.arrows {
                if qp.quiver.arrows[x].tail != cur {
                    return false;
                }
                cur = qp.quiver.arrows[x].head;
            }
            cur == dst
        })
    };
    for a in 0..count {
        let da = cyclic_derivative(&qp.potential, a);
        let (ha, ta) = (qp.quiver.arrows[a].head, qp.quiver.arrows[a].tail);
        if !composable(&da, ha, ta) {
            return false;
        }
        for b in 0..count {
            let db = cyclic_derivative(&qp.potential, b);
            let lhs = normalize_paths(strip_first(&da, b));
            let rhs = normalize_paths(strip_last(&db, a));
            if lhs != rhs {
                return false;
            }
            // Both mixed derivatives must run from head(b) to tail(a).
            if !composable(&lhs, qp.quiver.arrows[b].head, ta) {
                return false;
            }
        }
    }
    true
}

/// Outcome of re-running the exactness certificate after flipping the
/// sign of one potential term.
#[derive(Clone, Debug)]
pub struct FlipOutcome {
    pub term: usize,
    /// Vertices where the flipped complex shows nonzero homology.
    pub witnesses: Vec<(String, Vec<CyFailure>)>,
}

/// Flip each potential term sign in turn and re-check exactness at the
/// given positions for every vertex. Returns one outcome per term.
pub fn sign_flip_survey(qp: &IceQP, maxdeg: u32, positions: &[i32]) -> Result<Vec<FlipOutcome>> {
    let mut out = Vec::new();
    for term in 0..qp.potential.terms.len() {
        let mut flipped = qp.clone();
        flipped.potential.flip_term_sign(term);
        let (td, _) = crate::algebra::verify_thin(&flipped, maxdeg)?;
        let mut witnesses = Vec::new();
        for v in 0..flipped.quiver.vertices.len() {
            let report = check_exactness(&td, v, positions)?;
            if !report.passed {
                witnesses.push((report.vertex.clone(), report.failures.clone()));
            }
        }
        out.push(FlipOutcome { term, witnesses });
    }
    Ok(out)
}
