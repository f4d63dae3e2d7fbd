//! Hypergraph rewrite rules and the reduction of a hypergraph state to a
//! mixture of single-edge states across a fixed bipartition.
//!
//! All rules act on hypergraphs that keep their original vertex labels;
//! a measured qubit is re-prepared in `|+>` and so becomes an isolated
//! vertex. Below [`ORACLE_THRESHOLD`] qubits each rule is checked against
//! the corresponding operation on the sign table.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::entanglement::{schmidt, SPECTRAL_TOL};
use crate::error::{Error, Result};
use crate::hypergraph::{Bipartition, Edge, Hypergraph};
use crate::scalar::{pow2, Rational, Scalar};
use crate::states::{build_state, extract_hypergraph, SignState};

/// Largest `n` for which rules are validated against the sign table.
pub const ORACLE_THRESHOLD: usize = 10;

/// Largest `n` for which a certificate keeps every branch.
pub const TREE_THRESHOLD: usize = 10;

/// Largest `n` for which certificates carry the measured `E^{AB}`.
pub const MEASURE_THRESHOLD: usize = 16;

fn check_vertex(h: &Hypergraph, v: usize) -> Result<()> {
    if v == 0 || v > h.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
    }
    Ok(())
}

fn without(e: &[usize], v: usize) -> Edge {
    e.iter().copied().filter(|&u| u != v).collect()
}

/// Z measurement of `v` keeping all labels; returns the hypergraph with
/// `v` isolated and the global sign picked up.
pub fn z_measure_labeled(h: &Hypergraph, v: usize, outcome: u8) -> Result<(Hypergraph, i8)> {
    check_vertex(h, v)?;
    if outcome > 1 {
        return Err(Error::Parameter(format!("measurement outcome {outcome}")));
    }
    let mut out = Hypergraph::empty(h.n())?;
    let mut sign = 1;
    for e in h.edges() {
        if !e.contains(&v) {
            out.toggle_edge(e)?;
        } else if outcome == 1 {
            let rest = without(e, v);
            if rest.is_empty() {
                sign = -sign;
            } else {
                out.toggle_edge(&rest)?;
            }
        }
    }
    Ok((out, sign))
}

/// Z measurement of `v`; the result lives on the remaining `n - 1`
/// vertices, relabelled in order.
pub fn z_measure(h: &Hypergraph, v: usize, outcome: u8) -> Result<Hypergraph> {
    let n = h.n();
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let (labeled, _) = z_measure_labeled(h, v, outcome)?;
    let relabel = |u: usize| if u > v { u - 1 } else { u };
    let out = Hypergraph::canonicalize(labeled.edges().map(|e| e.iter().map(|&u| relabel(u)).collect::<Vec<_>>()), n - 1)?;
    if n <= ORACLE_THRESHOLD {
        let state = build_state(h)?;
        let p = state.outcome_probability(v, outcome)?;
        if p != Rational::new(1, 2) {
            return Err(Error::OracleMismatch(format!("outcome probability {p} for Z on {v}")));
        }
        let (expected, _) = extract_hypergraph(&state.measure_z_discard(v, outcome)?)?;
        if expected != out {
            return Err(Error::OracleMismatch(format!("Z({v}) = {outcome}: rule gives {out}, state gives {expected}")));
        }
    }
    Ok(out)
}

/// What a Pauli X left behind besides toggling edges back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XCorrection {
    pub qubit: usize,
    /// Remnants `e \ {qubit}` that were toggled, in edge order.
    pub toggled: Vec<Edge>,
    /// `-1` when an odd number of remnants were empty.
    pub global_sign: i8,
}

fn x_rule(h: &Hypergraph, v: usize) -> Result<(Hypergraph, XCorrection)> {
    check_vertex(h, v)?;
    let mut out = h.clone();
    let mut toggled = Vec::new();
    let mut global_sign = 1;
    for e in h.incident(v) {
        let rest = without(e, v);
        if rest.is_empty() {
            global_sign = -global_sign;
        } else {
            out.toggle_edge(&rest)?;
            toggled.push(rest);
        }
    }
    Ok((out, XCorrection { qubit: v, toggled, global_sign }))
}

/// Pauli X on `v`: `E -> E Δ {e \ {v} : v ∈ e}`.
pub fn pauli_x_toggle(h: &Hypergraph, v: usize) -> Result<(Hypergraph, XCorrection)> {
    let (out, corr) = x_rule(h, v)?;
    if h.n() <= ORACLE_THRESHOLD {
        let (expected, sign) = extract_hypergraph(&build_state(h)?.apply_x(v)?)?;
        if expected != out || sign != corr.global_sign {
            return Err(Error::OracleMismatch(format!("X({v}): rule gives {out}, state gives {expected}")));
        }
    }
    Ok((out, corr))
}

/// Deletes every edge lying entirely on one side of `bp`, except `keep`.
pub fn remove_non_crossing(h: &Hypergraph, bp: &Bipartition, keep: Option<&[usize]>) -> Hypergraph {
    let mut out = h.clone();
    for e in h.edges() {
        if keep != Some(e.as_slice()) && !crosses(e, bp) {
            out.remove_edge(e);
        }
    }
    out
}

fn crosses(e: &[usize], bp: &Bipartition) -> bool {
    e.iter().any(|&v| bp.contains(v)) && e.iter().any(|&v| !bp.contains(v))
}

/// Largest crossing edge, lexicographically smallest among ties.
fn max_crossing(h: &Hypergraph, bp: &Bipartition, skip: Option<&Edge>) -> Option<Edge> {
    h.edges()
        .filter(|e| Some(*e) != skip && crosses(e, bp))
        .fold(None, |best: Option<&Edge>, e| match best {
            Some(b) if b.len() >= e.len() => Some(b),
            _ => Some(e),
        })
        .cloned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op")]
pub enum StepKind {
    #[serde(rename = "Select")]
    SelectEdge { edge: Edge },
    #[serde(rename = "Mz")]
    ZMeasure { qubit: usize, outcome: u8 },
    #[serde(rename = "X")]
    PauliX { qubit: usize },
    #[serde(rename = "Z")]
    PauliZ { qubit: usize },
    #[serde(rename = "C")]
    RemoveNonCrossing { edge: Edge },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    #[serde(flatten)]
    pub kind: StepKind,
    pub hypergraph_after: Hypergraph,
    pub global_sign: i8,
}

/// One root-to-leaf path of the reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionBranch {
    /// `(qubit, outcome)` for every measurement on this path.
    pub outcomes: Vec<(usize, u8)>,
    pub steps: Vec<ReductionStep>,
    /// Single crossing edge left at the end.
    pub leaf: Hypergraph,
    pub kappa_prime: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionCertificate {
    pub bipartition: Bipartition,
    pub initial_edge: Edge,
    pub kappa: usize,
    pub branch_count: usize,
    /// Every branch when `n <= TREE_THRESHOLD`, otherwise empty.
    pub branches: Vec<ReductionBranch>,
    pub worst_branch: ReductionBranch,
    /// Largest final cardinality over all branches.
    pub kappa_prime_worst: usize,
    /// `1 / 2^(kappa_prime_worst - 1)`.
    pub bound: Scalar,
    /// Every step was checked against the sign table.
    pub oracle_checked: bool,
    /// Measured `E^{AB}` of the input state.
    pub measured_e_ab: Option<f64>,
    /// Oracle-checked, single-edge leaves, and `measured_e_ab >= bound`.
    pub validated: bool,
}

#[derive(Clone)]
struct Branch {
    h: Hypergraph,
    sign: i8,
    oracle: Option<SignState>,
    active: Vec<bool>,
    target: Edge,
    steps: Vec<ReductionStep>,
    outcomes: Vec<(usize, u8)>,
}

struct Explorer<'a> {
    bp: &'a Bipartition,
    keep_tree: bool,
    budget: usize,
    used: usize,
    count: usize,
    branches: Vec<ReductionBranch>,
    worst: Option<ReductionBranch>,
}

impl Explorer<'_> {
    fn apply(&mut self, b: &mut Branch, kind: StepKind) -> Result<()> {
        self.used += 1;
        if self.used > self.budget {
            return Err(Error::StepBudget(self.budget));
        }
        let (h, sign) = match &kind {
            StepKind::SelectEdge { .. } => (b.h.clone(), b.sign),
            StepKind::ZMeasure { qubit, outcome } => {
                let (h, s) = z_measure_labeled(&b.h, *qubit, *outcome)?;
                (h, b.sign * s)
            }
            StepKind::PauliX { qubit } => {
                let (h, c) = x_rule(&b.h, *qubit)?;
                (h, b.sign * c.global_sign)
            }
            StepKind::PauliZ { qubit } => {
                let mut h = b.h.clone();
                h.toggle_edge(&[*qubit])?;
                (h, b.sign)
            }
            StepKind::RemoveNonCrossing { edge } => {
                let mut h = b.h.clone();
                h.toggle_edge(edge)?;
                (h, b.sign)
            }
        };
        if let Some(state) = &b.oracle {
            let next = match &kind {
                StepKind::SelectEdge { .. } => state.clone(),
                StepKind::ZMeasure { qubit, outcome } => {
                    if state.outcome_probability(*qubit, *outcome)? != Rational::new(1, 2) {
                        return Err(Error::OracleMismatch(format!("unequal outcome probabilities on qubit {qubit}")));
                    }
                    state.measure_z_reprepare(*qubit, *outcome)?
                }
                StepKind::PauliX { qubit } => state.apply_x(*qubit)?,
                StepKind::PauliZ { qubit } => state.apply_z(*qubit)?,
                StepKind::RemoveNonCrossing { edge } => state.apply_ck(edge)?,
            };
            let (expected, s) = extract_hypergraph(&next)?;
            if expected != h || s != sign {
                return Err(Error::OracleMismatch(format!("{kind:?}: rule gives {h} ({sign}), state gives {expected} ({s})")));
            }
            b.oracle = Some(next);
        }
        b.h = h.clone();
        b.sign = sign;
        b.steps.push(ReductionStep { kind, hypergraph_after: h, global_sign: sign });
        Ok(())
    }

    fn measure(&mut self, b: &Branch, v: usize, outcome: u8) -> Result<Branch> {
        let mut c = b.clone();
        self.apply(&mut c, StepKind::ZMeasure { qubit: v, outcome })?;
        c.active[v] = false;
        c.outcomes.push((v, outcome));
        Ok(c)
    }

    fn explore(&mut self, mut b: Branch) -> Result<()> {
        let t = b.target.clone();
        // measure everything outside the target; isolated qubits are already product
        if let Some(v) = (1..b.active.len()).find(|&v| b.active[v] && !t.contains(&v) && b.h.incident(v).next().is_some()) {
            for outcome in 0..2 {
                let c = self.measure(&b, v, outcome)?;
                self.explore(c)?;
            }
            return Ok(());
        }
        if t.len() >= 3 {
            for &j in &t {
                if b.h.contains_edge(&without(&t, j)) {
                    self.apply(&mut b, StepKind::PauliX { qubit: j })?;
                }
            }
        }
        let markers: Vec<usize> = b.h.edges().filter(|e| e.len() == 1).map(|e| e[0]).collect();
        for q in markers {
            self.apply(&mut b, StepKind::PauliZ { qubit: q })?;
        }
        let local: Vec<Edge> = b.h.edges().filter(|e| **e != t && !crosses(e, self.bp)).cloned().collect();
        for edge in local {
            self.apply(&mut b, StepKind::RemoveNonCrossing { edge })?;
        }
        if b.h.num_edges() == 1 {
            self.leaf(b);
            return Ok(());
        }
        let s = max_crossing(&b.h, self.bp, Some(&t)).expect("remaining edges all cross");
        let v = *t.iter().find(|v| !s.contains(v)).expect("smaller edge inside target");
        for outcome in 0..2 {
            let mut c = self.measure(&b, v, outcome)?;
            let next = max_crossing(&c.h, self.bp, None).expect("smaller crossing edge survives");
            self.apply(&mut c, StepKind::SelectEdge { edge: next.clone() })?;
            c.target = next;
            self.explore(c)?;
        }
        Ok(())
    }

    fn leaf(&mut self, b: Branch) {
        self.count += 1;
        let branch = ReductionBranch { kappa_prime: b.target.len(), outcomes: b.outcomes, steps: b.steps, leaf: b.h };
        if self.worst.as_ref().is_none_or(|w| branch.kappa_prime > w.kappa_prime) {
            self.worst = Some(branch.clone());
        }
        if self.keep_tree {
            self.branches.push(branch);
        }
    }
}

/// Reduces `|H>` across `bp` to single-edge states and certifies
/// `E^{AB}(H) >= 1 / 2^(kappa' - 1)`.
pub fn reduce(h: &Hypergraph, bp: &Bipartition) -> Result<ReductionCertificate> {
    let n = h.n();
    if bp.n() != n {
        return Err(Error::LengthMismatch { expected: n, got: bp.n() });
    }
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    let initial = max_crossing(h, bp, None).ok_or(Error::NoCrossingEdge)?;
    let oracle_checked = n <= ORACLE_THRESHOLD;
    if !oracle_checked {
        log::warn!("n = {n} above {ORACLE_THRESHOLD}: reduction steps are not validated");
    }
    let budget = 10usize.saturating_mul(n).saturating_mul(1usize.checked_shl(n as u32).unwrap_or(usize::MAX));
    let mut ex = Explorer {
        bp,
        keep_tree: n <= TREE_THRESHOLD,
        budget,
        used: 0,
        count: 0,
        branches: Vec::new(),
        worst: None,
    };
    let mut root = Branch {
        h: h.clone(),
        sign: 1,
        oracle: if oracle_checked { Some(build_state(h)?) } else { None },
        active: (0..=n).map(|v| v > 0).collect(),
        target: initial.clone(),
        steps: Vec::new(),
        outcomes: Vec::new(),
    };
    ex.apply(&mut root, StepKind::SelectEdge { edge: initial.clone() })?;
    ex.explore(root)?;

    let worst = ex.worst.expect("at least one leaf");
    let kappa_prime_worst = worst.kappa_prime;
    let d = pow2(kappa_prime_worst as u32 - 1);
    let bound = Scalar::exact(1, d);
    let measured_e_ab = if n <= MEASURE_THRESHOLD { Some(1.0 - schmidt(&build_state(h)?, bp)?.alpha()) } else { None };
    let leaves_ok = ex.branches.iter().chain([&worst]).all(|b| b.leaf.num_edges() == 1 && b.kappa_prime >= 2);
    let bound_ok = measured_e_ab.is_some_and(|e| e >= bound.to_f64() - SPECTRAL_TOL);
    Ok(ReductionCertificate {
        bipartition: bp.clone(),
        kappa: initial.len(),
        initial_edge: initial,
        branch_count: ex.count,
        branches: ex.branches,
        worst_branch: worst,
        kappa_prime_worst,
        bound,
        oracle_checked,
        measured_e_ab,
        validated: oracle_checked && leaves_ok && bound_ok,
    })
}

/// Certificates for every bipartition, in the order of [`Bipartition::all`].
pub fn reduce_all(h: &Hypergraph) -> Result<Vec<ReductionCertificate>> {
    use rayon::prelude::*;
    Bipartition::all(h.n())?.par_iter().map(|bp| reduce(h, bp)).collect()
}

/// Smallest certified bound over all bipartitions, i.e. the lower bound on
/// the multipartite `E` that the reduction proves.
pub fn certified_lower_bound(certs: &[ReductionCertificate]) -> Option<Rational> {
    certs.iter().filter_map(|c| c.bound.as_exact()).min()
}

/// `E^{AB}` of `parent` against the two states obtained by measuring `v`;
/// returns `(parent, min over outcomes)`.
pub fn measurement_monotonicity(h: &Hypergraph, bp: &Bipartition, v: usize) -> Result<(f64, f64)> {
    let state = build_state(h)?;
    let e = |s: &SignState| schmidt(s, bp).map(|r| 1.0 - r.alpha());
    let parent = e(&state)?;
    let child = e(&state.measure_z_reprepare(v, 0)?)?.min(e(&state.measure_z_reprepare(v, 1)?)?);
    Ok((parent, child))
}

/// Numeric value of a certificate bound.
pub fn bound_value(c: &ReductionCertificate) -> f64 {
    c.bound.as_exact().and_then(|r| r.to_f64()).unwrap_or(f64::NAN)
}
