//! Seeded random connected hypergraphs and the randomized audit of the
//! `k_max` lower bound.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entanglement::{alpha_multipartite, alpha_upper_bound, SPECTRAL_TOL};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::locc::{certified_lower_bound, reduce_all};
use crate::scalar::{Rational, Scalar};
use crate::states::build_state;

/// Shape of the generated hypergraphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RandomSpec {
    pub n_min: usize,
    pub n_max: usize,
    /// Largest edge cardinality drawn (clamped to `n`).
    pub max_edge: usize,
    /// Edges added on top of the spanning ones.
    pub extra_edges: usize,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { n_min: 3, n_max: 8, max_edge: 4, extra_edges: 3 }
    }
}

fn check_spec(spec: &RandomSpec) -> Result<()> {
    if spec.n_min < 2 || spec.n_min > spec.n_max || spec.max_edge < 2 {
        return Err(Error::Parameter(format!("bad random hypergraph shape {spec:?}")));
    }
    Ok(())
}

/// Draws one connected hypergraph with at least one edge of cardinality >= 2.
///
/// Vertices are attached one at a time (in a random order) through an edge
/// to earlier vertices, then `extra_edges` random edges are toggled in. The
/// draw is repeated in the rare case a toggle disconnects the result.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, max_edge: usize, extra_edges: usize) -> Result<Hypergraph> {
    if n < 2 || max_edge < 2 {
        return Err(Error::Parameter(format!("random hypergraph with n = {n}, max edge {max_edge}")));
    }
    let max_edge = max_edge.min(n);
    loop {
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(rng);
        let mut h = Hypergraph::empty(n)?;
        for i in 1..n {
            let k = rng.random_range(2..=max_edge.min(i + 1));
            let mut e: Vec<usize> = index::sample(rng, i, k - 1).into_iter().map(|j| order[j]).collect();
            e.push(order[i]);
            h.toggle_edge(&e)?;
        }
        for _ in 0..extra_edges {
            let k = rng.random_range(2..=max_edge);
            let e: Vec<usize> = index::sample(rng, n, k).into_iter().map(|j| j + 1).collect();
            h.toggle_edge(&e)?;
        }
        if h.is_connected() && h.k_max() >= 2 {
            return Ok(h);
        }
    }
}

/// `count` hypergraphs from one seed; the sequence depends only on
/// `(seed, spec)`.
pub fn random_batch(seed: u64, count: usize, spec: &RandomSpec) -> Result<Vec<Hypergraph>> {
    check_spec(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(spec.n_min..=spec.n_max);
            random_connected(&mut rng, n, spec.max_edge, spec.extra_edges)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignRow {
    pub index: usize,
    pub hypergraph: Hypergraph,
    pub k_max: usize,
    /// `1 / 2^(k_max - 1)`.
    pub bound: Scalar,
    pub measured_e: f64,
    pub holds: bool,
    /// All reduction certificates validated (only when requested).
    pub certificates_validated: Option<bool>,
    /// Smallest bound certified by the reductions.
    pub certified_bound: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub spec: RandomSpec,
    pub count: usize,
    pub all_hold: bool,
    pub rows: Vec<CampaignRow>,
}

/// Checks `E >= 1/2^(k_max-1)` on a seeded batch; with `certificates_up_to`
/// also runs the reduction on every bipartition for `n` up to that size.
pub fn lower_bound_campaign(seed: u64, count: usize, spec: &RandomSpec, cap: usize, certificates_up_to: Option<usize>) -> Result<CampaignReport> {
    let batch = random_batch(seed, count, spec)?;
    let rows: Vec<CampaignRow> = batch
        .into_par_iter()
        .enumerate()
        .map(|(index, h)| {
            let k_max = h.k_max();
            let bound = Scalar::one().sub(alpha_upper_bound(k_max)?);
            let measured_e = alpha_multipartite(&build_state(&h)?, cap)?.e;
            let holds = measured_e >= bound.to_f64() - SPECTRAL_TOL;
            let (certificates_validated, certified_bound) = match certificates_up_to {
                Some(limit) if h.n() <= limit => {
                    let certs = reduce_all(&h)?;
                    let ok = certs.iter().all(|c| c.validated);
                    (Some(ok), certified_lower_bound(&certs).map(Scalar::from))
                }
                _ => (None, None),
            };
            Ok(CampaignRow { index, hypergraph: h, k_max, bound, measured_e, holds, certificates_validated, certified_bound })
        })
        .collect::<Result<_>>()?;
    let all_hold = rows.iter().all(|r| r.holds && r.certificates_validated != Some(false));
    Ok(CampaignReport { seed, spec: *spec, count, all_hold, rows })
}

/// The certified bound is never below the `k_max` bound.
pub fn certified_not_weaker(row: &CampaignRow) -> bool {
    match (row.certified_bound, row.bound.as_exact()) {
        (Some(Scalar::Exact(c)), Some(b)) => c >= b,
        (None, _) => true,
        _ => false,
    }
}

/// Convenience for `Rational` bounds in reports.
pub fn bound_of(k_max: usize) -> Rational {
    Rational::new(1, 1i128 << (k_max - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batches_are_reproducible() {
        let spec = RandomSpec { n_min: 3, n_max: 7, max_edge: 4, extra_edges: 2 };
        let a = random_batch(7, 30, &spec).unwrap();
        assert_eq!(a, random_batch(7, 30, &spec).unwrap());
        assert_ne!(a, random_batch(8, 30, &spec).unwrap());
        for h in &a {
            assert!(h.is_connected());
            assert!((3..=7).contains(&h.n()));
            assert!(h.k_max() <= 4);
        }
    }

    #[test]
    fn bad_spec() {
        assert!(random_batch(1, 1, &RandomSpec { n_min: 5, n_max: 4, ..Default::default() }).is_err());
        assert!(random_batch(1, 1, &RandomSpec { max_edge: 1, ..Default::default() }).is_err());
    }

    #[test]
    fn small_campaign() {
        let spec = RandomSpec { n_min: 3, n_max: 5, max_edge: 3, extra_edges: 2 };
        let r = lower_bound_campaign(3, 12, &spec, 12, Some(5)).unwrap();
        assert!(r.all_hold);
        assert!(r.rows.iter().all(certified_not_weaker));
        assert_eq!(r.rows.len(), 12);
        assert_eq!(bound_of(3), Rational::new(1, 4));
    }
}
