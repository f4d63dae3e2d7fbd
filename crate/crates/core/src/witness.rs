//! Projector and stabilizer witnesses for genuine multipartite
//! entanglement, their feasibility region and white-noise robustness.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::entanglement::{alpha_multipartite, alpha_upper_bound, closed_form_alpha, DEFAULT_SWEEP_CAP};
use crate::error::{Error, Result};
use crate::hypergraph::{Family, Hypergraph};
use crate::scalar::{pow2, Rational, Scalar};
use crate::states::{build_state, stabilizer_matrix, DEFAULT_DENSE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Projector,
    Stabilizer,
}

impl FromStr for WitnessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projector" => Ok(WitnessKind::Projector),
            "stabilizer" => Ok(WitnessKind::Stabilizer),
            _ => Err(Error::Parse(format!("unknown witness kind '{s}'"))),
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessKind::Projector => "projector",
            WitnessKind::Stabilizer => "stabilizer",
        })
    }
}

/// `W = alpha I - |H><H|` or `W~ = beta I - sum_i K_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSpec {
    pub kind: WitnessKind,
    pub hypergraph: Hypergraph,
    pub alpha: Scalar,
    /// Stabilizer witness only.
    pub beta: Option<Scalar>,
    /// Stabilizer witness only: `W~ - C W` is positive semidefinite.
    pub c: Option<Scalar>,
    /// Largest white-noise fraction that is still detected.
    pub robustness: Scalar,
}

/// `R_p = p I / 2^n + (1 - p) |H><H|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisyState {
    pub hypergraph: Hypergraph,
    pub p: Scalar,
}

impl NoisyState {
    pub fn new(hypergraph: Hypergraph, p: Scalar) -> Result<Self> {
        if p.compare(Scalar::zero()) == Ordering::Less || p.compare(Scalar::one()) == Ordering::Greater {
            return Err(Error::Parameter(format!("noise fraction {p} outside [0, 1]")));
        }
        Ok(NoisyState { hypergraph, p })
    }
}

/// Where the maximal biseparable overlap of a witness comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaSource {
    /// Closed form for the symmetric families, the `k_max` bound otherwise.
    Auto,
    /// `(2^(k_max-1) - 1) / 2^(k_max-1)`.
    Bound,
    /// Brute-force sweep over bipartitions.
    Measured,
}

impl FromStr for AlphaSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(AlphaSource::Auto),
            "bound" => Ok(AlphaSource::Bound),
            "measured" => Ok(AlphaSource::Measured),
            _ => Err(Error::Parse(format!("unknown alpha source '{s}'"))),
        }
    }
}

/// The family `h` belongs to, if any.
pub fn detect_family(h: &Hypergraph) -> Option<Family> {
    Family::ALL.into_iter().find(|&f| Hypergraph::family(f, h.n()).is_ok_and(|g| g == *h))
}

pub fn resolve_alpha(h: &Hypergraph, source: AlphaSource) -> Result<Scalar> {
    match source {
        AlphaSource::Auto => match detect_family(h) {
            Some(f) => closed_form_alpha(f, h.n()),
            None => alpha_upper_bound(h.k_max()),
        },
        AlphaSource::Bound => alpha_upper_bound(h.k_max()),
        AlphaSource::Measured => Ok(Scalar::Approx(alpha_multipartite(&build_state(h)?, DEFAULT_SWEEP_CAP)?.alpha)),
    }
}

fn check_alpha(alpha: Scalar) -> Result<()> {
    if alpha.compare(Scalar::zero()) != Ordering::Greater || alpha.compare(Scalar::one()) != Ordering::Less {
        return Err(Error::Parameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    Ok(())
}

fn n_scalar(h: &Hypergraph) -> Scalar {
    Scalar::int(h.n() as i128)
}

pub fn projector_witness(h: &Hypergraph, alpha: Scalar) -> Result<WitnessSpec> {
    check_alpha(alpha)?;
    let mixed = Scalar::one().sub(Scalar::exact(1, pow2(h.n() as u32)));
    let robustness = Scalar::one().sub(alpha).div(mixed);
    Ok(WitnessSpec { kind: WitnessKind::Projector, hypergraph: h.clone(), alpha, beta: None, c: None, robustness })
}

/// Optimal stabilizer witness: `beta = n - 2(1 - alpha)`, `C = 2`.
pub fn stabilizer_witness(h: &Hypergraph, alpha: Scalar) -> Result<WitnessSpec> {
    check_alpha(alpha)?;
    let gap = Scalar::int(2).mul(Scalar::one().sub(alpha));
    let n = n_scalar(h);
    let beta = n.sub(gap);
    if beta.compare(Scalar::zero()) != Ordering::Greater {
        return Err(Error::Parameter(format!("beta = {beta} is not positive")));
    }
    Ok(WitnessSpec {
        kind: WitnessKind::Stabilizer,
        hypergraph: h.clone(),
        alpha,
        beta: Some(beta),
        c: Some(Scalar::int(2)),
        robustness: n.sub(beta).div(n),
    })
}

pub fn build_witness(kind: WitnessKind, h: &Hypergraph, alpha: Scalar) -> Result<WitnessSpec> {
    match kind {
        WitnessKind::Projector => projector_witness(h, alpha),
        WitnessKind::Stabilizer => stabilizer_witness(h, alpha),
    }
}

/// Margin of `W~ - C W` on one weight class of the stabilizer basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightMargin {
    pub weight: usize,
    pub margin: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// One entry per weight `0..=n`.
    pub margins: Vec<WeightMargin>,
}

/// Checks `W~ - C W >= 0` on the joint eigenbasis: on a basis state of
/// weight `w`, `W~` has eigenvalue `beta - (n - 2w)` and `W` has
/// `alpha - [w = 0]`.
pub fn feasibility_check(h: &Hypergraph, alpha: Scalar, beta: Scalar, c: Scalar) -> FeasibilityReport {
    let n = h.n();
    let margins: Vec<WeightMargin> = (0..=n)
        .map(|w| {
            let stab = beta.sub(Scalar::int(n as i128 - 2 * w as i128));
            let proj = if w == 0 { alpha.sub(Scalar::one()) } else { alpha };
            WeightMargin { weight: w, margin: stab.sub(c.mul(proj)) }
        })
        .collect();
    let feasible = c.compare(Scalar::zero()) == Ordering::Greater
        && beta.compare(Scalar::int(n as i128)) == Ordering::Less
        && margins.iter().all(|m| !m.margin.is_negative());
    FeasibilityReport { feasible, margins }
}

/// `Tr(W R_p)` in closed form.
pub fn expectation_closed_form(w: &WitnessSpec, state: &NoisyState) -> Result<Scalar> {
    if state.hypergraph != w.hypergraph {
        return Err(Error::Parameter("noisy state and witness use different hypergraphs".into()));
    }
    let p = state.p;
    Ok(match w.kind {
        WitnessKind::Projector => {
            let mixed = Scalar::one().sub(Scalar::exact(1, pow2(w.hypergraph.n() as u32)));
            w.alpha.sub(Scalar::one()).add(p.mul(mixed))
        }
        WitnessKind::Stabilizer => {
            let beta = w.beta.expect("stabilizer witness has beta");
            beta.sub(Scalar::one().sub(p).mul(n_scalar(&w.hypergraph)))
        }
    })
}

/// `Tr(W R_p)` from dense matrices.
pub fn expectation_dense(w: &WitnessSpec, state: &NoisyState) -> Result<f64> {
    let n = w.hypergraph.n();
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded { what: "dense witness", n, cap: DEFAULT_DENSE_CAP });
    }
    if state.hypergraph.n() != n {
        return Err(Error::LengthMismatch { expected: n, got: state.hypergraph.n() });
    }
    let psi = build_state(&state.hypergraph)?.amplitudes();
    let dim = psi.len();
    let p = state.p.to_f64();
    let rho = |i: usize, j: usize| (1.0 - p) * psi[i] * psi[j] + if i == j { p / dim as f64 } else { 0.0 };
    let mut wm = vec![0.0; dim * dim];
    match w.kind {
        WitnessKind::Projector => {
            let target = build_state(&w.hypergraph)?.amplitudes();
            for i in 0..dim {
                for j in 0..dim {
                    wm[i * dim + j] = -target[i] * target[j];
                }
                wm[i * dim + i] += w.alpha.to_f64();
            }
        }
        WitnessKind::Stabilizer => {
            for v in 1..=n {
                for (x, k) in stabilizer_matrix(&w.hypergraph, v)?.to_dense().into_iter().enumerate() {
                    wm[x] -= k as f64;
                }
            }
            let beta = w.beta.expect("stabilizer witness has beta").to_f64();
            for i in 0..dim {
                wm[i * dim + i] += beta;
            }
        }
    }
    let mut tr = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            tr += wm[i * dim + j] * rho(j, i);
        }
    }
    Ok(tr)
}

/// `Tr(W R_p)`; for `n <= 8` also recomputed densely and compared within 1e-9.
pub fn expectation(w: &WitnessSpec, state: &NoisyState) -> Result<Scalar> {
    let value = expectation_closed_form(w, state)?;
    if w.hypergraph.n() <= DEFAULT_DENSE_CAP {
        let dense = expectation_dense(w, state)?;
        if (dense - value.to_f64()).abs() > 1e-9 {
            return Err(Error::OracleMismatch(format!("witness expectation {value} vs dense trace {dense}")));
        }
    }
    Ok(value)
}

/// Eigenvalue of `sum_i K_i` on every basis state `phi_s`, from the
/// stabilizer action itself.
pub fn stabilizer_sum_spectrum(h: &Hypergraph) -> Result<Vec<i64>> {
    use crate::states::{apply_stabilizer, basis_state_mask};
    let n = h.n();
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded { what: "stabilizer spectrum", n, cap: DEFAULT_DENSE_CAP });
    }
    (0..1u64 << n)
        .map(|s| {
            let phi = basis_state_mask(h, s)?;
            let mut total = 0;
            for v in 1..=n {
                let k = apply_stabilizer(&phi, h, v)?;
                total += if k == phi {
                    1
                } else if k == phi.negated() {
                    -1
                } else {
                    return Err(Error::OracleMismatch(format!("basis state {s} is not an eigenvector of K_{v}")));
                };
            }
            Ok(total)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessRow {
    pub n: usize,
    /// Projector witness.
    pub p_l: Scalar,
    /// Stabilizer witness.
    pub p_tilde_l: Scalar,
}

pub fn robustness_table(family: Family, ns: impl IntoIterator<Item = usize>) -> Result<Vec<RobustnessRow>> {
    ns.into_iter()
        .map(|n| {
            let h = Hypergraph::family(family, n)?;
            let alpha = closed_form_alpha(family, n)?;
            Ok(RobustnessRow {
                n,
                p_l: projector_witness(&h, alpha)?.robustness,
                p_tilde_l: stabilizer_witness(&h, alpha)?.robustness,
            })
        })
        .collect()
}

/// Exact `epsilon` used when probing optimality of `beta`.
pub fn optimality_epsilon() -> Scalar {
    Scalar::Exact(Rational::new(1, 1_000_000))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Family::*;
    use proptest::prelude::*;

    fn fam(f: Family, n: usize) -> Hypergraph {
        Hypergraph::family(f, n).unwrap()
    }

    #[test]
    fn single_edge_witnesses() {
        for n in 2..=10 {
            let h = fam(SingleMaxEdge, n);
            let alpha = closed_form_alpha(SingleMaxEdge, n).unwrap();
            let p = projector_witness(&h, alpha).unwrap();
            assert_eq!(p.robustness, Scalar::exact(2, pow2(n as u32) - 1));
            let s = stabilizer_witness(&h, alpha).unwrap();
            let half = pow2(n as u32 - 1);
            assert_eq!(s.beta, Some(Scalar::exact(n as i128 * half - 2, half)));
            assert_eq!(s.robustness, Scalar::exact(2, n as i128 * half));
        }
    }

    #[test]
    fn paper_values() {
        let h43 = fam(AllNminus1, 4);
        let a = closed_form_alpha(AllNminus1, 4).unwrap();
        let p = projector_witness(&h43, a).unwrap();
        assert!((p.robustness.to_f64() - (10.0 - 2.0 * 5f64.sqrt()) / 15.0).abs() < 1e-12);
        let s = stabilizer_witness(&h43, a).unwrap();
        assert!((s.beta.unwrap().to_f64() - (11.0 + 5f64.sqrt()) / 4.0).abs() < 1e-12);
        let h3 = fam(AllGeNminus1, 3);
        let s = stabilizer_witness(&h3, closed_form_alpha(AllGeNminus1, 3).unwrap()).unwrap();
        assert_eq!(s.beta, Some(Scalar::exact(5, 2)));
        // generic k_max bound
        let h = Hypergraph::canonicalize([vec![1, 2, 3], vec![3, 4], vec![4, 5]], 5).unwrap();
        let p = projector_witness(&h, resolve_alpha(&h, AlphaSource::Auto).unwrap()).unwrap();
        assert_eq!(p.robustness, Scalar::exact(pow2(5 - 3 + 1), 31));
    }

    #[test]
    fn invalid_alpha() {
        let h = fam(SingleMaxEdge, 3);
        assert!(projector_witness(&h, Scalar::one()).is_err());
        assert!(stabilizer_witness(&h, Scalar::zero()).is_err());
        assert!(NoisyState::new(h, Scalar::exact(3, 2)).is_err());
    }

    #[test]
    fn expectation_examples() {
        let h = fam(SingleMaxEdge, 3);
        let alpha = Scalar::exact(3, 4);
        let p = projector_witness(&h, alpha).unwrap();
        let s = stabilizer_witness(&h, alpha).unwrap();
        let at = |w: &WitnessSpec, num, den| expectation(w, &NoisyState::new(h.clone(), Scalar::exact(num, den)).unwrap()).unwrap();
        assert_eq!(at(&p, 0, 1), Scalar::exact(-1, 4));
        assert_eq!(at(&p, 2, 7), Scalar::zero());
        assert_eq!(at(&s, 1, 6), Scalar::zero());
        assert!(at(&s, 1, 7).is_negative());
        assert!(!at(&s, 1, 5).is_negative());
    }

    #[test]
    fn feasibility_examples() {
        for n in 3..=8 {
            let h = fam(SingleMaxEdge, n);
            let alpha = closed_form_alpha(SingleMaxEdge, n).unwrap();
            let beta = stabilizer_witness(&h, alpha).unwrap().beta.unwrap();
            let r = feasibility_check(&h, alpha, beta, Scalar::int(2));
            assert!(r.feasible);
            assert_eq!(r.margins[0].margin, Scalar::zero());
            assert_eq!(r.margins[1].margin, Scalar::zero());
            assert!(!feasibility_check(&h, alpha, beta.sub(Scalar::exact(1, 100)), Scalar::int(2)).feasible);
            // C = 1 needs the looser beta = n - (1 - alpha)
            assert!(!feasibility_check(&h, alpha, beta, Scalar::one()).feasible);
            let loose = Scalar::int(n as i128).sub(Scalar::one().sub(alpha));
            assert!(feasibility_check(&h, alpha, loose, Scalar::one()).feasible);
        }
    }

    #[test]
    fn spectrum_identity() {
        for n in 2..=6 {
            for h in [fam(SingleMaxEdge, n), Hypergraph::canonicalize([vec![1, 2], vec![1], vec![2, n]], n).unwrap()] {
                let spec = stabilizer_sum_spectrum(&h).unwrap();
                for (s, ev) in spec.iter().enumerate() {
                    assert_eq!(*ev, n as i64 - 2 * i64::from(s.count_ones() as u8));
                }
            }
        }
    }

    #[test]
    fn table_matches_plot() {
        let t = robustness_table(SingleMaxEdge, 2..=8).unwrap();
        let pl = [3, 7, 15, 31, 63, 127, 255];
        let pt = [2, 6, 16, 40, 96, 224, 512];
        for (i, row) in t.iter().enumerate() {
            assert_eq!(row.p_l, Scalar::exact(2, pl[i]));
            assert_eq!(row.p_tilde_l, Scalar::exact(1, pt[i]));
            assert_eq!(row.p_l.compare(row.p_tilde_l), Ordering::Greater);
        }
    }

    #[test]
    fn family_detection() {
        assert_eq!(detect_family(&fam(AllGeNminus1, 5)), Some(AllGeNminus1));
        assert_eq!(detect_family(&Hypergraph::canonicalize([vec![1, 2]], 3).unwrap()), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sign_change_at_robustness(n in 3usize..=7, f in 0usize..3, num in 0i128..=1000) {
            let family = Family::ALL[f];
            let h = fam(family, n);
            let alpha = closed_form_alpha(family, n).unwrap();
            for w in [projector_witness(&h, alpha).unwrap(), stabilizer_witness(&h, alpha).unwrap()] {
                let p = Scalar::exact(num, 1000);
                let e = expectation(&w, &NoisyState::new(h.clone(), p).unwrap()).unwrap();
                match p.compare(w.robustness) {
                    Ordering::Less => prop_assert!(e.is_negative()),
                    _ => prop_assert!(!e.is_negative()),
                }
            }
        }

        #[test]
        fn optimal_beta_is_tight(n in 3usize..=10, f in 0usize..3) {
            let family = Family::ALL[f];
            let h = fam(family, n);
            let alpha = closed_form_alpha(family, n).unwrap();
            let beta = stabilizer_witness(&h, alpha).unwrap().beta.unwrap();
            prop_assert!(feasibility_check(&h, alpha, beta, Scalar::int(2)).feasible);
            prop_assert!(!feasibility_check(&h, alpha, beta.sub(optimality_epsilon()), Scalar::int(2)).feasible);
        }
    }
}
