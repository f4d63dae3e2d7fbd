//! Geometric entanglement of hypergraph states.
//!
//! `alpha^{AB}` is the largest squared Schmidt coefficient across a split
//! and `alpha` is its maximum over all splits; `E = 1 - alpha`. Besides the
//! brute-force sweep this module carries the infinity-norm procedure for
//! permutation-invariant states, the closed forms for the three symmetric
//! families, and an exact check of the block structure of their reduced
//! density matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{vertex_bit, Bipartition, Family, Hypergraph};
use crate::scalar::{pow2, Rational, Scalar};
use crate::states::{build_state, SignState};

/// Tolerance for every spectral comparison.
pub const SPECTRAL_TOL: f64 = 1e-9;

/// Default cap on `n` for exhaustive bipartition sweeps.
pub const DEFAULT_SWEEP_CAP: usize = 12;

/// Schmidt coefficients across one bipartition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtSpectrum {
    pub bipartition: Bipartition,
    /// Descending.
    pub coefficients: Vec<f64>,
    /// Number of coefficients above [`SPECTRAL_TOL`].
    pub rank: usize,
}

impl SchmidtSpectrum {
    /// Largest squared coefficient.
    pub fn alpha(&self) -> f64 {
        self.coefficients.first().map_or(0.0, |s| s * s)
    }
}

/// Position of each qubit of `vertices` inside a sub-register index, with
/// the first listed vertex as the most significant bit.
fn sub_index(n: usize, vertices: &[usize], x: usize) -> usize {
    let k = vertices.len();
    vertices
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &v)| if x as u64 & vertex_bit(n, v) != 0 { acc | 1 << (k - 1 - j) } else { acc })
}

/// Sign matrix with rows indexed by `rows` qubits and columns by the rest.
fn reshape_signs(state: &SignState, rows: &[usize], cols: &[usize]) -> Vec<Vec<i8>> {
    let n = state.n();
    let mut m = vec![vec![0i8; 1 << cols.len()]; 1 << rows.len()];
    for x in 0..state.dim() {
        m[sub_index(n, rows, x)][sub_index(n, cols, x)] = state.sign(x);
    }
    m
}

pub fn schmidt(state: &SignState, bp: &Bipartition) -> Result<SchmidtSpectrum> {
    if bp.n() != state.n() {
        return Err(Error::LengthMismatch { expected: state.n(), got: bp.n() });
    }
    let a = bp.part_a().to_vec();
    let b = bp.part_b();
    let (rows, cols) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let signs = reshape_signs(state, &rows, &cols);
    let norm = (state.dim() as f64).sqrt().recip();
    let m = DMatrix::from_fn(signs.len(), signs[0].len(), |r, c| f64::from(signs[r][c]) * norm);
    let mut coefficients: Vec<f64> = m.singular_values().iter().map(|s| s.max(0.0)).collect();
    coefficients.sort_by(|x, y| y.total_cmp(x));
    let rank = coefficients.iter().filter(|&&s| s > SPECTRAL_TOL).count();
    Ok(SchmidtSpectrum { bipartition: bp.clone(), coefficients, rank })
}

/// Reduced density matrix of a sign state, held exactly as an integer
/// matrix over the common denominator `2^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedDensityMatrix {
    pub n: usize,
    pub kept_qubits: Vec<usize>,
    dim: usize,
    numerators: Vec<i64>,
}

impl ReducedDensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry numerator; the entry itself is `numerator / 2^n`.
    pub fn numerator(&self, r: usize, c: usize) -> i64 {
        self.numerators[r * self.dim + c]
    }

    pub fn denominator(&self) -> i128 {
        pow2(self.n as u32)
    }

    pub fn entry(&self, r: usize, c: usize) -> Rational {
        Rational::new(i128::from(self.numerator(r, c)), self.denominator())
    }

    pub fn trace(&self) -> Rational {
        let t: i64 = (0..self.dim).map(|i| self.numerator(i, i)).sum();
        Rational::new(i128::from(t), self.denominator())
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let d = self.denominator() as f64;
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.numerator(r, c) as f64 / d)
    }

    /// Maximum absolute row sum, exact.
    pub fn infinity_norm(&self) -> Rational {
        let best = (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.numerator(r, c).abs()).sum::<i64>())
            .max()
            .unwrap_or(0);
        Rational::new(i128::from(best), self.denominator())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_matrix()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Traces out every qubit not in `kept`; rows/columns are indexed by the
/// kept qubits in the given order, first one most significant.
pub fn reduced_density_matrix(state: &SignState, kept: &[usize]) -> Result<ReducedDensityMatrix> {
    let n = state.n();
    if kept.is_empty() || kept.len() > n {
        return Err(Error::Parameter(format!("kept qubits {kept:?} for n = {n}")));
    }
    let mut seen = vec![false; n + 1];
    for &v in kept {
        if v == 0 || v > n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if seen[v] {
            return Err(Error::Parameter(format!("duplicate kept qubit {v}")));
        }
        seen[v] = true;
    }
    let traced: Vec<usize> = (1..=n).filter(|&v| !seen[v]).collect();
    let dim = 1usize << kept.len();
    let cols = 1usize << traced.len();
    let words = cols.div_ceil(64);
    // one packed sign row per kept configuration
    let mut rows = vec![vec![0u64; words]; dim];
    for x in 0..state.dim() {
        if state.is_negative(x) {
            let c = sub_index(n, &traced, x);
            rows[sub_index(n, kept, x)][c >> 6] |= 1 << (c & 63);
        }
    }
    let mut numerators = vec![0i64; dim * dim];
    for r in 0..dim {
        for c in r..dim {
            let differ: u32 = rows[r].iter().zip(&rows[c]).map(|(a, b)| (a ^ b).count_ones()).sum();
            let v = cols as i64 - 2 * i64::from(differ);
            numerators[r * dim + c] = v;
            numerators[c * dim + r] = v;
        }
    }
    Ok(ReducedDensityMatrix { n, kept_qubits: kept.to_vec(), dim, numerators })
}

/// `alpha^{AB}` from the largest eigenvalue of the reduced density matrix
/// of the smaller side. Independent of the SVD route in [`schmidt`].
pub fn alpha_bipartite_rdm(state: &SignState, bp: &Bipartition) -> Result<f64> {
    let a = bp.part_a().to_vec();
    let b = bp.part_b();
    let kept = if a.len() <= b.len() { a } else { b };
    Ok(reduced_density_matrix(state, &kept)?.lambda_max())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartitionAlpha {
    pub bipartition: Bipartition,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub alpha: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub argmax_bipartition: Bipartition,
    pub per_bipartition: Vec<BipartitionAlpha>,
}

/// Exhaustive sweep over all `2^(n-1) - 1` bipartitions.
///
/// Ties for the maximum (within 1e-12) go to the lexicographically smallest
/// `part_a`, so the report does not depend on scheduling.
pub fn alpha_multipartite(state: &SignState, cap: usize) -> Result<EntanglementReport> {
    let n = state.n();
    if n > cap {
        return Err(Error::CapExceeded { what: "bipartition sweep", n, cap });
    }
    let parts = Bipartition::all(n)?;
    let per_bipartition: Vec<BipartitionAlpha> = parts
        .into_par_iter()
        .map(|bp| schmidt(state, &bp).map(|s| BipartitionAlpha { alpha: s.alpha(), bipartition: bp }))
        .collect::<Result<_>>()?;
    let alpha = per_bipartition.iter().map(|b| b.alpha).fold(f64::NEG_INFINITY, f64::max);
    let argmax_bipartition = per_bipartition
        .iter()
        .find(|b| b.alpha >= alpha - 1e-12)
        .map(|b| b.bipartition.clone())
        .expect("non-empty sweep");
    Ok(EntanglementReport { alpha, e: 1.0 - alpha, argmax_bipartition, per_bipartition })
}

/// Maximum absolute row sum.
pub fn infinity_norm(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max))
}

/// One comparison of the infinity-norm procedure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcedureStep {
    /// Number of traced-out qubits; the kept block is `1..=n-k`.
    pub k: usize,
    pub infinity_norm: Scalar,
    /// `||rho||_inf <= s_max^2`.
    pub bound_holds: bool,
    /// Exact largest eigenvalue, computed only when the bound fails.
    pub lambda_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcedureResult {
    /// Squared largest Schmidt coefficient for `{1..n-1}|{n}`.
    pub s_max_squared: f64,
    pub steps: Vec<ProcedureStep>,
    /// True iff every infinity norm was bounded by `s_max_squared`.
    pub norm_test_passed: bool,
    /// `s_max_squared` on success; otherwise the maximum with the
    /// eigenvalues of the blocks whose norm test failed.
    pub alpha: f64,
}

/// Infinity-norm procedure for permutation-invariant states.
pub fn procedure_alpha(h: &Hypergraph, cap: usize) -> Result<ProcedureResult> {
    let n = h.n();
    if n > cap {
        return Err(Error::CapExceeded { what: "bipartition sweep", n, cap });
    }
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let state = build_state(h)?;
    if !state.is_permutation_invariant() {
        return Err(Error::NotPermutationInvariant);
    }
    let first: Vec<usize> = (1..n).collect();
    let s_max_squared = schmidt(&state, &Bipartition::new(n, &first)?)?.alpha();
    let mut steps = Vec::new();
    let mut alpha = s_max_squared;
    for k in 2..=n / 2 {
        let kept: Vec<usize> = (1..=n - k).collect();
        let rho = reduced_density_matrix(&state, &kept)?;
        let norm = rho.infinity_norm();
        let bound_holds = norm.to_f64().unwrap() <= s_max_squared + SPECTRAL_TOL;
        let lambda_max = if bound_holds { None } else { Some(rho.lambda_max()) };
        if let Some(l) = lambda_max {
            alpha = alpha.max(l);
        }
        steps.push(ProcedureStep { k, infinity_norm: Scalar::Exact(norm), bound_holds, lambda_max });
    }
    let norm_test_passed = steps.iter().all(|s| s.bound_holds);
    Ok(ProcedureResult { s_max_squared, steps, norm_test_passed, alpha })
}

fn family_range_error(family: Family, n: usize) -> Error {
    Error::OutOfRange { family: family_name(family), n }
}

fn family_name(family: Family) -> &'static str {
    match family {
        Family::SingleMaxEdge => "single-max",
        Family::AllNminus1 => "all-n-1",
        Family::AllGeNminus1 => "all-ge-n-1",
    }
}

/// Closed-form maximal biseparable overlap of the symmetric families.
pub fn closed_form_alpha(family: Family, n: usize) -> Result<Scalar> {
    if n < family.min_n() || n > 60 {
        return Err(family_range_error(family, n));
    }
    let half = pow2(n as u32 - 1);
    let n_i = n as i128;
    let frac = |num: i128| Scalar::exact(num, half);
    Ok(match family {
        Family::SingleMaxEdge => frac(half - 1),
        Family::AllNminus1 => match n {
            4 => Scalar::Approx((3.0 + 5f64.sqrt()) / 8.0),
            _ if n.is_multiple_of(2) => frac(half - n_i),
            _ => frac(half - n_i + 1),
        },
        Family::AllGeNminus1 => match n {
            3 => Scalar::exact(3, 4),
            _ if n.is_multiple_of(2) => frac(half - n_i + 1),
            _ => frac(half - n_i),
        },
    })
}

pub fn closed_form_e(family: Family, n: usize) -> Result<Scalar> {
    Ok(Scalar::one().sub(closed_form_alpha(family, n)?))
}

/// Upper bound `(2^(k-1) - 1) / 2^(k-1)` on `alpha` for a connected
/// hypergraph of maximum edge cardinality `k`.
pub fn alpha_upper_bound(k_max: usize) -> Result<Scalar> {
    if k_max < 2 {
        return Err(Error::Parameter(format!("maximum edge cardinality {k_max} < 2")));
    }
    let d = pow2(k_max as u32 - 1);
    Ok(Scalar::exact(d - 1, d))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundCheck {
    pub k_max: usize,
    /// `1 / 2^(k_max - 1)`.
    pub bound: Scalar,
    pub measured_e: f64,
    pub holds: bool,
}

/// Compares `E` from the brute-force sweep with the general lower bound.
pub fn lower_bound_check(h: &Hypergraph, cap: usize) -> Result<LowerBoundCheck> {
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    let k_max = h.k_max();
    let bound = Scalar::one().sub(alpha_upper_bound(k_max)?);
    let report = alpha_multipartite(&build_state(h)?, cap)?;
    let holds = report.e >= bound.to_f64() - SPECTRAL_TOL;
    Ok(LowerBoundCheck { k_max, bound, measured_e: report.e, holds })
}

/// Comparison of a reduced density matrix with its predicted block form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    /// Largest entrywise deviation from the prediction, exact.
    pub max_abs_deviation: Rational,
    /// Common denominator of the entries (`2^n`).
    pub normalization: i128,
    /// Allowed numerators `v1..v4` (only `v1`, `v2` for the single-edge family).
    pub values: Vec<i64>,
    /// Every numerator lies in `values`, interior ones in `{v1, v2}`.
    pub values_ok: bool,
    pub infinity_norm: Rational,
    /// Largest absolute row sum over interior rows of the first kind.
    pub first_row_norm: Rational,
    /// Largest absolute row sum over interior rows of the second kind.
    pub second_row_norm: Option<Rational>,
}

/// Builds `rho^{(1..n-k)}` and compares it entrywise with the block
/// structure predicted for the symmetric families.
///
/// For the single-edge family every entry is `2^k`, except the last row and
/// column (`2^k - 2`) and the corner (`2^k`). For the `(n-1)` families the
/// matrix is `(2^k-k-1) J + k G + r r^T`, where `J` is all-ones, `G` is the
/// single-edge sign pattern and `r` are the signs of the `(n-k)`-qubit state
/// with all `(n-k-1)`-edges, plus the full edge when needed to give the
/// all-ones label the same sign it has in the full state. All numerators are
/// over `2^n`.
pub fn reduced_structure_check(family: Family, n: usize, k: usize) -> Result<StructureReport> {
    let min_n = if family == Family::SingleMaxEdge { 3 } else { 4 };
    if n < min_n || k < 2 || 2 * k > n || n > 16 {
        return Err(Error::Parameter(format!("({family}, n = {n}, k = {k}) is outside the block analysis")));
    }
    let h = Hypergraph::family(family, n)?;
    let state = build_state(&h)?;
    let m = n - k;
    let kept: Vec<usize> = (1..=m).collect();
    let rho = reduced_density_matrix(&state, &kept)?;
    let dim = rho.dim();
    let last = dim - 1;
    let pk = 1i64 << k;
    let k_i = k as i64;

    let (predicted, values, r): (Box<dyn Fn(usize, usize) -> i64>, Vec<i64>, Vec<i8>) = match family {
        Family::SingleMaxEdge => {
            let p = move |x: usize, y: usize| if (x == last) ^ (y == last) { pk - 2 } else { pk };
            (Box::new(p), vec![pk, pk - 2], vec![1; dim])
        }
        _ => {
            let corner = state.sign(state.dim() - 1);
            // all (m-1)-subsets of 1..=m; for m = 2 these are the 1-edges
            let mut tilde = Hypergraph::canonicalize((1..=m).map(|skip| (1..=m).filter(|&v| v != skip).collect::<Vec<_>>()), m)?;
            let r_state = build_state(&tilde)?;
            if r_state.sign(dim - 1) != corner {
                tilde.toggle_edge(&(1..=m).collect::<Vec<_>>())?;
            }
            let r = build_state(&tilde)?.signs();
            let v1 = pk;
            let v2 = pk - 2;
            let (v3, v4) = if corner > 0 { (pk - 2 * k_i, pk - 2 * k_i - 2) } else { (pk - 2 * k_i - 2, pk - 2 * k_i) };
            let base = pk - k_i - 1;
            let rr = r.clone();
            let p = move |x: usize, y: usize| {
                let g = if (x == last) ^ (y == last) { -1 } else { 1 };
                base + k_i * g + i64::from(rr[x]) * i64::from(rr[y])
            };
            (Box::new(p), vec![v1, v2, v3, v4], r)
        }
    };

    let denom = rho.denominator();
    let mut worst = 0i64;
    let mut values_ok = true;
    for x in 0..dim {
        for y in 0..dim {
            let a = rho.numerator(x, y);
            worst = worst.max((a - predicted(x, y)).abs());
            let border = (x == last) ^ (y == last);
            let allowed: &[i64] = if family == Family::SingleMaxEdge || !border { &values[..2] } else { &values[2..] };
            values_ok &= allowed.contains(&a);
        }
    }
    let row_norm = |x: usize| (0..dim).map(|y| rho.numerator(x, y).abs()).sum::<i64>();
    let kind_norm = |sign: i8| {
        (0..last).filter(|&x| r[x] == sign).map(row_norm).max().map(|v| Rational::new(i128::from(v), denom))
    };
    let first_row_norm = kind_norm(1).unwrap_or_else(Rational::zero);
    let second_row_norm = kind_norm(-1);
    Ok(StructureReport {
        family,
        n,
        k,
        max_abs_deviation: Rational::new(i128::from(worst), denom),
        normalization: denom,
        values,
        values_ok,
        infinity_norm: rho.infinity_norm(),
        first_row_norm,
        second_row_norm,
    })
}
