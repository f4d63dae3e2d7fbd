//! Hypergraph states as exact sign tables.
//!
//! Every state handled here has amplitudes `±1/sqrt(2^n)`, so a state is a
//! packed bitmap over the `2^n` basis labels (bit set means amplitude sign
//! `-1`). Only Z-diagonal gates and X permutations act on these states, so
//! all identities in this module hold exactly.

use std::collections::HashSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{mask_vertices, vertex_bit, Edge, Hypergraph};
use crate::scalar::{pow2, Rational};

/// Largest qubit count for which a sign table is materialized.
pub const MAX_STATE_QUBITS: usize = 26;

/// Default cap for dense `2^n x 2^n` checks.
pub const DEFAULT_DENSE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignState {
    n: usize,
    words: Vec<u64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_STATE_QUBITS {
        return Err(Error::CapExceeded { what: "state size", n, cap: MAX_STATE_QUBITS });
    }
    Ok(())
}

fn check_vertex(n: usize, v: usize) -> Result<()> {
    if v == 0 || v > n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    Ok(())
}

impl SignState {
    /// `|+>^n`.
    pub fn plus(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        Ok(Self { n, words: vec![0; dim.div_ceil(64)] })
    }

    /// Builds a state from explicit signs (`+1` / `-1`).
    pub fn from_signs(n: usize, signs: &[i8]) -> Result<Self> {
        let mut s = Self::plus(n)?;
        if signs.len() != s.dim() {
            return Err(Error::LengthMismatch { expected: s.dim(), got: signs.len() });
        }
        for (x, &v) in signs.iter().enumerate() {
            match v {
                1 => {}
                -1 => s.flip(x),
                _ => return Err(Error::Parameter(format!("sign entries must be +1 or -1, got {v}"))),
            }
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn is_negative(&self, x: usize) -> bool {
        self.words[x >> 6] >> (x & 63) & 1 == 1
    }

    #[inline]
    pub fn sign(&self, x: usize) -> i8 {
        if self.is_negative(x) {
            -1
        } else {
            1
        }
    }

    #[inline]
    fn flip(&mut self, x: usize) {
        self.words[x >> 6] ^= 1 << (x & 63);
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.dim()).map(|x| self.sign(x)).collect()
    }

    /// Amplitudes `sign/sqrt(2^n)`.
    pub fn amplitudes(&self) -> Vec<f64> {
        let norm = (self.dim() as f64).sqrt().recip();
        (0..self.dim()).map(|x| f64::from(self.sign(x)) * norm).collect()
    }

    pub fn negative_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Hex dump of the sign bitmap: byte `j` holds labels `8j..8j+8`,
    /// least significant bit first.
    pub fn to_hex(&self) -> String {
        let nbytes = self.dim().div_ceil(8);
        let bytes: Vec<u8> = (0..nbytes).map(|j| (self.words[j / 8] >> (8 * (j % 8))) as u8).collect();
        hex::encode(bytes)
    }

    pub fn from_hex(n: usize, s: &str) -> Result<Self> {
        let mut state = Self::plus(n)?;
        let bytes = hex::decode(s.trim()).map_err(|e| Error::Parse(e.to_string()))?;
        let expected = state.dim().div_ceil(8);
        if bytes.len() != expected {
            return Err(Error::LengthMismatch { expected, got: bytes.len() });
        }
        for (j, b) in bytes.iter().enumerate() {
            state.words[j / 8] |= u64::from(*b) << (8 * (j % 8));
        }
        let tail = state.dim() % 64;
        if tail != 0 && state.words.last().unwrap() >> tail != 0 {
            return Err(Error::Parse("bits set beyond 2^n labels".into()));
        }
        Ok(state)
    }

    /// Applies `C_e`: flips every label whose support contains `e`.
    pub fn apply_ck(&self, e: &[usize]) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::EmptyEdge);
        }
        for &v in e {
            check_vertex(self.n, v)?;
        }
        let mask = e.iter().fold(0u64, |m, &v| m | vertex_bit(self.n, v)) as usize;
        let mut out = self.clone();
        for x in 0..self.dim() {
            if x & mask == mask {
                out.flip(x);
            }
        }
        Ok(out)
    }

    /// Pauli X on qubit `v`: relabels `x -> x ^ bit(v)`.
    pub fn apply_x(&self, v: usize) -> Result<Self> {
        check_vertex(self.n, v)?;
        let b = vertex_bit(self.n, v) as usize;
        let mut out = self.clone();
        for x in 0..self.dim() {
            if self.is_negative(x ^ b) != self.is_negative(x) {
                out.flip(x);
            }
        }
        Ok(out)
    }

    /// Pauli Z on qubit `v`.
    pub fn apply_z(&self, v: usize) -> Result<Self> {
        self.apply_ck(&[v])
    }

    /// Projects qubit `v` onto `|outcome>` and re-prepares it in `|+>`.
    ///
    /// The remaining qubits keep their (renormalized) amplitudes, so the
    /// result is `psi_outcome (x) |+>_v`; the measured qubit is a product
    /// factor and does not affect entanglement across any split.
    pub fn measure_z_reprepare(&self, v: usize, outcome: u8) -> Result<Self> {
        check_vertex(self.n, v)?;
        let b = vertex_bit(self.n, v) as usize;
        let mut out = Self::plus(self.n)?;
        for x in 0..self.dim() {
            let src = if outcome == 0 { x & !b } else { x | b };
            if self.is_negative(src) {
                out.flip(x);
            }
        }
        Ok(out)
    }

    /// Squared norm of the projection of qubit `v` onto `|outcome>`, as
    /// the exact count of surviving amplitudes over `2^n`.
    pub fn outcome_probability(&self, v: usize, outcome: u8) -> Result<Rational> {
        check_vertex(self.n, v)?;
        let b = vertex_bit(self.n, v) as usize;
        let hits = (0..self.dim()).filter(|x| (x & b != 0) == (outcome == 1)).count();
        Ok(Rational::new(hits as i128, self.dim() as i128))
    }

    /// Removes qubit `v` after projecting it onto `|outcome>`; the result
    /// lives on `n-1` qubits with the remaining order preserved.
    pub fn measure_z_discard(&self, v: usize, outcome: u8) -> Result<Self> {
        check_vertex(self.n, v)?;
        if self.n < 2 {
            return Err(Error::TooFewVertices { n: self.n, min: 2 });
        }
        let m = self.n - 1;
        let low_bits = self.n - v;
        let mut out = Self::plus(m)?;
        for y in 0..out.dim() {
            let hi = y >> low_bits;
            let lo = y & ((1 << low_bits) - 1);
            let x = (hi << (low_bits + 1)) | ((outcome as usize) << low_bits) | lo;
            if self.is_negative(x) {
                out.flip(y);
            }
        }
        Ok(out)
    }

    /// The same vector with every sign reversed.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for x in 0..self.dim() {
            out.flip(x);
        }
        out
    }

    /// `<a|b>` as an exact rational.
    pub fn overlap(&self, other: &SignState) -> Result<Rational> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { expected: self.n, got: other.n });
        }
        let differing: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones()).sum();
        let dim = self.dim() as i128;
        Ok(Rational::new(dim - 2 * i128::from(differing), dim))
    }

    /// True iff the amplitude depends only on the Hamming weight of the
    /// label, i.e. the state is symmetric under all qubit permutations.
    pub fn is_permutation_invariant(&self) -> bool {
        let mut by_weight: Vec<Option<bool>> = vec![None; self.n + 1];
        for x in 0..self.dim() {
            let w = (x as u64).count_ones() as usize;
            let neg = self.is_negative(x);
            match by_weight[w] {
                None => by_weight[w] = Some(neg),
                Some(prev) if prev != neg => return false,
                _ => {}
            }
        }
        true
    }
}

/// Serialized form used by `state dump`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignStateDump {
    pub n: usize,
    pub signs_hex: String,
}

impl From<&SignState> for SignStateDump {
    fn from(s: &SignState) -> Self {
        Self { n: s.n(), signs_hex: s.to_hex() }
    }
}

impl TryFrom<&SignStateDump> for SignState {
    type Error = Error;

    fn try_from(d: &SignStateDump) -> Result<Self> {
        SignState::from_hex(d.n, &d.signs_hex)
    }
}

/// `|H> = prod_e C_e |+>^n`.
pub fn build_state(h: &Hypergraph) -> Result<SignState> {
    let n = h.n();
    let mut s = SignState::plus(n)?;
    let masks = h.edge_masks();
    for x in 0..s.dim() {
        let xs = x as u64;
        let parity = masks.iter().filter(|&&m| xs & m == m).count() & 1;
        if parity == 1 {
            s.flip(x);
        }
    }
    Ok(s)
}

/// Sign factor of the diagonal part of `K_v` at label `x`: the product of
/// `C_{e \ v}` over edges `e` containing `v`. Independent of bit `v` of `x`.
fn stabilizer_phase(reduced_masks: &[u64], x: usize) -> bool {
    let xs = x as u64;
    reduced_masks.iter().filter(|&&m| xs & m == m).count() & 1 == 1
}

/// Masks of `e \ {v}` for every edge `e` containing `v`.
fn reduced_masks(h: &Hypergraph, v: usize) -> Vec<u64> {
    let b = vertex_bit(h.n(), v);
    h.edge_masks().into_iter().filter(|m| m & b != 0).map(|m| m & !b).collect()
}

/// `K_v = X_v (x) prod_{e in N(v)} C_{e \ v}` applied to a sign state.
pub fn apply_stabilizer(state: &SignState, h: &Hypergraph, v: usize) -> Result<SignState> {
    if state.n() != h.n() {
        return Err(Error::LengthMismatch { expected: h.n(), got: state.n() });
    }
    check_vertex(h.n(), v)?;
    let b = vertex_bit(h.n(), v) as usize;
    let red = reduced_masks(h, v);
    let mut out = SignState::plus(h.n())?;
    for x in 0..state.dim() {
        if state.is_negative(x ^ b) ^ stabilizer_phase(&red, x) {
            out.flip(x);
        }
    }
    Ok(out)
}

/// `|phi_s> = Z^s |H>`, with `s` given as one bit per qubit (`s[0]` is qubit 1).
pub fn basis_state(h: &Hypergraph, s: &[u8]) -> Result<SignState> {
    if s.len() != h.n() {
        return Err(Error::LengthMismatch { expected: h.n(), got: s.len() });
    }
    let mask = s
        .iter()
        .enumerate()
        .filter(|(_, &bit)| bit != 0)
        .fold(0u64, |m, (i, _)| m | vertex_bit(h.n(), i + 1));
    basis_state_mask(h, mask)
}

/// Same as [`basis_state`] with `s` packed like a basis label.
pub fn basis_state_mask(h: &Hypergraph, s: u64) -> Result<SignState> {
    let mut st = build_state(h)?;
    for x in 0..st.dim() {
        if (x as u64 & s).count_ones() & 1 == 1 {
            st.flip(x);
        }
    }
    Ok(st)
}

/// Recovers the hypergraph of a sign state and its global sign.
///
/// The sign bits form a Boolean function whose algebraic normal form
/// (XOR-Moebius transform) lists exactly the hyperedges.
pub fn extract_hypergraph(state: &SignState) -> Result<(Hypergraph, i8)> {
    let n = state.n();
    let global = state.sign(0);
    let mut f: Vec<bool> = (0..state.dim()).map(|x| state.is_negative(x) ^ (global < 0)).collect();
    for bit in 0..n {
        let step = 1usize << bit;
        for x in 0..f.len() {
            if x & step != 0 {
                f[x] ^= f[x ^ step];
            }
        }
    }
    let edges: Vec<Edge> = f
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c)
        .map(|(mask, _)| mask_vertices(n, mask as u64))
        .collect();
    Ok((Hypergraph::canonicalize(edges, n.max(1))?, global))
}

/// A signed permutation matrix: column `y` has a single entry
/// `sign[y]` in row `target[y]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    pub target: Vec<usize>,
    pub negative: Vec<bool>,
}

impl SignedPermutation {
    pub fn identity(dim: usize) -> Self {
        Self { target: (0..dim).collect(), negative: vec![false; dim] }
    }

    /// `self * other`.
    pub fn compose(&self, other: &SignedPermutation) -> Self {
        let target = other.target.iter().map(|&t| self.target[t]).collect();
        let negative = other.target.iter().zip(&other.negative).map(|(&t, &s)| s ^ self.negative[t]).collect();
        Self { target, negative }
    }

    /// Dense integer form, row-major.
    pub fn to_dense(&self) -> Vec<i64> {
        let dim = self.target.len();
        let mut m = vec![0i64; dim * dim];
        for (y, (&t, &neg)) in self.target.iter().zip(&self.negative).enumerate() {
            m[t * dim + y] = if neg { -1 } else { 1 };
        }
        m
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; v.len()];
        for (y, (&t, &neg)) in self.target.iter().zip(&self.negative).enumerate() {
            out[t] += if neg { -v[y] } else { v[y] };
        }
        out
    }
}

/// `K_v` as a signed permutation of the computational basis.
pub fn stabilizer_matrix(h: &Hypergraph, v: usize) -> Result<SignedPermutation> {
    check_vertex(h.n(), v)?;
    check_qubits(h.n())?;
    let dim = 1usize << h.n();
    let b = vertex_bit(h.n(), v) as usize;
    let red = reduced_masks(h, v);
    // K e_y = phase(y) e_{y ^ b}
    let target = (0..dim).map(|y| y ^ b).collect();
    let negative = (0..dim).map(|y| stabilizer_phase(&red, y)).collect();
    Ok(SignedPermutation { target, negative })
}

/// Result of checking `|H><H| = prod_i (I+K_i)/2 = 2^-n sum_{g in group} g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectorCheck {
    pub n: usize,
    /// Entrywise max deviation of the product form.
    pub product_deviation: Rational,
    /// Entrywise max deviation of the group-average form.
    pub group_deviation: Rational,
    /// Number of distinct signed permutations among the `2^n` products.
    pub distinct_group_elements: usize,
}

impl ProjectorCheck {
    pub fn max_abs_deviation(&self) -> Rational {
        self.product_deviation.max(self.group_deviation)
    }

    pub fn holds(&self) -> bool {
        self.max_abs_deviation().is_zero()
    }
}

/// Compares the projector `|H><H|` with both stabilizer forms, exactly.
///
/// All three matrices are scaled by `2^n`, which makes them integer.
pub fn projector_identity_check(h: &Hypergraph, cap: usize) -> Result<ProjectorCheck> {
    let n = h.n();
    if n > cap {
        return Err(Error::CapExceeded { what: "dense check", n, cap });
    }
    let dim = 1usize << n;
    let signs: Vec<i64> = build_state(h)?.signs().into_iter().map(i64::from).collect();
    let stabs: Vec<SignedPermutation> = (1..=n).map(|v| stabilizer_matrix(h, v)).collect::<Result<_>>()?;

    let scale = pow2(n as u32);
    let deviation = |m: &dyn Fn(usize, usize) -> i64| -> Rational {
        let mut worst = 0i64;
        for r in 0..dim {
            for c in 0..dim {
                worst = worst.max((m(r, c) - signs[r] * signs[c]).abs());
            }
        }
        Rational::new(i128::from(worst), scale)
    };

    // product form: column x of prod_i (I + K_i)
    let mut product = vec![0i64; dim * dim];
    for x in 0..dim {
        let mut v = vec![0i64; dim];
        v[x] = 1;
        for k in &stabs {
            let kv = k.apply(&v);
            v.iter_mut().zip(kv).for_each(|(a, b)| *a += b);
        }
        for r in 0..dim {
            product[r * dim + x] = v[r];
        }
    }
    let product_deviation = deviation(&|r, c| product[r * dim + c]);

    // group form: sum over all subsets T of prod_{i in T} K_i
    let mut group = vec![0i64; dim * dim];
    let mut seen = HashSet::new();
    let mut elems = vec![SignedPermutation::identity(dim)];
    for k in &stabs {
        let extended: Vec<SignedPermutation> = elems.iter().map(|g| k.compose(g)).collect();
        elems.extend(extended);
    }
    for g in &elems {
        for (y, (&t, &neg)) in g.target.iter().zip(&g.negative).enumerate() {
            group[t * dim + y] += if neg { -1 } else { 1 };
        }
        seen.insert(g.clone());
    }
    let group_deviation = deviation(&|r, c| group[r * dim + c]);

    Ok(ProjectorCheck { n, product_deviation, group_deviation, distinct_group_elements: seen.len() })
}

/// `K_i |H> = |H>` for every vertex.
pub fn verify_stabilizers(h: &Hypergraph) -> Result<bool> {
    let s = build_state(h)?;
    for v in 1..=h.n() {
        if apply_stabilizer(&s, h, v)? != s {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisCheck {
    pub n: usize,
    /// `K_i |phi_s> = (-1)^{s_i} |phi_s>` for all `s`, `i`.
    pub eigen_relations_hold: bool,
    /// Largest `|<phi_s|phi_t> - delta_{s,t}|` over all pairs.
    pub max_orthonormality_error: Rational,
}

/// Checks the eigen-relations and orthonormality of the hypergraph basis.
pub fn verify_basis(h: &Hypergraph, cap: usize) -> Result<BasisCheck> {
    let n = h.n();
    if n > cap {
        return Err(Error::CapExceeded { what: "dense check", n, cap });
    }
    let dim = 1u64 << n;
    let basis: Vec<SignState> = (0..dim).map(|s| basis_state_mask(h, s)).collect::<Result<_>>()?;
    let mut eigen = true;
    for (s, phi) in basis.iter().enumerate() {
        for v in 1..=n {
            let k = apply_stabilizer(phi, h, v)?;
            let expected = if s as u64 & vertex_bit(n, v) != 0 { phi.negated() } else { phi.clone() };
            eigen &= k == expected;
        }
    }
    let mut worst = Rational::zero();
    for (s, a) in basis.iter().enumerate() {
        for (t, b) in basis.iter().enumerate() {
            let delta = Rational::from_integer(i128::from(s == t));
            let err = (a.overlap(b)? - delta).abs();
            if err > worst {
                worst = err;
            }
        }
    }
    Ok(BasisCheck { n, eigen_relations_hold: eigen, max_orthonormality_error: worst })
}
