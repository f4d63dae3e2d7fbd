//! Pauli decomposition of stabilizer products and grouping of the
//! resulting strings into local measurement settings.
//!
//! Operators are expanded in the real basis `X^x Z^z` (all `X` factors to
//! the left), where the product rule only produces signs:
//! `(X^a Z^b)(X^c Z^d) = (-1)^{|b & c|} X^{a^c} Z^{b^d}`. A term with
//! `y = |x & z|` equals `(-1)^{y/2}` times the Pauli string with `Y` on
//! those qubits when `y` is even; hermitian operators have no odd terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{vertex_bit, vertices_mask, Hypergraph};
use crate::scalar::{pow2, Rational, Scalar};
use crate::states::{stabilizer_matrix, SignedPermutation};
use crate::witness::{WitnessKind, WitnessSpec};

/// Largest `n` for which the projector witness is expanded.
pub const PROJECTOR_CAP: usize = 10;

/// Largest `n` for which expansions are checked against dense matrices.
pub const DENSE_CHECK_CAP: usize = 6;

/// Largest `n` accepted by the exhaustive minimum.
pub const EXHAUSTIVE_CAP: usize = 4;

/// Sum of `X^x Z^z` terms with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
struct XzSum(BTreeMap<(u64, u64), Rational>);

impl XzSum {
    fn identity() -> Self {
        XzSum(BTreeMap::from([((0, 0), Rational::one())]))
    }

    fn mul(&self, other: &XzSum) -> XzSum {
        let mut out: BTreeMap<(u64, u64), Rational> = BTreeMap::new();
        for (&(a, b), &p) in &self.0 {
            for (&(c, d), &q) in &other.0 {
                let sign = if (b & c).count_ones() % 2 == 1 { -p * q } else { p * q };
                *out.entry((a ^ c, b ^ d)).or_insert_with(Rational::zero) += sign;
            }
        }
        out.retain(|_, v| !v.is_zero());
        XzSum(out)
    }
}

/// `C_f = I - 2^{1-|f|} sum_{S ⊆ f} (-1)^{|S|} Z^S`; `C_∅ = -I`.
fn controlled_z(f: u64) -> XzSum {
    let scale = Rational::new(2, pow2(f.count_ones()));
    let mut terms = BTreeMap::new();
    let mut s = f;
    loop {
        let c = if s.count_ones() % 2 == 1 { scale } else { -scale };
        terms.insert((0, s), c);
        if s == 0 {
            break;
        }
        s = (s - 1) & f;
    }
    *terms.get_mut(&(0, 0)).unwrap() += Rational::one();
    terms.retain(|_, v: &mut Rational| !v.is_zero());
    XzSum(terms)
}

fn stabilizer_xz(h: &Hypergraph, v: usize) -> XzSum {
    let n = h.n();
    let bit = vertex_bit(n, v);
    let mut k = XzSum(BTreeMap::from([((bit, 0), Rational::one())]));
    for e in h.incident(v) {
        k = k.mul(&controlled_z(vertices_mask(n, e) & !bit));
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(PauliLetter::I),
            'X' => Ok(PauliLetter::X),
            'Y' => Ok(PauliLetter::Y),
            'Z' => Ok(PauliLetter::Z),
            _ => Err(Error::Parse(format!("'{c}' is not a Pauli letter"))),
        }
    }
}

/// Tensor product of single-qubit Paulis, qubit 1 first, with a real
/// coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    pub letters: Vec<PauliLetter>,
    pub coefficient: Rational,
}

impl PauliString {
    pub fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l == PauliLetter::Y).count()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&l| l == PauliLetter::I)
    }

    pub fn word(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PauliString", 2)?;
        st.serialize_field("letters", &self.word())?;
        st.serialize_field("coefficient", &Scalar::Exact(self.coefficient))?;
        st.end()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", Scalar::Exact(self.coefficient), self.word())
    }
}

fn to_strings(n: usize, sum: &XzSum) -> Result<Vec<PauliString>> {
    let mut out = Vec::with_capacity(sum.0.len());
    for (&(x, z), &c) in &sum.0 {
        let y = (x & z).count_ones();
        if y % 2 == 1 {
            return Err(Error::OracleMismatch(format!("non-hermitian term X^{x:#b} Z^{z:#b}")));
        }
        let letters = (1..=n)
            .map(|v| {
                let b = vertex_bit(n, v);
                match (x & b != 0, z & b != 0) {
                    (false, false) => PauliLetter::I,
                    (true, false) => PauliLetter::X,
                    (true, true) => PauliLetter::Y,
                    (false, true) => PauliLetter::Z,
                }
            })
            .collect();
        let coefficient = if (y / 2) % 2 == 1 { -c } else { c };
        out.push(PauliString { letters, coefficient });
    }
    out.sort();
    Ok(out)
}

/// Checks an `X^T (diagonal)` expansion against the signed permutation.
fn matches_dense(n: usize, sum: &XzSum, dense: &SignedPermutation) -> bool {
    let dim = 1usize << n;
    (0..dim).all(|c| {
        let mut rows: BTreeMap<usize, Rational> = BTreeMap::new();
        for (&(x, z), &coef) in &sum.0 {
            let v = if (z & c as u64).count_ones() % 2 == 1 { -coef } else { coef };
            *rows.entry(c ^ x as usize).or_insert_with(Rational::zero) += v;
        }
        rows.retain(|_, v| !v.is_zero());
        let expected = if dense.negative[c] { -Rational::one() } else { Rational::one() };
        rows.len() == 1 && rows.get(&dense.target[c]) == Some(&expected)
    })
}

fn product_xz(h: &Hypergraph, subset: &[usize]) -> Result<XzSum> {
    let n = h.n();
    if subset.is_empty() {
        return Err(Error::Parameter("empty stabilizer subset".into()));
    }
    let mut seen = BTreeSet::new();
    for &v in subset {
        if v == 0 || v > n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if !seen.insert(v) {
            return Err(Error::Parameter(format!("vertex {v} repeated in stabilizer subset")));
        }
    }
    let mut prod = XzSum::identity();
    for &v in subset {
        prod = prod.mul(&stabilizer_xz(h, v));
    }
    if n <= DENSE_CHECK_CAP {
        let mut dense = SignedPermutation::identity(1 << n);
        for &v in subset {
            dense = dense.compose(&stabilizer_matrix(h, v)?);
        }
        if !matches_dense(n, &prod, &dense) {
            return Err(Error::OracleMismatch(format!("expansion of K over {subset:?} disagrees with the dense product")));
        }
    }
    Ok(prod)
}

/// Exact Pauli expansion of `prod_{i in subset} K_i`, sorted by string.
pub fn decompose_stabilizer_product(h: &Hypergraph, subset: &[usize]) -> Result<Vec<PauliString>> {
    to_strings(h.n(), &product_xz(h, subset)?)
}

/// One measurement basis per qubit, qubit 1 first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeasurementSetting(pub Vec<PauliLetter>);

impl MeasurementSetting {
    pub fn covers(&self, s: &PauliString) -> bool {
        s.letters.iter().zip(&self.0).all(|(&l, &b)| l == PauliLetter::I || l == b)
    }

    pub fn word(&self) -> String {
        self.0.iter().map(|l| l.as_char()).collect()
    }
}

impl FromStr for MeasurementSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s.chars().map(PauliLetter::from_char).collect::<Result<Vec<_>>>()?;
        if letters.contains(&PauliLetter::I) {
            return Err(Error::Parse(format!("setting '{s}' leaves a qubit unmeasured")));
        }
        Ok(MeasurementSetting(letters))
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}

impl Serialize for MeasurementSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.word())
    }
}

fn complete(letters: &[PauliLetter]) -> MeasurementSetting {
    MeasurementSetting(letters.iter().map(|&l| if l == PauliLetter::I { PauliLetter::Z } else { l }).collect())
}

/// Replaces every `I` by `Z`; identity strings are skipped.
pub fn canonical_settings<'a>(strings: impl IntoIterator<Item = &'a PauliString>) -> BTreeSet<MeasurementSetting> {
    strings.into_iter().filter(|s| !s.is_identity()).map(|s| complete(&s.letters)).collect()
}

/// First-fit grouping of lexicographically sorted strings; never worse
/// than [`canonical_settings`].
pub fn greedy_min_settings<'a>(strings: impl IntoIterator<Item = &'a PauliString>) -> BTreeSet<MeasurementSetting> {
    let mut words: Vec<&PauliString> = strings.into_iter().filter(|s| !s.is_identity()).collect();
    words.sort_by(|a, b| a.letters.cmp(&b.letters));
    words.dedup_by(|a, b| a.letters == b.letters);
    let mut groups: Vec<Vec<PauliLetter>> = Vec::new();
    for s in &words {
        let fits = |g: &Vec<PauliLetter>| {
            g.iter().zip(&s.letters).all(|(&a, &b)| a == PauliLetter::I || b == PauliLetter::I || a == b)
        };
        match groups.iter_mut().find(|g| fits(g)) {
            Some(g) => {
                for (a, &b) in g.iter_mut().zip(&s.letters) {
                    if b != PauliLetter::I {
                        *a = b;
                    }
                }
            }
            None => groups.push(s.letters.clone()),
        }
    }
    let greedy: BTreeSet<MeasurementSetting> = groups.iter().map(|g| complete(g)).collect();
    let canonical = canonical_settings(words.iter().copied());
    if greedy.len() <= canonical.len() {
        greedy
    } else {
        canonical
    }
}

/// Smallest set of settings covering every string, by branch and bound.
/// Returns `None` above [`EXHAUSTIVE_CAP`] qubits or when the search
/// exceeds `node_budget` nodes.
pub fn exhaustive_min_settings<'a>(strings: impl IntoIterator<Item = &'a PauliString>, node_budget: usize) -> Option<BTreeSet<MeasurementSetting>> {
    let mut words: Vec<Vec<PauliLetter>> = strings.into_iter().filter(|s| !s.is_identity()).map(|s| s.letters.clone()).collect();
    words.sort();
    words.dedup();
    let Some(n) = words.first().map(|w| w.len()) else {
        return Some(BTreeSet::new());
    };
    if n > EXHAUSTIVE_CAP {
        return None;
    }
    let basis = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    let all: Vec<Vec<PauliLetter>> = (0..3usize.pow(n as u32))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let l = basis[k % 3];
                    k /= 3;
                    l
                })
                .collect()
        })
        .collect();
    let cover = |setting: &[PauliLetter], w: &[PauliLetter]| w.iter().zip(setting).all(|(&l, &b)| l == PauliLetter::I || l == b);

    struct Search<'s> {
        words: &'s [Vec<PauliLetter>],
        all: &'s [Vec<PauliLetter>],
        best: Option<Vec<usize>>,
        nodes: usize,
        budget: usize,
    }
    impl Search<'_> {
        fn go(&mut self, chosen: &mut Vec<usize>, cover: &dyn Fn(&[PauliLetter], &[PauliLetter]) -> bool) -> bool {
            self.nodes += 1;
            if self.nodes > self.budget {
                return false;
            }
            let uncovered = self.words.iter().find(|w| !chosen.iter().any(|&c| cover(&self.all[c], w)));
            let Some(w) = uncovered else {
                if self.best.as_ref().is_none_or(|b| chosen.len() < b.len()) {
                    self.best = Some(chosen.clone());
                }
                return true;
            };
            if self.best.as_ref().is_some_and(|b| chosen.len() + 1 >= b.len()) {
                return true;
            }
            for (i, s) in self.all.iter().enumerate() {
                if cover(s, w) {
                    chosen.push(i);
                    let ok = self.go(chosen, cover);
                    chosen.pop();
                    if !ok {
                        return false;
                    }
                }
            }
            true
        }
    }
    let mut search = Search { words: &words, all: &all, best: None, nodes: 0, budget: node_budget };
    if !search.go(&mut Vec::new(), &cover) {
        return None;
    }
    search.best.map(|b| b.into_iter().map(|i| MeasurementSetting(all[i].clone())).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingMode {
    Canonical,
    Greedy,
}

impl FromStr for SettingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(SettingMode::Canonical),
            "greedy" => Ok(SettingMode::Greedy),
            _ => Err(Error::Parse(format!("unknown setting mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SettingReport {
    pub mode: SettingMode,
    pub count: usize,
    pub settings: Vec<MeasurementSetting>,
}

fn report(mode: SettingMode, strings: &[PauliString]) -> SettingReport {
    let set = match mode {
        SettingMode::Canonical => canonical_settings(strings),
        SettingMode::Greedy => greedy_min_settings(strings),
    };
    SettingReport { mode, count: set.len(), settings: set.into_iter().collect() }
}

/// All non-identity Pauli strings of a witness, with coefficients.
///
/// The projector `alpha I - |H><H|` is expanded through
/// `|H><H| = 2^-n sum_T prod_{i in T} K_i`; every subset has a distinct
/// `X` pattern so no cancellation happens between subsets.
pub fn witness_strings(w: &WitnessSpec) -> Result<Vec<PauliString>> {
    witness_strings_capped(w, PROJECTOR_CAP)
}

pub fn witness_strings_capped(w: &WitnessSpec, cap: usize) -> Result<Vec<PauliString>> {
    let h = &w.hypergraph;
    let n = h.n();
    let mut out = Vec::new();
    match w.kind {
        WitnessKind::Stabilizer => {
            for v in 1..=n {
                for mut s in decompose_stabilizer_product(h, &[v])? {
                    s.coefficient = -s.coefficient;
                    out.push(s);
                }
            }
        }
        WitnessKind::Projector => {
            if n > cap {
                return Err(Error::CapExceeded { what: "projector expansion", n, cap });
            }
            let scale = Rational::new(-1, pow2(n as u32));
            for t in 1u64..1 << n {
                let subset: Vec<usize> = (1..=n).filter(|&v| t & vertex_bit(n, v) != 0).collect();
                for mut s in decompose_stabilizer_product(h, &subset)? {
                    s.coefficient *= scale;
                    out.push(s);
                }
            }
        }
    }
    // equal strings only meet within the stabilizer witness
    let mut merged: BTreeMap<Vec<PauliLetter>, Rational> = BTreeMap::new();
    for s in out {
        *merged.entry(s.letters).or_insert_with(Rational::zero) += s.coefficient;
    }
    Ok(merged
        .into_iter()
        .filter(|(l, c)| !c.is_zero() && l.iter().any(|&x| x != PauliLetter::I))
        .map(|(letters, coefficient)| PauliString { letters, coefficient })
        .collect())
}

/// Settings for a witness. The projector expansion streams one subset at a
/// time in canonical mode, so only the settings are held in memory.
pub fn witness_settings(w: &WitnessSpec, mode: SettingMode) -> Result<SettingReport> {
    witness_settings_capped(w, mode, PROJECTOR_CAP)
}

pub fn witness_settings_capped(w: &WitnessSpec, mode: SettingMode, cap: usize) -> Result<SettingReport> {
    let h = &w.hypergraph;
    let n = h.n();
    if w.kind == WitnessKind::Projector && mode == SettingMode::Canonical {
        if n > cap {
            return Err(Error::CapExceeded { what: "projector expansion", n, cap });
        }
        let mut set = BTreeSet::new();
        for t in 1u64..1 << n {
            let subset: Vec<usize> = (1..=n).filter(|&v| t & vertex_bit(n, v) != 0).collect();
            set.extend(canonical_settings(&decompose_stabilizer_product(h, &subset)?));
        }
        return Ok(SettingReport { mode, count: set.len(), settings: set.into_iter().collect() });
    }
    Ok(report(mode, &witness_strings_capped(w, cap)?))
}

pub fn witness_setting_count(w: &WitnessSpec, mode: SettingMode) -> Result<usize> {
    Ok(witness_settings(w, mode)?.count)
}

/// Settings for the product of stabilizers over `subset`.
pub fn product_settings(h: &Hypergraph, subset: &[usize], mode: SettingMode) -> Result<SettingReport> {
    Ok(report(mode, &decompose_stabilizer_product(h, subset)?))
}
