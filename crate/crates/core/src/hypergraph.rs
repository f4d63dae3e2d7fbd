//! Hypergraphs on vertices `1..=n` with a unique canonical form.
//!
//! Edges are strictly increasing vertex lists and the edge set is kept in
//! lexicographic order. Inserting an edge that is already present removes it,
//! which mirrors `C_e * C_e = I` for the associated controlled-Z gates.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Edge = Vec<usize>;

/// Largest vertex count supported by the bit-mask representation.
pub const MAX_VERTICES: usize = 62;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph")]
pub struct Hypergraph {
    n: usize,
    edges: BTreeSet<Edge>,
}

#[derive(Deserialize)]
struct RawHypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<RawHypergraph> for Hypergraph {
    type Error = Error;

    fn try_from(raw: RawHypergraph) -> Result<Self> {
        Hypergraph::canonicalize(raw.edges, raw.n)
    }
}

/// The three symmetric families with closed-form entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// One hyperedge containing every vertex (`G_n`).
    SingleMaxEdge,
    /// Every hyperedge of cardinality `n-1` (`H_n^{n-1}`).
    AllNminus1,
    /// Every hyperedge of cardinality `n-1` plus the `n`-edge (`H_n^{n-1,n}`).
    AllGeNminus1,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::SingleMaxEdge, Family::AllNminus1, Family::AllGeNminus1];

    pub fn min_n(self) -> usize {
        match self {
            Family::SingleMaxEdge => 2,
            Family::AllNminus1 | Family::AllGeNminus1 => 3,
        }
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            Family::SingleMaxEdge => "single-max",
            Family::AllNminus1 => "all-n-1",
            Family::AllGeNminus1 => "all-ge-n-1",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single-max" | "single-max-edge" | "G" => Ok(Family::SingleMaxEdge),
            "all-n-1" | "all-n-minus-1" => Ok(Family::AllNminus1),
            "all-ge-n-1" | "all-ge-n-minus-1" => Ok(Family::AllGeNminus1),
            _ => Err(Error::Parse(format!("unknown family `{s}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// Bit used for vertex `v` in a basis label: vertex 1 is the most
/// significant of the `n` bits.
#[inline]
pub fn vertex_bit(n: usize, v: usize) -> u64 {
    1u64 << (n - v)
}

/// Mask of a vertex list.
pub fn vertices_mask(n: usize, vertices: &[usize]) -> u64 {
    vertices.iter().fold(0, |m, &v| m | vertex_bit(n, v))
}

/// Vertex list of a mask, ascending.
pub fn mask_vertices(n: usize, mask: u64) -> Vec<usize> {
    (1..=n).filter(|&v| mask & vertex_bit(n, v) != 0).collect()
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::TooFewVertices { n, min: 1 });
    }
    if n > MAX_VERTICES {
        return Err(Error::CapExceeded { what: "vertex count", n, cap: MAX_VERTICES });
    }
    Ok(())
}

fn normalize_edge(n: usize, raw: &[usize]) -> Result<Edge> {
    if raw.is_empty() {
        return Err(Error::EmptyEdge);
    }
    if let Some(&v) = raw.iter().find(|&&v| v == 0 || v > n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let mut e = raw.to_vec();
    e.sort_unstable();
    e.dedup();
    Ok(e)
}

impl Hypergraph {
    /// Hypergraph with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n, edges: BTreeSet::new() })
    }

    /// Canonical form of a raw edge list. Edges listed an even number of
    /// times cancel.
    pub fn canonicalize<I, E>(raw_edges: I, n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        let mut h = Self::empty(n)?;
        for e in raw_edges {
            h.toggle_edge(e.as_ref())?;
        }
        Ok(h)
    }

    pub fn family(family: Family, n: usize) -> Result<Self> {
        if n < family.min_n() {
            return Err(Error::TooFewVertices { n, min: family.min_n() });
        }
        let full: Vec<usize> = (1..=n).collect();
        let mut h = Self::empty(n)?;
        if family != Family::SingleMaxEdge {
            for skip in 1..=n {
                let e: Vec<usize> = full.iter().copied().filter(|&v| v != skip).collect();
                h.toggle_edge(&e)?;
            }
        }
        if family != Family::AllNminus1 {
            h.toggle_edge(&full)?;
        }
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter()
    }

    pub fn edge_list(&self) -> Vec<Edge> {
        self.edges.iter().cloned().collect()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, e: &[usize]) -> bool {
        self.edges.contains(e)
    }

    /// Adds the edge if absent, removes it if present.
    pub fn toggle_edge(&mut self, raw: &[usize]) -> Result<()> {
        let e = normalize_edge(self.n, raw)?;
        if !self.edges.remove(&e) {
            self.edges.insert(e);
        }
        Ok(())
    }

    pub fn remove_edge(&mut self, e: &[usize]) -> bool {
        self.edges.remove(e)
    }

    pub fn edge_masks(&self) -> Vec<u64> {
        self.edges.iter().map(|e| vertices_mask(self.n, e)).collect()
    }

    pub fn k_max(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges containing vertex `v`.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.binary_search(&v).is_ok())
    }

    /// True iff vertices linked by edges of cardinality >= 2 form a single
    /// component spanning all `n` vertices.
    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in self.edges.iter().filter(|e| e.len() >= 2) {
            let r0 = find(&mut parent, e[0]);
            for &v in &e[1..] {
                let r = find(&mut parent, v);
                parent[r] = r0;
            }
        }
        let root = find(&mut parent, 1);
        (2..=self.n).all(|v| find(&mut parent, v) == root)
    }

    pub fn crossing_edges(&self, bp: &Bipartition) -> Vec<Edge> {
        let a = bp.mask_a();
        self.edges
            .iter()
            .filter(|e| {
                let m = vertices_mask(self.n, e);
                m & a != 0 && m & !a != 0
            })
            .cloned()
            .collect()
    }

    /// Relabels vertex `v` as `perm[v-1]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: perm.len() });
        }
        let mut seen = vec![false; self.n + 1];
        for &p in perm {
            if p == 0 || p > self.n || seen[p] {
                return Err(Error::Parse("not a permutation".into()));
            }
            seen[p] = true;
        }
        Self::canonicalize(
            self.edges.iter().map(|e| e.iter().map(|&v| perm[v - 1]).collect::<Vec<_>>()),
            self.n,
        )
    }

    /// Same edges on a larger vertex set.
    pub fn with_vertex_count(&self, n: usize) -> Result<Self> {
        Self::canonicalize(self.edges.iter(), n)
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}; edges=[", self.n)?;
        for (k, e) in self.edges.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (j, v) in e.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Parses `n=<int>; edges=[[i,j,...],...]`.
impl FromStr for Hypergraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = None;
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
            match key.trim() {
                "n" => n = Some(value.trim().parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
                "edges" => edges = Some(parse_edge_list(value)?),
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing n".into()))?;
        Self::canonicalize(edges.unwrap_or_default(), n)
    }
}

/// Parses a JSON-style edge list such as `[[1,2],[2,3,4]]`.
pub fn parse_edge_list(s: &str) -> Result<Vec<Vec<usize>>> {
    serde_json::from_str(s.trim()).map_err(|e| Error::Parse(format!("edge list: {e}")))
}

/// An unordered split `A|B` of `1..=n`, stored with vertex 1 in `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Bipartition {
    n: usize,
    part_a: Vec<usize>,
}

impl Bipartition {
    /// Builds the canonical bipartition for `part`, which may be either side.
    pub fn new(n: usize, part: &[usize]) -> Result<Self> {
        check_n(n)?;
        let mut a = part.to_vec();
        a.sort_unstable();
        a.dedup();
        if let Some(&v) = a.iter().find(|&&v| v == 0 || v > n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if a.is_empty() || a.len() == n {
            return Err(Error::InvalidBipartition(format!("{a:?} is not a proper subset of 1..={n}")));
        }
        if a[0] != 1 {
            a = (1..=n).filter(|v| a.binary_search(v).is_err()).collect();
        }
        Ok(Self { n, part_a: a })
    }

    /// All `2^(n-1) - 1` inequivalent bipartitions, ordered lexicographically
    /// by `part_a`.
    pub fn all(n: usize) -> Result<Vec<Self>> {
        if n < 2 {
            return Err(Error::TooFewVertices { n, min: 2 });
        }
        check_n(n)?;
        let top = vertex_bit(n, 1);
        let mut out: Vec<Self> = (0..top - 1)
            .map(|rest| Self { n, part_a: mask_vertices(n, top | rest) })
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn part_a(&self) -> &[usize] {
        &self.part_a
    }

    pub fn part_b(&self) -> Vec<usize> {
        (1..=self.n).filter(|v| self.part_a.binary_search(v).is_err()).collect()
    }

    pub fn mask_a(&self) -> u64 {
        vertices_mask(self.n, &self.part_a)
    }

    pub fn mask_b(&self) -> u64 {
        !self.mask_a() & ((1u64 << self.n) - 1)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.part_a.binary_search(&v).is_ok()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_side = |side: &[usize]| side.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}|{{{}}}", fmt_side(&self.part_a), fmt_side(&self.part_b()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn edges(h: &Hypergraph) -> Vec<Vec<usize>> {
        h.edge_list()
    }

    #[test]
    fn duplicate_edges_cancel() {
        let h = Hypergraph::canonicalize([vec![2, 1], vec![1, 2]], 2).unwrap();
        assert!(edges(&h).is_empty());
        let h = Hypergraph::canonicalize([vec![1, 2, 3], vec![3, 2, 1], vec![1]], 3).unwrap();
        assert_eq!(edges(&h), vec![vec![1]]);
    }

    #[test]
    fn canonical_input_is_kept() {
        let h = Hypergraph::canonicalize([vec![3, 4], vec![1, 2, 4, 5]], 5).unwrap();
        assert_eq!(edges(&h), vec![vec![1, 2, 4, 5], vec![3, 4]]);
    }

    #[test]
    fn canonicalize_errors() {
        assert_eq!(
            Hypergraph::canonicalize([vec![1, 4]], 3).unwrap_err(),
            Error::VertexOutOfRange { vertex: 4, n: 3 }
        );
        assert!(matches!(Hypergraph::canonicalize(Vec::<Vec<usize>>::new(), 0), Err(Error::TooFewVertices { .. })));
        assert_eq!(Hypergraph::canonicalize([Vec::<usize>::new()], 2).unwrap_err(), Error::EmptyEdge);
    }

    #[test]
    fn families_for_three_vertices() {
        let g = Hypergraph::family(Family::SingleMaxEdge, 3).unwrap();
        assert_eq!(edges(&g), vec![vec![1, 2, 3]]);
        let h = Hypergraph::family(Family::AllNminus1, 3).unwrap();
        assert_eq!(edges(&h), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        let h = Hypergraph::family(Family::AllGeNminus1, 3).unwrap();
        assert_eq!(edges(&h), vec![vec![1, 2], vec![1, 2, 3], vec![1, 3], vec![2, 3]]);
        assert!(Hypergraph::family(Family::SingleMaxEdge, 1).is_err());
        assert!(Hypergraph::family(Family::AllNminus1, 2).is_err());
    }

    #[test]
    fn family_edge_counts() {
        for n in 3..10 {
            assert_eq!(Hypergraph::family(Family::SingleMaxEdge, n).unwrap().num_edges(), 1);
            assert_eq!(Hypergraph::family(Family::AllNminus1, n).unwrap().num_edges(), n);
            assert_eq!(Hypergraph::family(Family::AllGeNminus1, n).unwrap().num_edges(), n + 1);
        }
    }

    #[test]
    fn connectivity() {
        assert!(Hypergraph::family(Family::SingleMaxEdge, 4).unwrap().is_connected());
        assert!(!Hypergraph::canonicalize([vec![1, 2]], 3).unwrap().is_connected());
        assert!(Hypergraph::canonicalize([vec![3, 4], vec![1, 2, 4, 5]], 5).unwrap().is_connected());
        // cardinality-1 edges do not connect anything
        assert!(!Hypergraph::canonicalize([vec![1, 2], vec![3]], 3).unwrap().is_connected());
        assert!(Hypergraph::empty(1).unwrap().is_connected());
    }

    #[test]
    fn k_max_and_crossing() {
        assert_eq!(Hypergraph::family(Family::AllGeNminus1, 5).unwrap().k_max(), 5);
        assert_eq!(Hypergraph::empty(3).unwrap().k_max(), 0);
        let h = Hypergraph::canonicalize([vec![3, 4], vec![1, 2, 4, 5]], 5).unwrap();
        let bp = Bipartition::new(5, &[1, 2, 3]).unwrap();
        assert_eq!(h.crossing_edges(&bp).len(), 2);
        let h = Hypergraph::canonicalize([vec![1, 2]], 3).unwrap();
        let bp = Bipartition::new(3, &[1, 2]).unwrap();
        assert!(h.crossing_edges(&bp).is_empty());
    }

    #[test]
    fn bipartitions_are_canonical() {
        let bp = Bipartition::new(4, &[3, 2]).unwrap();
        assert_eq!(bp.part_a(), &[1, 4]);
        assert_eq!(bp.part_b(), vec![2, 3]);
        for n in 2..9 {
            let all = Bipartition::all(n).unwrap();
            assert_eq!(all.len(), (1 << (n - 1)) - 1);
            assert!(all.iter().all(|b| b.part_a()[0] == 1));
            assert!(all.windows(2).all(|w| w[0].part_a() < w[1].part_a()));
        }
        assert!(Bipartition::new(3, &[1, 2, 3]).is_err());
        assert!(Bipartition::new(3, &[]).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let h: Hypergraph = "n=5; edges=[[4,3],[1,2,4,5]]".parse().unwrap();
        assert_eq!(h.to_string(), "n=5; edges=[[1,2,4,5],[3,4]]");
        assert_eq!(h.to_string().parse::<Hypergraph>().unwrap(), h);
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, r#"{"n":5,"edges":[[1,2,4,5],[3,4]]}"#);
        assert_eq!(serde_json::from_str::<Hypergraph>(&json).unwrap(), h);
        assert!("edges=[[1]]".parse::<Hypergraph>().is_err());
    }

    #[test]
    fn family_is_permutation_invariant() {
        let h = Hypergraph::family(Family::AllNminus1, 5).unwrap();
        assert_eq!(h.permuted(&[3, 1, 5, 2, 4]).unwrap(), h);
    }

    fn raw_edges(n: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
        prop::collection::vec(prop::collection::vec(1..=n, 1..=n), 0..12)
    }

    proptest! {
        #[test]
        fn canonicalize_is_order_insensitive_and_idempotent(mut raw in raw_edges(6), seed in any::<u64>()) {
            let h = Hypergraph::canonicalize(&raw, 6).unwrap();
            let again = Hypergraph::canonicalize(h.edges(), 6).unwrap();
            prop_assert_eq!(&again, &h);
            // deterministic shuffle
            let len = raw.len();
            for i in (1..len).rev() {
                let j = (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize;
                raw.swap(i, j);
            }
            for e in raw.iter_mut() {
                e.reverse();
            }
            prop_assert_eq!(Hypergraph::canonicalize(&raw, 6).unwrap(), h);
        }

        #[test]
        fn double_toggle_is_identity(raw in raw_edges(5), e in prop::collection::vec(1usize..=5, 1..=5)) {
            let h = Hypergraph::canonicalize(&raw, 5).unwrap();
            let mut t = h.clone();
            t.toggle_edge(&e).unwrap();
            t.toggle_edge(&e).unwrap();
            prop_assert_eq!(t, h);
        }
    }
}
