//! Bigraphs: a vertex set carrying a reflexive directed edge set `E1` and an
//! irreflexive symmetric edge set `E2`.
//!
//! Vertices are opaque string ids, densely indexed in insertion order. All
//! queries take dense indices; the string ids only matter at the I/O boundary.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The relation between an ordered pair of distinct vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairKind {
    Boolean,
    Monotone,
    AntiMonotone,
    Free,
    Tensor,
}

impl PairKind {
    pub const ALL: [PairKind; 5] = [
        PairKind::Boolean,
        PairKind::Monotone,
        PairKind::AntiMonotone,
        PairKind::Free,
        PairKind::Tensor,
    ];

    /// The kind of the reversed pair.
    pub fn mirror(self) -> PairKind {
        match self {
            PairKind::Monotone => PairKind::AntiMonotone,
            PairKind::AntiMonotone => PairKind::Monotone,
            k => k,
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PairKind::Boolean => "boolean",
            PairKind::Monotone => "monotone",
            PairKind::AntiMonotone => "anti-monotone",
            PairKind::Free => "free",
            PairKind::Tensor => "tensor",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bigraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    e1: Vec<bool>,
    e2: Vec<bool>,
}

fn index_names(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::DuplicateVertex(name.clone()));
        }
    }
    Ok(index)
}

impl Bigraph {
    /// Validates raw edge lists. A missing diagonal entry in `edges1` is an
    /// error rather than something to repair.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges1: &[(S, S)], edges2: &[(S, S)]) -> Result<Bigraph> {
        let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let n = names.len();
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| Error::UnknownVertex(s.as_ref().to_string()))
        };
        let mut e1 = vec![false; n * n];
        let mut e2 = vec![false; n * n];
        for (a, b) in edges1 {
            let (i, j) = (lookup(a)?, lookup(b)?);
            e1[i * n + j] = true;
        }
        for (a, b) in edges2 {
            let (i, j) = (lookup(a)?, lookup(b)?);
            if i == j {
                return Err(Error::SelfLoopInE2(names[i].clone()));
            }
            e2[i * n + j] = true;
            e2[j * n + i] = true;
        }
        for i in 0..n {
            if !e1[i * n + i] {
                return Err(Error::DiagonalMissing(names[i].clone()));
            }
        }
        Ok(Bigraph { names, index, e1, e2 })
    }

    /// Builds a bigraph from dense adjacency predicates. The diagonal of `E1`
    /// is forced on and the diagonal of `E2` forced off; `E2` is symmetrised.
    pub fn from_fn(
        names: Vec<String>,
        e1: impl Fn(usize, usize) -> bool,
        e2: impl Fn(usize, usize) -> bool,
    ) -> Result<Bigraph> {
        let index = index_names(&names)?;
        let n = names.len();
        let mut m1 = vec![false; n * n];
        let mut m2 = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                m1[i * n + j] = i == j || e1(i, j);
                m2[i * n + j] = i != j && (e2(i, j) || e2(j, i));
            }
        }
        Ok(Bigraph {
            names,
            index,
            e1: m1,
            e2: m2,
        })
    }

    /// The one-vertex bigraph `({v}, {(v,v)}, ∅)`.
    pub fn singleton(name: &str) -> Bigraph {
        Bigraph::from_fn(vec![name.to_string()], |_, _| true, |_, _| false).expect("single name is unique")
    }

    /// The operad identity: one vertex named `1`.
    pub fn identity() -> Bigraph {
        Bigraph::singleton("1")
    }

    /// Default vertex names `v1, v2, …`.
    pub fn default_names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("v{i}")).collect()
    }

    /// A bigraph on `n` vertices where every unordered pair gets the same kind
    /// (for `Monotone`, the lower index is the source).
    pub fn uniform(n: usize, kind: PairKind) -> Bigraph {
        let mut kinds = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                kinds.insert((i, j), kind);
            }
        }
        Bigraph::from_pairwise_indexed(Bigraph::default_names(n), &kinds).expect("uniform kinds are consistent")
    }

    /// A random bigraph with `n` vertices: each unordered pair gets one of the
    /// five kinds uniformly.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Bigraph {
        let mut kinds = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                kinds.insert((i, j), PairKind::ALL[rng.random_range(0..5)]);
            }
        }
        Bigraph::from_pairwise_indexed(Bigraph::default_names(n), &kinds).expect("random kinds are consistent")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    /// Resolves a list of vertex names to dense indices.
    pub fn coloring<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|s| self.index_of(s.as_ref())).collect()
    }

    #[inline]
    pub fn e1(&self, v: usize, w: usize) -> bool {
        self.e1[v * self.len() + w]
    }

    #[inline]
    pub fn e2(&self, v: usize, w: usize) -> bool {
        self.e2[v * self.len() + w]
    }

    /// `(v,w) ∈ E2 ∪ Δ`.
    #[inline]
    pub fn e2_or_diag(&self, v: usize, w: usize) -> bool {
        v == w || self.e2(v, w)
    }

    /// Tensor relation: `E2 ∩ E1 ∩ Ē1`.
    #[inline]
    pub fn is_tensor(&self, v: usize, w: usize) -> bool {
        self.e2(v, w) && self.e1(v, w) && self.e1(w, v)
    }

    pub fn is_e1_full(&self) -> bool {
        self.e1.iter().all(|&b| b)
    }

    /// `E2 ⊇ E1 ∩ Ē1 ∖ Δ`: every two-way `E1` pair is tensor.
    pub fn is_bmt_regime(&self) -> bool {
        let n = self.len();
        (0..n).all(|v| (0..n).all(|w| v == w || !(self.e1(v, w) && self.e1(w, v)) || self.e2(v, w)))
    }

    pub fn classify_pair(&self, v: usize, w: usize) -> Result<PairKind> {
        if v == w {
            return Err(Error::SamePair(self.names[v].clone()));
        }
        Ok(match (self.e1(v, w), self.e1(w, v)) {
            (false, false) => PairKind::Boolean,
            (true, false) => PairKind::Monotone,
            (false, true) => PairKind::AntiMonotone,
            (true, true) if self.e2(v, w) => PairKind::Tensor,
            (true, true) => PairKind::Free,
        })
    }

    pub fn classify_names(&self, v: &str, w: &str) -> Result<PairKind> {
        self.classify_pair(self.index_of(v)?, self.index_of(w)?)
    }

    /// Drops the `E2` edges that are not backed by `E1` in both directions.
    pub fn normalize_e2(&self) -> Bigraph {
        let mut g = self.clone();
        let n = self.len();
        for v in 0..n {
            for w in 0..n {
                g.e2[v * n + w] = self.e2(v, w) && self.e1(v, w) && self.e1(w, v);
            }
        }
        g
    }

    /// The sub-bigraph induced on `subset` (dense indices, in the given order).
    pub fn induced_subbigraph(&self, subset: &[usize]) -> Result<Bigraph> {
        for &v in subset {
            if v >= self.len() {
                return Err(Error::UnknownVertex(format!("#{v}")));
            }
        }
        let names = subset.iter().map(|&v| self.names[v].clone()).collect();
        Bigraph::from_fn(
            names,
            |i, j| self.e1(subset[i], subset[j]),
            |i, j| self.e2(subset[i], subset[j]),
        )
    }

    pub fn induced_by_names<S: AsRef<str>>(&self, subset: &[S]) -> Result<Bigraph> {
        let idx = self.coloring(subset)?;
        self.induced_subbigraph(&idx)
    }

    /// Builds the canonical bigraph realising a table of pairwise kinds:
    /// `E1 = E_mono ∪ E_free ∪ E_ten ∪ Δ`, `E2 = E_ten`.
    pub fn from_pairwise<S: AsRef<str>>(
        vertices: &[S],
        kinds: &BTreeMap<(String, String), PairKind>,
    ) -> Result<Bigraph> {
        let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let mut indexed = BTreeMap::new();
        for ((a, b), &k) in kinds {
            let i = *index.get(a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let j = *index.get(b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if i == j {
                return Err(Error::SamePair(a.clone()));
            }
            let (key, kind) = if i < j { ((i, j), k) } else { ((j, i), k.mirror()) };
            if let Some(prev) = indexed.insert(key, kind) {
                if prev != kind {
                    return Err(Error::InconsistentKinds(a.clone(), b.clone()));
                }
            }
        }
        Bigraph::from_pairwise_indexed(names, &indexed)
    }

    /// Same as [`Bigraph::from_pairwise`] with kinds keyed by `(i, j)`, `i < j`.
    /// Missing pairs default to `Boolean`.
    pub fn from_pairwise_indexed(names: Vec<String>, kinds: &BTreeMap<(usize, usize), PairKind>) -> Result<Bigraph> {
        let kind_of = |v: usize, w: usize| -> PairKind {
            if v < w {
                kinds.get(&(v, w)).copied().unwrap_or(PairKind::Boolean)
            } else {
                kinds.get(&(w, v)).copied().unwrap_or(PairKind::Boolean).mirror()
            }
        };
        Bigraph::from_fn(
            names,
            |v, w| matches!(kind_of(v, w), PairKind::Monotone | PairKind::Free | PairKind::Tensor),
            |v, w| kind_of(v, w) == PairKind::Tensor,
        )
    }

    /// Operad composition `outer(inner_1, …, inner_m)`. Inner vertex names are
    /// kept when they are globally distinct, otherwise they are prefixed with
    /// the outer vertex name as `outer.inner`.
    pub fn operad_compose(outer: &Bigraph, inner: &[Bigraph]) -> Result<Bigraph> {
        if outer.len() != inner.len() {
            return Err(Error::ArityMismatch {
                expected: outer.len(),
                got: inner.len(),
            });
        }
        let mut block = Vec::new();
        let mut local = Vec::new();
        for (j, g) in inner.iter().enumerate() {
            for i in 0..g.len() {
                block.push(j);
                local.push(i);
            }
        }
        let raw: Vec<String> = block
            .iter()
            .zip(&local)
            .map(|(&j, &i)| inner[j].names[i].clone())
            .collect();
        let distinct: BTreeSet<&String> = raw.iter().collect();
        let names = if distinct.len() == raw.len() {
            raw
        } else {
            block
                .iter()
                .zip(&local)
                .map(|(&j, &i)| format!("{}.{}", outer.names[j], inner[j].names[i]))
                .collect()
        };
        let edge = |x: usize, y: usize, second: bool| -> bool {
            let (jx, jy) = (block[x], block[y]);
            if jx == jy {
                let g = &inner[jx];
                if second {
                    g.e2(local[x], local[y])
                } else {
                    g.e1(local[x], local[y])
                }
            } else if second {
                outer.e2(jx, jy)
            } else {
                outer.e1(jx, jy)
            }
        };
        Bigraph::from_fn(names, |x, y| edge(x, y, false), |x, y| edge(x, y, true))
    }

    /// Right action of a permutation (one-line, 0-based): `(i,j)` is an edge of
    /// the result exactly when `(σ(i),σ(j))` is an edge of `self`. Vertex names
    /// stay attached to positions.
    pub fn permute(&self, sigma: &[usize]) -> Result<Bigraph> {
        let n = self.len();
        let mut seen = vec![false; n];
        if sigma.len() != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: sigma.len(),
            });
        }
        for &s in sigma {
            if s >= n || seen[s] {
                return Err(Error::Parse("not a permutation".into()));
            }
            seen[s] = true;
        }
        Bigraph::from_fn(
            self.names.clone(),
            |i, j| self.e1(sigma[i], sigma[j]),
            |i, j| self.e2(sigma[i], sigma[j]),
        )
    }

    /// Same adjacency by dense index, ignoring names.
    pub fn same_structure(&self, other: &Bigraph) -> bool {
        self.e1 == other.e1 && self.e2 == other.e2
    }

    /// The site model with sites `V × V` whose induced bigraph is `self`.
    pub fn realize_sites(&self) -> SiteModel {
        let n = self.len();
        let site = |a: usize, b: usize| a * n + b;
        let sites = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| format!("({},{})", self.names[a], self.names[b]))
            .collect();
        let mut s1 = Vec::with_capacity(n);
        let mut s2 = Vec::with_capacity(n);
        for v in 0..n {
            let mut a = BTreeSet::new();
            for w in 0..n {
                if !self.e2(v, w) {
                    a.insert(site(v, w));
                    a.insert(site(w, v));
                }
            }
            let mut p = BTreeSet::new();
            for w in 0..n {
                if !self.e1(w, v) {
                    p.insert(site(w, w));
                }
            }
            s1.push(a.into_iter().collect());
            s2.push(p.into_iter().collect());
        }
        SiteModel {
            sites,
            vertices: self.names.clone(),
            s1,
            s2,
        }
    }

    pub fn to_json(&self) -> BigraphJson {
        let n = self.len();
        let mut edges1 = Vec::new();
        let mut edges2 = Vec::new();
        for v in 0..n {
            for w in 0..n {
                if self.e1(v, w) {
                    edges1.push((self.names[v].clone(), self.names[w].clone()));
                }
                if self.e2(v, w) {
                    edges2.push((self.names[v].clone(), self.names[w].clone()));
                }
            }
        }
        BigraphJson {
            vertices: self.names.clone(),
            edges1,
            edges2,
        }
    }

    pub fn from_json(j: &BigraphJson) -> Result<Bigraph> {
        Bigraph::new(&j.vertices, &j.edges1, &j.edges2)
    }

    pub fn from_json_str(s: &str) -> Result<Bigraph> {
        let j: BigraphJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Bigraph::from_json(&j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("plain data serializes")
    }
}

impl fmt::Display for Bigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        writeln!(f, "bigraph on {} vertices", n)?;
        for v in 0..n {
            for w in (v + 1)..n {
                let k = self.classify_pair(v, w).expect("distinct");
                writeln!(f, "  ({}, {}): {}", self.names[v], self.names[w], k)?;
            }
        }
        Ok(())
    }
}

/// Serialized bigraph. `edges2` is emitted in both orientations and accepted in
/// either.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigraphJson {
    pub vertices: Vec<String>,
    pub edges1: Vec<(String, String)>,
    #[serde(default)]
    pub edges2: Vec<(String, String)>,
}

/// How a vertex uses one tensor site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteRole {
    /// The vertex's algebra acts on this site.
    Active,
    /// The site is compressed to the vacuum.
    Projected,
    /// The site is left alone.
    Idle,
}

/// Per-vertex tripartition of a finite set of tensor sites. The idle sets are
/// the complement of the active and projected ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteModel {
    pub sites: Vec<String>,
    pub vertices: Vec<String>,
    /// Active site indices per vertex, sorted.
    pub s1: Vec<Vec<usize>>,
    /// Projected site indices per vertex, sorted.
    pub s2: Vec<Vec<usize>>,
}

impl SiteModel {
    /// Checks the tripartition; `s1` and `s2` must be disjoint and inside the
    /// site range.
    pub fn new(
        sites: Vec<String>,
        vertices: Vec<String>,
        s1: Vec<Vec<usize>>,
        s2: Vec<Vec<usize>>,
    ) -> Result<SiteModel> {
        let m = SiteModel {
            sites,
            vertices,
            s1,
            s2,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        index_names(&self.vertices)?;
        if self.s1.len() != self.vertices.len() || self.s2.len() != self.vertices.len() {
            return Err(Error::InvalidSiteModel("one s1/s2 entry per vertex".into()));
        }
        for v in 0..self.vertices.len() {
            let a: BTreeSet<usize> = self.s1[v].iter().copied().collect();
            let p: BTreeSet<usize> = self.s2[v].iter().copied().collect();
            if a.len() != self.s1[v].len() || p.len() != self.s2[v].len() {
                return Err(Error::InvalidSiteModel("repeated site".into()));
            }
            if a.iter().chain(p.iter()).any(|&s| s >= self.sites.len()) {
                return Err(Error::InvalidSiteModel("site index out of range".into()));
            }
            if a.intersection(&p).next().is_some() {
                return Err(Error::InvalidSiteModel(format!(
                    "active and projected sites overlap for `{}`",
                    self.vertices[v]
                )));
            }
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn role(&self, v: usize, s: usize) -> SiteRole {
        if self.s1[v].binary_search(&s).is_ok() {
            SiteRole::Active
        } else if self.s2[v].binary_search(&s).is_ok() {
            SiteRole::Projected
        } else {
            SiteRole::Idle
        }
    }

    pub fn s3(&self, v: usize) -> Vec<usize> {
        (0..self.n_sites())
            .filter(|&s| self.role(v, s) == SiteRole::Idle)
            .collect()
    }

    /// `E1 = {(v,w) : S1_v ∩ S2_w = ∅}`, `E2 = {(v,w) : S1_v ∩ S1_w = ∅}`.
    pub fn bigraph(&self) -> Result<Bigraph> {
        for v in 0..self.n_vertices() {
            if self.s1[v].is_empty() {
                return Err(Error::EmptyS1(self.vertices[v].clone()));
            }
        }
        let disjoint = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_err());
        Bigraph::from_fn(
            self.vertices.clone(),
            |v, w| disjoint(&self.s1[v], &self.s2[w]),
            |v, w| disjoint(&self.s1[v], &self.s1[w]),
        )
    }

    pub fn to_json(&self) -> SiteModelJson {
        let by_vertex = |sets: &Vec<Vec<usize>>| -> BTreeMap<String, Vec<String>> {
            self.vertices
                .iter()
                .zip(sets)
                .map(|(v, s)| (v.clone(), s.iter().map(|&i| self.sites[i].clone()).collect()))
                .collect()
        };
        let s3: Vec<Vec<usize>> = (0..self.n_vertices()).map(|v| self.s3(v)).collect();
        SiteModelJson {
            sites: self.sites.clone(),
            vertices: Some(self.vertices.clone()),
            s1: by_vertex(&self.s1),
            s2: by_vertex(&self.s2),
            s3: Some(by_vertex(&s3)),
        }
    }

    pub fn from_json(j: &SiteModelJson) -> Result<SiteModel> {
        let site_index = index_names(&j.sites)?;
        let vertices: Vec<String> = match &j.vertices {
            Some(v) => v.clone(),
            None => j.s1.keys().cloned().collect(),
        };
        let resolve = |map: &BTreeMap<String, Vec<String>>, v: &str| -> Result<Vec<usize>> {
            let mut out: Vec<usize> = map
                .get(v)
                .map(|list| {
                    list.iter()
                        .map(|s| {
                            site_index
                                .get(s)
                                .copied()
                                .ok_or_else(|| Error::InvalidSiteModel(format!("unknown site `{s}`")))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?
                .unwrap_or_default();
            out.sort_unstable();
            Ok(out)
        };
        for key in j.s1.keys().chain(j.s2.keys()) {
            if !vertices.contains(key) {
                return Err(Error::UnknownVertex(key.clone()));
            }
        }
        let mut s1 = Vec::new();
        let mut s2 = Vec::new();
        for v in &vertices {
            s1.push(resolve(&j.s1, v)?);
            s2.push(resolve(&j.s2, v)?);
        }
        let m = SiteModel::new(j.sites.clone(), vertices, s1, s2)?;
        if let Some(s3) = &j.s3 {
            for (v, name) in m.vertices.iter().enumerate() {
                if s3.contains_key(name) && resolve(s3, name)? != m.s3(v) {
                    return Err(Error::InvalidSiteModel(format!(
                        "s3 of `{name}` is not the complement of s1 and s2"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn from_json_str(s: &str) -> Result<SiteModel> {
        let j: SiteModelJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        SiteModel::from_json(&j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteModelJson {
    pub sites: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<String>>,
    pub s1: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub s2: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s3: Option<BTreeMap<String, Vec<String>>>,
}
