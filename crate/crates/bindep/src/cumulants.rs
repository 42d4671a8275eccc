//! Moment–cumulant transforms and joint moments of bigraph-independent
//! variables.
//!
//! Variables are referred to by integer handles. A [`MomentFunctional`]
//! returns the moment of an ordered word of handles that all live at one
//! vertex; joint moments of mixed words are then assembled from partitioned
//! cumulants over the compatible partitions of the bigraph.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::bigraph::Bigraph;
use crate::compat::{enumerate_compatible, enumerate_irreducible, kernel_partition, CompatClass, Composition};
use crate::error::{guard, Error, Result};
use crate::ncps::{AlgebraElement, AlgebraState, CMatrix, C64};
use crate::partitions::{enumerate_all, enumerate_interval, enumerate_nc, kreweras, moebius_nc_full, SetPartition};

/// Longest tuple accepted by cumulant and joint-moment evaluation.
pub const MAX_CUMULANT_ORDER: usize = 10;

/// Moments of words at a single vertex.
pub trait MomentFunctional {
    /// Moment of the ordered product of `handles`, all living at `vertex`.
    /// The empty word has moment 1.
    fn moment(&self, vertex: usize, handles: &[usize]) -> C64;

    /// The vertex a handle lives at, when known.
    fn vertex_of(&self, _handle: usize) -> Option<usize> {
        None
    }
}

impl<T: MomentFunctional + ?Sized> MomentFunctional for &T {
    fn moment(&self, vertex: usize, handles: &[usize]) -> C64 {
        (**self).moment(vertex, handles)
    }

    fn vertex_of(&self, handle: usize) -> Option<usize> {
        (**self).vertex_of(handle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CumulantKind {
    /// Non-crossing partitions.
    Free,
    /// Interval partitions.
    Boolean,
    /// All partitions.
    Classical,
}

impl CumulantKind {
    pub const ALL: [CumulantKind; 3] = [CumulantKind::Free, CumulantKind::Boolean, CumulantKind::Classical];

    /// The compatible class whose partitions carry this cumulant kind in the
    /// joint-moment formula.
    pub fn class(self) -> CompatClass {
        match self {
            CumulantKind::Free => CompatClass::Full,
            CumulantKind::Boolean => CompatClass::Zero,
            CumulantKind::Classical => CompatClass::Tilde,
        }
    }
}

impl std::str::FromStr for CumulantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<CumulantKind> {
        match s.to_ascii_lowercase().as_str() {
            "free" => Ok(CumulantKind::Free),
            "boolean" | "bool" => Ok(CumulantKind::Boolean),
            "classical" | "class" => Ok(CumulantKind::Classical),
            other => Err(Error::Parse(format!("unknown cumulant kind `{other}`"))),
        }
    }
}

/// `μ(π, 1̂)` in the lattice of the given kind.
pub fn moebius_to_top(kind: CumulantKind, p: &SetPartition) -> i64 {
    let m = p.num_blocks() as i64;
    let sign = if m % 2 == 1 { 1 } else { -1 };
    match kind {
        CumulantKind::Free => kreweras(p)
            .expect("free lattice elements are non-crossing")
            .blocks()
            .iter()
            .map(|b| moebius_nc_full(b.len()))
            .product(),
        CumulantKind::Boolean => sign,
        CumulantKind::Classical => sign * (1..m).product::<i64>(),
    }
}

/// The lattice of the kind on `n` points with Möbius weights to the top.
pub fn lattice(kind: CumulantKind, n: usize) -> Result<Vec<(SetPartition, i64)>> {
    let parts: Vec<SetPartition> = match kind {
        CumulantKind::Free => enumerate_nc(n)?.collect(),
        CumulantKind::Boolean => enumerate_interval(n)?,
        CumulantKind::Classical => enumerate_all(n)?.collect(),
    };
    Ok(parts
        .into_iter()
        .map(|p| {
            let mu = moebius_to_top(kind, &p);
            (p, mu)
        })
        .collect())
}

/// Memoised cumulant evaluation on top of a moment functional.
pub struct CumulantCache<'a> {
    phi: &'a dyn MomentFunctional,
    lattices: RefCell<HashMap<(CumulantKind, usize), std::rc::Rc<Vec<(SetPartition, i64)>>>>,
    values: RefCell<HashMap<(CumulantKind, usize, Vec<usize>), C64>>,
}

impl<'a> CumulantCache<'a> {
    pub fn new(phi: &'a dyn MomentFunctional) -> CumulantCache<'a> {
        CumulantCache {
            phi,
            lattices: RefCell::new(HashMap::new()),
            values: RefCell::new(HashMap::new()),
        }
    }

    fn lattice(&self, kind: CumulantKind, n: usize) -> Result<std::rc::Rc<Vec<(SetPartition, i64)>>> {
        if let Some(l) = self.lattices.borrow().get(&(kind, n)) {
            return Ok(l.clone());
        }
        let l = std::rc::Rc::new(lattice(kind, n)?);
        self.lattices.borrow_mut().insert((kind, n), l.clone());
        Ok(l)
    }

    /// `K_n[handles]` at one vertex, by Möbius inversion.
    pub fn cumulant(&self, kind: CumulantKind, vertex: usize, handles: &[usize]) -> Result<C64> {
        guard("cumulant order", handles.len(), MAX_CUMULANT_ORDER)?;
        let key = (kind, vertex, handles.to_vec());
        if let Some(&v) = self.values.borrow().get(&key) {
            return Ok(v);
        }
        let n = handles.len();
        let value = if n == 1 {
            self.phi.moment(vertex, handles)
        } else {
            let mut acc = C64::new(0.0, 0.0);
            let mut word = Vec::with_capacity(n);
            for (p, mu) in self.lattice(kind, n)?.iter() {
                let mut prod = C64::new(*mu as f64, 0.0);
                for block in p.blocks() {
                    word.clear();
                    word.extend(block.iter().map(|&i| handles[i]));
                    prod *= self.phi.moment(vertex, &word);
                }
                acc += prod;
            }
            acc
        };
        self.values.borrow_mut().insert(key, value);
        Ok(value)
    }

    /// Product of block cumulants, arguments in ascending order inside each
    /// block.
    pub fn partitioned(
        &self,
        kind: CumulantKind,
        p: &SetPartition,
        colors: &[usize],
        handles: &[usize],
    ) -> Result<C64> {
        p.check_monochromatic(colors)?;
        let mut prod = C64::new(1.0, 0.0);
        let mut word = Vec::new();
        for block in p.blocks() {
            word.clear();
            word.extend(block.iter().map(|&i| handles[i]));
            prod *= self.cumulant(kind, colors[block[0]], &word)?;
        }
        Ok(prod)
    }
}

/// Single-vertex cumulant of the given kind.
pub fn cumulant(kind: CumulantKind, phi: &dyn MomentFunctional, vertex: usize, handles: &[usize]) -> Result<C64> {
    CumulantCache::new(phi).cumulant(kind, vertex, handles)
}

/// `∏_{B∈π} K_{|B|}(a_j : j ∈ B)`.
pub fn partitioned_cumulant(
    kind: CumulantKind,
    phi: &dyn MomentFunctional,
    p: &SetPartition,
    colors: &[usize],
    handles: &[usize],
) -> Result<C64> {
    CumulantCache::new(phi).partitioned(kind, p, colors, handles)
}

fn check_word(colors: &[usize], handles: &[usize], phi: &dyn MomentFunctional, g: &Bigraph) -> Result<()> {
    guard("word length", colors.len(), MAX_CUMULANT_ORDER)?;
    if colors.len() != handles.len() {
        return Err(Error::DimMismatch {
            expected: colors.len(),
            got: handles.len(),
        });
    }
    for (j, (&c, &h)) in colors.iter().zip(handles).enumerate() {
        if c >= g.len() {
            return Err(Error::UnknownVertex(format!("#{c}")));
        }
        if let Some(v) = phi.vertex_of(h) {
            if v != c {
                return Err(Error::VertexMismatch {
                    index: j + 1,
                    expected: g.name(c).to_string(),
                    found: g.names().get(v).cloned().unwrap_or_else(|| format!("#{v}")),
                });
            }
        }
    }
    Ok(())
}

/// Sum of `K^kind_π` over the class matched to `kind`.
fn class_sum(
    cache: &CumulantCache<'_>,
    partitions: &[SetPartition],
    kind: CumulantKind,
    colors: &[usize],
    handles: &[usize],
) -> Result<C64> {
    let terms: Result<Vec<C64>> = partitions
        .iter()
        .map(|p| cache.partitioned(kind, p, colors, handles))
        .collect();
    Ok(pairwise_sum(&terms?))
}

/// Pairwise summation in a fixed order.
pub fn pairwise_sum(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Joint moment of a mixed word: free cumulants over the full class,
/// Boolean cumulants over the zero class, or classical cumulants over the
/// tilde class.
pub fn joint_moment(
    g: &Bigraph,
    colors: &[usize],
    handles: &[usize],
    phi: &dyn MomentFunctional,
    basis: CumulantKind,
) -> Result<C64> {
    Ok(joint_moment_counted(g, colors, handles, phi, basis)?.0)
}

/// [`joint_moment`] together with the number of partitions summed.
pub fn joint_moment_counted(
    g: &Bigraph,
    colors: &[usize],
    handles: &[usize],
    phi: &dyn MomentFunctional,
    basis: CumulantKind,
) -> Result<(C64, usize)> {
    check_word(colors, handles, phi, g)?;
    let parts = enumerate_compatible(colors, g, basis.class())?;
    let cache = CumulantCache::new(phi);
    Ok((class_sum(&cache, &parts, basis, colors, handles)?, parts.len()))
}

/// Boolean cumulant of a mixed tuple as the sum of free cumulants over the
/// irreducible members of the full class.
pub fn mixed_boolean_cumulant(
    g: &Bigraph,
    colors: &[usize],
    handles: &[usize],
    phi: &dyn MomentFunctional,
) -> Result<C64> {
    check_word(colors, handles, phi, g)?;
    let parts = enumerate_irreducible(colors, g, CompatClass::Full)?;
    class_sum(&CumulantCache::new(phi), &parts, CumulantKind::Free, colors, handles)
}

/// Boolean cumulant of a mixed tuple by interval Möbius inversion of joint
/// moments of its consecutive sub-words.
pub fn mixed_boolean_cumulant_via_moments(
    g: &Bigraph,
    colors: &[usize],
    handles: &[usize],
    phi: &dyn MomentFunctional,
) -> Result<C64> {
    check_word(colors, handles, phi, g)?;
    let k = colors.len();
    let mut memo: HashMap<(usize, usize), C64> = HashMap::new();
    let mut acc = C64::new(0.0, 0.0);
    for p in enumerate_interval(k)? {
        let mut prod = C64::new(moebius_to_top(CumulantKind::Boolean, &p) as f64, 0.0);
        for b in p.blocks() {
            let (lo, hi) = (b[0], b[b.len() - 1] + 1);
            let v = match memo.get(&(lo, hi)) {
                Some(&v) => v,
                None => {
                    let v = joint_moment(g, &colors[lo..hi], &handles[lo..hi], phi, CumulantKind::Free)?;
                    memo.insert((lo, hi), v);
                    v
                }
            };
            prod *= v;
        }
        acc += prod;
    }
    Ok(acc)
}

/// Moment in the Boolean–monotone–tensor regime: the product over blocks of
/// the kernel partition of the ordered block moments.
pub fn bmt_moment(g: &Bigraph, colors: &[usize], handles: &[usize], phi: &dyn MomentFunctional) -> Result<C64> {
    if !g.is_bmt_regime() {
        return Err(Error::NotBMTRegime);
    }
    check_word(colors, handles, phi, g)?;
    let ker = kernel_partition(colors, g);
    let mut prod = C64::new(1.0, 0.0);
    for b in ker.blocks() {
        let word: Vec<usize> = b.iter().map(|&i| handles[i]).collect();
        prod *= phi.moment(colors[b[0]], &word);
    }
    Ok(prod)
}

/// Moment when `E1` is full: free cumulants over partitions finer than the
/// color kernel whose crossing blocks have colors joined in `E2`.
pub fn epsilon_moment(g: &Bigraph, colors: &[usize], handles: &[usize], phi: &dyn MomentFunctional) -> Result<C64> {
    if !g.is_e1_full() {
        return Err(Error::NotEpsilonRegime);
    }
    check_word(colors, handles, phi, g)?;
    let k = colors.len();
    let cache = CumulantCache::new(phi);
    let mut terms = Vec::new();
    for p in enumerate_all(k)? {
        if p.check_monochromatic(colors).is_err() {
            continue;
        }
        let m = p.num_blocks();
        let ok = (0..m).all(|a| {
            ((a + 1)..m).all(|b| !p.crosses(a, b) || g.e2(colors[p.blocks()[a][0]], colors[p.blocks()[b][0]]))
        });
        if ok {
            terms.push(cache.partitioned(CumulantKind::Free, &p, colors, handles)?);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Moments of products of consecutive runs: handle `r` stands for the
/// product of the handles in `runs[r]`.
pub struct RunProducts<'a> {
    pub phi: &'a dyn MomentFunctional,
    pub runs: Vec<Vec<usize>>,
}

impl MomentFunctional for RunProducts<'_> {
    fn moment(&self, vertex: usize, handles: &[usize]) -> C64 {
        let word: Vec<usize> = handles.iter().flat_map(|&r| self.runs[r].iter().copied()).collect();
        self.phi.moment(vertex, &word)
    }
}

/// Both sides of the product formula. The word `colors`/`handles` is cut
/// into consecutive runs of the given sizes, each run at one vertex; the left
/// side sums free cumulants of the individual factors over the full class of
/// the long word, the right side sums free cumulants of the run products over
/// the full class of the short word.
pub fn product_formula_check(
    g: &Bigraph,
    colors: &[usize],
    run_sizes: &[usize],
    handles: &[usize],
    phi: &dyn MomentFunctional,
) -> Result<(C64, C64)> {
    if run_sizes.iter().sum::<usize>() != colors.len() || run_sizes.contains(&0) {
        return Err(Error::DimMismatch {
            expected: colors.len(),
            got: run_sizes.iter().sum(),
        });
    }
    let mut runs = Vec::new();
    let mut short_colors = Vec::new();
    let mut start = 0;
    for &s in run_sizes {
        let run = &colors[start..start + s];
        if run.iter().any(|&c| c != run[0]) {
            return Err(Error::NotMonochromatic);
        }
        short_colors.push(run[0]);
        runs.push(handles[start..start + s].to_vec());
        start += s;
    }
    let lhs = joint_moment(g, colors, handles, phi, CumulantKind::Free)?;
    let products = RunProducts { phi, runs };
    let short_handles: Vec<usize> = (0..run_sizes.len()).collect();
    let rhs = joint_moment(g, &short_colors, &short_handles, &products, CumulantKind::Free)?;
    Ok((lhs, rhs))
}

/// Moments of one inner group of a composition, seen as a single algebra:
/// the joint moment of the inner word under the inner bigraph.
pub struct GroupMoments<'a> {
    pub comp: &'a Composition,
    /// Composed vertex of every handle.
    pub handle_vertex: &'a [usize],
    pub phi: &'a dyn MomentFunctional,
    cache: RefCell<HashMap<(usize, Vec<usize>), C64>>,
}

impl<'a> GroupMoments<'a> {
    pub fn new(comp: &'a Composition, handle_vertex: &'a [usize], phi: &'a dyn MomentFunctional) -> Self {
        GroupMoments {
            comp,
            handle_vertex,
            phi,
            cache: RefCell::new(HashMap::new()),
        }
    }
}

struct InnerView<'a> {
    phi: &'a dyn MomentFunctional,
    /// Composed vertex of each inner vertex.
    to_composed: Vec<usize>,
}

impl MomentFunctional for InnerView<'_> {
    fn moment(&self, vertex: usize, handles: &[usize]) -> C64 {
        self.phi.moment(self.to_composed[vertex], handles)
    }
}

impl MomentFunctional for GroupMoments<'_> {
    fn moment(&self, group: usize, handles: &[usize]) -> C64 {
        let key = (group, handles.to_vec());
        if let Some(&v) = self.cache.borrow().get(&key) {
            return v;
        }
        let to_composed: Vec<usize> = (0..self.comp.group.len())
            .filter(|&x| self.comp.group[x] == group)
            .collect();
        let view = InnerView {
            phi: self.phi,
            to_composed,
        };
        let inner_colors: Vec<usize> = handles
            .iter()
            .map(|&h| self.comp.local[self.handle_vertex[h]])
            .collect();
        let v = joint_moment(
            &self.comp.inner[group],
            &inner_colors,
            handles,
            &view,
            CumulantKind::Free,
        )
        .expect("inner words are checked by the caller");
        self.cache.borrow_mut().insert(key, v);
        v
    }

    fn vertex_of(&self, handle: usize) -> Option<usize> {
        self.handle_vertex.get(handle).map(|&v| self.comp.group[v])
    }
}

/// The joint moment computed directly under the composed bigraph and in two
/// levels (inner groups as algebras, then the outer bigraph).
pub fn associativity_check(
    comp: &Composition,
    colors: &[usize],
    handles: &[usize],
    phi: &dyn MomentFunctional,
) -> Result<(C64, C64)> {
    let direct = joint_moment(&comp.composed, colors, handles, phi, CumulantKind::Free)?;
    let max_handle = handles.iter().copied().max().map_or(0, |m| m + 1);
    let mut handle_vertex = vec![usize::MAX; max_handle];
    for (&h, &c) in handles.iter().zip(colors) {
        if handle_vertex[h] != usize::MAX && handle_vertex[h] != c {
            return Err(Error::VertexMismatch {
                index: h + 1,
                expected: comp.composed.name(handle_vertex[h]).to_string(),
                found: comp.composed.name(c).to_string(),
            });
        }
        handle_vertex[h] = c;
    }
    let groups = GroupMoments::new(comp, &handle_vertex, phi);
    let outer_colors = comp.outer_coloring(colors);
    let nested = joint_moment(&comp.outer, &outer_colors, handles, &groups, CumulantKind::Free)?;
    Ok((direct, nested))
}

/// A family of matrices, each living at a vertex with its own state.
#[derive(Debug, Clone)]
pub struct MatrixFamily {
    pub states: Vec<AlgebraState>,
    pub elements: Vec<AlgebraElement>,
}

impl MatrixFamily {
    pub fn new(states: Vec<AlgebraState>, elements: Vec<AlgebraElement>) -> Result<MatrixFamily> {
        for e in &elements {
            let s = states
                .get(e.vertex)
                .ok_or_else(|| Error::UnknownVertex(format!("#{}", e.vertex)))?;
            if e.matrix.nrows() != s.dim() || e.matrix.ncols() != s.dim() {
                return Err(Error::DimMismatch {
                    expected: s.dim(),
                    got: e.matrix.nrows(),
                });
            }
        }
        Ok(MatrixFamily { states, elements })
    }

    /// Random family for a coloring: element `j` is a random matrix at vertex
    /// `colors[j]`; states are random unit vectors.
    pub fn random(colors: &[usize], dims: &[usize], seed: u64) -> Result<MatrixFamily> {
        let states = dims
            .iter()
            .enumerate()
            .map(|(v, &d)| {
                AlgebraState::vector(crate::ncps::random_unit_vector(
                    d,
                    seed.wrapping_mul(31).wrapping_add(v as u64),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let elements = colors
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                AlgebraElement::random(v, dims[v], seed.wrapping_mul(1009).wrapping_add(j as u64 + 1), false)
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixFamily::new(states, elements)
    }

    pub fn matrices(&self) -> Vec<CMatrix> {
        self.elements.iter().map(|e| e.matrix.clone()).collect()
    }
}

impl MomentFunctional for MatrixFamily {
    fn moment(&self, vertex: usize, handles: &[usize]) -> C64 {
        let word: Vec<&CMatrix> = handles.iter().map(|&h| &self.elements[h].matrix).collect();
        self.states[vertex]
            .word_moment(&word)
            .expect("family dimensions are validated at construction")
    }

    fn vertex_of(&self, handle: usize) -> Option<usize> {
        self.elements.get(handle).map(|e| e.vertex)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::PairKind;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() <= 1e-10 * (1.0 + a.norm().max(b.norm()))
    }

    #[test]
    fn low_order_cumulants() {
        let fam = MatrixFamily::random(&[0, 0, 0], &[3], 4).unwrap();
        let m = |h: &[usize]| fam.moment(0, h);
        for kind in CumulantKind::ALL {
            assert!(close(cumulant(kind, &fam, 0, &[1]).unwrap(), m(&[1])));
            assert!(close(
                cumulant(kind, &fam, 0, &[0, 1]).unwrap(),
                m(&[0, 1]) - m(&[0]) * m(&[1])
            ));
        }
        let boolean3 = m(&[0, 1, 2]) - m(&[0, 1]) * m(&[2]) - m(&[0]) * m(&[1, 2]) + m(&[0]) * m(&[1]) * m(&[2]);
        assert!(close(
            cumulant(CumulantKind::Boolean, &fam, 0, &[0, 1, 2]).unwrap(),
            boolean3
        ));
    }

    #[test]
    fn partitioned_examples() {
        let fam = MatrixFamily::random(&[0, 0, 0], &[2], 8).unwrap();
        let colors = [0, 0, 0];
        let m = |h: &[usize]| fam.moment(0, h);
        let single = partitioned_cumulant(
            CumulantKind::Free,
            &fam,
            &SetPartition::singletons(3),
            &colors,
            &[0, 1, 2],
        )
        .unwrap();
        assert!(close(single, m(&[0]) * m(&[1]) * m(&[2])));
        let p: SetPartition = "13|2".parse().unwrap();
        let v = partitioned_cumulant(CumulantKind::Free, &fam, &p, &colors, &[0, 1, 2]).unwrap();
        assert!(close(v, (m(&[0, 2]) - m(&[0]) * m(&[2])) * m(&[1])));
        assert_eq!(
            partitioned_cumulant(CumulantKind::Free, &fam, &p, &[0, 0, 1], &[0, 1, 2]),
            Err(Error::NotMonochromatic)
        );
    }

    #[test]
    fn pair_moments() {
        let colors = [0, 1, 0, 1];
        let fam = MatrixFamily::random(&colors, &[3, 2], 21).unwrap();
        let m0 = |h: &[usize]| fam.moment(0, h);
        let m1 = |h: &[usize]| fam.moment(1, h);
        let h = [0, 1, 2, 3];

        let free = Bigraph::uniform(2, PairKind::Free);
        let expect = m0(&[0, 2]) * m1(&[1]) * m1(&[3]) + m0(&[0]) * m0(&[2]) * m1(&[1, 3])
            - m0(&[0]) * m0(&[2]) * m1(&[1]) * m1(&[3]);
        for kind in CumulantKind::ALL {
            assert!(close(joint_moment(&free, &colors, &h, &fam, kind).unwrap(), expect));
        }

        let boolean = Bigraph::uniform(2, PairKind::Boolean);
        let expect = m0(&[0]) * m1(&[1]) * m0(&[2]) * m1(&[3]);
        assert!(close(
            joint_moment(&boolean, &colors, &h, &fam, CumulantKind::Free).unwrap(),
            expect
        ));

        let mono = Bigraph::uniform(2, PairKind::Monotone);
        let fam3 = MatrixFamily::random(&[0, 1, 0], &[3, 3], 5).unwrap();
        let v = joint_moment(&mono, &[0, 1, 0], &[0, 1, 2], &fam3, CumulantKind::Free).unwrap();
        assert!(close(v, fam3.moment(0, &[0, 2]) * fam3.moment(1, &[1])));
        let fam3 = MatrixFamily::random(&[1, 0, 1], &[3, 3], 6).unwrap();
        let v = joint_moment(&mono, &[1, 0, 1], &[0, 1, 2], &fam3, CumulantKind::Free).unwrap();
        assert!(close(
            v,
            fam3.moment(1, &[0]) * fam3.moment(1, &[2]) * fam3.moment(0, &[1])
        ));
    }

    #[test]
    fn mixed_boolean_examples() {
        let colors = [0, 1];
        let fam = MatrixFamily::random(&colors, &[2, 2], 3).unwrap();
        let boolean = Bigraph::uniform(2, PairKind::Boolean);
        let v = mixed_boolean_cumulant(&boolean, &colors, &[0, 1], &fam).unwrap();
        assert!(v.norm() < 1e-14);
        let one = mixed_boolean_cumulant(&boolean, &[0], &[0], &fam).unwrap();
        assert!(close(one, fam.moment(0, &[0])));
        let g = Bigraph::singleton("v");
        let fam = MatrixFamily::random(&[0, 0, 0, 0], &[2], 4).unwrap();
        let a = mixed_boolean_cumulant(&g, &[0; 4], &[0, 1, 2, 3], &fam).unwrap();
        let b = cumulant(CumulantKind::Boolean, &fam, 0, &[0, 1, 2, 3]).unwrap();
        assert!(close(a, b));
    }

    #[test]
    fn bmt_examples() {
        let fam = MatrixFamily::random(&[0, 1, 0, 1], &[2, 3], 12).unwrap();
        let t = Bigraph::uniform(2, PairKind::Tensor);
        let v = bmt_moment(&t, &[0, 1, 0, 1], &[0, 1, 2, 3], &fam).unwrap();
        assert!(close(v, fam.moment(0, &[0, 2]) * fam.moment(1, &[1, 3])));
        let b = Bigraph::uniform(2, PairKind::Boolean);
        let v = bmt_moment(&b, &[0, 1], &[0, 1], &fam).unwrap();
        assert!(close(v, fam.moment(0, &[0]) * fam.moment(1, &[1])));
        let f = Bigraph::uniform(2, PairKind::Free);
        assert_eq!(bmt_moment(&f, &[0, 1], &[0, 1], &fam), Err(Error::NotBMTRegime));
        assert_eq!(epsilon_moment(&b, &[0, 1], &[0, 1], &fam), Err(Error::NotEpsilonRegime));
    }

    #[test]
    fn vertex_mismatch() {
        let fam = MatrixFamily::random(&[0, 1], &[2, 2], 1).unwrap();
        let g = Bigraph::uniform(2, PairKind::Free);
        assert!(matches!(
            joint_moment(&g, &[1, 0], &[0, 1], &fam, CumulantKind::Free),
            Err(Error::VertexMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn scalar_helpers() {
        assert_eq!(pairwise_sum(&[c(1.0), c(2.0), c(3.0)]), c(6.0));
        assert_eq!(lattice(CumulantKind::Classical, 4).unwrap().len(), 15);
        let total: i64 = lattice(CumulantKind::Free, 3).unwrap().iter().map(|(_, m)| m).sum();
        assert_eq!(total, 0);
    }
}
