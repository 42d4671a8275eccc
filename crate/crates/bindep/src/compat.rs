//! Partitions compatible with a coloring and a bigraph, and the structural
//! bijections between the three compatible classes.
//!
//! A coloring is a slice of dense vertex indices of the bigraph. All index
//! conventions are ascending (element 0 is the leftmost factor of a word);
//! [`reverse_partition`] and [`reverse_coloring`] convert to the
//! right-to-left orientation used when operators act on a vacuum vector.

use std::collections::BTreeMap;

use crate::bigraph::Bigraph;
use crate::error::{guard, Error, Result};
use crate::partitions::{enumerate_all, enumerate_nc, SetPartition, MAX_ENUMERATE};

/// Which family of compatible partitions is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompatClass {
    /// Conditions (monochromatic, nestings in `E1`, crossings in `E2`).
    Full,
    /// `Full` with no unobstructed nestings.
    Zero,
    /// `Full` with crossings allowed in `E2 ∪ Δ`.
    Tilde,
}

impl std::str::FromStr for CompatClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<CompatClass> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(CompatClass::Full),
            "zero" => Ok(CompatClass::Zero),
            "tilde" => Ok(CompatClass::Tilde),
            other => Err(Error::Parse(format!("unknown class `{other}`"))),
        }
    }
}

fn check_len(p: &SetPartition, colors: &[usize]) -> Result<()> {
    if p.n() != colors.len() {
        return Err(Error::DimMismatch {
            expected: p.n(),
            got: colors.len(),
        });
    }
    Ok(())
}

fn block_color(p: &SetPartition, colors: &[usize], b: usize) -> usize {
    colors[p.blocks()[b][0]]
}

fn monochromatic(p: &SetPartition, colors: &[usize]) -> bool {
    p.blocks().iter().all(|b| b.iter().all(|&x| colors[x] == colors[b[0]]))
}

/// Membership test for the three compatible classes.
pub fn is_compatible(p: &SetPartition, colors: &[usize], g: &Bigraph, class: CompatClass) -> bool {
    if p.n() != colors.len() || !monochromatic(p, colors) {
        return false;
    }
    for block in p.blocks() {
        let c = colors[block[0]];
        let (lo, hi) = (block[0], block[block.len() - 1]);
        if !(lo..=hi).all(|j| g.e1(c, colors[j])) {
            return false;
        }
    }
    let m = p.num_blocks();
    for a in 0..m {
        for b in (a + 1)..m {
            if p.crosses(a, b) {
                let (ca, cb) = (block_color(p, colors, a), block_color(p, colors, b));
                let ok = match class {
                    CompatClass::Tilde => g.e2_or_diag(ca, cb),
                    _ => g.e2(ca, cb),
                };
                if !ok {
                    return false;
                }
            }
        }
    }
    match class {
        CompatClass::Zero => unobstructed_pairs(p, colors, g).is_empty(),
        _ => true,
    }
}

/// Ordered block pairs `(a, b)` with `b` unobstructedly nested inside `a`;
/// assumes `p` is in the full class.
fn unobstructed_pairs(p: &SetPartition, colors: &[usize], g: &Bigraph) -> Vec<(usize, usize)> {
    let m = p.num_blocks();
    let mut out = Vec::new();
    for a in 0..m {
        let ca = block_color(p, colors, a);
        for b in 0..m {
            if a == b || block_color(p, colors, b) != ca || !p.nested_in(b, a) {
                continue;
            }
            let clear = (0..m).all(|x| {
                x == a
                    || x == b
                    || !(p.nested_in(x, a) && p.nested_in(b, x))
                    || g.e2_or_diag(ca, block_color(p, colors, x))
            });
            if clear {
                out.push((a, b));
            }
        }
    }
    out
}

/// The unobstructed nesting relation as pairs of block indices `(outer,
/// inner)`.
pub fn unobstructed_nesting(p: &SetPartition, colors: &[usize], g: &Bigraph) -> Result<Vec<(usize, usize)>> {
    check_len(p, colors)?;
    if !is_compatible(p, colors, g, CompatClass::Full) {
        return Err(Error::NotCompatible);
    }
    Ok(unobstructed_pairs(p, colors, g))
}

/// The coarsening in the zero class whose blocks have their minimum and
/// maximum in a common block of `p`: each block is merged with its outermost
/// unobstructed ancestor.
pub fn env0(p: &SetPartition, colors: &[usize], g: &Bigraph) -> Result<SetPartition> {
    let pairs = unobstructed_nesting(p, colors, g)?;
    let mut root: Vec<usize> = (0..p.num_blocks()).collect();
    for (a, b) in pairs {
        if p.blocks()[a][0] < p.blocks()[root[b]][0] {
            root[b] = a;
        }
    }
    let keys: Vec<usize> = (0..p.n()).map(|i| root[p.block_of(i)]).collect();
    Ok(SetPartition::from_labels(&keys))
}

/// An outer partition together with one partition per outer block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub outer: SetPartition,
    pub parts: Vec<SetPartition>,
}

impl Decomposition {
    fn of(p: &SetPartition, outer: SetPartition) -> Decomposition {
        let parts = outer.blocks().iter().map(|b| p.restrict(b)).collect();
        Decomposition { outer, parts }
    }

    pub fn recompose(&self) -> Result<SetPartition> {
        SetPartition::recompose(&self.outer, &self.parts)
    }
}

/// Splits a full-class partition into its zero-class envelope and the
/// irreducible non-crossing restrictions to its blocks.
pub fn decompose_zero(p: &SetPartition, colors: &[usize], g: &Bigraph) -> Result<Decomposition> {
    let outer = env0(p, colors, g)?;
    Ok(Decomposition::of(p, outer))
}

/// Splits a tilde-class partition into its colorwise non-crossing envelope
/// and the connected restrictions to its blocks.
pub fn decompose_tilde(p: &SetPartition, colors: &[usize], g: &Bigraph) -> Result<Decomposition> {
    check_len(p, colors)?;
    if !is_compatible(p, colors, g, CompatClass::Tilde) {
        return Err(Error::NotCompatible);
    }
    let outer = p.join_colorwise(colors)?;
    Ok(Decomposition::of(p, outer))
}

/// A bigraph presented as an operad composition `outer(inner_1, …, inner_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub outer: Bigraph,
    pub inner: Vec<Bigraph>,
    pub composed: Bigraph,
    /// Outer vertex of each composed vertex.
    pub group: Vec<usize>,
    /// Index of each composed vertex inside its inner bigraph.
    pub local: Vec<usize>,
}

impl Composition {
    pub fn new(outer: Bigraph, inner: Vec<Bigraph>) -> Result<Composition> {
        let composed = Bigraph::operad_compose(&outer, &inner)?;
        let mut group = Vec::new();
        let mut local = Vec::new();
        for (j, g) in inner.iter().enumerate() {
            for i in 0..g.len() {
                group.push(j);
                local.push(i);
            }
        }
        Ok(Composition {
            outer,
            inner,
            composed,
            group,
            local,
        })
    }

    /// Checks that `g` has the adjacency of this composition.
    pub fn verify(&self, g: &Bigraph) -> Result<()> {
        if g.same_structure(&self.composed) {
            Ok(())
        } else {
            Err(Error::NotComposition)
        }
    }

    /// The outer coloring induced by a coloring of the composed bigraph.
    pub fn outer_coloring(&self, colors: &[usize]) -> Vec<usize> {
        colors.iter().map(|&c| self.group[c]).collect()
    }

    /// Inner colors of the elements of `block` (all in one group).
    pub fn inner_coloring(&self, colors: &[usize], block: &[usize]) -> Vec<usize> {
        block.iter().map(|&x| self.local[colors[x]]).collect()
    }
}

/// Splits a full-class partition for a composed bigraph into an outer
/// zero-class partition and irreducible inner partitions.
pub fn decompose_operad(p: &SetPartition, colors: &[usize], g: &Bigraph, comp: &Composition) -> Result<Decomposition> {
    comp.verify(g)?;
    check_len(p, colors)?;
    if !is_compatible(p, colors, g, CompatClass::Full) {
        return Err(Error::NotCompatible);
    }
    let outer_colors = comp.outer_coloring(colors);
    let joined = p.join_colorwise(&outer_colors)?;
    let outer = env0(&joined, &outer_colors, &comp.outer)?;
    Ok(Decomposition::of(p, outer))
}

/// Every partition of the class, enumerated color class by color class.
pub fn enumerate_compatible(colors: &[usize], g: &Bigraph, class: CompatClass) -> Result<Vec<SetPartition>> {
    let k = colors.len();
    guard("word length", k, MAX_ENUMERATE)?;
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colors.iter().enumerate() {
        classes.entry(c).or_default().push(i);
    }
    let mut per_class: Vec<(Vec<usize>, Vec<SetPartition>)> = Vec::new();
    for (_, members) in classes {
        let options: Vec<SetPartition> = match class {
            CompatClass::Tilde => enumerate_all(members.len())?.collect(),
            _ => enumerate_nc(members.len())?.collect(),
        };
        per_class.push((members, options));
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_class.len()];
    let mut keys = vec![(0usize, 0usize); k];
    loop {
        for (ci, (members, options)) in per_class.iter().enumerate() {
            let part = &options[choice[ci]];
            for (pos, &x) in members.iter().enumerate() {
                keys[x] = (ci, part.block_of(pos));
            }
        }
        let p = SetPartition::from_labels(&keys);
        if is_compatible(&p, colors, g, class) {
            out.push(p);
        }
        let mut i = 0;
        loop {
            if i == per_class.len() {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < per_class[i].1.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Members of the class that are irreducible.
pub fn enumerate_irreducible(colors: &[usize], g: &Bigraph, class: CompatClass) -> Result<Vec<SetPartition>> {
    Ok(enumerate_compatible(colors, g, class)?
        .into_iter()
        .filter(SetPartition::is_irreducible)
        .collect())
}

/// The bigraph on the blocks of `p`: `(B, B')` is in `E1` when `B'` meets the
/// convex hull of `B`, and in `E2` when the blocks cross.
pub fn partition_bigraph(p: &SetPartition) -> Bigraph {
    let names = (1..=p.num_blocks()).map(|i| format!("B{i}")).collect();
    let meets_hull = |a: usize, b: usize| {
        let ba = &p.blocks()[a];
        let (lo, hi) = (ba[0], ba[ba.len() - 1]);
        p.blocks()[b].iter().any(|&x| lo <= x && x <= hi)
    };
    Bigraph::from_fn(names, meets_hull, |a, b| a != b && p.crosses(a, b)).expect("block names are distinct")
}

/// Whether the block coloring is a bigraph morphism from
/// [`partition_bigraph`] to `g`.
pub fn is_morphism(p: &SetPartition, colors: &[usize], g: &Bigraph) -> bool {
    if p.n() != colors.len() || !monochromatic(p, colors) {
        return false;
    }
    let h = partition_bigraph(p);
    let m = p.num_blocks();
    (0..m).all(|a| {
        (0..m).all(|b| {
            let (ca, cb) = (block_color(p, colors, a), block_color(p, colors, b));
            (!h.e1(a, b) || g.e1(ca, cb)) && (!h.e2(a, b) || g.e2(ca, cb))
        })
    })
}

/// The kernel partition: `i ~ j` when they share a color `v` and every
/// element between them has color `v` or a color `w` with `(v, w) ∈ E1`.
pub fn kernel_partition(colors: &[usize], g: &Bigraph) -> SetPartition {
    let k = colors.len();
    let mut labels: Vec<usize> = (0..k).collect();
    for i in 0..k {
        let v = colors[i];
        for j in (i + 1)..k {
            let w = colors[j];
            if w == v {
                labels[j] = labels[i];
                break;
            }
            if !g.e1(v, w) {
                break;
            }
        }
    }
    SetPartition::from_labels(&labels)
}

/// Membership characterised through the kernel partition; valid when every
/// two-way `E1` pair is in `E2`.
pub fn is_compatible_via_kernel(p: &SetPartition, colors: &[usize], g: &Bigraph) -> Result<bool> {
    if !g.is_bmt_regime() {
        return Err(Error::NotBMTRegime);
    }
    let ker = kernel_partition(colors, g);
    if !p.leq(&ker) {
        return Ok(false);
    }
    Ok(ker.blocks().iter().all(|b| p.restrict(b).is_noncrossing()))
}

/// Reverses the ground set: element `i` becomes `n-1-i`.
pub fn reverse_partition(p: &SetPartition) -> SetPartition {
    let n = p.n();
    let keys: Vec<usize> = (0..n).map(|i| p.block_of(n - 1 - i)).collect();
    SetPartition::from_labels(&keys)
}

pub fn reverse_coloring(colors: &[usize]) -> Vec<usize> {
    colors.iter().rev().copied().collect()
}

/// A partition whose blocks are tagged finished or unfinished. Unfinished
/// blocks are open towards larger indices: their convex hull runs to the end
/// of the ground set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnfinishedPartition {
    pub base: SetPartition,
    /// One flag per block of `base`.
    pub unfinished: Vec<bool>,
}

/// One step of a height path: `(δ, ε)`.
pub type Step = (u8, u8);

impl UnfinishedPartition {
    pub fn finished(base: SetPartition) -> UnfinishedPartition {
        let unfinished = vec![false; base.num_blocks()];
        UnfinishedPartition { base, unfinished }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    fn hull(&self, b: usize) -> (usize, usize) {
        let block = &self.base.blocks()[b];
        let hi = if self.unfinished[b] {
            self.n() - 1
        } else {
            block[block.len() - 1]
        };
        (block[0], hi)
    }

    /// `(a, b)` in the first edge set: block `b` meets the hull of `a`.
    pub fn e1(&self, a: usize, b: usize) -> bool {
        let (lo, hi) = self.hull(a);
        self.base.blocks()[b].iter().any(|&x| lo <= x && x <= hi)
    }

    /// Two-way first-edge pairs of distinct blocks.
    pub fn e2(&self, a: usize, b: usize) -> bool {
        a != b && self.e1(a, b) && self.e1(b, a)
    }

    /// Block `b` is enclosed by block `a`.
    pub fn encloses(&self, a: usize, b: usize) -> bool {
        a != b && self.e1(a, b) && !self.e1(b, a)
    }

    /// Whether the coloring is a morphism to `g`.
    pub fn is_compatible(&self, colors: &[usize], g: &Bigraph) -> bool {
        if self.n() != colors.len() || !monochromatic(&self.base, colors) {
            return false;
        }
        let m = self.base.num_blocks();
        (0..m).all(|a| {
            (0..m).all(|b| {
                let (ca, cb) = (block_color(&self.base, colors, a), block_color(&self.base, colors, b));
                (!self.e1(a, b) || g.e1(ca, cb)) && (!self.e2(a, b) || g.e2(ca, cb))
            })
        })
    }

    /// Same-color enclosed pairs with every block in between related to that
    /// color by `E2 ∪ Δ`.
    pub fn adjacent_pairs(&self, colors: &[usize], g: &Bigraph) -> Vec<(usize, usize)> {
        let m = self.base.num_blocks();
        let color = |b: usize| block_color(&self.base, colors, b);
        let mut out = Vec::new();
        for a in 0..m {
            for b in 0..m {
                if color(a) != color(b) || !self.encloses(a, b) {
                    continue;
                }
                let clear = (0..m).all(|x| {
                    x == a
                        || x == b
                        || !(self.encloses(a, x) && self.encloses(x, b))
                        || g.e2_or_diag(color(a), color(x))
                });
                if clear {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_zero_compatible(&self, colors: &[usize], g: &Bigraph) -> bool {
        self.is_compatible(colors, g) && self.adjacent_pairs(colors, g).is_empty()
    }
}

/// Compatibility of an unfinished partition; with `zero` set, adjacent
/// blocks are also excluded.
pub fn is_unfinished_compatible(u: &UnfinishedPartition, colors: &[usize], g: &Bigraph, zero: bool) -> bool {
    if zero {
        u.is_zero_compatible(colors, g)
    } else {
        u.is_compatible(colors, g)
    }
}

fn check_step(step: Step, index: usize) -> Result<()> {
    if step.0 > 1 || step.1 > 1 {
        return Err(Error::InvalidPath(format!("step {} is not a pair of bits", index + 1)));
    }
    Ok(())
}

/// Height-path bijection for a single color. Element `j` of the result is
/// step `j`: `(0,0)` a finished singleton, `(1,0)` opens a new unfinished
/// block, `(1,1)` joins the open block with the largest element, `(0,1)`
/// joins it and closes it. Errors report 1-based step numbers.
pub fn path_to_unfinished(steps: &[Step]) -> Result<UnfinishedPartition> {
    let k = steps.len();
    let mut labels = vec![0usize; k];
    let mut open: Vec<usize> = Vec::new();
    let mut is_open_block: Vec<bool> = Vec::new();
    for (j, &step) in steps.iter().enumerate() {
        check_step(step, j)?;
        match step {
            (0, 0) => {
                labels[j] = is_open_block.len();
                is_open_block.push(false);
            }
            (1, 0) => {
                labels[j] = is_open_block.len();
                open.push(is_open_block.len());
                is_open_block.push(true);
            }
            (1, 1) => {
                let &b = open.last().ok_or(Error::ZeroPlateauViolation(j + 1))?;
                labels[j] = b;
            }
            _ => {
                let b = open.pop().ok_or(Error::NegativeHeight(j + 1))?;
                labels[j] = b;
                is_open_block[b] = false;
            }
        }
    }
    let base = SetPartition::from_labels(&labels);
    let unfinished = base.blocks().iter().map(|b| is_open_block[labels[b[0]]]).collect();
    Ok(UnfinishedPartition { base, unfinished })
}

/// Inverse of [`path_to_unfinished`]; partitions outside its image give
/// `InvalidPath`.
pub fn unfinished_to_path(u: &UnfinishedPartition) -> Result<Vec<Step>> {
    let steps: Vec<Step> = (0..u.n())
        .map(|i| {
            let b = u.base.block_of(i);
            let block = &u.base.blocks()[b];
            let open = u.unfinished[b];
            if block.len() == 1 && !open {
                (0, 0)
            } else if i == block[0] {
                (1, 0)
            } else if i == block[block.len() - 1] && !open {
                (0, 1)
            } else {
                (1, 1)
            }
        })
        .collect();
    match path_to_unfinished(&steps) {
        Ok(back) if &back == u => Ok(steps),
        _ => Err(Error::InvalidPath("not the image of a height path".to_string())),
    }
}

/// Per-color application of [`path_to_unfinished`]: the steps of each color
/// class form their own path.
pub fn colored_path_to_unfinished(steps: &[Step], colors: &[usize]) -> Result<UnfinishedPartition> {
    if steps.len() != colors.len() {
        return Err(Error::DimMismatch {
            expected: colors.len(),
            got: steps.len(),
        });
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colors.iter().enumerate() {
        classes.entry(c).or_default().push(i);
    }
    let k = steps.len();
    let mut keys = vec![(0usize, 0usize); k];
    let mut open_of = vec![false; k];
    for (&c, members) in &classes {
        let sub: Vec<Step> = members.iter().map(|&i| steps[i]).collect();
        let u = path_to_unfinished(&sub).map_err(|e| match e {
            Error::NegativeHeight(s) => Error::NegativeHeight(members[s - 1] + 1),
            Error::ZeroPlateauViolation(s) => Error::ZeroPlateauViolation(members[s - 1] + 1),
            other => other,
        })?;
        for (pos, &x) in members.iter().enumerate() {
            let b = u.base.block_of(pos);
            keys[x] = (c, b);
            open_of[x] = u.unfinished[b];
        }
    }
    let base = SetPartition::from_labels(&keys);
    let unfinished = base.blocks().iter().map(|b| open_of[b[0]]).collect();
    Ok(UnfinishedPartition { base, unfinished })
}

/// Inverse of [`colored_path_to_unfinished`].
pub fn colored_unfinished_to_path(u: &UnfinishedPartition, colors: &[usize]) -> Result<Vec<Step>> {
    if !monochromatic(&u.base, colors) {
        return Err(Error::NotMonochromatic);
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colors.iter().enumerate() {
        classes.entry(c).or_default().push(i);
    }
    let mut steps = vec![(0u8, 0u8); u.n()];
    for members in classes.values() {
        let sub_base = u.base.restrict(members);
        let unfinished = sub_base
            .blocks()
            .iter()
            .map(|b| u.unfinished[u.base.block_of(members[b[0]])])
            .collect();
        let sub = UnfinishedPartition {
            base: sub_base,
            unfinished,
        };
        for (pos, s) in unfinished_to_path(&sub)?.into_iter().enumerate() {
            steps[members[pos]] = s;
        }
    }
    Ok(steps)
}

/// Height of each color after each step; `heights[j][v]` is the height after
/// `j` steps.
pub fn heights(steps: &[Step], colors: &[usize], n_colors: usize) -> Vec<Vec<i64>> {
    let mut h = vec![0i64; n_colors];
    let mut out = vec![h.clone()];
    for (&(d, e), &c) in steps.iter().zip(colors) {
        h[c] += d as i64 - e as i64;
        out.push(h.clone());
    }
    out
}
