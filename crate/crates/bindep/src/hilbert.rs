//! The bigraph product of pointed Hilbert spaces, truncated at a word-length
//! cap, with the representations `λ_v` and vacuum-vector moments.
//!
//! The space is `⊕_{w ∈ W₀} H_w°` where `W₀` holds one representative of
//! every equivalence class of permissible reduced words and
//! `H_w° = H_{w₁}° ⊗ ⋯ ⊗ H_{w_m}°`. Each `H_v°` is the orthogonal
//! complement of `ξ_v` and is given coordinates by an orthonormal basis
//! whose first vector is `ξ_v`.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::bigraph::Bigraph;
use crate::compat::{colored_path_to_unfinished, is_unfinished_compatible, Step, UnfinishedPartition};
use crate::cumulants::{cumulant, CumulantKind, MatrixFamily};
use crate::error::{guard, Error, Result};
use crate::ncps::{AlgebraElement, AlgebraState, CMatrix, CVector, C64};

/// A word over the vertex indices of a bigraph.
pub type Word = Vec<usize>;

/// Largest total dimension a truncated space may have.
pub const MAX_SPACE_DIM: usize = 1 << 20;

/// Longest operator sequence accepted by [`unfinished_action`] and
/// [`four_term_sum`].
pub const MAX_EXPANSION_LEN: usize = 8;

/// No repeated letter is separated only by letters tensor-related to it.
pub fn is_reduced(w: &[usize], g: &Bigraph) -> bool {
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w[j] != w[i] {
                continue;
            }
            let separated = w[i + 1..j].iter().any(|&x| x != w[i] && !g.is_tensor(w[i], x));
            if !separated {
                return false;
            }
            break;
        }
    }
    true
}

/// Every later letter has a first-edge to every earlier letter.
pub fn is_permissible(w: &[usize], g: &Bigraph) -> bool {
    (0..w.len()).all(|i| (i + 1..w.len()).all(|j| g.e1(w[j], w[i])))
}

/// Lexicographically smallest word reachable by swapping adjacent
/// tensor-related letters.
pub fn representative(w: &[usize], g: &Bigraph) -> Word {
    let mut rest: Vec<usize> = w.to_vec();
    let mut out = Vec::with_capacity(w.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for p in 0..rest.len() {
            let movable = rest[..p].iter().all(|&x| g.is_tensor(x, rest[p]));
            if movable && best.is_none_or(|b| rest[p] < rest[b]) {
                best = Some(p);
            }
        }
        let p = best.expect("the first letter is always movable");
        out.push(rest.remove(p));
    }
    out
}

pub fn equivalent(a: &[usize], b: &[usize], g: &Bigraph) -> bool {
    a.len() == b.len() && representative(a, g) == representative(b, g)
}

/// For equivalent words, the position in `to` of each letter of `from`: the
/// `t`-th occurrence of a letter goes to its `t`-th occurrence.
fn position_map(from: &[usize], to: &[usize]) -> Vec<usize> {
    let mut slots: HashMap<usize, Vec<usize>> = HashMap::new();
    for (p, &x) in to.iter().enumerate().rev() {
        slots.entry(x).or_default().push(p);
    }
    from.iter()
        .map(|x| slots.get_mut(x).and_then(Vec::pop).expect("words are rearrangements"))
        .collect()
}

/// Rearranges a tensor whose factors follow `from` into one following `to`.
fn permute_tensor(x: &CVector, factor_dims: &[usize], map: &[usize]) -> CVector {
    let m = factor_dims.len();
    let mut to_dims = vec![0; m];
    for p in 0..m {
        to_dims[map[p]] = factor_dims[p];
    }
    let mut to_strides = vec![1usize; m];
    for q in (0..m.saturating_sub(1)).rev() {
        to_strides[q] = to_strides[q + 1] * to_dims[q + 1];
    }
    let mut y = CVector::zeros(x.len());
    let mut idx = vec![0usize; m];
    for value in x.iter() {
        let target: usize = (0..m).map(|p| idx[p] * to_strides[map[p]]).sum();
        y[target] = *value;
        for p in (0..m).rev() {
            idx[p] += 1;
            if idx[p] < factor_dims[p] {
                break;
            }
            idx[p] = 0;
        }
    }
    y
}

/// Orthonormal basis of `ℂ^d` as columns, the first column being `xi`.
fn pointed_basis(xi: &CVector) -> CMatrix {
    let d = xi.len();
    let mut cols: Vec<CVector> = vec![xi.clone()];
    for e in 0..d {
        if cols.len() == d {
            break;
        }
        let mut v = CVector::zeros(d);
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let n = v.norm();
        if n > 1e-6 {
            cols.push(v / C64::new(n, 0.0));
        }
    }
    CMatrix::from_columns(&cols)
}

/// A truncated bigraph product space.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    graph: Bigraph,
    xis: Vec<CVector>,
    bases: Vec<CMatrix>,
    cap: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

/// Builds the space for pointed spaces `(ℂ^{d_v}, ξ_v)`, keeping
/// representatives of length at most `cap`.
pub fn build_space(g: &Bigraph, xis: &[CVector], cap: usize) -> Result<ProductSpace> {
    if xis.len() != g.len() {
        return Err(Error::DimMismatch {
            expected: g.len(),
            got: xis.len(),
        });
    }
    for (v, xi) in xis.iter().enumerate() {
        if xi.is_empty() || (xi.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::NotVectorState(g.name(v).to_string()));
        }
    }
    let complement: Vec<usize> = xis.iter().map(|x| x.len() - 1).collect();
    let mut words: Vec<Word> = vec![Vec::new()];
    let mut seen: HashSet<Word> = words.iter().cloned().collect();
    let mut total = 1usize;
    let mut frontier = 0;
    while frontier < words.len() {
        let w = words[frontier].clone();
        frontier += 1;
        if w.len() == cap {
            continue;
        }
        for v in 0..g.len() {
            let mut vw = Vec::with_capacity(w.len() + 1);
            vw.push(v);
            vw.extend_from_slice(&w);
            if !is_permissible(&vw, g) || !is_reduced(&vw, g) {
                continue;
            }
            let r = representative(&vw, g);
            if seen.insert(r.clone()) {
                total += r.iter().map(|&x| complement[x]).product::<usize>();
                guard("product space dimension", total, MAX_SPACE_DIM)?;
                words.push(r);
            }
        }
    }
    let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    Ok(ProductSpace {
        graph: g.clone(),
        bases: xis.iter().map(pointed_basis).collect(),
        xis: xis.to_vec(),
        cap,
        words,
        index,
    })
}

impl ProductSpace {
    /// The space whose pointed factors are the vector states of `states`.
    pub fn from_states(g: &Bigraph, states: &[AlgebraState], cap: usize) -> Result<ProductSpace> {
        let xis = states
            .iter()
            .enumerate()
            .map(|(v, s)| match s {
                AlgebraState::Vector(xi) => Ok(xi.clone()),
                AlgebraState::NormalizedTrace(_) => Err(Error::NotVectorState(
                    g.names().get(v).cloned().unwrap_or_else(|| format!("#{v}")),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        build_space(g, &xis, cap)
    }

    pub fn graph(&self) -> &Bigraph {
        &self.graph
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// The representative words, shortest first; the empty word comes first.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn contains(&self, w: &[usize]) -> bool {
        self.index.contains_key(w)
    }

    pub fn dim_of(&self, v: usize) -> usize {
        self.xis[v].len()
    }

    pub fn xi(&self, v: usize) -> &CVector {
        &self.xis[v]
    }

    /// Dimension of `H_w°`.
    pub fn component_dim(&self, w: &[usize]) -> usize {
        w.iter().map(|&x| self.dim_of(x) - 1).product()
    }

    pub fn total_dim(&self) -> usize {
        self.words.iter().map(|w| self.component_dim(w)).sum()
    }

    fn factor_dims(&self, w: &[usize]) -> Vec<usize> {
        w.iter().map(|&x| self.dim_of(x) - 1).collect()
    }

    /// Coordinates in `H_v°` of a vector of `ℂ^{d_v}`, dropping its `ξ_v`
    /// component.
    pub fn complement_coords(&self, v: usize, x: &CVector) -> CVector {
        let c = self.bases[v].adjoint() * x;
        c.rows(1, c.len() - 1).into_owned()
    }

    /// `U_w`: moves a tensor on `w` to the representative of `w`.
    pub fn to_representative(&self, w: &[usize], x: &CVector) -> (Word, CVector) {
        let r = representative(w, &self.graph);
        let map = position_map(w, &r);
        (r, permute_tensor(x, &self.factor_dims(w), &map))
    }

    /// Whether `v·w` is permissible and reduced.
    fn extends(&self, v: usize, w: &[usize]) -> bool {
        let mut vw = Vec::with_capacity(w.len() + 1);
        vw.push(v);
        vw.extend_from_slice(w);
        is_permissible(&vw, &self.graph) && is_reduced(&vw, &self.graph)
    }

    /// For `w = r(v·w')`, the representative `r(w')`.
    fn strip_front(&self, v: usize, w: &[usize]) -> Option<Word> {
        let p = w.iter().position(|&x| x == v)?;
        if !w[..p].iter().all(|&x| self.graph.is_tensor(x, v)) {
            return None;
        }
        let mut rest = w.to_vec();
        rest.remove(p);
        Some(representative(&rest, &self.graph))
    }

    /// `λ_v(A) x`; the input is left untouched.
    pub fn apply_lambda(&self, v: usize, a: &CMatrix, x: &StateVector) -> Result<StateVector> {
        let d = self.dim_of(v);
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: a.nrows(),
            });
        }
        let phi = &self.bases[v];
        let at = phi.adjoint() * a * phi;
        let dv0 = d - 1;
        let mut out = StateVector::zero();
        for (w, comp) in &x.components {
            if comp.is_empty() {
                continue;
            }
            if self.extends(v, w) {
                out.add_to(w, &(comp * at[(0, 0)]));
                let head = at.view((1, 0), (dv0, 1)).column(0).into_owned();
                let created = head.kronecker(comp);
                if created.iter().any(|z| *z != C64::new(0.0, 0.0)) {
                    if w.len() + 1 > self.cap {
                        return Err(Error::TruncationOverflow(w.len() + 1));
                    }
                    let mut vw = vec![v];
                    vw.extend_from_slice(w);
                    let (r, moved) = self.to_representative(&vw, &created);
                    out.add_to(&r, &moved);
                }
            } else if let Some(tail) = self.strip_front(v, w) {
                let mut vt = vec![v];
                vt.extend_from_slice(&tail);
                let back = position_map(w, &vt);
                let y = permute_tensor(comp, &self.factor_dims(w), &back);
                let stride = self.component_dim(&tail);
                let slice = |i: usize| y.rows(i * stride, stride);
                let mut down = CVector::zeros(stride);
                let mut up = CVector::zeros(dv0 * stride);
                for i in 0..dv0 {
                    down += slice(i) * at[(0, 1 + i)];
                    for j in 0..dv0 {
                        let mut block = up.rows_mut(j * stride, stride);
                        block += slice(i) * at[(1 + j, 1 + i)];
                    }
                }
                out.add_to(&tail, &down);
                let forward = position_map(&vt, w);
                let mut vt_dims = vec![dv0];
                vt_dims.extend(self.factor_dims(&tail));
                out.add_to(w, &permute_tensor(&up, &vt_dims, &forward));
            }
        }
        Ok(out)
    }
}

/// `λ_v(A) x` as a free function.
pub fn apply_lambda(space: &ProductSpace, v: usize, a: &CMatrix, x: &StateVector) -> Result<StateVector> {
    space.apply_lambda(v, a, x)
}

/// A finitely supported vector of the product space, one dense tensor per
/// representative word.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateVector {
    pub components: BTreeMap<Word, CVector>,
}

impl StateVector {
    pub fn zero() -> StateVector {
        StateVector::default()
    }

    /// The vacuum vector `ξ`.
    pub fn vacuum() -> StateVector {
        let mut s = StateVector::zero();
        s.components
            .insert(Vec::new(), CVector::from_element(1, C64::new(1.0, 0.0)));
        s
    }

    /// Random vector supported on representatives shorter than the cap.
    pub fn random(space: &ProductSpace, seed: u64) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut s = StateVector::zero();
        for w in space.words().iter().filter(|w| w.len() < space.cap()) {
            let n = space.component_dim(w);
            let v = CVector::from_fn(n, |_, _| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            s.components.insert(w.clone(), v);
        }
        s
    }

    pub fn add_to(&mut self, w: &[usize], x: &CVector) {
        match self.components.get_mut(w) {
            Some(c) => *c += x,
            None => {
                self.components.insert(w.to_vec(), x.clone());
            }
        }
    }

    pub fn get(&self, w: &[usize]) -> Option<&CVector> {
        self.components.get(w)
    }

    /// Coefficient of the vacuum vector.
    pub fn vacuum_coefficient(&self) -> C64 {
        self.components.get(&Vec::new()).map_or(C64::new(0.0, 0.0), |c| c[0])
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.components
            .iter()
            .filter_map(|(w, x)| other.components.get(w).map(|y| x.dotc(y)))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.components.values().map(|c| c.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> StateVector {
        StateVector {
            components: self.components.iter().map(|(w, c)| (w.clone(), c * s)).collect(),
        }
    }

    pub fn sum(&self, other: &StateVector) -> StateVector {
        let mut out = self.clone();
        for (w, c) in &other.components {
            out.add_to(w, c);
        }
        out
    }

    /// Norm of `self - other`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.sum(&other.scale(C64::new(-1.0, 0.0))).norm()
    }
}

/// `φ(a₁ a₂ ⋯ a_k)` computed as `⟨ξ, λ_{c₁}(a₁) ⋯ λ_{c_k}(a_k) ξ⟩`; the
/// operators are applied to the vacuum from the last one backwards.
pub fn vacuum_moment(space: &ProductSpace, colors: &[usize], matrices: &[CMatrix]) -> Result<C64> {
    if colors.len() != matrices.len() {
        return Err(Error::DimMismatch {
            expected: colors.len(),
            got: matrices.len(),
        });
    }
    let mut x = StateVector::vacuum();
    for (&v, a) in colors.iter().zip(matrices).rev() {
        x = space.apply_lambda(v, a, &x)?;
    }
    Ok(x.vacuum_coefficient())
}

/// `X_δ a X_ε` with `X₀ = P_v` the projection onto `ξ_v` and `X₁ = Q_v`.
pub fn compress(xi: &CVector, a: &CMatrix, step: Step) -> CMatrix {
    let p = xi * xi.adjoint();
    let q = CMatrix::identity(xi.len(), xi.len()) - &p;
    let pick = |bit: u8| if bit == 0 { &p } else { &q };
    pick(step.0) * a * pick(step.1)
}

/// The two evaluations of a compressed operator sequence applied to the
/// vacuum.
#[derive(Debug, Clone)]
pub struct UnfinishedOutcome {
    pub partition: UnfinishedPartition,
    /// Whether the partition lies in the zero class of unfinished
    /// partitions; otherwise the predicted vector is zero.
    pub admissible: bool,
    /// Successive application of `λ_{c(j)}(a_j^{(δ_j, ε_j)})`.
    pub operator: StateVector,
    /// Tensor of `Q`-compressed products over unfinished blocks times
    /// Boolean cumulants of finished blocks.
    pub predicted: StateVector,
}

fn path_error(e: Error) -> Error {
    match e {
        Error::NegativeHeight(s) => Error::InvalidPath(format!("height becomes negative at step {s}")),
        Error::ZeroPlateauViolation(s) => Error::InvalidPath(format!("step {s} continues a block at height zero")),
        other => other,
    }
}

/// Applies `λ_{c(j)}(a_j^{(δ_j, ε_j)})` for `j = 1, …, k` to the vacuum, in
/// that order (entry 0 acts first), and compares with the closed form
/// attached to the unfinished partition of the steps.
pub fn unfinished_action(
    space: &ProductSpace,
    colors: &[usize],
    matrices: &[CMatrix],
    steps: &[Step],
) -> Result<UnfinishedOutcome> {
    let k = colors.len();
    if matrices.len() != k || steps.len() != k {
        return Err(Error::DimMismatch {
            expected: k,
            got: matrices.len().min(steps.len()),
        });
    }
    guard("operator sequence length", k, MAX_EXPANSION_LEN)?;
    let partition = colored_path_to_unfinished(steps, colors).map_err(path_error)?;
    let g = space.graph();

    let mut operator = StateVector::vacuum();
    for j in 0..k {
        let v = colors[j];
        let a = compress(space.xi(v), &matrices[j], steps[j]);
        operator = space.apply_lambda(v, &a, &operator)?;
    }

    let admissible = is_unfinished_compatible(&partition, colors, g, true);
    let mut predicted = StateVector::zero();
    if admissible {
        let states: Vec<AlgebraState> = (0..g.len())
            .map(|v| AlgebraState::Vector(space.xi(v).clone()))
            .collect();
        let elements = matrices
            .iter()
            .zip(colors)
            .map(|(m, &v)| AlgebraElement {
                vertex: v,
                matrix: m.clone(),
            })
            .collect();
        let family = MatrixFamily::new(states, elements)?;
        let mut scalar = C64::new(1.0, 0.0);
        let mut open: Vec<(usize, CVector)> = Vec::new();
        for (b, block) in partition.base.blocks().iter().enumerate() {
            let v = colors[block[0]];
            if partition.unfinished[b] {
                let xi = space.xi(v);
                let q = CMatrix::identity(xi.len(), xi.len()) - xi * xi.adjoint();
                let mut y = xi.clone();
                for &j in block {
                    y = &q * (&matrices[j] * y);
                }
                open.push((v, space.complement_coords(v, &y)));
            } else {
                let handles: Vec<usize> = block.iter().rev().copied().collect();
                scalar *= cumulant(CumulantKind::Boolean, &family, v, &handles)?;
            }
        }
        let word: Word = open.iter().rev().map(|(v, _)| *v).collect();
        let mut tensor = CVector::from_element(1, scalar);
        for (_, y) in open.iter().rev() {
            tensor = tensor.kronecker(y);
        }
        let (r, moved) = space.to_representative(&word, &tensor);
        predicted.add_to(&r, &moved);
    }
    Ok(UnfinishedOutcome {
        partition,
        admissible,
        operator,
        predicted,
    })
}

/// Sum of the vacuum coefficients of every compressed sequence
/// `(δ_j, ε_j) ∈ {0,1}²`, in application order; equals the uncompressed
/// vacuum moment.
pub fn four_term_sum(space: &ProductSpace, colors: &[usize], matrices: &[CMatrix]) -> Result<C64> {
    let k = colors.len();
    guard("operator sequence length", k, MAX_EXPANSION_LEN)?;
    let mut total = C64::new(0.0, 0.0);
    for code in 0..(1usize << (2 * k)) {
        let mut x = StateVector::vacuum();
        for j in 0..k {
            let step = (((code >> (2 * j)) & 1) as u8, ((code >> (2 * j + 1)) & 1) as u8);
            let v = colors[j];
            let a = compress(space.xi(v), &matrices[j], step);
            x = space.apply_lambda(v, &a, &x)?;
        }
        total += x.vacuum_coefficient();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::PairKind;
    use crate::cumulants::joint_moment;
    use crate::ncps::{random_matrix, random_unit_vector};

    fn pair(kind: PairKind) -> Bigraph {
        Bigraph::uniform(2, kind)
    }

    fn unit(d: usize) -> CVector {
        let mut x = CVector::zeros(d);
        x[0] = C64::new(1.0, 0.0);
        x
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() <= 1e-10 * (1.0 + a.norm().max(b.norm()))
    }

    #[test]
    fn word_predicates() {
        let one = Bigraph::singleton("v");
        assert!(is_reduced(&[], &one) && is_permissible(&[], &one));
        assert!(!is_reduced(&[0, 0], &one));
        let boolean = pair(PairKind::Boolean);
        assert!(!is_permissible(&[0, 1], &boolean));
        let tensor = pair(PairKind::Tensor);
        assert!(!is_reduced(&[0, 1, 0], &tensor));
        let free = pair(PairKind::Free);
        assert!(is_reduced(&[0, 1, 0], &free));
        // a same letter in between never witnesses reducedness
        assert!(!is_reduced(&[0, 0, 0], &free));
        let mono = pair(PairKind::Monotone);
        assert!(is_permissible(&[1, 0], &mono) && !is_permissible(&[0, 1], &mono));
    }

    #[test]
    fn equivalence_examples() {
        let tensor = pair(PairKind::Tensor);
        assert!(equivalent(&[0, 1], &[1, 0], &tensor));
        assert_eq!(representative(&[1, 0], &tensor), vec![0, 1]);
        let free = pair(PairKind::Free);
        assert!(!equivalent(&[0, 1], &[1, 0], &free));
        let kinds = BTreeMap::from([
            ((0, 1), PairKind::Tensor),
            ((0, 2), PairKind::Free),
            ((1, 2), PairKind::Tensor),
        ]);
        let g = Bigraph::from_pairwise_indexed(Bigraph::default_names(3), &kinds).unwrap();
        for w in [vec![1, 0, 2], vec![0, 1, 2, 0]] {
            for v in 0..3 {
                let mut a = vec![v];
                a.extend(&w);
                let mut b = vec![v];
                b.extend(representative(&w, &g));
                assert!(equivalent(&a, &b, &g));
            }
        }
    }

    #[test]
    fn space_examples() {
        let one = Bigraph::singleton("v");
        let s = build_space(&one, &[unit(2)], 3).unwrap();
        assert_eq!(s.words(), &[vec![], vec![0]]);
        let s = build_space(&pair(PairKind::Boolean), &[unit(2), unit(2)], 2).unwrap();
        assert_eq!(s.words().len(), 3);
        let s = build_space(&pair(PairKind::Tensor), &[unit(2), unit(3)], 2).unwrap();
        assert_eq!(s.words(), &[vec![], vec![0], vec![1], vec![0, 1]]);
        assert_eq!(s.total_dim(), 1 + 1 + 2 + 2);
        let big = build_space(&pair(PairKind::Free), &[unit(16), unit(16)], 8);
        assert!(matches!(big, Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn lambda_examples() {
        let g = pair(PairKind::Free);
        let xi = random_unit_vector(3, 4);
        let s = build_space(&g, &[xi.clone(), unit(2)], 2).unwrap();
        let vac = StateVector::vacuum();
        let id = CMatrix::identity(3, 3);
        assert!(s.apply_lambda(0, &id, &vac).unwrap().distance(&vac) < 1e-12);
        let p = &xi * xi.adjoint();
        assert!(s.apply_lambda(0, &p, &vac).unwrap().distance(&vac) < 1e-12);
        let e2 = s.bases[0].column(1).into_owned();
        let a = &e2 * xi.adjoint();
        let out = s.apply_lambda(0, &a, &vac).unwrap();
        let coeff = s.complement_coords(0, &(&a * &xi));
        assert!((out.get(&[0]).unwrap() - &coeff).norm() < 1e-12);
        assert!(out.vacuum_coefficient().norm() < 1e-12);
        assert!(matches!(
            s.apply_lambda(0, &CMatrix::identity(2, 2), &vac),
            Err(Error::DimMismatch { .. })
        ));
        let x = s.apply_lambda(0, &a, &vac).unwrap();
        let x = s.apply_lambda(1, &random_matrix(2, 3, false).unwrap(), &x).unwrap();
        assert!(matches!(s.apply_lambda(0, &a, &x), Err(Error::TruncationOverflow(3))));
    }

    #[test]
    fn moments_match_cumulant_formula() {
        for (kind, colors) in [
            (PairKind::Monotone, vec![0, 1, 0]),
            (PairKind::Free, vec![0, 1, 0, 1]),
            (PairKind::Tensor, vec![0, 1, 0, 1]),
            (PairKind::Boolean, vec![1, 0, 0, 1]),
            (PairKind::AntiMonotone, vec![1, 0, 1, 1]),
        ] {
            let g = pair(kind);
            let fam = MatrixFamily::random(&colors, &[2, 3], 11).unwrap();
            let s = ProductSpace::from_states(&g, &fam.states, colors.len()).unwrap();
            let handles: Vec<usize> = (0..colors.len()).collect();
            let expected = joint_moment(&g, &colors, &handles, &fam, CumulantKind::Free).unwrap();
            let got = vacuum_moment(&s, &colors, &fam.matrices()).unwrap();
            assert!(close(got, expected), "{kind}: {got} vs {expected}");
        }
    }

    #[test]
    fn single_moment_is_state() {
        let g = Bigraph::singleton("v");
        let xi = random_unit_vector(3, 1);
        let s = build_space(&g, std::slice::from_ref(&xi), 1).unwrap();
        let a = random_matrix(3, 2, false).unwrap();
        let m = vacuum_moment(&s, &[0], std::slice::from_ref(&a)).unwrap();
        assert!(close(m, xi.dotc(&(&a * &xi))));
    }

    #[test]
    fn reversal_symmetry() {
        let g = pair(PairKind::Monotone);
        let colors = vec![0, 1, 1, 0, 1];
        let fam = MatrixFamily::random(&colors, &[3, 2], 5).unwrap();
        let s = ProductSpace::from_states(&g, &fam.states, 5).unwrap();
        let mats = fam.matrices();
        let forward = vacuum_moment(&s, &colors, &mats).unwrap();
        let rc: Vec<usize> = colors.iter().rev().copied().collect();
        let rm: Vec<CMatrix> = mats.iter().rev().map(|m| m.adjoint()).collect();
        let back = vacuum_moment(&s, &rc, &rm).unwrap();
        assert!(close(forward, back.conj()));
    }

    #[test]
    fn unfinished_examples() {
        let g = pair(PairKind::Free);
        let colors = vec![0, 1, 0, 0, 1, 0];
        let fam = MatrixFamily::random(&colors, &[2, 2], 3).unwrap();
        let s = ProductSpace::from_states(&g, &fam.states, 6).unwrap();
        let mats = fam.matrices();
        let singles = vec![(0, 0); 6];
        let out = unfinished_action(&s, &colors, &mats, &singles).unwrap();
        let mut expected = C64::new(1.0, 0.0);
        for (j, &v) in colors.iter().enumerate() {
            expected *= fam.states[v].apply(&mats[j]).unwrap();
        }
        assert!(out.admissible);
        assert!(close(out.operator.vacuum_coefficient(), expected));
        assert!(out.operator.distance(&out.predicted) < 1e-10);

        let one = vec![0; 6];
        let s1 = ProductSpace::from_states(&Bigraph::singleton("v"), &fam.states[..1], 6).unwrap();
        let steps = vec![(0, 0), (0, 0), (0, 0), (1, 0), (1, 1), (1, 1)];
        let out = unfinished_action(&s1, &one, &mats, &steps).unwrap();
        assert!(out.admissible);
        assert!(out.operator.distance(&out.predicted) < 1e-10);
        assert!(out.predicted.norm() > 1e-6);

        let mono = pair(PairKind::Monotone);
        let s2 = ProductSpace::from_states(&mono, &fam.states, 2).unwrap();
        let out = unfinished_action(&s2, &[1, 0], &mats[..2], &[(1, 0), (0, 0)]).unwrap();
        assert!(!out.admissible);
        assert!(out.operator.norm() < 1e-12 && out.predicted.norm() == 0.0);

        let bad = unfinished_action(&s1, &one, &mats, &[(0, 1), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0)]);
        assert!(matches!(bad, Err(Error::InvalidPath(_))));
    }

    #[test]
    fn four_term_expansion() {
        let g = pair(PairKind::Tensor);
        let colors = vec![0, 1, 1, 0];
        let fam = MatrixFamily::random(&colors, &[2, 3], 8).unwrap();
        let s = ProductSpace::from_states(&g, &fam.states, 4).unwrap();
        let mats = fam.matrices();
        let full = vacuum_moment(&s, &[0, 1, 1, 0], &mats.iter().rev().cloned().collect::<Vec<_>>()).unwrap();
        let total = four_term_sum(&s, &colors, &mats).unwrap();
        assert!(close(full, total));
    }
}
