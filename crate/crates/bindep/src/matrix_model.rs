//! Random matrix realisation of bigraph independence on `M_N^{⊗S}`.
//!
//! Vertex `v` acts through `λ_v(X) = X ⊗ (ξξ*)^{⊗S_v^(2)} ⊗ I^{⊗S_v^(3)}`
//! with `X` on the active sites `S_v^(1)`; `ξ` is the first basis vector of
//! every site and the state is the vector state of `ξ^{⊗S}`. Multi-indices
//! over a set of sites put the smallest site first (most significant).
//! Matrices are rotated by independent Haar unitaries per vertex.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bigraph::{Bigraph, SiteModel, SiteRole};
use crate::cumulants::{joint_moment, pairwise_sum, CumulantKind, MomentFunctional};
use crate::error::{guard, Error, Result};
use crate::ncps::{CMatrix, CVector, C64};
use crate::weingarten::{color_blocks, rational_to_f64, restrict, site_power, stabilizer, WeingartenCache};

/// Largest total dimension `N^{|S|}` used for sampling.
pub const MAX_SAMPLING_DIM: usize = 4096;

/// Largest dense embedding produced by [`EmbeddedOperator::dense`].
pub const MAX_DENSE_DIM: usize = 1024;

/// Largest stabilizer summed over by [`exact_expectation`].
pub const MAX_EXACT_STABILIZER: usize = 720;

/// Haar unitary of size `dim` from a seed.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    haar_unitary_with(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Haar unitary from a complex Ginibre matrix: QR factorisation with the
/// phases of the diagonal of `R` moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    guard("unitary dimension", dim, MAX_SAMPLING_DIM)?;
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Ok(q)
}

/// A site model with a common per-site dimension `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixModel {
    pub sites: SiteModel,
    pub n: usize,
}

impl MatrixModel {
    /// Every vertex needs at least one active site.
    pub fn new(sites: SiteModel, n: usize) -> Result<MatrixModel> {
        sites.bigraph()?;
        if n == 0 {
            return Err(Error::InvalidSiteModel("site dimension must be positive".into()));
        }
        Ok(MatrixModel { sites, n })
    }

    pub fn bigraph(&self) -> Bigraph {
        self.sites.bigraph().expect("validated at construction")
    }

    /// `N^{|S_v^(1)|}`.
    pub fn vertex_dim(&self, v: usize) -> Result<usize> {
        Ok(site_power(self.n as u64, self.sites.s1[v].len())? as usize)
    }

    /// `N^{|S|}`.
    pub fn total_dim(&self) -> Result<usize> {
        Ok(site_power(self.n as u64, self.sites.n_sites())? as usize)
    }

    fn check_word(&self, colors: &[usize], matrices: &[CMatrix]) -> Result<()> {
        if colors.len() != matrices.len() {
            return Err(Error::DimMismatch {
                expected: colors.len(),
                got: matrices.len(),
            });
        }
        for (&c, m) in colors.iter().zip(matrices) {
            if c >= self.sites.n_vertices() {
                return Err(Error::UnknownVertex(format!("#{c}")));
            }
            let d = self.vertex_dim(c)?;
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    got: m.nrows(),
                });
            }
        }
        Ok(())
    }
}

/// `λ_v(X)` stored by its factors and applied to vectors without forming
/// the Kronecker product.
#[derive(Debug, Clone)]
pub struct EmbeddedOperator {
    pub vertex: usize,
    pub matrix: CMatrix,
    total: usize,
    /// Offset of each active multi-index inside a global index.
    active_offsets: Vec<usize>,
    /// Offsets of the idle-site assignments, projected sites held at zero.
    outer_offsets: Vec<usize>,
}

fn digit_offsets(sites: &[usize], n: usize, n_sites: usize) -> Vec<usize> {
    let strides: Vec<usize> = sites.iter().map(|&s| n.pow((n_sites - 1 - s) as u32)).collect();
    let count = n.pow(sites.len() as u32);
    (0..count)
        .map(|mut a| {
            let mut off = 0;
            for p in (0..sites.len()).rev() {
                off += (a % n) * strides[p];
                a /= n;
            }
            off
        })
        .collect()
}

/// Lazy `λ_v(X)` for a model whose total dimension is within the sampling
/// cap.
pub fn embed(model: &MatrixModel, v: usize, x: &CMatrix) -> Result<EmbeddedOperator> {
    let total = model.total_dim()?;
    guard("tensor dimension N^|S|", total, MAX_SAMPLING_DIM)?;
    let d = model.vertex_dim(v)?;
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: x.nrows(),
        });
    }
    let ns = model.sites.n_sites();
    let idle = model.sites.s3(v);
    Ok(EmbeddedOperator {
        vertex: v,
        matrix: x.clone(),
        total,
        active_offsets: digit_offsets(&model.sites.s1[v], model.n, ns),
        outer_offsets: digit_offsets(&idle, model.n, ns),
    })
}

impl EmbeddedOperator {
    pub fn dim(&self) -> usize {
        self.total
    }

    pub fn apply(&self, psi: &CVector) -> Result<CVector> {
        if psi.len() != self.total {
            return Err(Error::DimMismatch {
                expected: self.total,
                got: psi.len(),
            });
        }
        let d = self.active_offsets.len();
        let mut out = CVector::zeros(self.total);
        let mut gathered = CVector::zeros(d);
        for &o in &self.outer_offsets {
            for (b, &off) in self.active_offsets.iter().enumerate() {
                gathered[b] = psi[o + off];
            }
            let image = &self.matrix * &gathered;
            for (a, &off) in self.active_offsets.iter().enumerate() {
                out[o + off] = image[a];
            }
        }
        Ok(out)
    }

    /// Dense matrix of the operator, built entry by entry from the site
    /// roles.
    pub fn dense(&self, model: &MatrixModel) -> Result<CMatrix> {
        guard("dense embedding dimension", self.total, MAX_DENSE_DIM)?;
        let ns = model.sites.n_sites();
        let n = model.n;
        let digits = |mut x: usize| {
            let mut d = vec![0usize; ns];
            for s in (0..ns).rev() {
                d[s] = x % n;
                x /= n;
            }
            d
        };
        let active = &model.sites.s1[self.vertex];
        let local = |d: &[usize]| active.iter().fold(0usize, |acc, &s| acc * n + d[s]);
        Ok(CMatrix::from_fn(self.total, self.total, |x, y| {
            let (dx, dy) = (digits(x), digits(y));
            for s in 0..ns {
                match model.sites.role(self.vertex, s) {
                    SiteRole::Active => {}
                    SiteRole::Projected if dx[s] != 0 || dy[s] != 0 => return C64::new(0.0, 0.0),
                    SiteRole::Idle if dx[s] != dy[s] => return C64::new(0.0, 0.0),
                    _ => {}
                }
            }
            self.matrix[(local(&dx), local(&dy))]
        }))
    }
}

/// The vector `ξ^{⊗S}`.
pub fn vacuum(model: &MatrixModel) -> Result<CVector> {
    let mut x = CVector::zeros(model.total_dim()?);
    x[0] = C64::new(1.0, 0.0);
    Ok(x)
}

/// One Haar unitary per vertex, drawn in vertex order.
pub fn draw_unitaries<R: Rng + ?Sized>(model: &MatrixModel, rng: &mut R) -> Result<Vec<CMatrix>> {
    (0..model.sites.n_vertices())
        .map(|v| haar_unitary_with(model.vertex_dim(v)?, rng))
        .collect()
}

/// `⟨ξ^{⊗S}, λ_{c₁}(U A₁ U*) ⋯ λ_{c_k}(U A_k U*) ξ^{⊗S}⟩` for given
/// unitaries, one per vertex. Since the projections are idempotent,
/// `λ(U A U*) = λ(U) λ(A) λ(U*)`, and the three factors are applied in turn.
pub fn sample_moment(
    model: &MatrixModel,
    colors: &[usize],
    matrices: &[CMatrix],
    unitaries: &[CMatrix],
) -> Result<C64> {
    model.check_word(colors, matrices)?;
    let mut rotations = Vec::with_capacity(unitaries.len());
    for (v, u) in unitaries.iter().enumerate() {
        rotations.push((embed(model, v, u)?, embed(model, v, &u.adjoint())?));
    }
    let mut psi = vacuum(model)?;
    for (&c, a) in colors.iter().zip(matrices).rev() {
        let (u, u_star) = &rotations[c];
        psi = u_star.apply(&psi)?;
        psi = embed(model, c, a)?.apply(&psi)?;
        psi = u.apply(&psi)?;
    }
    Ok(psi[0])
}

/// [`sample_moment`] with unitaries drawn from `ChaCha8(seed)`.
pub fn sample_with_seed(model: &MatrixModel, colors: &[usize], matrices: &[CMatrix], seed: u64) -> Result<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unitaries = draw_unitaries(model, &mut rng)?;
    sample_moment(model, colors, matrices, &unitaries)
}

/// Sample mean and spread of [`sample_moment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub samples: usize,
    pub mean: C64,
    /// Unbiased variance of the complex samples, `Σ|x - mean|² / (n - 1)`.
    pub variance: f64,
    /// `sqrt(variance / n)`.
    pub stderr: f64,
}

/// Monte Carlo average; sample `i` uses the seed `seed ^ i`.
pub fn monte_carlo(
    model: &MatrixModel,
    colors: &[usize],
    matrices: &[CMatrix],
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples < 2 {
        return Err(Error::Parse("Monte Carlo needs at least two samples".into()));
    }
    model.check_word(colors, matrices)?;
    guard("tensor dimension N^|S|", model.total_dim()?, MAX_SAMPLING_DIM)?;
    let values = (0..samples)
        .into_par_iter()
        .map(|i| sample_with_seed(model, colors, matrices, seed ^ i as u64))
        .collect::<Result<Vec<C64>>>()?;
    Ok(summarize(&values))
}

/// Mean, variance and standard error of complex samples.
pub fn summarize(values: &[C64]) -> MonteCarloEstimate {
    let n = values.len();
    let mean = pairwise_sum(values) / n as f64;
    let dev: Vec<C64> = values.iter().map(|x| C64::new((x - mean).norm_sqr(), 0.0)).collect();
    let variance = if n > 1 {
        pairwise_sum(&dev).re / (n - 1) as f64
    } else {
        0.0
    };
    MonteCarloEstimate {
        samples: n,
        mean,
        variance,
        stderr: (variance / n as f64).sqrt(),
    }
}

fn is_diagonal(m: &CMatrix) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

/// Unnormalised trace of `m_{l-1} ⋯ m_1 m_0` for the listed matrices.
fn product_trace(mats: &[&CMatrix]) -> C64 {
    let d = mats[0].nrows();
    if mats.iter().all(|m| is_diagonal(m)) {
        return (0..d).map(|i| mats.iter().map(|m| m[(i, i)]).product::<C64>()).sum();
    }
    let mut prod = mats[0].clone();
    for m in &mats[1..] {
        prod = *m * prod;
    }
    prod.trace()
}

/// Normalised-trace moments of the word's matrices: the moment of handles
/// `h₁ ⋯ h_m` is `tr(A_{h₁} ⋯ A_{h_m})`.
pub struct TraceFamily<'a> {
    pub colors: &'a [usize],
    pub matrices: &'a [CMatrix],
}

impl MomentFunctional for TraceFamily<'_> {
    fn moment(&self, _vertex: usize, handles: &[usize]) -> C64 {
        if handles.is_empty() {
            return C64::new(1.0, 0.0);
        }
        let mats: Vec<&CMatrix> = handles.iter().rev().map(|&h| &self.matrices[h]).collect();
        product_trace(&mats) / mats[0].nrows() as f64
    }

    fn vertex_of(&self, handle: usize) -> Option<usize> {
        self.colors.get(handle).copied()
    }
}

/// `Σ_{π ∈ P(c,G)} K^{free,tr}_π(A₁, …, A_k)` for the bigraph of the model.
pub fn limit_moment(model: &MatrixModel, colors: &[usize], matrices: &[CMatrix]) -> Result<C64> {
    model.check_word(colors, matrices)?;
    let fam = TraceFamily { colors, matrices };
    let handles: Vec<usize> = (0..colors.len()).collect();
    joint_moment(&model.bigraph(), colors, &handles, &fam, CumulantKind::Free)
}

/// Number of index assignments left free at one site by the pairing `σ`:
/// chain nodes `0, …, k` with node `i` the row index of position `i`; both
/// ends are pinned to the vacuum.
fn free_components(model: &MatrixModel, colors: &[usize], sigma: &crate::perm::Permutation, s: usize) -> usize {
    let k = colors.len();
    let mut parent: Vec<usize> = (0..=k).collect();
    let mut pinned = vec![false; k + 1];
    pinned[0] = true;
    pinned[k] = true;
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    };
    for (i, &c) in colors.iter().enumerate() {
        match model.sites.role(c, s) {
            SiteRole::Active => union(&mut parent, i, sigma.apply(i) + 1),
            SiteRole::Projected => {
                pinned[i] = true;
                pinned[i + 1] = true;
            }
            SiteRole::Idle => union(&mut parent, i, i + 1),
        }
    }
    let mut root_pinned = vec![false; k + 1];
    for x in 0..=k {
        if pinned[x] {
            let r = find(&mut parent, x);
            root_pinned[r] = true;
        }
    }
    (0..=k)
        .filter(|&x| find(&mut parent, x) == x && !root_pinned[x])
        .count()
}

/// Product over the cycles of `τ` of the unnormalised traces of the
/// matrices along each cycle, later cycle elements on the left.
fn cycle_traces(tau: &crate::perm::Permutation, matrices: &[CMatrix]) -> C64 {
    tau.cycles()
        .iter()
        .map(|cyc| {
            let mats: Vec<&CMatrix> = cyc.iter().map(|&t| &matrices[t]).collect();
            product_trace(&mats)
        })
        .product()
}

/// Exact `E⟨ξ^{⊗S}, λ_{c₁}(U A₁ U*) ⋯ λ_{c_k}(U A_k U*) ξ^{⊗S}⟩` at finite
/// `N` by the Weingarten formula
/// `Σ_{σ,τ ∈ Stab(c)} W̃g(τσ⁻¹) ∏_s N^{free_s(σ)} ∏_{cycles of τ} Tr(⋯)`.
pub fn exact_expectation(model: &MatrixModel, colors: &[usize], matrices: &[CMatrix]) -> Result<C64> {
    model.check_word(colors, matrices)?;
    let stab = stabilizer(colors)?;
    guard("stabilizer size", stab.len(), MAX_EXACT_STABILIZER)?;
    let blocks = color_blocks(colors);
    let mut cache = WeingartenCache::new();
    let mut tables: Vec<(Vec<usize>, std::collections::HashMap<Vec<usize>, f64>)> = Vec::new();
    for (&c, block) in &blocks {
        let dim = site_power(model.n as u64, model.sites.s1[c].len())?;
        let table = cache.table(block.len(), dim)?;
        let values = table.entries().map(|(t, v)| (t.clone(), rational_to_f64(v))).collect();
        tables.push((block.clone(), values));
    }
    let n = model.n as f64;
    let counts: Vec<f64> = stab
        .par_iter()
        .map(|sigma| {
            (0..model.sites.n_sites())
                .map(|s| n.powi(free_components(model, colors, sigma, s) as i32))
                .product()
        })
        .collect();
    let traces: Vec<C64> = stab.par_iter().map(|tau| cycle_traces(tau, matrices)).collect();
    let rows: Vec<C64> = stab
        .par_iter()
        .enumerate()
        .map(|(a, sigma)| {
            let sigma_inv = sigma.inverse();
            let terms: Vec<C64> = stab
                .iter()
                .enumerate()
                .map(|(b, tau)| {
                    let alpha = tau.compose(&sigma_inv);
                    let wg: f64 = tables
                        .iter()
                        .map(|(block, values)| {
                            let local = restrict(&alpha, block).expect("stabilizer elements preserve colors");
                            values[&local.cycle_type()]
                        })
                        .product();
                    traces[b] * (wg * counts[a])
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    Ok(pairwise_sum(&rows))
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub exact: C64,
    pub limit: C64,
    pub gap: f64,
}

/// Gap between the finite-`N` expectation and the limit formula along a list
/// of `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log gap` against `log N` over the rows whose
    /// gap exceeds [`GAP_FLOOR`]; `None` when fewer than two rows qualify.
    pub slope: Option<f64>,
}

/// Gaps below this are treated as rounding noise.
pub const GAP_FLOOR: f64 = 1e-12;

impl ConvergenceStudy {
    /// Largest gap in the table.
    pub fn max_gap(&self) -> f64 {
        self.rows.iter().map(|r| r.gap).fold(0.0, f64::max)
    }

    /// Whether every gap is at rounding level.
    pub fn is_exact(&self) -> bool {
        self.max_gap() <= GAP_FLOOR
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Evaluates exact and limit moments for each `N`, with matrices produced by
/// `generator(model)`.
pub fn convergence_study(
    sites: &SiteModel,
    colors: &[usize],
    generator: &dyn Fn(&MatrixModel) -> Result<Vec<CMatrix>>,
    n_list: &[usize],
) -> Result<ConvergenceStudy> {
    let mut rows = Vec::new();
    for &n in n_list {
        let model = MatrixModel::new(sites.clone(), n)?;
        let mats = generator(&model)?;
        let exact = exact_expectation(&model, colors, &mats)?;
        let limit = limit_moment(&model, colors, &mats)?;
        rows.push(ConvergenceRow {
            n,
            exact,
            limit,
            gap: (exact - limit).norm(),
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.gap > GAP_FLOOR)
        .map(|r| ((r.n as f64).ln(), r.gap.ln()))
        .collect();
    Ok(ConvergenceStudy {
        slope: fit_slope(&points),
        rows,
    })
}

/// Diagonal matrices with a fixed spectral profile: position `j` of the word
/// gets `diag(f_j(t_i))` with `t_i = (i + ½)/D` on its vertex dimension `D`,
/// so traces of products converge as `N` grows.
pub fn profile_matrices(model: &MatrixModel, colors: &[usize]) -> Result<Vec<CMatrix>> {
    colors
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let d = model.vertex_dim(c)?;
            let f = |t: f64| {
                let a = (j + 1) as f64;
                C64::new(
                    (std::f64::consts::PI * a * t).cos() + 0.3 * a,
                    0.5 * (std::f64::consts::PI * (a + 1.0) * t).sin(),
                )
            };
            Ok(CMatrix::from_diagonal(&CVector::from_fn(d, |i, _| {
                f((i as f64 + 0.5) / d as f64)
            })))
        })
        .collect()
}

/// Reproducible random matrices of the vertex dimensions, entries of modulus
/// at most one.
pub fn random_matrices(model: &MatrixModel, colors: &[usize], seed: u64) -> Result<Vec<CMatrix>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    colors
        .iter()
        .map(|&c| {
            let d = model.vertex_dim(c)?;
            Ok(CMatrix::from_fn(d, d, |_, _| {
                C64::new(rng.random_range(-r..=r), rng.random_range(-r..=r))
            }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(sites: usize, s1: Vec<Vec<usize>>, s2: Vec<Vec<usize>>, n: usize) -> MatrixModel {
        let names = (0..s1.len()).map(|v| format!("v{}", v + 1)).collect();
        let site_names = (0..sites).map(|s| format!("s{s}")).collect();
        MatrixModel::new(SiteModel::new(site_names, names, s1, s2).unwrap(), n).unwrap()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
    }

    #[test]
    fn haar_is_unitary_and_reproducible() {
        let u = haar_unitary(6, 3).unwrap();
        let id = CMatrix::identity(6, 6);
        assert!((u.adjoint() * &u - id).norm() < 1e-10);
        assert_eq!(u, haar_unitary(6, 3).unwrap());
        assert_ne!(u, haar_unitary(6, 4).unwrap());
        assert!(matches!(haar_unitary(4097, 0), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn embedding_matches_dense() {
        let m = model(2, vec![vec![0], vec![1]], vec![vec![1], vec![]], 3);
        let x = random_matrices(&m, &[0], 1).unwrap().remove(0);
        let op = embed(&m, 0, &x).unwrap();
        let dense = op.dense(&m).unwrap();
        let psi = crate::ncps::random_unit_vector(9, 2);
        assert!((op.apply(&psi).unwrap() - &dense * &psi).norm() < 1e-12);
        let id = embed(&m, 0, &CMatrix::identity(3, 3)).unwrap();
        let vac = vacuum(&m).unwrap();
        assert!((id.apply(&vac).unwrap() - &vac).norm() < 1e-15);
        let image = op.apply(&psi).unwrap();
        for (i, z) in image.iter().enumerate() {
            if i % 3 != 0 {
                assert_eq!(*z, C64::new(0.0, 0.0));
            }
        }
        let y = random_matrices(&m, &[1], 4).unwrap().remove(0);
        let op = embed(&m, 1, &y).unwrap();
        assert!((op.apply(&psi).unwrap() - op.dense(&m).unwrap() * &psi).norm() < 1e-12);
        assert!(matches!(
            embed(&m, 0, &CMatrix::identity(2, 2)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn single_moments() {
        let m = model(1, vec![vec![0]], vec![vec![]], 4);
        let id = vec![CMatrix::identity(4, 4)];
        assert!(close(
            sample_with_seed(&m, &[0], &id, 9).unwrap(),
            C64::new(1.0, 0.0),
            1e-13
        ));
        let a = random_matrices(&m, &[0], 5).unwrap();
        let tr = a[0].trace() / 4.0;
        assert!(close(exact_expectation(&m, &[0], &a).unwrap(), tr, 1e-12));
        let est = monte_carlo(&m, &[0, 0], &[id[0].clone(), id[0].clone()], 10, 1).unwrap();
        assert!(est.stderr < 1e-13);
    }

    #[test]
    fn exact_one_vertex_is_trace_of_product() {
        let m = model(1, vec![vec![0]], vec![vec![]], 5);
        let colors = [0, 0, 0];
        let a = random_matrices(&m, &colors, 2).unwrap();
        let expected = (&a[0] * &a[1] * &a[2]).trace() / 5.0;
        assert!(close(exact_expectation(&m, &colors, &a).unwrap(), expected, 1e-11));
    }

    #[test]
    fn exact_boolean_pair_closed_form() {
        let m = model(2, vec![vec![0], vec![1]], vec![vec![1], vec![0]], 6);
        let colors = [0, 1, 0];
        let a = random_matrices(&m, &colors, 3).unwrap();
        let d = 6.0;
        let tr = |x: &CMatrix| x.trace() / d;
        let expected = (tr(&a[0]) * tr(&a[2]) * d + tr(&(&a[0] * &a[2]))) / (d + 1.0) * tr(&a[1]);
        assert!(close(exact_expectation(&m, &colors, &a).unwrap(), expected, 1e-11));
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [4.0f64, 8.0, 16.0]
            .iter()
            .map(|n| (n.ln(), (3.0 / (n * n)).ln()))
            .collect();
        assert!((fit_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(fit_slope(&pts[..1]), None);
    }
}
