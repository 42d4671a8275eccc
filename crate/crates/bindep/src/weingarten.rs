//! Exact unitary Weingarten calculus.
//!
//! `Wg(·, N)` is the class function on `S_k` inverse to the Gram function
//! `G(σ, τ) = N^{#cycles(σ⁻¹τ)}`. Values are exact rationals obtained by
//! fraction-free elimination on the system collapsed to conjugacy classes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bigraph::{SiteModel, SiteRole};
use crate::error::{guard, Error, Result};
use crate::partitions::{moebius_nc, SetPartition};
use crate::perm::{integer_partitions, Permutation};

/// Largest `k` for which a table is computed.
pub const MAX_WEINGARTEN_K: usize = 7;

/// Longest color word whose stabilizer is enumerated.
pub const MAX_STABILIZER_WORD: usize = 8;

/// `Wg(·, N)` on `S_k`, one exact value per cycle type.
#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenTable {
    k: usize,
    n: u64,
    values: BTreeMap<Vec<usize>, BigRational>,
}

impl WeingartenTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Value at a cycle type, given as non-increasing part sizes.
    pub fn by_cycle_type(&self, cycle_type: &[usize]) -> Option<&BigRational> {
        self.values.get(cycle_type)
    }

    /// Value at a permutation of `k` points.
    pub fn value(&self, sigma: &Permutation) -> &BigRational {
        assert_eq!(sigma.len(), self.k, "permutation size differs from the table");
        &self.values[&sigma.cycle_type()]
    }

    /// Cycle types with their values, largest cycle type first.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &BigRational)> {
        self.values.iter().rev()
    }
}

impl fmt::Display for WeingartenTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, v) in self.entries() {
            let parts: Vec<String> = t.iter().map(usize::to_string).collect();
            writeln!(f, "{} {}", parts.join(","), v)?;
        }
        Ok(())
    }
}

fn big_pow(n: u64, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(n), e)
}

/// Solves `a x = b` exactly; `None` when `a` is singular.
fn bareiss_solve(a: Vec<Vec<BigInt>>, b: Vec<BigInt>) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = a
        .into_iter()
        .zip(b)
        .map(|(mut row, rhs)| {
            row.push(rhs);
            row
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    Some(x)
}

/// Exact Weingarten table for `k ≤ 7` and `N ≥ k`.
pub fn weingarten_table(k: usize, n: u64) -> Result<WeingartenTable> {
    guard("Weingarten order k", k, MAX_WEINGARTEN_K)?;
    if n < k as u64 || n == 0 {
        return Err(Error::SingularGram { k, n });
    }
    let classes = integer_partitions(k);
    let position: HashMap<Vec<usize>, usize> = classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let reps: Vec<Permutation> = classes.iter().map(|c| Permutation::of_cycle_type(c)).collect();
    let m = classes.len();
    let mut a = vec![vec![BigInt::zero(); m]; m];
    for rho in Permutation::all(k) {
        let weight = big_pow(n, rho.num_cycles());
        let rho_inv = rho.inverse();
        for (row, rep) in reps.iter().enumerate() {
            let col = position[&rho_inv.compose(rep).cycle_type()];
            a[row][col] += &weight;
        }
    }
    let identity_class = position[&vec![1; k]];
    let mut b = vec![BigInt::zero(); m];
    b[identity_class] = BigInt::one();
    let x = bareiss_solve(a, b).ok_or(Error::SingularGram { k, n })?;
    Ok(WeingartenTable {
        k,
        n,
        values: classes.into_iter().zip(x).collect(),
    })
}

/// Memoised tables keyed by `(k, N)`.
#[derive(Debug, Default)]
pub struct WeingartenCache {
    tables: HashMap<(usize, u64), WeingartenTable>,
}

impl WeingartenCache {
    pub fn new() -> WeingartenCache {
        WeingartenCache::default()
    }

    pub fn table(&mut self, k: usize, n: u64) -> Result<&WeingartenTable> {
        if let std::collections::hash_map::Entry::Vacant(e) = self.tables.entry((k, n)) {
            e.insert(weingarten_table(k, n)?);
        }
        Ok(&self.tables[&(k, n)])
    }

    pub fn value(&mut self, sigma: &Permutation, n: u64) -> Result<BigRational> {
        Ok(self.table(sigma.len(), n)?.value(sigma).clone())
    }
}

/// Leading term `μ(σ) N^{e}` of `Wg(σ, N)`: the Möbius value from the
/// bottom of the non-crossing lattice to the cycle partition of `σ`, and the
/// exponent `e = -k - (k - #cycles(σ))`.
pub fn weingarten_asymptotic(sigma: &Permutation) -> Result<(i64, i64)> {
    let k = sigma.len();
    let cycles = SetPartition::from_permutation(sigma);
    let mu = moebius_nc(&SetPartition::singletons(k), &cycles)?;
    Ok((mu, -(k as i64) - sigma.length() as i64))
}

/// `BigRational` to `f64`, exact up to rounding.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let (n, d) = (x.numer(), x.denom());
        let shift = n.bits().max(d.bits()).saturating_sub(60);
        let n = (n >> shift).to_f64().unwrap_or(0.0);
        let d = (d >> shift).to_f64().unwrap_or(1.0);
        if d == 0.0 {
            if x.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            n / d
        }
    })
}

/// Positions of each color in a word, keyed by color.
pub fn color_blocks(word: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in word.iter().enumerate() {
        blocks.entry(c).or_default().push(i);
    }
    blocks
}

/// All permutations of the word positions preserving the colors, as the
/// direct product of the symmetric groups of the color classes.
pub fn stabilizer(word: &[usize]) -> Result<Vec<Permutation>> {
    guard("stabilizer word length", word.len(), MAX_STABILIZER_WORD)?;
    let blocks: Vec<Vec<usize>> = color_blocks(word).into_values().collect();
    let mut out = vec![(0..word.len()).collect::<Vec<usize>>()];
    for block in &blocks {
        let mut next = Vec::new();
        for base in &out {
            for local in Permutation::all(block.len()) {
                let mut map = base.clone();
                for (t, &pos) in block.iter().enumerate() {
                    map[pos] = block[local.apply(t)];
                }
                next.push(map);
            }
        }
        out = next;
    }
    out.into_iter().map(Permutation::new).collect()
}

/// Restriction of a permutation to an invariant set, relabelled by the
/// increasing order of that set; `None` when the set is not invariant.
pub fn restrict(sigma: &Permutation, set: &[usize]) -> Option<Permutation> {
    let local: HashMap<usize, usize> = set.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let map = set
        .iter()
        .map(|&x| local.get(&sigma.apply(x)).copied())
        .collect::<Option<Vec<usize>>>()?;
    Permutation::new(map).ok()
}

/// `∏_c Wg(α|_{B_c}, N^{|S_c^(1)|})` over the colors of the word, where
/// `B_c` are the positions of color `c`.
pub fn weingarten_tilde(alpha: &Permutation, word: &[usize], n: u64, model: &SiteModel) -> Result<BigRational> {
    weingarten_tilde_cached(alpha, word, n, model, &mut WeingartenCache::new())
}

pub fn weingarten_tilde_cached(
    alpha: &Permutation,
    word: &[usize],
    n: u64,
    model: &SiteModel,
    cache: &mut WeingartenCache,
) -> Result<BigRational> {
    if alpha.len() != word.len() {
        return Err(Error::DimMismatch {
            expected: word.len(),
            got: alpha.len(),
        });
    }
    let mut value = BigRational::one();
    for (c, block) in color_blocks(word) {
        if c >= model.n_vertices() {
            return Err(Error::UnknownVertex(format!("#{c}")));
        }
        let local = restrict(alpha, &block).ok_or(Error::NotStabilizing)?;
        let dim = site_power(n, model.s1[c].len())?;
        value *= cache.value(&local, dim)?;
    }
    Ok(value)
}

/// `N^e` with overflow reported as a size-guard failure.
pub fn site_power(n: u64, e: usize) -> Result<u64> {
    n.checked_pow(e as u32).ok_or(Error::SizeGuard {
        what: "site dimension N^|S1|",
        value: usize::MAX,
        limit: u64::MAX as usize,
    })
}

/// Both sides of the exponent identity for site `s`, with `σ, τ` in the
/// stabilizer of the word. Positions are augmented by a leading vacuum index
/// `0` whose active set is empty, `Z` is the full cycle on `{0, …, k}` and
/// `Z_s` the full cycle on the positions active at `s`:
///
/// `#cyc(Z⁻¹τ̄_s) + #cyc(σ_s) − 1 − |J_s| − |σ_sτ_s⁻¹|` and
/// `−(|σ_s| + |σ_s⁻¹τ_s| + |τ_s⁻¹Z_s| − |Z_s|)`.
///
/// Returns `None` when no position is active at `s`.
pub fn exponent_identity_sides(
    word: &[usize],
    model: &SiteModel,
    sigma: &Permutation,
    tau: &Permutation,
    s: usize,
) -> Result<Option<(i64, i64)>> {
    let k = word.len();
    let active: Vec<usize> = (0..k).filter(|&i| model.role(word[i], s) == SiteRole::Active).collect();
    if active.is_empty() {
        return Ok(None);
    }
    let sigma_s = restrict(sigma, &active).ok_or(Error::NotStabilizing)?;
    let tau_s = restrict(tau, &active).ok_or(Error::NotStabilizing)?;
    let m = active.len();
    let mut bar = vec![0usize; k + 1];
    bar[0] = 0;
    for i in 0..k {
        bar[i + 1] = i + 1;
    }
    for (t, &pos) in active.iter().enumerate() {
        bar[pos + 1] = active[tau_s.apply(t)] + 1;
    }
    let tau_bar = Permutation::new(bar)?;
    let z = Permutation::full_cycle(k + 1);
    let zs = Permutation::full_cycle(m);
    let len = |p: &Permutation| p.length() as i64;
    let left = z.inverse().compose(&tau_bar).num_cycles() as i64 + sigma_s.num_cycles() as i64
        - 1
        - m as i64
        - len(&sigma_s.compose(&tau_s.inverse()));
    let right =
        -(len(&sigma_s) + len(&sigma_s.inverse().compose(&tau_s)) + len(&tau_s.inverse().compose(&zs)) - len(&zs));
    Ok(Some((left, right)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn closed_forms() {
        for n in 1..10u64 {
            let t = weingarten_table(1, n).unwrap();
            assert_eq!(t.by_cycle_type(&[1]).unwrap(), &q(1, n as i64));
        }
        for n in 2..10i64 {
            let t = weingarten_table(2, n as u64).unwrap();
            assert_eq!(t.by_cycle_type(&[1, 1]).unwrap(), &q(1, n * n - 1));
            assert_eq!(t.by_cycle_type(&[2]).unwrap(), &q(-1, n * (n * n - 1)));
        }
        // k = 3 values from the standard closed forms
        let n = 5i64;
        let t = weingarten_table(3, n as u64).unwrap();
        let den = n * (n * n - 1) * (n * n - 4);
        assert_eq!(t.by_cycle_type(&[1, 1, 1]).unwrap(), &q(n * n - 2, den));
        assert_eq!(t.by_cycle_type(&[2, 1]).unwrap(), &q(-1, (n * n - 1) * (n * n - 4)));
        assert_eq!(t.by_cycle_type(&[3]).unwrap(), &q(2, den));
    }

    #[test]
    fn guards() {
        assert!(matches!(
            weingarten_table(3, 2),
            Err(Error::SingularGram { k: 3, n: 2 })
        ));
        assert!(matches!(weingarten_table(8, 9), Err(Error::SizeGuard { .. })));
        assert!(matches!(stabilizer(&[0; 9]), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn gram_identity_k3() {
        let t = weingarten_table(3, 5).unwrap();
        let perms: Vec<Permutation> = Permutation::all(3).collect();
        for s in &perms {
            for u in &perms {
                let mut acc = BigRational::zero();
                for r in &perms {
                    let g = BigRational::from_integer(big_pow(5, s.inverse().compose(r).num_cycles()));
                    acc += g * t.value(&r.inverse().compose(u));
                }
                let expected = if s == u {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                assert_eq!(acc, expected);
            }
        }
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(weingarten_asymptotic(&Permutation::identity(2)).unwrap(), (1, -2));
        assert_eq!(weingarten_asymptotic(&Permutation::full_cycle(2)).unwrap(), (-1, -3));
        assert_eq!(weingarten_asymptotic(&Permutation::full_cycle(3)).unwrap(), (2, -5));
        let crossing = Permutation::from_cycles(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert!(matches!(weingarten_asymptotic(&crossing), Err(Error::NotNonCrossing)));
    }

    #[test]
    fn stabilizer_examples() {
        assert_eq!(stabilizer(&[0, 1, 2]).unwrap(), vec![Permutation::identity(3)]);
        assert_eq!(stabilizer(&[0, 0, 0]).unwrap().len(), 6);
        let s = stabilizer(&[0, 1, 0]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|p| p.apply(1) == 1));
    }

    #[test]
    fn tilde_examples() {
        let model = SiteModel::new(
            vec!["a".into(), "b".into()],
            vec!["v".into(), "w".into()],
            vec![vec![0], vec![0, 1]],
            vec![vec![1], vec![]],
        )
        .unwrap();
        let n = 3u64;
        let id = Permutation::identity(3);
        let v = weingarten_tilde(&id, &[0, 1, 0], n, &model).unwrap();
        let expected = weingarten_table(2, 3).unwrap().by_cycle_type(&[1, 1]).unwrap().clone()
            * weingarten_table(1, 9).unwrap().by_cycle_type(&[1]).unwrap().clone();
        assert_eq!(v, expected);
        let single = weingarten_tilde(&Permutation::full_cycle(2), &[0, 0], n, &model).unwrap();
        assert_eq!(&single, weingarten_table(2, 3).unwrap().by_cycle_type(&[2]).unwrap());
        let mixing = Permutation::new(vec![1, 0, 2]).unwrap();
        assert!(matches!(
            weingarten_tilde(&mixing, &[0, 1, 0], n, &model),
            Err(Error::NotStabilizing)
        ));
    }

    #[test]
    fn rational_conversion() {
        assert_eq!(rational_to_f64(&q(1, 4)), 0.25);
        let tiny = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 400));
        assert_eq!(rational_to_f64(&tiny), 0.0);
    }
}
